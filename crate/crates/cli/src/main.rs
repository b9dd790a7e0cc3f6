//! `sci`: command-line front end for the workbench.

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sci_core::analysis::{equiv, goodness_check, incoherent_pair, EquivStatus};
use sci_core::bounds::Bounds;
use sci_core::denotational::denote_inferred;
use sci_core::events::{parse_trace, Store, TraceDisplay};
use sci_core::operational::eval;
use sci_core::syntax::{parse_judgment, parse_type, Context, Term, Type};
use sci_core::typecheck::infer;
use sci_core::universal::{produce_term, test_term, verify_retraction};

#[derive(Parser)]
#[command(name = "sci", version, about = "Type, run, denote and compare terms of an affine imperative lambda calculus")]
struct Cli {
    #[command(flatten)]
    bounds: BoundArgs,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BoundArgs {
    /// Largest natural supplied by the environment or drawn by `random`.
    #[arg(long, default_value_t = 2, global = true)]
    max_nat: u64,
    /// Longest trace per context identifier.
    #[arg(long, default_value_t = 3, global = true)]
    max_trace: usize,
    /// Longest argument trace inside a function event.
    #[arg(long, default_value_t = 2, global = true)]
    max_arg_len: usize,
    /// Most body runs per loop in the denotation.
    #[arg(long, default_value_t = 2, global = true)]
    max_unfold: usize,
    /// Rule applications per evaluation.
    #[arg(long, default_value_t = 10_000, global = true)]
    fuel: u64,
}

impl BoundArgs {
    fn bounds(&self) -> Bounds {
        Bounds {
            max_nat: self.max_nat,
            max_trace_len: self.max_trace,
            max_arg_len: self.max_arg_len,
            max_while_unfold: self.max_unfold,
            fuel: self.fuel,
            random_cap: None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the type of a term.
    Check { file: String },
    /// Evaluate a term of ground type.
    Run {
        file: String,
        /// Initial value of a variable, as `name=value`; others start at 0.
        #[arg(long = "set", value_parser = parse_assignment)]
        set: Vec<(String, u64)>,
    },
    /// Print the bounded denotation.
    Denote { file: String },
    /// Compare two terms by their bounded denotations.
    Equiv { left: String, right: String },
    /// Check that the outputs of a term are pairwise coherent.
    Cohere { file: String },
    /// Check that evaluation agrees with the denotation on every small store.
    Good { file: String },
    /// Check that coding a type into naturals and back is the identity.
    Retract {
        #[arg(long = "type")]
        ty: String,
    },
    /// Emit the term that tests for a trace.
    TestGen {
        #[arg(long = "type")]
        ty: String,
        trace: String,
    },
    /// Emit the term that produces a trace, with its stores.
    ProduceGen {
        #[arg(long = "type")]
        ty: String,
        trace: String,
    },
}

/// Failures that end the program with a usage or type error.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

fn parse_assignment(s: &str) -> Result<(String, u64), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    Ok((k.trim().to_string(), v.trim().parse().map_err(|e| format!("{e}"))?))
}

fn read_source(path: &str) -> Result<String, Usage> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Usage(format!("{path}: {e}")))
    }
}

fn load(path: &str) -> Result<(Context, Term, Type), Usage> {
    let (ctx, m) = parse_judgment(&read_source(path)?).map_err(|e| Usage(format!("{path}: {e}")))?;
    let ty = infer(&ctx, &m).map_err(|e| Usage(format!("{path}: {e}")))?.ty;
    Ok((ctx, m, ty))
}

fn context_json(ctx: &Context) -> Value {
    ctx.entries().iter().map(|(n, t)| json!({ "name": n, "type": t.to_string() })).collect()
}

fn store_text(s: &Store) -> String {
    let parts: Vec<String> = s.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

struct Output {
    text: String,
    json: Value,
    success: bool,
}

fn run(cli: &Cli) -> Result<Output, Usage> {
    let b = cli.bounds.bounds();
    Ok(match &cli.command {
        Command::Check { file } => {
            let (ctx, _, ty) = load(file)?;
            Output { text: ty.to_string(), json: json!({ "context": context_json(&ctx), "type": ty.to_string() }), success: true }
        }
        Command::Run { file, set } => {
            let (ctx, m, ty) = load(file)?;
            if !ty.is_base() || !ctx.all_var() {
                return Err(Usage("run needs a term of ground type over variables".into()));
            }
            let mut sigma: Store = ctx.names().map(|n| (n.to_string(), 0)).collect();
            for (k, v) in set {
                match sigma.get_mut(k) {
                    Some(slot) => *slot = *v,
                    None => return Err(Usage(format!("`{k}` is not a variable of the context"))),
                }
            }
            let o = eval(&sigma, &m, &b)?;
            let mut lines: Vec<String> = o
                .results
                .iter()
                .map(|(s, v)| if s.is_empty() { v.to_string() } else { format!("{v}  {}", store_text(s)) })
                .collect();
            if o.exhausted {
                lines.push("(some runs used up the fuel)".into());
            }
            if o.results.is_empty() && !o.exhausted {
                lines.push("(no result)".into());
            }
            let results: Vec<Value> = o.results.iter().map(|(s, v)| json!({ "value": v.to_string(), "store": s })).collect();
            Output { text: lines.join("\n"), json: json!({ "results": results, "exhausted": o.exhausted }), success: o.converges() }
        }
        Command::Denote { file } => {
            let (ctx, m, _) = load(file)?;
            let d = denote_inferred(&ctx, &m, &b)?;
            let lines: Vec<String> = d.elems.iter().map(|t| t.to_string()).collect();
            Output { text: lines.join("\n"), json: d.to_json(), success: true }
        }
        Command::Equiv { left, right } => {
            let (cl, m, _) = load(left)?;
            let (cr, n, _) = load(right)?;
            if cl != cr {
                return Err(Usage(format!("contexts differ: {cl} and {cr}")));
            }
            let v = equiv(&cl, &m, &n, &b)?;
            let text = match &v.status {
                EquivStatus::EqualAtBounds => "equal at these bounds".to_string(),
                EquivStatus::Differs { witness, side } => {
                    let file = if *side == sci_core::analysis::Side::Left { left } else { right };
                    format!("differ: {witness} belongs only to {file}")
                }
            };
            Output { text, success: v.is_equal(), json: v.to_json() }
        }
        Command::Cohere { file } => {
            let (ctx, m, _) = load(file)?;
            if m.uses_random() {
                return Err(Usage("coherence is not expected of terms using random".into()));
            }
            // Open terms are closed by abstracting their context.
            let closed = ctx.entries().iter().rev().fold(m, |acc, (x, t)| Term::lambda(x, t.clone(), acc));
            let d = denote_inferred(&Context::new(), &closed, &b)?;
            let pair = incoherent_pair(&d);
            let text = match &pair {
                None => format!("coherent ({} elements)", d.len()),
                Some((a, c)) => format!("incoherent: {a} and {c}"),
            };
            let counter = pair.as_ref().map(|(a, c)| json!([a, c]));
            Output { text, success: pair.is_none(), json: json!({ "coherent": pair.is_none(), "counterexample": counter, "bounds": b }) }
        }
        Command::Good { file } => {
            let (ctx, m, _) = load(file)?;
            let r = goodness_check(&ctx, &m, &b)?;
            let mut lines = vec![format!(
                "{} over {} stores: {} mismatches, {} unconfirmed",
                if r.good() { "good" } else { "not good" },
                r.stores,
                r.mismatches.len(),
                r.unconfirmed.len()
            )];
            lines.extend(r.mismatches.iter().map(|s| format!("mismatch: {s}")));
            lines.extend(r.unconfirmed.iter().map(|s| format!("unconfirmed: {s}")));
            let json = json!({ "good": r.good(), "stores": r.stores, "mismatches": r.mismatches, "unconfirmed": r.unconfirmed, "bounds": b });
            Output { text: lines.join("\n"), success: r.good(), json }
        }
        Command::Retract { ty } => {
            let t = parse_type(ty)?;
            let r = verify_retraction(&t, &b)?;
            let text = format!(
                "{} for {t}: {} elements, {} missing, {} spurious (random up to {})",
                if r.holds() { "identity" } else { "not the identity" },
                r.elements,
                r.missing.len(),
                r.spurious.len(),
                r.random_cap
            );
            let json = json!({
                "type": t.to_string(), "holds": r.holds(), "elements": r.elements,
                "missing": r.missing, "spurious": r.spurious, "randomCap": r.random_cap, "bounds": b,
            });
            Output { text, success: r.holds(), json }
        }
        Command::TestGen { ty, trace } => {
            let t = parse_type(ty)?;
            let s = parse_trace(trace)?;
            if s.iter().any(|e| !e.conforms(&t)) {
                return Err(Usage(format!("[{}] is not a trace of {t}", TraceDisplay(&s))));
            }
            let m = test_term(&t, &s, "x");
            Output { text: format!("x:{t} |- {m}"), json: json!({ "context": [{ "name": "x", "type": t.to_string() }], "term": m.to_string() }), success: true }
        }
        Command::ProduceGen { ty, trace } => {
            let t = parse_type(ty)?;
            let s = parse_trace(trace)?;
            if s.iter().any(|e| !e.conforms(&t)) {
                return Err(Usage(format!("[{}] is not a trace of {t}", TraceDisplay(&s))));
            }
            let p = produce_term(&t, &s);
            let text = format!("{} |- {}\ninit {}\nfinal {}", p.ctx, p.term, store_text(&p.init), store_text(&p.fin));
            let json = json!({ "context": context_json(&p.ctx), "term": p.term.to_string(), "init": p.init, "final": p.fin });
            Output { text, json, success: true }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serialisable output"),
            };
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(io::stdout(), "{body}");
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Usage(msg)) => {
            eprintln!("sci: {msg}");
            ExitCode::from(2)
        }
    }
}
