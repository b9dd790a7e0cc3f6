//! A workbench for an affine imperative lambda calculus with local
//! variables: parsing, type checking, a big-step evaluator, a bounded
//! trace semantics, and checks that relate them.
//!
//! ```
//! use sci_core::{bounds::Bounds, denotational::denote_inferred, syntax::parse_judgment};
//!
//! let (ctx, m) = parse_judgment("x:var |- x := !x + 1").unwrap();
//! let d = denote_inferred(&ctx, &m, &Bounds::new(1, 2, 2)).unwrap();
//! assert_eq!(d.len(), 2);
//! ```

pub mod analysis;
pub mod bounds;
pub mod denotational;
pub mod events;
pub mod operational;
pub mod syntax;
pub mod typecheck;
pub mod universal;

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] syntax::ParseError),
    #[error(transparent)]
    Type(#[from] typecheck::TypeError),
    #[error(transparent)]
    Eval(#[from] operational::EvalError),
    #[error(transparent)]
    Denote(#[from] denotational::DenoteError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/language.md")]
    mod language {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/semantics.md")]
    mod semantics {}
    #[doc = include_str!("../../../book/src/universal.md")]
    mod universal {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
