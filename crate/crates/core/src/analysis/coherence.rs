//! Pairwise coherence of the outputs of a closed term.

use crate::bounds::Bounds;
use crate::denotational::{denote, Denotation};
use crate::events::{coherent_event, Event};
use crate::syntax::Term;
use crate::typecheck::infer;

use super::AnalysisError;

/// First pair of output events that are not coherent, if any. Applies to
/// any denotation, including ones outside the checked fragment.
pub fn incoherent_pair(d: &Denotation) -> Option<(Event, Event)> {
    let outs: Vec<&Event> = d.elems.iter().map(|t| &t.out).collect();
    for (i, a) in outs.iter().enumerate() {
        for b in &outs[i + 1..] {
            if !coherent_event(&d.ty, a, b) {
                return Some(((*a).clone(), (*b).clone()));
            }
        }
    }
    None
}

/// Whether all events of a closed, `random`-free term are pairwise coherent.
pub fn coherence_check(m: &Term, bounds: &Bounds) -> Result<bool, AnalysisError> {
    if m.uses_random() {
        return Err(AnalysisError::Precondition("coherence is only guaranteed without random".into()));
    }
    let ctx = Default::default();
    let ty = infer(&ctx, m)?.ty;
    let d = denote(&ctx, m, &ty, bounds)?;
    Ok(incoherent_pair(&d).is_none())
}
