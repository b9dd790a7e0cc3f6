//! Enumeration limits shared by the evaluator and the denotation engine.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Bounds {
    /// Largest natural the environment may supply, and largest `random` draw.
    pub max_nat: u64,
    /// Longest trace on a context component.
    pub max_trace_len: usize,
    /// Longest argument trace inside a function event.
    pub max_arg_len: usize,
    /// Most body executions of one loop instance in the denotation engine.
    pub max_while_unfold: usize,
    /// Rule applications per evaluation derivation.
    pub fuel: u64,
    /// Overrides the `random` range when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_cap: Option<u64>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_nat: 2, max_trace_len: 3, max_arg_len: 2, max_while_unfold: 2, fuel: 10_000, random_cap: None }
    }
}

impl Bounds {
    pub fn new(max_nat: u64, max_trace_len: usize, max_arg_len: usize) -> Bounds {
        Bounds { max_nat, max_trace_len, max_arg_len, ..Bounds::default() }
    }

    /// Largest value `random` may produce.
    pub fn random_max(&self) -> u64 {
        self.random_cap.unwrap_or(self.max_nat)
    }

    /// Componentwise `<=`: every set enumerated under `self` is enumerated under `other`.
    pub fn within(&self, other: &Bounds) -> bool {
        self.max_nat <= other.max_nat
            && self.max_trace_len <= other.max_trace_len
            && self.max_arg_len <= other.max_arg_len
            && self.max_while_unfold <= other.max_while_unfold
            && self.random_max() <= other.random_max()
    }
}
