use serde::{Deserialize, Serialize};

/// Desk-scale guardrails shared by every computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    /// Largest word-metric ball a window may be built on.
    pub max_ball_size: usize,
    /// Branch-and-bound nodes per filling problem.
    pub max_ilp_nodes: u64,
    /// Cycles collected by one enumeration.
    pub max_enumeration_count: usize,
    /// Search nodes visited by one exhaustive enumeration.
    pub max_search_nodes: u64,
    /// Largest norm bound accepted by exhaustive enumeration.
    pub max_exhaustive_k: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_ball_size: 20_000,
            max_ilp_nodes: 20_000,
            max_enumeration_count: 200_000,
            max_search_nodes: 200_000_000,
            max_exhaustive_k: 8,
        }
    }
}

impl Caps {
    /// True if every limit of `self` is at most the matching limit of `other`.
    pub fn within(&self, other: &Caps) -> bool {
        self.max_ball_size <= other.max_ball_size
            && self.max_ilp_nodes <= other.max_ilp_nodes
            && self.max_enumeration_count <= other.max_enumeration_count
            && self.max_search_nodes <= other.max_search_nodes
            && self.max_exhaustive_k <= other.max_exhaustive_k
    }
}
