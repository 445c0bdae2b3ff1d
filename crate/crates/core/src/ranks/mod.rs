//! Shelah 2-rank, `opR_n`, the Γ-systems and op-dimension.

mod dimension;
mod engine;
mod gamma;
mod shelah;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use dimension::{localized_op_dimension, op_dimension, DimensionTrace};
pub use engine::{op_rank, op_rank_report, RankReport, WitnessNode};
pub use gamma::{gamma_consistent, GammaNode, DEFAULT_GAMMA_BOUND};
pub use shelah::shelah_rank2;

/// A rank truncated at a cap: exact below it, `AtLeast(cap)` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankValue {
    Exact(u32),
    AtLeast(u32),
}

impl RankValue {
    pub fn from_truncated(value: u32, cap: u32) -> Self {
        if value >= cap {
            RankValue::AtLeast(cap)
        } else {
            RankValue::Exact(value)
        }
    }

    pub fn is_at_least_cap(&self) -> bool {
        matches!(self, RankValue::AtLeast(_))
    }

    /// Whether the rank is known to be ≥ `k`. Only meaningful for `k`
    /// up to the cap.
    pub fn at_least(&self, k: u32) -> bool {
        match self {
            RankValue::Exact(v) => *v >= k,
            RankValue::AtLeast(c) => *c >= k,
        }
    }

    pub fn exact(&self) -> Option<u32> {
        match self {
            RankValue::Exact(v) => Some(*v),
            RankValue::AtLeast(_) => None,
        }
    }
}

/// `AtLeast` sorts above every exact value.
impl Ord for RankValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = |r: &RankValue| match r {
            RankValue::Exact(v) => (0, *v),
            RankValue::AtLeast(c) => (1, *c),
        };
        k(self).cmp(&k(other))
    }
}

impl PartialOrd for RankValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RankValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankValue::Exact(v) => write!(f, "{v}"),
            RankValue::AtLeast(c) => write!(f, ">= {c}"),
        }
    }
}
