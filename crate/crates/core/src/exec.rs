//! Work distribution for embarrassingly parallel enumeration branches.

use alloc::vec::Vec;

use crate::error::Error;

/// Runs `count` independent tasks and returns their results in index order.
///
/// Implementations may run tasks concurrently; callers combine the returned
/// vector in index order, so results do not depend on scheduling.
pub trait Executor: Sync {
    fn map<T, F>(&self, count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs tasks one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(task).collect()
    }
}

/// Cap on enumeration work, in node expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Budget {
    pub max_expansions: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_expansions: 1_000_000_000,
        }
    }
}

impl Budget {
    pub fn new(max_expansions: u64) -> Self {
        Self { max_expansions }
    }

    pub fn unlimited() -> Self {
        Self {
            max_expansions: u64::MAX,
        }
    }

    pub fn check(&self, projected: f64) -> Result<(), Error> {
        if projected > self.max_expansions as f64 {
            Err(Error::BudgetExceeded {
                projected,
                budget: self.max_expansions,
            })
        } else {
            Ok(())
        }
    }
}

/// Upper bound on tree nodes for walks of `1..=steps` steps with `branching`
/// choices per step. Immediate reversals always revisit a site, so
/// self-avoiding searches branch at most `branching - 1` ways after the first
/// step.
pub fn projected_nodes(branching: usize, steps: usize, self_avoiding: bool) -> f64 {
    let b = branching as f64;
    let later = if self_avoiding { (b - 1.0).max(0.0) } else { b };
    let mut level = 1.0;
    let mut total = 0.0;
    for k in 0..steps {
        level *= if k == 0 { b } else { later };
        total += level;
    }
    total
}
