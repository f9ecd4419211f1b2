//! Efficiency classification, frontier peeling, closest targets on a Pareto
//! frontier, and two-step target sequences across two nested frontiers.
//!
//! Units are addressed by their index in the [`Dataset`](crate::data::Dataset).
//! Reference sets (`E`, `E1`) are sorted index lists.

mod classify;
mod closest;
mod model;
mod two_step;

pub use classify::{LayerAssignment, EFFICIENCY_TOL};
pub use closest::{ClosestTarget, MultiplierCertificate};
pub use two_step::{TargetPlan, DEFAULT_ALPHAS};

use crate::lp::{LpOptions, Simplex};
use crate::milp::{BranchAndBound, MilpOptions};

/// Solver configuration shared by every model built here.
#[derive(Debug, Clone, Copy, Default)]
pub struct Engine {
    pub milp: MilpOptions,
}

impl Engine {
    pub fn new(milp: MilpOptions) -> Self {
        Self { milp }
    }

    /// Overrides the LP feasibility and optimality tolerances.
    pub fn with_tolerances(feas_tol: Option<f64>, opt_tol: Option<f64>) -> Self {
        let defaults = LpOptions::default();
        let lp = LpOptions {
            feas_tol: feas_tol.unwrap_or(defaults.feas_tol),
            opt_tol: opt_tol.unwrap_or(defaults.opt_tol),
            ..defaults
        };
        Self {
            milp: MilpOptions {
                lp,
                ..MilpOptions::default()
            },
        }
    }

    pub(crate) fn simplex(&self) -> Simplex {
        Simplex::new(self.milp.lp)
    }

    pub(crate) fn branch_and_bound(&self) -> BranchAndBound {
        BranchAndBound::new(self.milp)
    }
}
