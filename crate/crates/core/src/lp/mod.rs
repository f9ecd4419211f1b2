//! Dense two-phase primal simplex.
//!
//! Problems are stated over bounded or free variables with `=`, `<=` and `>=`
//! rows and are always minimized. Internally every problem is rewritten into
//! `min c'z, Az = b, z >= 0, b >= 0` (see [`standard`]) and solved on a dense
//! tableau (see [`tableau`]). Entering columns follow Dantzig's rule until
//! a run of degenerate pivots, after which Bland's rule takes over until the
//! objective moves again.

mod standard;
mod tableau;

use crate::error::{Error, Result};

pub use standard::ColumnKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Eq,
    Le,
    Ge,
}

/// `min costs'x` subject to dense rows and per-variable bounds.
///
/// Variables default to `0 <= x < inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    costs: Vec<f64>,
    rows: Vec<Vec<f64>>,
    senses: Vec<RowSense>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            costs: vec![0.0; num_vars],
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn row(&self, i: usize) -> (&[f64], RowSense, f64) {
        (&self.rows[i], self.senses[i], self.rhs[i])
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    pub fn set_cost(&mut self, j: usize, c: f64) {
        self.costs[j] = c;
    }

    pub fn set_costs(&mut self, costs: Vec<f64>) {
        assert_eq!(costs.len(), self.num_vars());
        self.costs = costs;
    }

    /// Adds a row given as `(variable, coefficient)` terms; repeated variables accumulate.
    pub fn add_row(&mut self, terms: &[(usize, f64)], sense: RowSense, rhs: f64) -> usize {
        let mut dense = vec![0.0; self.num_vars()];
        for &(j, a) in terms {
            dense[j] += a;
        }
        self.add_dense_row(dense, sense, rhs)
    }

    pub fn add_dense_row(&mut self, coefficients: Vec<f64>, sense: RowSense, rhs: f64) -> usize {
        assert_eq!(coefficients.len(), self.num_vars());
        self.rows.push(coefficients);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn set_lower(&mut self, j: usize, lower: f64) {
        self.lower[j] = lower;
    }

    pub fn set_upper(&mut self, j: usize, upper: f64) {
        self.upper[j] = upper;
    }

    pub fn set_free(&mut self, j: usize) {
        self.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
    }

    pub fn fix(&mut self, j: usize, value: f64) {
        self.set_bounds(j, value, value);
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.costs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest row violation at `x`, each scaled by `max(1, |rhs|)`.
    pub fn max_row_violation(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.senses)
            .zip(&self.rhs)
            .map(|((row, sense), &b)| {
                let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
                let v = match sense {
                    RowSense::Eq => (lhs - b).abs(),
                    RowSense::Le => (lhs - b).max(0.0),
                    RowSense::Ge => (b - lhs).max(0.0),
                };
                v / b.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Largest bound violation at `x`.
    pub fn max_bound_violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| (l - v).max(v - u).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidProblem(format!(
                    "row {i} has {} coefficients for {n} variables",
                    row.len()
                )));
            }
            if row.iter().any(|a| !a.is_finite()) || !self.rhs[i].is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "row {i} has a non-finite entry"
                )));
            }
        }
        if self.costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidProblem("non-finite cost".into()));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::InvalidProblem(format!(
                    "variable {j} has bounds [{l}, {u}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// The set of basic columns at termination, in a form that survives adding
/// or fixing variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Basis {
    pub columns: Vec<ColumnKey>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; `NaN` unless optimal.
    pub objective: f64,
    /// Primal values; empty unless optimal.
    pub x: Vec<f64>,
    pub basis: Option<Basis>,
    pub iterations: usize,
    /// Scaled primal residual of the returned point (0 unless optimal).
    pub max_residual: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn without_point(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            objective: f64::NAN,
            x: Vec::new(),
            basis: None,
            iterations,
            max_residual: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    /// Primal feasibility tolerance.
    pub feas_tol: f64,
    /// Reduced-cost tolerance for optimality.
    pub opt_tol: f64,
    /// Smallest admissible pivot magnitude.
    pub pivot_tol: f64,
    /// Acceptance threshold on scaled row residuals of the returned point.
    pub residual_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule;
    /// `None` keeps Dantzig's rule throughout.
    pub bland_after: Option<usize>,
    pub max_iterations: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            opt_tol: 1e-9,
            pivot_tol: 1e-9,
            residual_tol: 1e-7,
            bland_after: Some(50),
            max_iterations: 50_000,
        }
    }
}

/// Reusable solver; owns no state between solves beyond its options.
#[derive(Debug, Clone, Copy, Default)]
pub struct Simplex {
    pub options: LpOptions,
}

impl Simplex {
    pub fn new(options: LpOptions) -> Self {
        Self { options }
    }

    pub fn solve(&self, p: &LinearProgram) -> Result<LpSolution> {
        self.solve_from(p, None)
    }

    /// Re-solves starting from `basis` where possible. An incompatible basis
    /// (unknown columns, singular, or primal infeasible after the crash)
    /// falls back to a cold start.
    pub fn solve_warm(&self, p: &LinearProgram, basis: &Basis) -> Result<LpSolution> {
        self.solve_from(p, Some(basis))
    }

    fn solve_from(&self, p: &LinearProgram, warm: Option<&Basis>) -> Result<LpSolution> {
        p.validate()?;
        let sf = match standard::StandardForm::build(p, self.options.feas_tol) {
            Some(sf) => sf,
            None => return Ok(LpSolution::without_point(LpStatus::Infeasible, 0)),
        };
        let outcome = tableau::run(&sf, warm, &self.options)?;
        match outcome {
            tableau::Outcome::Infeasible { iterations } => {
                Ok(LpSolution::without_point(LpStatus::Infeasible, iterations))
            }
            tableau::Outcome::Unbounded { iterations } => {
                Ok(LpSolution::without_point(LpStatus::Unbounded, iterations))
            }
            tableau::Outcome::Optimal {
                z,
                basic_columns,
                iterations,
            } => {
                let mut x = sf.recover(&z);
                for (j, v) in x.iter_mut().enumerate() {
                    let (l, u) = p.bounds(j);
                    if *v < l && l - *v <= self.options.residual_tol {
                        *v = l;
                    }
                    if *v > u && *v - u <= self.options.residual_tol {
                        *v = u;
                    }
                }
                let residual = p.max_row_violation(&x).max(p.max_bound_violation(&x));
                if residual > self.options.residual_tol {
                    return Err(Error::NumericalFailure(format!(
                        "primal residual {residual:.3e} after refinement"
                    )));
                }
                Ok(LpSolution {
                    status: LpStatus::Optimal,
                    objective: p.objective_at(&x),
                    x,
                    basis: Some(Basis {
                        columns: basic_columns.iter().map(|&c| sf.keys[c]).collect(),
                    }),
                    iterations,
                    max_residual: residual,
                })
            }
        }
    }
}

pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution> {
    Simplex::default().solve(p)
}

pub fn solve_lp_warm(p: &LinearProgram, basis: &Basis) -> Result<LpSolution> {
    Simplex::default().solve_warm(p, basis)
}
