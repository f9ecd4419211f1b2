use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::standard::StandardForm;
use super::{Basis, LpOptions};
use crate::error::{Error, Result};

pub(super) enum Outcome {
    Optimal {
        z: Vec<f64>,
        basic_columns: Vec<usize>,
        iterations: usize,
    },
    Infeasible {
        iterations: usize,
    },
    Unbounded {
        iterations: usize,
    },
}

enum Phase {
    Optimal,
    Unbounded,
}

/// Minimum magnitude accepted when crashing a warm basis into the tableau.
const CRASH_PIVOT_TOL: f64 = 1e-7;

struct Tableau<'a> {
    sf: &'a StandardForm,
    /// Rows of `B^-1 [A | b]`; the last entry of each row is the basic value.
    rows: Vec<Vec<f64>>,
    /// Reduced costs, with the negated objective value in the last slot.
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Row of `sf.a` each tableau row started as; survives redundant-row removal.
    origin: Vec<usize>,
    iterations: usize,
}

impl<'a> Tableau<'a> {
    fn initial(sf: &'a StandardForm) -> Self {
        let rows =
            sf.a.iter()
                .zip(&sf.b)
                .map(|(row, &b)| {
                    let mut r = row.clone();
                    r.push(b);
                    r
                })
                .collect();
        Self {
            sf,
            rows,
            obj: vec![0.0; sf.num_cols() + 1],
            basis: sf.initial_basis.clone(),
            origin: (0..sf.b.len()).collect(),
            iterations: 0,
        }
    }

    fn rhs(&self, r: usize) -> f64 {
        *self.rows[r].last().expect("rows carry a rhs")
    }

    fn rhs_scale(&self) -> f64 {
        self.sf.b.iter().fold(1.0, |acc: f64, b| acc.max(b.abs()))
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        let pivot_row: Vec<f64> = self.rows[r].iter().map(|v| v / p).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        self.rows[r] = pivot_row;
        self.rows[r][c] = 1.0;
        self.basis[r] = c;
    }

    fn price(&mut self, costs: &[f64]) {
        self.obj = costs.to_vec();
        self.obj.push(0.0);
        for (row, &bc) in self.rows.iter().zip(&self.basis) {
            let cb = costs[bc];
            if cb == 0.0 {
                continue;
            }
            for (o, a) in self.obj.iter_mut().zip(row) {
                *o -= cb * a;
            }
        }
    }

    fn objective(&self) -> f64 {
        -self.obj[self.sf.num_cols()]
    }

    /// Pivots warm-basis columns into the starting tableau. Returns false when
    /// the resulting basic solution is not primal feasible.
    fn crash(&mut self, warm: &Basis, feas_tol: f64) -> bool {
        let col_of: HashMap<_, _> = self
            .sf
            .keys
            .iter()
            .enumerate()
            .map(|(c, k)| (*k, c))
            .collect();
        let mut locked = vec![false; self.rows.len()];
        for key in &warm.columns {
            let Some(&c) = col_of.get(key) else { continue };
            if self.sf.is_artificial(c) || self.basis.contains(&c) {
                if let Some(r) = self.basis.iter().position(|&b| b == c) {
                    locked[r] = true;
                }
                continue;
            }
            let best = (0..self.rows.len())
                .filter(|&r| !locked[r])
                .map(|r| (r, self.rows[r][c].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((r, mag)) = best {
                if mag > CRASH_PIVOT_TOL {
                    self.pivot(r, c);
                    locked[r] = true;
                }
            }
        }
        let tol = feas_tol * self.rhs_scale();
        for r in 0..self.rows.len() {
            let v = self.rhs(r);
            if v < -tol {
                return false;
            }
            if v < 0.0 {
                *self.rows[r].last_mut().expect("rhs") = 0.0;
            }
        }
        true
    }

    fn iterate(&mut self, opts: &LpOptions) -> Result<Phase> {
        let n = self.sf.num_cols();
        let mut stall = 0usize;
        let mut bland = opts.bland_after == Some(0);
        loop {
            let entering = if bland {
                (0..n).find(|&j| !self.sf.is_artificial(j) && self.obj[j] < -opts.opt_tol)
            } else {
                (0..n)
                    .filter(|&j| !self.sf.is_artificial(j) && self.obj[j] < -opts.opt_tol)
                    .min_by(|&a, &b| self.obj[a].total_cmp(&self.obj[b]))
            };
            let Some(e) = entering else {
                return Ok(Phase::Optimal);
            };
            if self.iterations >= opts.max_iterations {
                return Err(Error::NumericalFailure(format!(
                    "simplex did not converge within {} pivots",
                    opts.max_iterations
                )));
            }

            let mut theta = f64::INFINITY;
            for r in 0..self.rows.len() {
                let a = self.rows[r][e];
                if a > opts.pivot_tol {
                    theta = theta.min(self.rhs(r).max(0.0) / a);
                }
            }
            if theta == f64::INFINITY {
                return Ok(Phase::Unbounded);
            }
            let slack = 1e-12 * (1.0 + theta);
            let ties = (0..self.rows.len()).filter(|&r| {
                let a = self.rows[r][e];
                a > opts.pivot_tol && self.rhs(r).max(0.0) / a <= theta + slack
            });
            let leaving = if bland {
                ties.min_by_key(|&r| self.basis[r])
            } else {
                ties.max_by(|&a, &b| self.rows[a][e].total_cmp(&self.rows[b][e]))
            }
            .expect("theta came from some row");

            if theta <= opts.feas_tol {
                stall += 1;
                if let Some(limit) = opts.bland_after {
                    if stall >= limit {
                        bland = true;
                    }
                }
            } else {
                stall = 0;
                bland = opts.bland_after == Some(0);
            }
            self.pivot(leaving, e);
            self.iterations += 1;
        }
    }

    /// Replaces basic artificials (all at zero after phase 1) by structural
    /// columns, dropping rows that turn out to be linear combinations of others.
    fn drive_out_artificials(&mut self, pivot_tol: f64) {
        let mut r = 0;
        while r < self.rows.len() {
            if !self.sf.is_artificial(self.basis[r]) {
                r += 1;
                continue;
            }
            let candidate = (0..self.sf.num_cols())
                .filter(|&c| !self.sf.is_artificial(c))
                .map(|c| (c, self.rows[r][c].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            match candidate {
                Some((c, mag)) if mag > pivot_tol => {
                    *self.rows[r].last_mut().expect("rhs") = 0.0;
                    self.pivot(r, c);
                    r += 1;
                }
                _ => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                    self.origin.remove(r);
                }
            }
        }
    }

    /// Rebuilds `B^-1 [A | b]` for the current basis from the original rows,
    /// discarding the rounding accumulated over many pivots.
    fn refactor(&mut self) -> bool {
        let k = self.rows.len();
        if k == 0 {
            return true;
        }
        let n = self.sf.num_cols();
        let bmat = DMatrix::from_fn(k, k, |i, j| self.sf.a[self.origin[i]][self.basis[j]]);
        let full = DMatrix::from_fn(k, n + 1, |i, j| {
            let row = self.origin[i];
            if j < n {
                self.sf.a[row][j]
            } else {
                self.sf.b[row]
            }
        });
        let Some(sol) = bmat.lu().solve(&full) else {
            return false;
        };
        if sol.iter().any(|v| !v.is_finite()) {
            return false;
        }
        for (r, row) in self.rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = sol[(r, j)];
            }
        }
        for (r, &c) in self.basis.clone().iter().enumerate() {
            for (i, row) in self.rows.iter_mut().enumerate() {
                row[c] = if i == r { 1.0 } else { 0.0 };
            }
        }
        true
    }

    /// Dual simplex pivots that clear small negative basic values while
    /// keeping reduced costs nonnegative. False if some row admits no pivot.
    fn dual_cleanup(&mut self, opts: &LpOptions, eps: f64) -> bool {
        let n = self.sf.num_cols();
        for _ in 0..=4 * self.rows.len() {
            let worst = (0..self.rows.len())
                .filter(|&r| self.rhs(r) < -eps)
                .min_by(|&a, &b| self.rhs(a).total_cmp(&self.rhs(b)));
            let Some(r) = worst else {
                return true;
            };
            let entering = (0..n)
                .filter(|&c| {
                    !self.sf.is_artificial(c)
                        && !self.basis.contains(&c)
                        && self.rows[r][c] < -opts.pivot_tol
                })
                .min_by(|&a, &b| {
                    let ra = self.obj[a].max(0.0) / -self.rows[r][a];
                    let rb = self.obj[b].max(0.0) / -self.rows[r][b];
                    ra.total_cmp(&rb)
                });
            let Some(c) = entering else {
                return false;
            };
            self.pivot(r, c);
            self.iterations += 1;
        }
        false
    }

    /// Basic values recomputed from the original matrix, `B^-1 b`, falling
    /// back to the tableau column when the basis matrix is singular.
    fn basic_values(&self, feas_tol: f64) -> Vec<f64> {
        let k = self.rows.len();
        let from_tableau: Vec<f64> = (0..k).map(|r| self.rhs(r).max(0.0)).collect();
        if k == 0 {
            return from_tableau;
        }
        let bmat = DMatrix::from_fn(k, k, |i, j| self.sf.a[self.origin[i]][self.basis[j]]);
        let rhs = DVector::from_fn(k, |i, _| self.sf.b[self.origin[i]]);
        let tol = feas_tol * self.rhs_scale();
        match bmat.lu().solve(&rhs) {
            Some(v) if v.iter().all(|x| x.is_finite() && *x >= -tol) => {
                v.iter().map(|x| x.max(0.0)).collect()
            }
            _ => from_tableau,
        }
    }
}

pub(super) fn run(sf: &StandardForm, warm: Option<&Basis>, opts: &LpOptions) -> Result<Outcome> {
    let mut tab = Tableau::initial(sf);
    if let Some(basis) = warm {
        if !tab.crash(basis, opts.feas_tol) {
            tab = Tableau::initial(sf);
        }
    }

    if tab.basis.iter().any(|&c| sf.is_artificial(c)) {
        let phase1: Vec<f64> = (0..sf.num_cols())
            .map(|c| if sf.is_artificial(c) { 1.0 } else { 0.0 })
            .collect();
        tab.price(&phase1);
        if let Phase::Unbounded = tab.iterate(opts)? {
            return Err(Error::NumericalFailure("phase 1 reported unbounded".into()));
        }
        if tab.objective() > opts.feas_tol * tab.rhs_scale() {
            return Ok(Outcome::Infeasible {
                iterations: tab.iterations,
            });
        }
        tab.drive_out_artificials(opts.pivot_tol);
    }

    tab.price(&sf.c);
    match tab.iterate(opts)? {
        Phase::Unbounded => Ok(Outcome::Unbounded {
            iterations: tab.iterations,
        }),
        Phase::Optimal => {
            let eps = 1e-12 * tab.rhs_scale();
            for _ in 0..3 {
                if !tab.refactor() {
                    break;
                }
                tab.price(&sf.c);
                if (0..tab.rows.len()).all(|r| tab.rhs(r) >= -eps) || !tab.dual_cleanup(opts, eps) {
                    break;
                }
                if let Phase::Unbounded = tab.iterate(opts)? {
                    return Ok(Outcome::Unbounded {
                        iterations: tab.iterations,
                    });
                }
            }
            let values = tab.basic_values(opts.feas_tol);
            let mut z = vec![0.0; sf.num_cols()];
            for (&c, v) in tab.basis.iter().zip(values) {
                z[c] = v;
            }
            Ok(Outcome::Optimal {
                z,
                basic_columns: tab.basis.clone(),
                iterations: tab.iterations,
            })
        }
    }
}
