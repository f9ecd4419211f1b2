//! Variable layout shared by the closest-target and two-step models.

use super::closest::MultiplierCertificate;
use crate::data::{Dataset, TargetVector};
use crate::lp::{LinearProgram, RowSense};
use crate::milp::{build_with_sos, Sos1Pair};

/// Envelopment weights plus the supporting-hyperplane multipliers of one
/// reference frontier.
pub(super) struct FrontierBlock {
    pub reference: Vec<usize>,
    lambda: usize,
    d: usize,
    v: usize,
    u: usize,
    u0: usize,
}

impl FrontierBlock {
    pub fn alloc(next: &mut usize, reference: &[usize], m: usize, s: usize) -> Self {
        let k = reference.len();
        let block = Self {
            reference: reference.to_vec(),
            lambda: *next,
            d: *next + k,
            v: *next + 2 * k,
            u: *next + 2 * k + m,
            u0: *next + 2 * k + m + s,
        };
        *next += 2 * k + m + s + 1;
        block
    }

    pub fn lambda(&self, c: usize) -> usize {
        self.lambda + c
    }

    /// `(lambda_j, x_ij)` terms of input row `i`.
    pub fn input_terms(&self, ds: &Dataset, i: usize) -> Vec<(usize, f64)> {
        self.reference
            .iter()
            .enumerate()
            .map(|(c, &j)| (self.lambda(c), ds.dmu(j).inputs[i]))
            .collect()
    }

    pub fn output_terms(&self, ds: &Dataset, r: usize) -> Vec<(usize, f64)> {
        self.reference
            .iter()
            .enumerate()
            .map(|(c, &j)| (self.lambda(c), ds.dmu(j).outputs[r]))
            .collect()
    }

    /// Convexity row, hyperplane rows `-v.X_j + u.Y_j + u0 + d_j = 0`, and the
    /// normalization `v_i >= 1/x_i0`, `u_r >= 1/y_r0` as bounds.
    pub fn install(&self, lp: &mut LinearProgram, ds: &Dataset, evaluated: &TargetVector) {
        let k = self.reference.len();
        let convexity: Vec<(usize, f64)> = (0..k).map(|c| (self.lambda(c), 1.0)).collect();
        lp.add_row(&convexity, RowSense::Eq, 1.0);

        for (c, &j) in self.reference.iter().enumerate() {
            let unit = ds.dmu(j);
            let mut row = Vec::with_capacity(ds.m() + ds.s() + 2);
            row.extend(
                unit.inputs
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (self.v + i, -x)),
            );
            row.extend(
                unit.outputs
                    .iter()
                    .enumerate()
                    .map(|(r, y)| (self.u + r, *y)),
            );
            row.push((self.u0, 1.0));
            row.push((self.d + c, 1.0));
            lp.add_row(&row, RowSense::Eq, 0.0);
        }
        for (i, x) in evaluated.inputs.iter().enumerate() {
            lp.set_lower(self.v + i, 1.0 / x);
        }
        for (r, y) in evaluated.outputs.iter().enumerate() {
            lp.set_lower(self.u + r, 1.0 / y);
        }
        lp.set_free(self.u0);
    }

    pub fn sos_pairs(&self, ds: &Dataset, prefix: &str) -> Vec<Sos1Pair> {
        let k = self.reference.len();
        let lambdas: Vec<usize> = (0..k).map(|c| self.lambda + c).collect();
        let ds_vars: Vec<usize> = (0..k).map(|c| self.d + c).collect();
        let labels: Vec<String> = ds
            .ids(&self.reference)
            .map(|id| format!("{prefix}{id}"))
            .collect();
        build_with_sos(&lambdas, &ds_vars, &labels).expect("block members have equal lengths")
    }

    pub fn lambdas(&self, x: &[f64]) -> Vec<(usize, f64)> {
        self.reference
            .iter()
            .enumerate()
            .map(|(c, &j)| (j, x[self.lambda(c)].max(0.0)))
            .collect()
    }

    pub fn certificate(&self, x: &[f64], m: usize, s: usize) -> MultiplierCertificate {
        MultiplierCertificate {
            v: x[self.v..self.v + m].to_vec(),
            u: x[self.u..self.u + s].to_vec(),
            u0: x[self.u0],
            d: self
                .reference
                .iter()
                .enumerate()
                .map(|(c, &j)| (j, x[self.d + c].max(0.0)))
                .collect(),
        }
    }
}

/// Input reductions `s-` and output expansions `s+`.
pub(super) struct SlackBlock {
    minus: usize,
    plus: usize,
    m: usize,
    s: usize,
}

impl SlackBlock {
    pub fn alloc(next: &mut usize, m: usize, s: usize) -> Self {
        let block = Self {
            minus: *next,
            plus: *next + m,
            m,
            s,
        };
        *next += m + s;
        block
    }

    pub fn minus(&self, i: usize) -> usize {
        self.minus + i
    }

    pub fn plus(&self, r: usize) -> usize {
        self.plus + r
    }

    /// `(variable, 1/x_i0)` and `(variable, 1/y_r0)` terms of the gap norm.
    pub fn gap_terms(&self, weights: &TargetVector) -> Vec<(usize, f64)> {
        let inputs = (0..self.m).map(|i| (self.minus(i), 1.0 / weights.inputs[i]));
        let outputs = (0..self.s).map(|r| (self.plus(r), 1.0 / weights.outputs[r]));
        inputs.chain(outputs).collect()
    }

    pub fn add_cost(&self, lp: &mut LinearProgram, weights: &TargetVector, scale: f64) {
        for (v, w) in self.gap_terms(weights) {
            let c = lp.costs()[v];
            lp.set_cost(v, c + scale * w);
        }
    }

    /// Slack values, with rounding-level negatives clamped to zero.
    pub fn values(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let minus = (0..self.m).map(|i| x[self.minus(i)].max(0.0)).collect();
        let plus = (0..self.s).map(|r| x[self.plus(r)].max(0.0)).collect();
        (minus, plus)
    }
}

/// `from - s-` on inputs, `from + s+` on outputs.
pub(super) fn apply_slacks(from: &TargetVector, minus: &[f64], plus: &[f64]) -> TargetVector {
    TargetVector::new(
        from.inputs.iter().zip(minus).map(|(x, s)| x - s).collect(),
        from.outputs.iter().zip(plus).map(|(y, s)| y + s).collect(),
    )
}
