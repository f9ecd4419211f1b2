//! Observed input/output bundles and the dominance and gap arithmetic every
//! model is built on.
//!
//! All data must be strictly positive: the gap norm weights each component by
//! the reciprocal of the evaluated unit's own value.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Absolute per-component tolerance for dominance comparisons.
pub const DOMINANCE_TOL: f64 = 1e-9;

/// One decision-making unit.
#[derive(Debug, Clone, PartialEq)]
pub struct DmuRecord {
    pub id: String,
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

impl DmuRecord {
    pub fn new(id: impl Into<String>, inputs: Vec<f64>, outputs: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            inputs,
            outputs,
        }
    }

    pub fn bundle(&self) -> TargetVector {
        TargetVector::new(self.inputs.clone(), self.outputs.clone())
    }
}

/// A point in input/output space: a target, a projection, or a unit's own bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

impl TargetVector {
    pub fn new(inputs: Vec<f64>, outputs: Vec<f64>) -> Self {
        Self { inputs, outputs }
    }

    pub fn m(&self) -> usize {
        self.inputs.len()
    }

    pub fn s(&self) -> usize {
        self.outputs.len()
    }

    /// Inputs followed by outputs.
    pub fn components(&self) -> impl Iterator<Item = f64> + '_ {
        self.inputs.iter().chain(self.outputs.iter()).copied()
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &TargetVector) -> f64 {
        self.components()
            .zip(other.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn same_shape(&self, other: &TargetVector, context: &str) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::DimensionMismatch {
                context: format!("{context} (inputs)"),
                expected: self.m(),
                found: other.m(),
            });
        }
        if self.s() != other.s() {
            return Err(Error::DimensionMismatch {
                context: format!("{context} (outputs)"),
                expected: self.s(),
                found: other.s(),
            });
        }
        Ok(())
    }
}

/// The two legs of a two-step plan, both measured with the evaluated unit's weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapDecomposition {
    /// Unit to intermediate target.
    pub step1: f64,
    /// Intermediate target to final target.
    pub step2: f64,
}

impl GapDecomposition {
    pub fn total(&self, alpha: f64) -> f64 {
        alpha * self.step1 + (1.0 - alpha) * self.step2
    }
}

/// A dataset as read from disk, before any invariant has been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    pub dmus: Vec<DmuRecord>,
}

/// A validated set of units sharing the same input/output dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    input_names: Vec<String>,
    output_names: Vec<String>,
    dmus: Vec<DmuRecord>,
}

impl Dataset {
    pub fn new(
        input_names: Vec<String>,
        output_names: Vec<String>,
        dmus: Vec<DmuRecord>,
    ) -> Result<Self> {
        validate_dataset(RawDataset {
            input_names,
            output_names,
            dmus,
        })
    }

    /// Builds a dataset with generated variable names `x1.., y1..`.
    pub fn from_records(dmus: Vec<DmuRecord>) -> Result<Self> {
        let (m, s) = dmus
            .first()
            .map(|d| (d.inputs.len(), d.outputs.len()))
            .unwrap_or((0, 0));
        Self::new(
            (1..=m).map(|i| format!("x{i}")).collect(),
            (1..=s).map(|r| format!("y{r}")).collect(),
            dmus,
        )
    }

    pub fn m(&self) -> usize {
        self.input_names.len()
    }

    pub fn s(&self) -> usize {
        self.output_names.len()
    }

    pub fn len(&self) -> usize {
        self.dmus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dmus.is_empty()
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn dmus(&self) -> &[DmuRecord] {
        &self.dmus
    }

    pub fn dmu(&self, index: usize) -> &DmuRecord {
        &self.dmus[index]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.dmus
            .iter()
            .position(|d| d.id == id)
            .ok_or_else(|| Error::UnknownDmu(id.to_string()))
    }

    pub fn ids<'a>(&'a self, indices: &'a [usize]) -> impl Iterator<Item = &'a str> + 'a {
        indices.iter().map(move |&j| self.dmus[j].id.as_str())
    }

    /// Convex combination of unit bundles; `weights` pairs unit indices with coefficients.
    pub fn combine(&self, weights: &[(usize, f64)]) -> TargetVector {
        let mut inputs = vec![0.0; self.m()];
        let mut outputs = vec![0.0; self.s()];
        for &(j, w) in weights {
            let d = &self.dmus[j];
            for (acc, x) in inputs.iter_mut().zip(&d.inputs) {
                *acc += w * x;
            }
            for (acc, y) in outputs.iter_mut().zip(&d.outputs) {
                *acc += w * y;
            }
        }
        TargetVector::new(inputs, outputs)
    }

    pub fn into_raw(self) -> RawDataset {
        RawDataset {
            input_names: self.input_names,
            output_names: self.output_names,
            dmus: self.dmus,
        }
    }
}

pub fn validate_dataset(raw: RawDataset) -> Result<Dataset> {
    let m = raw.input_names.len();
    let s = raw.output_names.len();
    if m == 0 {
        return Err(Error::DimensionMismatch {
            context: "input count".into(),
            expected: 1,
            found: 0,
        });
    }
    if s == 0 {
        return Err(Error::DimensionMismatch {
            context: "output count".into(),
            expected: 1,
            found: 0,
        });
    }
    let mut seen = HashSet::new();
    for d in &raw.dmus {
        if d.id.trim().is_empty() {
            return Err(Error::EmptyId);
        }
        if d.inputs.len() != m {
            return Err(Error::DimensionMismatch {
                context: format!("inputs of `{}`", d.id),
                expected: m,
                found: d.inputs.len(),
            });
        }
        if d.outputs.len() != s {
            return Err(Error::DimensionMismatch {
                context: format!("outputs of `{}`", d.id),
                expected: s,
                found: d.outputs.len(),
            });
        }
        let named = raw
            .input_names
            .iter()
            .zip(&d.inputs)
            .chain(raw.output_names.iter().zip(&d.outputs));
        for (name, &v) in named {
            // NaN fails this comparison too
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::NonPositiveValue {
                    id: d.id.clone(),
                    column: name.clone(),
                    value: v,
                });
            }
        }
        if !seen.insert(d.id.as_str()) {
            return Err(Error::DuplicateId(d.id.clone()));
        }
    }
    if raw.dmus.len() < 2 {
        return Err(Error::TooFewUnits(raw.dmus.len()));
    }
    Ok(Dataset {
        input_names: raw.input_names,
        output_names: raw.output_names,
        dmus: raw.dmus,
    })
}

/// `a` uses no more of any input and produces no less of any output than `b`,
/// up to [`DOMINANCE_TOL`].
pub fn weakly_dominates(a: &TargetVector, b: &TargetVector) -> Result<bool> {
    a.same_shape(b, "dominance check")?;
    let inputs_ok = a
        .inputs
        .iter()
        .zip(&b.inputs)
        .all(|(x_a, x_b)| *x_a <= x_b + DOMINANCE_TOL);
    let outputs_ok = a
        .outputs
        .iter()
        .zip(&b.outputs)
        .all(|(y_a, y_b)| *y_a >= y_b - DOMINANCE_TOL);
    Ok(inputs_ok && outputs_ok)
}

/// Weighted L1 distance from `from` to the dominating point `to`, with weights
/// `1/x_i` and `1/y_r` taken from `reference`.
pub fn weighted_l1_gap(
    reference: &DmuRecord,
    from: &TargetVector,
    to: &TargetVector,
) -> Result<f64> {
    let weights = reference.bundle();
    weights.same_shape(from, "gap reference")?;
    from.same_shape(to, "gap endpoints")?;

    let input_moves = from.inputs.iter().zip(&to.inputs).map(|(f, t)| f - t);
    let output_moves = from.outputs.iter().zip(&to.outputs).map(|(f, t)| t - f);
    let mut gap = 0.0;
    for (component, (step, w)) in input_moves
        .chain(output_moves)
        .zip(weights.components())
        .enumerate()
    {
        if step < -DOMINANCE_TOL {
            return Err(Error::DominanceViolation {
                component,
                deviation: step,
            });
        }
        gap += step / w;
    }
    Ok(gap.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;

    fn tv(inputs: &[f64], outputs: &[f64]) -> TargetVector {
        TargetVector::new(inputs.to_vec(), outputs.to_vec())
    }

    #[test]
    fn worked_example_is_accepted() {
        let ds = worked_example();
        assert_eq!(ds.len(), 9);
        assert_eq!((ds.m(), ds.s()), (1, 2));
    }

    #[test]
    fn zero_output_is_rejected() {
        let mut raw = worked_example().into_raw();
        raw.dmus[3].outputs[1] = 0.0;
        assert!(matches!(
            validate_dataset(raw),
            Err(Error::NonPositiveValue { ref column, .. }) if column == "y2"
        ));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let mut raw = worked_example().into_raw();
        raw.dmus[1].id = "A".into();
        assert_eq!(validate_dataset(raw), Err(Error::DuplicateId("A".into())));
    }

    #[test]
    fn ragged_rows_and_tiny_sets_are_rejected() {
        let mut raw = worked_example().into_raw();
        raw.dmus[2].outputs.pop();
        assert!(matches!(
            validate_dataset(raw),
            Err(Error::DimensionMismatch { .. })
        ));

        let single = vec![DmuRecord::new("A", vec![1.0], vec![1.0])];
        assert_eq!(Dataset::from_records(single), Err(Error::TooFewUnits(1)));
    }

    #[test]
    fn dominance_examples() {
        let dmu1 = tv(&[1.0], &[3.5, 1.5]);
        let dmu2 = tv(&[1.0], &[6.5, 6.5]);
        let dmu3 = tv(&[1.0], &[8.5, 1.5]);
        assert!(weakly_dominates(&dmu2, &dmu2).unwrap());
        assert!(weakly_dominates(&dmu2, &dmu1).unwrap());
        assert!(!weakly_dominates(&dmu2, &dmu3).unwrap());
        assert!(weakly_dominates(&dmu2, &tv(&[1.0], &[6.5])).is_err());
    }

    #[test]
    fn gap_examples_for_dmu4() {
        let ds = worked_example();
        let dmu4 = ds.dmu(ds.index_of("4").unwrap());
        let own = dmu4.bundle();
        assert_eq!(weighted_l1_gap(dmu4, &own, &own).unwrap(), 0.0);
        let along_y1 = weighted_l1_gap(dmu4, &own, &tv(&[1.0], &[10.0, 4.0])).unwrap();
        assert!((along_y1 - 1.0).abs() < 1e-15);
        let along_y2 = weighted_l1_gap(dmu4, &own, &tv(&[1.0], &[5.0, 8.25])).unwrap();
        assert!((along_y2 - 1.0625).abs() < 1e-15);
    }

    #[test]
    fn gap_rejects_non_dominating_target() {
        let ds = worked_example();
        let dmu4 = ds.dmu(ds.index_of("4").unwrap());
        let err = weighted_l1_gap(dmu4, &dmu4.bundle(), &tv(&[1.0], &[4.0, 9.0]));
        assert!(matches!(
            err,
            Err(Error::DominanceViolation { component: 1, .. })
        ));
        let more_input = weighted_l1_gap(dmu4, &dmu4.bundle(), &tv(&[1.5], &[5.0, 4.0]));
        assert!(matches!(
            more_input,
            Err(Error::DominanceViolation { component: 0, .. })
        ));
    }

    #[test]
    fn combine_is_the_convex_combination() {
        let ds = worked_example();
        let a = ds.index_of("A").unwrap();
        let b = ds.index_of("B").unwrap();
        let mid = ds.combine(&[(a, 0.5), (b, 0.5)]);
        assert_eq!(mid, tv(&[1.0], &[4.0, 8.5]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn bundle(m: usize, s: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
            (
                prop::collection::vec(1.0f64..100.0, m),
                prop::collection::vec(1.0f64..100.0, s),
            )
        }

        fn step(m: usize, s: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
            (
                prop::collection::vec(0.0f64..10.0, m),
                prop::collection::vec(0.0f64..10.0, s),
            )
        }

        fn improve(p: &TargetVector, d: &(Vec<f64>, Vec<f64>)) -> TargetVector {
            TargetVector::new(
                p.inputs.iter().zip(&d.0).map(|(x, dx)| x - dx).collect(),
                p.outputs.iter().zip(&d.1).map(|(y, dy)| y + dy).collect(),
            )
        }

        proptest! {
            #[test]
            fn gap_is_zero_on_the_diagonal((x, y) in bundle(2, 3)) {
                let r = DmuRecord::new("r", x.clone(), y.clone());
                let p = TargetVector::new(x, y);
                prop_assert_eq!(weighted_l1_gap(&r, &p, &p).unwrap(), 0.0);
            }

            #[test]
            fn gap_is_additive_along_monotone_chains(
                (x, y) in bundle(2, 2),
                d1 in step(2, 2),
                d2 in step(2, 2),
            ) {
                let r = DmuRecord::new("r", x.clone(), y.clone());
                let a = TargetVector::new(x, y);
                let b = improve(&a, &d1);
                let c = improve(&b, &d2);
                let whole = weighted_l1_gap(&r, &a, &c).unwrap();
                let parts = weighted_l1_gap(&r, &a, &b).unwrap() + weighted_l1_gap(&r, &b, &c).unwrap();
                prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(1.0));
            }

            #[test]
            fn dominance_is_reflexive_and_transitive(
                (x, y) in bundle(2, 2),
                d1 in step(2, 2),
                d2 in step(2, 2),
            ) {
                let a = TargetVector::new(x, y);
                let b = improve(&a, &d1);
                let c = improve(&b, &d2);
                prop_assert!(weakly_dominates(&a, &a).unwrap());
                prop_assert!(weakly_dominates(&b, &a).unwrap());
                prop_assert!(weakly_dominates(&c, &b).unwrap());
                prop_assert!(weakly_dominates(&c, &a).unwrap());
            }
        }
    }
}
