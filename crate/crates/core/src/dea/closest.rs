use super::model::{apply_slacks, FrontierBlock, SlackBlock};
use super::Engine;
use crate::data::{Dataset, TargetVector};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, RowSense};
use crate::milp::{MilpProblem, MilpStatus};

/// Supporting hyperplane `-v.X + u.Y + u0 = 0` certifying that the active
/// reference units share a Pareto face.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierCertificate {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub u0: f64,
    /// Deviation `d_j >= 0` of each reference unit below the hyperplane.
    pub d: Vec<(usize, f64)>,
}

impl MultiplierCertificate {
    /// Largest `lambda_j * d_j` over the reference set.
    pub fn max_complementarity(&self, lambda: &[(usize, f64)]) -> f64 {
        lambda
            .iter()
            .zip(&self.d)
            .map(|((_, l), (_, d))| l * d)
            .fold(0.0, f64::max)
    }
}

/// Closest dominating point on the frontier spanned by a reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestTarget {
    pub target: TargetVector,
    pub slacks_minus: Vec<f64>,
    pub slacks_plus: Vec<f64>,
    /// Convex weights over the reference set, in reference order.
    pub lambda: Vec<(usize, f64)>,
    pub certificate: MultiplierCertificate,
    /// Weighted L1 distance from the evaluated point to `target`.
    pub objective: f64,
    pub nodes: usize,
}

pub(super) fn check_reference(reference: &[usize], ds: &Dataset) -> Result<()> {
    if reference.is_empty() {
        return Err(Error::EmptyReferenceSet);
    }
    if let Some(&j) = reference.iter().find(|&&j| j >= ds.len()) {
        return Err(Error::InvalidProblem(format!(
            "reference index {j} out of range"
        )));
    }
    Ok(())
}

impl Engine {
    pub fn closest_targets(
        &self,
        ds: &Dataset,
        reference: &[usize],
        dmu: usize,
    ) -> Result<ClosestTarget> {
        self.closest_to_point(ds, reference, &ds.dmu(dmu).bundle())
    }

    /// Closest-target model for an arbitrary strictly positive point, with the
    /// gap weighted by that point's own components.
    pub fn closest_to_point(
        &self,
        ds: &Dataset,
        reference: &[usize],
        point: &TargetVector,
    ) -> Result<ClosestTarget> {
        check_reference(reference, ds)?;
        let (m, s) = (ds.m(), ds.s());
        if point.m() != m || point.s() != s {
            return Err(Error::DimensionMismatch {
                context: "evaluated point".into(),
                expected: m + s,
                found: point.m() + point.s(),
            });
        }
        if let Some(&value) = point
            .inputs
            .iter()
            .chain(&point.outputs)
            .find(|v| v.is_nan() || **v <= 0.0)
        {
            return Err(Error::NonPositiveValue {
                id: "<evaluated point>".into(),
                column: "bundle".into(),
                value,
            });
        }

        let mut next = 0;
        let frontier = FrontierBlock::alloc(&mut next, reference, m, s);
        let slacks = SlackBlock::alloc(&mut next, m, s);
        let mut lp = LinearProgram::new(next);
        for i in 0..m {
            let mut row = frontier.input_terms(ds, i);
            row.push((slacks.minus(i), 1.0));
            lp.add_row(&row, RowSense::Eq, point.inputs[i]);
        }
        for r in 0..s {
            let mut row = frontier.output_terms(ds, r);
            row.push((slacks.plus(r), -1.0));
            lp.add_row(&row, RowSense::Eq, point.outputs[r]);
        }
        frontier.install(&mut lp, ds, point);
        slacks.add_cost(&mut lp, point, 1.0);

        let problem = MilpProblem::new(lp, frontier.sos_pairs(ds, ""))?;
        let sol = self.branch_and_bound().solve(&problem)?;
        if sol.status == MilpStatus::Infeasible {
            return Err(Error::SolverFailure(
                "closest-target model reported infeasible for a valid point".into(),
            ));
        }
        let (minus, plus) = slacks.values(&sol.x);
        Ok(ClosestTarget {
            target: apply_slacks(point, &minus, &plus),
            slacks_minus: minus,
            slacks_plus: plus,
            lambda: frontier.lambdas(&sol.x),
            certificate: frontier.certificate(&sol.x, m, s),
            objective: sol.objective,
            nodes: sol.node_count,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;

    fn first_level(ds: &Dataset) -> Vec<usize> {
        let mut e: Vec<usize> = ["A", "B", "C", "D"]
            .iter()
            .map(|id| ds.index_of(id).unwrap())
            .collect();
        e.sort_unstable();
        e
    }

    #[test]
    fn efficient_unit_projects_to_itself() {
        let ds = worked_example();
        let e = first_level(&ds);
        for &j in &e {
            let t = Engine::default().closest_targets(&ds, &e, j).unwrap();
            assert!(
                t.objective.abs() < 1e-9,
                "{}: {}",
                ds.dmu(j).id,
                t.objective
            );
            assert!(t.target.max_abs_diff(&ds.dmu(j).bundle()) < 1e-9);
        }
    }

    #[test]
    fn dmu4_goes_to_segment_cd() {
        let ds = worked_example();
        let e = first_level(&ds);
        let t = Engine::default()
            .closest_targets(&ds, &e, ds.index_of("4").unwrap())
            .unwrap();
        assert!((t.objective - 1.0).abs() < 1e-9);
        assert!(
            t.target
                .max_abs_diff(&TargetVector::new(vec![1.0], vec![10.0, 4.0]))
                < 1e-9
        );
        let combo = ds.combine(&t.lambda);
        assert!(combo.max_abs_diff(&t.target) < 1e-9);
        assert!(t.certificate.max_complementarity(&t.lambda) <= 1e-7);
    }

    #[test]
    fn dmu5_goes_to_segment_ab() {
        let ds = worked_example();
        let e = first_level(&ds);
        let t = Engine::default()
            .closest_targets(&ds, &e, ds.index_of("5").unwrap())
            .unwrap();
        assert!((t.objective - 0.75).abs() < 1e-9);
        assert!(
            t.target
                .max_abs_diff(&TargetVector::new(vec![1.0], vec![3.0, 8.75]))
                < 1e-9
        );
    }

    #[test]
    fn certificate_satisfies_normalization_and_hyperplane() {
        let ds = worked_example();
        let e = first_level(&ds);
        let j = ds.index_of("2").unwrap();
        let t = Engine::default().closest_targets(&ds, &e, j).unwrap();
        let own = ds.dmu(j);
        let cert = &t.certificate;
        for (v, x) in cert.v.iter().zip(&own.inputs) {
            assert!(v * x >= 1.0 - 1e-9);
        }
        for (u, y) in cert.u.iter().zip(&own.outputs) {
            assert!(u * y >= 1.0 - 1e-9);
        }
        for &(k, d) in &cert.d {
            let unit = ds.dmu(k);
            let lhs: f64 = -cert
                .v
                .iter()
                .zip(&unit.inputs)
                .map(|(v, x)| v * x)
                .sum::<f64>()
                + cert
                    .u
                    .iter()
                    .zip(&unit.outputs)
                    .map(|(u, y)| u * y)
                    .sum::<f64>()
                + cert.u0
                + d;
            assert!(lhs.abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_empty_reference() {
        let ds = worked_example();
        assert_eq!(
            Engine::default().closest_targets(&ds, &[], 0),
            Err(Error::EmptyReferenceSet)
        );
    }
}
