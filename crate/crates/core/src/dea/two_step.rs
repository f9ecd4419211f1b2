use super::closest::{check_reference, MultiplierCertificate};
use super::model::{apply_slacks, FrontierBlock, SlackBlock};
use super::{Engine, LayerAssignment};
use crate::data::{weighted_l1_gap, Dataset, GapDecomposition, TargetVector};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, RowSense};
use crate::milp::{MilpProblem, MilpSolution, MilpStatus};

pub const DEFAULT_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// A sequence of targets for one unit: an intermediate point on the inner
/// frontier followed by a final point on the outer frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPlan {
    pub dmu: usize,
    pub dmu_id: String,
    pub alpha: f64,
    pub actual: TargetVector,
    pub intermediate: TargetVector,
    pub final_target: TargetVector,
    pub slacks_i_minus: Vec<f64>,
    pub slacks_i_plus: Vec<f64>,
    pub slacks_e_minus: Vec<f64>,
    pub slacks_e_plus: Vec<f64>,
    /// Convex weights over `E1` producing the intermediate target.
    pub lambda_i: Vec<(usize, f64)>,
    /// Convex weights over `E` producing the final target.
    pub lambda_e: Vec<(usize, f64)>,
    pub certificate_i: Option<MultiplierCertificate>,
    pub certificate_e: Option<MultiplierCertificate>,
    pub gaps: GapDecomposition,
    pub nodes: usize,
}

impl TargetPlan {
    /// `alpha * step1 + (1 - alpha) * step2`.
    pub fn objective(&self) -> f64 {
        self.gaps.total(self.alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

fn gaps(
    ds: &Dataset,
    dmu: usize,
    inter: &TargetVector,
    fin: &TargetVector,
) -> Result<GapDecomposition> {
    let unit = ds.dmu(dmu);
    Ok(GapDecomposition {
        step1: weighted_l1_gap(unit, &unit.bundle(), inter)?,
        step2: weighted_l1_gap(unit, inter, fin)?,
    })
}

/// The joint two-frontier model, ready to be re-weighted and re-solved.
struct TwoStepModel {
    lp: LinearProgram,
    inner: FrontierBlock,
    outer: FrontierBlock,
    inner_slacks: SlackBlock,
    outer_slacks: SlackBlock,
    actual: TargetVector,
}

impl TwoStepModel {
    fn build(ds: &Dataset, e: &[usize], e1: &[usize], dmu: usize) -> Self {
        let (m, s) = (ds.m(), ds.s());
        let actual = ds.dmu(dmu).bundle();
        let mut next = 0;
        let inner = FrontierBlock::alloc(&mut next, e1, m, s);
        let inner_slacks = SlackBlock::alloc(&mut next, m, s);
        let outer = FrontierBlock::alloc(&mut next, e, m, s);
        let outer_slacks = SlackBlock::alloc(&mut next, m, s);
        let mut lp = LinearProgram::new(next);

        for i in 0..m {
            let mut row = inner.input_terms(ds, i);
            row.push((inner_slacks.minus(i), 1.0));
            lp.add_row(&row, RowSense::Eq, actual.inputs[i]);
        }
        for r in 0..s {
            let mut row = inner.output_terms(ds, r);
            row.push((inner_slacks.plus(r), -1.0));
            lp.add_row(&row, RowSense::Eq, actual.outputs[r]);
        }
        inner.install(&mut lp, ds, &actual);

        // the outer target is reached from the intermediate one
        for i in 0..m {
            let mut row = outer.input_terms(ds, i);
            row.push((inner_slacks.minus(i), 1.0));
            row.push((outer_slacks.minus(i), 1.0));
            lp.add_row(&row, RowSense::Eq, actual.inputs[i]);
        }
        for r in 0..s {
            let mut row = outer.output_terms(ds, r);
            row.push((inner_slacks.plus(r), -1.0));
            row.push((outer_slacks.plus(r), -1.0));
            lp.add_row(&row, RowSense::Eq, actual.outputs[r]);
        }
        outer.install(&mut lp, ds, &actual);

        Self {
            lp,
            inner,
            outer,
            inner_slacks,
            outer_slacks,
            actual,
        }
    }

    fn weighted(&self, step1_weight: f64, step2_weight: f64) -> LinearProgram {
        let mut lp = self.lp.clone();
        if step1_weight != 0.0 {
            self.inner_slacks
                .add_cost(&mut lp, &self.actual, step1_weight);
        }
        if step2_weight != 0.0 {
            self.outer_slacks
                .add_cost(&mut lp, &self.actual, step2_weight);
        }
        lp
    }

    fn solve(&self, engine: &Engine, ds: &Dataset, lp: LinearProgram) -> Result<MilpSolution> {
        let mut pairs = self.inner.sos_pairs(ds, "I:");
        pairs.extend(self.outer.sos_pairs(ds, "E:"));
        let sol = engine
            .branch_and_bound()
            .solve(&MilpProblem::new(lp, pairs)?)?;
        if sol.status == MilpStatus::Infeasible {
            return Err(Error::SolverFailure(
                "two-step model reported infeasible for a valid unit".into(),
            ));
        }
        Ok(sol)
    }
}

impl Engine {
    /// Two-step plan for a unit below both frontiers.
    ///
    /// At `alpha = 1` the outer target is re-derived as the closest target of
    /// the intermediate point. At `alpha = 0` ties in the second leg are broken
    /// by the shortest first leg.
    pub fn two_step_targets(
        &self,
        ds: &Dataset,
        e: &[usize],
        e1: &[usize],
        dmu: usize,
        alpha: f64,
    ) -> Result<TargetPlan> {
        check_alpha(alpha)?;
        check_reference(e, ds)?;
        check_reference(e1, ds)?;
        if e.iter().any(|j| e1.contains(j)) {
            return Err(Error::InvalidProblem("E and E1 overlap".into()));
        }
        let id = &ds.dmu(dmu).id;
        if e.contains(&dmu) || e1.contains(&dmu) {
            return Err(Error::LevelMismatch {
                id: id.clone(),
                level: if e.contains(&dmu) { 1 } else { 2 },
                expected: "two-step targets need a unit at level 3 or deeper",
            });
        }

        let model = TwoStepModel::build(ds, e, e1, dmu);
        let (m, s) = (ds.m(), ds.s());
        let sol = if alpha == 0.0 {
            let first = model.solve(self, ds, model.weighted(0.0, 1.0))?;
            let mut lp = model.weighted(1.0, 0.0);
            let cap = first.objective + self.milp.prune_tol * first.objective.abs().max(1.0);
            lp.add_row(
                &model.outer_slacks.gap_terms(&model.actual),
                RowSense::Le,
                cap,
            );
            let mut second = model.solve(self, ds, lp)?;
            second.node_count += first.node_count;
            second
        } else {
            model.solve(self, ds, model.weighted(alpha, 1.0 - alpha))?
        };

        let (i_minus, i_plus) = model.inner_slacks.values(&sol.x);
        let intermediate = apply_slacks(&model.actual, &i_minus, &i_plus);
        let lambda_i = model.inner.lambdas(&sol.x);
        let certificate_i = Some(model.inner.certificate(&sol.x, m, s));
        let mut nodes = sol.node_count;

        let (e_minus, e_plus, lambda_e, certificate_e) = if alpha == 1.0 {
            let reprojected = self.closest_to_point(ds, e, &intermediate)?;
            nodes += reprojected.nodes;
            (
                reprojected.slacks_minus,
                reprojected.slacks_plus,
                reprojected.lambda,
                Some(reprojected.certificate),
            )
        } else {
            let (minus, plus) = model.outer_slacks.values(&sol.x);
            (
                minus,
                plus,
                model.outer.lambdas(&sol.x),
                Some(model.outer.certificate(&sol.x, m, s)),
            )
        };
        let final_target = apply_slacks(&intermediate, &e_minus, &e_plus);
        let gaps = gaps(ds, dmu, &intermediate, &final_target)?;

        Ok(TargetPlan {
            dmu,
            dmu_id: id.clone(),
            alpha,
            actual: model.actual,
            intermediate,
            final_target,
            slacks_i_minus: i_minus,
            slacks_i_plus: i_plus,
            slacks_e_minus: e_minus,
            slacks_e_plus: e_plus,
            lambda_i,
            lambda_e,
            certificate_i,
            certificate_e,
            gaps,
            nodes,
        })
    }

    /// One plan per entry of `alphas`, in order.
    pub fn alpha_sweep(
        &self,
        ds: &Dataset,
        e: &[usize],
        e1: &[usize],
        dmu: usize,
        alphas: &[f64],
    ) -> Result<Vec<TargetPlan>> {
        alphas.iter().try_for_each(|&a| check_alpha(a))?;
        alphas
            .iter()
            .map(|&a| self.two_step_targets(ds, e, e1, dmu, a))
            .collect()
    }

    /// Single-step plan for a second-level unit: it is its own intermediate
    /// target and moves straight to its closest target on the outer frontier.
    pub fn benchmark_level2(
        &self,
        ds: &Dataset,
        e: &[usize],
        e1: &[usize],
        dmu: usize,
    ) -> Result<TargetPlan> {
        if !e1.contains(&dmu) {
            return Err(Error::LevelMismatch {
                id: ds.dmu(dmu).id.clone(),
                level: if e.contains(&dmu) { 1 } else { 3 },
                expected: "single-step benchmarking needs a second-level unit",
            });
        }
        let closest = self.closest_targets(ds, e, dmu)?;
        let actual = ds.dmu(dmu).bundle();
        let zeros = (vec![0.0; ds.m()], vec![0.0; ds.s()]);
        let gaps = gaps(ds, dmu, &actual, &closest.target)?;
        Ok(TargetPlan {
            dmu,
            dmu_id: ds.dmu(dmu).id.clone(),
            alpha: 1.0,
            intermediate: actual.clone(),
            final_target: closest.target,
            actual,
            slacks_i_minus: zeros.0,
            slacks_i_plus: zeros.1,
            slacks_e_minus: closest.slacks_minus,
            slacks_e_plus: closest.slacks_plus,
            lambda_i: vec![(dmu, 1.0)],
            lambda_e: closest.lambda,
            certificate_i: None,
            certificate_e: Some(closest.certificate),
            gaps,
            nodes: closest.nodes,
        })
    }

    /// The trivial plan of a first-level unit.
    pub fn identity_plan(&self, ds: &Dataset, dmu: usize, alpha: f64) -> TargetPlan {
        let actual = ds.dmu(dmu).bundle();
        let zeros = (vec![0.0; ds.m()], vec![0.0; ds.s()]);
        TargetPlan {
            dmu,
            dmu_id: ds.dmu(dmu).id.clone(),
            alpha,
            intermediate: actual.clone(),
            final_target: actual.clone(),
            actual,
            slacks_i_minus: zeros.0.clone(),
            slacks_i_plus: zeros.1.clone(),
            slacks_e_minus: zeros.0,
            slacks_e_plus: zeros.1,
            lambda_i: vec![(dmu, 1.0)],
            lambda_e: vec![(dmu, 1.0)],
            certificate_i: None,
            certificate_e: None,
            gaps: GapDecomposition {
                step1: 0.0,
                step2: 0.0,
            },
            nodes: 0,
        }
    }

    /// Routes a unit to the plan its level calls for.
    pub fn plan_for(
        &self,
        ds: &Dataset,
        layers: &LayerAssignment,
        dmu: usize,
        alpha: f64,
    ) -> Result<TargetPlan> {
        check_alpha(alpha)?;
        let e = layers.first();
        let e1 = layers.second().ok_or_else(|| {
            Error::InvalidProblem("two-step plans need at least two peeled levels".into())
        })?;
        match layers.level_of(dmu) {
            1 => Ok(self.identity_plan(ds, dmu, alpha)),
            2 => self.benchmark_level2(ds, e, e1, dmu).map(|mut p| {
                p.alpha = alpha;
                p
            }),
            _ => self.two_step_targets(ds, e, e1, dmu, alpha),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::weakly_dominates;
    use crate::fixtures::worked_example;

    struct Setup {
        ds: Dataset,
        e: Vec<usize>,
        e1: Vec<usize>,
    }

    fn setup() -> Setup {
        let ds = worked_example();
        let layers = Engine::default().peel_layers(&ds, 2).unwrap();
        Setup {
            e: layers.first().to_vec(),
            e1: layers.second().unwrap().to_vec(),
            ds,
        }
    }

    fn pt(y1: f64, y2: f64) -> TargetVector {
        TargetVector::new(vec![1.0], vec![y1, y2])
    }

    #[test]
    fn dmu4_at_alpha_one_reprojects_from_the_intermediate_point() {
        let Setup { ds, e, e1 } = setup();
        let dmu4 = ds.index_of("4").unwrap();
        let plan = Engine::default()
            .two_step_targets(&ds, &e, &e1, dmu4, 1.0)
            .unwrap();
        // closest point of segment 2-3 dominating (5, 4) is (7.5, 4)
        assert!(plan.intermediate.max_abs_diff(&pt(7.5, 4.0)) < 1e-9);
        assert!(plan.final_target.max_abs_diff(&pt(10.0, 4.0)) < 1e-9);
        assert!((plan.gaps.step1 - 0.5).abs() < 1e-9);
        assert!((plan.gaps.step2 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn dmu4_at_alpha_zero_uses_dmu2_first() {
        let Setup { ds, e, e1 } = setup();
        let dmu4 = ds.index_of("4").unwrap();
        let plan = Engine::default()
            .two_step_targets(&ds, &e, &e1, dmu4, 0.0)
            .unwrap();
        // the second solve may use the rounding allowance on the first leg's optimum
        assert!(plan.intermediate.max_abs_diff(&pt(6.5, 6.5)) < 1e-7);
        assert!(plan.final_target.max_abs_diff(&pt(6.5, 8.0 - 1.0 / 3.0)) < 1e-7);
    }

    #[test]
    fn plans_chain_and_reconstruct() {
        let Setup { ds, e, e1 } = setup();
        let engine = Engine::default();
        for id in ["1", "4", "5"] {
            let dmu = ds.index_of(id).unwrap();
            for plan in engine
                .alpha_sweep(&ds, &e, &e1, dmu, &DEFAULT_ALPHAS)
                .unwrap()
            {
                assert!(weakly_dominates(&plan.intermediate, &plan.actual).unwrap());
                assert!(weakly_dominates(&plan.final_target, &plan.intermediate).unwrap());
                assert!(ds.combine(&plan.lambda_i).max_abs_diff(&plan.intermediate) < 1e-6);
                assert!(ds.combine(&plan.lambda_e).max_abs_diff(&plan.final_target) < 1e-6);
                let sum_i: f64 = plan.lambda_i.iter().map(|l| l.1).sum();
                let sum_e: f64 = plan.lambda_e.iter().map(|l| l.1).sum();
                assert!((sum_i - 1.0).abs() < 1e-9 && (sum_e - 1.0).abs() < 1e-9);
                for cert in [&plan.certificate_i, &plan.certificate_e]
                    .into_iter()
                    .flatten()
                {
                    let lambda = if cert.d.len() == e1.len() {
                        &plan.lambda_i
                    } else {
                        &plan.lambda_e
                    };
                    assert!(cert.max_complementarity(lambda) <= 1e-7);
                }
            }
        }
    }

    #[test]
    fn sweep_shapes() {
        let Setup { ds, e, e1 } = setup();
        let engine = Engine::default();
        let dmu4 = ds.index_of("4").unwrap();
        assert_eq!(
            engine
                .alpha_sweep(&ds, &e, &e1, dmu4, &DEFAULT_ALPHAS)
                .unwrap()
                .len(),
            5
        );
        assert!(engine
            .alpha_sweep(&ds, &e, &e1, dmu4, &[])
            .unwrap()
            .is_empty());
        let twice = engine.alpha_sweep(&ds, &e, &e1, dmu4, &[0.5, 0.5]).unwrap();
        assert_eq!(twice[0], twice[1]);
        assert_eq!(
            engine.alpha_sweep(&ds, &e, &e1, dmu4, &[0.5, 1.5]),
            Err(Error::InvalidAlpha(1.5))
        );
    }

    #[test]
    fn level_preconditions() {
        let Setup { ds, e, e1 } = setup();
        let engine = Engine::default();
        let dmu2 = ds.index_of("2").unwrap();
        let a = ds.index_of("A").unwrap();
        assert!(matches!(
            engine.two_step_targets(&ds, &e, &e1, dmu2, 0.5),
            Err(Error::LevelMismatch { level: 2, .. })
        ));
        assert!(matches!(
            engine.benchmark_level2(&ds, &e, &e1, a),
            Err(Error::LevelMismatch { level: 1, .. })
        ));
    }

    #[test]
    fn level2_plan_starts_at_the_unit() {
        let Setup { ds, e, e1 } = setup();
        let dmu2 = ds.index_of("2").unwrap();
        let plan = Engine::default()
            .benchmark_level2(&ds, &e, &e1, dmu2)
            .unwrap();
        assert_eq!(plan.intermediate, ds.dmu(dmu2).bundle());
        assert_eq!(plan.gaps.step1, 0.0);
        // from (6.5, 6.5): segment B-C at y1 = 6.5 gives y2 = 8 - 1/3, gap 1.1667/6.5
        assert!(plan.final_target.max_abs_diff(&pt(6.5, 8.0 - 1.0 / 3.0)) < 1e-9);
    }
}
