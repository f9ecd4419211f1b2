#![allow(dead_code)]

use dea_bench::data::{weakly_dominates, weighted_l1_gap, Dataset, DmuRecord};
use dea_bench::dea::{Engine, TargetPlan};
use dea_bench::lp::{LinearProgram, LpStatus, RowSense};
use dea_bench::milp::{MilpProblem, Sos1Pair};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Random dataset with `n` units and uniform values in [1, 100].
pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, m: usize, s: usize) -> Dataset {
    let dmus = (0..n)
        .map(|j| {
            DmuRecord::new(
                format!("u{j}"),
                (0..m).map(|_| rng.gen_range(1.0..=100.0)).collect(),
                (0..s).map(|_| rng.gen_range(1.0..=100.0)).collect(),
            )
        })
        .collect();
    Dataset::from_records(dmus).expect("random data is valid")
}

/// Checks everything a two-step plan promises, at tolerance `tol`.
pub fn check_plan(
    engine: &Engine,
    ds: &Dataset,
    e: &[usize],
    e1: &[usize],
    plan: &TargetPlan,
    tol: f64,
) -> Result<(), String> {
    let own = ds.dmu(plan.dmu);
    let dominated = |a, b, what: &str| match weakly_dominates(a, b) {
        Ok(true) => Ok(()),
        _ => Err(format!("{}: {what} breaks dominance", own.id)),
    };
    dominated(&plan.intermediate, &plan.actual, "intermediate")?;
    dominated(&plan.final_target, &plan.intermediate, "final")?;

    for (layer, point, what) in [
        (e1, &plan.intermediate, "intermediate"),
        (e, &plan.final_target, "final"),
    ] {
        let slack = engine
            .additive_slack(ds, layer, point)
            .map_err(|err| err.to_string())?
            .ok_or_else(|| format!("{}: {what} outside its technology", own.id))?;
        if slack > tol {
            return Err(format!("{}: {what} has additive slack {slack:e}", own.id));
        }
    }

    let step1 =
        weighted_l1_gap(own, &plan.actual, &plan.intermediate).map_err(|e| e.to_string())?;
    let step2 =
        weighted_l1_gap(own, &plan.intermediate, &plan.final_target).map_err(|e| e.to_string())?;
    if (step1 - plan.gaps.step1).abs() > tol || (step2 - plan.gaps.step2).abs() > tol {
        return Err(format!(
            "{}: reported gaps disagree with the targets",
            own.id
        ));
    }
    let combo_i = ds.combine(&plan.lambda_i);
    let combo_e = ds.combine(&plan.lambda_e);
    if combo_i.max_abs_diff(&plan.intermediate) > tol
        || combo_e.max_abs_diff(&plan.final_target) > tol
    {
        return Err(format!("{}: lambdas do not reproduce the targets", own.id));
    }
    Ok(())
}

/// Bounded random LP in at most three variables with mixed row senses.
pub fn random_lp<R: Rng>(rng: &mut R) -> LinearProgram {
    let n = rng.gen_range(1..=3);
    let mut lp = LinearProgram::new(n);
    lp.set_costs((0..n).map(|_| rng.gen_range(-5.0..5.0)).collect());
    for j in 0..n {
        lp.set_bounds(j, 0.0, rng.gen_range(1.0..10.0));
    }
    for _ in 0..rng.gen_range(1..=4) {
        let coefficients: Vec<f64> = (0..n).map(|_| rng.gen_range(-4i32..=4) as f64).collect();
        let sense = match rng.gen_range(0..5) {
            0 => RowSense::Eq,
            1 | 2 => RowSense::Ge,
            _ => RowSense::Le,
        };
        lp.add_dense_row(coefficients, sense, rng.gen_range(-5i32..=15) as f64);
    }
    lp
}

/// Optimum of a bounded LP by enumerating every basic solution; `None` if
/// infeasible.
pub fn vertex_optimum(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars();
    // every constraint as a . x <= b
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..lp.num_rows() {
        let (a, sense, b) = lp.row(i);
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        match sense {
            RowSense::Le => rows.push((a.to_vec(), b)),
            RowSense::Ge => rows.push((neg, -b)),
            RowSense::Eq => {
                rows.push((a.to_vec(), b));
                rows.push((neg, -b));
            }
        }
    }
    for j in 0..n {
        let (l, u) = lp.bounds(j);
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e.clone(), u));
        e[j] = -1.0;
        rows.push((e, -l));
    }

    let mut best: Option<f64> = None;
    let mut chosen = Vec::with_capacity(n);
    subsets(rows.len(), n, 0, &mut chosen, &mut |active| {
        let a = DMatrix::from_fn(n, n, |r, c| rows[active[r]].0[c]);
        let b = DVector::from_fn(n, |r, _| rows[active[r]].1);
        let Some(x) = a.lu().solve(&b) else { return };
        let feasible = rows
            .iter()
            .all(|(a, b)| a.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-9);
        if feasible && x.iter().all(|v| v.is_finite()) {
            let value = lp.objective_at(x.as_slice());
            best = Some(best.map_or(value, |v: f64| v.min(value)));
        }
    });
    best
}

fn subsets(
    total: usize,
    k: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    for i in start..total {
        chosen.push(i);
        subsets(total, k, i + 1, chosen, f);
        chosen.pop();
    }
}

/// Random MILP with `k` disjoint SOS1 pairs and two unpaired variables. The
/// origin is always feasible for the `<=` rows; a covering row forces some
/// activity.
pub fn random_milp<R: Rng>(rng: &mut R, k: usize) -> MilpProblem {
    let n = 2 * k + 2;
    let mut lp = LinearProgram::new(n);
    lp.set_costs((0..n).map(|_| rng.gen_range(-5.0..2.0)).collect());
    for j in 0..n {
        lp.set_bounds(j, 0.0, 5.0);
    }
    for _ in 0..rng.gen_range(2..=k + 2) {
        let coefficients: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect();
        lp.add_dense_row(coefficients, RowSense::Le, rng.gen_range(1.0..10.0));
    }
    let cover: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    lp.add_dense_row(cover, RowSense::Ge, 0.5);
    let pairs = (0..k)
        .map(|p| Sos1Pair {
            first: 2 * p,
            second: 2 * p + 1,
            label: format!("p{p}"),
        })
        .collect();
    MilpProblem::new(lp, pairs).expect("pairs are disjoint and in range")
}

/// Best objective over all `2^k` ways of zeroing one member of every pair.
pub fn exhaustive_optimum(p: &MilpProblem) -> Option<f64> {
    let pairs = p.sos1();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << pairs.len()) {
        let mut lp = p.relaxation().clone();
        for (b, pair) in pairs.iter().enumerate() {
            let zeroed = if mask & (1 << b) == 0 {
                pair.first
            } else {
                pair.second
            };
            lp.fix(zeroed, 0.0);
        }
        let sol = dea_bench::lp::solve_lp(&lp).expect("fixed LP solves");
        if sol.status == LpStatus::Optimal {
            best = Some(best.map_or(sol.objective, |v: f64| v.min(sol.objective)));
        }
    }
    best
}
