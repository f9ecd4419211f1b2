//! Brute-force certification of the closest-target and two-step models by
//! enumerating the efficient faces of each frontier explicitly.
//!
//! A subset of efficient units spans an efficient face exactly when its
//! barycenter has zero additive slack: a relative-interior point of a convex
//! set lies in a face only if the whole set does. Once the faces are known,
//! each model reduces to one small LP per face (or pair of faces) with no
//! complementarity conditions at all.

use crate::data::{weighted_l1_gap, Dataset, TargetVector};
use crate::dea::{Engine, EFFICIENCY_TOL};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, RowSense};

/// Largest layer `enumerate_faces` accepts.
pub const FACE_CAP: usize = 12;
/// Largest `E` or `E1` the two-step oracle accepts.
pub const TWO_STEP_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct FaceCandidate {
    pub members: Vec<usize>,
    pub barycenter: TargetVector,
}

/// Every nonempty subset of `layer` whose barycenter is efficient in the
/// technology spanned by `layer`, ordered by size then lexicographically.
pub fn enumerate_faces(
    engine: &Engine,
    ds: &Dataset,
    layer: &[usize],
) -> Result<Vec<FaceCandidate>> {
    if layer.len() > FACE_CAP {
        return Err(Error::TooLarge {
            size: layer.len(),
            cap: FACE_CAP,
        });
    }
    let mut layer = layer.to_vec();
    layer.sort_unstable();
    layer.dedup();

    let mut faces = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    // subsets of a face are faces, so only efficient sets are extended
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for base in &frontier {
            let start = base
                .last()
                .map(|last| layer.iter().position(|j| j == last).expect("member") + 1)
                .unwrap_or(0);
            for &j in &layer[start..] {
                let mut members = base.clone();
                members.push(j);
                let w = 1.0 / members.len() as f64;
                let weights: Vec<(usize, f64)> = members.iter().map(|&k| (k, w)).collect();
                let barycenter = ds.combine(&weights);
                let slack = engine.additive_slack(ds, &layer, &barycenter)?;
                if slack.is_some_and(|v| v <= EFFICIENCY_TOL) {
                    next.push(members.clone());
                    faces.push(FaceCandidate {
                        members,
                        barycenter,
                    });
                }
            }
        }
        frontier = next;
    }
    Ok(faces)
}

/// Faces not contained in any other face.
fn maximal(faces: Vec<FaceCandidate>) -> Vec<Vec<usize>> {
    let sets: Vec<Vec<usize>> = faces.into_iter().map(|f| f.members).collect();
    sets.iter()
        .filter(|f| {
            !sets
                .iter()
                .any(|g| g.len() > f.len() && f.iter().all(|j| g.contains(j)))
        })
        .cloned()
        .collect()
}

fn gap_weights(point: &TargetVector) -> Vec<f64> {
    point.components().map(|v| 1.0 / v).collect()
}

/// Cached maximal faces of one frontier.
pub struct FrontierFaces {
    faces: Vec<Vec<usize>>,
}

impl FrontierFaces {
    pub fn new(engine: &Engine, ds: &Dataset, layer: &[usize]) -> Result<Self> {
        Ok(Self {
            faces: maximal(enumerate_faces(engine, ds, layer)?),
        })
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Closest dominating point over all faces, weighted by `point` itself.
    pub fn closest(
        &self,
        engine: &Engine,
        ds: &Dataset,
        point: &TargetVector,
    ) -> Result<(TargetVector, f64)> {
        let (m, s) = (ds.m(), ds.s());
        let w = gap_weights(point);
        let mut best: Option<(TargetVector, f64)> = None;
        for face in &self.faces {
            let k = face.len();
            let mut lp = LinearProgram::new(k + m + s);
            for (c, wc) in w.iter().enumerate() {
                lp.set_cost(k + c, *wc);
            }
            for i in 0..m {
                let mut row: Vec<(usize, f64)> = face
                    .iter()
                    .enumerate()
                    .map(|(c, &j)| (c, ds.dmu(j).inputs[i]))
                    .collect();
                row.push((k + i, 1.0));
                lp.add_row(&row, RowSense::Eq, point.inputs[i]);
            }
            for r in 0..s {
                let mut row: Vec<(usize, f64)> = face
                    .iter()
                    .enumerate()
                    .map(|(c, &j)| (c, ds.dmu(j).outputs[r]))
                    .collect();
                row.push((k + m + r, -1.0));
                lp.add_row(&row, RowSense::Eq, point.outputs[r]);
            }
            lp.add_row(
                &(0..k).map(|c| (c, 1.0)).collect::<Vec<_>>(),
                RowSense::Eq,
                1.0,
            );

            let sol = engine.simplex().solve(&lp)?;
            if sol.status != LpStatus::Optimal {
                continue;
            }
            if best.as_ref().is_none_or(|(_, v)| sol.objective < *v) {
                let weights: Vec<(usize, f64)> = face
                    .iter()
                    .enumerate()
                    .map(|(c, &j)| (j, sol.x[c]))
                    .collect();
                best = Some((ds.combine(&weights), sol.objective));
            }
        }
        best.ok_or_else(|| Error::SolverFailure("no face dominates the evaluated point".into()))
    }
}

/// Oracle answer for one two-step instance.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTwoStep {
    pub intermediate: TargetVector,
    pub final_target: TargetVector,
    /// `alpha * step1 + (1 - alpha) * step2`.
    pub objective: f64,
    pub step1: f64,
    pub step2: f64,
}

struct PairSolution {
    intermediate: TargetVector,
    final_target: TargetVector,
    step1: f64,
    step2: f64,
}

/// Cached faces of both frontiers of a two-step instance.
pub struct TwoStepOracle<'a> {
    engine: Engine,
    ds: &'a Dataset,
    outer_set: Vec<usize>,
    outer: FrontierFaces,
    inner: FrontierFaces,
}

impl<'a> TwoStepOracle<'a> {
    pub fn new(engine: &Engine, ds: &'a Dataset, e: &[usize], e1: &[usize]) -> Result<Self> {
        for set in [e, e1] {
            if set.len() > TWO_STEP_CAP {
                return Err(Error::TooLarge {
                    size: set.len(),
                    cap: TWO_STEP_CAP,
                });
            }
        }
        Ok(Self {
            engine: *engine,
            ds,
            outer_set: e.to_vec(),
            outer: FrontierFaces::new(engine, ds, e)?,
            inner: FrontierFaces::new(engine, ds, e1)?,
        })
    }

    /// Faces of the first frontier `E`.
    pub fn outer(&self) -> &FrontierFaces {
        &self.outer
    }

    /// Joint LP over one inner face and one outer face. `cap` bounds the
    /// second leg when given.
    fn solve_pair(
        &self,
        dmu: &TargetVector,
        inner: &[usize],
        outer: &[usize],
        weights: (f64, f64),
        cap: Option<f64>,
    ) -> Result<Option<PairSolution>> {
        let ds = self.ds;
        let (m, s) = (ds.m(), ds.s());
        let (k1, k2) = (inner.len(), outer.len());
        let a = k1 + k2;
        let b = a + m + s;
        let mut lp = LinearProgram::new(b + m + s);
        let w = gap_weights(dmu);
        for (c, wc) in w.iter().enumerate() {
            lp.set_cost(a + c, weights.0 * wc);
            lp.set_cost(b + c, weights.1 * wc);
        }
        let input = |j: usize, i: usize| ds.dmu(j).inputs[i];
        let output = |j: usize, r: usize| ds.dmu(j).outputs[r];
        for i in 0..m {
            let mut row: Vec<(usize, f64)> = inner
                .iter()
                .enumerate()
                .map(|(c, &j)| (c, input(j, i)))
                .collect();
            row.push((a + i, 1.0));
            lp.add_row(&row, RowSense::Eq, dmu.inputs[i]);

            let mut row: Vec<(usize, f64)> = outer
                .iter()
                .enumerate()
                .map(|(c, &j)| (k1 + c, input(j, i)))
                .collect();
            row.push((a + i, 1.0));
            row.push((b + i, 1.0));
            lp.add_row(&row, RowSense::Eq, dmu.inputs[i]);
        }
        for r in 0..s {
            let mut row: Vec<(usize, f64)> = inner
                .iter()
                .enumerate()
                .map(|(c, &j)| (c, output(j, r)))
                .collect();
            row.push((a + m + r, -1.0));
            lp.add_row(&row, RowSense::Eq, dmu.outputs[r]);

            let mut row: Vec<(usize, f64)> = outer
                .iter()
                .enumerate()
                .map(|(c, &j)| (k1 + c, output(j, r)))
                .collect();
            row.push((a + m + r, -1.0));
            row.push((b + m + r, -1.0));
            lp.add_row(&row, RowSense::Eq, dmu.outputs[r]);
        }
        lp.add_row(
            &(0..k1).map(|c| (c, 1.0)).collect::<Vec<_>>(),
            RowSense::Eq,
            1.0,
        );
        lp.add_row(
            &(k1..a).map(|c| (c, 1.0)).collect::<Vec<_>>(),
            RowSense::Eq,
            1.0,
        );
        if let Some(cap) = cap {
            let terms: Vec<(usize, f64)> =
                w.iter().enumerate().map(|(c, wc)| (b + c, *wc)).collect();
            lp.add_row(&terms, RowSense::Le, cap);
        }

        let sol = self.engine.simplex().solve(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Ok(None);
        }
        let leg = |start: usize| -> f64 {
            w.iter()
                .enumerate()
                .map(|(c, wc)| wc * sol.x[start + c])
                .sum()
        };
        let inner_w: Vec<(usize, f64)> = inner
            .iter()
            .enumerate()
            .map(|(c, &j)| (j, sol.x[c]))
            .collect();
        let outer_w: Vec<(usize, f64)> = outer
            .iter()
            .enumerate()
            .map(|(c, &j)| (j, sol.x[k1 + c]))
            .collect();
        Ok(Some(PairSolution {
            intermediate: ds.combine(&inner_w),
            final_target: ds.combine(&outer_w),
            step1: leg(a),
            step2: leg(b),
        }))
    }

    fn best_pair(
        &self,
        dmu: &TargetVector,
        weights: (f64, f64),
        cap: Option<f64>,
    ) -> Result<PairSolution> {
        let mut best: Option<(f64, PairSolution)> = None;
        for inner in self.inner.faces() {
            for outer in self.outer.faces() {
                if let Some(p) = self.solve_pair(dmu, inner, outer, weights, cap)? {
                    let value = weights.0 * p.step1 + weights.1 * p.step2;
                    if best.as_ref().is_none_or(|(v, _)| value < *v) {
                        best = Some((value, p));
                    }
                }
            }
        }
        best.map(|(_, p)| p)
            .ok_or_else(|| Error::SolverFailure("no pair of faces admits a plan".into()))
    }

    pub fn two_step(&self, dmu: usize, alpha: f64) -> Result<OracleTwoStep> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidAlpha(alpha));
        }
        let actual = self.ds.dmu(dmu).bundle();
        if self.outer_set.contains(&dmu) {
            return Ok(OracleTwoStep {
                intermediate: actual.clone(),
                final_target: actual,
                objective: 0.0,
                step1: 0.0,
                step2: 0.0,
            });
        }
        let mut best = if alpha == 0.0 {
            let first = self.best_pair(&actual, (0.0, 1.0), None)?;
            let cap = first.step2 + self.engine.milp.prune_tol * first.step2.abs().max(1.0);
            self.best_pair(&actual, (1.0, 0.0), Some(cap))?
        } else {
            self.best_pair(&actual, (alpha, 1.0 - alpha), None)?
        };
        if alpha == 1.0 {
            let (fin, _) = self
                .outer
                .closest(&self.engine, self.ds, &best.intermediate)?;
            best.step2 = weighted_l1_gap(self.ds.dmu(dmu), &best.intermediate, &fin)?;
            best.final_target = fin;
        }
        Ok(OracleTwoStep {
            objective: alpha * best.step1 + (1.0 - alpha) * best.step2,
            intermediate: best.intermediate,
            final_target: best.final_target,
            step1: best.step1,
            step2: best.step2,
        })
    }
}

/// Closest dominating point of `dmu` on the frontier spanned by `layer`.
pub fn oracle_closest(
    engine: &Engine,
    ds: &Dataset,
    layer: &[usize],
    dmu: usize,
) -> Result<(TargetVector, f64)> {
    FrontierFaces::new(engine, ds, layer)?.closest(engine, ds, &ds.dmu(dmu).bundle())
}

pub fn oracle_two_step(
    engine: &Engine,
    ds: &Dataset,
    e: &[usize],
    e1: &[usize],
    dmu: usize,
    alpha: f64,
) -> Result<OracleTwoStep> {
    TwoStepOracle::new(engine, ds, e, e1)?.two_step(dmu, alpha)
}
