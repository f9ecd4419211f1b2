use super::Engine;
use crate::data::{Dataset, TargetVector};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, RowSense};

/// Additive optimum at or below which a unit counts as Pareto-efficient.
pub const EFFICIENCY_TOL: f64 = 1e-7;

/// Result of peeling: per-unit performance levels and the efficient set of
/// every peeled stratum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerAssignment {
    /// Level of each unit, 1-based, in dataset order.
    pub levels: Vec<usize>,
    /// `[E, E1, ...]`, one entry per requested level.
    pub efficient_sets: Vec<Vec<usize>>,
}

impl LayerAssignment {
    pub fn level_of(&self, dmu: usize) -> usize {
        self.levels[dmu]
    }

    pub fn depth(&self) -> usize {
        self.efficient_sets.len()
    }

    /// Units at `level`, in dataset order.
    pub fn members(&self, level: usize) -> Vec<usize> {
        (0..self.levels.len())
            .filter(|&j| self.levels[j] == level)
            .collect()
    }

    /// The first-level efficient set `E`.
    pub fn first(&self) -> &[usize] {
        &self.efficient_sets[0]
    }

    /// The second-level efficient set `E1`, if it was peeled.
    pub fn second(&self) -> Option<&[usize]> {
        self.efficient_sets.get(1).map(Vec::as_slice)
    }
}

impl Engine {
    /// Maximum of the normalized slacks `sum s-/x + sum s+/y` at `point` within
    /// the technology spanned by `members`; `None` if `point` lies outside it.
    pub fn additive_slack(
        &self,
        ds: &Dataset,
        members: &[usize],
        point: &TargetVector,
    ) -> Result<Option<f64>> {
        if members.is_empty() {
            return Err(Error::EmptyReferenceSet);
        }
        if let Some((component, &value)) = point
            .inputs
            .iter()
            .chain(&point.outputs)
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v <= 0.0)
        {
            return Err(Error::NonPositiveValue {
                id: "<evaluated point>".into(),
                column: format!("component {component}"),
                value,
            });
        }
        let (m, s, k) = (ds.m(), ds.s(), members.len());
        let mut lp = LinearProgram::new(k + m + s);
        for i in 0..m {
            lp.set_cost(k + i, -1.0 / point.inputs[i]);
            let mut row: Vec<(usize, f64)> = members
                .iter()
                .enumerate()
                .map(|(c, &j)| (c, ds.dmu(j).inputs[i]))
                .collect();
            row.push((k + i, 1.0));
            lp.add_row(&row, RowSense::Eq, point.inputs[i]);
        }
        for r in 0..s {
            lp.set_cost(k + m + r, -1.0 / point.outputs[r]);
            let mut row: Vec<(usize, f64)> = members
                .iter()
                .enumerate()
                .map(|(c, &j)| (c, ds.dmu(j).outputs[r]))
                .collect();
            row.push((k + m + r, -1.0));
            lp.add_row(&row, RowSense::Eq, point.outputs[r]);
        }
        let convexity: Vec<(usize, f64)> = (0..k).map(|c| (c, 1.0)).collect();
        lp.add_row(&convexity, RowSense::Eq, 1.0);

        let sol = self.simplex().solve(&lp)?;
        match sol.status {
            LpStatus::Optimal => Ok(Some((-sol.objective).max(0.0))),
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::SolverFailure(
                "additive model reported unbounded".into(),
            )),
        }
    }

    /// Members with zero additive slack in the technology the members span.
    pub fn classify_efficient(&self, ds: &Dataset, members: &[usize]) -> Result<Vec<usize>> {
        let mut efficient = Vec::new();
        for &j in members {
            let slack = self
                .additive_slack(ds, members, &ds.dmu(j).bundle())?
                .ok_or_else(|| {
                    Error::SolverFailure(format!(
                        "unit `{}` infeasible in its own technology",
                        ds.dmu(j).id
                    ))
                })?;
            if slack <= EFFICIENCY_TOL {
                efficient.push(j);
            }
        }
        efficient.sort_unstable();
        Ok(efficient)
    }

    /// Peels `depth` efficient strata off the data. Units left over after the
    /// last peel get level `depth + 1`.
    pub fn peel_layers(&self, ds: &Dataset, depth: usize) -> Result<LayerAssignment> {
        if depth == 0 {
            return Err(Error::InvalidProblem(
                "peeling depth must be at least 1".into(),
            ));
        }
        let mut levels = vec![depth + 1; ds.len()];
        let mut remaining: Vec<usize> = (0..ds.len()).collect();
        let mut efficient_sets = Vec::with_capacity(depth);
        for level in 1..=depth {
            if remaining.is_empty() {
                return Err(Error::EmptyStratum { level });
            }
            let efficient = self.classify_efficient(ds, &remaining)?;
            for &j in &efficient {
                levels[j] = level;
            }
            remaining.retain(|j| efficient.binary_search(j).is_err());
            efficient_sets.push(efficient);
        }
        Ok(LayerAssignment {
            levels,
            efficient_sets,
        })
    }
}
