//! Branch-and-bound over LP relaxations with native SOS1 pair branching.
//!
//! Each [`Sos1Pair`] says that at most one of its two variables may be
//! nonzero. Nodes are explored depth first; after branching both children are
//! solved immediately and the one with the better bound is explored first.

use crate::error::{Error, Result};
use crate::lp::{Basis, LinearProgram, LpOptions, LpSolution, LpStatus, Simplex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sos1Pair {
    pub first: usize,
    pub second: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem {
    relaxation: LinearProgram,
    sos1: Vec<Sos1Pair>,
}

impl MilpProblem {
    pub fn new(relaxation: LinearProgram, sos1: Vec<Sos1Pair>) -> Result<Self> {
        let n = relaxation.num_vars();
        let mut used = vec![false; n];
        for pair in &sos1 {
            for v in [pair.first, pair.second] {
                if v >= n {
                    return Err(Error::InvalidProblem(format!(
                        "SOS1 pair `{}` references variable {v} of {n}",
                        pair.label
                    )));
                }
                if used[v] {
                    return Err(Error::InvalidProblem(format!(
                        "variable {v} appears in more than one SOS1 pair"
                    )));
                }
                used[v] = true;
            }
            if pair.first == pair.second {
                return Err(Error::InvalidProblem(format!(
                    "SOS1 pair `{}` repeats variable {}",
                    pair.label, pair.first
                )));
            }
        }
        Ok(Self { relaxation, sos1 })
    }

    pub fn relaxation(&self) -> &LinearProgram {
        &self.relaxation
    }

    pub fn sos1(&self) -> &[Sos1Pair] {
        &self.sos1
    }

    /// `min(|x_a|, |x_b|)` for each pair.
    pub fn violations(&self, x: &[f64]) -> Vec<f64> {
        self.sos1
            .iter()
            .map(|p| x[p.first].abs().min(x[p.second].abs()))
            .collect()
    }
}

/// One pair per reference unit, `{lambda_j, d_j}`.
pub fn build_with_sos(
    vars_lambda: &[usize],
    vars_d: &[usize],
    labels: &[String],
) -> Result<Vec<Sos1Pair>> {
    if vars_lambda.len() != vars_d.len() {
        return Err(Error::DimensionMismatch {
            context: "SOS1 pair members".into(),
            expected: vars_lambda.len(),
            found: vars_d.len(),
        });
    }
    if labels.len() != vars_lambda.len() {
        return Err(Error::DimensionMismatch {
            context: "SOS1 pair labels".into(),
            expected: vars_lambda.len(),
            found: labels.len(),
        });
    }
    Ok(vars_lambda
        .iter()
        .zip(vars_d)
        .zip(labels)
        .map(|((&first, &second), label)| Sos1Pair {
            first,
            second,
            label: label.clone(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    /// Relaxations solved, root included.
    pub node_count: usize,
    /// Incumbent minus the best bound among pruned nodes (0 when nothing was pruned).
    pub gap: f64,
    /// Largest amount by which a child relaxation came out below its parent.
    /// Stays at rounding level; anything else indicates a solver fault.
    pub max_bound_regression: f64,
}

impl MilpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == MilpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilpOptions {
    pub lp: LpOptions,
    pub node_limit: usize,
    /// A pair with `min(|a|, |b|)` at or below this is considered satisfied.
    pub complementarity_tol: f64,
    /// Relative tolerance for pruning a node against the incumbent.
    pub prune_tol: f64,
}

impl Default for MilpOptions {
    fn default() -> Self {
        Self {
            lp: LpOptions::default(),
            node_limit: 1_000_000,
            complementarity_tol: 1e-7,
            prune_tol: 1e-9,
        }
    }
}

struct Node {
    fixed: Vec<usize>,
    lp: LpSolution,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BranchAndBound {
    pub options: MilpOptions,
}

impl BranchAndBound {
    pub fn new(options: MilpOptions) -> Self {
        Self { options }
    }

    fn restricted(&self, p: &MilpProblem, fixed: &[usize]) -> Option<LinearProgram> {
        let mut lp = p.relaxation.clone();
        for &v in fixed {
            let (l, u) = lp.bounds(v);
            if l > 0.0 || u < 0.0 {
                return None;
            }
            lp.fix(v, 0.0);
        }
        Some(lp)
    }

    fn solve_node(
        &self,
        p: &MilpProblem,
        fixed: Vec<usize>,
        warm: Option<&Basis>,
    ) -> Result<Option<Node>> {
        let Some(lp) = self.restricted(p, &fixed) else {
            return Ok(None);
        };
        let simplex = Simplex::new(self.options.lp);
        let sol = match warm {
            Some(b) => simplex.solve_warm(&lp, b)?,
            None => simplex.solve(&lp)?,
        };
        match sol.status {
            LpStatus::Optimal => Ok(Some(Node { fixed, lp: sol })),
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::SolverFailure("LP relaxation is unbounded".into())),
        }
    }

    /// Index of the pair with the largest violation; ties go to the lowest index.
    fn most_violated(&self, p: &MilpProblem, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (k, v) in p.violations(x).into_iter().enumerate() {
            if v > self.options.complementarity_tol && best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
        best.map(|(k, _)| k)
    }

    /// Re-solves an accepted leaf with the small member of every residual pair
    /// fixed to zero, so reported solutions are exactly complementary.
    fn polish(&self, p: &MilpProblem, node: Node) -> Result<Node> {
        let mut fixed = node.fixed.clone();
        for pair in &p.sos1 {
            let (a, b) = (node.lp.x[pair.first].abs(), node.lp.x[pair.second].abs());
            if a.min(b) > 0.0 {
                let v = if a <= b { pair.first } else { pair.second };
                if !fixed.contains(&v) {
                    fixed.push(v);
                }
            }
        }
        if fixed.len() == node.fixed.len() {
            return Ok(node);
        }
        match self.solve_node(p, fixed, node.lp.basis.as_ref())? {
            Some(polished) if self.most_violated(p, &polished.lp.x).is_none() => Ok(polished),
            _ => Ok(node),
        }
    }

    pub fn solve(&self, p: &MilpProblem) -> Result<MilpSolution> {
        let mut node_count = 1;
        let mut max_bound_regression: f64 = 0.0;
        let Some(root) = self.solve_node(p, Vec::new(), None)? else {
            return Ok(MilpSolution {
                status: MilpStatus::Infeasible,
                objective: f64::NAN,
                x: Vec::new(),
                node_count,
                gap: 0.0,
                max_bound_regression,
            });
        };

        let mut incumbent: Option<Node> = None;
        let mut best_pruned = f64::INFINITY;
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            let bound = node.lp.objective;
            if let Some(inc) = &incumbent {
                let cutoff =
                    inc.lp.objective - self.options.prune_tol * inc.lp.objective.abs().max(1.0);
                if bound >= cutoff {
                    best_pruned = best_pruned.min(bound);
                    continue;
                }
            }
            let Some(k) = self.most_violated(p, &node.lp.x) else {
                let leaf = self.polish(p, node)?;
                if incumbent
                    .as_ref()
                    .is_none_or(|inc| leaf.lp.objective < inc.lp.objective)
                {
                    incumbent = Some(leaf);
                }
                continue;
            };

            let pair = &p.sos1[k];
            let mut children = Vec::with_capacity(2);
            for v in [pair.first, pair.second] {
                if node_count >= self.options.node_limit {
                    return Err(Error::NodeLimitExceeded(self.options.node_limit));
                }
                let mut fixed = node.fixed.clone();
                fixed.push(v);
                node_count += 1;
                if let Some(child) = self.solve_node(p, fixed, node.lp.basis.as_ref())? {
                    max_bound_regression = max_bound_regression.max(bound - child.lp.objective);
                    children.push(child);
                }
            }
            // better bound popped first; equal bounds keep the `first` child on top
            children.sort_by(|a, b| b.lp.objective.total_cmp(&a.lp.objective));
            stack.extend(children);
        }

        Ok(match incumbent {
            Some(inc) => {
                let objective = inc.lp.objective;
                MilpSolution {
                    status: MilpStatus::Optimal,
                    objective,
                    x: inc.lp.x,
                    node_count,
                    gap: (objective - best_pruned.min(objective)).max(0.0),
                    max_bound_regression,
                }
            }
            None => MilpSolution {
                status: MilpStatus::Infeasible,
                objective: f64::NAN,
                x: Vec::new(),
                node_count,
                gap: 0.0,
                max_bound_regression,
            },
        })
    }
}

pub fn solve_milp(p: &MilpProblem) -> Result<MilpSolution> {
    BranchAndBound::default().solve(p)
}
