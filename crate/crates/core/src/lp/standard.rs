use super::{LinearProgram, RowSense};

/// Identity of a standard-form column, stable across problems that differ
/// only in bounds or costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColumnKey {
    /// `x_j = shift + z` (lower-bounded, or the positive half of a free variable).
    Pos(usize),
    /// `x_j = shift - z` (upper-bounded only, or the negative half of a free variable).
    Neg(usize),
    /// Slack or surplus of original row `i`.
    Slack(usize),
    /// Slack of the implicit row `z_j <= upper_j - lower_j`.
    BoundSlack(usize),
    Artificial(usize),
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Fixed(f64),
    Shift { col: usize, shift: f64 },
    Mirror { col: usize, upper: f64 },
    Split { pos: usize, neg: usize },
}

/// `min c'z + c0, Az = b, z >= 0` with `b >= 0`.
#[derive(Debug, Clone)]
pub(super) struct StandardForm {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub keys: Vec<ColumnKey>,
    /// Starting basic column of each row (a slack where possible, else an artificial).
    pub initial_basis: Vec<usize>,
    var_maps: Vec<VarMap>,
}

struct PendingRow {
    coefs: Vec<f64>,
    sense: RowSense,
    rhs: f64,
    slack_key: ColumnKey,
}

impl StandardForm {
    /// Returns `None` when an all-zero row is violated.
    pub fn build(p: &LinearProgram, feas_tol: f64) -> Option<Self> {
        let n = p.num_vars();
        let mut keys = Vec::new();
        let mut c = Vec::new();
        let mut var_maps = Vec::with_capacity(n);
        for j in 0..n {
            let (l, u) = p.bounds(j);
            let cost = p.costs()[j];
            let map = if l == u {
                VarMap::Fixed(l)
            } else if l.is_finite() {
                keys.push(ColumnKey::Pos(j));
                c.push(cost);
                VarMap::Shift {
                    col: keys.len() - 1,
                    shift: l,
                }
            } else if u.is_finite() {
                keys.push(ColumnKey::Neg(j));
                c.push(-cost);
                VarMap::Mirror {
                    col: keys.len() - 1,
                    upper: u,
                }
            } else {
                keys.push(ColumnKey::Pos(j));
                keys.push(ColumnKey::Neg(j));
                c.push(cost);
                c.push(-cost);
                VarMap::Split {
                    pos: keys.len() - 2,
                    neg: keys.len() - 1,
                }
            };
            var_maps.push(map);
        }
        let structural = keys.len();

        let mut pending = Vec::new();
        for i in 0..p.num_rows() {
            let (row, sense, rhs) = p.row(i);
            let mut coefs = vec![0.0; structural];
            let mut rhs = rhs;
            for (j, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                match var_maps[j] {
                    VarMap::Fixed(v) => rhs -= a * v,
                    VarMap::Shift { col, shift } => {
                        coefs[col] += a;
                        rhs -= a * shift;
                    }
                    VarMap::Mirror { col, upper } => {
                        coefs[col] -= a;
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        coefs[pos] += a;
                        coefs[neg] -= a;
                    }
                }
            }
            if coefs.iter().all(|&a| a == 0.0) {
                let tol = feas_tol * rhs.abs().max(1.0);
                let ok = match sense {
                    RowSense::Eq => rhs.abs() <= tol,
                    RowSense::Le => rhs >= -tol,
                    RowSense::Ge => rhs <= tol,
                };
                if ok {
                    continue;
                }
                return None;
            }
            pending.push(PendingRow {
                coefs,
                sense,
                rhs,
                slack_key: ColumnKey::Slack(i),
            });
        }
        for (j, map) in var_maps.iter().enumerate() {
            if let VarMap::Shift { col, shift } = *map {
                let (_, u) = p.bounds(j);
                if u.is_finite() {
                    let mut coefs = vec![0.0; structural];
                    coefs[col] = 1.0;
                    pending.push(PendingRow {
                        coefs,
                        sense: RowSense::Le,
                        rhs: u - shift,
                        slack_key: ColumnKey::BoundSlack(j),
                    });
                }
            }
        }

        for row in &mut pending {
            if row.rhs < 0.0 {
                row.rhs = -row.rhs;
                row.coefs.iter_mut().for_each(|a| *a = -*a);
                row.sense = match row.sense {
                    RowSense::Le => RowSense::Ge,
                    RowSense::Ge => RowSense::Le,
                    RowSense::Eq => RowSense::Eq,
                };
            }
        }

        // slack / surplus columns, then artificials
        let mut slack_col = vec![None; pending.len()];
        for (r, row) in pending.iter().enumerate() {
            if row.sense != RowSense::Eq {
                keys.push(row.slack_key);
                c.push(0.0);
                slack_col[r] = Some(keys.len() - 1);
            }
        }
        let mut initial_basis = vec![0; pending.len()];
        let mut art_col = vec![None; pending.len()];
        for (r, row) in pending.iter().enumerate() {
            if row.sense == RowSense::Le {
                initial_basis[r] = slack_col[r].expect("inequality rows carry a slack");
            } else {
                keys.push(ColumnKey::Artificial(r));
                c.push(0.0);
                art_col[r] = Some(keys.len() - 1);
                initial_basis[r] = keys.len() - 1;
            }
        }

        let ncols = keys.len();
        let mut a = Vec::with_capacity(pending.len());
        let mut b = Vec::with_capacity(pending.len());
        for (r, row) in pending.into_iter().enumerate() {
            let mut full = row.coefs;
            full.resize(ncols, 0.0);
            if let Some(col) = slack_col[r] {
                full[col] = if row.sense == RowSense::Le { 1.0 } else { -1.0 };
            }
            if let Some(col) = art_col[r] {
                full[col] = 1.0;
            }
            a.push(full);
            b.push(row.rhs);
        }

        Some(Self {
            a,
            b,
            c,
            keys,
            initial_basis,
            var_maps,
        })
    }

    pub fn num_cols(&self) -> usize {
        self.keys.len()
    }

    pub fn is_artificial(&self, col: usize) -> bool {
        matches!(self.keys[col], ColumnKey::Artificial(_))
    }

    /// Maps a standard-form point back to the original variables.
    pub fn recover(&self, z: &[f64]) -> Vec<f64> {
        self.var_maps
            .iter()
            .map(|map| match *map {
                VarMap::Fixed(v) => v,
                VarMap::Shift { col, shift } => shift + z[col],
                VarMap::Mirror { col, upper } => upper - z[col],
                VarMap::Split { pos, neg } => z[pos] - z[neg],
            })
            .collect()
    }
}
