//! Dense two-phase simplex for the tiny linear programs behind the witness
//! search and the Hilbert feasibility check.
//!
//! Variables are implicitly nonnegative. Pivoting follows Bland's rule, so
//! the method terminates on degenerate problems.

/// Default feasibility / optimality tolerance.
pub const EPS_LP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    /// Maximize `objective · x` over `x ≥ 0`.
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.vars(), "constraint width");
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn maximize(&self, eps: f64) -> LpOutcome {
        Tableau::build(self).solve(&self.objective, eps)
    }
}

struct Tableau {
    /// `m` rows of `width` coefficients followed by the rhs.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_orig: usize,
    /// Columns at or beyond this index are artificial.
    first_artificial: usize,
    width: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.vars();
        // orient every row so its rhs is nonnegative
        let oriented: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|a| -a).collect(), flipped, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs)
                }
            })
            .collect();

        let n_slack = oriented.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let n_art = oriented.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let first_artificial = n + n_slack;
        let width = first_artificial + n_art;

        let mut rows = Vec::with_capacity(oriented.len());
        let mut basis = Vec::with_capacity(oriented.len());
        let (mut slack, mut art) = (n, first_artificial);
        for (coeffs, rel, rhs) in oriented {
            let mut row = vec![0.0; width + 1];
            row[..n].copy_from_slice(&coeffs);
            row[width] = rhs;
            match rel {
                Relation::Le => {
                    row[slack] = 1.0;
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }
        Self {
            rows,
            basis,
            n_orig: n,
            first_artificial,
            width,
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
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
        self.basis[r] = c;
    }

    /// Primal simplex maximizing `cost · x` over columns `< allowed`.
    /// Returns `false` when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize, eps: f64) -> bool {
        loop {
            // reduced cost c_j − c_B B⁻¹ A_j; enter with the smallest improving index
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: f64 = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .map(|(row, &b)| cost[b] * row[j])
                    .sum();
                cost[j] - z > eps
            });
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[col];
                if a > eps {
                    let ratio = self.rows[i][self.width] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - eps || (ratio <= lr + eps && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }

    fn solve(mut self, objective: &[f64], eps: f64) -> LpOutcome {
        // phase 1: maximize −Σ artificials
        if self.first_artificial < self.width {
            let mut cost = vec![0.0; self.width];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = -1.0;
            }
            self.optimize(&cost, self.width, eps);
            let infeasibility: f64 = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= self.first_artificial)
                .map(|(i, _)| self.rhs(i))
                .sum();
            if infeasibility > eps {
                return LpOutcome::Infeasible;
            }
            // drive remaining (zero-level) artificials out of the basis
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| self.rows[i][j].abs() > eps) {
                        Some(j) => self.pivot(i, j),
                        None => {
                            // redundant row
                            self.rows.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }

        let mut cost = vec![0.0; self.width];
        cost[..self.n_orig].copy_from_slice(objective);
        if !self.optimize(&cost, self.first_artificial, eps) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; self.n_orig];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_orig {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}
