//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

/// `a·x ≤ b` (or `= b` when listed as an equality).
pub struct Row {
    pub a: Vec<f64>,
    pub b: f64,
}

/// Solves the square system by Gaussian elimination with partial pivoting.
pub fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    let (pivot, row) = if r < col {
                        let (a, b) = m.split_at_mut(col);
                        (&b[0], &mut a[r])
                    } else {
                        let (a, b) = m.split_at_mut(r);
                        (&a[col], &mut b[0])
                    };
                    for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                        *x -= f * p;
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Maximizes `c·x` over `x ≥ 0`, `eq`, `le` by enumerating every vertex of a
/// bounded polytope. `None` when infeasible.
pub fn vertex_max(c: &[f64], eq: &[Row], le: &[Row]) -> Option<(f64, Vec<f64>)> {
    let n = c.len();
    // inequality rows, including x_i ≥ 0 as −x_i ≤ 0
    let mut ineq: Vec<Row> = le.iter().map(|r| Row { a: r.a.clone(), b: r.b }).collect();
    for i in 0..n {
        let mut a = vec![0.0; n];
        a[i] = -1.0;
        ineq.push(Row { a, b: 0.0 });
    }
    if eq.len() > n {
        return None;
    }
    let need = n - eq.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for active in combinations(ineq.len(), need) {
        let rows: Vec<&Row> = eq.iter().chain(active.iter().map(|&i| &ineq[i])).collect();
        let Some(x) = solve(rows.iter().map(|r| r.a.clone()).collect(), rows.iter().map(|r| r.b).collect()) else {
            continue;
        };
        let feasible = eq.iter().all(|r| (dot(&r.a, &x) - r.b).abs() <= 1e-9)
            && ineq.iter().all(|r| dot(&r.a, &x) <= r.b + 1e-9);
        if feasible {
            let v = dot(c, &x);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, x));
            }
        }
    }
    best
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
