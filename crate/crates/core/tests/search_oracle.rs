//! Brute force over every `±1` triple of columns, with each weight LP solved
//! by vertex enumeration, against the symmetry-reduced witness search.

mod common;

use std::collections::BTreeMap;

use common::{vertex_max, Row};
use qlab_core::bell::{violation_search, ConstraintSet, EPS_BELL};
use qlab_core::GeometricSpace;

/// Rows of `(x, y, z)` grouped by a key extracted from each row.
fn group_rows(rows: &[[f64; 3]], key: impl Fn(&[f64; 3]) -> Vec<i8>) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<Vec<i8>, Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        groups.entry(key(r)).or_default().push(i);
    }
    groups.into_values().collect()
}

fn best_lhs(g: &[f64], rows: &[[f64; 3]], cap: f64, constraints: ConstraintSet) -> Option<f64> {
    let n = g.len();
    let eq = vec![Row { a: g.to_vec(), b: 1.0 }];
    let mut le = vec![Row { a: vec![1.0; n], b: cap }];
    let mut nonneg = |groups: Vec<Vec<usize>>| {
        for idx in groups {
            let mut a = vec![0.0; n];
            for i in idx {
                a[i] = -g[i];
            }
            le.push(Row { a, b: 0.0 });
        }
    };
    let s = |v: f64| if v > 0.0 { 1i8 } else { -1 };
    match constraints {
        ConstraintSet::None => {}
        ConstraintSet::MarginalsNonneg => {
            for j in 0..3 {
                nonneg(group_rows(rows, |r| vec![s(r[j])]));
            }
        }
        ConstraintSet::PairwiseNonneg => {
            for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                nonneg(group_rows(rows, |r| vec![s(r[a]), s(r[b])]));
            }
        }
        ConstraintSet::TripleNonneg => nonneg(group_rows(rows, |r| r.iter().map(|&v| s(v)).collect())),
    }
    let mut best: Option<f64> = None;
    for branch in [1.0, -1.0] {
        let c: Vec<f64> = (0..n)
            .map(|i| g[i] * (branch * (rows[i][0] * rows[i][1] - rows[i][1] * rows[i][2]) + rows[i][0] * rows[i][2]))
            .collect();
        if let Some((v, _)) = vertex_max(&c, &eq, &le) {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best
}

fn brute_force(space: &GeometricSpace, cap: f64, constraints: ConstraintSet) -> Option<f64> {
    let g = space.metric();
    let n = g.len();
    let mut best: Option<f64> = None;
    for code in 0..(1usize << (3 * n)) {
        let rows: Vec<[f64; 3]> = (0..n)
            .map(|i| [0, 1, 2].map(|j| if code >> (3 * i + j) & 1 == 1 { -1.0 } else { 1.0 }))
            .collect();
        if let Some(v) = best_lhs(&g, &rows, cap, constraints) {
            if v > 1.0 + EPS_BELL {
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    }
    best
}

#[test]
fn reduced_search_finds_the_brute_force_optimum() {
    let sets = [
        ConstraintSet::None,
        ConstraintSet::MarginalsNonneg,
        ConstraintSet::PairwiseNonneg,
        ConstraintSet::TripleNonneg,
    ];
    for (r, m) in [(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (1, 2)] {
        let space = GeometricSpace::with_signature(r, m);
        for cap in [1.0, 1.5, 2.0, 3.0] {
            for constraints in sets {
                let found = violation_search(&space, cap, constraints).unwrap();
                let top = found.first().map(|w| w.report.lhs);
                let oracle = brute_force(&space, cap, constraints);
                match (top, oracle) {
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9, "{space} cap {cap} {constraints}: {a} vs {b}"),
                    (None, None) => {}
                    _ => panic!("{space} cap {cap} {constraints}: search {top:?} vs brute force {oracle:?}"),
                }
                for w in &found {
                    let again = w.recheck().unwrap();
                    assert!((again.lhs - w.report.lhs).abs() <= 1e-9);
                    let sum: f64 = w.weights.iter().sum();
                    assert!(sum <= cap + 1e-9);
                    let flags_ok = match constraints {
                        ConstraintSet::None => true,
                        ConstraintSet::MarginalsNonneg => again.marginals_nonneg.iter().all(|&b| b),
                        ConstraintSet::PairwiseNonneg => again.pairwise_nonneg.iter().all(|&b| b),
                        ConstraintSet::TripleNonneg => again.triple_density_nonneg,
                    };
                    assert!(flags_ok, "{space} {constraints}: {again:?}");
                }
            }
        }
    }
}

#[test]
fn m3_hand_enumerated_optimum() {
    // X = Y = (1,1,1), Z = (1,1,-1): lhs = |p1+p2-p3 - (p1+p2+p3)| + p1+p2+p3 with
    // p1+p2-p3 = 1, p ≥ 0, Σp ≤ 2; vertices (1,0,0), (0,1,0), (3/2,0,1/2), (0,3/2,1/2)
    let vertices = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.5, 0.0, 0.5], [0.0, 1.5, 0.5]];
    let lhs = |p: [f64; 3]| {
        let exy = p[0] + p[1] - p[2];
        let eyz = p[0] + p[1] + p[2];
        let exz = p[0] + p[1] + p[2];
        (exy - eyz).abs() + exz
    };
    let best = vertices.iter().map(|&p| lhs(p)).fold(f64::MIN, f64::max);
    assert_eq!(best, 3.0);
    let found = violation_search(&GeometricSpace::minkowski(3), 2.0, ConstraintSet::None).unwrap();
    assert!((found[0].report.lhs - best).abs() < 1e-9);
    assert!(found[0].report.lhs > found[0].report.bound);
}
