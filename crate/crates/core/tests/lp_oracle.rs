mod common;

use common::{vertex_max, Row};
use proptest::prelude::*;
use qlab_core::lp::{LinearProgram, LpOutcome, Relation, EPS_LP};

fn coeff() -> impl Strategy<Value = f64> {
    (-4i32..=4).prop_map(f64::from)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    // Random bounded LPs: the simplex optimum equals the best vertex.
    #[test]
    fn simplex_matches_vertex_enumeration(
        n in 2usize..=3,
        c in prop::collection::vec(coeff(), 3),
        le in prop::collection::vec((prop::collection::vec(coeff(), 3), 0i32..6), 0..4),
        eq in prop::option::of((prop::collection::vec(coeff(), 3), -3i32..4)),
    ) {
        let c = &c[..n];
        let mut rows: Vec<Row> = le.iter().map(|(a, b)| Row { a: a[..n].to_vec(), b: f64::from(*b) }).collect();
        // bounding box keeps the polytope compact
        rows.push(Row { a: vec![1.0; n], b: 10.0 });
        let eqs: Vec<Row> = eq.iter().map(|(a, b)| Row { a: a[..n].to_vec(), b: f64::from(*b) }).collect();

        let mut lp = LinearProgram::new(c.to_vec());
        for r in &rows {
            lp.constrain(r.a.clone(), Relation::Le, r.b);
        }
        for r in &eqs {
            lp.constrain(r.a.clone(), Relation::Eq, r.b);
        }
        let oracle = vertex_max(c, &eqs, &rows);
        match (lp.maximize(EPS_LP), oracle) {
            (LpOutcome::Optimal { x, value }, Some((best, _))) => {
                prop_assert!((value - best).abs() < 1e-7, "simplex {value} vs vertices {best}");
                for r in &rows {
                    prop_assert!(common::dot(&r.a, &x) <= r.b + 1e-7);
                }
                for r in &eqs {
                    prop_assert!((common::dot(&r.a, &x) - r.b).abs() <= 1e-7);
                }
                prop_assert!(x.iter().all(|&v| v >= 0.0));
            }
            (LpOutcome::Infeasible, None) => {}
            (got, want) => prop_assert!(false, "simplex {got:?} vs oracle {want:?}"),
        }
    }

    // Ge rows are the negated Le rows.
    #[test]
    fn ge_rows_mirror_le_rows(a in prop::collection::vec(coeff(), 2), b in -5i32..5, c in prop::collection::vec(coeff(), 2)) {
        let mut le = LinearProgram::new(c.clone());
        le.constrain(a.iter().map(|v| -v).collect(), Relation::Le, -f64::from(b))
            .constrain(vec![1.0, 1.0], Relation::Le, 7.0);
        let mut ge = LinearProgram::new(c);
        ge.constrain(a, Relation::Ge, f64::from(b)).constrain(vec![1.0, 1.0], Relation::Le, 7.0);
        match (le.maximize(EPS_LP), ge.maximize(EPS_LP)) {
            (LpOutcome::Optimal { value: x, .. }, LpOutcome::Optimal { value: y, .. }) => prop_assert!((x - y).abs() < 1e-9),
            (x, y) => prop_assert_eq!(x, y),
        }
    }
}
