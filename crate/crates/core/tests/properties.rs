//! Property tests for the structural invariants: expression round trips,
//! monotone inversion, telescoping of the cumulative integral, and the
//! node/branch bookkeeping.

use isospec_core::expr::Expr;
use isospec_core::numerics::{
    cumulative_integral, find_sign_changes, integrate, invert_monotone, Grid, SampledFunction,
};
use isospec_core::susy::{branch_split, solve_zero_mode};
use proptest::prelude::*;

/// Random expression trees over the leaf set {literal, x, pi, e}.
fn arb_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0.01f64..100.0).prop_map(|v| format!("{v}")),
        Just("x".to_string()),
        Just("pi".to_string()),
        Just("e".to_string()),
    ];
    leaf.prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}+{b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}-{b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}*{b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}/{b})")),
            (inner.clone(), 0.1f64..3.0).prop_map(|(a, p)| format!("({a}^{p})")),
            inner.clone().prop_map(|a| format!("(-{a})")),
            inner.clone().prop_map(|a| format!("exp({a})")),
            inner.clone().prop_map(|a| format!("ln({a})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("sqrt({a})")),
            inner.prop_map(|a| format!("abs({a})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn unparse_reparse_evaluates_bitwise_identically(text in arb_expr(), x in 0.05f64..10.0) {
        let Ok(parsed) = Expr::parse(&text) else { return Ok(()); };
        let rendered = parsed.to_string();
        let reparsed = Expr::parse(&rendered).expect("rendered form must reparse");
        match (parsed.eval(x), reparsed.eval(x)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits()),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "diverging outcomes: {:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn derivative_round_trips_through_rendering(text in arb_expr(), x in 0.1f64..5.0) {
        let Ok(parsed) = Expr::parse(&text) else { return Ok(()); };
        let derivative = parsed.differentiate();
        let rendered = derivative.to_string();
        let reparsed = Expr::parse(&rendered).expect("derivative must reparse");
        match (derivative.eval(x), reparsed.eval(x)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits()),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "diverging outcomes: {:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn monotone_inverse_round_trips(
        slope in 0.2f64..4.0,
        curvature in -0.4f64..0.4,
        n in 16usize..200,
    ) {
        // Strictly increasing samples of a smooth map.
        let grid = Grid::uniform(0.0, 2.0, n.max(3)).unwrap();
        let s = SampledFunction::from_fn(grid.clone(), |x| {
            slope * x + curvature * (x * 0.9).sin()
        }).unwrap();
        // slope dominates curvature, so monotone by construction
        let inverse = invert_monotone(&s).unwrap();
        for (&x, &z) in grid.points().iter().zip(s.values()) {
            let back = inverse.eval(z).unwrap();
            prop_assert!((back - x).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn cumulative_integral_telescopes_for_cubics(
        c0 in -2.0f64..2.0,
        c1 in -2.0f64..2.0,
        c2 in -2.0f64..2.0,
        c3 in -2.0f64..2.0,
    ) {
        let f = move |x: f64| c0 + x * (c1 + x * (c2 + x * c3));
        let grid = Grid::uniform(-1.0, 1.5, 41).unwrap();
        let acc = cumulative_integral(f, &grid, -1.0, 1e-10).unwrap();
        let pts = grid.points();
        let span = grid.span();
        for i in 0..pts.len() - 1 {
            let tol = 1e-10 * (pts[i + 1] - pts[i]) / span;
            let panel = integrate(f, pts[i], pts[i + 1], tol).unwrap();
            let diff = acc.values()[i + 1] - acc.values()[i];
            prop_assert!((diff - panel).abs() <= 1e-14 * (1.0 + acc.values()[i].abs()));
        }
    }

    #[test]
    fn branches_are_nodes_plus_one(frequency in 0.3f64..3.0, phase in 0.0f64..3.0) {
        // psi'' = -w^2 psi integrated over a window with a handful of nodes.
        let grid = Grid::uniform(0.0, 6.0, 1201).unwrap();
        let v1 = SampledFunction::from_fn(grid, |_| -(frequency * frequency)).unwrap();
        let m = solve_zero_mode(&v1, 0.0, phase.sin(), frequency * phase.cos()).unwrap();
        let branches = branch_split(&m);
        prop_assert_eq!(branches.len(), m.nodes.len() + 1);
        // and the roots found on the samples match the mode's node list
        let roots = find_sign_changes(&m.psi).unwrap();
        prop_assert_eq!(roots.len(), m.nodes.len());
    }
}
