//! Jet coefficients against the finite-difference oracle, plus the exact
//! algebraic invariants of jet arithmetic.

mod common;

use common::{fd_derivative, FdConfig};
use nullstat_core::{Expr, Jet};
use proptest::prelude::*;

#[test]
fn oracle_spot_checks() {
    // f = x^2 at 3: first derivative 6.
    let f = |v: &[f64]| v[0] * v[0];
    let d = fd_derivative(&f, &[3.0], &[1.0], 1, FdConfig::for_order(1));
    assert!((d - 6.0).abs() < 1e-9, "{d}");

    // Radial norm at (1,1) along (1,0): second derivative 1/(2 sqrt2).
    let f = |v: &[f64]| (v[0] * v[0] + v[1] * v[1]).sqrt();
    let d = fd_derivative(&f, &[1.0, 1.0], &[1.0, 0.0], 2, FdConfig::for_order(2));
    let expect = 1.0 / (2.0 * 2.0_f64.sqrt());
    assert!((d - expect).abs() < 1e-6, "{d} vs {expect}");

    // Constant: all orders vanish.
    let f = |_: &[f64]| 4.25;
    for order in 1..=3 {
        let d = fd_derivative(&f, &[0.3], &[1.0], order, FdConfig::for_order(order));
        assert!(d.abs() < 1e-10);
    }
}

#[test]
fn jet_matches_oracle_on_the_running_example() {
    let e = Expr::parse("sqrt(x2^2+x3^2)", &["x2", "x3"]).unwrap();
    let jet = e.jet_eval(&[1.0, 1.0], &[1.0, 0.0], 2).unwrap();
    for order in 1..=2usize {
        let f = |v: &[f64]| e.eval(v).unwrap();
        let fd = fd_derivative(
            &f,
            &[1.0, 1.0],
            &[1.0, 0.0],
            order,
            FdConfig::for_order(order),
        );
        assert!(
            (jet.coeff(order) - fd).abs() < 1e-6,
            "order {order}: jet {} vs fd {fd}",
            jet.coeff(order)
        );
    }
}

/// Random polynomial of total degree <= 4 in up to 4 variables, returned as
/// source text so the test exercises the parser too.
fn poly_strategy(nvars: usize) -> impl Strategy<Value = String> {
    let var_names = ["x0", "x1", "x2", "x3"];
    let term = (-2.0..2.0f64, prop::collection::vec(0usize..=4, nvars)).prop_filter_map(
        "degree cap",
        move |(c, exps)| {
            if exps.iter().sum::<usize>() > 4 {
                return None;
            }
            let mut t = format!("{c}");
            for (i, e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => t = format!("{t}*{}", var_names[i]),
                    k => t = format!("{t}*{}^{k}", var_names[i]),
                }
            }
            Some(t)
        },
    );
    prop::collection::vec(term, 1..6).prop_map(|ts| ts.join(" + "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_jets_match_fd_oracle(
        src in poly_strategy(3),
        p in prop::collection::vec(-1.5..1.5f64, 3),
        d in prop::collection::vec(-1.0..1.0f64, 3),
    ) {
        let vars = ["x0", "x1", "x2"];
        let e = Expr::parse(&src, &vars).unwrap();
        let jet = e.jet_eval(&p, &d, 3).unwrap();
        let f = |v: &[f64]| e.eval(v).unwrap();
        for order in 1..=3usize {
            let fd = fd_derivative(&f, &p, &d, order, FdConfig::for_order(order));
            let tol = if order <= 2 { 1e-6 } else { 1e-4 };
            let scale = 1.0_f64.max(jet.coeff(order).abs());
            prop_assert!(
                (jet.coeff(order) - fd).abs() <= tol * scale,
                "order {} jet {} vs fd {} for `{}`",
                order, jet.coeff(order), fd, src
            );
        }
    }

    #[test]
    fn jet_linearity_is_exact(
        a in poly_strategy(2),
        b in poly_strategy(2),
        p in prop::collection::vec(-1.5..1.5f64, 2),
        d in prop::collection::vec(-1.0..1.0f64, 2),
    ) {
        let vars = ["x0", "x1"];
        let ea = Expr::parse(&a, &vars).unwrap();
        let eb = Expr::parse(&b, &vars).unwrap();
        let sum = Expr::parse(&format!("({a}) + ({b})"), &vars).unwrap();
        let ja = ea.jet_eval(&p, &d, 4).unwrap();
        let jb = eb.jet_eval(&p, &d, 4).unwrap();
        let js = sum.jet_eval(&p, &d, 4).unwrap();
        for k in 0..=4usize {
            prop_assert_eq!(js.coeff(k), ja.coeff(k) + jb.coeff(k));
        }
    }

    #[test]
    fn jet_product_is_the_binomial_convolution(
        a in poly_strategy(2),
        b in poly_strategy(2),
        p in prop::collection::vec(-1.5..1.5f64, 2),
        d in prop::collection::vec(-1.0..1.0f64, 2),
    ) {
        let vars = ["x0", "x1"];
        let ea = Expr::parse(&a, &vars).unwrap();
        let eb = Expr::parse(&b, &vars).unwrap();
        let prod = Expr::parse(&format!("({a})*({b})"), &vars).unwrap();
        let ja = ea.jet_eval(&p, &d, 4).unwrap();
        let jb = eb.jet_eval(&p, &d, 4).unwrap();
        let jp = prod.jet_eval(&p, &d, 4).unwrap();
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        for k in 0..=4usize {
            let mut expect = 0.0;
            for i in 0..=k {
                expect += BINOM[k][i] * ja.coeff(i) * jb.coeff(k - i);
            }
            prop_assert_eq!(jp.coeff(k), expect);
        }
    }

    #[test]
    fn expr_display_round_trips(
        src in poly_strategy(3),
    ) {
        let vars = ["x0", "x1", "x2"];
        let e = Expr::parse(&src, &vars).unwrap();
        let shown = format!("{e}");
        let back = Expr::parse(&shown, &vars).unwrap();
        prop_assert_eq!(e, back);
    }
}

#[test]
fn smooth_functions_match_oracle() {
    let vars = ["x0", "x1"];
    for src in [
        "exp(x0)*sin(x1)",
        "log(2 + x0^2)*cos(x1)",
        "sqrt(4 + x0*x1)",
        "exp(-x0^2)/(1 + x1^2)",
    ] {
        let e = Expr::parse(src, &vars).unwrap();
        let p = [0.4, -0.7];
        let d = [0.8, 0.5];
        let jet = e.jet_eval(&p, &d, 3).unwrap();
        let f = |v: &[f64]| e.eval(v).unwrap();
        for order in 1..=3usize {
            let fd = fd_derivative(&f, &p, &d, order, FdConfig::for_order(order));
            let tol = if order <= 2 { 1e-6 } else { 1e-4 };
            let scale = 1.0_f64.max(jet.coeff(order).abs());
            assert!(
                (jet.coeff(order) - fd).abs() <= tol * scale,
                "`{src}` order {order}: jet {} vs fd {fd}",
                jet.coeff(order)
            );
        }
    }
}

#[test]
fn jet_type_is_usable_from_coefficients() {
    let j = Jet::from_coeffs(&[2.0, 1.0, 0.0]);
    assert_eq!(j.order(), 2);
    assert_eq!(j.val(), 2.0);
}
