//! Property suites over random expressions, systems and states.

mod common;

use proptest::prelude::*;

use common::*;
use varstab::expr::{BinaryOp, Expr, Jet2, UnaryOp, Var};
use varstab::geometry::{classify, connection, jacobi, nabla_phi, DEFAULT_ZERO_TOL};
use varstab::synth::build_dissipative;
use varstab::system::{to_normal_form, Interval, MechanicalSystem, QuadraticControl, RstuSode};
use varstab::variational::{build_multiplier, criteria_on_grid, variational_check};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-50i32..50, 0u32..3).prop_map(|(m, e)| Expr::Const(m as f64 / 10f64.powi(e as i32))),
        Just(Expr::Var(Var::Y)),
        Just(Expr::Var(Var::X)),
    ]
}

/// Trees of depth at most 6 over every operator.
fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(6, 64, 2, |inner| {
        let unary = prop_oneof![
            Just(UnaryOp::Neg),
            Just(UnaryOp::Sin),
            Just(UnaryOp::Cos),
            Just(UnaryOp::Tan),
            Just(UnaryOp::Exp),
            Just(UnaryOp::Log),
            Just(UnaryOp::Sqrt),
        ];
        let binary = prop_oneof![
            Just(BinaryOp::Add),
            Just(BinaryOp::Sub),
            Just(BinaryOp::Mul),
            Just(BinaryOp::Div)
        ];
        // exponents are constants in the grammar
        let exponent = (-6i32..7).prop_map(|k| Expr::Const(k as f64 / 2.0));
        prop_oneof![
            (unary, inner.clone()).prop_map(|(op, e)| Expr::Unary(op, Box::new(e))),
            (binary, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::Binary(
                op,
                Box::new(a),
                Box::new(b)
            )),
            (inner, exponent).prop_map(|(a, p)| Expr::Binary(
                BinaryOp::Pow,
                Box::new(a),
                Box::new(p)
            )),
        ]
    })
}

/// Smooth trees in `y` on which every operation stays defined near the
/// sample points: no log, sqrt, tan or division, small integer powers.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-20i32..20).prop_map(|m| Expr::Const(m as f64 / 10.0)),
        Just(Expr::Var(Var::Y))
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            inner
                .clone()
                .prop_map(|e| Expr::Unary(UnaryOp::Sin, Box::new(e))),
            inner
                .clone()
                .prop_map(|e| Expr::Unary(UnaryOp::Cos, Box::new(e))),
            inner
                .clone()
                .prop_map(|e| Expr::Unary(UnaryOp::Neg, Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Binary(
                BinaryOp::Add,
                Box::new(a),
                Box::new(b)
            )),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Binary(
                BinaryOp::Mul,
                Box::new(a),
                Box::new(b)
            )),
            inner.prop_map(|e| Expr::Binary(
                BinaryOp::Pow,
                Box::new(e),
                Box::new(Expr::Const(2.0))
            )),
        ]
    })
}

/// A random positive-definite system with a random control:
/// `a11 = 3`, `a12 = c1 cos y`, `a22 = 2 + c2 sin² y`, `V = c3 (1 − cos y)`,
/// `M = c4 y`, `N = c5 sin y`.
fn random_system(c: [f64; 5]) -> (MechanicalSystem, RstuSode) {
    let e = |s: String| -> Expr { s.parse().unwrap() };
    let sys = MechanicalSystem::new(
        3.0,
        e(format!("{}*cos(y)", c[0])),
        e(format!("2 + {}*sin(y)^2", c[1])),
        e(format!("{}*(1 - cos(y))", c[2])),
        Interval::symmetric(1.2).unwrap(),
    )
    .unwrap();
    let ctrl = QuadraticControl::new(e(format!("{}*y", c[3])), e(format!("{}*sin(y)", c[4])));
    let sode = to_normal_form(&sys, &ctrl).unwrap();
    (sys, sode)
}

fn coeffs() -> impl Strategy<Value = [f64; 5]> {
    (
        -0.9f64..0.9,
        0.0f64..1.0,
        0.5f64..5.0,
        -2.0f64..2.0,
        -5.0f64..5.0,
    )
        .prop_map(|(a, b, c, d, e)| [a, b, c, d, e])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(e in any_expr()) {
        let text = e.to_string();
        let back: Expr = text.parse().unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.to_string(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn jets_match_central_differences(e in smooth_expr(), y in -1.0f64..1.0) {
        let j = e.eval2(y).unwrap();
        let f = |z: f64| e.eval(z).unwrap();
        let h = 1e-3;
        let scale = 1.0 + (0..5).map(|k| f(y + (k as f64 - 2.0) * h).abs()).fold(0.0, f64::max);
        prop_assert!((j.value - f(y)).abs() <= 1e-14 * scale);
        prop_assert!((j.d1 - d1(f, y, h)).abs() <= 1e-6 * scale * (1.0 + j.d1.abs()), "{} vs {}", j.d1, d1(f, y, h));
        prop_assert!((j.d2 - d2(f, y, h)).abs() <= 1e-4 * scale * (1.0 + j.d2.abs()), "{} vs {}", j.d2, d2(f, y, h));
    }

    #[test]
    fn symbolic_derivative_agrees_with_jet(e in smooth_expr(), y in -1.0f64..1.0) {
        let j = e.eval2(y).unwrap();
        let dj = e.derivative().eval2(y).unwrap();
        prop_assert!((dj.value - j.d1).abs() <= 1e-12 * (1.0 + j.d1.abs()));
        prop_assert!((dj.d1 - j.d2).abs() <= 1e-11 * (1.0 + j.d2.abs()));
    }

    #[test]
    fn jet_product_obeys_leibniz(a in prop::array::uniform3(-5.0f64..5.0), b in prop::array::uniform3(-5.0f64..5.0)) {
        let (f, g) = (Jet2::new(a[0], a[1], a[2]), Jet2::new(b[0], b[1], b[2]));
        let p = f * g;
        prop_assert!((p.value - a[0] * b[0]).abs() < 1e-12);
        prop_assert!((p.d1 - (a[1] * b[0] + a[0] * b[1])).abs() < 1e-12);
        prop_assert!((p.d2 - (a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2])).abs() < 1e-11);
    }

    /// The normal form reproduces the Euler-Lagrange equations with the
    /// control on the cyclic coordinate:
    /// `a11ẍ + a12ÿ + a12'ẏ² = u`, `a12ẍ + a22ÿ + ½a22'ẏ² + V' = 0`.
    #[test]
    fn normal_form_solves_the_equations_of_motion(c in coeffs(), y in -1.1f64..1.1, yd in -3.0f64..3.0) {
        let (sys, sode) = random_system(c);
        let (xdd, ydd) = sode.accel(y, yd).unwrap();
        let a12 = |z: f64| c[0] * z.cos();
        let a22 = |z: f64| 2.0 + c[1] * z.sin().powi(2);
        let v = |z: f64| c[2] * (1.0 - z.cos());
        let u = c[3] * y * yd * yd + c[4] * y.sin();
        let r1 = sys.a11() * xdd + a12(y) * ydd + d1(a12, y, 1e-3) * yd * yd - u;
        let r2 = a12(y) * xdd + a22(y) * ydd + 0.5 * d1(a22, y, 1e-3) * yd * yd + d1(v, y, 1e-3);
        prop_assert!(r1.abs() < 1e-9 * (1.0 + u.abs()), "{}", r1);
        prop_assert!(r2.abs() < 1e-9 * (1.0 + xdd.abs() + ydd.abs()), "{}", r2);
    }

    /// `∇Φ` agrees with `Γ(Φ) + Γ^i_k Φ^k_j − Φ^i_k Γ^k_j`, differentiating the
    /// Jacobi components numerically.
    #[test]
    fn nabla_phi_matches_general_formula(c in coeffs(), y in -1.0f64..1.0, yd in -3.0f64..3.0) {
        let (_, sode) = random_system(c);
        let (p12, p22) = jacobi(&sode, y).unwrap();
        let dp12 = d1(|z| jacobi(&sode, z).unwrap().0, y, 1e-3);
        let dp22 = d1(|z| jacobi(&sode, z).unwrap().1, y, 1e-3);
        let (g12, g22) = connection(&sode, y, yd).unwrap();
        let expect12 = yd * dp12 + g12 * p22 - p12 * g22;
        let expect22 = yd * dp22;
        let (n12, n22) = nabla_phi(&sode, y, yd).unwrap();
        let scale = 1.0 + yd.abs() * (dp12.abs() + dp22.abs() + p12.abs() + p22.abs()) * (1.0 + g12.abs() + g22.abs());
        prop_assert!((n12 - expect12).abs() < 1e-7 * scale, "{} vs {}", n12, expect12);
        prop_assert!((n22 - expect22).abs() < 1e-7 * scale, "{} vs {}", n22, expect22);
    }

    #[test]
    fn connection_and_nabla_phi_are_linear_in_ydot(c in coeffs(), y in -1.0f64..1.0, yd in -3.0f64..3.0, k in -4.0f64..4.0) {
        let (_, sode) = random_system(c);
        let (a1, a2) = connection(&sode, y, yd).unwrap();
        let (b1, b2) = connection(&sode, y, k * yd).unwrap();
        prop_assert!((b1 - k * a1).abs() <= 1e-12 * (1.0 + b1.abs()));
        prop_assert!((b2 - k * a2).abs() <= 1e-12 * (1.0 + b2.abs()));
        let (a1, a2) = nabla_phi(&sode, y, yd).unwrap();
        let (b1, b2) = nabla_phi(&sode, y, k * yd).unwrap();
        prop_assert!((b1 - k * a1).abs() <= 1e-11 * (1.0 + b1.abs()));
        prop_assert!((b2 - k * a2).abs() <= 1e-11 * (1.0 + b2.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Refining the grid does not change the verdicts of the cart family.
    /// Below d = 6g the control's denominator vanishes inside (−π/4, π/4).
    #[test]
    fn verdicts_stable_under_grid_refinement(k in 6.5f64..12.0) {
        let (_, _, sode) = cart_new(k * G);
        let coarse = classify(&sode, 200, DEFAULT_ZERO_TOL).unwrap().uniform();
        let fine = classify(&sode, 800, DEFAULT_ZERO_TOL).unwrap().uniform();
        prop_assert_eq!(coarse, fine);
        prop_assert!(coarse.is_some());
        let v1 = variational_check(&sode, 200, 1e-9).unwrap().is_variational;
        let v2 = variational_check(&sode, 800, 1e-9).unwrap().is_variational;
        prop_assert!(v1 && v2);
    }

    /// Along the closed loop with `u₂`, `Ė_L = ẋ ∂D/∂ẋ + ẏ ∂D/∂ẏ = 2D ≤ 0`.
    #[test]
    fn energy_rate_equals_twice_dissipation(x in -2.0f64..2.0, y in -0.6f64..0.6, xd in -2.0f64..2.0, yd in -2.0f64..2.0, wheel_case in any::<bool>()) {
        let (sys, sode, f) = if wheel_case {
            let (s, _, o) = wheel(60.0);
            (s, o, "-0.1".to_string())
        } else {
            let (s, _, o) = cart_new(7.0 * G);
            (s, o, "-0.03*x^2 - 0.01".to_string())
        };
        let mult = build_multiplier(&sode, 1.0, 1e-10).unwrap();
        let aug = build_dissipative(&sys, &mult, f.parse().unwrap()).unwrap();
        let (mut xdd, mut ydd) = sode.accel(y, yd).unwrap();
        let (cx, cy) = aug.acceleration(x, y, xd, yd).unwrap();
        xdd += cx;
        ydd += cy;
        let rate = mult.energy_rate(y, xd, yd, xdd, ydd).unwrap();
        let (gx, gy) = aug.dissipation_gradient(x, y, xd, yd).unwrap();
        let dd = aug.dissipation(x, y, xd, yd).unwrap();
        let scale = 1.0 + rate.abs() + (xd * gx).abs() + (yd * gy).abs();
        prop_assert!((rate - (xd * gx + yd * gy)).abs() < 1e-7 * scale, "{} vs {}", rate, xd * gx + yd * gy);
        prop_assert!((xd * gx + yd * gy - 2.0 * dd).abs() < 1e-9 * scale);
        prop_assert!(dd <= 0.0);
    }

    /// The three characterizations agree on perturbed wheel controls.
    #[test]
    fn criteria_agree_on_perturbed_wheel(c in prop::array::uniform4(-1.0f64..1.0), keep in any::<bool>()) {
        let (sys, _, _) = wheel(60.0);
        let (m, n): (Expr, Expr) = if keep {
            (Expr::Const(0.0), format!("(60 + 0.1*{})*sin(y)", c[0]).parse().unwrap())
        } else {
            (
                format!("0.1*{}*y^2", c[3]).parse().unwrap(),
                format!("60*sin(y) + 0.1*({}*y + {}*sin(3*y) + {}*y^2*sin(y))", c[0], c[1], c[2]).parse().unwrap(),
            )
        };
        let iv = Interval::symmetric(1.4).unwrap();
        let sode = to_normal_form(&sys.with_interval(iv), &QuadraticControl::new(m, n)).unwrap();
        let min_phi = iv.cell_centers(200).map(|y| jacobi(&sode, y).unwrap().1.abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(min_phi > 1e-3);
        let (a, b, c) = criteria_on_grid(&sode, 200, 1e-7).unwrap().criteria();
        prop_assert!(a == b && b == c, "{:?}", (a, b, c));
        if keep {
            prop_assert!(a);
        }
    }
}
