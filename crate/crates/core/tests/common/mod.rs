//! Shared fixtures and closed-form oracles for the integration tests.
//!
//! The oracles never touch the library's normal-form assembly: they use the
//! hand-reduced coefficient formulas of the two example systems and central
//! differences for derivatives.
#![allow(dead_code)]

use std::collections::HashMap;

use varstab::system::{
    builtin, builtin_with_params, params, to_normal_form, MechanicalSystem, QuadraticControl,
    RstuSode,
};

pub const G: f64 = 9.81;
pub const WHEEL_A: f64 = 0.4846;
pub const WHEEL_B: f64 = 0.0032;
pub const WHEEL_M: f64 = 37.98;

pub fn cart_params() -> HashMap<String, f64> {
    params(&[("M_cart", 2.0), ("m", 1.0), ("l", 1.0), ("g", G)])
}

/// Cart-pendulum with the control `N = d cos sin` and its matching `M`.
pub fn cart_new(d: f64) -> (MechanicalSystem, QuadraticControl, RstuSode) {
    let mut p = cart_params();
    p.insert("d".into(), d);
    let (sys, ctrl) = builtin("cart-pendulum", &p, Some("new")).unwrap();
    let ctrl = ctrl.unwrap();
    let sode = to_normal_form(&sys, &ctrl).unwrap();
    (sys, ctrl, sode)
}

pub fn cart_blm(kappa: f64) -> (MechanicalSystem, HashMap<String, f64>) {
    let mut p = cart_params();
    p.insert("kappa".into(), kappa);
    let (sys, _, p) = builtin_with_params("cart-pendulum", &p, Some("blm")).unwrap();
    (sys, p)
}

pub fn wheel(d1: f64) -> (MechanicalSystem, QuadraticControl, RstuSode) {
    let p = params(&[("a", WHEEL_A), ("b", WHEEL_B), ("m", WHEEL_M), ("d1", d1)]);
    let (sys, ctrl) = builtin("inertia-wheel", &p, Some("sine")).unwrap();
    let ctrl = ctrl.unwrap();
    let sode = to_normal_form(&sys, &ctrl).unwrap();
    (sys, ctrl, sode)
}

/// Cart constants `(α, β, γ, δ)` for `M_cart = 2`, `m = l = 1`.
pub const CART: (f64, f64, f64, f64) = (1.0, 1.0, 3.0, -G);

/// Closed-form `M(φ)` of the cart control `N = d cos φ sin φ`.
pub fn cart_m(d: f64, phi: f64) -> f64 {
    let (al, be, ga, de) = CART;
    -d * (2.0 * be * be * de - 2.0 * al * ga * de
        + al * be * d
        + be * (2.0 * be * de + al * d) * (2.0 * phi).cos())
        * phi.sin()
        / (de * (2.0 * ga * de + be * d + be * d * (2.0 * phi).cos()))
}

/// `(T, U, R, S)` of the cart for a control `u = M ẏ² + N`, from the
/// hand-inverted metric.
pub fn cart_tusr(phi: f64, m: f64, n: f64) -> [f64; 4] {
    let (al, be, ga, de) = CART;
    let (s, c) = phi.sin_cos();
    let det = al * ga - be * be * c * c;
    let (i11, i12, i22) = (al / det, -be * c / det, ga / det);
    // a12' = −β sin, a22' = 0, V' = δ sin
    let q = m + be * s;
    let w = -de * s;
    [i11 * q, i12 * w + i11 * n, i12 * q, i22 * w + i12 * n]
}

/// `(T, U, R, S)` of the wheel with `N = d1 sin θ`, `M = 0`.
pub fn wheel_tusr(d1: f64, th: f64) -> [f64; 4] {
    let (a, b, m) = (WHEEL_A, WHEEL_B, WHEEL_M);
    [
        0.0,
        (-a * d1 + b * m) * th.sin() / (b * (b - a)),
        0.0,
        (m - d1) * th.sin() / (a - b),
    ]
}

/// Central differences of order 4.
pub fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

pub fn d2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

/// `(Φ¹₂, Φ²₂)` from closed-form coefficients and finite differences.
pub fn phi_oracle<F: Fn(f64) -> [f64; 4]>(tusr: F, y: f64) -> (f64, f64) {
    let [t, _, r, s] = tusr(y);
    let du = d1(|z| tusr(z)[1], y, 1e-3);
    let ds = d1(|z| tusr(z)[3], y, 1e-3);
    (-du + s * t, -ds + r * s)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
