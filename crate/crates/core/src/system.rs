//! Mechanical systems with a cyclic coordinate `x`, quadratic feedback
//! controls `u = M(y) ẏ² + N(y)`, and their normal form
//! `ẍ = T ẏ² + U`, `ÿ = R ẏ² + S`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, EvalError, Result};
use crate::expr::{parse_with, Expr, Jet2};
use crate::table::HermiteTable;

/// Open working interval `(lo, hi)` for the shape coordinate `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < 0.0 && 0.0 < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval(lo, hi))
        }
    }

    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo < y && y < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Midpoints of `n` equal cells; never touches the endpoints.
    pub fn cell_centers(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let h = self.width() / n as f64;
        (0..n).map(move |k| self.lo + (k as f64 + 0.5) * h)
    }

    pub fn shrink(&self, factor: f64) -> Self {
        Self {
            lo: self.lo * factor,
            hi: self.hi * factor,
        }
    }
}

/// Upper-index components `a^{ij}` of the inverse kinetic metric, as jets.
#[derive(Debug, Clone, Copy)]
pub struct InverseMetric {
    pub a11: Jet2,
    pub a12: Jet2,
    pub a22: Jet2,
}

/// `L = ½(a11 ẋ² + 2 a12(y) ẋẏ + a22(y) ẏ²) − V(y)` with constant `a11`.
#[derive(Debug, Clone)]
pub struct MechanicalSystem {
    a11: f64,
    a12: Expr,
    a22: Expr,
    potential: Expr,
    // first derivatives, so that the normal form carries two exact derivatives
    da12: Expr,
    da22: Expr,
    dpotential: Expr,
    interval: Interval,
}

const METRIC_PROBES: usize = 257;

impl MechanicalSystem {
    pub fn new(
        a11: f64,
        a12: Expr,
        a22: Expr,
        potential: Expr,
        interval: Interval,
    ) -> Result<Self> {
        if a11 == 0.0 || !a11.is_finite() {
            return Err(Error::ZeroA11);
        }
        let sys = Self {
            a11,
            da12: a12.derivative(),
            da22: a22.derivative(),
            dpotential: potential.derivative(),
            a12,
            a22,
            potential,
            interval,
        };
        // det a keeps one sign across the interval
        let mut sign = 0.0;
        for y in interval.cell_centers(METRIC_PROBES) {
            let d = sys.det(y)?;
            if d == 0.0 || (sign != 0.0 && d.signum() != sign) {
                return Err(Error::SingularMetric { y });
            }
            sign = d.signum();
        }
        Ok(sys)
    }

    pub fn a11(&self) -> f64 {
        self.a11
    }

    pub fn a12(&self) -> &Expr {
        &self.a12
    }

    pub fn a22(&self) -> &Expr {
        &self.a22
    }

    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    /// `(a12', a22', V')` as expressions.
    pub fn derivatives(&self) -> (&Expr, &Expr, &Expr) {
        (&self.da12, &self.da22, &self.dpotential)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn with_interval(mut self, interval: Interval) -> Self {
        self.interval = interval;
        self
    }

    pub fn det(&self, y: f64) -> Result<f64> {
        let a12 = self.a12.eval(y)?;
        Ok(self.a11 * self.a22.eval(y)? - a12 * a12)
    }

    pub fn inverse_metric(&self, y: f64) -> Result<InverseMetric> {
        let a12 = self.a12.eval2(y)?;
        let a22 = self.a22.eval2(y)?;
        let det = a22.scale(self.a11) - a12 * a12;
        if det.value == 0.0 {
            return Err(Error::SingularMetric { y });
        }
        Ok(InverseMetric {
            a11: a22 / det,
            a12: -(a12 / det),
            a22: Jet2::constant(self.a11) / det,
        })
    }

    /// Jets of `a12'`, `a22'` and `V'`.
    pub fn force_jets(&self, y: f64) -> Result<(Jet2, Jet2, Jet2), EvalError> {
        Ok((
            self.da12.eval2(y)?,
            self.da22.eval2(y)?,
            self.dpotential.eval2(y)?,
        ))
    }

    /// Normal-form coefficients for a control whose `M` and `N` jets at `y`
    /// are given.
    pub fn normal_form_at(&self, y: f64, m: Jet2, n: Jet2) -> Result<Rstu> {
        let inv = self.inverse_metric(y)?;
        let (da12, da22, dv) = self.force_jets(y)?;
        let p = da22.scale(-0.5);
        let q = m - da12;
        let w = -dv;
        Ok(Rstu {
            t: inv.a12 * p + inv.a11 * q,
            u: inv.a12 * w + inv.a11 * n,
            r: inv.a22 * p + inv.a12 * q,
            s: inv.a22 * w + inv.a12 * n,
        })
    }
}

/// A scalar function of `y` usable as a control component.
#[derive(Debug, Clone)]
pub enum Profile {
    Expr(Expr),
    Table(Arc<HermiteTable>),
}

impl Profile {
    pub fn jet(&self, y: f64) -> Result<Jet2, EvalError> {
        match self {
            Profile::Expr(e) => e.eval2(y),
            Profile::Table(t) => t.jet(y),
        }
    }

    pub fn zero() -> Self {
        Profile::Expr(Expr::Const(0.0))
    }
}

impl From<Expr> for Profile {
    fn from(e: Expr) -> Self {
        Profile::Expr(e)
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Profile::Expr(e) => write!(f, "{e}"),
            Profile::Table(t) => write!(f, "<table of {} nodes>", t.nodes().len()),
        }
    }
}

/// `u = M(y) ẏ² + N(y)`.
#[derive(Debug, Clone)]
pub struct QuadraticControl {
    pub m: Profile,
    pub n: Profile,
}

impl QuadraticControl {
    pub fn new(m: impl Into<Profile>, n: impl Into<Profile>) -> Self {
        Self {
            m: m.into(),
            n: n.into(),
        }
    }

    pub fn zero() -> Self {
        Self {
            m: Profile::zero(),
            n: Profile::zero(),
        }
    }

    pub fn value(&self, y: f64, ydot: f64) -> Result<f64, EvalError> {
        Ok(self.m.jet(y)?.value * ydot * ydot + self.n.jet(y)?.value)
    }
}

/// Coefficient jets of the normal form at one `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rstu {
    pub t: Jet2,
    pub u: Jet2,
    pub r: Jet2,
    pub s: Jet2,
}

#[derive(Debug, Clone)]
enum SodeKind {
    Controlled {
        sys: Arc<MechanicalSystem>,
        control: QuadraticControl,
    },
    Explicit {
        t: Expr,
        u: Expr,
        r: Expr,
        s: Expr,
    },
}

/// `ẍ = T(y) ẏ² + U(y)`, `ÿ = R(y) ẏ² + S(y)` on a working interval.
#[derive(Debug, Clone)]
pub struct RstuSode {
    kind: SodeKind,
    interval: Interval,
}

impl RstuSode {
    /// A SODE given directly by its four coefficient functions.
    pub fn explicit(t: Expr, u: Expr, r: Expr, s: Expr, interval: Interval) -> Self {
        Self {
            kind: SodeKind::Explicit { t, u, r, s },
            interval,
        }
    }

    pub fn coefficients(&self, y: f64) -> Result<Rstu> {
        match &self.kind {
            SodeKind::Controlled { sys, control } => {
                sys.normal_form_at(y, control.m.jet(y)?, control.n.jet(y)?)
            }
            SodeKind::Explicit { t, u, r, s } => Ok(Rstu {
                t: t.eval2(y)?,
                u: u.eval2(y)?,
                r: r.eval2(y)?,
                s: s.eval2(y)?,
            }),
        }
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn with_interval(mut self, interval: Interval) -> Self {
        self.interval = interval;
        self
    }

    pub fn system(&self) -> Option<&MechanicalSystem> {
        match &self.kind {
            SodeKind::Controlled { sys, .. } => Some(sys),
            SodeKind::Explicit { .. } => None,
        }
    }

    pub fn control(&self) -> Option<&QuadraticControl> {
        match &self.kind {
            SodeKind::Controlled { control, .. } => Some(control),
            SodeKind::Explicit { .. } => None,
        }
    }

    /// `(ẍ, ÿ)` of the uncontrolled-by-`u₂` flow.
    pub fn accel(&self, y: f64, ydot: f64) -> Result<(f64, f64)> {
        let c = self.coefficients(y)?;
        let v2 = ydot * ydot;
        Ok((c.t.value * v2 + c.u.value, c.r.value * v2 + c.s.value))
    }
}

/// Normal form of `d/dt ∂L/∂ẋ = u`, `d/dt ∂L/∂ẏ − ∂L/∂y = 0` under `u`.
pub fn to_normal_form(sys: &MechanicalSystem, u: &QuadraticControl) -> Result<RstuSode> {
    for y in sys.interval.cell_centers(METRIC_PROBES) {
        sys.inverse_metric(y)?;
    }
    Ok(RstuSode {
        kind: SodeKind::Controlled {
            sys: Arc::new(sys.clone()),
            control: u.clone(),
        },
        interval: sys.interval,
    })
}

pub const BUILTINS: [&str; 2] = ["cart-pendulum", "inertia-wheel"];

/// Margin applied to the admissible half-width of the BLM cart control, whose
/// denominator vanishes at the interval ends.
pub const BLM_MARGIN: f64 = 0.85;

fn require(params: &HashMap<String, f64>, name: &str) -> Result<f64> {
    params
        .get(name)
        .copied()
        .ok_or_else(|| Error::MissingParameter(name.to_string()))
}

fn positive(params: &HashMap<String, f64>, name: &str) -> Result<f64> {
    let v = require(params, name)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter {
            name: name.into(),
            reason: "must be positive".into(),
        })
    }
}

fn expr(src: &str, params: &HashMap<String, f64>) -> Result<Expr> {
    Ok(parse_with(src, params)?)
}

/// Builtin systems and their closed-form controls.
///
/// * `cart-pendulum` (params `M_cart`, `m`, `l`, `g`; `x = s`, `y = φ`), with
///   controls `new` (param `d`) and `blm` (param `kappa`).
/// * `inertia-wheel` (params `a`, `b`, `m`; `x = φ`, `y = θ`), with control
///   `sine` (param `d1`).
///
/// The returned parameter map adds the derived constants (`alpha`, `beta`,
/// `gamma`, `delta` for the cart).
pub fn builtin(
    name: &str,
    params: &HashMap<String, f64>,
    control: Option<&str>,
) -> Result<(MechanicalSystem, Option<QuadraticControl>)> {
    let (sys, ctrl, _) = builtin_with_params(name, params, control)?;
    Ok((sys, ctrl))
}

pub fn builtin_with_params(
    name: &str,
    params: &HashMap<String, f64>,
    control: Option<&str>,
) -> Result<(
    MechanicalSystem,
    Option<QuadraticControl>,
    HashMap<String, f64>,
)> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    let mut p = params.clone();
    match name {
        "cart-pendulum" => {
            let cart = positive(params, "M_cart")?;
            let m = positive(params, "m")?;
            let l = positive(params, "l")?;
            let g = positive(params, "g")?;
            let (alpha, beta, gamma, delta) = (m * l * l, m * l, cart + m, -m * g * l);
            p.insert("alpha".into(), alpha);
            p.insert("beta".into(), beta);
            p.insert("gamma".into(), gamma);
            p.insert("delta".into(), delta);
            let mut interval = Interval::symmetric(FRAC_PI_4)?;
            let ctrl = match control {
                None => None,
                Some("new") => {
                    require(params, "d")?;
                    Some(QuadraticControl::new(
                        expr(
                            "-$d*(2*$beta^2*$delta - 2*$alpha*$gamma*$delta + $alpha*$beta*$d \
                             + $beta*(2*$beta*$delta + $alpha*$d)*cos(2*y))*sin(y) \
                             / ($delta*(2*$gamma*$delta + $beta*$d + $beta*$d*cos(2*y)))",
                            &p,
                        )?,
                        expr("$d*cos(y)*sin(y)", &p)?,
                    ))
                }
                Some("blm") => {
                    let kappa = require(params, "kappa")?;
                    let ratio = cart / m;
                    if kappa > ratio {
                        let phi_max = ((kappa - ratio) / (1.0 + kappa)).sqrt().asin();
                        interval = Interval::symmetric(BLM_MARGIN * phi_max.min(FRAC_PI_4))?;
                    }
                    let den = "($alpha - $beta^2/$gamma*(1+$kappa)*cos(y)^2)";
                    Some(QuadraticControl::new(
                        expr(&format!("$kappa*$beta*$alpha*sin(y)/{den}"), &p)?,
                        expr(&format!("$kappa*$beta*$delta*cos(y)*sin(y)/{den}"), &p)?,
                    ))
                }
                Some(other) => return Err(Error::UnknownBuiltin(format!("{name}/{other}"))),
            };
            let sys = MechanicalSystem::new(
                gamma,
                expr("$beta*cos(y)", &p)?,
                expr("$alpha", &p)?,
                expr("-$delta*cos(y)", &p)?,
                interval,
            )?;
            Ok((sys, ctrl, p))
        }
        "inertia-wheel" => {
            let a = positive(params, "a")?;
            let b = positive(params, "b")?;
            positive(params, "m")?;
            if a <= b {
                return Err(Error::InvalidParameter {
                    name: "a".into(),
                    reason: "must exceed b".into(),
                });
            }
            let ctrl = match control {
                None => None,
                Some("sine") => {
                    require(params, "d1")?;
                    Some(QuadraticControl::new(
                        Expr::Const(0.0),
                        expr("$d1*sin(y)", &p)?,
                    ))
                }
                Some(other) => return Err(Error::UnknownBuiltin(format!("{name}/{other}"))),
            };
            let sys = MechanicalSystem::new(
                b,
                expr("$b", &p)?,
                expr("$a", &p)?,
                expr("$m*(1+cos(y))", &p)?,
                Interval::symmetric(FRAC_PI_2)?,
            )?;
            Ok((sys, ctrl, p))
        }
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// Convenience: builds the parameter map from pairs.
pub fn params(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}
