//! Control synthesis: solving the variationality condition for `M`, the
//! closed-loop controls of the controlled-Lagrangian family, the stability
//! test, and the dissipative augmentation with its invariance check.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{self, Expr, Jet2};
use crate::geometry::jacobi;
use crate::roots::find_root_near;
use crate::sim::integrate_full;
use crate::system::{Interval, MechanicalSystem, Profile, QuadraticControl, RstuSode};
use crate::table::HermiteTable;
use crate::variational::{rank1_terms, Multiplier, VariationalityVerdict};

fn rank1_for(sys: &MechanicalSystem, y: f64, m: f64, mp: f64, n: Jet2) -> Result<f64> {
    let c = sys.normal_form_at(y, Jet2::new(m, mp, f64::NAN), n)?;
    Ok(rank1_terms(&c).iter().sum())
}

/// Solves the variationality condition for `M'` at `(y, M)`, starting the
/// search at `seed`.
fn slope(sys: &MechanicalSystem, n: &Expr, y: f64, m: f64, seed: f64) -> Result<f64> {
    let nj = n.eval2(y)?;
    let f0 = rank1_for(sys, y, m, seed, nj)?;
    if f0 == 0.0 {
        return Ok(seed);
    }
    let scale = 1.0 + seed.abs();
    find_root_near(
        |p| rank1_for(sys, y, m, p, nj).unwrap_or(f64::NAN),
        seed,
        1e-3 * scale,
        1e-13 * scale,
    )
    .ok_or(Error::RootFindFailure { y })
}

/// Integrates the first-order implicit equation for `M` given the ansatz `N`,
/// outward from `M(0) = m0` in both directions with RK4 of step `step`.
///
/// The coefficient of `M'` vanishes at the equilibrium, so each branch starts
/// one step away from 0 on the chord `M0 + c y`.
pub fn solve_m(sys: &MechanicalSystem, n: &Expr, m0: f64, step: f64) -> Result<HermiteTable> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "step".into(),
            reason: "must be positive".into(),
        });
    }
    let iv = sys.interval();
    let mut branches = Vec::new();
    for side in [-1.0, 1.0] {
        let edge = if side < 0.0 { -iv.lo } else { iv.hi };
        let h = side * step;
        // M' is stiff in M near 0 (it reacts like 1/y), so instead of
        // iterating we solve for the chord slope c with M'(h, M0 + c h) = c.
        let guess = slope(sys, n, h, m0, 0.0)?;
        let chord = |c: f64| {
            slope(sys, n, h, m0 + c * h, c)
                .map(|p| p - c)
                .unwrap_or(f64::NAN)
        };
        let mp = if chord(guess) == 0.0 {
            guess
        } else {
            find_root_near(
                chord,
                guess,
                1e-3 * (1.0 + guess.abs()),
                1e-13 * (1.0 + guess.abs()),
            )
            .ok_or(Error::RootFindFailure { y: h })?
        };
        let start_slope = mp;
        let mut ys = vec![h];
        let mut ms = vec![m0 + h * mp];
        let mut slopes = vec![slope(sys, n, h, ms[0], mp)?];
        let mut k = 1;
        while ((k + 1) as f64 * step) < edge * (1.0 - 1e-9) {
            let (y, m, seed) = (ys[k - 1], ms[k - 1], slopes[k - 1]);
            let k1 = seed;
            let k2 = slope(sys, n, y + 0.5 * h, m + 0.5 * h * k1, k1)?;
            let k3 = slope(sys, n, y + 0.5 * h, m + 0.5 * h * k2, k2)?;
            let k4 = slope(sys, n, y + h, m + h * k3, k3)?;
            let m_next = m + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            let y_next = (k + 1) as f64 * h;
            ys.push(y_next);
            slopes.push(slope(sys, n, y_next, m_next, k4)?);
            ms.push(m_next);
            k += 1;
        }
        branches.push((ys, ms, slopes, start_slope));
    }
    let (neg, pos) = (&branches[0], &branches[1]);
    let mut ys: Vec<f64> = neg.0.iter().rev().copied().collect();
    let mut ms: Vec<f64> = neg.1.iter().rev().copied().collect();
    let mut slopes: Vec<f64> = neg.2.iter().rev().copied().collect();
    ys.push(0.0);
    ms.push(m0);
    slopes.push(0.5 * (neg.3 + pos.3));
    ys.extend(&pos.0);
    ms.extend(&pos.1);
    slopes.extend(&pos.2);
    Ok(HermiteTable::new(ys, ms, slopes))
}

/// `max |rank-1|` and the largest sum of absolute term values over
/// `grid_points` cell centres of `interval`.
pub fn rank1_on_grid(
    sode: &RstuSode,
    interval: Interval,
    grid_points: usize,
) -> Result<(f64, f64)> {
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for y in interval.cell_centers(grid_points) {
        let terms = rank1_terms(&sode.coefficients(y)?);
        worst = worst.max(terms.iter().sum::<f64>().abs());
        scale = scale.max(terms.iter().map(|t| t.abs()).sum());
    }
    Ok((worst, scale))
}

/// The control of the controlled-Lagrangian family with constant parameter
/// `σ`:
///
/// `u = (1/σ)(a12' − (a12/A22)(½a22' − (1 − 1/σ)(a12/a11)a12'))ẏ² − (1/σ)(a12/A22)V'`
/// with `A22 = a22 − (a12²/a11)(1 − 1/σ)`.
pub fn cbloch(sys: &MechanicalSystem, sigma: f64) -> Result<QuadraticControl> {
    if sigma == 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidParameter {
            name: "sigma".into(),
            reason: "must be finite and non-zero".into(),
        });
    }
    let c = |v: f64| Expr::Const(v);
    let a11 = sys.a11();
    let k = 1.0 - 1.0 / sigma;
    let (da12, da22, dv) = sys.derivatives();
    let (a12, a22) = (sys.a12().clone(), sys.a22().clone());
    let big_a22 = expr::sub(
        a22,
        expr::mul(c(k / a11), expr::mul(a12.clone(), a12.clone())),
    );
    let ratio = expr::div(a12.clone(), big_a22);
    let inner = expr::sub(
        expr::mul(c(0.5), da22.clone()),
        expr::mul(c(k / a11), expr::mul(a12, da12.clone())),
    );
    let m = expr::mul(
        c(1.0 / sigma),
        expr::sub(da12.clone(), expr::mul(ratio.clone(), inner)),
    );
    let n = expr::mul(c(-1.0 / sigma), expr::mul(ratio, dv.clone()));
    Ok(QuadraticControl::new(m, n))
}

/// `A22` of [`cbloch`] at `y`.
pub fn cbloch_denominator(sys: &MechanicalSystem, sigma: f64, y: f64) -> Result<f64> {
    let a12 = sys.a12().eval(y)?;
    Ok(sys.a22().eval(y)? - a12 * a12 / sys.a11() * (1.0 - 1.0 / sigma))
}

const DENOMINATOR_PROBES: usize = 1024;

/// [`cbloch`] with `σ = −1/κ`. Fails when the denominator changes sign
/// inside the working interval of `sys`.
pub fn blm_control(sys: &MechanicalSystem, kappa: f64) -> Result<QuadraticControl> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(Error::InvalidParameter {
            name: "kappa".into(),
            reason: "must be finite and non-zero".into(),
        });
    }
    checked_cbloch(sys, -1.0 / kappa)
}

/// [`cbloch`], failing when its denominator changes sign or vanishes inside
/// the working interval of `sys` (0 included).
pub fn checked_cbloch(sys: &MechanicalSystem, sigma: f64) -> Result<QuadraticControl> {
    let control = cbloch(sys, sigma)?;
    if cbloch_denominator(sys, sigma, 0.0)? == 0.0 {
        return Err(Error::DenominatorVanishes { y: 0.0 });
    }
    let mut prev: Option<f64> = None;
    for y in sys.interval().cell_centers(DENOMINATOR_PROBES) {
        let d = cbloch_denominator(sys, sigma, y)?;
        if d == 0.0 || prev.is_some_and(|p| p.signum() != d.signum()) {
            return Err(Error::DenominatorVanishes { y });
        }
        prev = Some(d);
    }
    Ok(control)
}

/// Largest interval around 0, inside the working interval of `sys`, on which
/// the denominator of [`blm_control`] keeps its sign.
pub fn blm_admissible_interval(sys: &MechanicalSystem, kappa: f64) -> Result<Interval> {
    let sigma = -1.0 / kappa;
    let den = |y: f64| cbloch_denominator(sys, sigma, y);
    let d0 = den(0.0)?;
    if d0 == 0.0 {
        return Err(Error::DenominatorVanishes { y: 0.0 });
    }
    let iv = sys.interval();
    let mut ends = [iv.lo, iv.hi];
    for (i, edge) in [iv.lo, iv.hi].into_iter().enumerate() {
        let n = 4096;
        let mut inside = 0.0;
        for k in 1..=n {
            let y = edge * k as f64 / n as f64;
            if k == n && den(y).map(|d| d.signum() == d0.signum()).unwrap_or(false) {
                break;
            }
            let same = den(y)
                .map(|d| d != 0.0 && d.signum() == d0.signum())
                .unwrap_or(false);
            if !same {
                // bisect between the last good point and y
                let (mut a, mut b) = (inside, y);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid == a || mid == b {
                        break;
                    }
                    if den(mid)
                        .map(|d| d != 0.0 && d.signum() == d0.signum())
                        .unwrap_or(false)
                    {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                ends[i] = b;
                break;
            }
            inside = y;
        }
    }
    Interval::new(ends[0], ends[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub equilibrium_ok: bool,
    pub phi22_nonzero: bool,
    pub variational: bool,
    pub s0: f64,
    pub u0: f64,
    pub s_prime_0: f64,
    pub phi22_0: f64,
    pub stable: bool,
    pub notes: Vec<String>,
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}",
            if self.stable {
                "stable relative equilibrium at y = 0"
            } else {
                "stability not established"
            }
        )?;
        writeln!(
            f,
            "  S(0) = {:.6e}, U(0) = {:.6e} (equilibrium {})",
            self.s0,
            self.u0,
            if self.equilibrium_ok { "ok" } else { "missing" }
        )?;
        writeln!(f, "  S'(0) = {:.12}", self.s_prime_0)?;
        writeln!(f, "  Phi^2_2(0) = {:.6e}", self.phi22_0)?;
        writeln!(f, "  variational: {}", self.variational)?;
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

/// Checks the hypotheses of the energy argument at `y = 0`: variational,
/// `Φ²₂(0) ≠ 0`, `S(0) = U(0) = 0` and `S'(0) < 0`. Failures are reported,
/// never raised.
pub fn stability_report(sode: &RstuSode, verdict: &VariationalityVerdict) -> StabilityReport {
    let mut r = StabilityReport {
        equilibrium_ok: false,
        phi22_nonzero: false,
        variational: verdict.is_variational,
        s0: f64::NAN,
        u0: f64::NAN,
        s_prime_0: f64::NAN,
        phi22_0: f64::NAN,
        stable: false,
        notes: Vec::new(),
    };
    if !verdict.is_variational {
        r.notes
            .push("the controlled system is not variational".into());
    }
    match sode.coefficients(0.0) {
        Ok(c) => {
            r.s0 = c.s.value;
            r.u0 = c.u.value;
            r.s_prime_0 = c.s.d1;
            let slack = 1e-9 * (1.0 + c.s.d1.abs() + c.u.d1.abs());
            r.equilibrium_ok = c.s.value.abs() <= slack && c.u.value.abs() <= slack;
            if !r.equilibrium_ok {
                r.notes.push("y = 0 is not an equilibrium".into());
            }
        }
        Err(e) => r
            .notes
            .push(format!("coefficients undefined at y = 0: {e}")),
    }
    match jacobi(sode, 0.0) {
        Ok((p12, p22)) => {
            r.phi22_0 = p22;
            r.phi22_nonzero = p22.abs() > 1e-9 * (1.0 + p12.abs());
            if !r.phi22_nonzero {
                r.notes.push("Phi^2_2 vanishes at the equilibrium".into());
            }
        }
        Err(e) => r.notes.push(format!("Phi undefined at y = 0: {e}")),
    }
    if r.s_prime_0.is_nan() || r.s_prime_0 >= 0.0 {
        r.notes
            .push(format!("S'(0) = {:e} is not negative", r.s_prime_0));
    }
    r.stable = r.variational && r.equilibrium_ok && r.phi22_nonzero && r.s_prime_0 < 0.0;
    r
}

/// `(□, ◇) = (g11 a¹¹ + g12 a¹², g12 a¹¹ + g22 a¹²)`.
pub fn dissipative_terms(sys: &MechanicalSystem, mult: &Multiplier, y: f64) -> Result<(f64, f64)> {
    let inv = sys.inverse_metric(y)?;
    let g = mult.metric(y)?;
    let (i11, i12) = (inv.a11.value, inv.a12.value);
    Ok((
        g.g11 * i11 + g.g12.value * i12,
        g.g12.value * i11 + g.g22.value * i12,
    ))
}

/// Extra control `u₂ = f(x, y)(□ẋ + ◇ẏ)` with dissipation function
/// `D = (f/2)(□ẋ + ◇ẏ)²`.
#[derive(Debug, Clone)]
pub struct DissipativeAugmentation {
    sys: Arc<MechanicalSystem>,
    mult: Multiplier,
    f: Expr,
    strictly_negative: bool,
}

/// Region on which `f` is sampled for its sign.
const F_PROBE_X: (f64, f64, usize) = (-10.0, 10.0, 41);
const F_PROBE_Y: usize = 64;

pub fn build_dissipative(
    sys: &MechanicalSystem,
    mult: &Multiplier,
    f: Expr,
) -> Result<DissipativeAugmentation> {
    let (x0, x1, nx) = F_PROBE_X;
    let mut strictly_negative = true;
    for i in 0..nx {
        let x = x0 + (x1 - x0) * i as f64 / (nx - 1) as f64;
        for y in mult.interval().cell_centers(F_PROBE_Y) {
            let v = f.eval_xy(x, y)?;
            if v > 0.0 {
                return Err(Error::FNotNegative { x, y });
            }
            strictly_negative &= v < 0.0;
        }
    }
    Ok(DissipativeAugmentation {
        sys: Arc::new(sys.clone()),
        mult: mult.clone(),
        f,
        strictly_negative,
    })
}

impl DissipativeAugmentation {
    pub fn multiplier(&self) -> &Multiplier {
        &self.mult
    }

    pub fn system(&self) -> &MechanicalSystem {
        &self.sys
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    /// `f < 0` at every sample (rather than `f ≤ 0`).
    pub fn strictly_negative(&self) -> bool {
        self.strictly_negative
    }

    pub fn box_diamond(&self, y: f64) -> Result<(f64, f64)> {
        dissipative_terms(&self.sys, &self.mult, y)
    }

    pub fn u2(&self, x: f64, y: f64, xdot: f64, ydot: f64) -> Result<f64> {
        let (bx, dm) = self.box_diamond(y)?;
        Ok(self.f.eval_xy(x, y)? * (bx * xdot + dm * ydot))
    }

    pub fn dissipation(&self, x: f64, y: f64, xdot: f64, ydot: f64) -> Result<f64> {
        let (bx, dm) = self.box_diamond(y)?;
        let w = bx * xdot + dm * ydot;
        Ok(0.5 * self.f.eval_xy(x, y)? * w * w)
    }

    /// `(∂D/∂ẋ, ∂D/∂ẏ)`.
    pub fn dissipation_gradient(&self, x: f64, y: f64, xdot: f64, ydot: f64) -> Result<(f64, f64)> {
        let (bx, dm) = self.box_diamond(y)?;
        let u2 = self.u2(x, y, xdot, ydot)?;
        Ok((u2 * bx, u2 * dm))
    }

    /// `(a¹¹u₂, a¹²u₂)`, the change in `(ẍ, ÿ)`.
    pub fn acceleration(&self, x: f64, y: f64, xdot: f64, ydot: f64) -> Result<(f64, f64)> {
        let inv = self.sys.inverse_metric(y)?;
        let u2 = self.u2(x, y, xdot, ydot)?;
        Ok((inv.a11.value * u2, inv.a12.value * u2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaSalleVerdict {
    AsymptoticallyStable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaSalleReport {
    pub verdict: LaSalleVerdict,
    pub constant_coefficients: bool,
    /// Smallest `|□U + ◇S|` on the grid, relative to `|□U| + |◇S|`, in the
    /// constant-coefficient test.
    pub min_relative_forcing: Option<f64>,
    pub starts: usize,
    pub starts_staying: usize,
    pub note: String,
}

impl fmt::Display for LaSalleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.verdict {
            LaSalleVerdict::AsymptoticallyStable => "asymptotically stable",
            LaSalleVerdict::Inconclusive => "inconclusive",
        };
        writeln!(f, "invariance check: {v}")?;
        writeln!(f, "  {}", self.note)
    }
}

const CONSTANT_VARIATION: f64 = 1e-10;
const LASALLE_STARTS: usize = 50;

/// Looks for solutions other than the equilibrium inside `□ẋ + ◇ẏ = 0`.
///
/// With constant `□`, `◇` and `□T + ◇R ≡ 0`, such a solution needs
/// `□U + ◇S = 0`, so a forcing that vanishes only at `y = 0` proves
/// asymptotic stability. Otherwise trajectories of the undamped flow are
/// started on the set and followed; this can only ever be inconclusive.
pub fn lasalle_check(
    sode: &RstuSode,
    mult: &Multiplier,
    sys: &MechanicalSystem,
    grid_points: usize,
) -> Result<LaSalleReport> {
    if grid_points < 16 {
        return Err(Error::GridTooSmall {
            min: 16,
            got: grid_points,
        });
    }
    let ys: Vec<f64> = sode.interval().cell_centers(grid_points).collect();
    let mut bd = Vec::with_capacity(ys.len());
    for &y in &ys {
        bd.push(dissipative_terms(sys, mult, y)?);
    }
    let variation = |vals: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = vals.collect();
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        let mag = lo.abs().max(hi.abs());
        if mag == 0.0 {
            0.0
        } else {
            (hi - lo) / mag
        }
    };
    let constant = variation(&mut bd.iter().map(|p| p.0)) < CONSTANT_VARIATION
        && variation(&mut bd.iter().map(|p| p.1)) < CONSTANT_VARIATION;

    if constant {
        let (bx, dm) = bd[0];
        let mut min_rel = f64::INFINITY;
        let mut quadratic_ok = true;
        let mut forcing_scale = 0.0f64;
        for &y in &ys {
            let c = sode.coefficients(y)?;
            let q = bx * c.u.value + dm * c.s.value;
            let qs = (bx * c.u.value).abs() + (dm * c.s.value).abs();
            let p = bx * c.t.value + dm * c.r.value;
            let ps = (bx * c.t.value).abs() + (dm * c.r.value).abs();
            quadratic_ok &= p.abs() <= 1e-9 * ps.max(f64::MIN_POSITIVE) || p == 0.0;
            forcing_scale = forcing_scale.max(qs);
            min_rel = min_rel.min(if qs > 0.0 { q.abs() / qs } else { 0.0 });
        }
        if forcing_scale == 0.0 {
            return Ok(LaSalleReport {
                verdict: LaSalleVerdict::Inconclusive,
                constant_coefficients: true,
                min_relative_forcing: Some(0.0),
                starts: 0,
                starts_staying: 0,
                note: "box U + diamond S vanishes identically; every state with box xdot + diamond ydot = 0 may be invariant".into(),
            });
        }
        if quadratic_ok {
            let verdict = if min_rel > 1e-9 {
                LaSalleVerdict::AsymptoticallyStable
            } else {
                LaSalleVerdict::Inconclusive
            };
            let note = match verdict {
                LaSalleVerdict::AsymptoticallyStable => format!(
                    "box = {bx:.6e}, diamond = {dm:.6e} constant; box U + diamond S nonzero off y = 0 (min relative size {min_rel:.3e})"
                ),
                LaSalleVerdict::Inconclusive => format!("box U + diamond S nearly vanishes away from y = 0 (min relative size {min_rel:.3e})"),
            };
            return Ok(LaSalleReport {
                verdict,
                constant_coefficients: true,
                min_relative_forcing: Some(min_rel),
                starts: 0,
                starts_staying: 0,
                note,
            });
        }
    }

    // trajectory sampling on the set box xdot + diamond ydot = 0
    let iv = sode.interval();
    let mut staying = 0;
    for k in 0..LASALLE_STARTS {
        let frac = (k as f64 + 0.5) / LASALLE_STARTS as f64;
        let y0 = 0.5 * (iv.lo + frac * iv.width());
        let ydot0 = 0.05 * if k % 2 == 0 { 1.0 } else { -1.0 };
        let (bx, dm) = dissipative_terms(sys, mult, y0)?;
        if bx == 0.0 {
            continue;
        }
        let xdot0 = -dm * ydot0 / bx;
        let traj = match integrate_full(sode, None, None, [0.0, y0, xdot0, ydot0], 1.0, 1e-3) {
            Ok(t) => t,
            Err(Error::LeftWorkingInterval { .. }) => continue,
            Err(e) => return Err(e),
        };
        let mut stays = true;
        for i in 0..traj.len() {
            let (bx, dm) = dissipative_terms(sys, mult, traj.y(i))?;
            let (a, b) = (bx * traj.xdot(i), dm * traj.ydot(i));
            if (a + b).abs() > 1e-6 * (a.abs() + b.abs()).max(1e-300) {
                stays = false;
                break;
            }
        }
        staying += usize::from(stays);
    }
    let note = if staying == 0 {
        format!("box and diamond are not constant; no invariant set found over {LASALLE_STARTS} sampled starts")
    } else {
        format!("box and diamond are not constant; {staying} of {LASALLE_STARTS} sampled starts stayed in the zero-dissipation set")
    };
    Ok(LaSalleReport {
        verdict: LaSalleVerdict::Inconclusive,
        constant_coefficients: constant,
        min_relative_forcing: None,
        starts: LASALLE_STARTS,
        starts_staying: staying,
        note,
    })
}

/// A control with a tabulated `M` and the ansatz `N`.
pub fn tabulated_control(m: HermiteTable, n: Expr) -> QuadraticControl {
    QuadraticControl {
        m: Profile::Table(Arc::new(m)),
        n: Profile::Expr(n),
    }
}
