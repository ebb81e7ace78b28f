//! Variationality of the normal form, the multiplier `g`, its potential and
//! energy, and numerical Helmholtz residuals.

use crate::error::{Error, Result};
use crate::expr::Jet2;
use crate::geometry::{jacobi, jacobi_slopes};
use crate::quadrature::simpson;
use crate::system::{Interval, Rstu, RstuSode};

/// The terms whose sum must vanish for the normal form to be variational
/// (with `Φ²₂ ≠ 0`).
pub(crate) fn rank1_terms(c: &Rstu) -> [f64; 12] {
    let (t, u, r, s) = (c.t, c.u, c.r, c.s);
    [
        2.0 * t.value * s.d1 * s.d1,
        s.value * s.value * t.value * r.d1,
        -s.value * s.value * r.value * t.d1,
        -2.0 * r.value * s.d1 * u.d1,
        u.d1 * s.d2,
        -s.d1 * u.d2,
        s.value * s.d1 * t.d1,
        s.value * r.value * r.value * u.d1,
        -s.value * r.d1 * u.d1,
        -s.value * t.value * s.d2,
        -s.value * r.value * t.value * s.d1,
        s.value * r.value * u.d2,
    ]
}

pub fn rank1_residual(sode: &RstuSode, y: f64) -> Result<f64> {
    Ok(rank1_terms(&sode.coefficients(y)?).iter().sum())
}

/// Residual together with the sum of the absolute values of its terms.
pub fn rank1_with_scale(sode: &RstuSode, y: f64) -> Result<(f64, f64)> {
    let terms = rank1_terms(&sode.coefficients(y)?);
    Ok((terms.iter().sum(), terms.iter().map(|t| t.abs()).sum()))
}

/// Below this `|Φ²₂|` relative to `1 + |Φ¹₂|`, `ν` is reported as undefined.
const NU_FLOOR: f64 = 1e-12;

/// `ν = Φ¹₂ / Φ²₂`.
pub fn nu(sode: &RstuSode, y: f64) -> Result<f64> {
    let (p12, p22) = jacobi(sode, y)?;
    if p22.abs() <= NU_FLOOR * (1.0 + p12.abs()) {
        return Err(Error::Phi22Vanishes { y });
    }
    Ok(p12 / p22)
}

/// `ν` and `ν'`, plus a magnitude against which `ν'` can be compared. The
/// second derivative is not available and is `NaN`.
fn nu_with_slope(sode: &RstuSode, y: f64) -> Result<(Jet2, f64)> {
    let (p12, p22) = jacobi(sode, y)?;
    if p22.abs() <= NU_FLOOR * (1.0 + p12.abs()) {
        return Err(Error::Phi22Vanishes { y });
    }
    let (q12, q22) = jacobi_slopes(sode, y)?;
    let d1 = (q12 * p22 - q22 * p12) / (p22 * p22);
    let scale = ((q12 * p22).abs() + (q22 * p12).abs()) / (p22 * p22);
    Ok((Jet2::new(p12 / p22, d1, f64::NAN), scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `Φ²₂` vanishes on the whole grid: always variational.
    Phi22Zero,
    /// The three equivalent criteria were evaluated.
    EquivalentCriteria,
}

/// Maximum of a residual over the grid, normalized by the magnitude of its
/// terms, with the unnormalized maximum alongside.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualMax {
    pub relative: f64,
    pub absolute: f64,
}

impl ResidualMax {
    fn update(&mut self, value: f64, scale: f64) {
        let rel = if scale > 0.0 {
            value.abs() / scale
        } else {
            0.0
        };
        self.relative = self.relative.max(rel);
        self.absolute = self.absolute.max(value.abs());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalityVerdict {
    pub is_variational: bool,
    pub branch: Branch,
    pub rank1: ResidualMax,
    /// `(U − νS)'`.
    pub potential: ResidualMax,
    /// `ν' − (T − Rν)`.
    pub nu_transport: ResidualMax,
    pub min_abs_phi22: f64,
    pub tol: f64,
    pub grid_points: usize,
}

impl VariationalityVerdict {
    /// Per-criterion verdicts `(rank-1, (U − νS)', ν' − (T − Rν))`.
    pub fn criteria(&self) -> (bool, bool, bool) {
        (
            self.rank1.relative <= self.tol,
            self.potential.relative <= self.tol,
            self.nu_transport.relative <= self.tol,
        )
    }
}

impl std::fmt::Display for VariationalityVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let word = if self.is_variational {
            "variational"
        } else {
            "not variational"
        };
        match self.branch {
            Branch::Phi22Zero => writeln!(f, "{word} (Phi^2_2 vanishes on the grid)"),
            Branch::EquivalentCriteria => {
                writeln!(
                    f,
                    "{word} over {} grid points (tol {:.1e})",
                    self.grid_points, self.tol
                )?;
                for (name, r) in [
                    ("rank-1", self.rank1),
                    ("(U-nu S)'", self.potential),
                    ("nu'-(T-R nu)", self.nu_transport),
                ] {
                    writeln!(
                        f,
                        "  {name:<13} relative {:.3e}  absolute {:.3e}",
                        r.relative, r.absolute
                    )?;
                }
                writeln!(f, "  min |Phi^2_2| {:.3e}", self.min_abs_phi22)
            }
        }
    }
}

/// Decides variationality on `grid_points` cell centres. Each criterion is
/// accepted when its normalized residual stays below `tol`; criteria that
/// disagree by more than a factor ten around `tol` raise
/// [`Error::InconsistentCriteria`].
pub fn variational_check(
    sode: &RstuSode,
    grid_points: usize,
    tol: f64,
) -> Result<VariationalityVerdict> {
    let verdict = criteria_on_grid(sode, grid_points, tol)?;
    if verdict.branch == Branch::EquivalentCriteria {
        let rels = [
            verdict.rank1.relative,
            verdict.potential.relative,
            verdict.nu_transport.relative,
        ];
        let any_pass = rels.iter().any(|&r| r <= tol);
        let any_clear_fail = rels.iter().any(|&r| r > 10.0 * tol);
        if any_pass && any_clear_fail {
            return Err(Error::InconsistentCriteria {
                rank1: rels[0],
                potential: rels[1],
                nu: rels[2],
            });
        }
    }
    Ok(verdict)
}

/// Like [`variational_check`] but never fails on disagreement; the caller
/// inspects [`VariationalityVerdict::criteria`].
pub fn criteria_on_grid(
    sode: &RstuSode,
    grid_points: usize,
    tol: f64,
) -> Result<VariationalityVerdict> {
    if grid_points < 16 {
        return Err(Error::GridTooSmall {
            min: 16,
            got: grid_points,
        });
    }
    let ys: Vec<f64> = sode.interval().cell_centers(grid_points).collect();
    let mut phis = Vec::with_capacity(ys.len());
    for &y in &ys {
        phis.push(jacobi(sode, y)?);
    }
    let phi_scale = phis
        .iter()
        .map(|p| p.0.abs().max(p.1.abs()))
        .fold(0.0, f64::max);
    let phi_tol = (tol * phi_scale).max(1e-12);
    let min_abs_phi22 = phis.iter().map(|p| p.1.abs()).fold(f64::INFINITY, f64::min);

    let mut v = VariationalityVerdict {
        is_variational: true,
        branch: Branch::Phi22Zero,
        rank1: ResidualMax::default(),
        potential: ResidualMax::default(),
        nu_transport: ResidualMax::default(),
        min_abs_phi22,
        tol,
        grid_points,
    };
    if phis.iter().all(|p| p.1.abs() <= phi_tol) {
        return Ok(v);
    }
    v.branch = Branch::EquivalentCriteria;
    for (&y, &(_, p22)) in ys.iter().zip(&phis) {
        let (res, scale) = rank1_with_scale(sode, y)?;
        v.rank1.update(res, scale);
        if p22.abs() <= phi_tol {
            continue;
        }
        let c = sode.coefficients(y)?;
        let (nu, nu_scale) = nu_with_slope(sode, y)?;
        let (t, u, r, s) = (c.t, c.u, c.r, c.s);
        v.potential.update(
            u.d1 - nu.d1 * s.value - nu.value * s.d1,
            u.d1.abs() + nu_scale * s.value.abs() + (nu.value * s.d1).abs(),
        );
        v.nu_transport.update(
            nu.d1 - (t.value - r.value * nu.value),
            nu_scale + t.value.abs() + (r.value * nu.value).abs(),
        );
    }
    let (a, b, c) = v.criteria();
    v.is_variational = a && b && c;
    Ok(v)
}

/// Where `ν` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuSource {
    /// `ν = Φ¹₂ / Φ²₂`.
    Jacobi,
    /// `ν ≡ 0`, e.g. for an identity multiplier of a flat system.
    Zero,
}

/// `g = ρ₁ (dx − ν dy)² + ρ₂ dy²` with `ρ₂(y) = A exp(−2 ∫₀^y R)` and the
/// potential `V(y) = −∫₀^y ρ₂ S`.
#[derive(Debug, Clone)]
pub struct Multiplier {
    sode: RstuSode,
    rho1: f64,
    amplitude: f64,
    nu_source: NuSource,
    table: QuinticTable,
}

/// Metric components as jets in `y` (`g11` is constant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricJets {
    pub g11: f64,
    pub g12: Jet2,
    pub g22: Jet2,
}

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
/// Largest node spacing of the quadrature table.
const NODE_SPACING: f64 = 1e-3;
const PHI22_PROBES: usize = 512;

/// Positive-definite multiplier with `ρ₁ = 1` and `ρ₂(0) = a > 0`.
pub fn build_multiplier(sode: &RstuSode, a: f64, quad_tol: f64) -> Result<Multiplier> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "A".into(),
            reason: "must be positive".into(),
        });
    }
    Multiplier::build(sode, 1.0, a, NuSource::Jacobi, quad_tol)
}

/// Negative-definite counterpart: `ρ₁ = −1` and `ρ₂(0) = a < 0`.
pub fn build_negative_multiplier(sode: &RstuSode, a: f64, quad_tol: f64) -> Result<Multiplier> {
    if !(a < 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "A".into(),
            reason: "must be negative".into(),
        });
    }
    Multiplier::build(sode, -1.0, a, NuSource::Jacobi, quad_tol)
}

impl Multiplier {
    pub fn build(
        sode: &RstuSode,
        rho1: f64,
        a: f64,
        nu_source: NuSource,
        quad_tol: f64,
    ) -> Result<Self> {
        if nu_source == NuSource::Jacobi {
            let mut sign = 0.0;
            for y in sode.interval().cell_centers(PHI22_PROBES) {
                let (p12, p22) = jacobi(sode, y)?;
                if p22.abs() <= NU_FLOOR * (1.0 + p12.abs())
                    || (sign != 0.0 && p22.signum() != sign)
                {
                    return Err(Error::Phi22Vanishes { y });
                }
                sign = p22.signum();
            }
        }
        let table = QuinticTable::build(sode, a, quad_tol)?;
        Ok(Self {
            sode: sode.clone(),
            rho1,
            amplitude: a,
            nu_source,
            table,
        })
    }

    /// `g = dx² + dy²` shifted by the potential of `sode`: `ν ≡ 0`, `ρ₂(0) = 1`.
    pub fn identity(sode: &RstuSode, quad_tol: f64) -> Result<Self> {
        Self::build(sode, 1.0, 1.0, NuSource::Zero, quad_tol)
    }

    pub fn sode(&self) -> &RstuSode {
        &self.sode
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    /// `A = ρ₂(0)`.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn interval(&self) -> Interval {
        self.sode.interval()
    }

    /// `ν` with its first derivative (`d2` is `NaN`).
    pub fn nu(&self, y: f64) -> Result<Jet2> {
        match self.nu_source {
            NuSource::Jacobi => nu_with_slope(&self.sode, y).map(|(j, _)| j),
            NuSource::Zero => Ok(Jet2::default()),
        }
    }

    /// `ρ₂` as a jet; the derivatives follow from `ρ₂' = −2Rρ₂`.
    pub fn rho2(&self, y: f64) -> Result<Jet2> {
        let r = self.sode.coefficients(y)?.r;
        let v = self.amplitude * (-2.0 * self.table.int_r(y)?).exp();
        Ok(Jet2::new(
            v,
            -2.0 * r.value * v,
            (4.0 * r.value * r.value - 2.0 * r.d1) * v,
        ))
    }

    /// `ρ₂` from the quadrature table alone, without the analytic slope.
    pub fn rho2_value(&self, y: f64) -> Result<f64> {
        Ok(self.amplitude * (-2.0 * self.table.int_r(y)?).exp())
    }

    pub fn metric(&self, y: f64) -> Result<MetricJets> {
        let nu = self.nu(y)?;
        let rho2 = self.rho2(y)?;
        Ok(MetricJets {
            g11: self.rho1,
            g12: (-nu).scale(self.rho1),
            g22: (nu * nu).scale(self.rho1) + rho2,
        })
    }

    /// `V` as a jet; `V' = −ρ₂ S`.
    pub fn potential(&self, y: f64) -> Result<Jet2> {
        let c = self.sode.coefficients(y)?;
        let rho2 = self.rho2(y)?;
        let v = self.table.potential(y)?;
        let ds = rho2 * c.s;
        Ok(Jet2::new(v, -ds.value, -ds.d1))
    }

    /// `E_L = ½(g11 ẋ² + 2 g12 ẋẏ + g22 ẏ²) + V(y)`.
    pub fn energy(&self, y: f64, xdot: f64, ydot: f64) -> Result<f64> {
        let g = self.metric(y)?;
        let kinetic = 0.5
            * (g.g11 * xdot * xdot + 2.0 * g.g12.value * xdot * ydot + g.g22.value * ydot * ydot);
        Ok(kinetic + self.table.potential(y)?)
    }

    /// `dE_L/dt` along a motion with the given accelerations.
    pub fn energy_rate(&self, y: f64, xdot: f64, ydot: f64, xddot: f64, yddot: f64) -> Result<f64> {
        let g = self.metric(y)?;
        let v = self.potential(y)?;
        let dy = g.g12.d1 * xdot * ydot + 0.5 * g.g22.d1 * ydot * ydot + v.d1;
        let px = g.g11 * xdot + g.g12.value * ydot;
        let py = g.g12.value * xdot + g.g22.value * ydot;
        Ok(dy * ydot + px * xddot + py * yddot)
    }
}

/// Checks the equilibrium and returns `(V'(0), V''(0))` by Richardson
/// extrapolated central differences of the tabulated potential.
pub fn potential_checks(mult: &Multiplier, sode: &RstuSode) -> Result<(f64, f64)> {
    let c = sode.coefficients(0.0)?;
    let slack = 1e-9 * (1.0 + c.s.d1.abs() + c.u.d1.abs());
    if c.s.value.abs() > slack || c.u.value.abs() > slack {
        return Err(Error::EquilibriumMissing {
            s0: c.s.value,
            u0: c.u.value,
        });
    }
    let v = |y: f64| mult.table.potential(y);
    let v0 = v(0.0)?;
    let first = |h: f64| -> Result<f64> { Ok((v(h)? - v(-h)?) / (2.0 * h)) };
    let second = |h: f64| -> Result<f64> { Ok((v(h)? - 2.0 * v0 + v(-h)?) / (h * h)) };
    let (h1, h2) = (1e-3, 5e-4);
    let d1 = (4.0 * first(h2)? - first(h1)?) / 3.0;
    let d2 = (4.0 * second(h2)? - second(h1)?) / 3.0;
    Ok((d1, d2))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HelmholtzResidual {
    /// Worst coordinate component of `∇g`.
    pub nabla_g: f64,
    /// `|g(Φ·,·) − g(·,Φ·)|`, worst entry.
    pub phi_symmetry: f64,
    /// Velocity derivatives of `g`; zero since `g` depends on `y` only.
    pub dv_symmetry: f64,
}

impl HelmholtzResidual {
    pub fn max(&self) -> f64 {
        self.nabla_g.max(self.phi_symmetry).max(self.dv_symmetry)
    }
}

/// Evaluates the algebraic and differential Helmholtz conditions for `mult`
/// at `(y, ẏ)`. The `ρ₂` slope entering `∇g` is the derivative of the
/// interpolated quadrature table rather than `−2Rρ₂`, so between nodes the
/// check sees the tabulation error.
pub fn helmholtz_residual(
    sode: &RstuSode,
    mult: &Multiplier,
    y: f64,
    ydot: f64,
) -> Result<HelmholtzResidual> {
    let c = sode.coefficients(y)?;
    let (t, r) = (c.t.value, c.r.value);
    let nu = mult.nu(y)?;
    let rho1 = mult.rho1;
    let rho2 = mult.rho2_value(y)?;
    let drho2 = -2.0 * mult.table.int_r_slope(y)? * rho2;

    // ∇g_ij = Γ(g_ij) − g_kj Γ^k_i − g_ik Γ^k_j with Γ^1_2 = −Tẏ, Γ^2_2 = −Rẏ
    let g11_dot: f64 = 0.0;
    let g12_dot = ydot * rho1 * (t - r * nu.value - nu.d1);
    let g22_dot =
        ydot * (2.0 * rho1 * nu.value * (nu.d1 - t + nu.value * r) + drho2 + 2.0 * r * rho2);
    let nabla_g = g11_dot.abs().max(g12_dot.abs()).max(g22_dot.abs());

    // (gΦ)_12 = g11 Φ¹₂ + g12 Φ²₂, (gΦ)_21 = 0
    let (p12, p22) = jacobi(sode, y)?;
    let phi_symmetry = (rho1 * p12 - rho1 * nu.value * p22).abs();

    Ok(HelmholtzResidual {
        nabla_g,
        phi_symmetry,
        dv_symmetry: 0.0,
    })
}

/// Tabulates `I(y) = ∫₀^y R` and `V(y) = −∫₀^y ρ₂ S` on nodes containing 0
/// and interpolates them with quintic Hermite polynomials using the exact
/// first and second derivatives at the nodes.
#[derive(Debug, Clone)]
struct QuinticTable {
    ys: Vec<f64>,
    /// `(I, I', I'')` at the nodes.
    int_r: Vec<[f64; 3]>,
    /// `(V, V', V'')` at the nodes.
    pot: Vec<[f64; 3]>,
}

impl QuinticTable {
    fn build(sode: &RstuSode, a: f64, quad_tol: f64) -> Result<Self> {
        let iv = sode.interval();
        let pad = 1e-12 * iv.width();
        let (lo, hi) = (iv.lo + pad, iv.hi - pad);
        let n_lo = (-lo / NODE_SPACING).ceil().max(1.0) as usize;
        let n_hi = (hi / NODE_SPACING).ceil().max(1.0) as usize;
        let mut ys: Vec<f64> = (0..n_lo)
            .map(|k| lo * (n_lo - k) as f64 / n_lo as f64)
            .collect();
        ys.extend((0..=n_hi).map(|k| hi * k as f64 / n_hi as f64));
        let zero = n_lo;
        let cell_tol = |y0: f64, y1: f64| quad_tol * ((y1 - y0).abs() / iv.width()).max(1e-6);

        let r_of = |y: f64| -> Result<f64> { Ok(sode.coefficients(y)?.r.value) };
        let mut int_r = vec![[0.0; 3]; ys.len()];
        let mut coeffs = Vec::with_capacity(ys.len());
        for &y in &ys {
            coeffs.push(sode.coefficients(y)?);
        }
        let outward = |zero: usize, len: usize| -> Vec<(usize, usize)> {
            let mut v: Vec<(usize, usize)> = (zero + 1..len).map(|k| (k - 1, k)).collect();
            v.extend((0..zero).rev().map(|k| (k + 1, k)));
            v
        };
        for (from, to) in outward(zero, ys.len()) {
            let step = simpson(r_of, ys[from], ys[to], cell_tol(ys[from], ys[to]))?;
            int_r[to][0] = int_r[from][0] + step;
        }
        for (k, c) in coeffs.iter().enumerate() {
            int_r[k][1] = c.r.value;
            int_r[k][2] = c.r.d1;
        }

        let mut table = Self {
            ys,
            int_r,
            pot: Vec::new(),
        };
        let rho2 = |t: &Self, y: f64| -> Result<f64> { Ok(a * (-2.0 * t.int_r(y)?).exp()) };
        let mut pot = vec![[0.0; 3]; table.ys.len()];
        for (from, to) in outward(zero, table.ys.len()) {
            let (y0, y1) = (table.ys[from], table.ys[to]);
            let step = simpson(
                |y| Ok(rho2(&table, y)? * sode.coefficients(y)?.s.value),
                y0,
                y1,
                cell_tol(y0, y1) * a.abs().max(1.0),
            )?;
            pot[to][0] = pot[from][0] - step;
        }
        for (k, c) in coeffs.iter().enumerate() {
            let rho = rho2(&table, table.ys[k])?;
            // V' = −ρ₂S, V'' = −ρ₂(S' − 2RS)
            pot[k][1] = -rho * c.s.value;
            pot[k][2] = -rho * (c.s.d1 - 2.0 * c.r.value * c.s.value);
        }
        table.pot = pot;
        Ok(table)
    }

    fn locate(&self, y: f64) -> Result<(usize, f64, f64)> {
        let (lo, hi) = (self.ys[0], *self.ys.last().unwrap());
        let slack = 1e-10 * (hi - lo);
        if !(y >= lo - slack && y <= hi + slack) {
            return Err(Error::OutsideInterval { y });
        }
        let k = self
            .ys
            .partition_point(|&n| n <= y)
            .saturating_sub(1)
            .min(self.ys.len() - 2);
        let h = self.ys[k + 1] - self.ys[k];
        Ok((k, (y - self.ys[k]) / h, h))
    }

    fn int_r(&self, y: f64) -> Result<f64> {
        let (k, s, h) = self.locate(y)?;
        Ok(quintic(&self.int_r[k], &self.int_r[k + 1], s, h))
    }

    /// Derivative of the interpolant of `I`.
    fn int_r_slope(&self, y: f64) -> Result<f64> {
        let (k, s, h) = self.locate(y)?;
        Ok(quintic_slope(&self.int_r[k], &self.int_r[k + 1], s, h))
    }

    fn potential(&self, y: f64) -> Result<f64> {
        if self.pot.is_empty() {
            return Ok(0.0);
        }
        let (k, s, h) = self.locate(y)?;
        Ok(quintic(&self.pot[k], &self.pot[k + 1], s, h))
    }
}

fn quintic(f0: &[f64; 3], f1: &[f64; 3], s: f64, h: f64) -> f64 {
    let (s2, s3) = (s * s, s * s * s);
    let (s4, s5) = (s3 * s, s3 * s2);
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 0.5 * (s3 - 2.0 * s4 + s5);
    f0[0] * h0
        + h * f0[1] * h1
        + h * h * f0[2] * h2
        + f1[0] * h3
        + h * f1[1] * h4
        + h * h * f1[2] * h5
}

fn quintic_slope(f0: &[f64; 3], f1: &[f64; 3], s: f64, h: f64) -> f64 {
    let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
    let h0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let h1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let h2 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
    let h4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let h5 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);
    (f0[0] * h0 + h * f0[1] * h1 + h * h * f0[2] * h2 - f1[0] * h0
        + h * f1[1] * h4
        + h * h * f1[2] * h5)
        / h
}
