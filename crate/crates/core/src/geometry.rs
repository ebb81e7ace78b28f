//! Connection, Jacobi endomorphism and its dynamical covariant derivative for
//! the normal form, plus the case classification built on them.
//!
//! Only the `(·)_2` columns survive: every quantity with lower index 1 vanishes
//! because `x` is cyclic and absent from the right-hand side.

use crate::error::{Error, Result};
use crate::system::RstuSode;

/// `(Γ¹₂, Γ²₂) = (−T ẏ, −R ẏ)`.
pub fn connection(sode: &RstuSode, y: f64, ydot: f64) -> Result<(f64, f64)> {
    let c = sode.coefficients(y)?;
    Ok((-c.t.value * ydot, -c.r.value * ydot))
}

/// `(Φ¹₂, Φ²₂) = (−U' + S T, −S' + R S)`.
pub fn jacobi(sode: &RstuSode, y: f64) -> Result<(f64, f64)> {
    let c = sode.coefficients(y)?;
    Ok((
        -c.u.d1 + c.s.value * c.t.value,
        -c.s.d1 + c.r.value * c.s.value,
    ))
}

/// `(Φ¹₂', Φ²₂')`, derivatives of the Jacobi components in `y`.
pub fn jacobi_slopes(sode: &RstuSode, y: f64) -> Result<(f64, f64)> {
    let c = sode.coefficients(y)?;
    let (t, u, r, s) = (c.t, c.u, c.r, c.s);
    Ok((
        -u.d2 + s.d1 * t.value + s.value * t.d1,
        -s.d2 + r.d1 * s.value + r.value * s.d1,
    ))
}

/// `∇Φ` is linear in `ẏ`; this returns the two coefficients of `ẏ`.
pub fn nabla_phi_coefficients(sode: &RstuSode, y: f64) -> Result<(f64, f64)> {
    let c = sode.coefficients(y)?;
    let (t, u, r, s) = (c.t, c.u, c.r, c.s);
    let k12 = 2.0 * s.d1 * t.value + s.value * t.d1 - u.d2 - r.value * u.d1;
    let k22 = s.value * r.d1 + r.value * s.d1 - s.d2;
    Ok((k12, k22))
}

/// `((∇Φ)¹₂, (∇Φ)²₂)`.
pub fn nabla_phi(sode: &RstuSode, y: f64, ydot: f64) -> Result<(f64, f64)> {
    let (k12, k22) = nabla_phi_coefficients(sode, y)?;
    Ok((ydot * k12, ydot * k22))
}

/// `Φ²₂ (Φ²₂ ∂Φ¹₂/∂ẏ − Φ¹₂ ∂Φ²₂/∂ẏ)`: the one Haantjes component that can
/// survive. The Jacobi components of a normal form never depend on `ẏ`, so
/// the velocity derivatives are zero and so is the result.
pub fn haantjes_component(sode: &RstuSode, y: f64) -> Result<f64> {
    let (p12, p22) = jacobi(sode, y)?;
    let (dp12, dp22) = (0.0, 0.0);
    Ok(p22 * (p22 * dp12 - p12 * dp22))
}

/// `(∇Φ)¹₂ Φ²₂ − (∇Φ)²₂ Φ¹₂` divided by `ẏ`.
pub fn case_two_coefficient(sode: &RstuSode, y: f64) -> Result<f64> {
    let (p12, p22) = jacobi(sode, y)?;
    let (k12, k22) = nabla_phi_coefficients(sode, y)?;
    Ok(k12 * p22 - k22 * p12)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySample {
    pub y: f64,
    pub ydot: f64,
    pub gamma12: f64,
    pub gamma22: f64,
    pub phi12: f64,
    pub phi22: f64,
    pub nabla_phi12: f64,
    pub nabla_phi22: f64,
    pub haantjes: f64,
}

pub fn sample(sode: &RstuSode, y: f64, ydot: f64) -> Result<GeometrySample> {
    let (gamma12, gamma22) = connection(sode, y, ydot)?;
    let (phi12, phi22) = jacobi(sode, y)?;
    let (nabla_phi12, nabla_phi22) = nabla_phi(sode, y, ydot)?;
    Ok(GeometrySample {
        y,
        ydot,
        gamma12,
        gamma22,
        phi12,
        phi22,
        nabla_phi12,
        nabla_phi22,
        haantjes: haantjes_component(sode, y)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DouglasCase {
    CaseI,
    CaseIIa1,
    /// Detected, but the extra conditions deciding variationality are not
    /// evaluated.
    CaseIIa2,
    CaseIIb1Prime,
    CaseIIIb,
    Indeterminate,
}

impl DouglasCase {
    pub fn label(self) -> &'static str {
        match self {
            DouglasCase::CaseI => "CaseI",
            DouglasCase::CaseIIa1 => "CaseIIa1",
            DouglasCase::CaseIIa2 => "CaseIIa2",
            DouglasCase::CaseIIb1Prime => "CaseIIb1'",
            DouglasCase::CaseIIIb => "CaseIIIb",
            DouglasCase::Indeterminate => "Indeterminate",
        }
    }

    /// Cases I, IIa1 and IIb1' are always variational.
    pub fn always_variational(self) -> bool {
        matches!(
            self,
            DouglasCase::CaseI | DouglasCase::CaseIIa1 | DouglasCase::CaseIIb1Prime
        )
    }
}

impl std::fmt::Display for DouglasCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One grid point of a classification, with `∇Φ` stored per unit `ẏ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub y: f64,
    pub phi12: f64,
    pub phi22: f64,
    pub k12: f64,
    pub k22: f64,
    pub case_two: f64,
    pub haantjes: f64,
    pub verdict: DouglasCase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Run {
    pub lo: f64,
    pub hi: f64,
    pub verdict: DouglasCase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DouglasReport {
    pub runs: Vec<Run>,
    /// Threshold applied to `Φ`.
    pub phi_tol: f64,
    /// Threshold applied to the case-II coefficient.
    pub case_two_tol: f64,
    pub grid: Vec<GridPoint>,
}

impl DouglasReport {
    /// The verdict when a single one covers the whole interval.
    pub fn uniform(&self) -> Option<DouglasCase> {
        let first = self.runs.first()?.verdict;
        self.runs
            .iter()
            .all(|r| r.verdict == first)
            .then_some(first)
    }
}

impl std::fmt::Display for DouglasReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "classification over {} grid points (|Phi| tol {:.3e}, case-II tol {:.3e})",
            self.grid.len(),
            self.phi_tol,
            self.case_two_tol
        )?;
        for r in &self.runs {
            writeln!(f, "  ({:+.6}, {:+.6})  {}", r.lo, r.hi, r.verdict)?;
        }
        Ok(())
    }
}

pub const DEFAULT_ZERO_TOL: f64 = 1e-9;
const ABS_FLOOR: f64 = 1e-12;
/// Values between `tol` and `INDETERMINATE_BAND * tol` are neither zero nor
/// clearly nonzero.
const INDETERMINATE_BAND: f64 = 100.0;

enum Size {
    Zero,
    Unclear,
    Nonzero,
}

fn size(v: f64, tol: f64) -> Size {
    if v.abs() <= tol {
        Size::Zero
    } else if v.abs() <= INDETERMINATE_BAND * tol {
        Size::Unclear
    } else {
        Size::Nonzero
    }
}

/// Classifies the normal form on `grid_points` cell centres of its working
/// interval. `zero_tol` is relative to the largest sampled `|Φ|` (and to the
/// largest term of the case-II expression), with a floor of `1e-12`.
pub fn classify(sode: &RstuSode, grid_points: usize, zero_tol: f64) -> Result<DouglasReport> {
    if grid_points < 16 {
        return Err(Error::GridTooSmall {
            min: 16,
            got: grid_points,
        });
    }
    let interval = sode.interval();
    let mut raw = Vec::with_capacity(grid_points);
    for y in interval.cell_centers(grid_points) {
        let (phi12, phi22) = jacobi(sode, y)?;
        let (k12, k22) = nabla_phi_coefficients(sode, y)?;
        raw.push((y, phi12, phi22, k12, k22, haantjes_component(sode, y)?));
    }
    let phi_scale = raw
        .iter()
        .map(|r| r.1.abs().max(r.2.abs()))
        .fold(0.0, f64::max);
    let c_scale = raw
        .iter()
        .map(|r| (r.3 * r.2).abs() + (r.4 * r.1).abs())
        .fold(0.0, f64::max);
    let phi_tol = (zero_tol * phi_scale).max(ABS_FLOOR);
    let case_two_tol = (zero_tol * c_scale).max(ABS_FLOOR);
    let h_tol = (zero_tol * phi_scale.powi(3)).max(ABS_FLOOR);

    let grid: Vec<GridPoint> = raw
        .into_iter()
        .map(|(y, phi12, phi22, k12, k22, haantjes)| {
            let case_two = k12 * phi22 - k22 * phi12;
            let verdict = point_verdict(
                phi12,
                phi22,
                case_two,
                haantjes,
                phi_tol,
                case_two_tol,
                h_tol,
            );
            GridPoint {
                y,
                phi12,
                phi22,
                k12,
                k22,
                case_two,
                haantjes,
                verdict,
            }
        })
        .collect();

    let h = interval.width() / grid_points as f64;
    let mut runs: Vec<Run> = Vec::new();
    let mut prev_sign = 0.0;
    for p in &grid {
        let sign = if p.phi22.abs() > phi_tol {
            p.phi22.signum()
        } else {
            0.0
        };
        let split = sign != 0.0 && prev_sign != 0.0 && sign != prev_sign;
        if sign != 0.0 {
            prev_sign = sign;
        }
        match runs.last_mut() {
            Some(r) if r.verdict == p.verdict && !split => r.hi = p.y + 0.5 * h,
            _ => runs.push(Run {
                lo: p.y - 0.5 * h,
                hi: p.y + 0.5 * h,
                verdict: p.verdict,
            }),
        }
    }
    if let Some(first) = runs.first_mut() {
        first.lo = interval.lo;
    }
    if let Some(last) = runs.last_mut() {
        last.hi = interval.hi;
    }
    Ok(DouglasReport {
        runs,
        phi_tol,
        case_two_tol,
        grid,
    })
}

fn point_verdict(
    phi12: f64,
    phi22: f64,
    case_two: f64,
    haantjes: f64,
    phi_tol: f64,
    c_tol: f64,
    h_tol: f64,
) -> DouglasCase {
    use DouglasCase::*;
    match (size(phi12, phi_tol), size(phi22, phi_tol)) {
        (Size::Zero, Size::Zero) => return CaseI,
        (Size::Unclear, Size::Zero | Size::Unclear) | (Size::Zero, Size::Unclear) => {
            return Indeterminate
        }
        _ => {}
    }
    match size(case_two, c_tol) {
        Size::Nonzero => return CaseIIIb,
        Size::Unclear => return Indeterminate,
        Size::Zero => {}
    }
    match size(phi22, phi_tol) {
        Size::Zero => CaseIIb1Prime,
        Size::Unclear => Indeterminate,
        Size::Nonzero => match size(haantjes, h_tol) {
            Size::Zero => CaseIIa1,
            Size::Unclear => Indeterminate,
            Size::Nonzero => CaseIIa2,
        },
    }
}
