//! Fixed-step RK4 integration of the full and reduced controlled flows.

use crate::error::{Error, Result};
use crate::synth::DissipativeAugmentation;
use crate::system::RstuSode;
use crate::variational::Multiplier;

#[derive(Debug, Clone, PartialEq)]
pub enum States {
    /// `(x, y, ẋ, ẏ)`.
    Full(Vec<[f64; 4]>),
    /// `(y, v_y, v_x)`.
    Reduced(Vec<[f64; 3]>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub h: f64,
    pub times: Vec<f64>,
    pub states: States,
    /// `E_L` per sample when a multiplier was attached.
    pub energy: Option<Vec<f64>>,
    /// `u = M ẏ² + N`; `NaN` when the normal form carries no control.
    pub u: Vec<f64>,
    /// Dissipative control `u₂`; zero without augmentation.
    pub u2: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn x(&self, k: usize) -> Option<f64> {
        match &self.states {
            States::Full(s) => Some(s[k][0]),
            States::Reduced(_) => None,
        }
    }

    pub fn y(&self, k: usize) -> f64 {
        match &self.states {
            States::Full(s) => s[k][1],
            States::Reduced(s) => s[k][0],
        }
    }

    pub fn xdot(&self, k: usize) -> f64 {
        match &self.states {
            States::Full(s) => s[k][2],
            States::Reduced(s) => s[k][2],
        }
    }

    pub fn ydot(&self, k: usize) -> f64 {
        match &self.states {
            States::Full(s) => s[k][3],
            States::Reduced(s) => s[k][1],
        }
    }

    /// `(y, ẏ, ẋ)` at sample `k`, common to both flows.
    pub fn shape_state(&self, k: usize) -> [f64; 3] {
        [self.y(k), self.ydot(k), self.xdot(k)]
    }
}

fn steps(t_end: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite() && t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "h".into(),
            reason: "step and horizon must be positive and finite".into(),
        });
    }
    Ok((t_end / h).round() as usize)
}

fn rk4<const N: usize, F>(f: &mut F, s: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
{
    let axpy = |a: &[f64; N], k: &[f64; N], c: f64| -> [f64; N] {
        std::array::from_fn(|i| a[i] + c * k[i])
    };
    let k1 = f(s)?;
    let k2 = f(&axpy(s, &k1, 0.5 * h))?;
    let k3 = f(&axpy(s, &k2, 0.5 * h))?;
    let k4 = f(&axpy(s, &k3, h))?;
    Ok(std::array::from_fn(|i| {
        s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

fn control_value(sode: &RstuSode, y: f64, ydot: f64) -> Result<f64> {
    match sode.control() {
        Some(c) => Ok(c.value(y, ydot)?),
        None => Ok(f64::NAN),
    }
}

/// Integrates `ẍ = Tẏ² + U + a¹¹u₂`, `ÿ = Rẏ² + S + a¹²u₂` from `state0 =
/// (x, y, ẋ, ẏ)`. Stops with [`Error::LeftWorkingInterval`] as soon as `y`
/// leaves the working interval, at a step or inside one.
pub fn integrate_full(
    sode: &RstuSode,
    aug: Option<&DissipativeAugmentation>,
    mult: Option<&Multiplier>,
    state0: [f64; 4],
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    let n = steps(t_end, h)?;
    let interval = sode.interval();
    let t = std::cell::Cell::new(0.0);
    let mut rhs = |s: &[f64; 4]| -> Result<[f64; 4]> {
        let [x, y, xd, yd] = *s;
        if !interval.contains(y) {
            return Err(Error::LeftWorkingInterval { t: t.get() });
        }
        let (mut xdd, mut ydd) = sode.accel(y, yd)?;
        if let Some(aug) = aug {
            let (cx, cy) = aug.acceleration(x, y, xd, yd)?;
            xdd += cx;
            ydd += cy;
        }
        Ok([xd, yd, xdd, ydd])
    };
    let record = |s: &[f64; 4]| -> Result<(Option<f64>, f64, f64)> {
        let [x, y, xd, yd] = *s;
        let e = mult.map(|m| m.energy(y, xd, yd)).transpose()?;
        let u2 = aug.map(|a| a.u2(x, y, xd, yd)).transpose()?.unwrap_or(0.0);
        Ok((e, control_value(sode, y, yd)?, u2))
    };

    if !interval.contains(state0[1]) {
        return Err(Error::LeftWorkingInterval { t: 0.0 });
    }
    let mut states = Vec::with_capacity(n + 1);
    let mut times = Vec::with_capacity(n + 1);
    let mut energy = mult.map(|_| Vec::with_capacity(n + 1));
    let mut u = Vec::with_capacity(n + 1);
    let mut u2 = Vec::with_capacity(n + 1);
    let mut s = state0;
    for k in 0..=n {
        let (e, uk, u2k) = record(&s)?;
        if let (Some(series), Some(e)) = (energy.as_mut(), e) {
            series.push(e);
        }
        u.push(uk);
        u2.push(u2k);
        states.push(s);
        times.push(t.get());
        if k == n {
            break;
        }
        s = rk4(&mut rhs, &s, h)?;
        t.set((k + 1) as f64 * h);
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { t: t.get() });
        }
        if !interval.contains(s[1]) {
            return Err(Error::LeftWorkingInterval { t: t.get() });
        }
    }
    Ok(Trajectory {
        h,
        times,
        states: States::Full(states),
        energy,
        u,
        u2,
    })
}

/// Integrates `ẏ = v_y`, `v̇_y = R v_y² + S`, `v̇_x = T v_y² + U` from
/// `state0 = (y, v_y, v_x)`.
pub fn integrate_reduced(
    sode: &RstuSode,
    mult: Option<&Multiplier>,
    state0: [f64; 3],
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    let n = steps(t_end, h)?;
    let interval = sode.interval();
    let t = std::cell::Cell::new(0.0);
    let mut rhs = |s: &[f64; 3]| -> Result<[f64; 3]> {
        let [y, vy, _] = *s;
        if !interval.contains(y) {
            return Err(Error::LeftWorkingInterval { t: t.get() });
        }
        let (ax, ay) = sode.accel(y, vy)?;
        Ok([vy, ay, ax])
    };
    if !interval.contains(state0[0]) {
        return Err(Error::LeftWorkingInterval { t: 0.0 });
    }
    let mut states = Vec::with_capacity(n + 1);
    let mut times = Vec::with_capacity(n + 1);
    let mut energy = mult.map(|_| Vec::with_capacity(n + 1));
    let mut u = Vec::with_capacity(n + 1);
    let mut s = state0;
    for k in 0..=n {
        let [y, vy, vx] = s;
        if let (Some(series), Some(m)) = (energy.as_mut(), mult) {
            series.push(m.energy(y, vx, vy)?);
        }
        u.push(control_value(sode, y, vy)?);
        states.push(s);
        times.push(t.get());
        if k == n {
            break;
        }
        s = rk4(&mut rhs, &s, h)?;
        t.set((k + 1) as f64 * h);
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { t: t.get() });
        }
        if !interval.contains(s[0]) {
            return Err(Error::LeftWorkingInterval { t: t.get() });
        }
    }
    let u2 = vec![0.0; u.len()];
    Ok(Trajectory {
        h,
        times,
        states: States::Reduced(states),
        energy,
        u,
        u2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMonitor {
    pub series: Vec<f64>,
    /// `max |E_L(t) − E_L(0)|`.
    pub max_drift: f64,
    /// Whether `E_L` never increases by more than `1e-9 (1 + |E_L(0)|)` in
    /// one step.
    pub nonincreasing: bool,
    /// Largest single-step increase.
    pub max_increase: f64,
}

pub fn monitor_energy(traj: &Trajectory, mult: &Multiplier) -> Result<EnergyMonitor> {
    let mut series = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        series.push(mult.energy(traj.y(k), traj.xdot(k), traj.ydot(k))?);
    }
    let e0 = series.first().copied().unwrap_or(0.0);
    let max_drift = series.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
    let max_increase = series
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let nonincreasing = max_increase <= 1e-9 * (1.0 + e0.abs());
    Ok(EnergyMonitor {
        series,
        max_drift,
        nonincreasing,
        max_increase,
    })
}
