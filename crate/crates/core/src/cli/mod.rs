//! Command-line front end: reads a problem file and runs one stage of the
//! pipeline (classify, check, synthesize, stabilize, simulate) or all of them.
//!
//! Exit codes: 0 on success, 1 on domain errors, 2 on usage or config errors.

mod config;
mod output;

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{
    load_config, parse_config, ConfigError, ControlSection, DissipationSection, ProblemSpec,
    RunSection, SystemSection, Value,
};
pub use output::{csv, svg, Channel, CSV_HEADER};

use crate::error::Error;
use crate::expr::{parse_with, Expr};
use crate::geometry::{classify, DEFAULT_ZERO_TOL};
use crate::sim::{integrate_full, monitor_energy, Trajectory};
use crate::synth::{
    build_dissipative, checked_cbloch, lasalle_check, rank1_on_grid, solve_m, stability_report,
    tabulated_control, DissipativeAugmentation,
};
use crate::system::{
    builtin_with_params, to_normal_form, Interval, MechanicalSystem, QuadraticControl, RstuSode,
};
use crate::table::HermiteTable;
use crate::variational::{
    self, build_multiplier, potential_checks, variational_check, Branch, Multiplier, NuSource,
    VariationalityVerdict, DEFAULT_QUAD_TOL,
};

pub const DEFAULT_GRID_POINTS: usize = 400;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_T_END: f64 = 10.0;
pub const DEFAULT_H: f64 = 1e-3;
pub const DEFAULT_M_STEP: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "varstab",
    version,
    about = "Variational feedback synthesis and energy-based stability checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the controlled normal form into Douglas cases.
    Classify(Common),
    /// Decide whether the controlled normal form is variational.
    Check(Common),
    /// Solve for M given the N ansatz of `[control] synthesize`; writes y,M,dM.
    Synthesize(Common),
    /// Stability at y = 0, plus the invariance check when f is given.
    Stabilize(Common),
    /// Integrate from `[run] state0`; writes the trajectory CSV and optional SVG.
    Simulate(Common),
    /// Everything above.
    Report(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Problem file (TOML).
    config: PathBuf,
    /// Overrides `[run] t_end`.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Overrides `[run] h`.
    #[arg(long = "h")]
    h: Option<f64>,
    /// Output CSV path (overrides `[run] csv`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output SVG path (overrides `[run] svg`).
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Domain(Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Domain(
                Error::Parse(_)
                | Error::UnknownBuiltin(_)
                | Error::MissingParameter(_)
                | Error::InvalidParameter { .. }
                | Error::InvalidInterval(..)
                | Error::GridTooSmall { .. },
            ) => 2,
            CliError::Domain(_) | CliError::Io { .. } => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "cannot write {}: {source}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Runs the command line `argv` (including the program name) and returns the
/// exit code. Reports go to standard output, errors to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<String> {
    let (cmd, common) = match cli.command {
        Command::Classify(c) => ("classify", c),
        Command::Check(c) => ("check", c),
        Command::Synthesize(c) => ("synthesize", c),
        Command::Stabilize(c) => ("stabilize", c),
        Command::Simulate(c) => ("simulate", c),
        Command::Report(c) => ("report", c),
    };
    let mut spec = load_config(&common.config)?;
    apply_overrides(&mut spec, &common)?;
    let problem = Problem::build(spec)?;
    match cmd {
        "classify" => problem.classify_text(),
        "check" => problem.check().map(|v| v.to_string()),
        "synthesize" => problem.synthesize_text(true),
        "stabilize" => problem.stabilize_text(),
        "simulate" => problem.simulate_text(),
        _ => problem.report_text(),
    }
}

fn apply_overrides(spec: &mut ProblemSpec, c: &Common) -> CliResult<()> {
    for (name, v) in [("--t-end", c.t_end), ("--h", c.h)] {
        if v.is_some_and(|v| !(v > 0.0 && v.is_finite())) {
            return Err(CliError::Usage(format!("{name} must be positive")));
        }
    }
    let r = &mut spec.run;
    r.t_end = c.t_end.or(r.t_end);
    r.h = c.h.or(r.h);
    r.csv = c.out.clone().or(r.csv.take());
    r.svg = c.svg.clone().or(r.svg.take());
    Ok(())
}

/// A loaded problem: system, control and normal form, with run settings.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub system: MechanicalSystem,
    /// Parameters including derived ones (`alpha`… for the cart, `nu0`).
    pub params: HashMap<String, f64>,
    pub control: Option<QuadraticControl>,
    /// Tabulated `M` when the control was synthesized.
    pub m_table: Option<HermiteTable>,
    pub sode: RstuSode,
}

fn expression(key: &str, v: &Value, params: &HashMap<String, f64>) -> CliResult<Expr> {
    match v {
        Value::Number(c) => Ok(Expr::Const(*c)),
        Value::Text(s) => parse_with(s, params)
            .map_err(|e| ConfigError::Validation(format!("`{key}`: {e}")).into()),
    }
}

fn constant(key: &str, v: &Value, params: &HashMap<String, f64>) -> CliResult<f64> {
    let e = expression(key, v, params)?;
    e.as_const()
        .or_else(|| {
            (!e.depends_on(crate::expr::Var::X) && !e.depends_on(crate::expr::Var::Y))
                .then(|| e.eval(0.0).ok())
                .flatten()
        })
        .ok_or_else(|| ConfigError::Validation(format!("`{key}` must be a constant")).into())
}

impl Problem {
    pub fn build(spec: ProblemSpec) -> CliResult<Self> {
        let mut params: HashMap<String, f64> =
            spec.params.iter().map(|(k, v)| (k.clone(), *v)).collect();
        let ctrl_section = spec.control.clone().unwrap_or_default();
        let (mut system, mut control) = match &spec.system.builtin {
            Some(name) => {
                let (sys, ctrl, p) =
                    builtin_with_params(name, &params, ctrl_section.builtin.as_deref())?;
                params = p;
                (sys, ctrl)
            }
            None => {
                let s = &spec.system;
                let field = |key: &str, v: &Option<Value>| {
                    expression(key, v.as_ref().expect("validated"), &params)
                };
                let interval = match s.interval {
                    Some([lo, hi]) => Interval::new(lo, hi)?,
                    None => Interval::symmetric(1.0)?,
                };
                let sys = MechanicalSystem::new(
                    s.a11.expect("validated"),
                    field("a12", &s.a12)?,
                    field("a22", &s.a22)?,
                    field("V", &s.potential)?,
                    interval,
                )?;
                (sys, None)
            }
        };
        if let Some([lo, hi]) = spec.system.interval {
            system = system.with_interval(Interval::new(lo, hi)?);
        }
        let mut m_table = None;
        let c = &ctrl_section;
        if c.m.is_some() || c.n.is_some() {
            let zero = Value::Number(0.0);
            let m = expression("M", c.m.as_ref().unwrap_or(&zero), &params)?;
            let n = expression("N", c.n.as_ref().unwrap_or(&zero), &params)?;
            control = Some(QuadraticControl::new(m, n));
        } else if let Some(src) = &c.synthesize {
            let n = expression("synthesize", &Value::Text(src.clone()), &params)?;
            let table = solve_m(
                &system,
                &n,
                c.m0.unwrap_or(0.0),
                c.step.unwrap_or(DEFAULT_M_STEP),
            )?;
            // the table stops one step short of the interval ends
            let (lo, hi) = table.domain();
            system = system.with_interval(Interval::new(lo, hi)?);
            control = Some(tabulated_control(table.clone(), n));
            m_table = Some(table);
        } else if let Some(sigma) = c.sigma {
            control = Some(checked_cbloch(&system, sigma)?);
        }
        let sode = to_normal_form(
            &system,
            control.as_ref().unwrap_or(&QuadraticControl::zero()),
        )?;
        if let Ok(nu0) = variational::nu(&sode, 0.0) {
            params.insert("nu0".into(), nu0);
        }
        Ok(Problem {
            spec,
            system,
            params,
            control,
            m_table,
            sode,
        })
    }

    fn grid_points(&self) -> usize {
        self.spec.run.grid_points.unwrap_or(DEFAULT_GRID_POINTS)
    }

    fn tol(&self) -> f64 {
        self.spec.run.tol.unwrap_or(DEFAULT_TOL)
    }

    fn quad_tol(&self) -> f64 {
        self.spec.run.quad_tol.unwrap_or(DEFAULT_QUAD_TOL)
    }

    pub fn classify_text(&self) -> CliResult<String> {
        let report = classify(
            &self.sode,
            self.grid_points(),
            self.spec.run.zero_tol.unwrap_or(DEFAULT_ZERO_TOL),
        )?;
        let mut s = report.to_string();
        if let Some(case) = report.uniform() {
            let _ = writeln!(s, "case: {case}");
        }
        Ok(s)
    }

    pub fn check(&self) -> CliResult<VariationalityVerdict> {
        Ok(variational_check(
            &self.sode,
            self.grid_points(),
            self.tol(),
        )?)
    }

    /// `ρ₂(0)` from `[dissipation] A`, default 1.
    pub fn amplitude(&self) -> CliResult<f64> {
        match self.spec.dissipation.as_ref().and_then(|d| d.a.as_ref()) {
            Some(v) => constant("A", v, &self.params),
            None => Ok(1.0),
        }
    }

    /// The multiplier of a variational normal form, `None` otherwise.
    pub fn multiplier(&self, verdict: &VariationalityVerdict) -> CliResult<Option<Multiplier>> {
        if !verdict.is_variational {
            return Ok(None);
        }
        let a = self.amplitude()?;
        let m = match verdict.branch {
            Branch::EquivalentCriteria => build_multiplier(&self.sode, a, self.quad_tol())?,
            Branch::Phi22Zero => {
                Multiplier::build(&self.sode, 1.0, a, NuSource::Zero, self.quad_tol())?
            }
        };
        Ok(Some(m))
    }

    pub fn dissipation(&self, mult: &Multiplier) -> CliResult<Option<DissipativeAugmentation>> {
        match self.spec.dissipation.as_ref().and_then(|d| d.f.as_ref()) {
            Some(f) => Ok(Some(build_dissipative(
                &self.system,
                mult,
                expression("f", f, &self.params)?,
            )?)),
            None => Ok(None),
        }
    }

    /// Verification summary of a synthesized `M`, and the `y,M,dM` table
    /// (written to the CSV path when `write` is set and one is given).
    pub fn synthesize_text(&self, write: bool) -> CliResult<String> {
        let table = self.m_table.as_ref().ok_or_else(|| {
            CliError::Usage("synthesize needs `[control] synthesize = \"<N ansatz>\"`".into())
        })?;
        let (worst, scale) = rank1_on_grid(&self.sode, self.sode.interval(), self.grid_points())?;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "synthesized M on {} nodes over ({:+.6}, {:+.6})",
            table.nodes().len(),
            table.domain().0,
            table.domain().1
        );
        let _ = writeln!(s, "  max |rank-1| {worst:.3e} (term scale {scale:.3e})");
        let mut body = String::from("y,M,dM\n");
        for ((y, m), d) in table.nodes().iter().zip(table.values()).zip(table.slopes()) {
            let _ = writeln!(body, "{y:.16e},{m:.16e},{d:.16e}");
        }
        match (&self.spec.run.csv, write) {
            (Some(path), true) => {
                write_file(path, &body)?;
                let _ = writeln!(s, "  table written to {}", path.display());
            }
            (None, true) => s.push_str(&body),
            _ => {}
        }
        Ok(s)
    }

    pub fn stabilize_text(&self) -> CliResult<String> {
        let verdict = self.check()?;
        let report = stability_report(&self.sode, &verdict);
        let mut s = report.to_string();
        if let Some(mult) = self.multiplier(&verdict)? {
            if report.equilibrium_ok {
                let (v1, v2) = potential_checks(&mult, &self.sode)?;
                let _ = writeln!(
                    s,
                    "  energy: rho2(0) = {:.6e}, V'(0) = {v1:.3e}, V''(0) = {v2:.6e}",
                    mult.amplitude()
                );
            }
            if let Some(aug) = self.dissipation(&mult)? {
                s.push_str(
                    &lasalle_check(&self.sode, &mult, &self.system, self.grid_points())?
                        .to_string(),
                );
                if !aug.strictly_negative() {
                    let _ = writeln!(s, "  note: f vanishes somewhere on the sampled region");
                }
            }
        }
        Ok(s)
    }

    /// Integrates the full flow from `[run] state0`, with `u₂` when `f` is
    /// given and `E_L` when the normal form is variational.
    pub fn simulate(&self) -> CliResult<(Trajectory, Option<Multiplier>)> {
        let state0 = self
            .spec
            .run
            .state0
            .ok_or_else(|| ConfigError::Validation("simulate needs `[run] state0`".into()))?;
        let verdict = self.check()?;
        let mult = self.multiplier(&verdict)?;
        let aug = match &mult {
            Some(m) => self.dissipation(m)?,
            None if self
                .spec
                .dissipation
                .as_ref()
                .is_some_and(|d| d.f.is_some()) =>
            {
                return Err(CliError::Usage(
                    "dissipation needs a variational controlled system".into(),
                ))
            }
            None => None,
        };
        let traj = integrate_full(
            &self.sode,
            aug.as_ref(),
            mult.as_ref(),
            state0,
            self.spec.run.t_end.unwrap_or(DEFAULT_T_END),
            self.spec.run.h.unwrap_or(DEFAULT_H),
        )?;
        Ok((traj, mult))
    }

    pub fn channels(&self) -> Vec<Channel> {
        match &self.spec.run.channels {
            Some(names) => names
                .iter()
                .map(|n| n.parse().expect("validated"))
                .collect(),
            None => vec![Channel::Y, Channel::Ydot],
        }
    }

    pub fn simulate_text(&self) -> CliResult<String> {
        let (traj, mult) = self.simulate()?;
        let body = csv(&traj);
        let mut s = String::new();
        match &self.spec.run.csv {
            Some(path) => {
                write_file(path, &body)?;
                s.push_str(&self.trajectory_summary(&traj, mult.as_ref())?);
                let _ = writeln!(s, "  trajectory written to {}", path.display());
            }
            None => s.push_str(&body),
        }
        if let Some(path) = &self.spec.run.svg {
            write_file(path, &svg(&traj, &self.channels()))?;
            if self.spec.run.csv.is_some() {
                let _ = writeln!(s, "  plot written to {}", path.display());
            }
        }
        Ok(s)
    }

    fn trajectory_summary(
        &self,
        traj: &Trajectory,
        mult: Option<&Multiplier>,
    ) -> CliResult<String> {
        let k = traj.len() - 1;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "simulated {} steps of h = {} to t = {}",
            k, traj.h, traj.times[k]
        );
        let _ = writeln!(
            s,
            "  final (x, y, xdot, ydot) = ({:.6e}, {:.6e}, {:.6e}, {:.6e})",
            traj.x(k).unwrap_or(f64::NAN),
            traj.y(k),
            traj.xdot(k),
            traj.ydot(k)
        );
        if let Some(m) = mult {
            let mon = monitor_energy(traj, m)?;
            let _ = writeln!(
                s,
                "  energy: E(0) = {:.6e}, E(end) = {:.6e}, max drift {:.3e}, nonincreasing {}",
                mon.series[0], mon.series[k], mon.max_drift, mon.nonincreasing
            );
        }
        Ok(s)
    }

    pub fn report_text(&self) -> CliResult<String> {
        let mut s = String::from("== classification\n");
        s.push_str(&self.classify_text()?);
        s.push_str("== variationality\n");
        s.push_str(&self.check()?.to_string());
        if self.m_table.is_some() {
            s.push_str("== synthesis\n");
            s.push_str(&self.synthesize_text(false)?);
        }
        s.push_str("== stability\n");
        s.push_str(&self.stabilize_text()?);
        if self.spec.run.state0.is_some() {
            s.push_str("== simulation\n");
            let (traj, mult) = self.simulate()?;
            s.push_str(&self.trajectory_summary(&traj, mult.as_ref())?);
            if let Some(path) = &self.spec.run.csv {
                write_file(path, &csv(&traj))?;
                let _ = writeln!(s, "  trajectory written to {}", path.display());
            }
            if let Some(path) = &self.spec.run.svg {
                write_file(path, &svg(&traj, &self.channels()))?;
                let _ = writeln!(s, "  plot written to {}", path.display());
            }
        }
        Ok(s)
    }
}

fn write_file(path: &Path, body: &str) -> CliResult<()> {
    std::fs::write(path, body).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
