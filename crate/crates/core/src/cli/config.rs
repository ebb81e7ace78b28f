//! Problem files: TOML with `[system]`, `[params]`, `[control]`,
//! `[dissipation]` and `[run]` sections. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::output::Channel;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub system: SystemSection,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub control: Option<ControlSection>,
    pub dissipation: Option<DissipationSection>,
    #[serde(default)]
    pub run: RunSection,
}

/// Either a builtin name or the four custom entries.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub builtin: Option<String>,
    pub a11: Option<f64>,
    pub a12: Option<Value>,
    pub a22: Option<Value>,
    #[serde(rename = "V")]
    pub potential: Option<Value>,
    pub interval: Option<[f64; 2]>,
}

/// Exactly one of `builtin`, `M`/`N`, `synthesize` or `sigma`.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    pub builtin: Option<String>,
    #[serde(rename = "M")]
    pub m: Option<Value>,
    #[serde(rename = "N")]
    pub n: Option<Value>,
    /// `N` ansatz; `M` is then solved for.
    pub synthesize: Option<String>,
    #[serde(rename = "M0")]
    pub m0: Option<f64>,
    pub step: Option<f64>,
    /// Parameter of the controlled-Lagrangian family.
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipationSection {
    /// Dissipation factor `f(x, y)`; no `u₂` when absent.
    pub f: Option<Value>,
    /// Multiplier amplitude `ρ₂(0)`; defaults to 1.
    #[serde(rename = "A")]
    pub a: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub t_end: Option<f64>,
    pub h: Option<f64>,
    /// `(x, y, ẋ, ẏ)`.
    pub state0: Option<[f64; 4]>,
    pub grid_points: Option<usize>,
    pub zero_tol: Option<f64>,
    pub tol: Option<f64>,
    pub quad_tol: Option<f64>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub channels: Option<Vec<String>>,
}

/// A number or an expression string.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Parse {
        line: usize,
        reason: String,
    },
    Validation(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => {
                write!(f, "cannot read {}: {source}", path.display())
            }
            ConfigError::Parse { line, reason } => write!(f, "config line {line}: {reason}"),
            ConfigError::Validation(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn load_config(path: &Path) -> Result<ProblemSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ProblemSpec, ConfigError> {
    let spec: ProblemSpec = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| {
            text[..s.start.min(text.len())].matches('\n').count() + 1
        });
        ConfigError::Parse {
            line,
            reason: e.message().to_string(),
        }
    })?;
    spec.validate()?;
    Ok(spec)
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Validation(msg.into()))
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.system;
        let custom = [
            s.a11.is_some(),
            s.a12.is_some(),
            s.a22.is_some(),
            s.potential.is_some(),
        ];
        match (&s.builtin, custom.iter().filter(|&&c| c).count()) {
            (Some(_), 0) | (None, 4) => {}
            (Some(_), _) => {
                return invalid("[system] takes either `builtin` or a11/a12/a22/V, not both")
            }
            (None, _) => return invalid("[system] needs `builtin` or all of a11, a12, a22, V"),
        }
        if let Some([lo, hi]) = s.interval {
            if !(lo < 0.0 && 0.0 < hi) {
                return invalid("[system] interval must contain 0 in its interior");
            }
        }
        if let Some(c) = &self.control {
            let explicit = c.m.is_some() || c.n.is_some();
            let count = [
                c.builtin.is_some(),
                explicit,
                c.synthesize.is_some(),
                c.sigma.is_some(),
            ]
            .iter()
            .filter(|&&b| b)
            .count();
            if count != 1 {
                return invalid(
                    "[control] takes exactly one of `builtin`, `M`/`N`, `synthesize`, `sigma`",
                );
            }
            if c.synthesize.is_none() && (c.m0.is_some() || c.step.is_some()) {
                return invalid("[control] `M0` and `step` only apply to `synthesize`");
            }
            if c.builtin.is_some() && s.builtin.is_none() {
                return invalid("[control] builtin controls need a builtin system");
            }
        }
        let r = &self.run;
        if r.grid_points.is_some_and(|n| n < 16) {
            return invalid("[run] grid_points must be at least 16");
        }
        for (name, v) in [
            ("t_end", r.t_end),
            ("h", r.h),
            ("zero_tol", r.zero_tol),
            ("tol", r.tol),
            ("quad_tol", r.quad_tol),
        ] {
            if v.is_some_and(|v| !(v > 0.0 && v.is_finite())) {
                return invalid(format!("[run] {name} must be positive"));
            }
        }
        for c in r.channels.iter().flatten() {
            c.parse::<Channel>().map_err(ConfigError::Validation)?;
        }
        Ok(())
    }
}
