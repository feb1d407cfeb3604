//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys that an
//! experiment does not set explicitly fall back to that experiment's own
//! defaults, so the same file can drive several experiments.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::experiments::Experiment;

pub const DEFAULT_H: f64 = 0.1;
pub const DEFAULT_GAMMA: f64 = 0.05;
pub const DEFAULT_DT: f64 = 0.5;
pub const DEFAULT_T_MAX: f64 = 800.0;
pub const DEFAULT_BETAS: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 5.0];

/// Largest chain the dense 4^N × 4^N Liouvillian is built for.
pub const MAX_CLI_QUBITS: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("{key}: cannot parse `{value}`")]
    Parse { key: String, value: String },
    #[error("{key} {reason} (got {value})")]
    Range {
        key: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("unknown experiment `{0}` (see `ergoquench list`)")]
    UnknownExperiment(String),
    #[error("no experiment given")]
    MissingExperiment,
}

const KEYS: &[&str] = &[
    "experiment",
    "n_qubits",
    "h",
    "gamma",
    "j",
    "beta_list",
    "alpha",
    "alpha_minus",
    "alpha_z",
    "alpha_list",
    "t_max",
    "dt",
    "output_dir",
    "emit_svg",
    "reference_beta",
    "grid_points",
    "kappa_over_g",
    "g",
    "omega_q",
    "omega_c",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub n_qubits: usize,
    pub h: f64,
    pub gamma: f64,
    pub j: f64,
    pub beta_list: Vec<f64>,
    pub alpha: f64,
    pub alpha_minus: f64,
    pub alpha_z: f64,
    /// Sweep values for α, α⁻ or αᶻ, depending on the experiment.
    pub alpha_list: Vec<f64>,
    pub t_max: f64,
    pub dt: f64,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
    pub reference_beta: f64,
    pub grid_points: usize,
    pub kappa_over_g: Vec<f64>,
    pub g: f64,
    pub omega_q: Option<f64>,
    pub omega_c: Option<f64>,
    explicit: BTreeSet<&'static str>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            n_qubits: 2,
            h: DEFAULT_H,
            gamma: DEFAULT_GAMMA,
            j: 1.0,
            beta_list: DEFAULT_BETAS.to_vec(),
            alpha: 0.0,
            alpha_minus: 0.0,
            alpha_z: 0.0,
            alpha_list: Vec::new(),
            t_max: DEFAULT_T_MAX,
            dt: DEFAULT_DT,
            output_dir: PathBuf::from("results"),
            emit_svg: false,
            reference_beta: 5.0,
            grid_points: 50,
            kappa_over_g: vec![1.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            g: 1.0,
            omega_q: None,
            omega_c: None,
            explicit: BTreeSet::new(),
        }
    }
}

impl ExperimentConfig {
    /// Whether `key` was set by the configuration rather than defaulted.
    pub fn is_set(&self, key: &str) -> bool {
        self.explicit.contains(key)
    }

    /// Marks `key` as explicitly set (used when overriding from the command line).
    pub fn mark_set(&mut self, key: &str) {
        if let Some(k) = KEYS.iter().find(|k| **k == key) {
            self.explicit.insert(k);
        }
    }

    pub fn n_or(&self, fallback: usize) -> usize {
        if self.is_set("n_qubits") {
            self.n_qubits
        } else {
            fallback
        }
    }

    pub fn betas_or(&self, fallback: &[f64]) -> Vec<f64> {
        if self.is_set("beta_list") {
            self.beta_list.clone()
        } else {
            fallback.to_vec()
        }
    }

    pub fn alphas_or(&self, fallback: &[f64]) -> Vec<f64> {
        if self.is_set("alpha_list") {
            self.alpha_list.clone()
        } else {
            fallback.to_vec()
        }
    }

    /// The configured horizon, or `fallback` rounded up to a multiple of `dt`.
    pub fn t_max_or(&self, fallback: f64, dt: f64) -> f64 {
        if self.is_set("t_max") {
            self.t_max
        } else {
            (fallback / dt - 1e-9).ceil() * dt
        }
    }

    pub fn dt_or(&self, fallback: f64) -> f64 {
        if self.is_set("dt") {
            self.dt
        } else {
            fallback
        }
    }

    pub fn f64_or(&self, key: &str, value: f64, fallback: f64) -> f64 {
        if self.is_set(key) {
            value
        } else {
            fallback
        }
    }

    /// The experiment, or an error when none was given.
    pub fn require_experiment(&self) -> Result<Experiment, ConfigError> {
        self.experiment.ok_or(ConfigError::MissingExperiment)
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Parse {
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(ConfigError::Parse {
            key: key.to_string(),
            value: value.to_string(),
        }),
    }
}

fn range(key: &'static str, value: f64, reason: &'static str) -> ConfigError {
    ConfigError::Range {
        key,
        value: value.to_string(),
        reason,
    }
}

fn check_unit(key: &'static str, value: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(range(key, value, "out of [0,1]"))
    }
}

/// Parses, defaults and range-checks a configuration text.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let Some((key, value)) = text.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: line_no,
                text: text.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::UnknownKey {
                line: line_no,
                key: key.to_string(),
            });
        };
        if !cfg.explicit.insert(key) {
            return Err(ConfigError::Duplicate {
                line: line_no,
                key: key.to_string(),
            });
        }
        match key {
            "experiment" => {
                cfg.experiment = Some(
                    value
                        .parse()
                        .map_err(|_| ConfigError::UnknownExperiment(value.to_string()))?,
                )
            }
            "n_qubits" => cfg.n_qubits = parse_num(key, value)?,
            "h" => cfg.h = parse_num(key, value)?,
            "gamma" => cfg.gamma = parse_num(key, value)?,
            "j" => cfg.j = parse_num(key, value)?,
            "beta_list" => cfg.beta_list = parse_list(key, value)?,
            "alpha" => cfg.alpha = parse_num(key, value)?,
            "alpha_minus" => cfg.alpha_minus = parse_num(key, value)?,
            "alpha_z" => cfg.alpha_z = parse_num(key, value)?,
            "alpha_list" => cfg.alpha_list = parse_list(key, value)?,
            "t_max" => cfg.t_max = parse_num(key, value)?,
            "dt" => cfg.dt = parse_num(key, value)?,
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            "emit_svg" => cfg.emit_svg = parse_bool(key, value)?,
            "reference_beta" => cfg.reference_beta = parse_num(key, value)?,
            "grid_points" => cfg.grid_points = parse_num(key, value)?,
            "kappa_over_g" => cfg.kappa_over_g = parse_list(key, value)?,
            "g" => cfg.g = parse_num(key, value)?,
            "omega_q" => cfg.omega_q = Some(parse_num(key, value)?),
            "omega_c" => cfg.omega_c = Some(parse_num(key, value)?),
            _ => unreachable!("key list and match arms agree"),
        }
    }
    check(&cfg)?;
    Ok(cfg)
}

/// Range checks shared by file parsing and command-line overrides.
pub fn check(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    if !(1..=MAX_CLI_QUBITS).contains(&cfg.n_qubits) {
        return Err(range("n_qubits", cfg.n_qubits as f64, "must be in 1..=4"));
    }
    if !(cfg.h.is_finite() && cfg.h >= 0.0) {
        return Err(range("h", cfg.h, "must be finite and non-negative"));
    }
    if !(cfg.gamma.is_finite() && cfg.gamma >= 0.0) {
        return Err(range("gamma", cfg.gamma, "must be finite and non-negative"));
    }
    if cfg.j != 1.0 {
        return Err(range("j", cfg.j, "must be 1 (closed-form checks assume J = 1)"));
    }
    if cfg.beta_list.is_empty() {
        return Err(ConfigError::Range {
            key: "beta_list",
            value: "[]".into(),
            reason: "must not be empty",
        });
    }
    if let Some(&b) = cfg.beta_list.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
        return Err(range("beta_list", b, "entries must be finite and non-negative"));
    }
    check_unit("alpha", cfg.alpha)?;
    check_unit("alpha_minus", cfg.alpha_minus)?;
    check_unit("alpha_z", cfg.alpha_z)?;
    for &a in &cfg.alpha_list {
        check_unit("alpha_list", a)?;
    }
    if !(cfg.dt > 0.0 && cfg.dt <= 1.0) {
        return Err(range("dt", cfg.dt, "must lie in (0, 1]"));
    }
    if !(cfg.t_max.is_finite() && cfg.t_max > 0.0) {
        return Err(range("t_max", cfg.t_max, "must be positive"));
    }
    let ratio = cfg.t_max / cfg.dt;
    let both_set = cfg.is_set("t_max") && cfg.is_set("dt");
    if both_set && (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
        return Err(range("t_max", cfg.t_max, "must be a whole multiple of dt"));
    }
    if !(cfg.reference_beta.is_finite() && cfg.reference_beta > 0.0) {
        return Err(range("reference_beta", cfg.reference_beta, "must be positive"));
    }
    if cfg.grid_points < 2 {
        return Err(range("grid_points", cfg.grid_points as f64, "must be at least 2"));
    }
    if cfg.kappa_over_g.is_empty() {
        return Err(ConfigError::Range {
            key: "kappa_over_g",
            value: "[]".into(),
            reason: "must not be empty",
        });
    }
    if let Some(&r) = cfg.kappa_over_g.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(range("kappa_over_g", r, "entries must be positive"));
    }
    if !(cfg.g.is_finite() && cfg.g > 0.0) {
        return Err(range("g", cfg.g, "must be positive"));
    }
    for (key, v) in [("omega_q", cfg.omega_q), ("omega_c", cfg.omega_c)] {
        if let Some(v) = v {
            if !v.is_finite() {
                return Err(range(key, v, "must be finite"));
            }
        }
    }
    Ok(())
}
