//! Experiment registry and the shared simulation helpers behind it.

mod chain;
mod jc;
mod sweeps;
mod two_qubit;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ergoquench_core::ergotropy::{EnergyBasis, ErgotropyRecord};
use ergoquench_core::model::StateDeviation;
use ergoquench_core::oracles::DarkSubspace;
use ergoquench_core::{
    build_liouvillian, gibbs_state, propagate, ChannelSpec, DensityMatrix, ModelSpec, TimeGrid,
    Trajectory,
};
use rayon::prelude::*;

use crate::config::{self, ConfigError, ExperimentConfig};
use crate::error::CliError;
use crate::svg::{Plot, Series};
use crate::table::{Cell, Table};

/// Steady ergotropy above this counts as non-passive.
pub const ACTIVE_THRESHOLD: f64 = 1e-4;

/// Step-to-step change (per unit time) below which a trajectory is settled.
pub const STEADY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    AppBDiss,
    AppBDeph,
    AppBChannels,
    AppCCheck,
    AppD,
    Fig9Jc,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Experiment::Fig2,
        Experiment::Fig3,
        Experiment::Fig4,
        Experiment::Fig5,
        Experiment::Fig6,
        Experiment::Fig7,
        Experiment::Fig8,
        Experiment::AppBDiss,
        Experiment::AppBDeph,
        Experiment::AppBChannels,
        Experiment::AppCCheck,
        Experiment::AppD,
        Experiment::Fig9Jc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Fig6 => "fig6",
            Experiment::Fig7 => "fig7",
            Experiment::Fig8 => "fig8",
            Experiment::AppBDiss => "appB-diss",
            Experiment::AppBDeph => "appB-deph",
            Experiment::AppBChannels => "appB-channels",
            Experiment::AppCCheck => "appC-check",
            Experiment::AppD => "appD",
            Experiment::Fig9Jc => "fig9-jc",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Fig2 => "N=2, parallel dissipation: ergotropy trajectories and activation times",
            Experiment::Fig3 => "N=2, collective dissipation: trajectories, steady ergotropy, critical beta",
            Experiment::Fig4 => "N=2, collective dissipation: steady-state passivity over a (beta, h) grid",
            Experiment::Fig5 => "N=4, parallel dissipation: trajectories and ergotropy differences vs a reference beta",
            Experiment::Fig6 => "N=4, collective dissipation: trajectories with dark-subspace population",
            Experiment::Fig7 => "dark-subspace population of Gibbs states versus beta",
            Experiment::Fig8 => "parallel and collective dephasing: trajectories, differences, coherence decay rates",
            Experiment::AppBDiss => "steady ergotropy versus dissipation collectivity alpha_minus",
            Experiment::AppBDeph => "steady ergotropy versus dephasing collectivity alpha_z",
            Experiment::AppBChannels => "dissipation/dephasing mixing alpha: steady ergotropy and settling time",
            Experiment::AppCCheck => "N=2 engine versus closed-form solutions",
            Experiment::AppD => "N=4 parallel: energies, eigenvalue crossings, energy-level populations",
            Experiment::Fig9Jc => "lossy-cavity Jaynes-Cummings versus the effective atomic decay",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::UnknownExperiment(s.to_string()))
    }
}

/// Worst physical-state deviation over every state an experiment stored.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StateStats {
    pub count: usize,
    pub worst: StateDeviation,
}

impl StateStats {
    /// Records one state whose eigenvalues are already known.
    pub fn observe(&mut self, rho: &DensityMatrix, min_eigenvalue: f64) {
        let m = rho.matrix();
        let dev = StateDeviation {
            trace: (m.trace().re - 1.0).abs().max(m.trace().im.abs()),
            hermiticity: m.hermiticity_deviation(),
            min_eigenvalue,
        };
        self.worst = if self.count == 0 {
            dev
        } else {
            self.worst.worst(dev)
        };
        self.count += 1;
    }

    pub fn observe_state(&mut self, rho: &DensityMatrix) {
        let min = rho.eigenvalues().first().copied().unwrap_or(0.0);
        self.observe(rho, min);
    }

    pub fn merge(&mut self, other: &StateStats) {
        if other.count == 0 {
            return;
        }
        self.worst = if self.count == 0 {
            other.worst
        } else {
            self.worst.worst(other.worst)
        };
        self.count += other.count;
    }

    /// Whether every observed state meets trace, Hermiticity and positivity bounds.
    pub fn within(&self, tol: f64) -> bool {
        self.worst.trace <= tol && self.worst.hermiticity <= tol && self.worst.min_eigenvalue >= -tol
    }
}

/// What a finished run wrote and how physical its states were.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub experiment: Experiment,
    pub files: Vec<PathBuf>,
    pub tables: Vec<Table>,
    pub stats: StateStats,
    pub summary: Vec<String>,
}

#[derive(Default)]
pub(crate) struct Output {
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
    pub stats: StateStats,
    pub summary: Vec<String>,
}

pub(crate) fn engine(module: &'static str) -> impl Fn(ergoquench_core::Error) -> CliError {
    move |e| CliError::engine(module, e)
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("ERGOQUENCH_THREADS") {
        let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            ConfigError::Parse {
                key: "ERGOQUENCH_THREADS".into(),
                value: raw.clone(),
            }
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
}

/// Runs one experiment and writes its CSV (and optionally SVG) files.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    config::check(cfg)?;
    let experiment = cfg.require_experiment()?;
    let out = thread_pool()?.install(|| match experiment {
        Experiment::Fig2 => two_qubit::fig2(cfg),
        Experiment::Fig3 => two_qubit::fig3(cfg),
        Experiment::Fig4 => two_qubit::fig4(cfg),
        Experiment::AppCCheck => two_qubit::app_c(cfg),
        Experiment::Fig5 => chain::fig5(cfg),
        Experiment::Fig6 => chain::fig6(cfg),
        Experiment::Fig7 => chain::fig7(cfg),
        Experiment::Fig8 => chain::fig8(cfg),
        Experiment::AppD => chain::app_d(cfg),
        Experiment::AppBDiss => sweeps::app_b_diss(cfg),
        Experiment::AppBDeph => sweeps::app_b_deph(cfg),
        Experiment::AppBChannels => sweeps::app_b_channels(cfg),
        Experiment::Fig9Jc => jc::fig9(cfg),
    })?;

    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut files = Vec::new();
    for table in &out.tables {
        files.push(table.write_csv(&cfg.output_dir)?);
    }
    if cfg.emit_svg {
        for plot in &out.plots {
            let path = cfg.output_dir.join(plot.file_name());
            std::fs::write(&path, plot.render())?;
            files.push(path);
        }
    }
    Ok(RunReport {
        experiment,
        files,
        tables: out.tables,
        stats: out.stats,
        summary: out.summary,
    })
}

// ---- shared helpers -------------------------------------------------------

pub(crate) fn model(cfg: &ExperimentConfig, n: usize) -> Result<ModelSpec, CliError> {
    ModelSpec::with_coupling(n, cfg.j, cfg.h).map_err(engine("model"))
}

/// Channel with per-experiment defaults, overridden by explicit config keys.
pub(crate) fn channel(
    cfg: &ExperimentConfig,
    alpha: f64,
    alpha_minus: f64,
    alpha_z: f64,
) -> Result<ChannelSpec, CliError> {
    ChannelSpec::new(
        cfg.gamma,
        cfg.f64_or("alpha", cfg.alpha, alpha),
        cfg.f64_or("alpha_minus", cfg.alpha_minus, alpha_minus),
        cfg.f64_or("alpha_z", cfg.alpha_z, alpha_z),
    )
    .map_err(engine("channels"))
}

pub(crate) fn grid(cfg: &ExperimentConfig, t_max: f64, dt: f64) -> Result<TimeGrid, CliError> {
    let dt = cfg.dt_or(dt);
    TimeGrid::new(cfg.t_max_or(t_max, dt), dt).map_err(engine("dynamics"))
}

pub(crate) fn sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

/// One Gibbs-initialized trajectory and its ergotropy analysis.
pub(crate) struct BetaRun {
    pub beta: f64,
    pub traj: Trajectory,
    pub records: Vec<ErgotropyRecord>,
    pub p_dark: Option<Vec<f64>>,
    pub stats: StateStats,
}

impl BetaRun {
    pub fn steady_ergotropy(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.ergotropy)
    }

    pub fn ergotropies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ergotropy).collect()
    }
}

pub(crate) fn analyse(
    beta: f64,
    traj: Trajectory,
    basis: &EnergyBasis,
    dark: Option<&DarkSubspace>,
) -> Result<BetaRun, CliError> {
    let records = basis.series(&traj).map_err(engine("ergotropy"))?;
    let mut stats = StateStats::default();
    for (rho, rec) in traj.states.iter().zip(&records) {
        stats.observe(rho, rec.rho_spectrum.last().copied().unwrap_or(0.0));
    }
    let p_dark = dark.map(|d| traj.states.iter().map(|rho| d.population(rho)).collect());
    Ok(BetaRun {
        beta,
        traj,
        records,
        p_dark,
        stats,
    })
}

/// Propagates the Gibbs state of every β under one generator, in parallel.
pub(crate) fn run_betas(
    model: &ModelSpec,
    channel: &ChannelSpec,
    betas: &[f64],
    grid: &TimeGrid,
    dark: Option<&DarkSubspace>,
) -> Result<Vec<BetaRun>, CliError> {
    let h = model.hamiltonian();
    let liou = build_liouvillian(&h, channel, model).map_err(engine("channels"))?;
    let basis = EnergyBasis::new(&h).map_err(engine("ergotropy"))?;
    betas
        .par_iter()
        .map(|&beta| {
            let rho0 = gibbs_state(&h, beta).map_err(engine("model"))?;
            let traj = propagate(&liou, &rho0, grid)
                .map_err(engine("dynamics"))?
                .with_metadata(*model, *channel);
            analyse(beta, traj, &basis, dark)
        })
        .collect()
}

pub(crate) fn trajectory_table(
    name: &str,
    experiment: Experiment,
    model: &ModelSpec,
    channel: &ChannelSpec,
    runs: &[BetaRun],
) -> Table {
    let d = model.dim();
    let with_dark = runs.iter().any(|r| r.p_dark.is_some());
    let mut columns: Vec<String> = [
        "experiment",
        "n",
        "beta",
        "alpha",
        "alpha_minus",
        "alpha_z",
        "time",
        "energy",
        "passive_energy",
        "ergotropy",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if with_dark {
        columns.push("p_dark".into());
    }
    columns.extend((1..=d).map(|k| format!("lambda_{k}")));
    let mut table = Table::with_columns(name, columns);
    for run in runs {
        for (k, rec) in run.records.iter().enumerate() {
            let mut row: Vec<Cell> = vec![
                experiment.name().into(),
                model.n_qubits.into(),
                run.beta.into(),
                channel.alpha.into(),
                channel.alpha_minus.into(),
                channel.alpha_z.into(),
                rec.time.into(),
                rec.energy.into(),
                rec.passive_energy.into(),
                rec.ergotropy.into(),
            ];
            if with_dark {
                row.push(run.p_dark.as_ref().map(|p| p[k]).into());
            }
            row.extend(rec.rho_spectrum.iter().map(|&l| Cell::from(l)));
            table.push(row);
        }
    }
    table
}

pub(crate) fn ergotropy_plot(name: &str, title: &str, runs: &[BetaRun]) -> Plot {
    Plot {
        name: name.to_string(),
        title: title.to_string(),
        x_label: "time".into(),
        y_label: "ergotropy".into(),
        series: runs
            .iter()
            .map(|r| Series {
                label: format!("beta = {}", r.beta),
                points: r.records.iter().map(|rec| (rec.time, rec.ergotropy)).collect(),
            })
            .collect(),
    }
}

pub(crate) fn merge_stats(runs: &[BetaRun]) -> StateStats {
    let mut stats = StateStats::default();
    for r in runs {
        stats.merge(&r.stats);
    }
    stats
}
