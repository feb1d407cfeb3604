//! Steady ergotropy as the bath collectivity and channel mixture vary.

use ergoquench_core::ergotropy::EnergyBasis;
use ergoquench_core::{
    build_liouvillian, detect_steady, gibbs_state, propagate, propagate_to, ChannelSpec,
};
use rayon::prelude::*;

use super::{
    analyse, engine, grid, model, sorted, Experiment, Output, StateStats, STEADY_TOL,
};
use crate::config::{ExperimentConfig, DEFAULT_BETAS};
use crate::error::CliError;
use crate::svg::{Plot, Series};
use crate::table::{Cell, Table};

const DISSIPATION_ALPHAS: [f64; 13] = [
    0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 1.0,
];
const DEPHASING_ALPHAS: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const MIXING_ALPHAS: [f64; 6] = [0.0, 0.3, 0.5, 0.7, 0.9, 1.0];

/// Ergotropy within this of its final value counts as settled.
pub const SETTLE_TOL: f64 = 1e-3;

/// Every `SERIES_STRIDE`-th sample of the mixing runs goes into the series table.
const SERIES_STRIDE: usize = 10;

fn sizes(cfg: &ExperimentConfig) -> Vec<usize> {
    if cfg.is_set("n_qubits") {
        vec![cfg.n_qubits]
    } else {
        vec![2, 4]
    }
}

/// Steady ergotropy at the horizon for every (collectivity, β) pair.
fn collectivity_sweep(
    cfg: &ExperimentConfig,
    exp: Experiment,
    key: &str,
    alphas: &[f64],
    make: impl Fn(f64) -> Result<ChannelSpec, CliError> + Sync,
) -> Result<Output, CliError> {
    let betas = sorted(cfg.betas_or(&DEFAULT_BETAS));
    let t_end = cfg.t_max_or(800.0, 1.0);
    let mut table = Table::new(
        &format!("{}_steady", exp.name().replace('-', "_")),
        &["experiment", "n", "beta", key, "time", "steady_ergotropy"],
    );
    let mut out = Output::default();
    let mut plot = Plot {
        name: exp.name().replace('-', "_"),
        title: format!("Steady ergotropy versus {key}"),
        x_label: key.to_string(),
        y_label: "ergotropy".into(),
        series: Vec::new(),
    };
    for n in sizes(cfg) {
        let model = model(cfg, n)?;
        let hm = model.hamiltonian();
        let basis = EnergyBasis::new(&hm).map_err(engine("ergotropy"))?;
        let points: Vec<(f64, f64, f64, StateStats)> = alphas
            .par_iter()
            .flat_map_iter(|&a| betas.iter().map(move |&b| (a, b)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(a, beta)| {
                let liou = build_liouvillian(&hm, &make(a)?, &model).map_err(engine("channels"))?;
                let rho0 = gibbs_state(&hm, beta).map_err(engine("model"))?;
                let rho = propagate_to(&liou, &rho0, t_end).map_err(engine("dynamics"))?;
                let rec = basis.record(&rho, t_end).map_err(engine("ergotropy"))?;
                let mut stats = StateStats::default();
                stats.observe(&rho, rec.rho_spectrum.last().copied().unwrap_or(0.0));
                Ok((a, beta, rec.ergotropy, stats))
            })
            .collect::<Result<_, CliError>>()?;
        for &beta in &betas {
            plot.series.push(Series {
                label: format!("N = {n}, beta = {beta}"),
                points: points
                    .iter()
                    .filter(|p| p.1 == beta)
                    .map(|p| (p.0, p.2))
                    .collect(),
            });
        }
        for (a, beta, erg, stats) in points {
            out.stats.merge(&stats);
            table.push(vec![
                exp.name().into(),
                n.into(),
                beta.into(),
                a.into(),
                t_end.into(),
                erg.into(),
            ]);
        }
    }
    out.summary
        .push(format!("{} points at t={t_end}", table.rows.len()));
    out.tables.push(table);
    out.plots.push(plot);
    Ok(out)
}

pub(crate) fn app_b_diss(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let alphas = sorted(cfg.alphas_or(&DISSIPATION_ALPHAS));
    collectivity_sweep(cfg, Experiment::AppBDiss, "alpha_minus", &alphas, |a| {
        ChannelSpec::new(cfg.gamma, 0.0, a, 0.0).map_err(engine("channels"))
    })
}

pub(crate) fn app_b_deph(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let alphas = sorted(cfg.alphas_or(&DEPHASING_ALPHAS));
    collectivity_sweep(cfg, Experiment::AppBDeph, "alpha_z", &alphas, |a| {
        ChannelSpec::new(cfg.gamma, 1.0, 0.0, a).map_err(engine("channels"))
    })
}

/// Panels of the mixing study: (label, α⁻ = αᶻ, β).
const PANELS: [(&str, f64, f64); 3] = [("a", 0.0, 0.2), ("b", 0.0, 5.0), ("c", 1.0, 0.2)];

/// First grid time after which the series stays within `SETTLE_TOL` of its last value.
pub(crate) fn settle_time(times: &[f64], values: &[f64]) -> f64 {
    let last = *values.last().expect("nonempty series");
    let k = values
        .iter()
        .rposition(|v| (v - last).abs() >= SETTLE_TOL)
        .map_or(0, |k| k + 1);
    times[k.min(times.len() - 1)]
}

pub(crate) fn app_b_channels(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::AppBChannels;
    let n = cfg.n_or(2);
    let model = model(cfg, n)?;
    let hm = model.hamiltonian();
    let basis = EnergyBasis::new(&hm).map_err(engine("ergotropy"))?;
    let alphas = sorted(cfg.alphas_or(&MIXING_ALPHAS));
    let grid = grid(cfg, 4000.0, 1.0)?;

    let jobs: Vec<(&str, f64, f64, f64)> = PANELS
        .iter()
        .flat_map(|&(label, coll, beta)| alphas.iter().map(move |&a| (label, coll, beta, a)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(_, coll, beta, a)| {
            let am = cfg.f64_or("alpha_minus", cfg.alpha_minus, coll);
            let az = cfg.f64_or("alpha_z", cfg.alpha_z, coll);
            let chan = ChannelSpec::new(cfg.gamma, a, am, az).map_err(engine("channels"))?;
            let liou = build_liouvillian(&hm, &chan, &model).map_err(engine("channels"))?;
            let rho0 = gibbs_state(&hm, beta).map_err(engine("model"))?;
            let traj = propagate(&liou, &rho0, &grid)
                .map_err(engine("dynamics"))?
                .with_metadata(model, chan);
            Ok((chan, analyse(beta, traj, &basis, None)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut steady = Table::new(
        "appB_channels_steady",
        &[
            "experiment",
            "n",
            "panel",
            "beta",
            "alpha_minus",
            "alpha_z",
            "alpha",
            "steady_ergotropy",
            "t_settle",
            "converged",
        ],
    );
    let mut series = Table::new(
        "appB_channels_series",
        &["experiment", "n", "panel", "beta", "alpha", "time", "ergotropy"],
    );
    let mut out = Output::default();
    for &(label, _, _) in &PANELS {
        out.plots.push(Plot {
            name: format!("appB_channels_{label}"),
            title: format!("Channel mixing, panel {label}"),
            x_label: "time".into(),
            y_label: "ergotropy".into(),
            series: Vec::new(),
        });
    }
    for (&(label, _, _, a), (chan, run)) in jobs.iter().zip(&runs) {
        out.stats.merge(&run.stats);
        let erg = run.ergotropies();
        let t_settle = settle_time(&run.traj.times, &erg);
        let converged = detect_steady(&run.traj, STEADY_TOL).converged;
        steady.push(vec![
            exp.name().into(),
            n.into(),
            label.into(),
            run.beta.into(),
            chan.alpha_minus.into(),
            chan.alpha_z.into(),
            a.into(),
            run.steady_ergotropy().into(),
            t_settle.into(),
            converged.into(),
        ]);
        out.summary.push(format!(
            "panel {label}, alpha={a}: ergotropy {:.6}, settles at {t_settle}",
            run.steady_ergotropy()
        ));
        let mut points = Vec::new();
        for (k, (&t, &e)) in run.traj.times.iter().zip(&erg).enumerate() {
            if k % SERIES_STRIDE == 0 || k + 1 == erg.len() {
                series.push(vec![
                    exp.name().into(),
                    n.into(),
                    label.into(),
                    run.beta.into(),
                    a.into(),
                    t.into(),
                    Cell::from(e),
                ]);
                points.push((t, e));
            }
        }
        let plot = out
            .plots
            .iter_mut()
            .find(|p| p.name.ends_with(label))
            .expect("one plot per panel");
        plot.series.push(Series {
            label: format!("alpha = {a}"),
            points,
        });
    }
    out.tables.push(steady);
    out.tables.push(series);
    Ok(out)
}
