//! Lossy-cavity Jaynes-Cummings model against the effective atomic decay.

use ergoquench_core::jc::{compare_jc, JCSpec, JcComparison};
use ergoquench_core::{DensityMatrix, TimeGrid};
use rayon::prelude::*;

use super::{engine, sorted, Experiment, Output};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::svg::{Plot, Series};
use crate::table::Table;

/// Horizon in units of the slowest effective decay time.
const DECAY_TIMES: f64 = 8.0;

fn excited(rho: &DensityMatrix) -> f64 {
    rho.matrix()[(0, 0)].re
}

fn coherence(rho: &DensityMatrix) -> f64 {
    rho.matrix()[(0, 1)].norm()
}

pub(crate) fn fig9(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::Fig9Jc;
    let g = cfg.g;
    let omega_q = cfg.omega_q.unwrap_or(10.0 * g);
    let omega_c = cfg.omega_c.unwrap_or(omega_q);
    let ratios = sorted(cfg.kappa_over_g.clone());
    let max_ratio = *ratios.last().expect("validated nonempty");
    let base = JCSpec::new(omega_q, omega_c, g, max_ratio * g).map_err(engine("jc"))?;
    let dt = cfg.dt_or(0.05);
    let horizon = if cfg.is_set("t_max") {
        cfg.t_max
    } else {
        DECAY_TIMES / base.gamma_eff().max(f64::MIN_POSITIVE)
    };
    let grid = TimeGrid::covering(horizon, dt).map_err(engine("dynamics"))?;

    let results: Vec<JcComparison> = ratios
        .par_iter()
        .map(|&r| {
            compare_jc(&base, &[r], &grid)
                .map(|mut v| v.remove(0))
                .map_err(engine("jc"))
        })
        .collect::<Result<_, CliError>>()?;

    let mut table = Table::new(
        "fig9_jc_table",
        &[
            "experiment",
            "kappa_over_g",
            "kappa",
            "gamma_eff",
            "max_deviation",
            "max_coherence_full",
            "max_coherence_effective",
        ],
    );
    let mut series = Table::new(
        "fig9_jc_series",
        &["experiment", "kappa_over_g", "time", "p_ee_full", "p_ee_effective"],
    );
    let mut plot = Plot {
        name: "fig9_jc".into(),
        title: "Excited population: cavity model and effective decay".into(),
        x_label: "time".into(),
        y_label: "p_ee".into(),
        series: Vec::new(),
    };
    let mut out = Output::default();
    for res in &results {
        let spec = base
            .with_kappa(res.kappa_over_g * g)
            .map_err(engine("jc"))?;
        let max_coh = |states: &[DensityMatrix]| states.iter().map(coherence).fold(0.0, f64::max);
        for rho in res.full.states.iter().chain(&res.effective.states) {
            out.stats.observe_state(rho);
        }
        table.push(vec![
            exp.name().into(),
            res.kappa_over_g.into(),
            spec.kappa.into(),
            spec.gamma_eff().into(),
            res.max_deviation.into(),
            max_coh(&res.full.states).into(),
            max_coh(&res.effective.states).into(),
        ]);
        out.summary.push(format!(
            "kappa/g={}: max |p_ee deviation| {:.3e}",
            res.kappa_over_g, res.max_deviation
        ));
        let mut full = Vec::new();
        let mut eff = Vec::new();
        for ((&t, a), b) in res.full.times.iter().zip(&res.full.states).zip(&res.effective.states) {
            series.push(vec![
                exp.name().into(),
                res.kappa_over_g.into(),
                t.into(),
                excited(a).into(),
                excited(b).into(),
            ]);
            full.push((t, excited(a)));
            eff.push((t, excited(b)));
        }
        plot.series.push(Series {
            label: format!("full, kappa/g = {}", res.kappa_over_g),
            points: full,
        });
        plot.series.push(Series {
            label: format!("effective, kappa/g = {}", res.kappa_over_g),
            points: eff,
        });
    }
    out.tables.push(table);
    out.tables.push(series);
    out.plots.push(plot);
    Ok(out)
}
