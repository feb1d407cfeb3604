//! Two-qubit experiments with closed-form counterparts.

use ergoquench_core::ergotropy::{activation_time_from_records, EnergyBasis, ACTIVATION_THRESHOLD};
use ergoquench_core::oracles::{
    beta_critical, collective_s_infinity, collective_steady_spectrum, dephasing_two_qubit_block,
    passivity_predicate, t_c_analytic, two_qubit_collective_block, two_qubit_collective_sc,
    two_qubit_parallel_block, TwoQubitBlockState,
};
use ergoquench_core::{
    build_liouvillian, detect_steady, gibbs_state, propagate_to, ChannelSpec, DensityMatrix,
    ModelSpec, TimeGrid,
};
use rayon::prelude::*;

use super::{
    channel, engine, ergotropy_plot, grid, merge_stats, model, run_betas, sorted,
    trajectory_table, Experiment, Output, StateStats, ACTIVE_THRESHOLD, STEADY_TOL,
};
use crate::config::{ExperimentConfig, DEFAULT_BETAS};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// β grid used for the collective experiments; brackets the critical β at h = 0.1.
const COLLECTIVE_BETAS: [f64; 7] = [0.2, 0.3, 0.4, 0.5, 1.0, 2.0, 5.0];

const TRANSIENT_DT: f64 = 0.1;

/// Per-β (ergotropy, active) cells of one field value, its critical β, and state stats.
type FieldRow = (Vec<(f64, bool)>, f64, StateStats);

fn transient_grid(cfg: &ExperimentConfig) -> Result<TimeGrid, CliError> {
    // ln 2 / γ bounds every activation time; three times that covers the rise.
    let rise = cfg.t_max_or(3.0 * std::f64::consts::LN_2 / cfg.gamma, TRANSIENT_DT);
    let horizon = rise.min(cfg.t_max_or(800.0, TRANSIENT_DT));
    TimeGrid::covering(horizon, TRANSIENT_DT).map_err(engine("dynamics"))
}

pub(crate) fn fig2(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::Fig2;
    let n = cfg.n_or(2);
    let model = model(cfg, n)?;
    let chan = channel(cfg, 0.0, 0.0, 0.0)?;
    let betas = sorted(cfg.betas_or(&DEFAULT_BETAS));
    let runs = run_betas(&model, &chan, &betas, &grid(cfg, 800.0, 0.5)?, None)?;
    let transient = run_betas(&model, &chan, &betas, &transient_grid(cfg)?, None)?;

    let mut table = Table::new(
        "fig2_activation",
        &[
            "experiment",
            "n",
            "beta",
            "h",
            "gamma",
            "dt",
            "t_activation",
            "t_c_analytic",
            "steady_ergotropy",
            "converged",
        ],
    );
    let mut out = Output::default();
    for (long, short) in runs.iter().zip(&transient) {
        let t_act = activation_time_from_records(&short.records, ACTIVATION_THRESHOLD);
        let t_c = (n == 2)
            .then(|| t_c_analytic(long.beta, cfg.h, cfg.gamma).ok())
            .flatten();
        let steady = detect_steady(&long.traj, STEADY_TOL);
        table.push(vec![
            exp.name().into(),
            n.into(),
            long.beta.into(),
            cfg.h.into(),
            cfg.gamma.into(),
            short.traj.dt().into(),
            t_act.into(),
            t_c.into(),
            long.steady_ergotropy().into(),
            steady.converged.into(),
        ]);
        out.summary.push(format!(
            "beta={}: steady ergotropy {:.6}, activation {}",
            long.beta,
            long.steady_ergotropy(),
            t_act.map_or("none".to_string(), |t| format!("{t:.3}"))
        ));
    }
    out.stats = merge_stats(&runs);
    out.stats.merge(&merge_stats(&transient));
    out.tables.push(trajectory_table("fig2_trajectories", exp, &model, &chan, &runs));
    out.tables.push(table);
    out.plots.push(ergotropy_plot("fig2_ergotropy", "Parallel dissipation", &runs));
    Ok(out)
}

pub(crate) fn fig3(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::Fig3;
    let n = cfg.n_or(2);
    let model = model(cfg, n)?;
    let chan = channel(cfg, 0.0, 1.0, 0.0)?;
    let betas = sorted(cfg.betas_or(&COLLECTIVE_BETAS));
    let runs = run_betas(&model, &chan, &betas, &grid(cfg, 800.0, 0.5)?, None)?;
    let beta_c = (n == 2).then(|| beta_critical(cfg.h, 1e-12).ok()).flatten();

    let mut table = Table::new(
        "fig3_steady",
        &[
            "experiment",
            "n",
            "beta",
            "h",
            "steady_ergotropy",
            "active",
            "converged",
            "s_infinity",
            "passive_predicate",
            "beta_critical",
        ],
    );
    for run in &runs {
        let steady = detect_steady(&run.traj, STEADY_TOL);
        let two = n == 2;
        table.push(vec![
            exp.name().into(),
            n.into(),
            run.beta.into(),
            cfg.h.into(),
            run.steady_ergotropy().into(),
            (run.steady_ergotropy() > ACTIVE_THRESHOLD).into(),
            steady.converged.into(),
            two.then(|| collective_s_infinity(run.beta, cfg.h)).into(),
            if two {
                passivity_predicate(run.beta, cfg.h).into()
            } else {
                Cell::Empty
            },
            beta_c.into(),
        ]);
    }
    let mut out = Output {
        stats: merge_stats(&runs),
        ..Output::default()
    };
    if let Some(b) = beta_c {
        out.summary.push(format!("critical beta at h={}: {b:.6}", cfg.h));
    }
    for run in &runs {
        out.summary
            .push(format!("beta={}: steady ergotropy {:.6e}", run.beta, run.steady_ergotropy()));
    }
    out.tables.push(trajectory_table("fig3_trajectories", exp, &model, &chan, &runs));
    out.tables.push(table);
    out.plots.push(ergotropy_plot("fig3_ergotropy", "Collective dissipation", &runs));
    Ok(out)
}

/// Evenly spaced points from `lo` to `hi` inclusive.
pub(crate) fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect()
}

pub(crate) fn fig4(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::Fig4;
    let betas = linspace(0.1, 3.0, cfg.grid_points);
    let fields = linspace(0.0, 0.9, cfg.grid_points);
    let d_beta = if betas.len() > 1 { betas[1] - betas[0] } else { 0.0 };
    let t_end = cfg.t_max_or(800.0, 1.0);
    let chan = channel(cfg, 0.0, 1.0, 0.0)?;

    // One row of the grid per field value; each row shares a generator.
    let rows: Vec<FieldRow> = fields
        .par_iter()
        .map(|&h| {
            let m = ModelSpec::with_coupling(2, cfg.j, h).map_err(engine("model"))?;
            let hm = m.hamiltonian();
            let liou = build_liouvillian(&hm, &chan, &m).map_err(engine("channels"))?;
            let basis = EnergyBasis::new(&hm).map_err(engine("ergotropy"))?;
            let mut stats = StateStats::default();
            let mut cells = Vec::with_capacity(betas.len());
            for &beta in &betas {
                let rho0 = gibbs_state(&hm, beta).map_err(engine("model"))?;
                let rho = propagate_to(&liou, &rho0, t_end).map_err(engine("dynamics"))?;
                let rec = basis.record(&rho, t_end).map_err(engine("ergotropy"))?;
                stats.observe(&rho, rec.rho_spectrum.last().copied().unwrap_or(0.0));
                cells.push((rec.ergotropy, rec.ergotropy > ACTIVE_THRESHOLD));
            }
            let beta_c = beta_critical(h, 1e-12).map_err(engine("oracles"))?;
            Ok((cells, beta_c, stats))
        })
        .collect::<Result<_, CliError>>()?;

    let predicate = |i: usize, j: usize| !passivity_predicate(betas[j], fields[i]);
    let mut table = Table::new(
        "fig4_phase",
        &[
            "experiment",
            "beta",
            "h",
            "steady_ergotropy",
            "active",
            "predicted_active",
            "beta_critical",
            "near_boundary",
            "agree",
        ],
    );
    let mut out = Output::default();
    let (mut disagree, mut disagree_far) = (0usize, 0usize);
    for (i, (cells, beta_c, stats)) in rows.iter().enumerate() {
        out.stats.merge(stats);
        for (j, &(erg, active)) in cells.iter().enumerate() {
            let predicted = predicate(i, j);
            let neighbours = [
                (i.wrapping_sub(1), j),
                (i + 1, j),
                (i, j.wrapping_sub(1)),
                (i, j + 1),
            ];
            let near = (betas[j] - beta_c).abs() <= d_beta
                || neighbours
                    .iter()
                    .any(|&(a, b)| a < fields.len() && b < betas.len() && predicate(a, b) != predicted);
            let agree = active == predicted;
            if !agree {
                disagree += 1;
                if !near {
                    disagree_far += 1;
                }
            }
            table.push(vec![
                exp.name().into(),
                betas[j].into(),
                fields[i].into(),
                erg.into(),
                active.into(),
                predicted.into(),
                (*beta_c).into(),
                near.into(),
                agree.into(),
            ]);
        }
    }
    out.summary.push(format!(
        "{}x{} grid: {disagree} disagreements with the passivity predicate, {disagree_far} away from the boundary",
        fields.len(),
        betas.len()
    ));
    out.tables.push(table);
    Ok(out)
}

/// Maximum error of engine states against a block solution over a grid.
fn block_error(
    states: &[DensityMatrix],
    times: &[f64],
    solution: impl Fn(f64) -> TwoQubitBlockState,
) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for (rho, &t) in states.iter().zip(times) {
        worst = worst.max(solution(t).max_abs_diff(rho).map_err(engine("oracles"))?);
    }
    Ok(worst)
}

pub(crate) fn app_c(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::AppCCheck;
    let model = model(cfg, 2)?;
    let gamma = cfg.gamma;
    let betas = sorted(cfg.betas_or(&DEFAULT_BETAS));
    let grid = grid(cfg, 800.0, 0.5)?;
    let parallel = ChannelSpec::dissipation(gamma, 0.0).map_err(engine("channels"))?;
    let collective = ChannelSpec::dissipation(gamma, 1.0).map_err(engine("channels"))?;
    let dephasing = ChannelSpec::dephasing(gamma, 0.0).map_err(engine("channels"))?;

    let par = run_betas(&model, &parallel, &betas, &grid, None)?;
    let col = run_betas(&model, &collective, &betas, &grid, None)?;
    let dep = run_betas(&model, &dephasing, &betas, &grid, None)?;
    let transient = run_betas(&model, &parallel, &betas, &transient_grid(cfg)?, None)?;

    let mut table = Table::new(
        "appC_check",
        &["experiment", "beta", "check", "max_abs_error"],
    );
    let mut out = Output::default();
    for k in 0..betas.len() {
        let beta = betas[k];
        let init = TwoQubitBlockState::from_density(&par[k].traj.states[0]).map_err(engine("oracles"))?;
        let times = &par[k].traj.times;
        let e_par = block_error(&par[k].traj.states, times, |t| {
            two_qubit_parallel_block(&init, gamma, t)
        })?;
        let e_col = block_error(&col[k].traj.states, times, |t| {
            two_qubit_collective_block(&init, gamma, t)
        })?;
        let e_dep = block_error(&dep[k].traj.states, times, |t| {
            dephasing_two_qubit_block(&init, gamma, t)
        })?;
        let mut e_sc = 0.0f64;
        for (rho, &t) in col[k].traj.states.iter().zip(times) {
            let b = TwoQubitBlockState::from_density(rho).map_err(engine("oracles"))?;
            let (s, c) = two_qubit_collective_sc(&init, gamma, t);
            e_sc = e_sc.max((b.p_eg + b.p_ge - s).abs()).max((b.c.re - c).abs());
        }
        let mut expected = collective_steady_spectrum(beta, cfg.h)
            .map_err(engine("oracles"))?
            .to_vec();
        expected.sort_by(|a, b| b.total_cmp(a));
        let spectrum = &col[k].records.last().expect("nonempty grid").rho_spectrum;
        let e_spec = spectrum
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let t_act = activation_time_from_records(&transient[k].records, ACTIVATION_THRESHOLD);
        let e_tc = match (t_act, t_c_analytic(beta, cfg.h, gamma)) {
            (Some(a), Ok(b)) => Some((a - b).abs()),
            _ => None,
        };

        for (check, err) in [
            ("parallel_block", Some(e_par)),
            ("collective_block", Some(e_col)),
            ("collective_sc", Some(e_sc)),
            ("dephasing_block", Some(e_dep)),
            ("steady_spectrum", Some(e_spec)),
            ("activation_time", e_tc),
        ] {
            table.push(vec![exp.name().into(), beta.into(), check.into(), err.into()]);
        }
        out.summary.push(format!(
            "beta={beta}: block errors {e_par:.2e} / {e_col:.2e} / {e_sc:.2e} / {e_dep:.2e}, steady spectrum {e_spec:.2e}"
        ));
    }
    for runs in [&par, &col, &dep, &transient] {
        out.stats.merge(&merge_stats(runs));
    }
    out.tables.push(table);
    Ok(out)
}
