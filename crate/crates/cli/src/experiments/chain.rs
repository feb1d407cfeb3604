//! Multi-qubit chain experiments: crossings, dark states, dephasing.

use ergoquench_core::ergotropy::{
    eigenvalue_crossings, ergotropy_difference_from_records, EnergyBasis, VISIBLE_CROSSING_LEVEL,
};
use ergoquench_core::linalg::{vector_norm, C64};
use ergoquench_core::model::CollectiveOp;
use ergoquench_core::oracles::{dark_population, dark_subspace};
use ergoquench_core::{
    build_liouvillian, detect_steady, propagate, ChannelSpec, DensityMatrix, ModelSpec, TimeGrid,
};
use rayon::prelude::*;

use super::{
    channel, engine, ergotropy_plot, grid, merge_stats, model, run_betas, sorted,
    trajectory_table, BetaRun, Experiment, Output, StateStats, STEADY_TOL,
};
use crate::config::{ExperimentConfig, DEFAULT_BETAS, MAX_CLI_QUBITS};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// Betas of the run plus the reference β, sorted.
fn betas_with_reference(cfg: &ExperimentConfig, fallback: &[f64]) -> Vec<f64> {
    let mut betas = cfg.betas_or(fallback);
    betas.push(cfg.reference_beta);
    sorted(betas)
}

fn reference_run<'a>(cfg: &ExperimentConfig, runs: &'a [BetaRun]) -> &'a BetaRun {
    runs.iter()
        .find(|r| r.beta == cfg.reference_beta)
        .expect("reference beta is part of the grid")
}

fn difference_table(
    name: &str,
    exp: Experiment,
    n: usize,
    cfg: &ExperimentConfig,
    runs: &[BetaRun],
) -> Result<(Table, Table), CliError> {
    let reference = reference_run(cfg, runs);
    let mut series = Table::new(
        name,
        &["experiment", "n", "beta", "reference_beta", "time", "delta_ergotropy"],
    );
    let mut summary = Table::new(
        &format!("{name}_summary"),
        &[
            "experiment",
            "n",
            "beta",
            "reference_beta",
            "sign_changes",
            "first_sign_change",
            "max_abs_delta",
            "steady_ergotropy",
        ],
    );
    for run in runs.iter().filter(|r| r.beta != cfg.reference_beta) {
        let diff = ergotropy_difference_from_records(&run.records, &reference.records)
            .map_err(engine("ergotropy"))?;
        for (&t, &d) in diff.times.iter().zip(&diff.delta) {
            series.push(vec![
                exp.name().into(),
                n.into(),
                run.beta.into(),
                cfg.reference_beta.into(),
                t.into(),
                d.into(),
            ]);
        }
        summary.push(vec![
            exp.name().into(),
            n.into(),
            run.beta.into(),
            cfg.reference_beta.into(),
            diff.crossings.len().into(),
            diff.crossings.first().copied().into(),
            diff.delta.iter().fold(0.0f64, |m, d| m.max(d.abs())).into(),
            run.steady_ergotropy().into(),
        ]);
    }
    Ok((series, summary))
}

pub(crate) fn fig5(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::Fig5;
    let n = cfg.n_or(4);
    let model = model(cfg, n)?;
    let chan = channel(cfg, 0.0, 0.0, 0.0)?;
    let betas = betas_with_reference(cfg, &DEFAULT_BETAS);
    let runs = run_betas(&model, &chan, &betas, &grid(cfg, 800.0, 0.5)?, None)?;
    let (series, summary) = difference_table("fig5_difference", exp, n, cfg, &runs)?;

    let mut crossings = Table::new(
        "fig5_eigen_crossings",
        &["experiment", "n", "beta", "first_visible_crossing", "visible_crossings"],
    );
    let firsts: Vec<(Option<f64>, usize)> = runs
        .par_iter()
        .map(|run| {
            let all = eigenvalue_crossings(&run.traj).map_err(engine("ergotropy"))?;
            let visible: Vec<_> = all.iter().filter(|c| c.level >= VISIBLE_CROSSING_LEVEL).collect();
            Ok((visible.first().map(|c| c.time), visible.len()))
        })
        .collect::<Result<_, CliError>>()?;
    for (run, (first, count)) in runs.iter().zip(firsts) {
        crossings.push(vec![
            exp.name().into(),
            n.into(),
            run.beta.into(),
            first.into(),
            count.into(),
        ]);
    }

    let steady: Vec<f64> = runs.iter().map(BetaRun::steady_ergotropy).collect();
    let spread = steady.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - steady.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut out = Output {
        stats: merge_stats(&runs),
        ..Output::default()
    };
    out.summary
        .push(format!("steady ergotropy spread across beta: {spread:.3e}"));
    out.tables.push(trajectory_table("fig5_trajectories", exp, &model, &chan, &runs));
    out.tables.push(series);
    out.tables.push(summary);
    out.tables.push(crossings);
    out.plots.push(ergotropy_plot("fig5_ergotropy", "Parallel dissipation, N = 4", &runs));
    Ok(out)
}

pub(crate) fn fig6(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::Fig6;
    let n = cfg.n_or(4);
    let model = model(cfg, n)?;
    let chan = channel(cfg, 0.0, 1.0, 0.0)?;
    let dark = dark_subspace(&model).map_err(engine("oracles"))?;
    let betas = sorted(cfg.betas_or(&DEFAULT_BETAS));
    let grid = grid(cfg, 800.0, 0.5)?;
    let runs = run_betas(&model, &chan, &betas, &grid, Some(&dark))?;

    let mut table = Table::new(
        "fig6_steady",
        &[
            "experiment",
            "n",
            "beta",
            "steady_ergotropy",
            "converged",
            "p_dark_initial",
            "p_dark_final",
            "p_dark_drift",
        ],
    );
    let mut out = Output {
        stats: merge_stats(&runs),
        ..Output::default()
    };
    for run in &runs {
        let p = run.p_dark.as_ref().expect("dark populations requested");
        let drift = p.iter().fold(0.0f64, |m, v| m.max((v - p[0]).abs()));
        let steady = detect_steady(&run.traj, STEADY_TOL);
        table.push(vec![
            exp.name().into(),
            n.into(),
            run.beta.into(),
            run.steady_ergotropy().into(),
            steady.converged.into(),
            p[0].into(),
            p[p.len() - 1].into(),
            drift.into(),
        ]);
        out.summary.push(format!(
            "beta={}: ergotropy {:.6} at t={}, p_dark {:.6} -> {:.6}",
            run.beta,
            run.steady_ergotropy(),
            grid.t_max(),
            p[0],
            p[p.len() - 1]
        ));
    }
    out.tables.push(trajectory_table("fig6_trajectories", exp, &model, &chan, &runs));
    out.tables.push(table);
    out.plots.push(ergotropy_plot("fig6_ergotropy", "Collective dissipation, N = 4", &runs));
    Ok(out)
}

const FIG7_STEP: f64 = 0.05;
const FIG7_BETA_MAX: f64 = 5.0;
const FD_STEP: f64 = 1e-5;

pub(crate) fn fig7(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::Fig7;
    let n = cfg.n_or(4);
    let model = model(cfg, n)?;
    let dark = dark_subspace(&model).map_err(engine("oracles"))?;
    let p = |beta: f64| {
        dark_population(beta, &model, &dark)
            .map(|d| d.p_dark)
            .map_err(engine("oracles"))
    };
    let steps = (FIG7_BETA_MAX / FIG7_STEP).round() as usize;
    let betas: Vec<f64> = match cfg.is_set("beta_list") {
        true => sorted(cfg.beta_list.clone()),
        false => (0..=steps).map(|k| k as f64 * FIG7_STEP).collect(),
    };

    let rows: Vec<Vec<Cell>> = betas
        .par_iter()
        .map(|&beta| {
            let dp = dark_population(beta, &model, &dark).map_err(engine("oracles"))?;
            let fd = if beta >= FD_STEP {
                (p(beta + FD_STEP)? - p(beta - FD_STEP)?) / (2.0 * FD_STEP)
            } else {
                // second-order one-sided difference
                (-3.0 * p(beta)? + 4.0 * p(beta + FD_STEP)? - p(beta + 2.0 * FD_STEP)?)
                    / (2.0 * FD_STEP)
            };
            Ok(vec![
                exp.name().into(),
                n.into(),
                beta.into(),
                dp.p_dark.into(),
                dp.derivative().into(),
                fd.into(),
                dp.mean_energy.into(),
                dp.mean_dark_energy.into(),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = Table::new(
        "fig7_p_dark",
        &[
            "experiment",
            "n",
            "beta",
            "p_dark",
            "derivative",
            "finite_difference",
            "mean_energy",
            "mean_dark_energy",
        ],
    );
    for row in rows {
        table.push(row);
    }

    let mut dims = Table::new(
        "fig7_dark_dimensions",
        &["experiment", "n", "dark_dimension", "max_annihilation_residual"],
    );
    let mut out = Output::default();
    for k in 1..=MAX_CLI_QUBITS {
        let m = ModelSpec::with_coupling(k, cfg.j, cfg.h).map_err(engine("model"))?;
        let d = dark_subspace(&m).map_err(engine("oracles"))?;
        let s_minus = m.collective_operator(CollectiveOp::Minus);
        let residual = d
            .basis
            .iter()
            .map(|v| vector_norm(&s_minus.matvec(v)))
            .fold(0.0, f64::max);
        dims.push(vec![exp.name().into(), k.into(), d.dim().into(), residual.into()]);
        out.summary.push(format!("n={k}: dark dimension {}", d.dim()));
    }
    out.tables.push(table);
    out.tables.push(dims);
    Ok(out)
}

/// Frobenius norm of the block ⟨all e| ρ |k flipped sites⟩.
fn coherence_block_norm(rho: &DensityMatrix, n: usize, k: usize) -> f64 {
    let m = rho.matrix();
    (0..1usize << n)
        .filter(|b| b.count_ones() as usize == k)
        .map(|b| m[(0, b)].norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Least-squares slope of ln y against t, negated.
fn fitted_decay_rate(times: &[f64], values: &[f64]) -> f64 {
    let ln: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = times.len() as f64;
    let tm = times.iter().sum::<f64>() / m;
    let lm = ln.iter().sum::<f64>() / m;
    let cov: f64 = times.iter().zip(&ln).map(|(t, l)| (t - tm) * (l - lm)).sum();
    let var: f64 = times.iter().map(|t| (t - tm) * (t - tm)).sum();
    -cov / var
}

fn plus_state(n: usize) -> Result<DensityMatrix, CliError> {
    let d = 1usize << n;
    let amp = C64::new((d as f64).sqrt().recip(), 0.0);
    DensityMatrix::pure(&vec![amp; d]).map_err(engine("model"))
}

pub(crate) fn fig8(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::Fig8;
    let sizes = if cfg.is_set("n_qubits") {
        vec![cfg.n_qubits]
    } else {
        vec![2, 4]
    };
    let parallel = channel(cfg, 1.0, 0.0, 0.0)?;
    let collective = ChannelSpec::new(cfg.gamma, 1.0, 0.0, 1.0).map_err(engine("channels"))?;
    let betas = betas_with_reference(cfg, &DEFAULT_BETAS);
    let long = grid(cfg, 800.0, 0.5)?;
    let fit_grid = TimeGrid::new(40.0, 0.5).map_err(engine("dynamics"))?;

    let mut out = Output::default();
    let mut rates = Table::new(
        "fig8_rates",
        &["experiment", "n", "flipped_sites", "fitted_rate", "expected_rate", "relative_error"],
    );
    let mut collective_table = Table::new(
        "fig8_collective",
        &["experiment", "n", "beta", "max_state_change", "max_ergotropy"],
    );
    let mut difference_summaries = Vec::new();
    for &n in &sizes {
        let model = model(cfg, n)?;
        let runs = run_betas(&model, &parallel, &betas, &long, None)?;
        out.stats.merge(&merge_stats(&runs));
        let (series, summary) = difference_table(&format!("fig8_n{n}_difference"), exp, n, cfg, &runs)?;
        let changes: i64 = summary
            .rows
            .iter()
            .map(|row| match row[4] {
                Cell::Int(c) => c,
                _ => 0,
            })
            .sum();
        out.summary.push(format!("n={n}: {changes} ergotropy-difference sign changes"));
        out.tables
            .push(trajectory_table(&format!("fig8_n{n}_trajectories"), exp, &model, &parallel, &runs));
        out.tables.push(series);
        difference_summaries.push(summary);
        out.plots.push(ergotropy_plot(
            &format!("fig8_n{n}_ergotropy"),
            &format!("Parallel dephasing, N = {n}"),
            &runs,
        ));

        let hm = model.hamiltonian();
        let liou = build_liouvillian(&hm, &parallel, &model).map_err(engine("channels"))?;
        let traj = propagate(&liou, &plus_state(n)?, &fit_grid).map_err(engine("dynamics"))?;
        let mut fit_stats = StateStats::default();
        for rho in &traj.states {
            fit_stats.observe_state(rho);
        }
        out.stats.merge(&fit_stats);
        for k in 1..=n.min(2) {
            let norms: Vec<f64> = traj.states.iter().map(|r| coherence_block_norm(r, n, k)).collect();
            let fitted = fitted_decay_rate(&traj.times, &norms);
            let expected = 2.0 * k as f64 * cfg.gamma;
            rates.push(vec![
                exp.name().into(),
                n.into(),
                k.into(),
                fitted.into(),
                expected.into(),
                ((fitted - expected) / expected).abs().into(),
            ]);
        }

        let col = run_betas(&model, &collective, &betas, &long, None)?;
        out.stats.merge(&merge_stats(&col));
        for run in &col {
            let rho0 = run.traj.states[0].matrix();
            let change = run
                .traj
                .states
                .iter()
                .map(|r| (r.matrix() - rho0).frobenius_norm())
                .fold(0.0, f64::max);
            let max_erg = run.ergotropies().into_iter().fold(0.0, f64::max);
            collective_table.push(vec![
                exp.name().into(),
                n.into(),
                run.beta.into(),
                change.into(),
                max_erg.into(),
            ]);
        }
    }
    let mut summary = Table::new(
        "fig8_difference_summary",
        &difference_summaries[0].columns.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    for s in difference_summaries {
        summary.rows.extend(s.rows);
    }
    out.tables.push(summary);
    out.tables.push(rates);
    out.tables.push(collective_table);
    Ok(out)
}

pub(crate) fn app_d(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let exp = Experiment::AppD;
    let n = cfg.n_or(4);
    let model = model(cfg, n)?;
    let chan = channel(cfg, 0.0, 0.0, 0.0)?;
    let betas = sorted(cfg.betas_or(&[0.2, 5.0]));
    let runs = run_betas(&model, &chan, &betas, &grid(cfg, 100.0, 0.1)?, None)?;
    let basis = EnergyBasis::new(&model.hamiltonian()).map_err(engine("ergotropy"))?;

    let mut crossings = Table::new(
        "appD_crossings",
        &["experiment", "n", "beta", "time", "branch_a", "branch_b", "level", "visible"],
    );
    let mut columns: Vec<String> = ["experiment", "n", "beta", "time"].iter().map(|s| s.to_string()).collect();
    columns.extend((1..=model.dim()).map(|k| format!("p_{k}")));
    let mut populations = Table::with_columns("appD_populations", columns);

    let mut out = Output {
        stats: merge_stats(&runs),
        ..Output::default()
    };
    for run in &runs {
        let found = eigenvalue_crossings(&run.traj).map_err(engine("ergotropy"))?;
        let first_visible = found.iter().find(|c| c.level >= VISIBLE_CROSSING_LEVEL);
        out.summary.push(format!(
            "beta={}: {} crossings, first visible at {}",
            run.beta,
            found.len(),
            first_visible.map_or("none".to_string(), |c| format!("{:.3}", c.time))
        ));
        for c in &found {
            crossings.push(vec![
                exp.name().into(),
                n.into(),
                run.beta.into(),
                c.time.into(),
                (c.branches.0 + 1).into(),
                (c.branches.1 + 1).into(),
                c.level.into(),
                (c.level >= VISIBLE_CROSSING_LEVEL).into(),
            ]);
        }
        for (rho, &t) in run.traj.states.iter().zip(&run.traj.times) {
            let mut row: Vec<Cell> = vec![exp.name().into(), n.into(), run.beta.into(), t.into()];
            row.extend(
                basis
                    .populations(rho)
                    .map_err(engine("ergotropy"))?
                    .into_iter()
                    .map(Cell::from),
            );
            populations.push(row);
        }
    }
    out.tables.push(trajectory_table("appD_trajectories", exp, &model, &chan, &runs));
    out.tables.push(crossings);
    out.tables.push(populations);
    out.plots.push(ergotropy_plot("appD_ergotropy", "Parallel dissipation, N = 4", &runs));
    Ok(out)
}
