//! Subcommand drivers: validate, run, mms, diagnose, export.
//!
//! Exit statuses of `run`: 0 converged with all inequality checks passing,
//! 1 configuration or validation error, 2 fixed-point convergence failure,
//! 3 inequality failure (artifacts still written).

use crate::config::{InitialProfile, RunConfig};
use crate::csvout;
use crate::error::{CliError, Result};
use crate::snapshot::{self, StateBundle};
use nsf_core::coupler::{self, InitialData, RunReport, SlabTrajectory, SolverParams};
use nsf_core::diagnostics::{self, DiagnosticSeries};
use nsf_core::field::{ScalarField, VectorField};
use nsf_core::grid::PeriodicGrid;
use nsf_core::law::ThermoPoint;
use nsf_core::mms as core_mms;
use nsf_core::validator::{self, ValidationReport};
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Builds the initial fields from the `[initial]` section.
pub fn build_initial(config: &RunConfig) -> Result<InitialData> {
    let grid = PeriodicGrid::new(config.dim, config.n, config.length)?;
    let ic = &config.initial;
    match &ic.profile {
        InitialProfile::Uniform | InitialProfile::Sine => {
            let (ra, ta, ua) = match ic.profile {
                InitialProfile::Uniform => (0.0, 0.0, 0.0),
                _ => (ic.rho_amplitude, ic.theta_amplitude, ic.u_amplitude),
            };
            let wave = |x: f64, y: f64| {
                if grid.dim == 1 {
                    (TAU * x).sin()
                } else {
                    (TAU * x).sin() * (TAU * y).cos()
                }
            };
            let rho = ScalarField::from_fn(grid, |x, y| ic.rho0 + ra * wave(x, y));
            let theta = ScalarField::from_fn(grid, |x, y| ic.theta0 + ta * wave(x, y));
            let m = VectorField::from_fn(grid, |x, y, axis| {
                if axis == 0 {
                    (ic.rho0 + ra * wave(x, y)) * (ic.u0 + ua * wave(x, y))
                } else {
                    0.0
                }
            });
            if rho.min() <= 0.0 {
                return Err(CliError::Config(format!(
                    "initial density reaches {} <= 0",
                    rho.min()
                )));
            }
            if theta.min() < 0.0 {
                return Err(CliError::Config(format!(
                    "initial temperature reaches {} < 0",
                    theta.min()
                )));
            }
            Ok(InitialData { rho, m, theta })
        }
        InitialProfile::File(path) => {
            let bundle = snapshot::read_snapshot(Path::new(path))?;
            if bundle.grid.dim != config.dim || bundle.grid.n != config.n {
                return Err(CliError::Config(format!(
                    "snapshot grid {}d n={} does not match config {}d n={}",
                    bundle.grid.dim, bundle.grid.n, config.dim, config.n
                )));
            }
            Ok(InitialData {
                rho: bundle.rho,
                m: bundle.m,
                theta: bundle.theta,
            })
        }
    }
}

/// Renders the validator report as readable text.
pub fn report_text(report: &ValidationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let _ = write!(out, "{:<28} {:<13}", c.id, c.status.as_str());
        if let Some((rho, theta)) = c.worst_point {
            let _ = write!(out, " worst (rho, theta) = ({rho:.6e}, {theta:.6e})");
        }
        let _ = write!(out, " margin {:.6e}", c.margin);
        if let Some(cfit) = c.fitted_c {
            let _ = write!(out, " fitted C {cfit:.6e}");
        }
        let _ = writeln!(out, "  [{}]", c.note);
    }
    match report.nonmonotone_witness {
        Some((rho, theta)) => {
            let _ = writeln!(
                out,
                "non-monotone pressure witness at (rho, theta) = ({rho:.6e}, {theta:.6e})"
            );
        }
        None => {
            let _ = writeln!(out, "pressure monotone in rho on the scan grid");
        }
    }
    out
}

/// Renders the validator report as a CSV.
pub fn report_csv(report: &ValidationReport) -> String {
    let mut out = String::from("check_id,status,witness_rho,witness_theta,margin,fitted_c\n");
    for c in &report.checks {
        let (wr, wt) = match c.worst_point {
            Some((r, t)) => (format!("{r}"), format!("{t}")),
            None => (String::new(), String::new()),
        };
        let cf = match c.fitted_c {
            Some(v) => format!("{v}"),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.id,
            c.status.as_str(),
            wr,
            wt,
            c.margin,
            cf
        );
    }
    out
}

/// `validate <config>`: run the audit and emit text plus CSV.
pub fn validate_command(config: &RunConfig, out_dir: Option<&Path>) -> Result<ValidationReport> {
    let report = validator::validate(&config.law, &config.validator)?;
    let text = report_text(&report);
    print!("{text}");
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("validation.txt"), &text)?;
        std::fs::write(dir.join("validation.csv"), report_csv(&report))?;
    }
    Ok(report)
}

/// Everything `run` produces.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Option<RunReport>,
    pub trajectory: Option<SlabTrajectory>,
    pub log: Vec<String>,
}

fn bundle_at(traj: &SlabTrajectory, k: usize) -> StateBundle {
    StateBundle {
        grid: traj.rho[k].grid,
        time: traj.times[k],
        eps: traj.eps,
        rho: traj.rho[k].clone(),
        m: traj.m[k].clone(),
        g: traj.g[k].clone(),
        theta: traj.theta[k].clone(),
    }
}

/// `run <config>`: validate, iterate the coupled solver to `t_final`, write
/// snapshots, diagnostics CSV and the run report.
pub fn run_command(config: &RunConfig, config_text: &str) -> Result<RunOutcome> {
    let out_dir = PathBuf::from(&config.output.dir);
    std::fs::create_dir_all(&out_dir)?;
    std::fs::write(out_dir.join("config.ini"), config_text)?;
    let mut log: Vec<String> = Vec::new();

    // Law audit first; scan-level failures stop the run unless forced.
    let report = validator::validate(&config.law, &config.validator)?;
    std::fs::write(out_dir.join("validation.txt"), report_text(&report))?;
    std::fs::write(out_dir.join("validation.csv"), report_csv(&report))?;
    if !report.passes() {
        log.push(format!(
            "law validation failed: {:?}{}",
            report.failed_ids(),
            if config.force {
                " (continuing: force = true)"
            } else {
                ""
            }
        ));
        if !config.force {
            std::fs::write(out_dir.join("run.log"), log.join("\n") + "\n")?;
            return Ok(RunOutcome {
                exit_code: 1,
                report: None,
                trajectory: None,
                log,
            });
        }
    }

    let initial = build_initial(config)?;
    let params = SolverParams {
        hydro: config.hydro.clone(),
        thermal: config.thermal.clone(),
    };
    let result = coupler::continue_slabs(
        &initial,
        &config.law,
        &config.fixed_point,
        config.eps,
        &params,
        config.t_final,
    );
    let (traj, run_report) = match result {
        Ok(pair) => pair,
        Err(e @ nsf_core::Error::ConvergenceFailure { .. }) => {
            // The error context carries the per-iteration update norms.
            log.push(format!("convergence failure: {e}"));
            std::fs::write(out_dir.join("run.log"), log.join("\n") + "\n")?;
            std::fs::write(
                out_dir.join("report.txt"),
                format!("fixed point did not converge\n{e}\n"),
            )?;
            return Ok(RunOutcome {
                exit_code: 2,
                report: None,
                trajectory: None,
                log,
            });
        }
        Err(e) => {
            log.push(format!("solver error: {e}"));
            std::fs::write(out_dir.join("run.log"), log.join("\n") + "\n")?;
            return Err(e.into());
        }
    };

    // Artifacts.
    let series = DiagnosticSeries::compute(&traj, &config.law)?;
    if config.output.csv {
        std::fs::write(out_dir.join("diagnostics.csv"), csvout::diagnostics_csv(&series))?;
    }
    let every = config.output.snapshot_every;
    let last = traj.len() - 1;
    for k in 0..traj.len() {
        if k == last || (every > 0 && k % every == 0) {
            let name = format!("snap_{k:06}.nsfv");
            snapshot::write_snapshot(&out_dir.join(name), &bundle_at(&traj, k))?;
        }
    }

    // Inequality verdicts at the discretization-aware tolerances.
    let h = traj.rho[0].grid.h();
    let dt = traj.times[1] - traj.times[0];
    let energy_ok = series.energy_inequality_pass(h, dt);
    let entropy_res = diagnostics::entropy_inequality_residual(&traj, &config.law)?;
    let entropy_ok = entropy_res
        .iter()
        .zip(traj.times.windows(2))
        .all(|(&r, w)| r >= -diagnostics::entropy_tolerance(h, dt, w[1] - w[0]));
    let g_res = diagnostics::g_balance_residual(&traj, &config.law);
    let g_rel = g_res.last().unwrap().abs() / series.g_total[0].abs().max(1e-300);
    let g_ok = g_rel < 1e-3;

    // Optional regularization-continuation study: re-run the horizon for
    // each eps in the sequence and record the successive trajectory
    // distances, which must decrease as eps shrinks.
    let mut continuation_ok = true;
    let mut continuation_lines = Vec::new();
    if config.continuation.len() >= 2 {
        let mut trajs: Vec<SlabTrajectory> = Vec::new();
        for (i, &eps) in config.continuation.iter().enumerate() {
            let (t, _) = coupler::continue_slabs(
                &initial,
                &config.law,
                &config.fixed_point,
                eps,
                &params,
                config.t_final,
            )?;
            let sub = out_dir.join(format!("eps_{i}"));
            std::fs::create_dir_all(&sub)?;
            let s = DiagnosticSeries::compute(&t, &config.law)?;
            std::fs::write(sub.join("diagnostics.csv"), csvout::diagnostics_csv(&s))?;
            trajs.push(t);
        }
        let mut csv = String::from("eps_from,eps_to,theta_l2_distance\n");
        let mut prev_dist = f64::INFINITY;
        for (i, w) in trajs.windows(2).enumerate() {
            let diff: Vec<_> = (0..w[0].len())
                .map(|k| w[0].theta[k].add_scaled(&w[1].theta[k], -1.0))
                .collect();
            let dist = SlabTrajectory::spacetime_l2(&w[0].times, &diff);
            let _ = writeln!(
                csv,
                "{},{},{}",
                config.continuation[i],
                config.continuation[i + 1],
                dist
            );
            continuation_lines.push(format!(
                "continuation eps {} -> {}: distance {dist:.6e}",
                config.continuation[i],
                config.continuation[i + 1]
            ));
            if dist >= prev_dist {
                continuation_ok = false;
            }
            prev_dist = dist;
        }
        std::fs::write(out_dir.join("continuation.csv"), csv)?;
    }

    let mut report_txt = String::new();
    let _ = writeln!(report_txt, "slabs: {}", run_report.slabs.len());
    for slab in &run_report.slabs {
        let _ = writeln!(
            report_txt,
            "slab {} [{:.6}, {:.6}]: {} iterations, converged = {}",
            slab.slab_index, slab.t0, slab.t1, slab.iterations, slab.converged
        );
        let norms: Vec<String> = slab.update_norms.iter().map(|v| format!("{v:.3e}")).collect();
        let _ = writeln!(report_txt, "  update norms: {}", norms.join(" "));
    }
    let _ = writeln!(
        report_txt,
        "energy inequality: {}",
        if energy_ok { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(
        report_txt,
        "entropy inequality: {}",
        if entropy_ok { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(
        report_txt,
        "g balance (relative {g_rel:.3e}): {}",
        if g_ok { "PASS" } else { "FAIL" }
    );
    for line in &continuation_lines {
        let _ = writeln!(report_txt, "{line}");
    }
    if !continuation_lines.is_empty() {
        let _ = writeln!(
            report_txt,
            "continuation distances decreasing: {}",
            if continuation_ok { "PASS" } else { "FAIL" }
        );
    }
    std::fs::write(out_dir.join("report.txt"), &report_txt)?;
    log.push(format!(
        "run complete: {} slabs, {} total iterations",
        run_report.slabs.len(),
        run_report.total_iterations()
    ));
    log.push(format!(
        "inequality checks: energy {energy_ok}, entropy {entropy_ok}, g-balance {g_ok}"
    ));
    std::fs::write(out_dir.join("run.log"), log.join("\n") + "\n")?;

    let exit_code = if energy_ok && entropy_ok && g_ok && continuation_ok {
        0
    } else {
        3
    };
    Ok(RunOutcome {
        exit_code,
        report: Some(run_report),
        trajectory: Some(traj),
        log,
    })
}

/// `mms <config>`: convergence study for the selected case.
pub fn mms_command(config: &RunConfig) -> Result<Vec<core_mms::MmsRow>> {
    let entries: Vec<(usize, f64)> = match config.mms.case.as_str() {
        "thermal" => core_mms::thermal_spatial_study(&config.mms.resolutions, config.eps)?,
        "thermal-temporal" => core_mms::thermal_temporal_study(&config.mms.dts, config.eps)?,
        "hydro-advective" => config
            .mms
            .resolutions
            .iter()
            .map(|&n| Ok((n, core_mms::run_hydro_advective_mms(n, 0.1)?)))
            .collect::<Result<_>>()?,
        "hydro-diffusive" => config
            .mms
            .resolutions
            .iter()
            .map(|&n| Ok((n, core_mms::run_hydro_diffusive_mms(n, 0.2)?)))
            .collect::<Result<_>>()?,
        other => {
            return Err(CliError::Config(format!("unknown mms case `{other}`")));
        }
    };
    let rows = core_mms::table_with_orders(&entries);
    let out_dir = PathBuf::from(&config.output.dir);
    std::fs::create_dir_all(&out_dir)?;
    let name = format!("mms_{}.csv", config.mms.case);
    std::fs::write(out_dir.join(name), csvout::mms_csv(&rows))?;
    for row in &rows {
        match row.order {
            Some(order) => println!("n = {:>6}  error = {:.6e}  order = {:.3}", row.n, row.error, order),
            None => println!("n = {:>6}  error = {:.6e}", row.n, row.error),
        }
    }
    Ok(rows)
}

/// `diagnose <snapshot-dir>`: rebuild the trajectory from the stored
/// snapshots and recompute the diagnostics CSV. The law is read from the
/// `config.ini` that `run` leaves next to the snapshots (or an explicit
/// config path).
pub fn diagnose_command(dir: &Path, config: &RunConfig) -> Result<DiagnosticSeries> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension().map(|x| x == "nsfv").unwrap_or(false)
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .map(|n| n.starts_with("snap_"))
                    .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.len() < 2 {
        return Err(CliError::Config(format!(
            "directory {} holds {} snapshots; need at least 2",
            dir.display(),
            paths.len()
        )));
    }
    let bundles: Vec<StateBundle> = paths
        .iter()
        .map(|p| snapshot::read_snapshot(p))
        .collect::<Result<_>>()?;
    let hydro_params = config.hydro.clone();
    let mut traj = SlabTrajectory {
        times: Vec::new(),
        rho: Vec::new(),
        m: Vec::new(),
        u: Vec::new(),
        theta: Vec::new(),
        g: Vec::new(),
        eps: bundles[0].eps,
    };
    for b in bundles {
        let state = nsf_core::hydro::HydroState::new(b.rho.clone(), b.m.clone(), b.time)?;
        let u = state.velocity(&hydro_params)?;
        traj.times.push(b.time);
        traj.rho.push(b.rho);
        traj.m.push(b.m);
        traj.u.push(u);
        traj.theta.push(b.theta);
        traj.g.push(b.g);
    }
    let series = DiagnosticSeries::compute(&traj, &config.law)?;
    std::fs::write(
        dir.join("diagnostics_recomputed.csv"),
        csvout::diagnostics_csv(&series),
    )?;
    println!(
        "recomputed diagnostics over {} snapshots -> {}",
        traj.len(),
        dir.join("diagnostics_recomputed.csv").display()
    );
    Ok(series)
}

/// `export <snapshot> --csv`: print the per-cell state.
pub fn export_command(path: &Path) -> Result<String> {
    let bundle = snapshot::read_snapshot(path)?;
    Ok(csvout::state_csv(&bundle))
}

/// Convenience used by tests: builds a `StateBundle` from initial data.
pub fn initial_bundle(config: &RunConfig) -> Result<StateBundle> {
    let initial = build_initial(config)?;
    let grid = initial.rho.grid;
    let mut g = ScalarField::zeros(grid);
    for c in 0..grid.cells() {
        g.values[c] = config.law.good_unknown(
            ThermoPoint::new(initial.rho.values[c], initial.theta.values[c]),
            config.eps,
        )?;
    }
    Ok(StateBundle {
        grid,
        time: 0.0,
        eps: config.eps,
        rho: initial.rho,
        m: initial.m,
        g,
        theta: initial.theta,
    })
}
