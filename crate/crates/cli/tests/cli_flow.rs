//! End-to-end tests of the command drivers: exit codes, artifact layout,
//! diagnose/export round trips, and a property test of the snapshot codec.

use nsf_cli::snapshot::{self, StateBundle};
use nsf_cli::{commands, parse_config, parse_config_with};
use nsf_core::field::{ScalarField, VectorField};
use nsf_core::grid::PeriodicGrid;
use proptest::prelude::*;
use std::path::PathBuf;

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nsfv_cli_flow_{tag}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn small_config(out_dir: &std::path::Path, extra: &str) -> String {
    format!(
        "[law]\n[grid]\nn = 32\n[time]\nt_final = 0.01\nslab_length = 0.01\nthermal_dt = 0.00125\n\
         [initial]\nprofile = sine\nrho_amplitude = 0.01\n\
         [output]\ndir = {}\nsnapshot_every = 2\n{extra}",
        out_dir.display()
    )
}

#[test]
fn run_uniform_data_exits_zero_after_one_iteration() {
    let dir = temp_dir("uniform");
    let text = format!(
        "[law]\n[grid]\nn = 32\n[time]\nt_final = 0.01\nslab_length = 0.01\n\
         [initial]\nprofile = uniform\n[output]\ndir = {}\n",
        dir.join("out").display()
    );
    let cfg = parse_config(&text).unwrap();
    let outcome = commands::run_command(&cfg, &text).unwrap();
    assert_eq!(outcome.exit_code, 0);
    let report = outcome.report.unwrap();
    assert_eq!(report.total_iterations(), 1);
    assert!(dir.join("out").join("report.txt").exists());
    assert!(dir.join("out").join("diagnostics.csv").exists());
    assert!(dir.join("out").join("run.log").exists());
}

#[test]
fn run_with_iteration_cap_exits_two_and_logs_history() {
    let dir = temp_dir("cap");
    let text = small_config(&dir.join("out"), "[fixed_point]\nmax_iter = 1\n");
    let cfg = parse_config(&text).unwrap();
    let outcome = commands::run_command(&cfg, &text).unwrap();
    assert_eq!(outcome.exit_code, 2);
    let log = std::fs::read_to_string(dir.join("out").join("run.log")).unwrap();
    assert!(log.contains("update norms"), "log lacks the norm history: {log}");
    let report = std::fs::read_to_string(dir.join("out").join("report.txt")).unwrap();
    assert!(report.contains("update norms"), "report lacks the norm history: {report}");
}

#[test]
fn wrong_way_continuation_exits_three() {
    // Reversing the eps sequence makes the trajectory distances increase;
    // the run completes but the check fails with status 3.
    let dir = temp_dir("cont3");
    let out = dir.join("out");
    let text = small_config(&out, "[regularization]\neps = 1e-3\ncontinuation = 1e-4 1e-3 1e-2\n");
    let cfg = parse_config(&text).unwrap();
    let outcome = commands::run_command(&cfg, &text).unwrap();
    assert_eq!(outcome.exit_code, 3);
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("continuation distances decreasing: FAIL"));
    // Artifacts still written.
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn run_demo_law_requires_force() {
    let dir = temp_dir("force");
    let law = "[law]\nn_trunc = 2\nb2 = ratpow -0.5 0.2 1.0 1.2\nb_bar = 0 0 -0.5\n";
    let body = format!(
        "{law}[grid]\nn = 32\n[time]\nt_final = 0.005\nslab_length = 0.005\n\
         [initial]\nprofile = sine\nrho_amplitude = 0.01\n[output]\ndir = {}\n",
        dir.join("out").display()
    );
    // Without force: the audit fails (concavity) and the run stops with 1.
    let cfg = parse_config(&body).unwrap();
    let outcome = commands::run_command(&cfg, &body).unwrap();
    assert_eq!(outcome.exit_code, 1);
    // With force: the run completes cleanly.
    let forced = format!("{body}[validator]\nforce = true\n");
    let cfg = parse_config(&forced).unwrap();
    let outcome = commands::run_command(&cfg, &forced).unwrap();
    assert_eq!(outcome.exit_code, 0);
}

#[test]
fn diagnose_recomputes_matching_series() {
    let dir = temp_dir("diagnose");
    let out = dir.join("out");
    let text = small_config(&out, "");
    let cfg = parse_config(&text).unwrap();
    let outcome = commands::run_command(&cfg, &text).unwrap();
    assert_eq!(outcome.exit_code, 0);
    let series = commands::diagnose_command(&out, &cfg).unwrap();
    // The recomputed mass column matches the run's own diagnostics where the
    // sample times coincide (snapshot cadence subsamples the trajectory).
    let traj = outcome.trajectory.unwrap();
    assert!(series.times.iter().all(|t| traj.times.contains(t)));
    let written = std::fs::read_to_string(out.join("diagnostics_recomputed.csv")).unwrap();
    assert!(written.starts_with("time,mass,"));
}

#[test]
fn export_emits_per_cell_rows() {
    let dir = temp_dir("export");
    let out = dir.join("out");
    let text = small_config(&out, "");
    let cfg = parse_config(&text).unwrap();
    commands::run_command(&cfg, &text).unwrap();
    let snap = out.join("snap_000000.nsfv");
    let csv = commands::export_command(&snap).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,rho,m_x,g,theta");
    assert_eq!(lines.len(), 1 + 32);
}

#[test]
fn restart_from_snapshot_file() {
    let dir = temp_dir("restart");
    let out = dir.join("out");
    let text = small_config(&out, "");
    let cfg = parse_config(&text).unwrap();
    commands::run_command(&cfg, &text).unwrap();
    let snap = out.join("snap_000008.nsfv");
    assert!(snap.exists());

    // Continue from the stored state.
    let out2 = dir.join("out2");
    let text2 = format!(
        "[law]\n[grid]\nn = 32\n[time]\nt_final = 0.005\nslab_length = 0.005\n\
         [initial]\nprofile = file:{}\n[output]\ndir = {}\n",
        snap.display(),
        out2.display()
    );
    let cfg2 = parse_config(&text2).unwrap();
    let outcome = commands::run_command(&cfg2, &text2).unwrap();
    assert_eq!(outcome.exit_code, 0);

    // Grid mismatch is a config error.
    let text3 = format!(
        "[law]\n[grid]\nn = 64\n[initial]\nprofile = file:{}\n[output]\ndir = {}\n",
        snap.display(),
        dir.join("out3").display()
    );
    let cfg3 = parse_config(&text3).unwrap();
    let err = commands::run_command(&cfg3, &text3).unwrap_err();
    assert!(err.to_string().contains("does not match"), "{err}");
}

#[test]
fn continuation_study_records_decreasing_distances() {
    let dir = temp_dir("continuation");
    let out = dir.join("out");
    let text = small_config(&out, "[regularization]\neps = 1e-3\ncontinuation = 1e-2 1e-3 1e-4\n");
    let cfg = parse_config(&text).unwrap();
    let outcome = commands::run_command(&cfg, &text).unwrap();
    assert_eq!(outcome.exit_code, 0);
    let csv = std::fs::read_to_string(out.join("continuation.csv")).unwrap();
    let dists: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(dists.len(), 2);
    assert!(dists[1] < dists[0], "distances {dists:?}");
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("continuation distances decreasing: PASS"));
}

#[test]
fn validate_lenient_parse_reports_structural_failures() {
    let text = "[law]\ngamma = 4.0\n[grid]\ndim = 2\nn = 32\n";
    let cfg = parse_config_with(text, true).unwrap();
    let report = commands::validate_command(&cfg, None).unwrap();
    assert!(!report.passes());
    assert!(report.failed_ids().contains(&"gamma-floor"));
}

#[test]
fn initial_bundle_positive_g() {
    let dir = temp_dir("bundle");
    let text = small_config(&dir.join("out"), "");
    let cfg = parse_config(&text).unwrap();
    let bundle = commands::initial_bundle(&cfg).unwrap();
    assert!(bundle.g.min() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prop_snapshot_round_trip(
        dim in 1_usize..3,
        seed in 0_u64..1_000_000,
        time in 0.0_f64..100.0,
        eps in 0.0_f64..1.0,
    ) {
        // Deterministic pseudo-random fields from the seed.
        let grid = PeriodicGrid::unit(dim, 8).unwrap();
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let fill = |f: &mut dyn FnMut() -> f64, n: usize| (0..n).map(|_| f()).collect::<Vec<f64>>();
        let cells = grid.cells();
        let bundle = StateBundle {
            grid,
            time,
            eps,
            rho: ScalarField::from_values(grid, fill(&mut next, cells)).unwrap(),
            m: VectorField::from_comps(
                grid,
                (0..dim).map(|_| fill(&mut next, cells)).collect(),
            )
            .unwrap(),
            g: ScalarField::from_values(grid, fill(&mut next, cells)).unwrap(),
            theta: ScalarField::from_values(grid, fill(&mut next, cells)).unwrap(),
        };
        let dir = std::env::temp_dir().join("nsfv_prop_snap");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("prop_{seed}_{dim}.nsfv"));
        snapshot::write_snapshot(&path, &bundle).unwrap();
        let back = snapshot::read_snapshot(&path).unwrap();
        prop_assert_eq!(&bundle, &back);
        let _ = std::fs::remove_file(&path);
    }
}
