//! Outer fixed-point driver: given a temperature trajectory over a slab,
//! run the hydrodynamic solve with that temperature, then the thermal solve
//! with the resulting density and velocity, producing `L(theta)`; iterate
//! `theta <- (1 - omega) theta + omega L(theta)` to a fixed point and chain
//! slabs for global-in-time runs.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::hydro::{self, HydroParams, HydroState, ThetaTrajectory};
use crate::law::{ThermoPoint, VirialLaw};

use crate::thermal::{self, ThermalParams};

/// Field samples over one slab `[t0, t1]`.
#[derive(Debug, Clone)]
pub struct SlabTrajectory {
    pub times: Vec<f64>,
    pub rho: Vec<ScalarField>,
    pub m: Vec<VectorField>,
    pub u: Vec<VectorField>,
    pub theta: Vec<ScalarField>,
    pub g: Vec<ScalarField>,
    pub eps: f64,
}

impl SlabTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Discrete space-time L2 norm of a per-sample scalar sequence
    /// (trapezoidal in time).
    pub fn spacetime_l2(times: &[f64], fields: &[ScalarField]) -> f64 {
        let mut acc = 0.0;
        for k in 0..times.len() {
            let w = trapezoid_weight(times, k);
            let sq: f64 = fields[k].values.iter().map(|&v| v * v).sum();
            acc += w * fields[k].grid.cell_volume() * sq;
        }
        acc.sqrt()
    }
}

fn trapezoid_weight(times: &[f64], k: usize) -> f64 {
    let n = times.len();
    if n == 1 {
        return 1.0;
    }
    let left = if k == 0 { 0.0 } else { times[k] - times[k - 1] };
    let right = if k + 1 == n { 0.0 } else { times[k + 1] - times[k] };
    0.5 * (left + right)
}

/// Damped-Picard configuration.
#[derive(Debug, Clone)]
pub struct FixedPointConfig {
    /// Damping weight in `(0, 1]`.
    pub omega: f64,
    /// Relative update tolerance in the slab space-time L2 norm.
    pub tol: f64,
    /// Iteration cap per slab.
    pub max_iter: usize,
    /// Slab length.
    pub slab_length: f64,
    /// Sample intervals per slab (thermal steps per slab).
    pub samples_per_slab: usize,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            omega: 0.5,
            tol: 1e-6,
            max_iter: 50,
            slab_length: 0.1,
            samples_per_slab: 16,
        }
    }
}

impl FixedPointConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::Config(format!(
                "damping weight must be in (0, 1], got {}",
                self.omega
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("fixed-point tolerance must be positive".to_string()));
        }
        if self.max_iter == 0 || self.samples_per_slab == 0 || !(self.slab_length > 0.0) {
            return Err(Error::Config(
                "fixed-point iteration/sampling parameters must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Per-slab iteration record.
#[derive(Debug, Clone)]
pub struct SlabReport {
    pub slab_index: usize,
    pub t0: f64,
    pub t1: f64,
    pub iterations: usize,
    /// Relative residual `|L(theta_k) - theta_k| / |theta_k|` per iteration.
    pub update_norms: Vec<f64>,
    pub converged: bool,
}

/// Full run record.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub slabs: Vec<SlabReport>,
}

impl RunReport {
    pub fn total_iterations(&self) -> usize {
        self.slabs.iter().map(|s| s.iterations).sum()
    }

    pub fn converged(&self) -> bool {
        self.slabs.iter().all(|s| s.converged)
    }
}

/// Solver bundle shared by the drivers.
#[derive(Debug, Clone, Default)]
pub struct SolverParams {
    pub hydro: HydroParams,
    pub thermal: ThermalParams,
}

/// One application of the map `L`: hydro with the given temperature
/// trajectory, then the thermal solve on the resulting `(rho, u)`.
pub fn apply_l(
    theta_traj: &ThetaTrajectory,
    hydro0: &HydroState,
    g0: &ScalarField,
    law: &VirialLaw,
    eps: f64,
    params: &SolverParams,
) -> Result<SlabTrajectory> {
    let times = theta_traj.times.clone();
    let hydro_states = hydro::solve_hydro_slab(hydro0, theta_traj, law, &params.hydro, &times)
        .map_err(|e| annotate(e, "hydro stage of L"))?;
    let rho: Vec<ScalarField> = hydro_states.iter().map(|s| s.rho.clone()).collect();
    let m: Vec<VectorField> = hydro_states.iter().map(|s| s.m.clone()).collect();
    let u: Vec<VectorField> = hydro_states
        .iter()
        .map(|s| s.velocity(&params.hydro))
        .collect::<Result<_>>()?;
    let (g, theta) = thermal::solve_thermal_slab(g0, &rho, &u, &times, law, eps, &params.thermal)
        .map_err(|e| annotate(e, "thermal stage of L"))?;
    Ok(SlabTrajectory {
        times,
        rho,
        m,
        u,
        theta,
        g,
        eps,
    })
}

fn annotate(e: Error, context: &str) -> Error {
    match e {
        Error::ConvergenceFailure {
            context: inner,
            residual,
            iterations,
        } => Error::ConvergenceFailure {
            context: format!("{context}: {inner}"),
            residual,
            iterations,
        },
        Error::NonPhysicalState(msg) => Error::NonPhysicalState(format!("{context}: {msg}")),
        other => other,
    }
}

/// Initial data for one slab.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub rho: ScalarField,
    pub m: VectorField,
    pub theta: ScalarField,
}

/// Total energy of the initial data; must be finite for the drivers to start.
pub fn initial_energy(data: &InitialData, law: &VirialLaw) -> Result<f64> {
    let grid = data.rho.grid;
    let mut total = 0.0;
    for c in 0..grid.cells() {
        let rho = data.rho.values[c];
        if rho <= 0.0 {
            return Err(Error::NonPhysicalState(format!(
                "initial density must be positive, cell {c} has {rho}"
            )));
        }
        let mut kin = 0.0;
        for comp in &data.m.comps {
            kin += comp[c] * comp[c];
        }
        kin /= 2.0 * rho;
        let e = law.internal_energy(ThermoPoint::new(rho, data.theta.values[c]))?;
        total += kin + rho * e;
    }
    let energy = grid.cell_volume() * total;
    if !energy.is_finite() {
        return Err(Error::NonPhysicalState(format!(
            "initial energy is not finite: {energy}"
        )));
    }
    Ok(energy)
}

/// Damped Picard iteration on one slab `[t0, t0 + slab_length]`, seeded with
/// the constant-in-time extension of the initial temperature.
///
/// Termination is on the undamped relative residual
/// `|L(theta_k) - theta_k| / |theta_k|` in the slab space-time L2 norm, so
/// the converged trajectory satisfies the fixed-point contract independently
/// of the damping weight.
pub fn fixed_point_solve(
    initial: &InitialData,
    law: &VirialLaw,
    config: &FixedPointConfig,
    eps: f64,
    params: &SolverParams,
    t0: f64,
    slab_index: usize,
) -> Result<(SlabTrajectory, SlabReport)> {
    config.check()?;
    initial_energy(initial, law)?;
    let t1 = t0 + config.slab_length;
    let times: Vec<f64> = (0..=config.samples_per_slab)
        .map(|i| t0 + config.slab_length * i as f64 / config.samples_per_slab as f64)
        .collect();

    let hydro0 = HydroState::new(initial.rho.clone(), initial.m.clone(), t0)?;
    let mut g0 = ScalarField::zeros(initial.rho.grid);
    for c in 0..g0.len() {
        g0.values[c] = law.good_unknown(
            ThermoPoint::new(initial.rho.values[c], initial.theta.values[c]),
            eps,
        )?;
    }

    let mut theta_iter = ThetaTrajectory::constant(times.clone(), initial.theta.clone());
    let mut update_norms = Vec::new();

    for iter in 0..config.max_iter {
        let traj = apply_l(&theta_iter, &hydro0, &g0, law, eps, params).map_err(|e| {
            annotate(e, &format!("fixed-point iteration {iter} on slab {slab_index}"))
        })?;
        // Residual |L(theta) - theta| / |theta| over the slab.
        let diff: Vec<ScalarField> = (0..times.len())
            .map(|k| traj.theta[k].add_scaled(&theta_iter.fields[k], -1.0))
            .collect();
        let norm_theta = SlabTrajectory::spacetime_l2(&times, &theta_iter.fields).max(1e-300);
        let residual = SlabTrajectory::spacetime_l2(&times, &diff) / norm_theta;
        update_norms.push(residual);

        if residual < config.tol {
            let report = SlabReport {
                slab_index,
                t0,
                t1,
                iterations: iter + 1,
                update_norms,
                converged: true,
            };
            return Ok((traj, report));
        }

        // Damped update theta <- (1 - omega) theta + omega L(theta).
        for k in 0..times.len() {
            theta_iter.fields[k] = theta_iter.fields[k]
                .add_scaled(&diff[k], config.omega);
        }
    }

    Err(Error::ConvergenceFailure {
        context: format!(
            "fixed point on slab {slab_index} [{t0}, {t1}]; update norms {:?}",
            update_norms
        ),
        residual: *update_norms.last().unwrap_or(&f64::NAN),
        iterations: config.max_iter,
    })
}

/// Chains fixed-point slabs until `t_final`, seeding each slab from the
/// terminal fields of the previous one (exact discrete continuity of
/// `rho`, `m` and `g`).
pub fn continue_slabs(
    initial: &InitialData,
    law: &VirialLaw,
    config: &FixedPointConfig,
    eps: f64,
    params: &SolverParams,
    t_final: f64,
) -> Result<(SlabTrajectory, RunReport)> {
    config.check()?;
    if !(t_final > 0.0) {
        return Err(Error::Config(format!("t_final must be positive, got {t_final}")));
    }
    let n_slabs = (t_final / config.slab_length - 1e-12).ceil().max(1.0) as usize;
    let mut report = RunReport::default();
    let mut current = initial.clone();
    let mut combined: Option<SlabTrajectory> = None;
    let mut t0 = 0.0;

    for slab in 0..n_slabs {
        let mut cfg = config.clone();
        cfg.slab_length = config.slab_length.min(t_final - t0);
        let (traj, slab_report) =
            fixed_point_solve(&current, law, &cfg, eps, params, t0, slab)?;
        report.slabs.push(slab_report);

        let last = traj.len() - 1;
        current = InitialData {
            rho: traj.rho[last].clone(),
            m: traj.m[last].clone(),
            theta: traj.theta[last].clone(),
        };
        t0 = traj.times[last];

        combined = Some(match combined {
            None => traj,
            Some(mut acc) => {
                // Drop the duplicated seam sample.
                acc.times.extend_from_slice(&traj.times[1..]);
                acc.rho.extend_from_slice(&traj.rho[1..]);
                acc.m.extend_from_slice(&traj.m[1..]);
                acc.u.extend_from_slice(&traj.u[1..]);
                acc.theta.extend_from_slice(&traj.theta[1..]);
                acc.g.extend_from_slice(&traj.g[1..]);
                acc
            }
        });
    }

    Ok((combined.expect("at least one slab"), report))
}
