//! Manufactured solutions for order verification.
//!
//! Analytic forcings are injected so that a chosen smooth field solves the
//! discrete systems exactly up to truncation error, exposing the spatial and
//! temporal convergence orders of the thermal and hydrodynamic steps.

use crate::error::Result;
use crate::field::{ScalarField, VectorField};
use crate::grid::PeriodicGrid;
use crate::hydro::{self, HydroParams, HydroState};
use crate::law::{ThermoPoint, VirialLaw};
use crate::ops;
use crate::presets;
use crate::thermal::{self, ThermalParams, ThermalState};
use std::f64::consts::TAU;

/// Verification case selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmsCase {
    /// Decaying temperature wave, pure diffusion: spatial order 2.
    ThermalDiffusion,
    /// Traveling density wave at unit velocity: LLF first-order floor.
    HydroAdvective,
    /// Decaying shear at low sound speed: viscosity-dominated, order 2.
    HydroDiffusive,
}

/// One row of a convergence table.
#[derive(Debug, Clone)]
pub struct MmsRow {
    /// Resolution (cells per axis) or inverse time step, depending on the study.
    pub n: usize,
    pub error: f64,
    /// Observed order against the previous row; `None` for the first row.
    pub order: Option<f64>,
}

/// Builds rows with observed orders from `(n, error)` pairs, assuming the
/// control parameter doubles between entries.
pub fn table_with_orders(entries: &[(usize, f64)]) -> Vec<MmsRow> {
    entries
        .iter()
        .enumerate()
        .map(|(i, &(n, error))| MmsRow {
            n,
            error,
            order: if i == 0 {
                None
            } else {
                Some((entries[i - 1].1 / error).log2())
            },
        })
        .collect()
}

// --- Thermal case: theta*(t, x) = 1 + sin(2 pi x) exp(-t) / 2, rho = 1, u = 0.

fn thermal_exact_theta(t: f64, x: f64) -> f64 {
    1.0 + 0.5 * (TAU * x).sin() * (-t).exp()
}

fn thermal_exact_theta_t(t: f64, x: f64) -> f64 {
    -0.5 * (TAU * x).sin() * (-t).exp()
}

fn thermal_exact_theta_x(t: f64, x: f64) -> f64 {
    0.5 * TAU * (TAU * x).cos() * (-t).exp()
}

fn thermal_exact_theta_xx(t: f64, x: f64) -> f64 {
    -0.5 * TAU * TAU * (TAU * x).sin() * (-t).exp()
}

/// Forcing `f = dg*/dt - div(kappa(theta*) grad theta*)` for the pure
/// diffusion manufactured solution at uniform density.
fn thermal_forcing(law: &VirialLaw, eps: f64, grid: PeriodicGrid, t: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x, _| {
        let theta = thermal_exact_theta(t, x);
        let p = ThermoPoint::new(1.0, theta);
        let dg_dt = law.dg_dtheta(p, eps) * thermal_exact_theta_t(t, x);
        let tx = thermal_exact_theta_x(t, x);
        let txx = thermal_exact_theta_xx(t, x);
        let diff = law.conductivity_dtheta(theta) * tx * tx + law.conductivity(theta) * txx;
        dg_dt - diff
    })
}

/// Residual of the exact solution inserted into the backward-Euler
/// discretization: `O(dt + h^2)` on smooth data.
pub fn thermal_exact_residual_norm(n: usize, dt: f64, eps: f64) -> Result<f64> {
    let law = presets::reference_law();
    let grid = PeriodicGrid::unit(1, n)?;
    let t0 = 0.0;
    let t1 = dt;
    let exact = |t: f64| -> Result<ScalarField> {
        let mut g = ScalarField::zeros(grid);
        for c in 0..grid.cells() {
            let x = grid.coord(c, 0);
            g.values[c] =
                law.good_unknown(ThermoPoint::new(1.0, thermal_exact_theta(t, x)), eps)?;
        }
        Ok(g)
    };
    let g_old = exact(t0)?;
    let g_new = exact(t1)?;
    let rho = ScalarField::constant(grid, 1.0);
    let u = VectorField::zeros(grid);
    let r = thermal::thermal_residual(&g_new, &g_old, &rho, &u, &law, eps, dt)?;
    let f = thermal_forcing(&law, eps, grid, t1);
    Ok(ops::lp_norm(&r.add_scaled(&f, -1.0), 2.0))
}

/// Marches the thermal manufactured problem to `t_end` and returns the final
/// temperature field.
pub fn run_thermal_mms_field(n: usize, dt: f64, t_end: f64, eps: f64) -> Result<ScalarField> {
    let law = presets::reference_law();
    let grid = PeriodicGrid::unit(1, n)?;
    let rho = ScalarField::constant(grid, 1.0);
    let u = VectorField::zeros(grid);
    let params = ThermalParams {
        newton_tol: 1e-12,
        ..ThermalParams::default()
    };

    let mut g0 = ScalarField::zeros(grid);
    for c in 0..grid.cells() {
        let x = grid.coord(c, 0);
        g0.values[c] = law.good_unknown(ThermoPoint::new(1.0, thermal_exact_theta(0.0, x)), eps)?;
    }
    let mut state = ThermalState {
        g: g0,
        eps,
        t: 0.0,
    };
    while state.t < t_end - 1e-12 {
        let step = dt.min(t_end - state.t);
        let forcing = thermal_forcing(&law, eps, grid, state.t + step);
        state = thermal::thermal_step_forced(&state, &rho, &u, &law, &params, step, Some(&forcing))?;
    }
    thermal::theta_field(&state.g, &rho, &law, eps)
}

/// Discrete L2 error of the temperature against the manufactured solution.
pub fn run_thermal_mms(n: usize, dt: f64, t_end: f64, eps: f64) -> Result<f64> {
    let theta = run_thermal_mms_field(n, dt, t_end, eps)?;
    let exact = ScalarField::from_fn(theta.grid, |x, _| thermal_exact_theta(t_end, x));
    Ok(ops::lp_norm(&theta.add_scaled(&exact, -1.0), 2.0))
}

// --- Hydro advective case: rho*(t, x) = 1 + a sin(2 pi (x - t)), u* = 1.

const ADV_AMPLITUDE: f64 = 0.02;

fn advective_exact_rho(t: f64, x: f64) -> f64 {
    1.0 + ADV_AMPLITUDE * (TAU * (x - t)).sin()
}

/// Momentum forcing `gamma rho^(gamma-1) drho/dx` that balances the pressure
/// gradient of the traveling wave.
fn advective_forcing(law: &VirialLaw, grid: PeriodicGrid, t: f64) -> (ScalarField, VectorField) {
    let f_rho = ScalarField::zeros(grid);
    let f_m = VectorField::from_fn(grid, |x, _, axis| {
        if axis != 0 {
            return 0.0;
        }
        let rho = advective_exact_rho(t, x);
        let drho = ADV_AMPLITUDE * TAU * (TAU * (x - t)).cos();
        law.gamma * rho.powf(law.gamma - 1.0) * drho
    });
    (f_rho, f_m)
}

/// Runs the traveling-wave case at resolution `n`, returning the L1 density
/// error at `t_end`.
pub fn run_hydro_advective_mms(n: usize, t_end: f64) -> Result<f64> {
    let mut law = presets::reference_law();
    law.mu = 1e-3;
    let grid = PeriodicGrid::unit(1, n)?;
    let params = HydroParams::default();
    let theta = ScalarField::zeros(grid);

    let rho0 = ScalarField::from_fn(grid, |x, _| advective_exact_rho(0.0, x));
    let m0 = VectorField::from_fn(grid, |x, _, _| advective_exact_rho(0.0, x));
    let mut state = HydroState::new(rho0, m0, 0.0)?;
    while state.t < t_end - 1e-12 {
        let dt_stable = hydro::stable_dt(&state, &theta, &law, &params)?;
        let dt = dt_stable.min(t_end - state.t);
        let f0 = advective_forcing(&law, grid, state.t);
        let f1 = advective_forcing(&law, grid, state.t + dt);
        state = hydro::hydro_step_forced(
            &state,
            &theta,
            &law,
            &params,
            dt,
            Some((&f0.0, &f0.1)),
            Some((&f1.0, &f1.1)),
        )?;
    }
    let exact = ScalarField::from_fn(grid, |x, _| advective_exact_rho(t_end, x));
    Ok(ops::lp_norm(&state.rho.add_scaled(&exact, -1.0), 1.0))
}

// --- Hydro diffusive case: u*(t, x) = A sin(2 pi x) exp(-t) at rho = 0.1.

const DIFF_RHO: f64 = 0.1;
const DIFF_AMPLITUDE: f64 = 0.05;
const DIFF_MU: f64 = 0.05;

fn diffusive_exact_u(t: f64, x: f64) -> f64 {
    DIFF_AMPLITUDE * (TAU * x).sin() * (-t).exp()
}

fn diffusive_forcing(law: &VirialLaw, grid: PeriodicGrid, t: f64) -> (ScalarField, VectorField) {
    let f_rho = ScalarField::from_fn(grid, |x, _| {
        DIFF_RHO * DIFF_AMPLITUDE * TAU * (TAU * x).cos() * (-t).exp()
    });
    let f_m = VectorField::from_fn(grid, |x, _, axis| {
        if axis != 0 {
            return 0.0;
        }
        let u = diffusive_exact_u(t, x);
        let u_t = -u;
        let u_x = DIFF_AMPLITUDE * TAU * (TAU * x).cos() * (-t).exp();
        let u_xx = -TAU * TAU * u;
        DIFF_RHO * u_t + DIFF_RHO * 2.0 * u * u_x - (2.0 * law.mu + law.lambda) * u_xx
    });
    (f_rho, f_m)
}

/// Runs the viscosity-dominated case, returning the L2 velocity error.
pub fn run_hydro_diffusive_mms(n: usize, t_end: f64) -> Result<f64> {
    let mut law = presets::reference_law();
    law.mu = DIFF_MU;
    let grid = PeriodicGrid::unit(1, n)?;
    let params = HydroParams::default();
    let theta = ScalarField::zeros(grid);

    let rho0 = ScalarField::constant(grid, DIFF_RHO);
    let m0 = VectorField::from_fn(grid, |x, _, _| DIFF_RHO * diffusive_exact_u(0.0, x));
    let mut state = HydroState::new(rho0, m0, 0.0)?;
    while state.t < t_end - 1e-12 {
        let dt_stable = hydro::stable_dt(&state, &theta, &law, &params)?;
        let dt = dt_stable.min(t_end - state.t);
        let f0 = diffusive_forcing(&law, grid, state.t);
        let f1 = diffusive_forcing(&law, grid, state.t + dt);
        state = hydro::hydro_step_forced(
            &state,
            &theta,
            &law,
            &params,
            dt,
            Some((&f0.0, &f0.1)),
            Some((&f1.0, &f1.1)),
        )?;
    }
    let u = state.velocity(&params)?;
    let exact = ScalarField::from_fn(grid, |x, _| diffusive_exact_u(t_end, x));
    let diff = ScalarField {
        grid,
        values: u.comps[0].clone(),
    }
    .add_scaled(&exact, -1.0);
    Ok(ops::lp_norm(&diff, 2.0))
}

/// Spatial convergence study for the thermal case: the time step shrinks
/// quadratically with the mesh so the spatial truncation dominates.
pub fn thermal_spatial_study(resolutions: &[usize], eps: f64) -> Result<Vec<(usize, f64)>> {
    let t_end = 0.04;
    let base_n = resolutions[0] as f64;
    let base_dt = 2e-3;
    resolutions
        .iter()
        .map(|&n| {
            let dt = base_dt * (base_n / n as f64).powi(2);
            Ok((n, run_thermal_mms(n, dt, t_end, eps)?))
        })
        .collect()
}

/// Temporal convergence study at a fixed mesh, measured against a reference
/// run with a 16x smaller step on the same mesh so the spatial error cancels
/// and the backward-Euler first-order behaviour is isolated.
pub fn thermal_temporal_study(dts: &[f64], eps: f64) -> Result<Vec<(usize, f64)>> {
    let t_end = 0.04;
    let n = 64;
    let dt_ref = dts.iter().cloned().fold(f64::INFINITY, f64::min) / 16.0;
    let reference = run_thermal_mms_field(n, dt_ref, t_end, eps)?;
    dts.iter()
        .map(|&dt| {
            let theta = run_thermal_mms_field(n, dt, t_end, eps)?;
            let err = ops::lp_norm(&theta.add_scaled(&reference, -1.0), 2.0);
            Ok(((1.0 / dt).round() as usize, err))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_forcing_constant_solution_is_exact() {
        // Uniform initial data with no forcing stays put to round-off.
        let law = presets::reference_law();
        let grid = PeriodicGrid::unit(1, 32).unwrap();
        let rho = ScalarField::constant(grid, 1.0);
        let u = VectorField::zeros(grid);
        let eps = 1e-3;
        let g = ScalarField::constant(
            grid,
            law.good_unknown(ThermoPoint::new(1.0, 1.0), eps).unwrap(),
        );
        let state = ThermalState { g, eps, t: 0.0 };
        let next = thermal::thermal_step(
            &state,
            &rho,
            &u,
            &law,
            &ThermalParams::default(),
            1e-3,
        )
        .unwrap();
        assert_eq!(next.g.values, state.g.values);
    }

    #[test]
    fn exact_solution_residual_shrinks_with_refinement() {
        let r_coarse = thermal_exact_residual_norm(32, 4e-3, 1e-3).unwrap();
        let r_fine = thermal_exact_residual_norm(64, 2e-3, 1e-3).unwrap();
        assert!(
            r_fine < 0.7 * r_coarse,
            "residual {r_coarse} -> {r_fine} under refinement"
        );
    }
}
