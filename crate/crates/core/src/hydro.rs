//! Frozen-temperature hydrodynamic step: continuity and momentum equations
//! with the pressure evaluated at a prescribed temperature field.
//!
//! Advection uses the conservative local Lax-Friedrichs flux, the pressure
//! gradient and viscous terms use central stencils, time integration is
//! two-stage strong-stability-preserving Runge-Kutta. Total mass and momentum
//! are conserved to round-off; density positivity is asserted, never
//! repaired.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::law::{ThermoPoint, VirialLaw};
use crate::ops;

/// Floor for the squared sound speed in the CFL control; non-monotone laws
/// can make `dP/drho` negative, where viscosity and LLF dissipation carry
/// the stability instead.
pub const C2_FLOOR: f64 = 1e-12;

/// Density and momentum at one time level.
#[derive(Debug, Clone)]
pub struct HydroState {
    pub rho: ScalarField,
    pub m: VectorField,
    pub t: f64,
}

/// Explicit-step control.
#[derive(Debug, Clone)]
pub struct HydroParams {
    pub cfl: f64,
    pub rho_floor_abort: f64,
}

impl Default for HydroParams {
    fn default() -> Self {
        HydroParams {
            cfl: 0.4,
            rho_floor_abort: 1e-10,
        }
    }
}

impl HydroState {
    pub fn new(rho: ScalarField, m: VectorField, t: f64) -> Result<Self> {
        if rho.grid != m.grid {
            return Err(Error::Config("rho and m live on different grids".to_string()));
        }
        Ok(HydroState { rho, m, t })
    }

    /// Velocity `u = m / rho`.
    pub fn velocity(&self, params: &HydroParams) -> Result<VectorField> {
        self.check_admissible(params)?;
        let mut u = VectorField::zeros(self.m.grid);
        for axis in 0..self.m.dim() {
            for c in 0..self.rho.len() {
                u.comps[axis][c] = self.m.comps[axis][c] / self.rho.values[c];
            }
        }
        Ok(u)
    }

    fn check_admissible(&self, params: &HydroParams) -> Result<()> {
        let min_rho = self.rho.min();
        if !(min_rho > params.rho_floor_abort) {
            return Err(Error::NonPhysicalState(format!(
                "density reached {min_rho:.3e} at t = {} (floor {:.1e})",
                self.t, params.rho_floor_abort
            )));
        }
        if !self.rho.all_finite() || !self.m.all_finite() {
            return Err(Error::NonPhysicalState(format!(
                "non-finite hydro field at t = {}",
                self.t
            )));
        }
        Ok(())
    }
}

/// Largest stable explicit step: CFL on `|u| + c` per cell combined with the
/// explicit viscous limit `h^2 rho / (2 d (2 mu + |lambda|))`.
pub fn stable_dt(
    state: &HydroState,
    theta: &ScalarField,
    law: &VirialLaw,
    params: &HydroParams,
) -> Result<f64> {
    let u = state.velocity(params)?;
    let speed = u.magnitude();
    let grid = state.rho.grid;
    let h = grid.h();
    let visc_coeff = 2.0 * grid.dim as f64 * (2.0 * law.mu + law.lambda.abs());
    let mut dt = f64::INFINITY;
    for c in 0..state.rho.len() {
        let p = ThermoPoint::new(state.rho.values[c], theta.values[c].max(0.0));
        let cs = law.sound_speed(p, C2_FLOOR);
        let acoustic = h / (speed.values[c] + cs);
        dt = dt.min(acoustic);
        if visc_coeff > 0.0 {
            dt = dt.min(h * h * state.rho.values[c] / visc_coeff);
        }
    }
    Ok(params.cfl * dt)
}

/// Tendencies of `(rho, m)` with temperature frozen; optional forcing for
/// manufactured-solution runs.
pub fn hydro_rhs(
    state: &HydroState,
    theta: &ScalarField,
    law: &VirialLaw,
    params: &HydroParams,
    forcing: Option<(&ScalarField, &VectorField)>,
) -> Result<(ScalarField, VectorField)> {
    let grid = state.rho.grid;
    let u = state.velocity(params)?;
    let speed = u.magnitude();

    // Cellwise wavespeed |u| + c for the LLF dissipation.
    let mut wavespeed = ScalarField::zeros(grid);
    let mut pressure = ScalarField::zeros(grid);
    for c in 0..grid.cells() {
        let p = ThermoPoint::new(state.rho.values[c], theta.values[c].max(0.0));
        wavespeed.values[c] = speed.values[c] + law.sound_speed(p, C2_FLOOR);
        pressure.values[c] = law.pressure(p);
    }

    // Continuity: conservative LLF flux of rho.
    let mut drho = ops::llf_flux(&state.rho, &u, &wavespeed).divergence(&grid);
    for v in drho.values.iter_mut() {
        *v = -*v;
    }

    // Momentum: LLF advection of each component, central pressure gradient,
    // viscous terms mu lap(u_j) + (lambda + mu) grad_j(div u).
    let grad_p = ops::gradient(&pressure);
    let div_u = ops::divergence(&u);
    let grad_div_u = ops::gradient(&div_u);
    let mut dm = VectorField::zeros(grid);
    for j in 0..grid.dim {
        let mj = ScalarField {
            grid,
            values: state.m.comps[j].clone(),
        };
        let adv = ops::llf_flux(&mj, &u, &wavespeed).divergence(&grid);
        let uj = ScalarField {
            grid,
            values: u.comps[j].clone(),
        };
        let lap_uj = ops::laplacian(&uj);
        for c in 0..grid.cells() {
            dm.comps[j][c] = -adv.values[c] - grad_p.comps[j][c]
                + law.mu * lap_uj.values[c]
                + (law.lambda + law.mu) * grad_div_u.comps[j][c];
        }
    }

    if let Some((f_rho, f_m)) = forcing {
        for c in 0..grid.cells() {
            drho.values[c] += f_rho.values[c];
        }
        for j in 0..grid.dim {
            for c in 0..grid.cells() {
                dm.comps[j][c] += f_m.comps[j][c];
            }
        }
    }

    Ok((drho, dm))
}

/// One SSP-RK2 step with the temperature frozen over the step.
pub fn hydro_step(
    state: &HydroState,
    theta: &ScalarField,
    law: &VirialLaw,
    params: &HydroParams,
    dt: f64,
) -> Result<HydroState> {
    hydro_step_forced(state, theta, law, params, dt, None, None)
}

/// SSP-RK2 step with optional forcing evaluated at the stage times
/// (`forcing_start` at t, `forcing_end` at t + dt).
pub fn hydro_step_forced(
    state: &HydroState,
    theta: &ScalarField,
    law: &VirialLaw,
    params: &HydroParams,
    dt: f64,
    forcing_start: Option<(&ScalarField, &VectorField)>,
    forcing_end: Option<(&ScalarField, &VectorField)>,
) -> Result<HydroState> {
    let (k1_rho, k1_m) = hydro_rhs(state, theta, law, params, forcing_start)?;
    let stage = HydroState {
        rho: state.rho.add_scaled(&k1_rho, dt),
        m: state.m.add_scaled(&k1_m, dt),
        t: state.t + dt,
    };
    stage.check_admissible(params)?;
    let (k2_rho, k2_m) = hydro_rhs(&stage, theta, law, params, forcing_end)?;
    // u^{n+1} = (u^n + u* + dt k2) / 2
    let mut rho = state.rho.add_scaled(&stage.rho, 1.0);
    rho = rho.add_scaled(&k2_rho, dt);
    for v in rho.values.iter_mut() {
        *v *= 0.5;
    }
    let mut m = state.m.add_scaled(&stage.m, 1.0);
    m = m.add_scaled(&k2_m, dt);
    for comp in m.comps.iter_mut() {
        for v in comp.iter_mut() {
            *v *= 0.5;
        }
    }
    let next = HydroState {
        rho,
        m,
        t: state.t + dt,
    };
    next.check_admissible(params)?;
    Ok(next)
}

/// A temperature trajectory sampled at increasing times, with linear
/// interpolation in between.
#[derive(Debug, Clone)]
pub struct ThetaTrajectory {
    pub times: Vec<f64>,
    pub fields: Vec<ScalarField>,
}

impl ThetaTrajectory {
    pub fn constant(times: Vec<f64>, theta: ScalarField) -> Self {
        let fields = times.iter().map(|_| theta.clone()).collect();
        ThetaTrajectory { times, fields }
    }

    pub fn check(&self) -> Result<()> {
        if self.times.len() != self.fields.len() || self.times.is_empty() {
            return Err(Error::Config(
                "theta trajectory needs one field per sample time".to_string(),
            ));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "theta trajectory times must be strictly increasing".to_string(),
            ));
        }
        Ok(())
    }

    /// Linear interpolation at `t`; errors when `t` lies outside the
    /// covered interval (up to a small slack for round-off).
    pub fn sample(&self, t: f64) -> Result<ScalarField> {
        let t0 = self.times[0];
        let t1 = *self.times.last().unwrap();
        let slack = 1e-9 * (1.0 + t1.abs());
        if t < t0 - slack || t > t1 + slack {
            return Err(Error::Config(format!(
                "theta trajectory covers [{t0}, {t1}] but t = {t} was requested"
            )));
        }
        let t = t.clamp(t0, t1);
        let k = match self
            .times
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(k) => return Ok(self.fields[k].clone()),
            Err(k) => k,
        };
        let (ta, tb) = (self.times[k - 1], self.times[k]);
        let w = (t - ta) / (tb - ta);
        Ok(self.fields[k - 1].add_scaled(
            &self.fields[k].add_scaled(&self.fields[k - 1], -1.0),
            w,
        ))
    }
}

/// Marches the hydrodynamic system across a slab with the temperature
/// prescribed, returning the state at every requested output time
/// (`out_times[0]` must equal `initial.t`).
pub fn solve_hydro_slab(
    initial: &HydroState,
    theta_traj: &ThetaTrajectory,
    law: &VirialLaw,
    params: &HydroParams,
    out_times: &[f64],
) -> Result<Vec<HydroState>> {
    theta_traj.check()?;
    if out_times.is_empty() || (out_times[0] - initial.t).abs() > 1e-12 {
        return Err(Error::Config(
            "output times must start at the initial state time".to_string(),
        ));
    }
    let mut states = Vec::with_capacity(out_times.len());
    let mut current = initial.clone();
    states.push(current.clone());
    for &target in &out_times[1..] {
        while current.t < target - 1e-14 {
            let theta_now = theta_traj.sample(current.t)?;
            let dt_stable = stable_dt(&current, &theta_now, law, params)?;
            let dt = dt_stable.min(target - current.t);
            // Temperature frozen at the step midpoint.
            let theta_mid = theta_traj.sample(current.t + 0.5 * dt)?;
            current = hydro_step(&current, &theta_mid, law, params, dt)?;
        }
        current.t = target;
        states.push(current.clone());
    }
    Ok(states)
}
