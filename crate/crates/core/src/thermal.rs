//! Regularized quasi-linear thermal step on the good unknown `g`.
//!
//! With density and velocity prescribed, each step solves the backward-Euler
//! discretization of
//!
//! `dg/dt + div(g u) + P~_eps(rho, theta) div u = S : grad u + div(kappa(theta) grad theta)`
//!
//! with `theta = theta(rho, g)` recovered by pointwise monotone inversion.
//! The Newton Jacobian carries the diffusion and reaction terms through
//! `d theta / d g = (dg/dtheta)^-1`; the advective flux is linear in `g`
//! (the LLF wavespeed is `|u|`, independent of `g`), so its Jacobian is exact.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::law::{ThermoPoint, VirialLaw};
use crate::linsolve::{self, StencilMatrix};
use crate::ops;

/// Good-unknown field with its regularization parameter.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub g: ScalarField,
    pub eps: f64,
    pub t: f64,
}

/// Newton-iteration control.
#[derive(Debug, Clone)]
pub struct ThermalParams {
    /// Relative nonlinear residual tolerance.
    pub newton_tol: f64,
    /// Newton iteration cap.
    pub newton_max: usize,
    /// Lag the diffusion coefficient by one Newton iterate (drop the
    /// kappa' terms from the Jacobian).
    pub picard_lag: bool,
}

impl Default for ThermalParams {
    fn default() -> Self {
        ThermalParams {
            newton_tol: 1e-10,
            newton_max: 50,
            picard_lag: false,
        }
    }
}

/// Pointwise inversion of the good unknown into temperature.
pub fn theta_field(
    g: &ScalarField,
    rho: &ScalarField,
    law: &VirialLaw,
    eps: f64,
) -> Result<ScalarField> {
    let mut theta = ScalarField::zeros(g.grid);
    for c in 0..g.len() {
        theta.values[c] = law.theta_of_g(rho.values[c], g.values[c], eps).map_err(|e| {
            Error::NonPhysicalState(format!("theta inversion failed at cell {c}: {e}"))
        })?;
    }
    Ok(theta)
}

/// Entropy density `rho s_eps` with the regularization's `eps log theta` term.
pub fn entropy_field(
    g: &ScalarField,
    rho: &ScalarField,
    law: &VirialLaw,
    eps: f64,
) -> Result<ScalarField> {
    let theta = theta_field(g, rho, law, eps)?;
    let mut out = ScalarField::zeros(g.grid);
    for c in 0..g.len() {
        let p = ThermoPoint::new(rho.values[c], theta.values[c]);
        out.values[c] = rho.values[c] * law.entropy_eps(p, eps)?;
    }
    Ok(out)
}

/// Backward-Euler residual of the thermal equation at the candidate `g_new`.
pub fn thermal_residual(
    g_new: &ScalarField,
    g_old: &ScalarField,
    rho: &ScalarField,
    u: &VectorField,
    law: &VirialLaw,
    eps: f64,
    dt: f64,
) -> Result<ScalarField> {
    let theta = theta_field(g_new, rho, law, eps)?;
    Ok(assemble_residual(
        g_new, g_old, &theta, rho, u, law, eps, dt, None,
    ))
}

/// Residual with the temperature already inverted; forcing is the
/// manufactured-solution hook.
#[allow(clippy::too_many_arguments)]
fn assemble_residual(
    g_new: &ScalarField,
    g_old: &ScalarField,
    theta: &ScalarField,
    rho: &ScalarField,
    u: &VectorField,
    law: &VirialLaw,
    eps: f64,
    dt: f64,
    forcing: Option<&ScalarField>,
) -> ScalarField {
    let grid = g_new.grid;
    let speed = u.magnitude();
    let adv = ops::llf_flux(g_new, u, &speed).divergence(&grid);
    let div_u = ops::divergence(u);
    let stress = ops::stress_tensor(u, law.mu, law.lambda);
    let work = ops::stress_contract(&stress, u);
    let diff = conduction_divergence(theta, law);

    let mut r = ScalarField::zeros(grid);
    for c in 0..grid.cells() {
        let ptil = law.reduced_pressure(
            ThermoPoint::new(rho.values[c], theta.values[c]),
            eps,
        );
        r.values[c] = (g_new.values[c] - g_old.values[c]) / dt
            + adv.values[c]
            + ptil * div_u.values[c]
            - work.values[c]
            - diff.values[c];
        if let Some(f) = forcing {
            r.values[c] -= f.values[c];
        }
    }
    r
}

/// `div(kappa(theta) grad theta)` with face-averaged conductivity,
/// in conservative flux form.
pub fn conduction_divergence(theta: &ScalarField, law: &VirialLaw) -> ScalarField {
    let grid = theta.grid;
    let invh = 1.0 / grid.h();
    let kappa: Vec<f64> = theta.values.iter().map(|&t| law.conductivity(t)).collect();
    let mut out = ScalarField::zeros(grid);
    for axis in 0..grid.dim {
        for c in 0..grid.cells() {
            let p = grid.neighbor(c, axis, 1);
            let m = grid.neighbor(c, axis, -1);
            let flux_plus =
                0.5 * (kappa[c] + kappa[p]) * (theta.values[p] - theta.values[c]) * invh;
            let flux_minus =
                0.5 * (kappa[m] + kappa[c]) * (theta.values[c] - theta.values[m]) * invh;
            out.values[c] += (flux_plus - flux_minus) * invh;
        }
    }
    out
}

/// One backward-Euler step of size `dt`. Requires `eps > 0`; the degenerate
/// limit is reached by continuation, never stepped directly.
pub fn thermal_step(
    state: &ThermalState,
    rho: &ScalarField,
    u: &VectorField,
    law: &VirialLaw,
    params: &ThermalParams,
    dt: f64,
) -> Result<ThermalState> {
    thermal_step_forced(state, rho, u, law, params, dt, None)
}

/// Backward-Euler step with an optional manufactured forcing evaluated at
/// the new time level.
pub fn thermal_step_forced(
    state: &ThermalState,
    rho: &ScalarField,
    u: &VectorField,
    law: &VirialLaw,
    params: &ThermalParams,
    dt: f64,
    forcing: Option<&ScalarField>,
) -> Result<ThermalState> {
    if state.eps <= 0.0 {
        return Err(Error::Domain(
            "thermal stepping requires eps > 0 (use continuation for the limit)".to_string(),
        ));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("thermal step needs dt > 0, got {dt}")));
    }
    if state.g.min() <= 0.0 {
        return Err(Error::NonPhysicalState(format!(
            "thermal step requires g > 0, min g = {:.3e}",
            state.g.min()
        )));
    }


    let eps = state.eps;
    let scale = (1.0 + ops::lp_norm(&state.g, 2.0)) / dt;
    let mut x = state.g.clone();
    let mut residual_norm = f64::INFINITY;

    for iter in 0..=params.newton_max {
        let theta = theta_field(&x, rho, law, eps)?;
        let r = assemble_residual(&x, &state.g, &theta, rho, u, law, eps, dt, forcing);
        residual_norm = ops::lp_norm(&r, 2.0);
        if residual_norm <= params.newton_tol * scale {
            let next = ThermalState {
                g: x,
                eps,
                t: state.t + dt,
            };
            if next.g.min() <= 0.0 {
                return Err(Error::NonPhysicalState(format!(
                    "thermal step lost positivity: min g = {:.3e}",
                    next.g.min()
                )));
            }
            return Ok(next);
        }
        if iter == params.newton_max {
            break;
        }

        let jac = assemble_jacobian(&x, &theta, rho, u, law, eps, dt, params.picard_lag);
        let mut rhs = r.values.clone();
        for v in rhs.iter_mut() {
            *v = -*v;
        }
        let delta = linsolve::solve(&jac, &rhs)?;

        // Damp the update if it would make g non-positive.
        let mut step = 1.0_f64;
        let mut accepted = false;
        for _ in 0..40 {
            let candidate: Vec<f64> = x
                .values
                .iter()
                .zip(&delta)
                .map(|(&xv, &dv)| xv + step * dv)
                .collect();
            if candidate.iter().all(|&v| v > 0.0) {
                x.values = candidate;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NonPhysicalState(
                "Newton update could not preserve positivity of g".to_string(),
            ));
        }
    }

    Err(Error::ConvergenceFailure {
        context: "thermal backward-Euler Newton".to_string(),
        residual: residual_norm,
        iterations: params.newton_max,
    })
}

/// Newton matrix of the backward-Euler residual on the compact stencil.
#[allow(clippy::too_many_arguments)]
fn assemble_jacobian(
    g: &ScalarField,
    theta: &ScalarField,
    rho: &ScalarField,
    u: &VectorField,
    law: &VirialLaw,
    eps: f64,
    dt: f64,
    picard_lag: bool,
) -> StencilMatrix {
    let grid = g.grid;
    let n = grid.cells();
    let h = grid.h();
    let invh = 1.0 / h;
    let speed = u.magnitude();

    // Pointwise theta-derivative of the inversion and conductivities.
    let mut ti = vec![0.0; n]; // d theta / d g
    let mut kappa = vec![0.0; n];
    let mut kappa_p = vec![0.0; n];
    for c in 0..n {
        let p = ThermoPoint::new(rho.values[c], theta.values[c]);
        ti[c] = 1.0 / law.dg_dtheta(p, eps);
        kappa[c] = law.conductivity(theta.values[c]);
        kappa_p[c] = if picard_lag {
            0.0
        } else {
            law.conductivity_dtheta(theta.values[c])
        };
    }

    let mut mat = StencilMatrix::new(grid);
    for c in 0..n {
        let p = ThermoPoint::new(rho.values[c], theta.values[c]);
        let div_u_c = central_divergence_at(u, c);
        let reaction = law.reduced_pressure_dtheta(p, eps) * ti[c] * div_u_c;
        mat.diag[c] = 1.0 / dt + reaction;
    }

    for axis in 0..grid.dim {
        for c in 0..n {
            let pidx = grid.neighbor(c, axis, 1);
            let midx = grid.neighbor(c, axis, -1);
            let a_plus = speed.values[c].max(speed.values[pidx]);
            let a_minus = speed.values[midx].max(speed.values[c]);

            // Advection: linear in g.
            mat.diag[c] += 0.5 * (a_plus + a_minus) * invh;
            mat.plus[axis][c] += 0.5 * (u.comps[axis][pidx] - a_plus) * invh;
            mat.minus[axis][c] += -0.5 * (u.comps[axis][midx] + a_minus) * invh;

            // Diffusion: fluxes F+ = (kappa_c + kappa_p)/2 (theta_p - theta_c)/h.
            let dth_plus = theta.values[pidx] - theta.values[c];
            let dth_minus = theta.values[c] - theta.values[midx];
            let kf_plus = 0.5 * (kappa[c] + kappa[pidx]);
            let kf_minus = 0.5 * (kappa[midx] + kappa[c]);

            // dR/dx_c from the two faces.
            let dfp_dthc = (0.5 * kappa_p[c] * dth_plus - kf_plus) * invh;
            let dfm_dthc = (0.5 * kappa_p[c] * dth_minus + kf_minus) * invh;
            mat.diag[c] -= (dfp_dthc - dfm_dthc) * ti[c] * invh;

            // dR/dx_plus.
            let dfp_dthp = (0.5 * kappa_p[pidx] * dth_plus + kf_plus) * invh;
            mat.plus[axis][c] -= dfp_dthp * ti[pidx] * invh;

            // dR/dx_minus.
            let dfm_dthm = (0.5 * kappa_p[midx] * dth_minus - kf_minus) * invh;
            mat.minus[axis][c] -= -dfm_dthm * ti[midx] * invh;
        }
    }
    mat
}

/// Central `div u` at one cell.
fn central_divergence_at(u: &VectorField, c: usize) -> f64 {
    let grid = u.grid;
    let inv2h = 1.0 / (2.0 * grid.h());
    let mut d = 0.0;
    for axis in 0..grid.dim {
        d += (u.comps[axis][grid.neighbor(c, axis, 1)]
            - u.comps[axis][grid.neighbor(c, axis, -1)])
            * inv2h;
    }
    d
}

/// Marches `g` across a slab, one backward-Euler step per sample interval,
/// with `(rho, u)` taken at the new time level of each step. Returns the `g`
/// and `theta` trajectories at the sample times (the initial sample included).
pub fn solve_thermal_slab(
    g0: &ScalarField,
    rho_traj: &[ScalarField],
    u_traj: &[VectorField],
    times: &[f64],
    law: &VirialLaw,
    eps: f64,
    params: &ThermalParams,
) -> Result<(Vec<ScalarField>, Vec<ScalarField>)> {
    if times.len() != rho_traj.len() || times.len() != u_traj.len() || times.is_empty() {
        return Err(Error::Config(
            "thermal slab needs aligned rho/u/time samples".to_string(),
        ));
    }
    let mut state = ThermalState {
        g: g0.clone(),
        eps,
        t: times[0],
    };
    let mut g_out = vec![g0.clone()];
    let mut theta_out = vec![theta_field(g0, &rho_traj[0], law, eps)?];
    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        state = thermal_step(&state, &rho_traj[k], &u_traj[k], law, params, dt)?;
        g_out.push(state.g.clone());
        theta_out.push(theta_field(&state.g, &rho_traj[k], law, eps)?);
    }
    Ok((g_out, theta_out))
}
