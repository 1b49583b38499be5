//! Linear solvers for the compact-stencil Newton systems.
//!
//! 1D systems are periodic tridiagonal and solved directly (Thomas
//! elimination with the Sherman-Morrison wrap correction). 2D systems use
//! BiCGSTAB with Jacobi preconditioning driven to near machine precision,
//! with a fixed, deterministic iteration.

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

/// Sparse matrix on the periodic compact stencil:
/// `diag[c]` multiplies `x[c]`, `plus[axis][c]` the `+1` neighbour along
/// `axis`, `minus[axis][c]` the `-1` neighbour.
#[derive(Debug, Clone)]
pub struct StencilMatrix {
    pub grid: PeriodicGrid,
    pub diag: Vec<f64>,
    pub plus: Vec<Vec<f64>>,
    pub minus: Vec<Vec<f64>>,
}

impl StencilMatrix {
    pub fn new(grid: PeriodicGrid) -> Self {
        let n = grid.cells();
        StencilMatrix {
            grid,
            diag: vec![0.0; n],
            plus: (0..grid.dim).map(|_| vec![0.0; n]).collect(),
            minus: (0..grid.dim).map(|_| vec![0.0; n]).collect(),
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let grid = &self.grid;
        for c in 0..grid.cells() {
            let mut acc = self.diag[c] * x[c];
            for axis in 0..grid.dim {
                acc += self.plus[axis][c] * x[grid.neighbor(c, axis, 1)];
                acc += self.minus[axis][c] * x[grid.neighbor(c, axis, -1)];
            }
            y[c] = acc;
        }
    }
}

/// Solves `A x = b`.
pub fn solve(a: &StencilMatrix, b: &[f64]) -> Result<Vec<f64>> {
    match a.grid.dim {
        1 => solve_periodic_tridiagonal(a, b),
        _ => bicgstab(a, b),
    }
}

/// Direct solve of the periodic tridiagonal system.
fn solve_periodic_tridiagonal(a: &StencilMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let sub = &a.minus[0];
    let sup = &a.plus[0];
    let diag = &a.diag;

    if n < 3 {
        return Err(Error::Config("tridiagonal solve needs n >= 3".to_string()));
    }

    // A = B + u v^T with u = (gamma, 0, .., 0, sup[n-1]),
    // v = (1, 0, .., 0, sub[0]/gamma); B is tridiagonal with modified
    // first/last diagonal entries.
    let gamma = -diag[0];
    let mut bdiag = diag.to_vec();
    bdiag[0] -= gamma;
    bdiag[n - 1] -= sup[n - 1] * sub[0] / gamma;

    let solve_tri = |rhs: &[f64]| -> Result<Vec<f64>> {
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        let mut denom = bdiag[0];
        if denom == 0.0 {
            return Err(Error::ConvergenceFailure {
                context: "tridiagonal pivot".to_string(),
                residual: 0.0,
                iterations: 0,
            });
        }
        c_prime[0] = sup[0] / denom;
        d_prime[0] = rhs[0] / denom;
        for i in 1..n {
            denom = bdiag[i] - sub[i] * c_prime[i - 1];
            if denom == 0.0 {
                return Err(Error::ConvergenceFailure {
                    context: "tridiagonal pivot".to_string(),
                    residual: 0.0,
                    iterations: i,
                });
            }
            c_prime[i] = sup[i] / denom;
            d_prime[i] = (rhs[i] - sub[i] * d_prime[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d_prime[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d_prime[i] - c_prime[i] * x[i + 1];
        }
        Ok(x)
    };

    let y = solve_tri(b)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = sup[n - 1];
    let z = solve_tri(&u)?;
    let vy = y[0] + sub[0] / gamma * y[n - 1];
    let vz = z[0] + sub[0] / gamma * z[n - 1];
    let factor = vy / (1.0 + vz);
    Ok(y.iter().zip(&z).map(|(&yi, &zi)| yi - factor * zi).collect())
}

/// Jacobi-preconditioned BiCGSTAB, driven to relative residual 1e-13.
fn bicgstab(a: &StencilMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let norm_b = l2(b);
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let tol = 1e-13 * norm_b;
    let minv: Vec<f64> = a
        .diag
        .iter()
        .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let mut rho_old = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut residual = norm_b;

    let max_iter = 200 + 10 * n;
    for _ in 0..max_iter {
        let rho: f64 = dot(&r_hat, &r);
        if rho.abs() < 1e-300 {
            break;
        }
        let beta = (rho / rho_old) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat: Vec<f64> = (0..n).map(|i| minv[i] * p[i]).collect();
        a.matvec(&p_hat, &mut v);
        alpha = rho / dot(&r_hat, &v);
        let s: Vec<f64> = (0..n).map(|i| r[i] - alpha * v[i]).collect();
        if l2(&s) <= tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return Ok(x);
        }
        let s_hat: Vec<f64> = (0..n).map(|i| minv[i] * s[i]).collect();
        let mut t = vec![0.0; n];
        a.matvec(&s_hat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            break;
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        residual = l2(&r);
        if residual <= tol {
            return Ok(x);
        }
        if omega == 0.0 {
            break;
        }
        rho_old = rho;
    }
    // Accept a slightly looser residual before declaring failure.
    if residual <= 1e-9 * norm_b {
        return Ok(x);
    }
    Err(Error::ConvergenceFailure {
        context: "BiCGSTAB linear solve".to_string(),
        residual: residual / norm_b,
        iterations: max_iter,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn l2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
