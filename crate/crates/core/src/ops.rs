//! Second-order discrete differential operators and the local
//! Lax-Friedrichs advective flux on the periodic grid.
//!
//! Central stencils give exact summation-by-parts duality
//! `<grad f, v> = -<f, div v>`; everything advective is written in
//! flux-difference form so that integrals telescope exactly.

use crate::field::{ScalarField, VectorField};

/// Central gradient, component `i` at cell `c` is
/// `(f(c + e_i) - f(c - e_i)) / 2h`.
pub fn gradient(f: &ScalarField) -> VectorField {
    let grid = f.grid;
    let inv2h = 1.0 / (2.0 * grid.h());
    let mut out = VectorField::zeros(grid);
    for axis in 0..grid.dim {
        for c in 0..grid.cells() {
            let plus = f.values[grid.neighbor(c, axis, 1)];
            let minus = f.values[grid.neighbor(c, axis, -1)];
            out.comps[axis][c] = (plus - minus) * inv2h;
        }
    }
    out
}

/// Central divergence; its integral vanishes exactly by telescoping.
pub fn divergence(v: &VectorField) -> ScalarField {
    let grid = v.grid;
    let inv2h = 1.0 / (2.0 * grid.h());
    let mut out = ScalarField::zeros(grid);
    for axis in 0..grid.dim {
        for c in 0..grid.cells() {
            let plus = v.comps[axis][grid.neighbor(c, axis, 1)];
            let minus = v.comps[axis][grid.neighbor(c, axis, -1)];
            out.values[c] += (plus - minus) * inv2h;
        }
    }
    out
}

/// Compact 3-point (per axis) Laplacian.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let grid = f.grid;
    let invh2 = 1.0 / (grid.h() * grid.h());
    let mut out = ScalarField::zeros(grid);
    for axis in 0..grid.dim {
        for c in 0..grid.cells() {
            let plus = f.values[grid.neighbor(c, axis, 1)];
            let minus = f.values[grid.neighbor(c, axis, -1)];
            out.values[c] += (plus - 2.0 * f.values[c] + minus) * invh2;
        }
    }
    out
}

/// Per-cell viscous stress `S = mu (grad u + grad u^T) + lambda div u I`,
/// stored row-major as `d x d` entries per cell.
pub struct StressTensor {
    pub dim: usize,
    /// `entries[i * dim + j][cell] = S_ij`.
    pub entries: Vec<Vec<f64>>,
}

/// Assembles the stress tensor from central velocity gradients.
pub fn stress_tensor(u: &VectorField, mu: f64, lambda: f64) -> StressTensor {
    let grid = u.grid;
    let d = grid.dim;
    let grads: Vec<VectorField> = (0..d)
        .map(|j| {
            gradient(&ScalarField {
                grid,
                values: u.comps[j].clone(),
            })
        })
        .collect();
    let mut div_u = vec![0.0; grid.cells()];
    for (j, g) in grads.iter().enumerate() {
        for c in 0..grid.cells() {
            div_u[c] += g.comps[j][c];
        }
    }
    let mut entries = vec![vec![0.0; grid.cells()]; d * d];
    for i in 0..d {
        for j in 0..d {
            for c in 0..grid.cells() {
                // grad_i u_j + grad_j u_i
                let sym = grads[j].comps[i][c] + grads[i].comps[j][c];
                let mut s = mu * sym;
                if i == j {
                    s += lambda * div_u[c];
                }
                entries[i * d + j][c] = s;
            }
        }
    }
    StressTensor { dim: d, entries }
}

/// Divergence of a stress tensor, `(div S)_j = sum_i d_i S_ij`.
pub fn stress_divergence(s: &StressTensor, u_grid: &VectorField) -> VectorField {
    let grid = u_grid.grid;
    let d = s.dim;
    let inv2h = 1.0 / (2.0 * grid.h());
    let mut out = VectorField::zeros(grid);
    for j in 0..d {
        for i in 0..d {
            let row = &s.entries[i * d + j];
            for c in 0..grid.cells() {
                let plus = row[grid.neighbor(c, i, 1)];
                let minus = row[grid.neighbor(c, i, -1)];
                out.comps[j][c] += (plus - minus) * inv2h;
            }
        }
    }
    out
}

/// `S : grad u = Tr(S grad u)` per cell; non-negative whenever
/// `lambda + 2 mu / d >= 0` since the same central gradients build both.
pub fn stress_contract(s: &StressTensor, u: &VectorField) -> ScalarField {
    let grid = u.grid;
    let d = s.dim;
    let grads: Vec<VectorField> = (0..d)
        .map(|j| {
            gradient(&ScalarField {
                grid,
                values: u.comps[j].clone(),
            })
        })
        .collect();
    let mut out = ScalarField::zeros(grid);
    for i in 0..d {
        for j in 0..d {
            let row = &s.entries[i * d + j];
            for c in 0..grid.cells() {
                out.values[c] += row[c] * grads[j].comps[i][c];
            }
        }
    }
    out
}

/// Discrete integral `h^d sum_c f_c`.
pub fn integrate(f: &ScalarField) -> f64 {
    f.grid.cell_volume() * f.values.iter().sum::<f64>()
}

/// Discrete `L^p` norm; `p = infinity` is the max norm.
pub fn lp_norm(f: &ScalarField, p: f64) -> f64 {
    if p.is_infinite() {
        return f.values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    }
    let sum: f64 = f.values.iter().map(|&v| v.abs().powf(p)).sum();
    (f.grid.cell_volume() * sum).powf(1.0 / p)
}

/// Per-axis face fluxes: `fluxes[axis][c]` is the flux through the face
/// between `c` and its `+1` neighbour along `axis`.
pub struct FaceFluxes {
    pub fluxes: Vec<Vec<f64>>,
}

impl FaceFluxes {
    /// Flux-difference divergence `sum_axis (F_{c+1/2} - F_{c-1/2}) / h`;
    /// integrates to zero exactly.
    pub fn divergence(&self, grid: &crate::grid::PeriodicGrid) -> ScalarField {
        let invh = 1.0 / grid.h();
        let mut out = ScalarField::zeros(*grid);
        for (axis, flux) in self.fluxes.iter().enumerate() {
            for c in 0..grid.cells() {
                let left = flux[grid.neighbor(c, axis, -1)];
                out.values[c] += (flux[c] - left) * invh;
            }
        }
        out
    }
}

/// Local Lax-Friedrichs flux of the conserved quantity `q` advected by `v`:
/// `F_{c+1/2} = (q_c v_c + q_+ v_+)/2 - a_{c+1/2} (q_+ - q_c)/2` with the
/// face wavespeed `a_{c+1/2} = max(a_c, a_+)`.
pub fn llf_flux(q: &ScalarField, v: &VectorField, wavespeed: &ScalarField) -> FaceFluxes {
    let grid = q.grid;
    let mut fluxes = Vec::with_capacity(grid.dim);
    for axis in 0..grid.dim {
        let mut f = vec![0.0; grid.cells()];
        for c in 0..grid.cells() {
            let p = grid.neighbor(c, axis, 1);
            let a = wavespeed.values[c].max(wavespeed.values[p]);
            f[c] = 0.5 * (q.values[c] * v.comps[axis][c] + q.values[p] * v.comps[axis][p])
                - 0.5 * a * (q.values[p] - q.values[c]);
        }
        fluxes.push(f);
    }
    FaceFluxes { fluxes }
}

/// Inner product `h^d sum_c f_c g_c`.
pub fn inner(f: &ScalarField, g: &ScalarField) -> f64 {
    f.grid.cell_volume()
        * f.values
            .iter()
            .zip(&g.values)
            .map(|(&a, &b)| a * b)
            .sum::<f64>()
}

/// Inner product of vector fields.
pub fn inner_vec(f: &VectorField, g: &VectorField) -> f64 {
    let mut sum = 0.0;
    for (fc, gc) in f.comps.iter().zip(&g.comps) {
        sum += fc.iter().zip(gc).map(|(&a, &b)| a * b).sum::<f64>();
    }
    f.grid.cell_volume() * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PeriodicGrid;
    use std::f64::consts::TAU;

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = PeriodicGrid::unit(2, 16).unwrap();
        let f = ScalarField::constant(g, 4.2);
        let grad = gradient(&f);
        assert!(grad.comps.iter().all(|c| c.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn gradient_of_unit_spike() {
        // h = 0.25: the spike contributes -1/(2h) = -2 one cell right and
        // +2 one cell left (periodically).
        let g = PeriodicGrid::new(1, 8, 2.0).unwrap();
        let mut f = ScalarField::zeros(g);
        f.values[0] = 1.0;
        let grad = gradient(&f);
        assert_eq!(
            grad.comps[0],
            vec![0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0]
        );
    }

    #[test]
    fn gradient_second_order() {
        let mut errors = Vec::new();
        for &n in &[32usize, 64, 128] {
            let g = PeriodicGrid::unit(1, n).unwrap();
            let f = ScalarField::from_fn(g, |x, _| (TAU * x).sin());
            let grad = gradient(&f);
            let err = (0..n)
                .map(|c| (grad.comps[0][c] - TAU * (TAU * g.coord(c, 0)).cos()).abs())
                .fold(0.0_f64, f64::max);
            errors.push(err);
        }
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((1.8..=2.2).contains(&order), "observed order {order}");
        }
    }

    #[test]
    fn laplacian_second_order() {
        let mut errors = Vec::new();
        for &n in &[32usize, 64, 128] {
            let g = PeriodicGrid::unit(1, n).unwrap();
            let f = ScalarField::from_fn(g, |x, _| (TAU * x).sin());
            let lap = laplacian(&f);
            let err = (0..n)
                .map(|c| (lap.values[c] + TAU * TAU * (TAU * g.coord(c, 0)).sin()).abs())
                .fold(0.0_f64, f64::max);
            errors.push(err);
        }
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((1.8..=2.2).contains(&order), "observed order {order}");
        }
    }

    #[test]
    fn divergence_integrates_to_zero() {
        let g = PeriodicGrid::unit(2, 16).unwrap();
        let v = VectorField::from_fn(g, |x, y, axis| {
            // Deterministic wiggly field.
            ((3.0 * x + 1.7 * y + axis as f64).sin() * 7.3).cos()
        });
        let div = divergence(&v);
        assert!(integrate(&div).abs() < 1e-13);
    }

    #[test]
    fn summation_by_parts_duality() {
        let g = PeriodicGrid::unit(2, 12).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (TAU * x).sin() + (2.0 * TAU * y).cos());
        let v = VectorField::from_fn(g, |x, y, axis| {
            (TAU * (x + 0.3 * y + 0.1 * axis as f64)).cos()
        });
        let lhs = inner_vec(&gradient(&f), &v);
        let rhs = -inner(&f, &divergence(&v));
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn stress_vanishes_for_uniform_velocity() {
        let g = PeriodicGrid::unit(2, 8).unwrap();
        let u = VectorField::from_fn(g, |_, _, axis| 1.0 + axis as f64);
        let s = stress_tensor(&u, 1.0, 0.5);
        assert!(s.entries.iter().all(|e| e.iter().all(|&v| v == 0.0)));
        let sd = stress_divergence(&s, &u);
        assert!(sd.comps.iter().all(|c| c.iter().all(|&v| v == 0.0)));
        let contract = stress_contract(&s, &u);
        assert!(contract.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn stress_contract_nonnegative_in_shear() {
        let g = PeriodicGrid::unit(1, 32).unwrap();
        let u = VectorField::from_fn(g, |x, _, _| (TAU * x).sin());
        let s = stress_tensor(&u, 1.0, 0.0);
        let w = stress_contract(&s, &u);
        assert!(w.values.iter().all(|&v| v >= 0.0));
        // 1D: S : grad u = 2 mu (u')^2 at central-difference accuracy.
        let grad = gradient(&ScalarField {
            grid: g,
            values: u.comps[0].clone(),
        });
        for c in 0..g.cells() {
            let expect = 2.0 * grad.comps[0][c] * grad.comps[0][c];
            assert!((w.values[c] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn integrate_constant() {
        let g = PeriodicGrid::unit(2, 16).unwrap();
        let f = ScalarField::constant(g, 3.0);
        assert!((integrate(&f) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn llf_zero_velocity_zero_wavespeed() {
        let g = PeriodicGrid::unit(1, 8).unwrap();
        let q = ScalarField::from_fn(g, |x, _| x * x);
        let v = VectorField::zeros(g);
        let a = ScalarField::zeros(g);
        let flux = llf_flux(&q, &v, &a);
        assert!(flux.fluxes[0].iter().all(|&f| f == 0.0));
    }

    #[test]
    fn llf_flux_differences_conserve() {
        let g = PeriodicGrid::unit(2, 8).unwrap();
        let q = ScalarField::from_fn(g, |x, y| 1.0 + (TAU * x).sin() * (TAU * y).cos());
        let v = VectorField::from_fn(g, |x, y, k| ((x + y) * (1 + k) as f64).sin());
        let a = v.magnitude();
        let div = llf_flux(&q, &v, &a).divergence(&g);
        assert!(integrate(&div).abs() < 1e-13);
    }
}
