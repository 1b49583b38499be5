//! Scan grids and deterministic quasi-random point sets for the law audits.

use crate::error::{Error, Result};

/// Axis spacing of a [`ScanGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

/// Rectangular (rho, theta) sampling region for the validator.
#[derive(Debug, Clone)]
pub struct ScanGrid {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub points_per_axis: usize,
    pub spacing: Spacing,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            theta_lo: 1e-3,
            theta_hi: 1e3,
            rho_lo: 1e-3,
            rho_hi: 1e2,
            points_per_axis: 128,
            spacing: Spacing::Log,
        }
    }
}

impl ScanGrid {
    pub fn new(
        theta_lo: f64,
        theta_hi: f64,
        rho_lo: f64,
        rho_hi: f64,
        points_per_axis: usize,
        spacing: Spacing,
    ) -> Result<Self> {
        if !(theta_lo > 0.0 && theta_lo < theta_hi && rho_lo > 0.0 && rho_lo < rho_hi) {
            return Err(Error::Config(format!(
                "scan grid bounds must satisfy 0 < lo < hi, got theta [{theta_lo}, {theta_hi}], rho [{rho_lo}, {rho_hi}]"
            )));
        }
        if points_per_axis < 16 {
            return Err(Error::Config(format!(
                "scan grid needs at least 16 points per axis, got {points_per_axis}"
            )));
        }
        Ok(ScanGrid {
            theta_lo,
            theta_hi,
            rho_lo,
            rho_hi,
            points_per_axis,
            spacing,
        })
    }

    pub fn theta_axis(&self) -> Vec<f64> {
        axis(self.theta_lo, self.theta_hi, self.points_per_axis, self.spacing)
    }

    pub fn rho_axis(&self) -> Vec<f64> {
        axis(self.rho_lo, self.rho_hi, self.points_per_axis, self.spacing)
    }
}

fn axis(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let t = i as f64 / m;
            match spacing {
                Spacing::Linear => lo + t * (hi - lo),
                Spacing::Log => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
            }
        })
        .collect()
}

/// Log-spaced axis independent of any grid, used by the asymptotic
/// growth checks.
pub fn log_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    axis(lo, hi, n, Spacing::Log)
}

/// Deterministic low-discrepancy points in `[lo, hi]^2`, from the 2D
/// Kronecker sequence with the plastic-number rotation.
pub fn kronecker_points(count: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    // Plastic number: the unique real root of x^3 = x + 1.
    const PLASTIC: f64 = 1.324_717_957_244_746;
    let a1 = 1.0 / PLASTIC;
    let a2 = 1.0 / (PLASTIC * PLASTIC);
    let span = hi - lo;
    (1..=count)
        .map(|k| {
            let x = (0.5 + a1 * k as f64).fract();
            let y = (0.5 + a2 * k as f64).fract();
            (lo + span * x, lo + span * y)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = ScanGrid::default();
        let th = g.theta_axis();
        assert_eq!(th.len(), 128);
        assert!((th[0] - 1e-3).abs() < 1e-15);
        assert!((th[127] - 1e3).abs() / 1e3 < 1e-12);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(ScanGrid::new(1.0, 0.5, 0.1, 1.0, 32, Spacing::Log).is_err());
        assert!(ScanGrid::new(0.1, 1.0, 0.1, 1.0, 4, Spacing::Log).is_err());
    }

    #[test]
    fn kronecker_points_fill_the_box() {
        let pts = kronecker_points(100, 0.05, 5.0);
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().all(|&(x, y)| (0.05..=5.0).contains(&x) && (0.05..=5.0).contains(&y)));
        // Deterministic.
        assert_eq!(pts, kronecker_points(100, 0.05, 5.0));
    }
}
