//! Cell-centered scalar and vector fields with value semantics.

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

/// One real value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: PeriodicGrid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.cells()],
        }
    }

    pub fn constant(grid: PeriodicGrid, value: f64) -> Self {
        ScalarField {
            grid,
            values: vec![value; grid.cells()],
        }
    }

    pub fn from_values(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::Config(format!(
                "field has {} values, grid has {} cells",
                values.len(),
                grid.cells()
            )));
        }
        Ok(ScalarField { grid, values })
    }

    /// Fills from a function of the cell-center coordinates `(x, y)`;
    /// in 1D the second coordinate is 0.
    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.cells())
            .map(|c| {
                let x = grid.coord(c, 0);
                let y = if grid.dim == 2 { grid.coord(c, 1) } else { 0.0 };
                f(x, y)
            })
            .collect();
        ScalarField { grid, values }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Pointwise map into a new field.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + scale * other`, a new field.
    pub fn add_scaled(&self, other: &ScalarField, scale: f64) -> ScalarField {
        debug_assert_eq!(self.len(), other.len());
        ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + scale * b)
                .collect(),
        }
    }
}

/// One real value per cell and axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: PeriodicGrid,
    /// `comps[axis][cell]`.
    pub comps: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        VectorField {
            grid,
            comps: (0..grid.dim).map(|_| vec![0.0; grid.cells()]).collect(),
        }
    }

    pub fn from_comps(grid: PeriodicGrid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.dim || comps.iter().any(|c| c.len() != grid.cells()) {
            return Err(Error::Config(
                "vector component shape does not match the grid".to_string(),
            ));
        }
        Ok(VectorField { grid, comps })
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64, f64, usize) -> f64) -> Self {
        let comps = (0..grid.dim)
            .map(|axis| {
                (0..grid.cells())
                    .map(|c| {
                        let x = grid.coord(c, 0);
                        let y = if grid.dim == 2 { grid.coord(c, 1) } else { 0.0 };
                        f(x, y, axis)
                    })
                    .collect()
            })
            .collect();
        VectorField { grid, comps }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    /// Euclidean magnitude per cell.
    pub fn magnitude(&self) -> ScalarField {
        let mut out = ScalarField::zeros(self.grid);
        for c in 0..self.grid.cells() {
            let mut m2 = 0.0;
            for comp in &self.comps {
                m2 += comp[c] * comp[c];
            }
            out.values[c] = m2.sqrt();
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    pub fn add_scaled(&self, other: &VectorField, scale: f64) -> VectorField {
        debug_assert_eq!(self.dim(), other.dim());
        VectorField {
            grid: self.grid,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x + scale * y).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_values_checks_shape() {
        let g = PeriodicGrid::unit(1, 8).unwrap();
        assert!(ScalarField::from_values(g, vec![0.0; 7]).is_err());
        assert!(ScalarField::from_values(g, vec![0.0; 8]).is_ok());
    }

    #[test]
    fn magnitude_2d() {
        let g = PeriodicGrid::unit(2, 8).unwrap();
        let v = VectorField::from_fn(g, |_, _, axis| if axis == 0 { 3.0 } else { 4.0 });
        assert!(v.magnitude().values.iter().all(|&m| (m - 5.0).abs() < 1e-15));
    }
}
