//! Uniform periodic grid in one or two dimensions.

use crate::error::{Error, Result};

/// Cell-centered uniform mesh on the periodic unit box (extent configurable),
/// `n` cells per axis. Index arithmetic wraps modulo `n` on every axis; the
/// 2D layout is row-major with the x index fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

impl PeriodicGrid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Config(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if n < 8 {
            return Err(Error::Config(format!("grid needs at least 8 cells per axis, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("grid length must be positive, got {length}")));
        }
        Ok(PeriodicGrid { dim, n, length })
    }

    /// Unit box helper.
    pub fn unit(dim: usize, n: usize) -> Result<Self> {
        PeriodicGrid::new(dim, n, 1.0)
    }

    /// Mesh spacing.
    #[inline]
    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Number of cells.
    #[inline]
    pub fn cells(&self) -> usize {
        match self.dim {
            1 => self.n,
            _ => self.n * self.n,
        }
    }

    /// Cell volume `h^d`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        let h = self.h();
        match self.dim {
            1 => h,
            _ => h * h,
        }
    }

    /// Flat index of the periodic neighbour of `idx` shifted by `offset`
    /// cells along `axis`.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, offset: isize) -> usize {
        let n = self.n as isize;
        let wrap = |i: isize| -> usize { (i.rem_euclid(n)) as usize };
        match self.dim {
            1 => wrap(idx as isize + offset),
            _ => {
                let ix = (idx % self.n) as isize;
                let iy = (idx / self.n) as isize;
                match axis {
                    0 => wrap(ix + offset) + self.n * iy as usize,
                    _ => ix as usize + self.n * wrap(iy + offset),
                }
            }
        }
    }

    /// Cell-center coordinate of flat index `idx` along `axis`.
    #[inline]
    pub fn coord(&self, idx: usize, axis: usize) -> f64 {
        let h = self.h();
        let i = match (self.dim, axis) {
            (1, _) => idx,
            (_, 0) => idx % self.n,
            _ => idx / self.n,
        };
        (i as f64 + 0.5) * h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping_1d() {
        let g = PeriodicGrid::unit(1, 8).unwrap();
        assert_eq!(g.neighbor(0, 0, -1), 7);
        assert_eq!(g.neighbor(7, 0, 1), 0);
        assert_eq!(g.neighbor(3, 0, 2), 5);
    }

    #[test]
    fn wrapping_2d() {
        let g = PeriodicGrid::unit(2, 8).unwrap();
        // Cell (0, 0): left wraps in x, down wraps in y.
        assert_eq!(g.neighbor(0, 0, -1), 7);
        assert_eq!(g.neighbor(0, 1, -1), 56);
        // Cell (7, 7) = flat 63: right wraps to (0, 7) = 56.
        assert_eq!(g.neighbor(63, 0, 1), 56);
        assert_eq!(g.neighbor(63, 1, 1), 7);
    }

    #[test]
    fn coords_are_cell_centers() {
        let g = PeriodicGrid::unit(1, 8).unwrap();
        assert_eq!(g.coord(0, 0), 0.0625);
        assert_eq!(g.coord(7, 0), 0.9375);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PeriodicGrid::unit(3, 8).is_err());
        assert!(PeriodicGrid::unit(1, 4).is_err());
        assert!(PeriodicGrid::new(1, 8, -1.0).is_err());
    }
}
