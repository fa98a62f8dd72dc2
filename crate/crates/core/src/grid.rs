//! Uniform periodic lattices on `[-L, L)^dim` for `dim` in {1, 2}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodicized lattice.
///
/// Nodes along each axis sit at `x_j = -L + j h` with `h = 2L / n`,
/// so the right endpoint `+L` is identified with `-L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points_per_axis: usize,
    half_width: f64,
}

impl Grid {
    /// Build a grid, validating dimension, point count and width.
    pub fn new(dim: usize, points_per_axis: usize, half_width: f64) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::NonPowerOfTwo(points_per_axis));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::NonpositiveWidth(half_width));
        }
        Ok(Grid {
            dim,
            points_per_axis,
            half_width,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Grid spacing `h = 2L / n`. Exact in binary arithmetic since `n` is a power of two.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Total number of nodes, `n^dim`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of node `j` along one axis.
    pub fn axis_coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Coordinates of the flat node index. The second component is 0 in 1D.
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.axis_coord(idx), 0.0],
            _ => {
                let n = self.points_per_axis;
                [self.axis_coord(idx % n), self.axis_coord(idx / n)]
            }
        }
    }

    /// Euclidean distance from node `idx` to the origin.
    pub fn radius(&self, idx: usize) -> f64 {
        let [x, y] = self.coords(idx);
        x.hypot(y)
    }

    /// Flat index from per-axis indices (x fastest).
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        match self.dim {
            1 => ix,
            _ => iy * self.points_per_axis + ix,
        }
    }

    /// Periodic (minimum-image) distance between two points along one axis.
    pub fn periodic_axis_distance(&self, a: f64, b: f64) -> f64 {
        let period = 2.0 * self.half_width;
        let mut d = (a - b).rem_euclid(period);
        if d > self.half_width {
            d = period - d;
        }
        d
    }

    /// Iterate over flat indices together with node coordinates.
    pub fn iter_nodes(&self) -> impl Iterator<Item = (usize, [f64; 2])> + '_ {
        (0..self.len()).map(move |i| (i, self.coords(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_matches_width_exactly() {
        let g = Grid::new(1, 256, 16.0).unwrap();
        assert_eq!(g.spacing(), 0.125);
        assert_eq!(g.spacing() * g.points_per_axis() as f64, 2.0 * g.half_width());
    }

    #[test]
    fn two_dimensional_grid() {
        let g = Grid::new(2, 64, 8.0).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.len(), 64 * 64);
        let [x, y] = g.coords(g.index(3, 5));
        assert_eq!(x, -8.0 + 3.0 * 0.25);
        assert_eq!(y, -8.0 + 5.0 * 0.25);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Grid::new(3, 64, 8.0), Err(Error::InvalidDimension(3))));
        assert!(matches!(Grid::new(1, 48, 8.0), Err(Error::NonPowerOfTwo(48))));
        assert!(matches!(Grid::new(1, 4, 8.0), Err(Error::NonPowerOfTwo(4))));
        assert!(matches!(Grid::new(1, 64, 0.0), Err(Error::NonpositiveWidth(_))));
        assert!(matches!(Grid::new(1, 64, -2.0), Err(Error::NonpositiveWidth(_))));
    }

    #[test]
    fn periodic_distance_wraps() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        assert!((g.periodic_axis_distance(-7.75, 7.75) - 0.5).abs() < 1e-14);
        assert!((g.periodic_axis_distance(1.0, 2.0) - 1.0).abs() < 1e-14);
    }
}
