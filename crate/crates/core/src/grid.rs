//! Uniform evaluation grids over bounding boxes.
//!
//! Degenerate box dimensions are held fixed at their single coordinate and
//! contribute no quadrature volume; grids only subdivide the nondegenerate
//! dimensions.

use crate::data::BoundingBox;
use crate::error::{Error, Result};

/// Upper bound on total grid points; larger requests are rejected outright.
pub const MAX_GRID_POINTS: usize = 100_000_000;

/// Point placement along each subdivided dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridLayout {
    /// `resolution` points including both interval endpoints (supremum scans).
    Endpoints,
    /// `resolution` cell midpoints (composite midpoint quadrature).
    Midpoints,
}

/// A lazily-enumerated uniform grid over a box.
#[derive(Debug, Clone)]
pub struct Grid {
    bounds: BoundingBox,
    active: Vec<usize>,
    resolution: usize,
    layout: GridLayout,
}

impl Grid {
    pub fn new(bounds: &BoundingBox, resolution: usize, layout: GridLayout) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution must be at least 2, got {resolution}"
            )));
        }
        let active = bounds.nondegenerate_dims();
        let points = resolution
            .checked_pow(active.len() as u32)
            .unwrap_or(usize::MAX);
        if points > MAX_GRID_POINTS {
            return Err(Error::GridTooLarge {
                points,
                limit: MAX_GRID_POINTS,
            });
        }
        Ok(Self {
            bounds: bounds.clone(),
            active,
            resolution,
            layout,
        })
    }

    /// Number of subdivided (nondegenerate) dimensions.
    pub fn active_dims(&self) -> usize {
        self.active.len()
    }

    /// Total number of grid points. A fully degenerate box yields the single
    /// fixed point.
    pub fn len(&self) -> usize {
        self.resolution.pow(self.active.len() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one midpoint cell (product of cell widths over
    /// nondegenerate dimensions).
    pub fn cell_volume(&self) -> f64 {
        self.active
            .iter()
            .map(|&i| self.bounds.width(i) / self.resolution as f64)
            .product()
    }

    /// Coordinate of grid node `idx` (row-major over active dimensions).
    pub fn point(&self, idx: usize) -> Vec<f64> {
        debug_assert!(idx < self.len());
        let mut u: Vec<f64> = self.bounds.lower().to_vec();
        let mut rest = idx;
        for &dim in self.active.iter().rev() {
            let step = rest % self.resolution;
            rest /= self.resolution;
            let lo = self.bounds.lower()[dim];
            let w = self.bounds.width(dim);
            u[dim] = match self.layout {
                GridLayout::Endpoints => {
                    lo + w * step as f64 / (self.resolution - 1) as f64
                }
                GridLayout::Midpoints => {
                    lo + w * (step as f64 + 0.5) / self.resolution as f64
                }
            };
        }
        u
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}
