//! Uniform cell grids over the plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Vec2};

/// `nx × ny` square cells of side `h`; cell `(ix, iy)` is the half-open box
/// `[x0 + ix·h, x0 + (ix+1)·h) × [y0 + iy·h, y0 + (iy+1)·h)`. Cells are
/// stored row-major with `ix` fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec2,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(origin: Vec2, h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) || nx == 0 || ny == 0 || !origin.x.is_finite() || !origin.y.is_finite() {
            return Err(Error::InvalidInput(format!("invalid grid: h = {h}, {nx}×{ny}")));
        }
        Ok(GridSpec { origin, h, nx, ny })
    }

    /// `n × n` grid whose cells cover the bounding box of `domain`, with a
    /// thin margin so that boundary points fall strictly inside.
    pub fn covering(domain: &ConvexDomain, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("grid resolution must be positive".into()));
        }
        let (lo, hi) = domain.bounding_box();
        let ext = (hi.x - lo.x).max(hi.y - lo.y);
        let h = ext * (1.0 + 1e-6) / n as f64;
        let c = (lo + hi) * 0.5;
        let half = h * n as f64 * 0.5;
        Self::new(c - Vec2::new(half, half), h, n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Vec2 {
        self.origin + Vec2::new((ix as f64 + 0.5) * self.h, (iy as f64 + 0.5) * self.h)
    }

    pub fn cell_lower(&self, ix: usize, iy: usize) -> Vec2 {
        self.origin + Vec2::new(ix as f64 * self.h, iy as f64 * self.h)
    }

    pub fn upper(&self) -> Vec2 {
        self.origin + Vec2::new(self.nx as f64 * self.h, self.ny as f64 * self.h)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let hi = self.upper();
        p.x >= self.origin.x && p.y >= self.origin.y && p.x <= hi.x && p.y <= hi.y
    }

    /// Cell containing `p` under the half-open convention; points on the far
    /// edges belong to the last cell.
    pub fn locate(&self, p: Vec2) -> Option<(usize, usize)> {
        if !self.contains(p) {
            return None;
        }
        let ix = (((p.x - self.origin.x) / self.h).floor() as usize).min(self.nx - 1);
        let iy = (((p.y - self.origin.y) / self.h).floor() as usize).min(self.ny - 1);
        Some((ix, iy))
    }

    pub fn centers(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.len()).map(move |k| {
            let (ix, iy) = self.coords(k);
            self.cell_center(ix, iy)
        })
    }
}
