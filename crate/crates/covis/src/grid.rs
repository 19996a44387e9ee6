//! Spatial grids. Raw pings land on a fine grid; analysis runs on a coarser
//! grid obtained by integer downscaling (cell -> cell/scale, floor division).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Canonical scalar id of an aggregated grid cell, row-major (`y * width + x`).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct LocationId(pub u32);

impl LocationId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Raw grid dimensions plus the spatial scaling factor.
///
/// `scale = 1` keeps raw cells as-is; larger scales merge `scale x scale`
/// blocks of raw cells into one aggregated cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub raw_width: u32,
    pub raw_height: u32,
    pub scale: u32,
}

impl GridSpec {
    pub fn new(raw_width: u32, raw_height: u32, scale: u32) -> Result<Self> {
        if raw_width == 0 || raw_height == 0 {
            return Err(Error::InvalidParam(format!(
                "grid dimensions must be positive, got {raw_width}x{raw_height}"
            )));
        }
        if scale == 0 {
            return Err(Error::InvalidParam("scale must be >= 1".into()));
        }
        Ok(Self {
            raw_width,
            raw_height,
            scale,
        })
    }

    /// Aggregated cell of a raw ping: floor division by the scale.
    pub fn aggregate_cell(&self, x: u32, y: u32) -> (u32, u32) {
        (x / self.scale, y / self.scale)
    }

    /// The aggregated grid (ceil of raw dims over scale).
    pub fn aggregated(&self) -> Grid {
        Grid {
            width: self.raw_width.div_ceil(self.scale),
            height: self.raw_height.div_ceil(self.scale),
        }
    }
}

/// The aggregated grid: the node universe of a co-visitation hypergraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    width: u32,
    height: u32,
}

impl Grid {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Grid { width, height }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn num_cells(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Row-major id of a cell. Panics if out of bounds.
    pub fn id(&self, x: u32, y: u32) -> LocationId {
        assert!(x < self.width && y < self.height, "cell out of bounds");
        LocationId(y * self.width + x)
    }

    /// Inverse of [`Grid::id`]. Panics if out of bounds.
    pub fn cell(&self, id: LocationId) -> (u32, u32) {
        assert!(self.contains(id), "location id out of bounds");
        (id.0 % self.width, id.0 / self.width)
    }

    pub fn contains(&self, id: LocationId) -> bool {
        (id.0 as usize) < self.num_cells()
    }
}

/// Chebyshev distance between two aggregated cells: `max(|dx|, |dy|)`.
pub fn chebyshev(a: (u32, u32), b: (u32, u32)) -> u32 {
    let dx = a.0.abs_diff(b.0);
    let dy = a.1.abs_diff(b.1);
    dx.max(dy)
}
