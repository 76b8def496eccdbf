//! Hexagonal close-packed trap-array layouts.

use fiberq_core::SiteId;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Positions of the trap sites, in micrometers.
///
/// Sites are numbered row-major from 1. For the 10-site array this gives
/// rows of 3, 4 and 3 sites; site 1 is the top-left site and site 10 the
/// bottom-right one. The physical fiber-to-number assignment of the real
/// device is not recoverable, so this ordering is the canonical one used
/// everywhere in the workspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    positions: Vec<(f64, f64)>,
    pitch: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("site count must be at least 1, got {0}")]
    InvalidSiteCount(i64),
    #[error("pitch must be positive, got {0}")]
    InvalidPitch(f64),
}

impl ArrayGeometry {
    pub fn site_count(&self) -> usize {
        self.positions.len()
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn position(&self, site: SiteId) -> (f64, f64) {
        self.positions[site.index()]
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn site_ids(&self) -> impl Iterator<Item = SiteId> + '_ {
        (1..=self.positions.len()).map(SiteId)
    }

    pub fn distance(&self, a: SiteId, b: SiteId) -> f64 {
        let (xa, ya) = self.position(a);
        let (xb, yb) = self.position(b);
        (xa - xb).hypot(ya - yb)
    }
}

/// Generate a hexagonal close-packed layout of `n_sites` sites.
///
/// Rows alternate between w and w+1 sites with w = floor(sqrt(n)), centered
/// on a common axis and offset horizontally by half a pitch, vertically by
/// pitch * sqrt(3)/2. For n = 10 this yields the 3-4-3 arrangement; the last
/// row is truncated left-to-right when n does not fill it. The centroid is
/// translated to the origin.
pub fn hex_positions(n_sites: i64, pitch: f64) -> Result<ArrayGeometry, GeometryError> {
    if n_sites < 1 {
        return Err(GeometryError::InvalidSiteCount(n_sites));
    }
    if !(pitch > 0.0) || !pitch.is_finite() {
        return Err(GeometryError::InvalidPitch(pitch));
    }
    let n = n_sites as usize;
    let base = (n as f64).sqrt().floor().max(1.0) as usize;
    let row_dy = pitch * 3.0f64.sqrt() / 2.0;

    let mut positions = Vec::with_capacity(n);
    let mut row = 0usize;
    while positions.len() < n {
        let row_len = if row % 2 == 0 { base } else { base + 1 };
        let take = row_len.min(n - positions.len());
        let y = -(row as f64) * row_dy;
        // Center positions of the nominal row; a truncated last row keeps
        // its leftmost slots.
        let x0 = -0.5 * (row_len as f64 - 1.0) * pitch;
        for k in 0..take {
            positions.push((x0 + k as f64 * pitch, y));
        }
        row += 1;
    }

    // Translate the centroid to the origin.
    let (sx, sy) = positions
        .iter()
        .fold((0.0, 0.0), |(ax, ay), (x, y)| (ax + x, ay + y));
    let (cx, cy) = (sx / n as f64, sy / n as f64);
    for p in &mut positions {
        p.0 -= cx;
        p.1 -= cy;
    }

    Ok(ArrayGeometry { positions, pitch })
}
