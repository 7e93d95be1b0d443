//! Regular grids over the `(P_F, P_D)` unit square.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};

/// Which part of the plane a sweep covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneRegion {
    /// Only nodes with `p_d >= p_f`.
    PdGePf,
    /// The whole interior of the square.
    Full,
}

/// Grid with `divisions` equal steps along each axis; node `i` sits at
/// `i / divisions`, so coordinates are reproducible bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    divisions: usize,
}

pub const MIN_STEP: f64 = 1e-3;
pub const MAX_STEP: f64 = 0.1;

impl Grid {
    pub fn new(step: f64) -> Result<Self> {
        if !(MIN_STEP - 1e-12..=MAX_STEP + 1e-12).contains(&step) {
            return Err(Error::InvalidStep(step));
        }
        let divisions = (1.0 / step).round();
        if (divisions * step - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidStep(step));
        }
        Ok(Self {
            divisions: divisions as usize,
        })
    }

    pub fn divisions(&self) -> usize {
        self.divisions
    }

    pub fn step(&self) -> f64 {
        1.0 / self.divisions as f64
    }

    /// Coordinate of node `i`.
    pub fn value(&self, i: usize) -> f64 {
        i as f64 / self.divisions as f64
    }

    /// Node closest to `p`.
    pub fn index_of(&self, p: f64) -> usize {
        (p * self.divisions as f64).round() as usize
    }

    /// Interior node indices, `1 ..= divisions - 1`.
    pub fn interior(&self) -> RangeInclusive<usize> {
        1..=self.divisions - 1
    }

    /// Decimal places that print every node exactly (capped at 6).
    pub fn decimals(&self) -> usize {
        let mut pow = 1usize;
        for d in 0..=6 {
            if pow.is_multiple_of(self.divisions) {
                return d;
            }
            pow *= 10;
        }
        6
    }
}

/// A node of the grid together with its coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Node {
    pub i_f: usize,
    pub i_d: usize,
    pub p_f: f64,
    pub p_d: f64,
}

/// Rectangular subset of node indices, both ranges inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub pf: RangeInclusive<usize>,
    pub pd: RangeInclusive<usize>,
}

impl Window {
    /// Window covering `[pf_lo, pf_hi] x [pd_lo, pd_hi]` on `grid`.
    pub fn around(grid: &Grid, pf: (f64, f64), pd: (f64, f64)) -> Self {
        Self {
            pf: grid.index_of(pf.0)..=grid.index_of(pf.1),
            pd: grid.index_of(pd.0)..=grid.index_of(pd.1),
        }
    }
}

/// Nodes in sweep order: `p_d` outer ascending, `p_f` inner ascending.
pub fn nodes(grid: &Grid, region: PlaneRegion, window: Option<&Window>) -> Vec<Node> {
    let interior = grid.interior();
    let (pf_range, pd_range) = match window {
        Some(w) => (
            (*w.pf.start()).max(*interior.start())..=(*w.pf.end()).min(*interior.end()),
            (*w.pd.start()).max(*interior.start())..=(*w.pd.end()).min(*interior.end()),
        ),
        None => (interior.clone(), interior),
    };
    let mut out = Vec::new();
    for i_d in pd_range {
        for i_f in pf_range.clone() {
            if region == PlaneRegion::PdGePf && i_d < i_f {
                continue;
            }
            out.push(Node {
                i_f,
                i_d,
                p_f: grid.value(i_f),
                p_d: grid.value(i_d),
            });
        }
    }
    out
}
