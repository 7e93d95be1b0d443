//! Closed-form optimality regions for four sensors on four points, and
//! location of the fixed-`P_D` switch points along `P_F`.

use serde::Serialize;

use crate::detection::{admissible_placements, evaluate_all, Optimum};
use crate::error::Result;
use crate::model::{Placement, SensorModel};

/// Placement selected by the M = 4 region inequalities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RegionVerdict {
    /// Exactly one region fired.
    Optimal(Placement),
    /// Zero or several regions fired; the point sits on or near a boundary.
    Ambiguous(Vec<Placement>),
    /// `p_d < p_f`, where the inequalities are not stated.
    OutsideHalfPlane,
}

impl RegionVerdict {
    pub fn placement(&self) -> Option<&Placement> {
        match self {
            Self::Optimal(p) => Some(p),
            _ => None,
        }
    }
}

/// The four region predicates in the order `(4)`, `(3,1)`, `(2,2)`, `(2,1,1)`.
pub fn region_flags_m4(p_f: f64, p_d: f64) -> [bool; 4] {
    let (d, f) = (p_d, p_f);
    let diff = d - f;

    let concentrated =
        diff * (-(d + f) * (d * d + f * f) + (d * d + d * f + f * f) + (1.0 - f.powi(3)));
    let pair_split = 2.0 * (d * d - f * f) - diff - (d.powi(3) - f.powi(3)) - d * f * f * diff;
    let cubic_lt = d.powi(3) * (1.0 - d) < f.powi(3) * (1.0 - f);
    let square_lt = d * d * (1.0 - d) < f * f * (1.0 - f);
    let quad_gt = (d + f - 1.0).powi(2) > d * f * (1.0 - f);
    let spread = 2.0 * diff + 2.0 * f.powi(3) * (1.0 - f)
        - d * f * f * (1.0 - f)
        - d * f * f * (1.0 - d)
        - (d * d - f * f)
        - f * diff;

    let four = concentrated < 0.0;
    let three_one = (concentrated >= 0.0 && pair_split < 0.0 && cubic_lt)
        || (quad_gt && !cubic_lt && square_lt);
    let two_two = ((d * d - f * f) * (2.0 - d * d - 2.0 * f * f) >= 0.0
        && pair_split >= 0.0
        && spread <= 0.0
        && cubic_lt)
        || (2.0 * (1.0 - f) < d && !quad_gt && !cubic_lt);
    let two_one_one = 2.0 * (1.0 - f) >= d;
    [four, three_one, two_two, two_one_one]
}

/// The M = N = 4 candidates matching [`region_flags_m4`].
pub fn m4_candidates() -> [Placement; 4] {
    [&[4][..], &[3, 1], &[2, 2], &[2, 1, 1]]
        .map(|c| Placement::new(c, 4).expect("valid four-sensor placement"))
}

/// Evaluates the closed-form region inequalities at `(p_f, p_d)`.
pub fn region_predicate_m4(p_f: f64, p_d: f64) -> RegionVerdict {
    if p_d < p_f {
        return RegionVerdict::OutsideHalfPlane;
    }
    let flags = region_flags_m4(p_f, p_d);
    let mut fired: Vec<Placement> = m4_candidates()
        .into_iter()
        .zip(flags)
        .filter_map(|(p, f)| f.then_some(p))
        .collect();
    if fired.len() == 1 {
        RegionVerdict::Optimal(fired.remove(0))
    } else {
        RegionVerdict::Ambiguous(fired)
    }
}

/// True when the predicate verdict changes within one grid step of the
/// point, i.e. the point lies within `step` of a region boundary.
pub fn near_predicate_boundary(p_f: f64, p_d: f64, step: f64) -> bool {
    let here = region_predicate_m4(p_f, p_d);
    for df in [-1.0, 0.0, 1.0] {
        for dd in [-1.0, 0.0, 1.0] {
            let (f, d) = (p_f + df * step, p_d + dd * step);
            if !(0.0..=1.0).contains(&f) || !(0.0..=1.0).contains(&d) || d < f {
                continue;
            }
            let there = region_predicate_m4(f, d);
            if there != here || matches!(there, RegionVerdict::Ambiguous(_)) {
                return true;
            }
        }
    }
    false
}

/// Strict optima met while scanning `p_f` across `(0, p_d)` at fixed `p_d`.
pub struct RowScan {
    placements: Vec<Placement>,
    samples: usize,
}

impl RowScan {
    pub fn new(m: usize, n: usize, samples: usize) -> Result<Self> {
        Ok(Self {
            placements: admissible_placements(m, n)?,
            samples,
        })
    }

    /// Whether `target` is the strict optimum at some sampled `p_f`.
    pub fn appears(&self, p_d: f64, target: &[usize]) -> bool {
        (1..self.samples).any(|k| {
            let p_f = p_d * k as f64 / self.samples as f64;
            let model = SensorModel::new(p_d, p_f).expect("scan stays inside the square");
            let values = evaluate_all(&self.placements, &model);
            Optimum::from_values(&self.placements, &values)
                .strict_best()
                .is_some_and(|p| p.counts() == target)
        })
    }
}

/// Where a placement first becomes optimal somewhere along a fixed-`P_D` row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwitchPoint {
    pub placement: Placement,
    /// Last grid row without the placement and first grid row with it.
    pub grid_bracket: (f64, f64),
    /// Bisection refinement inside the bracket.
    pub refined: f64,
}

/// Locates the lowest `P_D` row (on a grid of `step`) at which `target`
/// is strictly optimal for some `P_F`, assuming appearance is monotone in
/// `P_D` as it is for the four-sensor map.
pub fn first_appearance(
    m: usize,
    n: usize,
    target: &Placement,
    step: f64,
    samples: usize,
) -> Result<Option<SwitchPoint>> {
    let scan = RowScan::new(m, n, samples)?;
    let divisions = (1.0 / step).round() as usize;
    let row = |i: usize| i as f64 / divisions as f64;
    let counts = target.counts();
    let (mut lo, mut hi) = (1usize, divisions - 1);
    if !scan.appears(row(hi), counts) {
        return Ok(None);
    }
    if scan.appears(row(lo), counts) {
        return Ok(Some(SwitchPoint {
            placement: target.clone(),
            grid_bracket: (0.0, row(lo)),
            refined: 0.0,
        }));
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if scan.appears(row(mid), counts) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (mut a, mut b) = (row(lo), row(hi));
    for _ in 0..30 {
        let mid = 0.5 * (a + b);
        if scan.appears(mid, counts) {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(SwitchPoint {
        placement: target.clone(),
        grid_bracket: (row(lo), row(hi)),
        refined: b,
    }))
}
