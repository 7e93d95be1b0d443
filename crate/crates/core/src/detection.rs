//! Exact probability of error of the MAP detector, the MAP decision set,
//! and exhaustive search for the optimal placement.
//!
//! For a placement `v` over `n` points the error probability is
//!
//! ```text
//! P_e = (1/n) Σ_y [ S(y) − max_j p_j(y) ],   S(y) = Σ_j p_j(y)
//! ```
//!
//! which equals the leave-one-out form `(1/n) Σ_y min_i Σ_{j≠i} p_j(y)`.
//! Empty points share one likelihood, so `S(y)` is accumulated as the sum
//! over non-empty points plus `(n − K)` copies of the empty-point value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{observation_count, ObservationIndex, Placement, PmfTable, SensorModel};
use crate::partitions::enumerate_partitions;

/// Absolute tolerance under which two error probabilities are a tie.
pub const TIE_EPSILON: f64 = 1e-9;

/// Relative tolerance under which two likelihoods are a tie in
/// [`map_decide`].
pub const LIKELIHOOD_TIE_REL: f64 = 1e-12;

/// Largest `M` accepted by [`error_probability`].
pub const MAX_EVAL_SENSORS: usize = 24;

/// Largest `M` accepted by [`optimal_placements`].
pub const MAX_SEARCH_SENSORS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorProbability {
    pub value: f64,
    pub placement: Placement,
    pub model: SensorModel,
    pub n: usize,
}

/// Exact `P_e` of `placement` spread over `n` points.
pub fn error_probability(
    placement: &Placement,
    model: &SensorModel,
    n: usize,
) -> Result<ErrorProbability> {
    let placement = if placement.n() == n {
        placement.clone()
    } else {
        placement.with_points(n)?
    };
    check_eval_size(placement.m())?;
    Ok(ErrorProbability {
        value: error_probability_value(&placement, model),
        placement,
        model: *model,
        n,
    })
}

fn check_eval_size(m: usize) -> Result<()> {
    if m > MAX_EVAL_SENSORS {
        return Err(Error::OutOfRange {
            what: "sensor count",
            value: m as f64,
            min: 1.0,
            max: MAX_EVAL_SENSORS as f64,
        });
    }
    Ok(())
}

/// `P_e` without the bookkeeping; the placement's own `n` is used.
pub(crate) fn error_probability_value(placement: &Placement, model: &SensorModel) -> f64 {
    let m = placement.m();
    let n = placement.n();
    let counts = placement.counts();
    let offsets = placement.offsets();
    let empties = (n - counts.len()) as f64;

    // Powers indexed by exponent, so the inner loop is table lookups.
    let pow = |base: f64| -> Vec<f64> { (0..=m).map(|e| base.powi(e as i32)).collect() };
    let (pd, qd) = (pow(model.p_d()), pow(1.0 - model.p_d()));
    let (pf, qf) = (pow(model.p_f()), pow(1.0 - model.p_f()));

    let mut total = 0.0;
    for bits in 0..observation_count(m) {
        let y = ObservationIndex::new(bits);
        let s = y.alarm_count();
        let empty = pf[s] * qf[m - s];
        let mut sum = empties * empty;
        let mut max = if empties > 0.0 { empty } else { 0.0 };
        for (&v, &off) in counts.iter().zip(&offsets) {
            let a = y.block_alarms(off, v, m);
            let miss = v - a;
            let p = pd[a] * qd[miss] * pf[s - a] * qf[m - s - miss];
            sum += p;
            if p > max {
                max = p;
            }
        }
        total += sum - max;
    }
    total / n as f64
}

/// MAP decision set: every hypothesis (1-based) whose likelihood attains
/// the maximum. Under the uniform prior this is the set of posterior modes.
pub fn map_decide(
    y: ObservationIndex,
    placement: &Placement,
    model: &SensorModel,
    n: usize,
) -> Result<Vec<usize>> {
    let placement = if placement.n() == n {
        placement.clone()
    } else {
        placement.with_points(n)?
    };
    let table = PmfTable::new(&placement, model);
    Ok(map_set(&table, y))
}

pub(crate) fn map_set(table: &PmfTable, y: ObservationIndex) -> Vec<usize> {
    let placement = table.placement();
    let n = placement.n();
    let k = placement.parts();
    let idx = y.bits() as usize;
    let mut likes: Vec<f64> = table.point_rows().map(|row| row[idx]).collect();
    if n > k {
        likes.push(table.empty_row()[idx]);
    }
    let max = likes.iter().copied().fold(0.0, f64::max);
    let floor = max - LIKELIHOOD_TIE_REL * max;
    let mut out = Vec::new();
    for (j, &p) in likes.iter().enumerate().take(k) {
        if p >= floor {
            out.push(j + 1);
        }
    }
    if n > k && likes[k] >= floor {
        out.extend(k + 1..=n);
    }
    out
}

/// Tie-aware minimum over a family of placements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    /// Every placement within [`TIE_EPSILON`] of the minimum, in the order
    /// they were supplied.
    pub best: Vec<Placement>,
    pub pe_min: f64,
    /// Gap to the smallest value outside the tie set; `None` when every
    /// placement ties.
    pub margin: Option<f64>,
    /// Unique minimiser with margin above [`TIE_EPSILON`].
    pub strict: bool,
}

impl Optimum {
    /// Builds the optimum from parallel slices of placements and their `P_e`.
    pub fn from_values(placements: &[Placement], values: &[f64]) -> Self {
        assert_eq!(placements.len(), values.len());
        assert!(!values.is_empty());
        let pe_min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let mut best = Vec::new();
        let mut runner_up = f64::INFINITY;
        for (p, &v) in placements.iter().zip(values) {
            if v - pe_min <= TIE_EPSILON {
                best.push(p.clone());
            } else if v < runner_up {
                runner_up = v;
            }
        }
        let margin = runner_up.is_finite().then_some(runner_up - pe_min);
        let strict = best.len() == 1;
        Self {
            best,
            pe_min,
            margin,
            strict,
        }
    }

    /// First member of the tie set in enumeration order.
    pub fn first(&self) -> &Placement {
        &self.best[0]
    }

    /// The unique optimum, if strict.
    pub fn strict_best(&self) -> Option<&Placement> {
        self.strict.then(|| &self.best[0])
    }

    pub fn contains(&self, counts: &[usize]) -> bool {
        self.best.iter().any(|p| p.counts() == counts)
    }
}

/// `P_e` of every placement in `placements`, in order.
pub fn evaluate_all(placements: &[Placement], model: &SensorModel) -> Vec<f64> {
    placements
        .iter()
        .map(|p| error_probability_value(p, model))
        .collect()
}

fn check_search(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > MAX_SEARCH_SENSORS {
        return Err(Error::OutOfRange {
            what: "m",
            value: m as f64,
            min: 1.0,
            max: MAX_SEARCH_SENSORS as f64,
        });
    }
    if m > n {
        return Err(Error::SensorsExceedPoints { m, n });
    }
    Ok(())
}

/// Every canonical placement of `m` sensors on `n` points, in enumeration
/// order.
pub fn admissible_placements(m: usize, n: usize) -> Result<Vec<Placement>> {
    check_search(m, n)?;
    enumerate_partitions(m)?.placements(n)
}

/// Exhaustive minimisation of `P_e` over all partitions of `m`.
pub fn optimal_placements(m: usize, n: usize, model: &SensorModel) -> Result<Optimum> {
    let placements = admissible_placements(m, n)?;
    let values = evaluate_all(&placements, model);
    Ok(Optimum::from_values(&placements, &values))
}

/// Closed forms for `M = N = 2`, evaluated literally with their inner
/// minima. Independent of [`error_probability`].
pub fn closed_form_pe2(placement: &Placement, model: &SensorModel) -> Result<f64> {
    let (pd, pf) = (model.p_d(), model.p_f());
    if placement.n() != 2 {
        return Err(Error::UnsupportedShape(placement.to_string()));
    }
    match placement.counts() {
        [1, 1] => {
            Ok(0.5 * ((1.0 - pd) * (1.0 - pf) + pd * pf + 2.0 * (pf - pd * pf).min(pd - pd * pf)))
        }
        [2] => Ok(0.5
            * (((1.0 - pd) * (1.0 - pd)).min((1.0 - pf) * (1.0 - pf))
                + (pd * pd).min(pf * pf)
                + 2.0 * (pd * (1.0 - pd)).min(pf * (1.0 - pf)))),
        _ => Err(Error::UnsupportedShape(placement.to_string())),
    }
}
