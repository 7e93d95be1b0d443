//! Monte Carlo estimate of the error probability by simulating the
//! intruder, the alarms and the MAP fusion rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{map_set, MAX_EVAL_SENSORS};
use crate::error::{Error, Result};
use crate::model::{ObservationIndex, Placement, PmfTable, SensorModel};

/// Trials per RNG stream. Fixed so the result does not depend on how many
/// threads run the batches.
pub const BATCH: u64 = 1 << 16;

/// How a decision is picked when several hypotheses share the maximum
/// likelihood.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    #[default]
    UniformRandom,
    LowestIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub trials: u64,
    pub errors: u64,
    pub pe_hat: f64,
    pub std_err: f64,
    pub seed: u64,
}

impl SimResult {
    fn new(trials: u64, errors: u64, seed: u64) -> Self {
        let pe_hat = errors as f64 / trials as f64;
        Self {
            trials,
            errors,
            pe_hat,
            std_err: (pe_hat * (1.0 - pe_hat) / trials as f64).sqrt(),
            seed,
        }
    }

    /// `(pe_hat - pe) / std_err`; zero when both agree exactly.
    pub fn z_score(&self, pe: f64) -> f64 {
        let diff = self.pe_hat - pe;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_err
        }
    }
}

/// Simulates `trials` independent intrusions. Batch `b` draws from the
/// ChaCha stream `b` of `seed`, so the result depends only on the inputs.
pub fn simulate(
    placement: &Placement,
    model: &SensorModel,
    n: usize,
    trials: u64,
    seed: u64,
    tie_rule: TieRule,
) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    let m = placement.m();
    if m > MAX_EVAL_SENSORS {
        return Err(Error::OutOfRange {
            what: "m",
            value: m as f64,
            min: 1.0,
            max: MAX_EVAL_SENSORS as f64,
        });
    }
    let placement = if placement.n() == n {
        placement.clone()
    } else {
        placement.with_points(n)?
    };
    let table = PmfTable::new(&placement, model);
    let decisions: Vec<Vec<usize>> = (0..1u64 << m)
        .map(|y| map_set(&table, ObservationIndex::new(y)))
        .collect();
    // Point (1-based) holding each sensor, most significant bit first.
    let mut owner = Vec::with_capacity(m);
    for (j, &v) in placement.counts().iter().enumerate() {
        owner.extend(std::iter::repeat_n(j + 1, v));
    }

    let batches = trials.div_ceil(BATCH);
    let errors: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let size = BATCH.min(trials - b * BATCH);
            let mut errors = 0u64;
            for _ in 0..size {
                let x = rng.random_range(1..=n);
                let mut y = 0u64;
                for &j in &owner {
                    let p = if j == x { model.p_d() } else { model.p_f() };
                    y = (y << 1) | u64::from(rng.random_bool(p));
                }
                let set = &decisions[y as usize];
                let pick = match tie_rule {
                    TieRule::LowestIndex => set[0],
                    TieRule::UniformRandom if set.len() == 1 => set[0],
                    TieRule::UniformRandom => set[rng.random_range(0..set.len())],
                };
                errors += u64::from(pick != x);
            }
            errors
        })
        .sum();
    Ok(SimResult::new(trials, errors, seed))
}
