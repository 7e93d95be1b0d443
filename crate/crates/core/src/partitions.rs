//! Integer partitions of `M`: the admissible canonical placements.

use crate::error::{Error, Result};
use crate::model::Placement;

/// Largest `M` accepted by the enumerator.
pub const MAX_PARTITION_M: usize = 40;

/// All partitions of `m`, in reverse-lexicographic order from `(m)` down to
/// `(1, …, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSet {
    m: usize,
    items: Vec<Vec<usize>>,
}

impl PartitionSet {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn items(&self) -> &[Vec<usize>] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.items.iter().map(Vec::as_slice)
    }

    /// Every partition as a placement over `n` points.
    pub fn placements(&self, n: usize) -> Result<Vec<Placement>> {
        self.items.iter().map(|c| Placement::new(c, n)).collect()
    }
}

fn check_bounds(m: usize) -> Result<()> {
    if (1..=MAX_PARTITION_M).contains(&m) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "m",
            value: m as f64,
            min: 1.0,
            max: MAX_PARTITION_M as f64,
        })
    }
}

pub fn enumerate_partitions(m: usize) -> Result<PartitionSet> {
    check_bounds(m)?;
    let mut items = Vec::new();
    let mut current = vec![m];
    loop {
        items.push(current.clone());
        if !next_partition(&mut current) {
            break;
        }
    }
    Ok(PartitionSet { m, items })
}

/// Steps to the reverse-lexicographic successor; false after `(1, …, 1)`.
fn next_partition(parts: &mut Vec<usize>) -> bool {
    // Strip trailing ones, keeping their total.
    let mut rem = 0;
    while parts.last() == Some(&1) {
        parts.pop();
        rem += 1;
    }
    let Some(last) = parts.last_mut() else {
        return false;
    };
    *last -= 1;
    let k = *last;
    rem += 1;
    while rem > 0 {
        let take = rem.min(k);
        parts.push(take);
        rem -= take;
    }
    true
}

/// The partition function `f(m)`, via the standard largest-part DP.
pub fn partition_count(m: usize) -> Result<u64> {
    check_bounds(m)?;
    let mut ways = vec![0u64; m + 1];
    ways[0] = 1;
    for part in 1..=m {
        for total in part..=m {
            ways[total] += ways[total - part];
        }
    }
    Ok(ways[m])
}

/// Asymptotic estimate `e^{π√(2m/3)} / (4m√3)`.
pub fn hardy_ramanujan_estimate(m: usize) -> f64 {
    let m = m as f64;
    (std::f64::consts::PI * (2.0 * m / 3.0).sqrt()).exp() / (4.0 * m * 3f64.sqrt())
}
