//! Majorization order on placements and placement scales (chains).

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Placement;

/// Outcome of comparing `x` against `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MajorizationVerdict {
    /// `x ≻ y`: x is more concentrated.
    StrictlyAbove,
    /// `y ≻ x`.
    StrictlyBelow,
    Equal,
    Incomparable,
}

impl MajorizationVerdict {
    /// One-letter code used in comparability matrices.
    pub fn code(self) -> char {
        match self {
            Self::StrictlyAbove => 'A',
            Self::StrictlyBelow => 'B',
            Self::Equal => 'E',
            Self::Incomparable => 'I',
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Self::StrictlyAbove => Self::StrictlyBelow,
            Self::StrictlyBelow => Self::StrictlyAbove,
            other => other,
        }
    }

    pub fn is_comparable(self) -> bool {
        self != Self::Incomparable
    }
}

/// Compares two placements of the same total.
pub fn compare(x: &Placement, y: &Placement) -> Result<MajorizationVerdict> {
    compare_counts(x.counts(), y.counts())
}

/// Compares count vectors in any order; zeros and padding are ignored.
pub fn compare_counts(x: &[usize], y: &[usize]) -> Result<MajorizationVerdict> {
    let (sx, sy): (usize, usize) = (x.iter().sum(), y.iter().sum());
    if sx != sy {
        return Err(Error::DifferentTotals {
            left: sx,
            right: sy,
        });
    }
    let px = prefix_sums(x);
    let py = prefix_sums(y);
    let len = px.len().max(py.len());
    let at = |p: &[usize], k: usize| p.get(k).copied().unwrap_or(sx);
    let (mut ge, mut le) = (true, true);
    for k in 0..len {
        match at(&px, k).cmp(&at(&py, k)) {
            Ordering::Greater => le = false,
            Ordering::Less => ge = false,
            Ordering::Equal => {}
        }
    }
    Ok(match (ge, le) {
        (true, true) => MajorizationVerdict::Equal,
        (true, false) => MajorizationVerdict::StrictlyAbove,
        (false, true) => MajorizationVerdict::StrictlyBelow,
        (false, false) => MajorizationVerdict::Incomparable,
    })
}

/// Prefix sums of the counts sorted non-increasingly, zeros dropped.
fn prefix_sums(counts: &[usize]) -> Vec<usize> {
    let mut sorted: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .scan(0, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect()
}

/// Result of [`is_chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainCheck {
    Chain,
    /// First incomparable pair found, in input order.
    Broken(Placement, Placement),
}

impl ChainCheck {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Chain)
    }
}

/// Whether every pair in `set` is comparable.
pub fn is_chain(set: &[Placement]) -> Result<ChainCheck> {
    for (i, x) in set.iter().enumerate() {
        for y in &set[i + 1..] {
            if !compare(x, y)?.is_comparable() {
                return Ok(ChainCheck::Broken(x.clone(), y.clone()));
            }
        }
    }
    Ok(ChainCheck::Chain)
}

/// A chain of placements ordered by majorization, highest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlacementScale {
    members: Vec<Placement>,
}

impl PlacementScale {
    pub fn members(&self) -> &[Placement] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Position counted from the top (0 = most concentrated).
    pub fn rank(&self, counts: &[usize]) -> Option<usize> {
        self.members.iter().position(|p| p.counts() == counts)
    }

    /// Position counted from the bottom (0 = most spread out).
    pub fn level(&self, counts: &[usize]) -> Option<usize> {
        self.rank(counts).map(|r| self.members.len() - 1 - r)
    }

    pub fn contains(&self, counts: &[usize]) -> bool {
        self.rank(counts).is_some()
    }
}

impl fmt::Display for PlacementScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(" > ")?;
            }
            write!(f, "({p})")?;
        }
        Ok(())
    }
}

/// Sorts a chain from highest to lowest. Duplicates collapse to one member.
pub fn chain_sort(set: &[Placement]) -> Result<PlacementScale> {
    if let ChainCheck::Broken(x, y) = is_chain(set)? {
        return Err(Error::NotAChain(x.to_string(), y.to_string()));
    }
    let mut keyed: Vec<(Vec<usize>, Placement)> = set
        .iter()
        .map(|p| (prefix_sums(p.counts()), p.clone()))
        .collect();
    // Prefix sums of a partition have equal totals, so comparing them
    // lexicographically after padding with the total is consistent with ≻.
    let len = keyed.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, p) in &mut keyed {
        k.resize(len, p.m());
    }
    keyed.sort_by(|a, b| b.0.cmp(&a.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(PlacementScale {
        members: keyed.into_iter().map(|(_, p)| p).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_partitions;
    use MajorizationVerdict::*;

    fn pl(c: &[usize]) -> Placement {
        Placement::new(c, c.iter().sum::<usize>().max(c.len())).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(
            compare_counts(&[4, 0, 0, 0], &[3, 1, 0, 0]).unwrap(),
            StrictlyAbove
        );
        assert_eq!(compare_counts(&[4, 1, 1], &[3, 3]).unwrap(), Incomparable);
        assert_eq!(compare_counts(&[2, 2], &[2, 2]).unwrap(), Equal);
        assert_eq!(
            compare_counts(&[3, 1, 1, 1], &[2, 2, 2]).unwrap(),
            Incomparable
        );
        assert_eq!(
            compare_counts(&[2, 2, 2, 1], &[3, 2, 1, 1]).unwrap(),
            StrictlyBelow
        );
        assert!(matches!(
            compare_counts(&[2, 1], &[2, 2]),
            Err(Error::DifferentTotals { left: 3, right: 4 })
        ));
    }

    #[test]
    fn padding_and_order_do_not_matter() {
        assert_eq!(
            compare_counts(&[1, 3, 0, 0], &[2, 2]).unwrap(),
            StrictlyAbove
        );
        assert_eq!(
            compare_counts(&[2, 1, 1, 0, 0, 0], &[1, 1, 2]).unwrap(),
            Equal
        );
    }

    #[test]
    fn partial_order_laws_exhaustive() {
        for m in 1..=8 {
            let set = enumerate_partitions(m).unwrap();
            let items = set.items();
            let top = vec![m];
            let bottom = vec![1; m];
            for x in items {
                assert_eq!(compare_counts(x, x).unwrap(), Equal);
                if x != &top {
                    assert_eq!(compare_counts(&top, x).unwrap(), StrictlyAbove);
                }
                if x != &bottom {
                    assert_eq!(compare_counts(x, &bottom).unwrap(), StrictlyAbove);
                }
                for y in items {
                    let xy = compare_counts(x, y).unwrap();
                    assert_eq!(xy.reversed(), compare_counts(y, x).unwrap());
                    if x != y {
                        assert_ne!(xy, Equal, "antisymmetry {x:?} {y:?}");
                    }
                    for z in items {
                        if xy == StrictlyAbove && compare_counts(y, z).unwrap() == StrictlyAbove {
                            assert_eq!(compare_counts(x, z).unwrap(), StrictlyAbove);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn chain_detection() {
        let six: Vec<Placement> = [
            &[6][..],
            &[5, 1],
            &[4, 2],
            &[3, 2, 1],
            &[2, 2, 1, 1],
            &[2, 1, 1, 1, 1],
        ]
        .iter()
        .map(|c| Placement::new(c, 6).unwrap())
        .collect();
        assert!(is_chain(&six).unwrap().holds());

        let bad = [pl(&[4, 1, 1]), pl(&[3, 3])];
        assert_eq!(
            is_chain(&bad).unwrap(),
            ChainCheck::Broken(pl(&[4, 1, 1]), pl(&[3, 3]))
        );
        assert!(is_chain(&[pl(&[2, 1])]).unwrap().holds());
    }

    #[test]
    fn sorting_chains() {
        let set: Vec<Placement> = [&[2, 1, 1][..], &[4], &[2, 2], &[3, 1]]
            .iter()
            .map(|c| Placement::new(c, 4).unwrap())
            .collect();
        let scale = chain_sort(&set).unwrap();
        let got: Vec<String> = scale.members().iter().map(|p| p.to_string()).collect();
        assert_eq!(got, ["4", "3-1", "2-2", "2-1-1"]);
        assert_eq!(scale.rank(&[4]), Some(0));
        assert_eq!(scale.level(&[4]), Some(3));
        assert_eq!(scale.level(&[2, 1, 1]), Some(0));

        let single = chain_sort(&[pl(&[3])]).unwrap();
        assert_eq!(single.len(), 1);

        let five: Vec<Placement> = [
            &[1, 1, 1, 1, 1][..],
            &[2, 2, 1],
            &[5],
            &[2, 1, 1, 1],
            &[3, 2],
            &[4, 1],
        ]
        .iter()
        .map(|c| Placement::new(c, 6).unwrap())
        .collect();
        let scale = chain_sort(&five).unwrap();
        assert_eq!(
            scale.to_string(),
            "(5) > (4-1) > (3-2) > (2-2-1) > (2-1-1-1) > (1-1-1-1-1)"
        );

        assert!(matches!(
            chain_sort(&[pl(&[4, 1, 1]), pl(&[3, 3])]),
            Err(Error::NotAChain(..))
        ));
    }
}
