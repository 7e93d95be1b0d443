//! Grid verifiers for the structural results on optimal placements.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::grid::{nodes, Grid, PlaneRegion};
use super::sweep::{sweep, sweep_plane, RegionMap, SweepConfig};
use crate::detection::{admissible_placements, error_probability_value, evaluate_all, Optimum};
use crate::error::{Error, Result};
use crate::majorization::{chain_sort, compare, is_chain, ChainCheck, PlacementScale};
use crate::model::{dashed, Placement, SensorModel};

/// Most counterexamples kept in a report; the total is in `violations`.
pub const MAX_RECORDED: usize = 64;

/// Tolerance for the uniform-vs-`(2,1,…,1)` inequality.
pub const THM41_TOLERANCE: f64 = 1e-12;

/// Tolerance for the scaled-difference identity across point counts.
pub const THM42_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub m: usize,
    pub n: usize,
    pub p_f: f64,
    pub p_d: f64,
    pub detail: String,
}

/// Outcome of a verifier run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub checked: u64,
    /// Instances skipped as ties or outside the claim's domain.
    pub skipped: u64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub violations: u64,
    pub counterexamples: Vec<Counterexample>,
    pub pass: bool,
}

impl VerificationReport {
    fn new(claim: impl Into<String>, tolerance: f64) -> Self {
        Self {
            claim: claim.into(),
            checked: 0,
            skipped: 0,
            max_violation: 0.0,
            tolerance,
            violations: 0,
            counterexamples: Vec::new(),
            pass: false,
        }
    }

    fn violate(&mut self, magnitude: f64, example: Counterexample) {
        self.max_violation = self.max_violation.max(magnitude);
        self.violations += 1;
        if self.counterexamples.len() < MAX_RECORDED {
            self.counterexamples.push(example);
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.max_violation <= self.tolerance && self.counterexamples.is_empty();
        self
    }

    fn absorb(&mut self, other: VerificationReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.max_violation = self.max_violation.max(other.max_violation);
        self.violations += other.violations;
        let room = MAX_RECORDED.saturating_sub(self.counterexamples.len());
        self.counterexamples
            .extend(other.counterexamples.into_iter().take(room));
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} ({} checked, {} skipped, {} violations, max violation {:.3e})",
            self.claim,
            if self.pass { "PASS" } else { "FAIL" },
            self.checked,
            self.skipped,
            self.violations,
            self.max_violation
        )
    }
}

/// `P_e(1,…,1) − P_e(2,1,…,1,0)` for `m` sensors on `m` points.
pub fn uniform_gap(m: usize, model: &SensorModel) -> Result<f64> {
    let uniform = Placement::uniform(m, m)?;
    let mut pair = vec![1; m - 1];
    pair[0] = 2;
    let paired = Placement::new(&pair, m)?;
    Ok(error_probability_value(&uniform, model) - error_probability_value(&paired, model))
}

/// Checks that the uniform placement never beats `(2,1,…,1,0)` when
/// `M = N`, for every `2 <= M <= m_max` on the half-plane `p_d >= p_f`.
pub fn verify_thm41(m_max: usize, step: f64) -> Result<VerificationReport> {
    let grid = Grid::new(step)?;
    let nodes = nodes(&grid, PlaneRegion::PdGePf, None);
    let mut report = VerificationReport::new("thm41", THM41_TOLERANCE);
    for m in 2..=m_max {
        let gaps: Vec<f64> = nodes
            .par_iter()
            .map(|node| {
                let model = SensorModel::new(node.p_d, node.p_f).expect("grid node");
                uniform_gap(m, &model)
            })
            .collect::<Result<_>>()?;
        for (node, gap) in nodes.iter().zip(gaps) {
            report.checked += 1;
            if gap < -THM41_TOLERANCE {
                report.violate(
                    -gap,
                    Counterexample {
                        m,
                        n: m,
                        p_f: node.p_f,
                        p_d: node.p_d,
                        detail: format!("uniform beats (2,1,...,1) by {:.3e}", -gap),
                    },
                );
            }
        }
    }
    Ok(report.finish())
}

/// Checks `n2·ΔP_e|n2 = n1·ΔP_e|n1` for every pair of placements of `m`
/// and that both point counts yield identical optimal sets.
pub fn verify_thm42(m: usize, n1: usize, n2: usize, step: f64) -> Result<VerificationReport> {
    if !(m < n1 && n1 < n2) {
        return Err(Error::OutOfRange {
            what: "n1",
            value: n1 as f64,
            min: (m + 1) as f64,
            max: (n2.max(1) - 1) as f64,
        });
    }
    let grid = Grid::new(step)?;
    let nodes = nodes(&grid, PlaneRegion::PdGePf, None);
    let first = admissible_placements(m, n1)?;
    let second = admissible_placements(m, n2)?;
    let (w1, w2) = (n1 as f64, n2 as f64);

    let per_node: Vec<(f64, bool)> = nodes
        .par_iter()
        .map(|node| {
            let model = SensorModel::new(node.p_d, node.p_f).expect("grid node");
            let a = evaluate_all(&first, &model);
            let b = evaluate_all(&second, &model);
            let mut worst: f64 = 0.0;
            for i in 0..a.len() {
                for j in 0..a.len() {
                    let lhs = w2 * (b[i] - b[j]);
                    let rhs = w1 * (a[i] - a[j]);
                    worst = worst.max((lhs - rhs).abs());
                }
            }
            let opt_a = Optimum::from_values(&first, &a);
            let opt_b = Optimum::from_values(&second, &b);
            let same = opt_a.best.len() == opt_b.best.len()
                && opt_a
                    .best
                    .iter()
                    .zip(&opt_b.best)
                    .all(|(x, y)| x.counts() == y.counts());
            (worst, same)
        })
        .collect();

    let mut report = VerificationReport::new("thm42", THM42_TOLERANCE);
    let pairs = (first.len() * first.len()) as u64;
    for (node, (worst, same_best)) in nodes.iter().zip(per_node) {
        report.checked += pairs;
        if worst > THM42_TOLERANCE {
            report.violate(
                worst,
                Counterexample {
                    m,
                    n: n2,
                    p_f: node.p_f,
                    p_d: node.p_d,
                    detail: format!("scaled differences disagree by {worst:.3e}"),
                },
            );
        }
        if !same_best {
            report.violate(
                0.0,
                Counterexample {
                    m,
                    n: n2,
                    p_f: node.p_f,
                    p_d: node.p_d,
                    detail: format!("optimal sets differ between N={n1} and N={n2}"),
                },
            );
        }
    }
    Ok(report.finish())
}

/// Strictly optimal sets for `(m, m)` and `(m, m + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictSets {
    pub equal_points: Vec<String>,
    pub extra_point: Vec<String>,
}

/// Checks that adding a point adds exactly the uniform placement to the
/// strictly optimal set.
pub fn verify_cor41(m: usize, step: f64) -> Result<(VerificationReport, StrictSets)> {
    let tight = sweep_plane(m, m, step, PlaneRegion::PdGePf)?;
    let loose = sweep_plane(m, m + 1, step, PlaneRegion::PdGePf)?;
    let a = tight.strict_set();
    let b = loose.strict_set();
    let uniform = vec![1; m];
    let mut expected = a.clone();
    expected.insert(uniform.clone());

    let mut report = VerificationReport::new("cor41", 0.0);
    report.checked = (tight.cells.len() + loose.cells.len()) as u64;
    let mut flag = |detail: String| {
        report.violate(
            0.0,
            Counterexample {
                m,
                n: m + 1,
                p_f: f64::NAN,
                p_d: f64::NAN,
                detail,
            },
        )
    };
    for extra in b.difference(&expected) {
        flag(format!(
            "{} strictly optimal only with N = M + 1",
            dashed(extra)
        ));
    }
    for missing in expected.difference(&b) {
        flag(format!(
            "{} not strictly optimal with N = M + 1",
            dashed(missing)
        ));
    }
    if a.contains(&uniform) {
        flag("uniform placement strictly optimal with N = M".to_owned());
    }
    let names = |s: &BTreeSet<Vec<usize>>| s.iter().rev().map(|c| dashed(c)).collect();
    let sets = StrictSets {
        equal_points: names(&a),
        extra_point: names(&b),
    };
    Ok((report.finish(), sets))
}

/// Direction along which monotonicity is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Fixed `p_d`, increasing `p_f`.
    IncreasingPf,
    /// Fixed `p_f`, increasing `p_d`.
    IncreasingPd,
}

/// Checks that, along every line of the map in the given direction, the
/// strict optimum never moves down the scale. Tie cells are skipped; only
/// nodes with `p_d >= p_f` take part.
pub fn check_monotone_on_scale(
    map: &RegionMap,
    scale: &PlacementScale,
    axis: Axis,
) -> VerificationReport {
    let claim = match axis {
        Axis::IncreasingPf => "monotone_increasing_pf",
        Axis::IncreasingPd => "monotone_increasing_pd",
    };
    let mut report = VerificationReport::new(claim, 0.0);
    let mut cells: Vec<_> = map
        .cells
        .iter()
        .filter(|c| c.node.i_d >= c.node.i_f)
        .collect();
    // Line key first, position along the line second.
    let key = |c: &&super::sweep::Cell| match axis {
        Axis::IncreasingPf => (c.node.i_d, c.node.i_f),
        Axis::IncreasingPd => (c.node.i_f, c.node.i_d),
    };
    cells.sort_by_key(key);

    let mut prev: Option<(usize, usize, &Placement, f64)> = None;
    for cell in cells {
        let (line, pos) = key(&cell);
        if prev.is_some_and(|(l, ..)| l != line) {
            prev = None;
        }
        let Some(best) = cell.optimum.strict_best() else {
            report.skipped += 1;
            continue;
        };
        report.checked += 1;
        let node = cell.node;
        let Some(level) = scale.level(best.counts()) else {
            report.violate(
                f64::INFINITY,
                Counterexample {
                    m: map.m,
                    n: map.n,
                    p_f: node.p_f,
                    p_d: node.p_d,
                    detail: format!("({best}) is not on the scale {scale}"),
                },
            );
            prev = None;
            continue;
        };
        if let Some((_, prev_level, prev_best, prev_pos)) = prev {
            if level < prev_level {
                let moving = match axis {
                    Axis::IncreasingPf => "p_f",
                    Axis::IncreasingPd => "p_d",
                };
                report.violate(
                    (prev_level - level) as f64,
                    Counterexample {
                        m: map.m,
                        n: map.n,
                        p_f: node.p_f,
                        p_d: node.p_d,
                        detail: format!(
                            "{moving} {prev_pos:.4} -> {:.4}: ({prev_best}) -> ({best}) moves down the scale",
                            map.grid.value(pos)
                        ),
                    },
                );
            }
        }
        prev = Some((line, level, best, map.grid.value(pos)));
    }
    report.finish()
}

/// Outcome of [`check_conjecture_chain`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainEvidence {
    pub report: VerificationReport,
    /// Chosen set of optimal placements covering every node, if it forms a
    /// chain.
    pub chain: Option<PlacementScale>,
    /// Strictly optimal placements (forced choices).
    pub strict: Vec<Placement>,
}

/// Looks for one optimal placement per node such that the chosen set is a
/// chain. Strict optima are forced; tie cells reuse an already chosen
/// placement when possible, else any member comparable with all choices.
pub fn check_conjecture_chain(map: &RegionMap) -> Result<ChainEvidence> {
    let strict = map.strict_placements();
    let mut report = VerificationReport::new("conjecture", 0.0);
    report.checked = map.cells.len() as u64;
    let fail = |report: &mut VerificationReport, detail: String| {
        report.violate(
            1.0,
            Counterexample {
                m: map.m,
                n: map.n,
                p_f: f64::NAN,
                p_d: f64::NAN,
                detail,
            },
        )
    };
    if let ChainCheck::Broken(x, y) = is_chain(&strict)? {
        fail(
            &mut report,
            format!("strict optima ({x}) and ({y}) are incomparable"),
        );
        return Ok(ChainEvidence {
            report: report.finish(),
            chain: None,
            strict,
        });
    }
    let mut chosen = strict.clone();
    for cell in map.cells.iter().filter(|c| !c.optimum.strict) {
        let ties = &cell.optimum.best;
        if ties
            .iter()
            .any(|p| chosen.iter().any(|c| c.counts() == p.counts()))
        {
            continue;
        }
        let pick = ties.iter().find(|p| {
            chosen
                .iter()
                .all(|c| compare(c, p).map(|v| v.is_comparable()).unwrap_or(false))
        });
        match pick {
            Some(p) => chosen.push(p.clone()),
            None => {
                report.skipped += 1;
                fail(
                    &mut report,
                    format!(
                        "no tie member at ({:.4}, {:.4}) fits the chain",
                        cell.node.p_f, cell.node.p_d
                    ),
                );
            }
        }
    }
    let chain = if report.violations == 0 {
        Some(chain_sort(&chosen)?)
    } else {
        None
    };
    Ok(ChainEvidence {
        report: report.finish(),
        chain,
        strict,
    })
}

/// Placement scale containing every strict optimum for `m <= 6`, highest
/// first, ending with the uniform placement.
pub fn known_scale(m: usize, n: usize) -> Result<PlacementScale> {
    let members: &[&[usize]] = match m {
        1 => &[&[1]],
        2 => &[&[2], &[1, 1]],
        3 => &[&[3], &[2, 1], &[1, 1, 1]],
        4 => &[&[4], &[3, 1], &[2, 2], &[2, 1, 1], &[1, 1, 1, 1]],
        5 => &[
            &[5],
            &[4, 1],
            &[3, 2],
            &[2, 2, 1],
            &[2, 1, 1, 1],
            &[1, 1, 1, 1, 1],
        ],
        6 => &[
            &[6],
            &[5, 1],
            &[4, 2],
            &[3, 2, 1],
            &[2, 2, 1, 1],
            &[2, 1, 1, 1, 1],
            &[1, 1, 1, 1, 1, 1],
        ],
        _ => {
            return Err(Error::OutOfRange {
                what: "m",
                value: m as f64,
                min: 1.0,
                max: 6.0,
            })
        }
    };
    let placements = members
        .iter()
        .map(|c| Placement::new(c, n))
        .collect::<Result<Vec<_>>>()?;
    chain_sort(&placements)
}

/// `(4) ≻ (3,1) ≻ (2,2) ≻ (2,1,1)` on four points.
pub fn four_sensor_scale() -> PlacementScale {
    let placements: Vec<Placement> = [&[4][..], &[3, 1], &[2, 2], &[2, 1, 1]]
        .iter()
        .map(|c| Placement::new(c, 4).expect("valid"))
        .collect();
    chain_sort(&placements).expect("a chain")
}

/// Point pairs on which monotonicity is known to hold.
pub const PROP51_CASES: [(usize, usize); 5] = [(3, 3), (3, 4), (4, 4), (4, 5), (5, 6)];

/// Monotonicity along both axes for every case in [`PROP51_CASES`].
pub fn verify_prop51(step: f64) -> Result<VerificationReport> {
    let mut total = VerificationReport::new("prop51", 0.0);
    for (m, n) in PROP51_CASES {
        let map = sweep_plane(m, n, step, PlaneRegion::PdGePf)?;
        let scale = known_scale(m, n)?;
        for axis in [Axis::IncreasingPf, Axis::IncreasingPd] {
            total.absorb(check_monotone_on_scale(&map, &scale, axis));
        }
    }
    Ok(total.finish())
}

/// A probe of the seven-sensor, eight-point map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub p_f: f64,
    pub p_d: f64,
    pub expected: Placement,
    pub optimum: Optimum,
    pub reproduced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleEvidence {
    pub probes: Vec<Probe>,
    pub scale: PlacementScale,
    pub along_pf: VerificationReport,
    pub along_pd: VerificationReport,
    /// Probes reproduced and both axes show a violation.
    pub pass: bool,
}

/// Probes `(M, N) = (7, 8)` at three fixed points and checks a local
/// window around them for monotonicity violations along both axes.
pub fn verify_counterexample(step: f64) -> Result<CounterexampleEvidence> {
    let (m, n) = (7, 8);
    let placements = admissible_placements(m, n)?;
    let cases: [(f64, f64, &[usize]); 3] = [
        (0.46, 0.6, &[3, 2, 1, 1]),
        (0.48, 0.6, &[2, 2, 2, 1]),
        (0.48, 0.5, &[3, 2, 1, 1]),
    ];
    let probes = cases
        .iter()
        .map(|&(p_f, p_d, expect)| {
            let model = SensorModel::new(p_d, p_f)?;
            let values = evaluate_all(&placements, &model);
            let optimum = Optimum::from_values(&placements, &values);
            let expected = Placement::new(expect, n)?;
            let reproduced = optimum.strict_best() == Some(&expected);
            Ok(Probe {
                p_f,
                p_d,
                expected,
                optimum,
                reproduced,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let map = sweep(m, n, &SweepConfig::new(step).window(0.44, 0.50, 0.50, 0.62))?;
    let scale = chain_sort(&map.strict_placements())?;
    let along_pf = check_monotone_on_scale(&map, &scale, Axis::IncreasingPf);
    let along_pd = check_monotone_on_scale(&map, &scale, Axis::IncreasingPd);
    let pass = probes.iter().all(|p| p.reproduced)
        && along_pf.violations > 0
        && along_pd.violations > 0
        && along_pf.max_violation.is_finite()
        && along_pd.max_violation.is_finite();
    Ok(CounterexampleEvidence {
        probes,
        scale,
        along_pf,
        along_pd,
        pass,
    })
}
