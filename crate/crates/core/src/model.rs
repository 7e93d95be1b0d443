//! Sensor, placement and observation model together with the exact
//! conditional likelihood of a joint alarm vector under each intruder
//! location.
//!
//! Sensors are deployed in blocks: the first `v_1` sensors watch point 1,
//! the next `v_2` watch point 2, and so on. An observation vector
//! `y_1 … y_M` is packed into an [`ObservationIndex`] with `y_1` as the most
//! significant bit, so the index is the decimal value of the binary string.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest sensor count an [`ObservationIndex`] can address.
pub const MAX_SENSORS: usize = 62;

/// Per-sensor detection and false-alarm probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensorModel {
    p_d: f64,
    p_f: f64,
}

impl SensorModel {
    pub fn new(p_d: f64, p_f: f64) -> Result<Self> {
        check_probability("p_d", p_d)?;
        check_probability("p_f", p_f)?;
        Ok(Self { p_d, p_f })
    }

    /// Probability that a sensor alarms when the intruder sits at its point.
    pub fn p_d(&self) -> f64 {
        self.p_d
    }

    /// Probability that a sensor alarms when the intruder is elsewhere.
    pub fn p_f(&self) -> f64 {
        self.p_f
    }

    /// The model seen by a detector that inverts every observation bit.
    pub fn flip(&self) -> Self {
        Self {
            p_d: 1.0 - self.p_d,
            p_f: 1.0 - self.p_f,
        }
    }

    /// True when alarms carry no information about the intruder.
    pub fn is_uninformative(&self) -> bool {
        self.p_d == self.p_f
    }
}

/// Complement of both probabilities. See [`SensorModel::flip`].
pub fn flip_model(model: SensorModel) -> SensorModel {
    model.flip()
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

/// Canonical placement: non-increasing sensor counts with trailing zeros
/// trimmed, together with the number of points `n` they are spread over.
///
/// Counts beyond [`Placement::parts`] are implicitly zero up to `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    counts: Vec<usize>,
    n: usize,
}

impl Placement {
    /// Sorts `raw` in non-increasing order, drops zeros and checks that the
    /// result fits on `n` points with `M <= n`.
    pub fn canonicalize(raw: &[i64], n: usize) -> Result<Self> {
        if raw.len() > n {
            return Err(Error::TooManyEntries { len: raw.len(), n });
        }
        let mut counts = Vec::with_capacity(raw.len());
        for (index, &value) in raw.iter().enumerate() {
            if value < 0 {
                return Err(Error::NegativeCount { index, value });
            }
            if value > 0 {
                counts.push(value as usize);
            }
        }
        Self::from_counts(counts, n)
    }

    /// Like [`Placement::canonicalize`] for unsigned counts.
    pub fn new(counts: &[usize], n: usize) -> Result<Self> {
        Self::from_counts(counts.to_vec(), n)
    }

    fn from_counts(mut counts: Vec<usize>, n: usize) -> Result<Self> {
        counts.retain(|&c| c > 0);
        counts.sort_unstable_by(|a, b| b.cmp(a));
        if counts.is_empty() {
            return Err(Error::EmptyPlacement);
        }
        if counts.len() > n {
            return Err(Error::TooManyParts {
                parts: counts.len(),
                n,
            });
        }
        let m: usize = counts.iter().sum();
        if m > n {
            return Err(Error::SensorsExceedPoints { m, n });
        }
        if m > MAX_SENSORS {
            return Err(Error::OutOfRange {
                what: "sensor count",
                value: m as f64,
                min: 1.0,
                max: MAX_SENSORS as f64,
            });
        }
        Ok(Self { counts, n })
    }

    /// Parses dash-joined counts such as `2-1-1-0`. Order and trailing
    /// zeros are irrelevant.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let raw = parse_counts(text)?;
        Self::canonicalize(&raw, n)
    }

    /// The uniform placement `(1, …, 1)` of `m` sensors.
    pub fn uniform(m: usize, n: usize) -> Result<Self> {
        Self::from_counts(vec![1; m], n)
    }

    /// Non-zero counts in non-increasing order.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Total number of sensors.
    pub fn m(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points carrying at least one sensor.
    pub fn parts(&self) -> usize {
        self.counts.len()
    }

    /// Sensor count at point `j` (1-based); zero for empty points.
    pub fn count(&self, j: usize) -> usize {
        self.counts.get(j.wrapping_sub(1)).copied().unwrap_or(0)
    }

    /// Index of the first sensor (0-based) deployed at each non-empty point.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.counts
            .iter()
            .map(|&c| {
                let start = acc;
                acc += c;
                start
            })
            .collect()
    }

    pub fn is_uniform(&self) -> bool {
        self.counts.iter().all(|&c| c == 1)
    }

    /// Same counts spread over a different number of points.
    pub fn with_points(&self, n: usize) -> Result<Self> {
        Self::from_counts(self.counts.clone(), n)
    }

    /// Counts padded with zeros to length `n`.
    pub fn padded(&self) -> Vec<usize> {
        let mut out = self.counts.clone();
        out.resize(self.n.max(self.counts.len()), 0);
        out
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_dashed(f, &self.counts)
    }
}

impl Serialize for Placement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Writes counts as `2-1-1`.
pub fn write_dashed(f: &mut impl fmt::Write, counts: &[usize]) -> fmt::Result {
    for (i, c) in counts.iter().enumerate() {
        if i > 0 {
            f.write_char('-')?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

/// Dash-joined rendering of a count list.
pub fn dashed(counts: &[usize]) -> String {
    let mut s = String::new();
    write_dashed(&mut s, counts).expect("writing to a String cannot fail");
    s
}

fn parse_counts(text: &str) -> Result<Vec<i64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::ParsePlacement(text.to_owned()));
    }
    text.split('-')
        .map(|tok| i64::from_str(tok.trim()).map_err(|_| Error::ParsePlacement(text.to_owned())))
        .collect()
}

/// Joint alarm vector of `M` sensors packed as an integer in `[0, 2^M)`.
///
/// Sensor `k` (1-based) owns the bit of weight `2^(M-k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObservationIndex(u64);

impl ObservationIndex {
    pub fn new(bits: u64) -> Self {
        Self(bits)
    }

    /// Packs `alarms[k-1] = y_k`.
    pub fn from_alarms(alarms: &[bool]) -> Self {
        Self(alarms.iter().fold(0, |acc, &y| (acc << 1) | u64::from(y)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `y_1 … y_M` for an `m`-sensor observation.
    pub fn alarms(self, m: usize) -> Vec<bool> {
        (1..=m).map(|k| self.sensor(k, m)).collect()
    }

    /// Alarm bit of sensor `k` (1-based).
    pub fn sensor(self, k: usize, m: usize) -> bool {
        (self.0 >> (m - k)) & 1 == 1
    }

    /// Total number of alarms `s = y_1 + … + y_M`.
    pub fn alarm_count(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Alarms among sensors `offset+1 ..= offset+len`.
    pub fn block_alarms(self, offset: usize, len: usize, m: usize) -> usize {
        if len == 0 {
            return 0;
        }
        let shift = m - offset - len;
        let mask = ((1u64 << len) - 1) << shift;
        (self.0 & mask).count_ones() as usize
    }

    /// Every bit inverted.
    pub fn complement(self, m: usize) -> Self {
        Self(!self.0 & observation_mask(m))
    }
}

fn observation_mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Number of distinct observations for `m` sensors.
pub fn observation_count(m: usize) -> u64 {
    1u64 << m
}

/// Number of alarmed sensors `a_j` at point `j` (1-based).
pub fn alarm_count_at_point(y: ObservationIndex, placement: &Placement, j: usize) -> usize {
    debug_assert!(j >= 1 && j <= placement.n());
    let v = placement.count(j);
    if v == 0 {
        return 0;
    }
    let offset: usize = placement.counts()[..j - 1].iter().sum();
    y.block_alarms(offset, v, placement.m())
}

/// `p_j(y)`: probability of observing `y` when the intruder is at point `j`
/// (1-based). Uses `0^0 = 1`, so deterministic sensors give exact values.
pub fn conditional_pmf(
    y: ObservationIndex,
    j: usize,
    placement: &Placement,
    model: &SensorModel,
) -> f64 {
    let m = placement.m();
    let s = y.alarm_count();
    let v = placement.count(j);
    if v == 0 {
        return empty_point_likelihood(s, m, model);
    }
    let a = alarm_count_at_point(y, placement, j);
    block_likelihood(a, v, s, m, model)
}

#[inline]
fn empty_point_likelihood(s: usize, m: usize, model: &SensorModel) -> f64 {
    model.p_f.powi(s as i32) * (1.0 - model.p_f).powi((m - s) as i32)
}

#[inline]
fn block_likelihood(a: usize, v: usize, s: usize, m: usize, model: &SensorModel) -> f64 {
    let miss = v - a;
    model.p_d.powi(a as i32)
        * (1.0 - model.p_d).powi(miss as i32)
        * model.p_f.powi((s - a) as i32)
        * (1.0 - model.p_f).powi((m - s - miss) as i32)
}

/// Dense likelihood table `p_j(y)` for one placement and model.
///
/// Non-empty points get one row each; all empty points share a single row
/// since their likelihood does not depend on the placement.
#[derive(Debug, Clone)]
pub struct PmfTable {
    model: SensorModel,
    placement: Placement,
    observations: usize,
    /// Row-major, `parts + 1` rows of `2^M` entries; the last row is the
    /// shared empty-point row.
    values: Vec<f64>,
}

impl PmfTable {
    pub fn new(placement: &Placement, model: &SensorModel) -> Self {
        let m = placement.m();
        let observations = observation_count(m) as usize;
        let parts = placement.parts();
        let offsets = placement.offsets();
        let mut values = vec![0.0; (parts + 1) * observations];
        for bits in 0..observations {
            let y = ObservationIndex(bits as u64);
            let s = y.alarm_count();
            for (row, (&v, &off)) in placement.counts().iter().zip(&offsets).enumerate() {
                let a = y.block_alarms(off, v, m);
                values[row * observations + bits] = block_likelihood(a, v, s, m, model);
            }
            values[parts * observations + bits] = empty_point_likelihood(s, m, model);
        }
        Self {
            model: *model,
            placement: placement.clone(),
            observations,
            values,
        }
    }

    pub fn model(&self) -> &SensorModel {
        &self.model
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    /// `2^M`.
    pub fn observations(&self) -> usize {
        self.observations
    }

    /// Number of points with no sensors; they all share the empty row.
    pub fn empty_multiplicity(&self) -> usize {
        self.placement.n() - self.placement.parts()
    }

    /// Always true: empty points are stored once.
    pub fn collapsed(&self) -> bool {
        true
    }

    /// Likelihood row of point `j` (1-based).
    pub fn row(&self, j: usize) -> &[f64] {
        let parts = self.placement.parts();
        let r = if j <= parts { j - 1 } else { parts };
        &self.values[r * self.observations..(r + 1) * self.observations]
    }

    /// Rows of the non-empty points, in placement order.
    pub fn point_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values
            .chunks_exact(self.observations)
            .take(self.placement.parts())
    }

    /// The shared row of every empty point.
    pub fn empty_row(&self) -> &[f64] {
        let parts = self.placement.parts();
        &self.values[parts * self.observations..]
    }

    pub fn likelihood(&self, y: ObservationIndex, j: usize) -> f64 {
        self.row(j)[y.bits() as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(bits: &[u8]) -> ObservationIndex {
        ObservationIndex::from_alarms(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn canonical_form_sorts_and_trims() {
        let p = Placement::canonicalize(&[1, 2, 1, 1, 0], 5).unwrap();
        assert_eq!(p.counts(), &[2, 1, 1, 1]);
        assert_eq!((p.m(), p.n()), (5, 5));

        let p = Placement::canonicalize(&[3], 3).unwrap();
        assert_eq!(p.counts(), &[3]);

        let p = Placement::canonicalize(&[0, 4, 0, 0], 4).unwrap();
        assert_eq!(p.counts(), &[4]);
        assert_eq!(p.padded(), vec![4, 0, 0, 0]);
    }

    #[test]
    fn canonicalize_rejects_bad_input() {
        assert!(matches!(
            Placement::canonicalize(&[1, -1], 3),
            Err(Error::NegativeCount {
                index: 1,
                value: -1
            })
        ));
        assert_eq!(
            Placement::canonicalize(&[0, 0], 3),
            Err(Error::EmptyPlacement)
        );
        assert!(matches!(
            Placement::canonicalize(&[1, 1, 1, 0], 3),
            Err(Error::TooManyEntries { .. })
        ));
        assert!(matches!(
            Placement::canonicalize(&[3, 1], 3),
            Err(Error::SensorsExceedPoints { m: 4, n: 3 })
        ));
    }

    #[test]
    fn parse_accepts_dashed_counts() {
        let p = Placement::parse("2-1-1-0", 4).unwrap();
        assert_eq!(p.counts(), &[2, 1, 1]);
        assert_eq!(p.to_string(), "2-1-1");
        assert_eq!(Placement::parse("1-2", 3).unwrap().counts(), &[2, 1]);
        assert!(Placement::parse("2-x", 4).is_err());
        assert!(Placement::parse("", 4).is_err());
    }

    #[test]
    fn observation_bits_are_msb_first() {
        let y = obs(&[1, 0, 1, 1]);
        assert_eq!(y.bits(), 0b1011);
        assert!(y.sensor(1, 4));
        assert!(!y.sensor(2, 4));
        assert_eq!(y.alarm_count(), 3);
        assert_eq!(y.complement(4).bits(), 0b0100);
        assert_eq!(y.alarms(4), vec![true, false, true, true]);
    }

    #[test]
    fn alarm_counts_per_point() {
        let p = Placement::new(&[2, 1, 1], 4).unwrap();
        assert_eq!(alarm_count_at_point(obs(&[1, 0, 1, 1]), &p, 1), 1);
        assert_eq!(alarm_count_at_point(obs(&[1, 0, 1, 1]), &p, 2), 1);
        assert_eq!(alarm_count_at_point(obs(&[1, 0, 1, 1]), &p, 4), 0);

        let p = Placement::new(&[2, 2], 4).unwrap();
        assert_eq!(alarm_count_at_point(obs(&[1, 1, 0, 0]), &p, 2), 0);
        assert_eq!(alarm_count_at_point(obs(&[1, 1, 0, 0]), &p, 1), 2);

        let all = obs(&[1, 1, 1, 1]);
        for j in 1..=4 {
            assert_eq!(alarm_count_at_point(all, &p, j), p.count(j));
        }
    }

    #[test]
    fn two_sensor_likelihoods() {
        let (pd, pf) = (0.7, 0.2);
        let model = SensorModel::new(pd, pf).unwrap();
        let p = Placement::new(&[2], 2).unwrap();
        let v = conditional_pmf(obs(&[1, 1]), 1, &p, &model);
        assert!((v - pd * pd).abs() < 1e-15);
        let v = conditional_pmf(obs(&[1, 0]), 2, &p, &model);
        assert!((v - pf * (1.0 - pf)).abs() < 1e-15);
    }

    #[test]
    fn four_sensor_table_entries() {
        let model = SensorModel::new(0.9, 0.1).unwrap();
        let p = Placement::new(&[2, 1, 1], 4).unwrap();
        // p_2(0,0,1,0) = P_D (1-P_F)^3
        let v = conditional_pmf(obs(&[0, 0, 1, 0]), 2, &p, &model);
        assert!((v - 0.6561).abs() < 1e-12);
        // p_3(0,0,1,0) = P_F (1-P_D) (1-P_F)^2
        let v = conditional_pmf(obs(&[0, 0, 1, 0]), 3, &p, &model);
        assert!((v - 0.0081).abs() < 1e-12);
        // p_1(1,0,1,1) = P_D P_F^2 (1-P_D)
        let v = conditional_pmf(obs(&[1, 0, 1, 1]), 1, &p, &model);
        assert!((v - 0.9 * 0.01 * 0.1).abs() < 1e-15);
        // p_4(0,0,0,0) = (1-P_F)^4
        let v = conditional_pmf(obs(&[0, 0, 0, 0]), 4, &p, &model);
        assert!((v - 0.9f64.powi(4)).abs() < 1e-15);
    }

    #[test]
    fn deterministic_sensors_give_exact_values() {
        let model = SensorModel::new(1.0, 0.0).unwrap();
        let p = Placement::new(&[2, 1], 3).unwrap();
        assert_eq!(conditional_pmf(obs(&[1, 1, 0]), 1, &p, &model), 1.0);
        assert_eq!(conditional_pmf(obs(&[1, 1, 0]), 2, &p, &model), 0.0);
        assert_eq!(conditional_pmf(obs(&[0, 0, 0]), 3, &p, &model), 1.0);
    }

    #[test]
    fn flip_complements() {
        let m = SensorModel::new(0.9, 0.1).unwrap().flip();
        assert!((m.p_d() - 0.1).abs() < 1e-15 && (m.p_f() - 0.9).abs() < 1e-15);
        let m = SensorModel::new(0.5, 0.5).unwrap();
        assert_eq!(flip_model(m), m);
        assert!(SensorModel::new(1.2, 0.0).is_err());
        assert!(SensorModel::new(0.5, -0.1).is_err());
    }

    #[test]
    fn table_matches_pointwise_pmf() {
        let model = SensorModel::new(0.65, 0.3).unwrap();
        let p = Placement::new(&[3, 1], 6).unwrap();
        let t = PmfTable::new(&p, &model);
        assert_eq!(t.empty_multiplicity(), 4);
        assert_eq!(t.point_rows().count(), 2);
        for bits in 0..t.observations() as u64 {
            let y = ObservationIndex::new(bits);
            for j in 1..=6 {
                assert_eq!(t.likelihood(y, j), conditional_pmf(y, j, &p, &model));
            }
        }
        for j in 1..=6 {
            let sum: f64 = t.row(j).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }
}
