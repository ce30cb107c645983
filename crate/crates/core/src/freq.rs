//! m-gram frequency analysis: extraction, z-scores, χ² and top-K.
//!
//! Extraction granularity: 8- and 16-bit m-grams slide one byte at a time
//! (16-bit values read in stream order, first byte high), 32-bit m-grams
//! are the keystream's little-endian words, stepping one word at a time.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MGramSpec {
    pub m_bits: u32,
    pub overlapping: bool,
}

impl MGramSpec {
    pub fn new(m_bits: u32) -> Result<Self> {
        let spec = MGramSpec {
            m_bits,
            overlapping: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.m_bits {
            8 | 16 | 32 => Ok(()),
            m => Err(Error::UnsupportedMgram(m)),
        }
    }

    fn unit_bytes(&self) -> usize {
        match (self.m_bits, self.overlapping) {
            (32, _) => 4,
            (16, false) => 2,
            _ => 1,
        }
    }
}

/// Occurrence counts of m-gram values over `total` extracted positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub m_bits: u32,
    pub total: u64,
    counts: HashMap<u32, u64>,
}

impl FrequencyTable {
    pub fn new(m_bits: u32) -> Self {
        FrequencyTable {
            m_bits,
            total: 0,
            counts: HashMap::new(),
        }
    }

    /// Builds a table from explicit counts; `total` is their sum.
    pub fn from_counts(m_bits: u32, counts: impl IntoIterator<Item = (u32, u64)>) -> Self {
        let mut t = FrequencyTable::new(m_bits);
        for (v, c) in counts {
            if c > 0 {
                *t.counts.entry(v).or_default() += c;
                t.total += c;
            }
        }
        t
    }

    #[inline]
    fn record(&mut self, v: u32) {
        *self.counts.entry(v).or_default() += 1;
        self.total += 1;
    }

    pub fn count(&self, pattern: u32) -> u64 {
        self.counts.get(&pattern).copied().unwrap_or(0)
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts.iter().map(|(&v, &c)| (v, c))
    }

    /// Adds another shard's counts.
    pub fn merge(&mut self, other: &FrequencyTable) {
        debug_assert_eq!(self.m_bits, other.m_bits);
        for (v, c) in other.iter() {
            *self.counts.entry(v).or_default() += c;
        }
        self.total += other.total;
    }

    /// Counts sorted by descending count, then ascending value.
    pub fn sorted(&self) -> Vec<(u32, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }
}

fn extract_into(table: &mut FrequencyTable, bytes: &[u8], spec: &MGramSpec) {
    match (spec.m_bits, spec.overlapping) {
        (8, _) => bytes.iter().for_each(|&b| table.record(b as u32)),
        (16, true) => bytes
            .windows(2)
            .for_each(|w| table.record(((w[0] as u32) << 8) | w[1] as u32)),
        (16, false) => bytes
            .chunks_exact(2)
            .for_each(|w| table.record(((w[0] as u32) << 8) | w[1] as u32)),
        (32, _) => bytes
            .chunks_exact(4)
            .for_each(|c| table.record(u32::from_le_bytes([c[0], c[1], c[2], c[3]]))),
        _ => unreachable!("validated"),
    }
}

pub fn extract_mgrams(keystream: &[u8], spec: &MGramSpec) -> Result<FrequencyTable> {
    spec.validate()?;
    let needed = (spec.m_bits / 8) as usize;
    if keystream.len() < needed {
        return Err(Error::Undersized {
            needed,
            got: keystream.len(),
        });
    }
    let mut table = FrequencyTable::new(spec.m_bits);
    extract_into(&mut table, keystream, spec);
    Ok(table)
}

/// Sharded extraction merged into one table; equal to [`extract_mgrams`].
pub fn extract_mgrams_par(keystream: &[u8], spec: &MGramSpec, shards: usize) -> Result<FrequencyTable> {
    spec.validate()?;
    let needed = (spec.m_bits / 8) as usize;
    if keystream.len() < needed {
        return Err(Error::Undersized {
            needed,
            got: keystream.len(),
        });
    }
    let unit = spec.unit_bytes();
    // Sliding 16-bit windows need one byte of look-ahead past the shard.
    let overlap = if spec.m_bits == 16 && spec.overlapping { 1 } else { 0 };
    let units = keystream.len() / unit;
    let per_shard = units.div_ceil(shards.max(1)).max(1) * unit;
    let parts: Vec<FrequencyTable> = (0..keystream.len())
        .step_by(per_shard)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&start| {
            let end = (start + per_shard + overlap).min(keystream.len());
            let mut t = FrequencyTable::new(spec.m_bits);
            extract_into(&mut t, &keystream[start..end], spec);
            t
        })
        .collect();
    let mut table = FrequencyTable::new(spec.m_bits);
    for p in &parts {
        table.merge(p);
    }
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceConfig {
    pub alpha: f64,
    pub z_threshold: f64,
    pub chi2_alpha: f64,
    /// Divide `alpha` by the number of m-gram cells before thresholding.
    pub bonferroni: bool,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        SignificanceConfig {
            alpha: 1e-6,
            z_threshold: 4.89,
            chi2_alpha: 0.001,
            bonferroni: false,
        }
    }
}

/// `Φ⁻¹(1 − α/2)`.
pub fn two_sided_quantile(alpha: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

impl SignificanceConfig {
    pub fn from_alpha(alpha: f64) -> Self {
        SignificanceConfig {
            alpha,
            z_threshold: two_sided_quantile(alpha),
            ..SignificanceConfig::default()
        }
    }

    /// `z_threshold` must agree with `alpha` to within 0.01.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) || !(self.chi2_alpha > 0.0 && self.chi2_alpha < 1.0) {
            return Err(Error::InvalidConfig("significance levels must lie in (0, 1)".into()));
        }
        let q = two_sided_quantile(self.alpha);
        if (q - self.z_threshold).abs() > 0.01 {
            return Err(Error::InvalidConfig(format!(
                "z threshold {} disagrees with alpha {} (quantile {q:.4})",
                self.z_threshold, self.alpha
            )));
        }
        Ok(())
    }

    /// Threshold applied to tables of `m_bits`-bit m-grams.
    pub fn threshold_for(&self, m_bits: u32) -> f64 {
        if self.bonferroni {
            two_sided_quantile(self.alpha / (m_bits as f64).exp2())
        } else {
            self.z_threshold
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZScoreResult {
    pub pattern: u32,
    pub observed: u64,
    pub z: f64,
    pub expected: f64,
    pub variance: f64,
    pub significant: bool,
}

/// `z = (f_obs − N·2^−m) / sqrt(N·2^−m·(1 − 2^−m))`.
pub fn z_score(table: &FrequencyTable, pattern: u32, cfg: &SignificanceConfig) -> Result<ZScoreResult> {
    if table.total == 0 {
        return Err(Error::Degenerate("z-score of an empty table"));
    }
    let n = table.total as f64;
    let p = (-(table.m_bits as f64)).exp2();
    let expected = n * p;
    let variance = n * p * (1.0 - p);
    let observed = table.count(pattern);
    let z = (observed as f64 - expected) / variance.sqrt();
    Ok(ZScoreResult {
        pattern,
        observed,
        z,
        expected,
        variance,
        significant: z > cfg.threshold_for(table.m_bits),
    })
}

/// Every observed m-gram whose z-score exceeds the threshold, in
/// [`FrequencyTable::sorted`] order.
pub fn significant_patterns(table: &FrequencyTable, cfg: &SignificanceConfig) -> Result<Vec<ZScoreResult>> {
    table
        .sorted()
        .into_iter()
        .map(|(v, _)| z_score(table, v, cfg))
        .filter(|r| r.as_ref().map_or(true, |z| z.significant))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub cells: u64,
    pub df: u64,
    pub critical: f64,
    pub pass: bool,
    /// Expected count per cell fell below 5.
    pub low_expected: bool,
}

/// Cell of an m-gram for the χ² test. 32-bit values are folded into 2¹⁶
/// buckets by XOR of the half-words.
pub fn chi_cell(m_bits: u32, value: u32) -> u32 {
    match m_bits {
        32 => (value >> 16) ^ (value & 0xffff),
        _ => value,
    }
}

pub fn chi_square(table: &FrequencyTable, cfg: &SignificanceConfig) -> Result<ChiSquareResult> {
    if table.total == 0 {
        return Err(Error::Degenerate("chi-square of an empty table"));
    }
    let cells: u64 = match table.m_bits {
        8 => 256,
        16 | 32 => 65536,
        m => return Err(Error::UnsupportedMgram(m)),
    };
    let mut observed = vec![0u64; cells as usize];
    for (v, c) in table.iter() {
        observed[chi_cell(table.m_bits, v) as usize] += c;
    }
    let expected = table.total as f64 / cells as f64;
    let statistic: f64 = observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let df = cells - 1;
    let critical = chi2_critical(df, cfg.chi2_alpha);
    let low_expected = expected < 5.0;
    if low_expected {
        log::warn!(
            "chi-square: expected count {expected:.2} per cell is below 5; result is unreliable"
        );
    }
    Ok(ChiSquareResult {
        statistic,
        cells,
        df,
        critical,
        pass: statistic < critical,
        low_expected,
    })
}

/// Upper `alpha` quantile of χ²(df).
pub fn chi2_critical(df: u64, alpha: f64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("df > 0")
        .inverse_cdf(1.0 - alpha)
}

/// The `k` most frequent m-grams; ties go to the smaller value.
pub fn top_k(table: &FrequencyTable, k: usize) -> Vec<(u32, u64)> {
    let mut v = table.sorted();
    v.truncate(k);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_extractions() {
        let t = extract_mgrams(&[0xAB, 0xCD], &MGramSpec::new(8).unwrap()).unwrap();
        assert_eq!(t.total, 2);
        assert_eq!((t.count(0xAB), t.count(0xCD)), (1, 1));

        let t = extract_mgrams(&[1, 2, 3, 4], &MGramSpec::new(32).unwrap()).unwrap();
        assert_eq!(t.total, 1);
        assert_eq!(t.count(0x04030201), 1);

        let t = extract_mgrams(&[1, 2, 3], &MGramSpec::new(16).unwrap()).unwrap();
        assert_eq!(t.total, 2);
        assert_eq!((t.count(0x0102), t.count(0x0203)), (1, 1));

        let spec = MGramSpec {
            m_bits: 16,
            overlapping: false,
        };
        let t = extract_mgrams(&[1, 2, 3], &spec).unwrap();
        assert_eq!(t.total, 1);
    }

    #[test]
    fn undersized_and_unsupported() {
        assert!(matches!(
            extract_mgrams(&[1, 2, 3], &MGramSpec::new(32).unwrap()),
            Err(Error::Undersized { needed: 4, got: 3 })
        ));
        assert!(extract_mgrams(&[], &MGramSpec::new(8).unwrap()).is_err());
        assert!(MGramSpec::new(12).is_err());
    }

    #[test]
    fn z_of_expectation_is_zero() {
        let t = FrequencyTable::from_counts(8, [(0u32, 4096u64), (1, (1 << 20) - 4096)]);
        let z = z_score(&t, 0, &SignificanceConfig::default()).unwrap();
        assert_eq!(t.total, 1 << 20);
        assert_eq!(z.expected, 4096.0);
        assert_eq!(z.z, 0.0);
        assert!(!z.significant);
    }

    #[test]
    fn z_hand_arithmetic() {
        // N = 2^20, |P| = 8, f = 4500:
        // var = 2^20 * 2^-8 * (255/256) = 4080, sqrt = 63.8748...
        // z = 404 / 63.87488...
        let t = FrequencyTable::from_counts(8, [(7u32, 4500u64), (8, (1 << 20) - 4500)]);
        let z = z_score(&t, 7, &SignificanceConfig::default()).unwrap();
        assert_eq!(z.variance, 4080.0);
        assert!((z.z - 6.324865).abs() < 1e-6, "{}", z.z);
        assert!(z.significant);
    }

    #[test]
    fn empty_table_rejected() {
        let t = FrequencyTable::new(8);
        assert!(z_score(&t, 0, &SignificanceConfig::default()).is_err());
        assert!(chi_square(&t, &SignificanceConfig::default()).is_err());
    }

    #[test]
    fn thresholds() {
        let cfg = SignificanceConfig::default();
        cfg.validate().unwrap();
        assert!((two_sided_quantile(1e-6) - 4.8916).abs() < 1e-3);
        let bad = SignificanceConfig {
            z_threshold: 3.0,
            ..cfg
        };
        assert!(bad.validate().is_err());
        let bonf = SignificanceConfig {
            bonferroni: true,
            ..cfg
        };
        assert!(bonf.threshold_for(8) > cfg.threshold_for(8));
    }

    #[test]
    fn chi_square_uniform_and_degenerate() {
        let cfg = SignificanceConfig::default();
        let uniform = FrequencyTable::from_counts(8, (0..256u32).map(|v| (v, 10u64)));
        let r = chi_square(&uniform, &cfg).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.pass);

        let spike = FrequencyTable::from_counts(8, [(42u32, 256u64)]);
        let r = chi_square(&spike, &cfg).unwrap();
        assert_eq!(r.statistic, 255.0 * 256.0);
        assert!(!r.pass);
        assert!(r.low_expected);
    }

    #[test]
    fn chi2_critical_values() {
        // Upper 0.1% points of chi-square(255) and chi-square(1).
        assert!((chi2_critical(255, 0.001) - 330.52).abs() < 0.05);
        assert!((chi2_critical(1, 0.001) - 10.828).abs() < 0.01);
    }

    #[test]
    fn fold_bins() {
        assert_eq!(chi_cell(32, 0x1234_1234), 0);
        assert_eq!(chi_cell(32, 0xffff_0000), 0xffff);
        assert_eq!(chi_cell(16, 0xbeef), 0xbeef);
    }

    #[test]
    fn top_k_ties() {
        let t = FrequencyTable::from_counts(8, [(0xC, 1), (0xB, 3), (0xA, 3)]);
        assert_eq!(top_k(&t, 2), vec![(0xA, 3), (0xB, 3)]);
        assert_eq!(top_k(&t, 10).len(), 3);
        assert_eq!(top_k(&t, 2), top_k(&t, 2));
    }
}
