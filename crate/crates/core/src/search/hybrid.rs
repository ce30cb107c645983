//! Windowed KMP/Boyer-Moore hybrid with running significance flags.
//!
//! The text is walked in fixed windows of `window_bits` (256 bits by
//! default: 8 words or 32 bytes). Alignments whose start lies in the current
//! window are examined; a match may extend into the next window. Long
//! patterns (at least `bm_switch_bits`) use a Boyer-Moore jump on the last
//! symbol, an XOR-fold check on the first symbol, then left-to-right KMP
//! verification whose failure function picks the next alignment. Short
//! patterns run a streaming KMP scan. Every shift taken is safe, so the
//! positions equal the brute-force oracle.
//!
//! After each window the empirical match rate `count / N` of every pattern
//! is compared with `2^-|P| + σ_k · sqrt(p0 (1 - p0) / N)`, `p0 = 2^-|P|`;
//! once above it the pattern stays flagged. Flags never touch positions.

use serde::{Deserialize, Serialize};

use super::bm::BadCharTable;
use super::kmp::PrefixTable;
use super::{brute_force_search, Engine, MatchReport, Symbol, WordPattern};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub window_bits: u32,
    /// m-gram levels (bits) used for the prefix-hierarchy estimate.
    pub mgram_sizes: Vec<u32>,
    pub flag_threshold_sigma: f64,
    /// Patterns of at least this many bits take the Boyer-Moore jump path.
    pub bm_switch_bits: u32,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            window_bits: 256,
            mgram_sizes: vec![8, 16, 32],
            flag_threshold_sigma: 3.0,
            bm_switch_bits: 128,
        }
    }
}

impl HybridConfig {
    fn window_symbols<T: Symbol>(&self) -> Result<usize> {
        if self.window_bits == 0 || !self.window_bits.is_multiple_of(T::BITS) {
            return Err(Error::InvalidConfig(format!(
                "window of {} bits is not a positive multiple of the {}-bit symbol",
                self.window_bits,
                T::BITS
            )));
        }
        Ok((self.window_bits / T::BITS) as usize)
    }
}

/// Product of per-level match rates with a delta-method error bar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyEstimate {
    /// `(m_bits, matches, alignments)` per level.
    pub levels: Vec<(u32, u64, u64)>,
    pub probability: f64,
    pub delta: f64,
}

/// `Π matches_i / N_i ± δ`, where `δ` propagates the binomial standard
/// error of each factor to first order.
pub fn hierarchy_probability(levels: &[(u32, u64, u64)]) -> HierarchyEstimate {
    let rates: Vec<f64> = levels
        .iter()
        .map(|&(_, c, n)| if n == 0 { 0.0 } else { c as f64 / n as f64 })
        .collect();
    let probability = rates.iter().product();
    let var: f64 = levels
        .iter()
        .enumerate()
        .map(|(i, &(_, _, n))| {
            let p = rates[i];
            let se = if n == 0 { 0.0 } else { (p * (1.0 - p) / n as f64).sqrt() };
            let others: f64 = rates
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, r)| r)
                .product();
            (se * others).powi(2)
        })
        .sum();
    HierarchyEstimate {
        levels: levels.to_vec(),
        probability,
        delta: var.sqrt(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridPatternReport {
    pub report: MatchReport,
    /// Alignments examined (`n - m + 1`, or 0).
    pub alignments: u64,
    pub empirical_probability: f64,
    pub expected_probability: f64,
    pub sigma: f64,
    pub threshold: f64,
    pub flagged: bool,
    /// Window after which the flag was first raised.
    pub flagged_at_window: Option<u64>,
    pub hierarchy: Option<HierarchyEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridOutcome {
    pub reports: Vec<HybridPatternReport>,
    pub flagged: Vec<String>,
}

struct RunningFlag {
    p0: f64,
    k_sigma: f64,
    count: u64,
    flagged_at: Option<u64>,
}

impl RunningFlag {
    fn new(bits: u32, k_sigma: f64) -> Self {
        RunningFlag {
            p0: (-(bits as f64)).exp2(),
            k_sigma,
            count: 0,
            flagged_at: None,
        }
    }

    fn sigma(&self, n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        (self.p0 * (1.0 - self.p0) / n as f64).sqrt()
    }

    fn threshold(&self, n: u64) -> f64 {
        self.p0 + self.k_sigma * self.sigma(n)
    }

    fn update(&mut self, window: u64, n: u64) {
        if self.flagged_at.is_none() && n > 0 && self.count as f64 / n as f64 > self.threshold(n) {
            self.flagged_at = Some(window);
        }
    }
}

fn scan_jump<T: Symbol>(
    text: &[T],
    p: &[T],
    pi: &PrefixTable,
    bad: &BadCharTable<T>,
    window: usize,
    flag: &mut RunningFlag,
    report: &mut MatchReport,
) {
    let n = text.len();
    let m = p.len();
    let alignments = n + 1 - m;
    let mut s = 0;
    let mut win = 0u64;
    let mut w_end = 0;
    while w_end < alignments {
        w_end = (w_end + window).min(alignments);
        while s < w_end {
            report.comparisons += 1;
            let c = text[s + m - 1];
            if c != p[m - 1] {
                s += bad.shift(c);
                continue;
            }
            report.comparisons += 1;
            if text[s].fold(p[0]) != 0 {
                s += 1;
                continue;
            }
            let mut j = 1;
            while j < m - 1 {
                report.comparisons += 1;
                if text[s + j] != p[j] {
                    break;
                }
                j += 1;
            }
            if j >= m - 1 {
                report.positions.push(s);
                flag.count += 1;
                s += m - pi[m - 1];
            } else {
                s += j - pi[j - 1];
            }
        }
        win += 1;
        flag.update(win - 1, w_end as u64);
    }
    report.windows_scanned = win;
}

fn scan_stream<T: Symbol>(
    text: &[T],
    p: &[T],
    pi: &PrefixTable,
    window: usize,
    flag: &mut RunningFlag,
    report: &mut MatchReport,
) {
    let m = p.len();
    let mut j = 0;
    let mut win = 0u64;
    for (w, chunk) in text.chunks(window).enumerate() {
        let base = w * window;
        for (off, &t) in chunk.iter().enumerate() {
            loop {
                report.comparisons += 1;
                if t.fold(p[j]) == 0 {
                    j += 1;
                    break;
                }
                if j == 0 {
                    break;
                }
                j = pi[j - 1];
            }
            if j == m {
                report.positions.push(base + off + 1 - m);
                flag.count += 1;
                j = pi[m - 1];
            }
        }
        let seen = base + chunk.len();
        win += 1;
        flag.update(win - 1, (seen + 1).saturating_sub(m) as u64);
    }
    report.windows_scanned = win;
}

/// Searches every pattern with the hybrid engine and evaluates the running
/// significance flag for each.
pub fn hybrid_search<T: Symbol>(
    text: &[T],
    patterns: &[WordPattern<T>],
    config: &HybridConfig,
) -> Result<HybridOutcome> {
    let window = config.window_symbols::<T>()?;
    let longest = patterns.iter().map(|p| p.len()).max().unwrap_or(0);
    if window < longest {
        return Err(Error::WindowTooSmall { window, longest });
    }

    let mut reports = Vec::with_capacity(patterns.len());
    for pattern in patterns {
        let p = pattern.symbols();
        let m = p.len();
        let pi = PrefixTable::from_symbols(p)?;
        let mut flag = RunningFlag::new(pattern.bits(), config.flag_threshold_sigma);
        let mut report = MatchReport::new(&pattern.id, Engine::Hybrid);

        if text.len() >= m {
            if pattern.bits() >= config.bm_switch_bits && m >= 2 {
                let bad = BadCharTable::new(p);
                scan_jump(text, p, &pi, &bad, window, &mut flag, &mut report);
            } else {
                scan_stream(text, p, &pi, window, &mut flag, &mut report);
            }
        }

        let alignments = (text.len() + 1).saturating_sub(m) as u64;
        let empirical = if alignments == 0 {
            0.0
        } else {
            report.positions.len() as f64 / alignments as f64
        };
        let hierarchy = prefix_hierarchy(text, pattern, &config.mgram_sizes)?;
        reports.push(HybridPatternReport {
            alignments,
            empirical_probability: empirical,
            expected_probability: flag.p0,
            sigma: flag.sigma(alignments),
            threshold: flag.threshold(alignments),
            flagged: flag.flagged_at.is_some(),
            flagged_at_window: flag.flagged_at,
            hierarchy,
            report,
        });
    }
    let flagged = reports
        .iter()
        .filter(|r| r.flagged)
        .map(|r| r.report.pattern_id.clone())
        .collect();
    Ok(HybridOutcome { reports, flagged })
}

/// Match rates of the pattern's leading m-grams for every configured level
/// that is a whole number of symbols and no longer than the pattern.
fn prefix_hierarchy<T: Symbol>(
    text: &[T],
    pattern: &WordPattern<T>,
    levels: &[u32],
) -> Result<Option<HierarchyEstimate>> {
    let mut rows = Vec::new();
    for &bits in levels {
        if bits % T::BITS != 0 || bits > pattern.bits() {
            continue;
        }
        let k = (bits / T::BITS) as usize;
        let prefix = WordPattern::new(&pattern.id, pattern.symbols()[..k].to_vec())?;
        let count = brute_force_search(text, &prefix).positions.len() as u64;
        rows.push((bits, count, (text.len() + 1).saturating_sub(k) as u64));
    }
    Ok((!rows.is_empty()).then(|| hierarchy_probability(&rows)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_too_small() {
        let pats = vec![WordPattern::new("long", vec![1u32; 9]).unwrap()];
        let err = hybrid_search(&[0u32; 100], &pats, &HybridConfig::default()).unwrap_err();
        assert!(matches!(err, Error::WindowTooSmall { window: 8, longest: 9 }));
    }

    #[test]
    fn window_must_align_with_symbols() {
        let cfg = HybridConfig {
            window_bits: 100,
            ..HybridConfig::default()
        };
        let pats = vec![WordPattern::new("p", vec![1u32]).unwrap()];
        assert!(hybrid_search(&[0u32; 10], &pats, &cfg).is_err());
    }

    #[test]
    fn absent_patterns_not_flagged() {
        let text: Vec<u32> = (0..1000).collect();
        let pats = vec![
            WordPattern::new("a", vec![5000u32]).unwrap(),
            WordPattern::new("b", vec![7000u32, 7001, 7002, 7003]).unwrap(),
        ];
        let out = hybrid_search(&text, &pats, &HybridConfig::default()).unwrap();
        assert!(out.flagged.is_empty());
        assert!(out.reports.iter().all(|r| r.report.positions.is_empty()));
        assert_eq!(out.reports[0].report.windows_scanned, 125);
    }

    #[test]
    fn hierarchy_product_and_delta() {
        let est = hierarchy_probability(&[(8, 50, 100), (16, 10, 100)]);
        assert!((est.probability - 0.05).abs() < 1e-15);
        let se1 = (0.5f64 * 0.5 / 100.0).sqrt();
        let se2 = (0.1f64 * 0.9 / 100.0).sqrt();
        let expect = ((se1 * 0.1).powi(2) + (se2 * 0.5).powi(2)).sqrt();
        assert!((est.delta - expect).abs() < 1e-15);
        assert_eq!(hierarchy_probability(&[(8, 0, 0)]).probability, 0.0);
    }

    #[test]
    fn byte_hierarchy_levels() {
        let text = b"abcabcabcxyz".to_vec();
        let pat = WordPattern::new("abca", b"abca".to_vec()).unwrap();
        let out = hybrid_search(&text, &[pat], &HybridConfig::default()).unwrap();
        let h = out.reports[0].hierarchy.as_ref().unwrap();
        assert_eq!(h.levels, vec![(8, 3, 12), (16, 3, 11), (32, 2, 9)]);
        assert_eq!(out.reports[0].report.positions, vec![0, 3]);
    }
}
