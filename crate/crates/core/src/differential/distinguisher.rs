use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// z for a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageEstimate {
    /// `|Pr[D(K)=1] − Pr[D(R)=1]|`.
    pub adv: f64,
    pub p_cipher: f64,
    pub p_random: f64,
    /// Samples drawn from each stream.
    pub samples: u64,
    /// 95% interval for the signed difference `p_cipher − p_random`
    /// (Newcombe's hybrid Wilson score method).
    pub confidence_interval: (f64, f64),
}

impl AdvantageEstimate {
    pub fn ci_contains_zero(&self) -> bool {
        self.confidence_interval.0 <= 0.0 && 0.0 <= self.confidence_interval.1
    }
}

/// Wilson score interval for `successes / n`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Splits both streams into `samples` equal slices, runs `detector` on
/// each, and compares acceptance rates.
pub fn distinguisher_advantage<D>(detector: D, cipher: &[u8], random: &[u8], samples: usize) -> Result<AdvantageEstimate>
where
    D: Fn(&[u8]) -> bool + Sync,
{
    if samples == 0 {
        return Err(Error::Degenerate("zero samples"));
    }
    if cipher.len() != random.len() {
        return Err(Error::InvalidConfig(format!(
            "streams differ in length: {} vs {}",
            cipher.len(),
            random.len()
        )));
    }
    let len = cipher.len() / samples;
    if len == 0 {
        return Err(Error::Undersized {
            needed: samples,
            got: cipher.len(),
        });
    }
    let accept = |s: &[u8]| -> u64 { s.par_chunks_exact(len).filter(|c| detector(c)).count() as u64 };
    let (k1, k2) = (accept(&cipher[..len * samples]), accept(&random[..len * samples]));
    let n = samples as u64;
    let (p1, p2) = (k1 as f64 / n as f64, k2 as f64 / n as f64);
    let (l1, u1) = wilson_interval(k1, n, Z95);
    let (l2, u2) = wilson_interval(k2, n, Z95);
    let d = p1 - p2;
    let lo = d - ((p1 - l1).powi(2) + (u2 - p2).powi(2)).sqrt();
    let hi = d + ((u1 - p1).powi(2) + (p2 - l2).powi(2)).sqrt();
    Ok(AdvantageEstimate {
        adv: d.abs(),
        p_cipher: p1,
        p_random: p2,
        samples: n,
        confidence_interval: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::baseline_bytes;

    #[test]
    fn always_true_has_zero_advantage() {
        let a = baseline_bytes(1, 0, 1000);
        let b = baseline_bytes(1, 1, 1000);
        let est = distinguisher_advantage(|_| true, &a, &b, 10).unwrap();
        assert_eq!(est.adv, 0.0);
        assert!(est.ci_contains_zero());
    }

    #[test]
    fn null_case_on_one_generator() {
        let a = baseline_bytes(2, 0, 64_000);
        let b = baseline_bytes(2, 1, 64_000);
        let est = distinguisher_advantage(|s| s[0] & 1 == 1, &a, &b, 1000).unwrap();
        assert!(est.ci_contains_zero(), "{est:?}");
        assert!((0.0..=1.0).contains(&est.adv));
    }

    #[test]
    fn perfect_detector() {
        let a = vec![1u8; 100];
        let b = vec![0u8; 100];
        let est = distinguisher_advantage(|s| s[0] == 1, &a, &b, 100).unwrap();
        assert_eq!(est.adv, 1.0);
        assert!(!est.ci_contains_zero());
    }

    #[test]
    fn wilson_known_value() {
        // 0 of 10 at 95%: upper bound z²/(n+z²) = 0.2775...
        let (lo, hi) = wilson_interval(0, 10, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.27753).abs() < 1e-4);
    }

    #[test]
    fn errors() {
        assert!(distinguisher_advantage(|_| true, &[0; 4], &[0; 4], 0).is_err());
        assert!(distinguisher_advantage(|_| true, &[0; 4], &[0; 5], 1).is_err());
        assert!(distinguisher_advantage(|_| true, &[0; 4], &[0; 4], 5).is_err());
    }
}
