//! Rotational-differential harness over the quarter-round.
//!
//! Differences are seeded from keystream patterns, pushed through paired
//! evaluations `y = QR-F^r(x)`, `y' = QR-F^r(x ^ Δ)`, and the output
//! difference `y ^ y'` is classified as a full collision (zero), a partial
//! collision (Hamming weight 1..=threshold) or neither.

mod avalanche;
mod collision;
mod distinguisher;

use serde::{Deserialize, Serialize};

use crate::cipher::SIGMA;
use crate::rng::DEFAULT_SEED;
use crate::{Error, Result};

pub use avalanche::{
    avalanche_profile, propagation_summary, propagation_track, rotation_sweep, AvalancheProfile,
    PropagationSummary, SweepResult, MIN_AVALANCHE_TRIALS, SWEEP_SETS,
};
pub use collision::{
    collision_trial_batch, collision_trials, full_state_trials, CollisionStats, KeyMode, RoundStats,
    IDEAL_COLLISION,
};
pub use distinguisher::{distinguisher_advantage, wilson_interval, AdvantageEstimate};

/// An input difference of 4 words (one quad) or 8 words (two quads).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Delta {
    pub words: Vec<u32>,
}

impl Delta {
    pub fn new(words: Vec<u32>) -> Result<Self> {
        if words.len() != 4 && words.len() != 8 {
            return Err(Error::WordCount {
                expected: 4,
                got: words.len(),
            });
        }
        Ok(Delta { words })
    }

    pub fn zero() -> Self {
        Delta { words: vec![0; 4] }
    }

    /// Single flipped bit `bit` of word `a`.
    pub fn single_bit(bit: u32) -> Self {
        Delta {
            words: vec![1 << (bit % 32), 0, 0, 0],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Widened to 8 words by repeating the 4-word form.
    pub fn widened(&self) -> Delta {
        let words = (0..8).map(|i| self.words[i % self.words.len()]).collect();
        Delta { words }
    }

    pub fn hex(&self) -> String {
        self.words
            .iter()
            .map(|w| format!("{w:08x}"))
            .collect::<Vec<_>>()
            .join(":")
    }
}

/// `rotl(p, k) ^ rotl(p << k, k)` for one pattern word: both operands are
/// rotated left by `k`, and `<< k` is a plain (non-rotating) shift.
pub fn rot_delta_word(p: u32, k: u32) -> Result<u32> {
    if k >= 32 {
        return Err(Error::ShiftOutOfRange(k));
    }
    Ok(p.rotate_left(k) ^ (p << k).rotate_left(k))
}

/// 4-word difference from the first pattern words, cycling the pattern
/// when it is shorter than four words.
pub fn seed_delta(pattern: &[u32], k: u32) -> Result<Delta> {
    seed_delta_words(pattern, k, 4)
}

/// 8-word (256-bit) variant of [`seed_delta`].
pub fn seed_delta_wide(pattern: &[u32], k: u32) -> Result<Delta> {
    seed_delta_words(pattern, k, 8)
}

fn seed_delta_words(pattern: &[u32], k: u32, n: usize) -> Result<Delta> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let words = (0..n)
        .map(|i| rot_delta_word(pattern[i % pattern.len()], k))
        .collect::<Result<_>>()?;
    Ok(Delta { words })
}

/// Differences used when no pattern seeds are supplied: single-bit flips
/// in each word, plus σ-seeded and low-weight-pattern rotational
/// differences.
pub fn default_delta_set() -> Vec<Delta> {
    let mut out = vec![
        Delta::single_bit(0),
        Delta::new(vec![0, 1 << 31, 0, 0]).unwrap(),
        Delta::new(vec![0, 0, 1 << 7, 0]).unwrap(),
        Delta::new(vec![0, 0, 0, 1 << 16]).unwrap(),
    ];
    for k in [1, 8, 16] {
        out.push(seed_delta(&SIGMA, k).unwrap());
    }
    out.push(seed_delta(&[1], 1).unwrap());
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: u64,
    /// Round counts at which statistics are recorded.
    pub rounds: Vec<u32>,
    /// Largest nonzero output-difference weight counted as a partial
    /// collision.
    pub partial_threshold: u32,
    pub rng_seed: u64,
}

pub const MIN_TRIALS: u64 = 1 << 10;

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 1 << 20,
            rounds: vec![1, 2, 4, 8],
            partial_threshold: 4,
            rng_seed: DEFAULT_SEED,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::InvalidTrials(format!(
                "at least {MIN_TRIALS} trials required, got {}",
                self.trials
            )));
        }
        if self.rounds.is_empty() {
            return Err(Error::InvalidTrials("round set is empty".into()));
        }
        if self.rounds.iter().any(|&r| r == 0 || r > 64) {
            return Err(Error::InvalidTrials(format!(
                "round counts must lie in 1..=64, got {:?}",
                self.rounds
            )));
        }
        let mut sorted = self.rounds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.rounds.len() {
            return Err(Error::InvalidTrials(format!("duplicate round counts in {:?}", self.rounds)));
        }
        Ok(())
    }

    pub(crate) fn sorted_rounds(&self) -> Vec<u32> {
        let mut r = self.rounds.clone();
        r.sort_unstable();
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rot_delta_hand_values() {
        // rotl(1,1) = 2; 1 << 1 = 2; rotl(2,1) = 4; 2 ^ 4 = 6
        assert_eq!(rot_delta_word(1, 1).unwrap(), 6);
        // top bit: rotl(0x80000000,1) = 1; shift drops it -> 0
        assert_eq!(rot_delta_word(0x8000_0000, 1).unwrap(), 1);
        assert_eq!(rot_delta_word(0xdead_beef, 0).unwrap(), 0);
        assert_eq!(rot_delta_word(0, 17).unwrap(), 0);
        assert!(matches!(rot_delta_word(1, 32), Err(Error::ShiftOutOfRange(32))));
    }

    #[test]
    fn seeding_cycles_pattern() {
        let d = seed_delta(&[1], 1).unwrap();
        assert_eq!(d.words, vec![6; 4]);
        let d = seed_delta_wide(&[1, 0], 1).unwrap();
        assert_eq!(d.words, vec![6, 0, 6, 0, 6, 0, 6, 0]);
        assert!(seed_delta(&SIGMA, 0).unwrap().is_zero());
        assert!(seed_delta(&[], 3).is_err());
    }

    #[test]
    fn default_set_is_nonzero() {
        let set = default_delta_set();
        assert!(set.len() >= 4);
        assert!(set.iter().all(|d| !d.is_zero()));
    }

    #[test]
    fn trial_config_validation() {
        TrialConfig::default().validate().unwrap();
        let small = TrialConfig {
            trials: 1000,
            ..TrialConfig::default()
        };
        assert!(small.validate().is_err());
        for rounds in [vec![], vec![0], vec![2, 2]] {
            let cfg = TrialConfig {
                rounds,
                ..TrialConfig::default()
            };
            assert!(cfg.validate().is_err());
        }
    }
}
