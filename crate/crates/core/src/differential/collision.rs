use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Delta, TrialConfig};
use crate::cipher::{init_state, permute, CipherConfig, KeyMaterial, Qrf, QrfQuad, Variant, STATE_WORDS};
use crate::rng;
use crate::word::ArxWord;
use crate::{Error, Result};

/// Trials per RNG stream. Streams are indexed by chunk, so counts do not
/// depend on the number of worker threads.
const CHUNK: u64 = 1 << 12;

const MAX_LANES: usize = 2;

/// 2⁻³², the ideal full-collision probability of a 32-bit word.
pub const IDEAL_COLLISION: f64 = 1.0 / 4_294_967_296.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundStats {
    pub rounds: u32,
    pub trials: u64,
    pub full_collisions: u64,
    pub partial_collisions: u64,
    /// `full_collisions / trials`.
    pub p_hat: f64,
    /// Binomial standard error `sqrt(p̂(1 − p̂) / trials)`.
    pub sigma: f64,
    /// `p̂ < 2⁻³² + 3σ`.
    pub passes_bound: bool,
    /// Histogram of output-difference Hamming weights, index = weight.
    pub weight_histogram: Vec<u64>,
}

impl RoundStats {
    fn from_counts(rounds: u32, trials: u64, full: u64, partial: u64, hist: Vec<u64>) -> Self {
        let p_hat = full as f64 / trials as f64;
        let sigma = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        RoundStats {
            rounds,
            trials,
            full_collisions: full,
            partial_collisions: partial,
            p_hat,
            sigma,
            passes_bound: p_hat < IDEAL_COLLISION + 3.0 * sigma,
            weight_histogram: hist,
        }
    }

    pub fn partial_rate(&self) -> f64 {
        self.partial_collisions as f64 / self.trials as f64
    }

    pub fn mean_weight(&self) -> f64 {
        let total: u64 = self.weight_histogram.iter().sum();
        let s: f64 = self
            .weight_histogram
            .iter()
            .enumerate()
            .map(|(w, &c)| w as f64 * c as f64)
            .sum();
        s / total as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionStats {
    pub delta: Vec<u32>,
    pub per_round: Vec<RoundStats>,
}

impl CollisionStats {
    pub fn at(&self, rounds: u32) -> Option<&RoundStats> {
        self.per_round.iter().find(|r| r.rounds == rounds)
    }
}

/// Per-chunk accumulator: for each recorded round, (full, partial, hist).
struct Acc {
    full: Vec<u64>,
    partial: Vec<u64>,
    hist: Vec<Vec<u64>>,
}

impl Acc {
    fn new(n_rounds: usize, max_weight: usize) -> Self {
        Acc {
            full: vec![0; n_rounds],
            partial: vec![0; n_rounds],
            hist: vec![vec![0; max_weight + 1]; n_rounds],
        }
    }

    fn record(&mut self, slot: usize, weight: u32, threshold: u32) {
        if weight == 0 {
            self.full[slot] += 1;
        } else if weight <= threshold {
            self.partial[slot] += 1;
        }
        self.hist[slot][weight as usize] += 1;
    }

    fn merge(mut self, other: Acc) -> Acc {
        for i in 0..self.full.len() {
            self.full[i] += other.full[i];
            self.partial[i] += other.partial[i];
            for (a, b) in self.hist[i].iter_mut().zip(&other.hist[i]) {
                *a += b;
            }
        }
        self
    }

    fn finish(self, rounds: &[u32], trials: u64, delta: Vec<u32>) -> CollisionStats {
        let per_round = rounds
            .iter()
            .zip(self.full)
            .zip(self.partial)
            .zip(self.hist)
            .map(|(((&r, f), p), h)| RoundStats::from_counts(r, trials, f, p, h))
            .collect();
        CollisionStats { delta, per_round }
    }
}

fn run_chunks<F>(cfg: &TrialConfig, max_weight: usize, body: F) -> Acc
where
    F: Fn(&mut rand_chacha::ChaCha20Rng, &mut Acc, &[u32]) + Sync,
{
    let rounds = cfg.sorted_rounds();
    let n_chunks = cfg.trials.div_ceil(CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = rng::stream(cfg.rng_seed, chunk);
            let mut acc = Acc::new(rounds.len(), max_weight);
            let n = CHUNK.min(cfg.trials - chunk * CHUNK);
            for _ in 0..n {
                body(&mut rng, &mut acc, &rounds);
            }
            acc
        })
        .reduce(|| Acc::new(rounds.len(), max_weight), Acc::merge)
}

/// Paired-evaluation trials on one or more independent quarter-round lanes.
///
/// `delta` holds `4·L` words for `L` lanes; a trial draws a random input of
/// the same width and applies `qrf` to each lane. Generic over the word
/// type so the 8-bit reduced model runs through the same code.
pub fn collision_trials<W: ArxWord>(qrf: &Qrf, delta: &[W], cfg: &TrialConfig) -> Result<CollisionStats> {
    cfg.validate()?;
    if delta.is_empty() || !delta.len().is_multiple_of(4) || delta.len() > 4 * MAX_LANES {
        return Err(Error::WordCount {
            expected: 4,
            got: delta.len(),
        });
    }
    let lanes: Vec<QrfQuad<W>> = delta.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]].into()).collect();
    let max_weight = delta.len() * W::BITS as usize;
    let threshold = cfg.partial_threshold;
    let acc = run_chunks(cfg, max_weight, |rng, acc, rounds| {
        let mut buf = [QrfQuad::<W>::default(); 2 * MAX_LANES];
        let (x, x2) = buf.split_at_mut(MAX_LANES);
        let (x, x2) = (&mut x[..lanes.len()], &mut x2[..lanes.len()]);
        for (i, d) in lanes.iter().enumerate() {
            let q: QrfQuad<W> = [
                W::truncate(rng.next_u64()),
                W::truncate(rng.next_u64()),
                W::truncate(rng.next_u64()),
                W::truncate(rng.next_u64()),
            ]
            .into();
            x[i] = q;
            x2[i] = q.xor(*d);
        }
        let mut done = 0;
        for (slot, &r) in rounds.iter().enumerate() {
            for _ in done..r {
                for (a, b) in x.iter_mut().zip(x2.iter_mut()) {
                    *a = qrf.apply(*a);
                    *b = qrf.apply(*b);
                }
            }
            done = r;
            let w: u32 = x.iter().zip(x2.iter()).map(|(a, b)| a.xor(*b).weight()).sum();
            acc.record(slot, w, threshold);
        }
    });
    let delta_words = delta.iter().map(|&w| widen(w)).collect();
    Ok(acc.finish(&cfg.sorted_rounds(), cfg.trials, delta_words))
}

fn widen<W: ArxWord>(w: W) -> u32 {
    (0..W::BITS).filter(|&i| w.bit(i)).fold(0, |acc, i| acc | 1 << i)
}

/// [`collision_trials`] with the EChaCha20 quarter-round.
pub fn collision_trial_batch(delta: &Delta, cfg: &TrialConfig) -> Result<CollisionStats> {
    collision_trials(&Qrf::echacha(), &delta.words, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyMode {
    /// One key for all trials, fresh random nonce per trial.
    Fixed,
    /// Fresh random key and nonce per trial.
    Variable,
}

/// Full-state trials: the 8-word difference is applied to the key words of
/// the initial state and both states are permuted for each recorded round
/// count (no feed-forward). Collisions are judged on all 36 words.
pub fn full_state_trials(
    delta: &Delta,
    mode: KeyMode,
    cfg: &TrialConfig,
    cipher: &CipherConfig,
) -> Result<CollisionStats> {
    cfg.validate()?;
    if cipher.variant != Variant::EChaCha20 {
        return Err(Error::InvalidConfig("full-state trials need the EChaCha20 variant".into()));
    }
    let wide = delta.widened();
    let mut fixed_key = [0u32; 8];
    let mut key_rng = rng::stream(cfg.rng_seed, u64::MAX);
    fixed_key.iter_mut().for_each(|k| *k = key_rng.next_u32());
    let threshold = cfg.partial_threshold;
    let schedule = cipher.schedule;
    let qrf = cipher.qrf;
    let acc = run_chunks(cfg, STATE_WORDS * 32, |rng, acc, rounds| {
        let key = match mode {
            KeyMode::Fixed => fixed_key,
            KeyMode::Variable => std::array::from_fn(|_| rng.next_u32()),
        };
        let nonce = std::array::from_fn(|_| rng.next_u32());
        let km = KeyMaterial::new(key, nonce, [0; 4]);
        let x = *init_state(&km, cipher).expect("128-bit nonce").words();
        let mut x2 = x;
        for (w, d) in x2[4..12].iter_mut().zip(&wide.words) {
            *w ^= d;
        }
        for (slot, &r) in rounds.iter().enumerate() {
            // Each round count is permuted from the start so the
            // column/diagonal alternation stays aligned.
            let mut a = x;
            let mut b = x2;
            permute(&mut a, r, schedule, &qrf);
            permute(&mut b, r, schedule, &qrf);
            let w: u32 = a.iter().zip(&b).map(|(p, q)| (p ^ q).count_ones()).sum();
            acc.record(slot, w, threshold);
        }
    });
    Ok(acc.finish(&cfg.sorted_rounds(), cfg.trials, wide.words))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(rounds: Vec<u32>) -> TrialConfig {
        TrialConfig {
            trials: 1 << 12,
            rounds,
            ..TrialConfig::default()
        }
    }

    #[test]
    fn zero_delta_always_collides() {
        let s = collision_trial_batch(&Delta::zero(), &small(vec![1, 2, 4, 8])).unwrap();
        for r in &s.per_round {
            assert_eq!(r.full_collisions, r.trials);
            assert_eq!(r.p_hat, 1.0);
            assert_eq!(r.sigma, 0.0);
        }
    }

    #[test]
    fn reproducible_and_histograms_sum() {
        let cfg = small(vec![2, 1]);
        let a = collision_trial_batch(&Delta::single_bit(3), &cfg).unwrap();
        let b = collision_trial_batch(&Delta::single_bit(3), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_round[0].rounds, 1);
        for r in &a.per_round {
            assert_eq!(r.weight_histogram.iter().sum::<u64>(), cfg.trials);
            assert_eq!(r.weight_histogram.len(), 129);
        }
    }

    #[test]
    fn bound_is_literal() {
        let r = RoundStats::from_counts(4, 1 << 20, 0, 0, vec![0; 129]);
        assert!(r.passes_bound);
        let r = RoundStats::from_counts(4, 1 << 20, 5, 0, vec![0; 129]);
        // p̂ ≈ 4.77e-6, σ ≈ 2.13e-6 → 3σ ≈ 6.4e-6
        assert!(r.passes_bound);
        let r = RoundStats::from_counts(4, 1 << 20, 50, 0, vec![0; 129]);
        assert!(!r.passes_bound);
    }

    #[test]
    fn lanes_and_word_count() {
        let cfg = small(vec![1]);
        let d8 = Delta::single_bit(0).widened();
        let s = collision_trial_batch(&d8, &cfg).unwrap();
        assert_eq!(s.per_round[0].weight_histogram.len(), 257);
        assert!(collision_trials(&Qrf::echacha(), &[1u32, 0, 0], &cfg).is_err());
    }

    #[test]
    fn full_state_modes_run() {
        let cfg = small(vec![1, 2]);
        let cipher = CipherConfig::default();
        let d = Delta::single_bit(0);
        let f = full_state_trials(&d, KeyMode::Fixed, &cfg, &cipher).unwrap();
        let v = full_state_trials(&d, KeyMode::Variable, &cfg, &cipher).unwrap();
        assert_eq!(f.per_round.len(), 2);
        assert_eq!(v.delta.len(), 8);
        let z = full_state_trials(&Delta::zero(), KeyMode::Variable, &cfg, &cipher).unwrap();
        assert!(z.per_round.iter().all(|r| r.p_hat == 1.0));
    }
}
