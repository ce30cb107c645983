use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{collision_trials, CollisionStats, Delta, TrialConfig};
use crate::cipher::{Qrf, QrfQuad, QrfVariant};
use crate::rng;
use crate::{Error, Result};

const QUAD_BITS: usize = 128;
const CHUNK: u64 = 1 << 10;
pub const MIN_AVALANCHE_TRIALS: u64 = 10_000;

/// Per-bit flip probabilities after `rounds` quarter-rounds.
///
/// `matrix[i][j]` is the probability that output bit `j` flips when input
/// bit `i` is flipped (bits numbered `a0..a31, b0.., c0.., d0..d31`).
/// `flip_probability[w][p]` averages column `32·w + p` over all inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvalancheProfile {
    pub rounds: u32,
    /// Random base inputs; each contributes one evaluation per input bit.
    pub trials: u64,
    pub flip_probability: Vec<Vec<f64>>,
    pub matrix: Vec<Vec<f64>>,
    /// Mean and standard deviation of the number of output bits flipped
    /// per single-bit input flip.
    pub mean_flipped_bits: f64,
    pub flipped_bits_std: f64,
}

impl AvalancheProfile {
    /// Mean flip probability of each output word a, b, c, d.
    pub fn word_means(&self) -> [f64; 4] {
        std::array::from_fn(|w| self.flip_probability[w].iter().sum::<f64>() / 32.0)
    }

    /// Number of single-bit flips measured.
    pub fn samples(&self) -> u64 {
        self.trials * QUAD_BITS as u64
    }
}

struct Counts {
    flips: Vec<u64>,
    sum: u64,
    sum_sq: u64,
}

impl Counts {
    fn new() -> Self {
        Counts {
            flips: vec![0; QUAD_BITS * QUAD_BITS],
            sum: 0,
            sum_sq: 0,
        }
    }

    fn merge(mut self, o: Counts) -> Counts {
        self.flips.iter_mut().zip(&o.flips).for_each(|(a, b)| *a += b);
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self
    }
}

fn random_quad(rng: &mut impl RngCore) -> QrfQuad {
    QrfQuad::new(rng.next_u32(), rng.next_u32(), rng.next_u32(), rng.next_u32())
}

pub fn avalanche_profile(qrf: &Qrf, rounds: u32, trials: u64, seed: u64) -> Result<AvalancheProfile> {
    if trials < MIN_AVALANCHE_TRIALS {
        return Err(Error::InvalidTrials(format!(
            "avalanche needs at least {MIN_AVALANCHE_TRIALS} trials, got {trials}"
        )));
    }
    let r = rounds as usize;
    let counts = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut rng = rng::stream(seed, chunk);
            let mut c = Counts::new();
            for _ in 0..CHUNK.min(trials - chunk * CHUNK) {
                let x = random_quad(&mut rng);
                let y = qrf.apply_rounds(x, r);
                for i in 0..QUAD_BITS {
                    let diff = y.xor(qrf.apply_rounds(x.flip_bit(i as u32), r));
                    let row = &mut c.flips[i * QUAD_BITS..(i + 1) * QUAD_BITS];
                    for (w, mut bits) in diff.to_array().into_iter().enumerate() {
                        while bits != 0 {
                            row[32 * w + bits.trailing_zeros() as usize] += 1;
                            bits &= bits - 1;
                        }
                    }
                    let hw = diff.weight() as u64;
                    c.sum += hw;
                    c.sum_sq += hw * hw;
                }
            }
            c
        })
        .reduce(Counts::new, Counts::merge);

    let t = trials as f64;
    let matrix: Vec<Vec<f64>> = counts
        .flips
        .chunks_exact(QUAD_BITS)
        .map(|row| row.iter().map(|&n| n as f64 / t).collect())
        .collect();
    let flip_probability = (0..4)
        .map(|w| {
            (0..32)
                .map(|p| matrix.iter().map(|row| row[32 * w + p]).sum::<f64>() / QUAD_BITS as f64)
                .collect()
        })
        .collect();
    let n = t * QUAD_BITS as f64;
    let mean = counts.sum as f64 / n;
    let var = (counts.sum_sq as f64 / n - mean * mean).max(0.0);
    Ok(AvalancheProfile {
        rounds,
        trials,
        flip_probability,
        matrix,
        mean_flipped_bits: mean,
        flipped_bits_std: var.sqrt(),
    })
}

/// Output differences `QR-F^r(x) ^ QR-F^r(x ^ Δ)` for `r = 1..=max_rounds`.
pub fn propagation_track(qrf: &Qrf, delta: QrfQuad, x: QrfQuad, max_rounds: u32) -> Result<Vec<QrfQuad>> {
    if max_rounds == 0 {
        return Err(Error::InvalidTrials("max_rounds must be at least 1".into()));
    }
    let mut y = x;
    let mut y2 = x.xor(delta);
    Ok((0..max_rounds)
        .map(|_| {
            y = qrf.apply(y);
            y2 = qrf.apply(y2);
            y.xor(y2)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationSummary {
    pub delta: [u32; 4],
    pub samples: u64,
    /// Mean Hamming weight of the round-r difference, `r = 1..=max_rounds`.
    pub mean_weight: Vec<f64>,
    /// Per-round weight histograms (index = weight, 0..=128).
    pub histograms: Vec<Vec<u64>>,
}

/// [`propagation_track`] over `samples` random inputs.
pub fn propagation_summary(
    qrf: &Qrf,
    delta: QrfQuad,
    samples: u64,
    max_rounds: u32,
    seed: u64,
) -> Result<PropagationSummary> {
    if samples == 0 {
        return Err(Error::InvalidTrials("zero samples".into()));
    }
    let mr = max_rounds as usize;
    let empty = || vec![vec![0u64; QUAD_BITS + 1]; mr];
    let histograms = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| -> Result<Vec<Vec<u64>>> {
            let mut rng = rng::stream(seed, chunk);
            let mut h = empty();
            for _ in 0..CHUNK.min(samples - chunk * CHUNK) {
                let x = random_quad(&mut rng);
                for (r, d) in propagation_track(qrf, delta, x, max_rounds)?.iter().enumerate() {
                    h[r][d.weight() as usize] += 1;
                }
            }
            Ok(h)
        })
        .try_reduce(empty, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(&b) {
                ra.iter_mut().zip(rb).for_each(|(x, y)| *x += y);
            }
            Ok(a)
        })?;
    let mean_weight = histograms
        .iter()
        .map(|h| h.iter().enumerate().map(|(w, &c)| w as f64 * c as f64).sum::<f64>() / samples as f64)
        .collect();
    Ok(PropagationSummary {
        delta: delta.to_array(),
        samples,
        mean_weight,
        histograms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rotations: [u32; 6],
    pub collisions: CollisionStats,
    pub mean_flipped_bits: f64,
    pub flipped_bits_std: f64,
    pub avalanche_samples: u64,
}

/// Collision statistics and avalanche mean for each rotation set, all with
/// the same seeds.
pub fn rotation_sweep(
    sets: &[[u32; 6]],
    delta: &Delta,
    cfg: &TrialConfig,
    avalanche_rounds: u32,
    avalanche_trials: u64,
) -> Result<Vec<SweepResult>> {
    let qrfs = sets
        .iter()
        .map(|&s| Qrf::with_rotations(QrfVariant::PaperOrder, s))
        .collect::<Result<Vec<_>>>()?;
    qrfs.iter()
        .map(|q| {
            let collisions = collision_trials(q, &delta.words, cfg)?;
            let av = avalanche_profile(q, avalanche_rounds, avalanche_trials, cfg.rng_seed)?;
            Ok(SweepResult {
                rotations: q.rotations,
                collisions,
                mean_flipped_bits: av.mean_flipped_bits,
                flipped_bits_std: av.flipped_bits_std,
                avalanche_samples: av.samples(),
            })
        })
        .collect()
}

/// Alternative constant sets swept alongside the EChaCha20 constants.
pub const SWEEP_SETS: [[u32; 6]; 3] = [[16, 12, 8, 7, 4, 2], [7, 9, 13, 18, 4, 2], [12, 16, 7, 8, 2, 4]];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rounds_is_identity_indicator() {
        let p = avalanche_profile(&Qrf::echacha(), 0, MIN_AVALANCHE_TRIALS, 1).unwrap();
        for (i, row) in p.matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, if i == j { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(p.mean_flipped_bits, 1.0);
        assert_eq!(p.flipped_bits_std, 0.0);
    }

    #[test]
    fn bounds_and_trial_floor() {
        let p = avalanche_profile(&Qrf::echacha(), 1, MIN_AVALANCHE_TRIALS, 2).unwrap();
        assert!(p.matrix.iter().flatten().all(|&v| (0.0..=1.0).contains(&v)));
        assert_eq!(p.flip_probability.len(), 4);
        assert!(p.flip_probability.iter().all(|w| w.len() == 32));
        assert!(avalanche_profile(&Qrf::echacha(), 1, 9_999, 2).is_err());
    }

    #[test]
    fn track_prefix_and_zero() {
        let q = Qrf::echacha();
        let x = QrfQuad::new(1, 2, 3, 4);
        let d = QrfQuad::new(0x80, 0, 0, 0);
        let t2 = propagation_track(&q, d, x, 2).unwrap();
        let t4 = propagation_track(&q, d, x, 4).unwrap();
        assert_eq!(&t4[..2], &t2[..]);
        let z = propagation_track(&q, QrfQuad::default(), x, 3).unwrap();
        assert!(z.iter().all(|d| d.is_zero()));
        assert!(propagation_track(&q, d, x, 0).is_err());
    }

    #[test]
    fn sweep_rejects_bad_rotation() {
        let cfg = TrialConfig {
            trials: 1 << 10,
            rounds: vec![1],
            ..TrialConfig::default()
        };
        let bad = [[16, 12, 8, 7, 4, 0]];
        assert!(rotation_sweep(&bad, &Delta::single_bit(0), &cfg, 1, MIN_AVALANCHE_TRIALS).is_err());
    }
}
