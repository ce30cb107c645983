//! Acceptance checks for the workbench. Each function runs one criterion at
//! full scale and returns whether it held plus a line of measured values;
//! `tests/acceptance.rs` drives them.

use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use echacha_sbc::cipher::{Qrf, QrfQuad};
use echacha_sbc::dataset::{generate_dataset, Dataset, DatasetConfig, DatasetMode};
use echacha_sbc::differential::{
    avalanche_profile, collision_trial_batch, default_delta_set, distinguisher_advantage,
    rotation_sweep, CollisionStats, Delta, TrialConfig, IDEAL_COLLISION, SWEEP_SETS,
};
use echacha_sbc::freq::{chi_square, extract_mgrams, significant_patterns, MGramSpec, SignificanceConfig};
use echacha_sbc::rng;
use echacha_sbc::search::{search, Engine, Symbol, WordPattern};

pub const SEED: u64 = 0x5eed_acce_0000_0001;
pub const RERUN_SEED: u64 = 0x5eed_acce_0000_0002;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

pub fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

pub fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

pub fn within(limit_s: f64, took: Duration) -> bool {
    took.as_secs_f64() < limit_s
}

// 1 ------------------------------------------------------------------------

pub fn qrf_bijection() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);
    let mut bad = 0;
    for q in [Qrf::echacha(), Qrf::rfc_style()] {
        for _ in 0..10_000 {
            let x = QrfQuad::new(rng.next_u32(), rng.next_u32(), rng.next_u32(), rng.next_u32());
            if q.invert(q.apply(x)) != x {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{bad} mismatches over 10^4 quads per variant"))
}

// 2 + 3 --------------------------------------------------------------------

#[derive(Default)]
pub struct OracleTally {
    pub instances: usize,
    pub mismatches: usize,
    pub kmp_over_bound: usize,
    pub matches_seen: usize,
}

/// Text up to 10^4 symbols over a randomly sized alphabet, pattern up to 16
/// symbols; half the instances plant the pattern a few times.
pub fn random_instance<T: Symbol>(rng: &mut ChaCha20Rng, sym: &dyn Fn(&mut ChaCha20Rng, u32) -> T) -> (Vec<T>, Vec<T>) {
    let alphabet = [2u32, 4, 16, 256, u32::MAX][rng.random_range(0..5)];
    let n = rng.random_range(0..=10_000usize);
    let m = rng.random_range(1..=16usize);
    let mut text: Vec<T> = (0..n).map(|_| sym(rng, alphabet)).collect();
    let pat: Vec<T> = (0..m).map(|_| sym(rng, alphabet)).collect();
    if rng.random_bool(0.5) && n >= m {
        for _ in 0..rng.random_range(1..=5) {
            let at = rng.random_range(0..=n - m);
            text[at..at + m].copy_from_slice(&pat);
        }
    }
    (text, pat)
}

pub fn check_instance<T: Symbol>(text: &[T], pat: Vec<T>, t: &mut OracleTally) {
    let p = WordPattern::new("p", pat).expect("non-empty pattern");
    let truth = search(Engine::BruteForce, text, &p).expect("brute force").positions;
    for e in [Engine::Kmp, Engine::BoyerMoore, Engine::Hybrid] {
        let r = search(e, text, &p).expect("engine");
        if r.positions != truth {
            t.mismatches += 1;
        }
        if e == Engine::Kmp && r.comparisons > 2 * text.len() as u64 {
            t.kmp_over_bound += 1;
        }
    }
    t.instances += 1;
    t.matches_seen += truth.len();
}

pub fn oracle_instances() -> (OracleTally, OracleTally) {
    let mut rng = ChaCha20Rng::seed_from_u64(SEED ^ 2);
    let (mut bytes, mut words) = (OracleTally::default(), OracleTally::default());
    let byte_sym = |r: &mut ChaCha20Rng, a: u32| r.random_range(0..a.min(256)) as u8;
    let word_sym = |r: &mut ChaCha20Rng, a: u32| if a == u32::MAX { r.next_u32() } else { r.random_range(0..a) };
    for _ in 0..1000 {
        let (text, pat) = random_instance(&mut rng, &byte_sym);
        check_instance(&text, pat, &mut bytes);
        let (text, pat) = random_instance(&mut rng, &word_sym);
        check_instance(&text, pat, &mut words);
    }
    (bytes, words)
}

// 4 ------------------------------------------------------------------------

pub fn frequency_nulls_once(seed: u64) -> (bool, String) {
    let ds = generate_dataset(&DatasetConfig {
        mode: DatasetMode::VariableKey,
        n_blocks: 100_000,
        rng_seed: seed,
        ..DatasetConfig::default()
    })
    .expect("dataset");
    let table = extract_mgrams(&ds.keystream_bytes(), &MGramSpec::new(32).unwrap()).unwrap();
    let cfg = SignificanceConfig::default();
    let flagged = significant_patterns(&table, &cfg).unwrap();
    let max = table.sorted().first().map_or(0, |&(_, c)| c);
    let chi = chi_square(&table, &cfg).unwrap();
    (
        flagged.is_empty(),
        format!(
            "seed {seed:#x}: {} of {} observed patterns have z > {} (N = {}, max count {max}); \
             folded chi2 = {:.1} vs critical {:.1} ({})",
            flagged.len(),
            table.distinct(),
            cfg.z_threshold,
            table.total,
            chi.statistic,
            chi.critical,
            if chi.pass { "uniform" } else { "rejects" },
        ),
    )
}

pub fn frequency_nulls() -> Outcome {
    let (ok, first) = frequency_nulls_once(SEED);
    if ok {
        return outcome(true, first);
    }
    let (ok2, second) = frequency_nulls_once(RERUN_SEED);
    outcome(ok2, format!("{first}; rerun {second}"))
}

// 5 + 6 --------------------------------------------------------------------

pub struct DecayRun {
    pub stats: Vec<CollisionStats>,
    pub trials: u64,
}

pub fn decay_run() -> DecayRun {
    let cfg = TrialConfig {
        trials: 1 << 20,
        rounds: vec![1, 2, 4, 8],
        rng_seed: SEED,
        ..TrialConfig::default()
    };
    let stats = default_delta_set()
        .iter()
        .map(|d| collision_trial_batch(d, &cfg).expect("trials"))
        .collect();
    DecayRun {
        stats,
        trials: cfg.trials,
    }
}

pub fn pooled_full(run: &DecayRun, r: u32) -> (u64, f64) {
    let full: u64 = run.stats.iter().map(|s| s.at(r).unwrap().full_collisions).sum();
    (full, full as f64 / (run.trials * run.stats.len() as u64) as f64)
}

pub fn differential_decay(run: &DecayRun) -> Outcome {
    let (f1, p1) = pooled_full(run, 1);
    let (f2, p2) = pooled_full(run, 2);
    let (f4, _) = pooled_full(run, 4);
    let (f8, _) = pooled_full(run, 8);
    let partial: Vec<String> = [1, 2, 4, 8]
        .iter()
        .map(|&r| {
            let n: u64 = run.stats.iter().map(|s| s.at(r).unwrap().partial_collisions).sum();
            format!("r{r}={n}")
        })
        .collect();
    outcome(
        p1 > p2 && f4 == 0 && f8 == 0,
        format!(
            "{} deltas x 2^20: full collisions r1={f1} ({p1:.3e}) r2={f2} ({p2:.3e}) r4={f4} r8={f8}; \
             partial {}",
            run.stats.len(),
            partial.join(" ")
        ),
    )
}

pub fn security_bound(run: &DecayRun) -> Outcome {
    let mut checked = 0;
    let mut failing = Vec::new();
    for s in &run.stats {
        for r in s.per_round.iter().filter(|r| r.rounds >= 4) {
            checked += 1;
            if !r.passes_bound {
                failing.push(format!("Δ={} r={}", hex::encode(s.delta.iter().flat_map(|w| w.to_be_bytes()).collect::<Vec<u8>>()), r.rounds));
            }
        }
    }
    outcome(
        failing.is_empty(),
        format!(
            "{checked} (Δ, rounds≥4) cells, bound 2^-32 = {IDEAL_COLLISION:.3e} + 3σ; failing: [{}]",
            failing.join(", ")
        ),
    )
}

// 7 ------------------------------------------------------------------------

pub fn word_means_line(q: &Qrf, trials: u64) -> ([f64; 4], String) {
    let p = avalanche_profile(q, 2, trials, SEED).expect("avalanche");
    let m = p.word_means();
    (m, format!("a={:.4} b={:.4} c={:.4} d={:.4}", m[0], m[1], m[2], m[3]))
}

pub fn avalanche(q: &Qrf) -> Outcome {
    let (m5, l5) = word_means_line(q, 100_000);
    let (m6, l6) = word_means_line(q, 1_000_000);
    let ok5 = m5.iter().all(|&x| (0.47..=0.53).contains(&x));
    let ok6 = m6.iter().all(|&x| (0.49..=0.51).contains(&x));
    outcome(ok5 && ok6, format!("2 rounds, 10^5: {l5}; 10^6: {l6}"))
}

// 8 ------------------------------------------------------------------------

pub fn rotation_flatness() -> Outcome {
    let cfg = TrialConfig {
        trials: 1 << 20,
        rounds: vec![1, 2, 4, 8],
        rng_seed: SEED,
        ..TrialConfig::default()
    };
    let delta = Delta::single_bit(0);
    let sweep = rotation_sweep(&SWEEP_SETS, &delta, &cfg, 2, 100_000).expect("sweep");
    // Pooled mean and standard deviation of per-flip flipped-bit counts.
    let n: f64 = sweep.iter().map(|s| s.avalanche_samples as f64).sum();
    let mean = sweep.iter().map(|s| s.mean_flipped_bits * s.avalanche_samples as f64).sum::<f64>() / n;
    let second = sweep
        .iter()
        .map(|s| (s.flipped_bits_std.powi(2) + s.mean_flipped_bits.powi(2)) * s.avalanche_samples as f64)
        .sum::<f64>()
        / n;
    let sigma = (second - mean * mean).sqrt();
    let flat = sweep.iter().all(|s| (s.mean_flipped_bits - mean).abs() <= 3.0 * sigma);
    let bound = sweep
        .iter()
        .all(|s| s.collisions.per_round.iter().filter(|r| r.rounds >= 4).all(|r| r.passes_bound));
    let sets: Vec<String> = sweep
        .iter()
        .map(|s| format!("{:?}: {:.2} bits", s.rotations, s.mean_flipped_bits))
        .collect();
    outcome(
        flat && bound && sweep.len() >= 3,
        format!(
            "pooled mean {mean:.2} ± 3σ = {:.2}; {}; bound holds at r≥4: {bound}",
            3.0 * sigma,
            sets.join(", ")
        ),
    )
}

// 9 ------------------------------------------------------------------------

pub fn dataset_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut notes = Vec::new();
    let mut ok = true;
    for (mode, name) in [(DatasetMode::FixedKey, "fixed"), (DatasetMode::VariableKey, "variable")] {
        let cfg = DatasetConfig {
            mode,
            n_blocks: 1000,
            rng_seed: SEED,
            ..DatasetConfig::default()
        };
        let files: Vec<Vec<u8>> = (0..2)
            .map(|run| {
                let path = dir.path().join(format!("{name}-{run}.txt"));
                let d = generate_dataset(&cfg).expect("dataset");
                d.persist(&path).expect("persist");
                let back = Dataset::load(&path).expect("load");
                assert_eq!(back, d, "{name}: load differs from generated");
                std::fs::read(&path).expect("read")
            })
            .collect();
        let same = files[0] == files[1];
        ok &= same;
        notes.push(format!("{name}: {} bytes, identical={same}", files[0].len()));
    }
    outcome(ok, notes.join("; "))
}

// 10 -----------------------------------------------------------------------

pub fn distinguisher_null() -> Outcome {
    const BLOCKS: usize = 10_000;
    let ds = generate_dataset(&DatasetConfig {
        mode: DatasetMode::VariableKey,
        n_blocks: BLOCKS as u64,
        rng_seed: SEED,
        ..DatasetConfig::default()
    })
    .expect("dataset");
    let cipher = ds.keystream_bytes();
    let random = rng::baseline_bytes(SEED, 1, cipher.len());
    let spec = MGramSpec::new(8).unwrap();
    let sig = SignificanceConfig::default();
    // Accept a block when any byte value's count has z above the threshold.
    let detector = |block: &[u8]| {
        let t = extract_mgrams(block, &spec).expect("m-grams");
        !significant_patterns(&t, &sig).expect("z").is_empty()
    };
    let est = distinguisher_advantage(detector, &cipher, &random, BLOCKS).expect("advantage");
    outcome(
        est.ci_contains_zero(),
        format!(
            "{BLOCKS} blocks: P[D(K)=1]={:.4} P[D(R)=1]={:.4} adv={:.4} 95% CI [{:+.4}, {:+.4}]",
            est.p_cipher, est.p_random, est.adv, est.confidence_interval.0, est.confidence_interval.1
        ),
    )
}

// --------------------------------------------------------------------------

pub fn report(id: u32, name: &str, o: &Outcome, took: Duration, limit_s: Option<f64>) -> bool {
    let in_time = limit_s.is_none_or(|l| within(l, took));
    let pass = o.pass && in_time;
    let budget = limit_s.map_or(String::new(), |l| format!(" (budget {l} s)"));
    println!(
        "{} criterion {id:>2} {name}: {} [{:.2} s{budget}]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64()
    );
    pass
}

