use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{config_hash, ensure_dir, svg, write_csv, write_json, write_text};
use crate::cipher::{Qrf, SIGMA};
use crate::dataset::{generate_dataset, Dataset, DatasetConfig};
use crate::differential::{
    avalanche_profile, collision_trial_batch, default_delta_set, rotation_sweep, AvalancheProfile,
    CollisionStats, Delta, SweepResult, TrialConfig,
};
use crate::freq::{chi_square, extract_mgrams, significant_patterns, top_k, z_score, ChiSquareResult, MGramSpec, SignificanceConfig};
use crate::rng::baseline_bytes;
use crate::search::{par_search, Engine, WordPattern};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exp1Config {
    pub dataset: DatasetConfig,
    pub m_sizes: Vec<u32>,
    pub significance: SignificanceConfig,
    pub top_k: usize,
    /// Also analyse CSPRNG bytes of the same length.
    pub baseline: bool,
}

impl Default for Exp1Config {
    fn default() -> Self {
        Exp1Config {
            dataset: DatasetConfig::default(),
            m_sizes: vec![8, 16, 32],
            significance: SignificanceConfig::default(),
            top_k: 10,
            baseline: true,
        }
    }
}

impl Exp1Config {
    pub fn validate(&self) -> Result<()> {
        if self.m_sizes.is_empty() {
            return Err(Error::InvalidConfig("no m-gram sizes selected".into()));
        }
        for &m in &self.m_sizes {
            MGramSpec::new(m)?;
        }
        self.significance.validate()?;
        self.dataset.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchCheck {
    pub pattern_id: String,
    pub symbols: usize,
    pub kmp_matches: usize,
    pub bm_matches: usize,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MgramSummary {
    pub source: String,
    pub m_bits: u32,
    pub total: u64,
    pub distinct: usize,
    pub significant: usize,
    pub max_z: f64,
    pub chi2: ChiSquareResult,
    pub top: Vec<(u32, u64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exp1Summary {
    pub config_hash: String,
    pub blocks: usize,
    pub search: Vec<SearchCheck>,
    pub mgrams: Vec<MgramSummary>,
    /// A significance flag was raised on the CSPRNG baseline.
    pub baseline_flagged: bool,
}

fn analyse(
    source: &str,
    bytes: &[u8],
    cfg: &Exp1Config,
    hash: &str,
    out_dir: &Path,
) -> Result<Vec<MgramSummary>> {
    let mut out = Vec::new();
    for &m in &cfg.m_sizes {
        let table = extract_mgrams(bytes, &MGramSpec::new(m)?)?;
        let sig = significant_patterns(&table, &cfg.significance)?;
        let chi2 = chi_square(&table, &cfg.significance)?;
        let top = top_k(&table, cfg.top_k);
        let max_z = match top.first() {
            Some(&(v, _)) => z_score(&table, v, &cfg.significance)?.z,
            None => f64::NAN,
        };
        let width = (m / 4) as usize;
        let rows = top
            .iter()
            .map(|&(v, c)| -> Result<Vec<String>> {
                let z = z_score(&table, v, &cfg.significance)?;
                Ok(vec![
                    format!("{v:0width$x}"),
                    c.to_string(),
                    format!("{:.4}", z.z),
                    z.significant.to_string(),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        write_csv(
            &out_dir.join(format!("exp1_{source}_m{m}.csv")),
            hash,
            &["pattern_hex", "count", "z", "significant"],
            rows,
        )?;
        let bars: Vec<(String, f64)> = top.iter().map(|&(v, c)| (format!("{v:0width$x}"), c as f64)).collect();
        write_text(
            &out_dir.join(format!("exp1_{source}_top{}_m{m}.svg", cfg.top_k)),
            &svg::bar_chart(&format!("Top {} {m}-bit m-grams ({source})", cfg.top_k), "m-gram", "count", &bars),
        )?;
        out.push(MgramSummary {
            source: source.to_string(),
            m_bits: m,
            total: table.total,
            distinct: table.distinct(),
            significant: sig.len(),
            max_z,
            chi2,
            top,
        });
    }
    Ok(out)
}

/// Generate (or take) a dataset, cross-check KMP and Boyer-Moore on it,
/// then run z / χ² tests per m-gram size, optionally against a CSPRNG
/// baseline.
pub fn run_experiment_1(cfg: &Exp1Config, dataset: Option<Dataset>, out_dir: &Path) -> Result<Exp1Summary> {
    cfg.validate()?;
    let out_dir = ensure_dir(out_dir)?;
    let hash = config_hash(cfg);
    let data = match dataset {
        Some(d) => d,
        None => generate_dataset(&cfg.dataset)?,
    };
    if data.is_empty() {
        return Err(Error::InvalidConfig("dataset is empty".into()));
    }
    let bytes = data.keystream_bytes();
    let words = data.words();

    // Phase 2: exact search with both engines on word-aligned patterns.
    let table32 = extract_mgrams(&bytes, &MGramSpec::new(32)?)?;
    let mut patterns = vec![WordPattern::new("sigma", SIGMA.to_vec())?];
    for (i, (v, _)) in top_k(&table32, 3).into_iter().enumerate() {
        patterns.push(WordPattern::new(format!("top32_{i}"), vec![v])?);
    }
    let mid = words.len() / 2;
    let planted_len = 8.min(words.len());
    let start = mid.min(words.len() - planted_len);
    patterns.push(WordPattern::new("planted", words[start..start + planted_len].to_vec())?);
    let segments = rayon::current_num_threads() * 4;
    let search = patterns
        .iter()
        .map(|p| -> Result<SearchCheck> {
            let k = par_search(Engine::Kmp, &words, p, segments)?;
            let b = par_search(Engine::BoyerMoore, &words, p, segments)?;
            Ok(SearchCheck {
                pattern_id: p.id.clone(),
                symbols: p.len(),
                kmp_matches: k.positions.len(),
                bm_matches: b.positions.len(),
                agree: k.positions == b.positions,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &out_dir.join("exp1_search.csv"),
        &hash,
        &["pattern_id", "symbols", "kmp_matches", "bm_matches", "agree"],
        search.iter().map(|s| {
            [
                s.pattern_id.clone(),
                s.symbols.to_string(),
                s.kmp_matches.to_string(),
                s.bm_matches.to_string(),
                s.agree.to_string(),
            ]
        }),
    )?;

    // Phase 3: significance.
    let mut mgrams = analyse("echacha20", &bytes, cfg, &hash, &out_dir)?;
    let mut baseline_flagged = false;
    if cfg.baseline {
        let base = baseline_bytes(cfg.dataset.rng_seed, 0xba5e, bytes.len());
        let b = analyse("baseline", &base, cfg, &hash, &out_dir)?;
        baseline_flagged = b.iter().any(|s| s.significant > 0);
        mgrams.extend(b);
    }
    write_csv(
        &out_dir.join("exp1_summary.csv"),
        &hash,
        &["source", "m", "total", "distinct", "significant", "max_z", "chi2", "chi2_critical", "chi2_pass"],
        mgrams.iter().map(|s| {
            [
                s.source.clone(),
                s.m_bits.to_string(),
                s.total.to_string(),
                s.distinct.to_string(),
                s.significant.to_string(),
                format!("{:.4}", s.max_z),
                format!("{:.4}", s.chi2.statistic),
                format!("{:.4}", s.chi2.critical),
                s.chi2.pass.to_string(),
            ]
        }),
    )?;
    let summary = Exp1Summary {
        config_hash: hash,
        blocks: data.len(),
        search,
        mgrams,
        baseline_flagged,
    };
    write_json(&out_dir.join("exp1_summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exp2Config {
    pub trials: TrialConfig,
    pub deltas: Vec<Delta>,
    /// Prepend a Δ = 0 control row.
    pub control: bool,
}

impl Default for Exp2Config {
    fn default() -> Self {
        Exp2Config {
            trials: TrialConfig::default(),
            deltas: default_delta_set(),
            control: true,
        }
    }
}

/// Collision table (rounds, trials, collisions, probability) for every Δ,
/// plus a decay plot of full- and partial-collision rates.
pub fn run_experiment_2(cfg: &Exp2Config, out_dir: &Path) -> Result<Vec<CollisionStats>> {
    cfg.trials.validate()?;
    if cfg.deltas.is_empty() && !cfg.control {
        return Err(Error::InvalidTrials("no differences to test".into()));
    }
    let out_dir = ensure_dir(out_dir)?;
    let hash = config_hash(cfg);
    let mut deltas = Vec::new();
    if cfg.control {
        deltas.push(Delta::zero());
    }
    deltas.extend(cfg.deltas.iter().cloned());
    let stats = deltas
        .iter()
        .map(|d| collision_trial_batch(d, &cfg.trials))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut weight_rows = Vec::new();
    for (d, s) in deltas.iter().zip(&stats) {
        for r in &s.per_round {
            rows.push([
                d.hex(),
                r.rounds.to_string(),
                r.trials.to_string(),
                r.full_collisions.to_string(),
                format!("{:e}", r.p_hat),
                format!("{:e}", r.sigma),
                r.partial_collisions.to_string(),
                format!("{:e}", r.partial_rate()),
                r.passes_bound.to_string(),
            ]);
            for (w, &c) in r.weight_histogram.iter().enumerate().filter(|(_, &c)| c > 0) {
                weight_rows.push([d.hex(), r.rounds.to_string(), w.to_string(), c.to_string()]);
            }
        }
    }
    write_csv(
        &out_dir.join("exp2_collisions.csv"),
        &hash,
        &["delta", "rounds", "trials", "collisions", "probability", "sigma", "partial", "partial_rate", "passes_bound"],
        rows,
    )?;
    write_csv(
        &out_dir.join("exp2_weights.csv"),
        &hash,
        &["delta", "rounds", "weight", "count"],
        weight_rows,
    )?;

    // log2 of rates; zero rates are drawn at the resolution floor log2(1/trials).
    let floor = -(cfg.trials.trials as f64).log2();
    let lg = |p: f64| if p > 0.0 { p.log2() } else { floor };
    let mut series = Vec::new();
    for (d, s) in deltas.iter().zip(&stats).filter(|(d, _)| !d.is_zero()) {
        series.push((
            format!("partial {}", &d.hex()[..8]),
            s.per_round.iter().map(|r| (r.rounds as f64, lg(r.partial_rate()))).collect(),
        ));
    }
    if let Some(s) = stats.iter().zip(&deltas).find(|(_, d)| !d.is_zero()).map(|(s, _)| s) {
        series.push((
            "full (first Δ)".to_string(),
            s.per_round.iter().map(|r| (r.rounds as f64, lg(r.p_hat))).collect(),
        ));
    }
    write_text(
        &out_dir.join("exp2_decay.svg"),
        &svg::line_chart("Collision decay by round", "rounds", "log2 rate", &series),
    )?;
    write_json(&out_dir.join("exp2_collisions.json"), &stats)?;
    Ok(stats)
}

pub fn run_avalanche(qrf: &Qrf, rounds: u32, trials: u64, seed: u64, out_dir: &Path) -> Result<AvalancheProfile> {
    let out_dir = ensure_dir(out_dir)?;
    let profile = avalanche_profile(qrf, rounds, trials, seed)?;
    let hash = config_hash(&(qrf, rounds, trials, seed));
    let names = ["a", "b", "c", "d"];
    let rows = (0..4).flat_map(|w| {
        let p = &profile.flip_probability;
        (0..32).map(move |b| [names[w].to_string(), b.to_string(), format!("{:.6}", p[w][b])])
    });
    write_csv(&out_dir.join("avalanche.csv"), &hash, &["word", "bit", "flip_probability"], rows)?;
    let series: Vec<(String, Vec<(f64, f64)>)> = (0..4)
        .map(|w| {
            (
                format!("word {}", names[w]),
                profile.flip_probability[w].iter().enumerate().map(|(b, &p)| (b as f64, p)).collect(),
            )
        })
        .collect();
    write_text(
        &out_dir.join("avalanche.svg"),
        &svg::line_chart(
            &format!("Bit flip probability after {rounds} rounds"),
            "bit position",
            "flip probability",
            &series,
        ),
    )?;
    write_json(&out_dir.join("avalanche.json"), &profile)?;
    Ok(profile)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub sets: Vec<[u32; 6]>,
    pub delta: Delta,
    pub trials: TrialConfig,
    pub avalanche_rounds: u32,
    pub avalanche_trials: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sets: crate::differential::SWEEP_SETS.to_vec(),
            delta: Delta::single_bit(0),
            trials: TrialConfig {
                trials: 1 << 16,
                ..TrialConfig::default()
            },
            avalanche_rounds: 2,
            avalanche_trials: 10_000,
        }
    }
}

pub fn run_sweep(cfg: &SweepConfig, out_dir: &Path) -> Result<Vec<SweepResult>> {
    let out_dir = ensure_dir(out_dir)?;
    let hash = config_hash(cfg);
    let results = rotation_sweep(&cfg.sets, &cfg.delta, &cfg.trials, cfg.avalanche_rounds, cfg.avalanche_trials)?;
    let rot = |r: &[u32; 6]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-");
    let mut rows = Vec::new();
    for s in &results {
        for r in &s.collisions.per_round {
            rows.push([
                rot(&s.rotations),
                r.rounds.to_string(),
                format!("{:e}", r.p_hat),
                format!("{:e}", r.partial_rate()),
                r.passes_bound.to_string(),
                format!("{:.4}", s.mean_flipped_bits),
                format!("{:.4}", s.flipped_bits_std),
            ]);
        }
    }
    write_csv(
        &out_dir.join("sweep.csv"),
        &hash,
        &["rotations", "rounds", "collision_probability", "partial_rate", "passes_bound", "mean_flipped_bits", "flipped_bits_std"],
        rows,
    )?;
    let bars: Vec<(String, f64)> = results.iter().map(|s| (rot(&s.rotations), s.mean_flipped_bits)).collect();
    write_text(
        &out_dir.join("sweep.svg"),
        &svg::bar_chart("Mean flipped bits per rotation set", "rotations", "flipped bits", &bars),
    )?;
    write_json(&out_dir.join("sweep.json"), &results)?;
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_1_small_and_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = Exp1Config {
            dataset: DatasetConfig {
                n_blocks: 50,
                ..DatasetConfig::default()
            },
            m_sizes: vec![8, 16],
            ..Exp1Config::default()
        };
        let a = run_experiment_1(&cfg, None, dir.path()).unwrap();
        assert!(a.search.iter().all(|s| s.agree));
        assert!(a.search.iter().any(|s| s.pattern_id == "planted" && s.kmp_matches >= 1));
        let first = std::fs::read(dir.path().join("exp1_echacha20_m8.csv")).unwrap();
        run_experiment_1(&cfg, None, dir.path()).unwrap();
        assert_eq!(first, std::fs::read(dir.path().join("exp1_echacha20_m8.csv")).unwrap());
        assert!(std::fs::read_to_string(dir.path().join("exp1_summary.csv")).unwrap().starts_with("# config_hash: "));

        let bad = Exp1Config {
            m_sizes: vec![12],
            ..cfg
        };
        assert!(matches!(run_experiment_1(&bad, None, dir.path()), Err(Error::UnsupportedMgram(12))));
    }

    #[test]
    fn experiment_2_control_row() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = Exp2Config {
            trials: TrialConfig {
                trials: 1 << 10,
                rounds: vec![1, 2],
                ..TrialConfig::default()
            },
            deltas: vec![Delta::single_bit(5)],
            control: true,
        };
        let stats = run_experiment_2(&cfg, dir.path()).unwrap();
        assert_eq!(stats.len(), 2);
        assert!(stats[0].per_round.iter().all(|r| r.p_hat == 1.0));
        let bad = Exp2Config {
            trials: TrialConfig {
                rounds: vec![],
                ..cfg.trials.clone()
            },
            ..cfg
        };
        assert!(run_experiment_2(&bad, dir.path()).is_err());
    }
}
