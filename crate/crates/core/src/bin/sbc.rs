//! `sbc`: command-line front end for the workbench.
//!
//! Exit codes: 0 success, 1 usage error, 2 analysis failure (significance
//! flag raised on the CSPRNG baseline), 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use echacha_sbc::cipher::{CipherConfig, NonceWidth, Qrf};
use echacha_sbc::dataset::{generate_dataset, Dataset, DatasetConfig, DatasetMode, Entropy};
use echacha_sbc::differential::{default_delta_set, seed_delta, Delta, TrialConfig};
use echacha_sbc::freq::SignificanceConfig;
use echacha_sbc::report::{self, BenchConfig, Exp1Config, Exp2Config, SweepConfig};
use echacha_sbc::search::{io as sio, search_any, Alphabet, Engine};
use echacha_sbc::{rng, Error};

#[derive(Parser)]
#[command(name = "sbc", version, about = "EChaCha20 stringology cryptanalysis workbench")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = rng::SEED_ENV, default_value_t = rng::DEFAULT_SEED)]
    seed: u64,
    /// Directory for reports.
    #[arg(long, global = true, default_value = "sbc-out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fixed,
    Variable,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlphabetArg {
    Byte,
    Word,
}

#[derive(Clone, Copy, ValueEnum)]
enum QrfArg {
    Paper,
    Rfc,
}

#[derive(clap::Args, Clone)]
struct CipherArgs {
    /// Cipher preset.
    #[arg(long, default_value = "echacha-colrow-v1")]
    preset: String,
    /// TOML cipher description (overrides --preset).
    #[arg(long)]
    cipher_config: Option<PathBuf>,
    #[arg(long, default_value = "128", value_parser = nonce_bits_parser())]
    nonce_bits: u32,
}

fn nonce_bits_parser() -> impl clap::builder::TypedValueParser<Value = u32> {
    use clap::builder::TypedValueParser;
    clap::builder::PossibleValuesParser::new(["128", "64"]).map(|s| s.parse::<u32>().expect("listed values"))
}

#[derive(clap::Args, Clone)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "fixed")]
    mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    blocks: u64,
    /// Draw keys and nonces from OS entropy (not reproducible).
    #[arg(long)]
    os_entropy: bool,
    #[command(flatten)]
    cipher: CipherArgs,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a keystream dataset file.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Search a text file for patterns.
    Scan {
        #[arg(long)]
        text: PathBuf,
        /// One pattern per line: `<hex>` or `<id> <hex>`.
        #[arg(long)]
        patterns: PathBuf,
        #[arg(long, value_enum, default_value = "word")]
        alphabet: AlphabetArg,
        #[arg(long, default_value = "kmp")]
        engine: Engine,
        /// Write JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// m-gram frequency analysis of a dataset file.
    Freq {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        m: Vec<u32>,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long)]
        bonferroni: bool,
        /// Also analyse a CSPRNG baseline of the same length.
        #[arg(long)]
        baseline: bool,
    },
    /// Rotational-differential collision table.
    Diff {
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        rounds: Vec<u32>,
        #[arg(long, default_value_t = 1 << 20)]
        trials: u64,
        /// Explicit differences as 4 or 8 colon-separated hex words.
        #[arg(long)]
        delta: Vec<String>,
        /// Seed differences from these hex words with shift --shift.
        #[arg(long, value_delimiter = ',')]
        seed_pattern: Vec<String>,
        #[arg(long, default_value_t = 1)]
        shift: u32,
    },
    /// Per-bit avalanche profile of the quarter-round.
    Avalanche {
        #[arg(long, default_value_t = 2)]
        rounds: u32,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, value_enum, default_value = "paper")]
        qrf: QrfArg,
    },
    /// Rotation-constant sweep.
    Sweep {
        /// Sets of six rotations, e.g. `16,12,8,7,4,2;7,9,13,18,4,2`.
        #[arg(long, value_delimiter = ';')]
        sets: Vec<String>,
        #[arg(long, default_value_t = 1 << 16)]
        trials: u64,
        #[arg(long, default_value_t = 10_000)]
        avalanche_trials: u64,
    },
    /// Engine throughput and precision/recall.
    Bench {
        #[arg(long, default_value_t = 16)]
        corpus_mib: usize,
        #[arg(long, default_value_t = 8)]
        patterns: usize,
        #[arg(long, default_value_t = 8)]
        pattern_words: usize,
        /// Skip the hybrid ≥ BM ≥ KMP throughput ordering check
        #[arg(long)]
        no_order_check: bool,
    },
    /// Full pipeline: dataset → search → significance, plus collision table.
    Report {
        /// Use an existing dataset instead of generating one.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        m: Vec<u32>,
        #[arg(long, default_value_t = 1 << 20)]
        trials: u64,
    },
}

fn cipher_config(a: &CipherArgs) -> Result<CipherConfig, Error> {
    let mut cfg = match &a.cipher_config {
        Some(p) => CipherConfig::from_toml_str(&std::fs::read_to_string(p).map_err(|e| Error::Io {
            path: p.clone(),
            source: e,
        })?)?,
        None => CipherConfig::preset(&a.preset)?,
    };
    cfg.nonce_width = match a.nonce_bits {
        128 => NonceWidth::Bits128,
        64 => NonceWidth::Bits64,
        n => return Err(Error::InvalidConfig(format!("nonce width must be 64 or 128, got {n}"))),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn dataset_config(g: &GenArgs, seed: u64) -> Result<DatasetConfig, Error> {
    let cfg = DatasetConfig {
        mode: match g.mode {
            ModeArg::Fixed => DatasetMode::FixedKey,
            ModeArg::Variable => DatasetMode::VariableKey,
        },
        n_blocks: g.blocks,
        rng_seed: seed,
        cipher: cipher_config(&g.cipher)?,
        entropy: if g.os_entropy { Entropy::Os } else { Entropy::Seeded },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_words(s: &str) -> Result<Vec<u32>, Error> {
    s.split(':')
        .map(|w| u32::from_str_radix(w.trim_start_matches("0x"), 16))
        .collect::<Result<_, _>>()
        .map_err(|e| Error::InvalidConfig(format!("bad hex word list {s:?}: {e}")))
}

fn parse_rotations(s: &str) -> Result<[u32; 6], Error> {
    let v: Vec<u32> = s
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::InvalidConfig(format!("bad rotation set {s:?}: {e}")))?;
    v.try_into()
        .map_err(|v: Vec<u32>| Error::InvalidConfig(format!("rotation set needs 6 values, got {}", v.len())))
}

enum Outcome {
    Ok,
    AnalysisFailure,
}

fn print_exp1(s: &report::Exp1Summary) {
    for c in &s.search {
        println!(
            "search {:<10} kmp={} bm={} agree={}",
            c.pattern_id, c.kmp_matches, c.bm_matches, c.agree
        );
    }
    for m in &s.mgrams {
        println!(
            "{:<9} m={:<2} N={} distinct={} significant(z)={} max_z={:.2} chi2={:.1} (crit {:.1}, pass={})",
            m.source, m.m_bits, m.total, m.distinct, m.significant, m.max_z, m.chi2.statistic, m.chi2.critical, m.chi2.pass
        );
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let out = cli.out.as_path();
    match cli.cmd {
        Cmd::Gen { gen, output } => {
            let d = generate_dataset(&dataset_config(&gen, cli.seed)?)?;
            d.persist(&output)?;
            println!("wrote {} blocks to {}", d.len(), output.display());
        }
        Cmd::Scan {
            text,
            patterns,
            alphabet,
            engine,
            json,
        } => {
            let alphabet = match alphabet {
                AlphabetArg::Byte => Alphabet::Byte,
                AlphabetArg::Word => Alphabet::Word,
            };
            let stream = sio::load_stream(&text, alphabet, sio::Encoding::from_path(&text))?;
            let pats = sio::load_patterns(&patterns, alphabet)?;
            let reports = pats
                .iter()
                .map(|p| search_any(engine, &stream, p))
                .collect::<Result<Vec<_>, _>>()?;
            let stdout = std::io::stdout().lock();
            if json {
                sio::write_reports_json(stdout, &reports)?;
                println!();
            } else {
                sio::write_reports_csv(stdout, &reports)?;
            }
        }
        Cmd::Freq {
            dataset,
            m,
            top_k,
            bonferroni,
            baseline,
        } => {
            let data = Dataset::load(&dataset)?;
            let cfg = Exp1Config {
                dataset: data.config.unwrap_or_else(|| DatasetConfig {
                    n_blocks: data.len() as u64,
                    rng_seed: cli.seed,
                    ..DatasetConfig::default()
                }),
                m_sizes: m,
                significance: SignificanceConfig {
                    bonferroni,
                    ..SignificanceConfig::default()
                },
                top_k,
                baseline,
            };
            let s = report::run_experiment_1(&cfg, Some(data), out)?;
            print_exp1(&s);
            if s.baseline_flagged {
                return Ok(Outcome::AnalysisFailure);
            }
        }
        Cmd::Diff {
            rounds,
            trials,
            delta,
            seed_pattern,
            shift,
        } => {
            let trials = TrialConfig {
                trials,
                rounds,
                rng_seed: cli.seed,
                ..TrialConfig::default()
            };
            trials.validate()?;
            let mut deltas = delta
                .iter()
                .map(|d| Delta::new(parse_words(d)?))
                .collect::<Result<Vec<_>, _>>()?;
            if !seed_pattern.is_empty() {
                let words: Vec<u32> = seed_pattern
                    .iter()
                    .map(|w| parse_words(w))
                    .collect::<Result<Vec<_>, _>>()?
                    .concat();
                deltas.push(seed_delta(&words, shift)?);
            }
            if deltas.is_empty() {
                deltas = default_delta_set();
            }
            let stats = report::run_experiment_2(
                &Exp2Config {
                    trials,
                    deltas,
                    control: true,
                },
                out,
            )?;
            println!("{:<36} {:>6} {:>10} {:>10} {:>12} {:>8}", "delta", "rounds", "trials", "collisions", "probability", "bound");
            for s in &stats {
                let d = s.delta.iter().map(|w| format!("{w:08x}")).collect::<Vec<_>>().join(":");
                for r in &s.per_round {
                    println!(
                        "{:<36} {:>6} {:>10} {:>10} {:>12.3e} {:>8}",
                        d, r.rounds, r.trials, r.full_collisions, r.p_hat, r.passes_bound
                    );
                }
            }
        }
        Cmd::Avalanche { rounds, trials, qrf } => {
            let q = match qrf {
                QrfArg::Paper => Qrf::echacha(),
                QrfArg::Rfc => Qrf::rfc_style(),
            };
            let p = report::run_avalanche(&q, rounds, trials, cli.seed, out)?;
            let m = p.word_means();
            println!(
                "rounds={rounds} trials={trials} mean flip probability a={:.4} b={:.4} c={:.4} d={:.4}; mean flipped bits {:.2}",
                m[0], m[1], m[2], m[3], p.mean_flipped_bits
            );
        }
        Cmd::Sweep {
            sets,
            trials,
            avalanche_trials,
        } => {
            let mut cfg = SweepConfig::default();
            if !sets.is_empty() {
                cfg.sets = sets.iter().map(|s| parse_rotations(s)).collect::<Result<_, _>>()?;
            }
            cfg.trials.trials = trials;
            cfg.trials.rng_seed = cli.seed;
            cfg.avalanche_trials = avalanche_trials;
            for r in report::run_sweep(&cfg, out)? {
                println!(
                    "{:?} mean flipped bits {:.3} (sd {:.3})",
                    r.rotations, r.mean_flipped_bits, r.flipped_bits_std
                );
            }
        }
        Cmd::Bench {
            corpus_mib,
            patterns,
            pattern_words,
            no_order_check,
        } => {
            let cfg = BenchConfig {
                corpus_bytes: corpus_mib << 20,
                patterns,
                pattern_words,
                seed: cli.seed,
                order_check: !no_order_check,
                ..BenchConfig::default()
            };
            let r = report::run_bench(&cfg, Some(out))?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            for x in &r.results {
                println!(
                    "{:<11} {:<8} precision={:.4} recall={:.4} throughput={:.1} MB/s",
                    x.engine.name(),
                    format!("{:?}", x.mode).to_lowercase(),
                    x.precision,
                    x.recall,
                    x.throughput / 1e6
                );
            }
        }
        Cmd::Report { dataset, gen, m, trials } => {
            let (data, dcfg) = match dataset {
                Some(p) => {
                    let d = Dataset::load(&p)?;
                    let c = d.config.unwrap_or(dataset_config(&gen, cli.seed)?);
                    (Some(d), c)
                }
                None => (None, dataset_config(&gen, cli.seed)?),
            };
            let e1 = Exp1Config {
                dataset: dcfg,
                m_sizes: m,
                ..Exp1Config::default()
            };
            let e2 = Exp2Config {
                trials: TrialConfig {
                    trials,
                    rng_seed: cli.seed,
                    ..TrialConfig::default()
                },
                ..Exp2Config::default()
            };
            e1.validate()?;
            e2.trials.validate()?;
            let s = report::run_experiment_1(&e1, data, out)?;
            print_exp1(&s);
            report::run_experiment_2(&e2, out)?;
            println!("reports written to {}", out.display());
            if s.baseline_flagged {
                return Ok(Outcome::AnalysisFailure);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => 3,
        Error::Degenerate(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::AnalysisFailure) => {
            eprintln!("significance flag raised on the CSPRNG baseline");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
