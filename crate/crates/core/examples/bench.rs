//! Engine throughput, exact and prefix-filtered. Pass a corpus size in MiB
//! (default 4; timings below 16 MiB are flagged as unstable).

use std::path::Path;

use echacha_sbc::report::{run_bench, BenchConfig};

fn main() -> anyhow::Result<()> {
    let mib: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let cfg = BenchConfig {
        corpus_bytes: mib << 20,
        ..BenchConfig::default()
    };
    let rep = run_bench(&cfg, Some(Path::new("target/examples-out/bench")))?;
    for w in &rep.warnings {
        println!("warning: {w}");
    }
    for r in &rep.results {
        println!(
            "{:<12} {:<9} {:>8.1} MB/s  precision {:.3} recall {:.3}",
            r.engine.name(),
            format!("{:?}", r.mode),
            r.throughput / 1e6,
            r.precision,
            r.recall
        );
    }
    Ok(())
}
