//! Compare alternative rotation constants: collisions and avalanche mean.

use std::path::Path;

use echacha_sbc::report::{run_sweep, SweepConfig};

fn main() -> anyhow::Result<()> {
    let mut cfg = SweepConfig::default();
    cfg.sets.push([8, 8, 8, 8, 8, 8]); // a deliberately poor choice
    for s in run_sweep(&cfg, Path::new("target/examples-out/sweep"))? {
        let r1 = s.collisions.at(1).unwrap();
        println!(
            "{:?}  flipped {:.2} ± {:.2}  r1 partial rate {:.3e}",
            s.rotations,
            s.mean_flipped_bits,
            s.flipped_bits_std,
            r1.partial_rate()
        );
    }
    Ok(())
}
