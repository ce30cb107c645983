//! Avalanche profile of both quarter-round orderings, with CSV/SVG output.

use std::path::Path;

use echacha_sbc::cipher::Qrf;
use echacha_sbc::report::run_avalanche;

fn main() -> anyhow::Result<()> {
    let out = Path::new("target/examples-out/avalanche");
    for (name, q) in [("paper", Qrf::echacha()), ("rfc-style", Qrf::rfc_style())] {
        for rounds in 1..=3 {
            let p = run_avalanche(&q, rounds, 20_000, 1, &out.join(format!("{name}-r{rounds}")))?;
            let m = p.word_means();
            println!(
                "{name:<9} r={rounds}  a={:.3} b={:.3} c={:.3} d={:.3}  flipped bits {:.1} ± {:.1}",
                m[0], m[1], m[2], m[3], p.mean_flipped_bits, p.flipped_bits_std
            );
        }
    }
    println!("artifacts under {}", out.display());
    Ok(())
}
