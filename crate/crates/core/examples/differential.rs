//! Collision trials for the default rotational Δ set, plus how the weight
//! of a single-bit difference grows round by round.

use echacha_sbc::cipher::{Qrf, QrfQuad};
use echacha_sbc::differential::{collision_trial_batch, default_delta_set, propagation_summary, TrialConfig};

fn main() -> anyhow::Result<()> {
    let cfg = TrialConfig {
        trials: 1 << 18,
        ..TrialConfig::default()
    };
    println!("{:<34} {:>5} {:>6} {:>8} {:>10}", "delta", "round", "full", "partial", "mean hw");
    for d in default_delta_set() {
        let s = collision_trial_batch(&d, &cfg)?;
        for r in &s.per_round {
            println!(
                "{:<34} {:>5} {:>6} {:>8} {:>10.2}{}",
                d.hex(),
                r.rounds,
                r.full_collisions,
                r.partial_collisions,
                r.mean_weight(),
                if r.passes_bound { "" } else { "  above bound" }
            );
        }
    }

    let p = propagation_summary(&Qrf::echacha(), QrfQuad::new(1, 0, 0, 0), 50_000, 4, cfg.rng_seed)?;
    println!("Δ=(1,0,0,0) mean weight by round: {:.2?}", p.mean_weight);
    Ok(())
}
