//! Can a byte-frequency z-test tell EChaCha20 keystream from a CSPRNG?
//! Also runs a deliberately broken "cipher" as a positive control.

use echacha_sbc::dataset::{generate_dataset, DatasetConfig, DatasetMode};
use echacha_sbc::differential::distinguisher_advantage;
use echacha_sbc::freq::{extract_mgrams, significant_patterns, MGramSpec, SignificanceConfig};
use echacha_sbc::rng;

fn main() -> anyhow::Result<()> {
    let blocks = 10_000;
    let ds = generate_dataset(&DatasetConfig {
        mode: DatasetMode::VariableKey,
        n_blocks: blocks as u64,
        ..DatasetConfig::default()
    })?;
    let cipher = ds.keystream_bytes();
    let random = rng::baseline_bytes(1, 1, cipher.len());

    let spec = MGramSpec::new(8)?;
    let sig = SignificanceConfig::default();
    let detector = |b: &[u8]| !significant_patterns(&extract_mgrams(b, &spec).unwrap(), &sig).unwrap().is_empty();

    let est = distinguisher_advantage(detector, &cipher, &random, blocks)?;
    println!(
        "EChaCha20 vs CSPRNG: adv {:.4}, 95% CI [{:+.4}, {:+.4}] -> {}",
        est.adv,
        est.confidence_interval.0,
        est.confidence_interval.1,
        if est.ci_contains_zero() { "no distinguisher" } else { "distinguished" }
    );

    // Every 9th byte zeroed: an obvious bias.
    let biased: Vec<u8> = random.iter().enumerate().map(|(i, &b)| if i % 9 == 0 { 0 } else { b }).collect();
    let ctl = distinguisher_advantage(detector, &biased, &random, blocks)?;
    println!("biased control:      adv {:.4}, CI contains 0: {}", ctl.adv, ctl.ci_contains_zero());
    Ok(())
}
