//! m-gram counts, z-scores and χ² over a variable-key dataset.

use echacha_sbc::dataset::{generate_dataset, DatasetConfig, DatasetMode};
use echacha_sbc::freq::{chi_square, extract_mgrams_par, significant_patterns, top_k, MGramSpec, SignificanceConfig};

fn main() -> anyhow::Result<()> {
    let ds = generate_dataset(&DatasetConfig {
        mode: DatasetMode::VariableKey,
        n_blocks: 20_000,
        ..DatasetConfig::default()
    })?;
    let ks = ds.keystream_bytes();
    let sig = SignificanceConfig::default();

    for m in [8, 16, 32] {
        let t = extract_mgrams_par(&ks, &MGramSpec::new(m)?, 8)?;
        let chi = chi_square(&t, &sig)?;
        println!(
            "m={m:<2} N={:<8} distinct={:<8} chi2={:.1} (df {}, critical {:.1}) {}",
            t.total,
            t.distinct(),
            chi.statistic,
            chi.df,
            chi.critical,
            if chi.pass { "uniform" } else { "REJECT" }
        );
        if m < 32 {
            let flagged = significant_patterns(&t, &sig)?;
            let top: Vec<String> = top_k(&t, 3).iter().map(|(v, c)| format!("{v:#x}:{c}")).collect();
            println!("      z > {}: {}   top: {}", sig.threshold_for(m), flagged.len(), top.join(" "));
        }
    }
    Ok(())
}
