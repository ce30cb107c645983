//! Generate fixed- and variable-key datasets, write them, read them back.

use echacha_sbc::dataset::{decode_binary, generate_dataset, Dataset, DatasetConfig, DatasetMode};

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("sbc-dataset-example");
    std::fs::create_dir_all(&dir)?;
    for mode in [DatasetMode::FixedKey, DatasetMode::VariableKey] {
        let cfg = DatasetConfig {
            mode,
            n_blocks: 1000,
            rng_seed: 2024,
            ..DatasetConfig::default()
        };
        let d = generate_dataset(&cfg)?;
        let path = dir.join(format!("{mode:?}.txt"));
        d.persist(&path)?;
        assert_eq!(Dataset::load(&path)?, d);

        let e = d.encoded(0);
        assert_eq!(decode_binary(&e.binary).unwrap(), e.words);
        println!(
            "{mode:?}: {} blocks -> {} ({} bytes); block 0 key {:08x?}",
            d.len(),
            path.display(),
            std::fs::metadata(&path)?.len(),
            &cfg.key_material(0)?.key[..2]
        );
        println!("  hex {}…", &e.hex[..48]);
    }
    Ok(())
}
