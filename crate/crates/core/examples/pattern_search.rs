//! Run every engine over a keystream and check they agree, then let the
//! hybrid scanner flag a pattern that was planted too often.

use echacha_sbc::cipher::{keystream, CipherConfig, KeyMaterial};
use echacha_sbc::search::{hybrid_search, par_search, search, Engine, HybridConfig, WordPattern};

fn main() -> anyhow::Result<()> {
    let km = KeyMaterial::new([1; 8], [2; 4], [0; 4]);
    let bytes = keystream(&km, 4096, &CipherConfig::default())?;
    let mut words: Vec<u32> = bytes.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();

    let planted = vec![0xdead_beef, 0x0bad_f00d, 0x1234_5678];
    for at in (1000..words.len() - 3).step_by(20_000) {
        words[at..at + 3].copy_from_slice(&planted);
    }
    let p = WordPattern::new("planted", planted)?;
    // Present once; at 128 bits even a single hit is far above 2^-128.
    let q = WordPattern::new("block-7-head", words[7 * 36..7 * 36 + 4].to_vec())?;

    for e in Engine::ALL {
        let r = search(e, &words, &p)?;
        println!("{:<12} {:>3} hits  {:>9} comparisons", e.name(), r.positions.len(), r.comparisons);
    }
    let seg = par_search(Engine::BoyerMoore, &words, &p, 8)?;
    assert_eq!(seg.positions, search(Engine::Kmp, &words, &p)?.positions);

    let out = hybrid_search(&words, &[p, q], &HybridConfig::default())?;
    for r in &out.reports {
        println!(
            "{:<14} hits={} empirical={:.2e} expected={:.2e} flagged={} (window {:?})",
            r.report.pattern_id,
            r.report.positions.len(),
            r.empirical_probability,
            r.expected_probability,
            r.flagged,
            r.flagged_at_window
        );
    }
    Ok(())
}
