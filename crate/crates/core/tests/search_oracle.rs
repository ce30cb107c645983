use echacha_sbc::search::{hybrid_search, par_search, search, Engine, HybridConfig, WordPattern};
use proptest::prelude::*;

/// Small alphabets make matches (and overlaps) common.
fn text_and_pattern<T: std::fmt::Debug + Clone>(
    sym: impl Strategy<Value = T> + Clone,
) -> impl Strategy<Value = (Vec<T>, Vec<T>)> {
    (prop::collection::vec(sym.clone(), 0..400), prop::collection::vec(sym, 1..=16))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn byte_engines_agree((text, pat) in text_and_pattern(0u8..3)) {
        let p = WordPattern::new("p", pat).unwrap();
        let oracle = search(Engine::BruteForce, &text, &p).unwrap();
        for e in [Engine::Kmp, Engine::BoyerMoore, Engine::Hybrid] {
            let r = search(e, &text, &p).unwrap();
            prop_assert_eq!(&r.positions, &oracle.positions, "{}", e);
        }
        let kmp = search(Engine::Kmp, &text, &p).unwrap();
        prop_assert!(kmp.comparisons <= 2 * text.len() as u64);
    }

    #[test]
    fn word_engines_agree((text, pat) in text_and_pattern(prop::sample::select(vec![0u32, 0xdeadbeef, 7]))) {
        let p = WordPattern::new("p", pat).unwrap();
        let oracle = search(Engine::BruteForce, &text, &p).unwrap();
        for e in [Engine::Kmp, Engine::BoyerMoore, Engine::Hybrid] {
            prop_assert_eq!(&search(e, &text, &p).unwrap().positions, &oracle.positions, "{}", e);
        }
    }

    #[test]
    fn segmented_search_equals_sequential((text, pat) in text_and_pattern(0u8..2), segs in 1usize..9) {
        let p = WordPattern::new("p", pat).unwrap();
        let whole = search(Engine::Kmp, &text, &p).unwrap();
        for e in Engine::ALL {
            prop_assert_eq!(&par_search(e, &text, &p, segs).unwrap().positions, &whole.positions);
        }
    }

    #[test]
    fn hybrid_many_patterns(text in prop::collection::vec(0u32..3, 0..600),
                            pats in prop::collection::vec(prop::collection::vec(0u32..3, 1..=8), 1..5)) {
        let patterns: Vec<_> = pats.into_iter().enumerate()
            .map(|(i, p)| WordPattern::new(format!("p{i}"), p).unwrap())
            .collect();
        let out = hybrid_search(&text, &patterns, &HybridConfig::default()).unwrap();
        for (p, r) in patterns.iter().zip(&out.reports) {
            prop_assert_eq!(&r.report.positions, &search(Engine::BruteForce, &text, p).unwrap().positions);
        }
    }
}

#[test]
fn window_too_small_is_reported() {
    let p = WordPattern::new("long", vec![1u32; 9]).unwrap();
    let err = hybrid_search(&[1u32; 20], &[p], &HybridConfig::default()).unwrap_err();
    assert!(err.to_string().contains("smaller than the longest pattern"));
}
