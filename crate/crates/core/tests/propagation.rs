//! Difference growth through the quarter-round, checked against the Python
//! oracle (`tests/oracles/echacha_ref.py --stats`, 200k samples):
//! round-2 weight for Δ = (1,0,0,0) has mean 62.1450 and sd 6.3905, and the
//! 2-round avalanche word means are 0.4463 0.4306 0.4211 0.4709.

use echacha_sbc::cipher::{Qrf, QrfQuad};
use echacha_sbc::differential::{avalanche_profile, propagation_summary, propagation_track};

const ORACLE_MEAN_R2: f64 = 62.1450;
const ORACLE_SD_R2: f64 = 6.3905;
const ORACLE_WORD_MEANS: [f64; 4] = [0.4463, 0.4306, 0.4211, 0.4709];

#[test]
fn round_two_weight_matches_oracle() {
    let n = 10_000;
    let p = propagation_summary(&Qrf::echacha(), QrfQuad::new(1, 0, 0, 0), n, 4, 11).unwrap();
    let se = ORACLE_SD_R2 / (n as f64).sqrt();
    assert!((p.mean_weight[1] - ORACLE_MEAN_R2).abs() < 4.0 * se, "{:?}", p.mean_weight);
    // by round 4 the difference looks like a random 128-bit word
    assert!((p.mean_weight[3] - 64.0).abs() < 4.0 * (32.0f64).sqrt() / (n as f64).sqrt());
    assert_eq!(p.histograms[1].iter().sum::<u64>(), n);
}

#[test]
fn avalanche_word_means_match_oracle() {
    let p = avalanche_profile(&Qrf::echacha(), 2, 10_000, 5).unwrap();
    for (got, want) in p.word_means().iter().zip(ORACLE_WORD_MEANS) {
        assert!((got - want).abs() < 0.003, "{got} vs {want}");
    }
}

#[test]
fn track_is_xor_of_two_runs() {
    let q = Qrf::echacha();
    let x = QrfQuad::new(0x0123_4567, 0x89ab_cdef, 0xdead_beef, 0x0bad_f00d);
    let d = QrfQuad::new(0, 1 << 31, 0, 0);
    let track = propagation_track(&q, d, x, 3).unwrap();
    let (mut a, mut b) = (x, x.xor(d));
    for t in track {
        a = q.apply(a);
        b = q.apply(b);
        assert_eq!(t, a.xor(b));
    }
}
