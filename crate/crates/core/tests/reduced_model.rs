//! Scaled-down oracle: the quarter-round on 8-bit words (rotations mod 8)
//! has a 2^32 input space, small enough to enumerate. The exact counts
//! below come from `exhaustive_reduced_model` (run with `--ignored`) and
//! are compared against the sampling harness.

use echacha_sbc::cipher::{Qrf, QrfQuad};
use echacha_sbc::differential::{collision_trials, TrialConfig};

const DELTA: [u8; 4] = [1, 0, 0, 0];

/// One-round partial collisions (0 < hw ≤ 4) over all 2^32 inputs.
const EXACT_PARTIAL_1R: u64 = 390_088_704;

/// Straight-line 8-bit transcription, independent of the library code.
#[allow(clippy::identity_op)]
fn qrf8([mut a, mut b, mut c, mut d]: [u8; 4]) -> [u8; 4] {
    a = a.wrapping_add(b); d = (d ^ a).rotate_left(16 % 8);
    b = b.wrapping_add(c); c = (c ^ b).rotate_left(12 % 8);
    c = c.wrapping_add(d); b = (b ^ c).rotate_left(8 % 8);
    d = d.wrapping_add(a); c = (c ^ d).rotate_left(7 % 8);
    a = a.wrapping_add(b); d = (d ^ a).rotate_left(4 % 8);
    b = b.wrapping_add(c); c = (c ^ b).rotate_left(2 % 8);
    [a, b, c, d]
}

fn enumerate() -> (u64, u64) {
    let (mut full, mut partial) = (0u64, 0u64);
    for hi in 0..=u16::MAX {
        for lo in 0..=u16::MAX {
            let x = [(hi >> 8) as u8, hi as u8, (lo >> 8) as u8, lo as u8];
            let x2 = [x[0] ^ DELTA[0], x[1] ^ DELTA[1], x[2] ^ DELTA[2], x[3] ^ DELTA[3]];
            let (y, y2) = (qrf8(x), qrf8(x2));
            let w: u32 = (0..4).map(|i| (y[i] ^ y2[i]).count_ones()).sum();
            if w == 0 {
                full += 1;
            } else if w <= 4 {
                partial += 1;
            }
        }
    }
    (full, partial)
}

#[test]
#[ignore = "enumerates 2^32 inputs; run in release mode"]
fn exhaustive_reduced_model() {
    let (full, partial) = enumerate();
    println!("8-bit model, 1 round: full={full} partial={partial}");
    assert_eq!(full, 0);
    assert_eq!(partial, EXACT_PARTIAL_1R);
}

#[test]
fn transcription_matches_library() {
    let q = Qrf::echacha();
    for x in [[0u8, 0, 0, 0], [1, 0, 0, 0], [0xde, 0xad, 0xbe, 0xef], [0xff; 4]] {
        assert_eq!(q.apply(QrfQuad::from(x)).to_array(), qrf8(x));
    }
}

#[test]
fn sampled_rate_matches_enumeration() {
    let cfg = TrialConfig {
        trials: 1 << 18,
        rounds: vec![1],
        ..TrialConfig::default()
    };
    let stats = collision_trials(&Qrf::echacha(), &DELTA, &cfg).unwrap();
    let r = &stats.per_round[0];
    let p = EXACT_PARTIAL_1R as f64 / 4_294_967_296.0;
    let se = (p * (1.0 - p) / cfg.trials as f64).sqrt();
    assert_eq!(r.full_collisions, 0);
    assert!(
        (r.partial_rate() - p).abs() < 4.0 * se,
        "sampled {} vs exact {p} (se {se})",
        r.partial_rate()
    );
}

#[test]
fn reduced_model_is_a_bijection_on_a_slice() {
    // Exhaustive over a, b with c, d fixed: distinct inputs, distinct outputs.
    let q = Qrf::echacha();
    let mut seen = std::collections::HashSet::new();
    for a in 0..=255u8 {
        for b in 0..=255u8 {
            let y = q.apply(QrfQuad::new(a, b, 0x5a, 0xc3));
            assert!(seen.insert(y));
            assert_eq!(q.invert(y), QrfQuad::new(a, b, 0x5a, 0xc3));
        }
    }
}
