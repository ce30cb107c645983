use rayon::prelude::*;

use super::chacha20::chacha20_block;
use super::config::{CipherConfig, RoundSchedule, Variant};
use super::qrf::{Qrf, QrfQuad};
use super::state::{init_state, KeyMaterial, StateMatrix, BLOCK_BYTES, STATE_WORDS};
use crate::{Error, Result};

const fn idx(row: usize, col: usize) -> usize {
    6 * row + col
}

const fn column_quads() -> [[usize; 4]; 12] {
    let mut out = [[0; 4]; 12];
    let mut col = 0;
    while col < 6 {
        out[2 * col] = [idx(0, col), idx(1, col), idx(2, col), idx(3, col)];
        out[2 * col + 1] = [idx(2, col), idx(3, col), idx(4, col), idx(5, col)];
        col += 1;
    }
    out
}

const fn diagonal_quads() -> [[usize; 4]; 12] {
    let mut out = [[0; 4]; 12];
    let mut j = 0;
    while j < 6 {
        out[2 * j] = [
            idx(0, j),
            idx(1, (j + 1) % 6),
            idx(2, (j + 2) % 6),
            idx(3, (j + 3) % 6),
        ];
        out[2 * j + 1] = [
            idx(2, j),
            idx(3, (j + 1) % 6),
            idx(4, (j + 2) % 6),
            idx(5, (j + 3) % 6),
        ];
        j += 1;
    }
    out
}

/// Quarter-round index sets of a column round, in application order.
pub const COLUMN_QUADS: [[usize; 4]; 12] = column_quads();
/// Quarter-round index sets of a diagonal round, in application order.
pub const DIAGONAL_QUADS: [[usize; 4]; 12] = diagonal_quads();

/// One EChaCha20 keystream block (36 little-endian words).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct KeystreamBlock(pub [u8; BLOCK_BYTES]);

impl KeystreamBlock {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn words(&self) -> [u32; STATE_WORDS] {
        let mut w = [0u32; STATE_WORDS];
        for (dst, c) in w.iter_mut().zip(self.0.chunks_exact(4)) {
            *dst = u32::from_le_bytes([c[0], c[1], c[2], c[3]]);
        }
        w
    }
}

impl std::fmt::Debug for KeystreamBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KeystreamBlock({})", hex::encode(self.0))
    }
}

#[inline]
fn apply_quads(x: &mut [u32; STATE_WORDS], quads: &[[usize; 4]; 12], qrf: &Qrf) {
    for q in quads {
        let out = qrf.apply(QrfQuad::new(x[q[0]], x[q[1]], x[q[2]], x[q[3]]));
        x[q[0]] = out.a;
        x[q[1]] = out.b;
        x[q[2]] = out.c;
        x[q[3]] = out.d;
    }
}

/// Runs `rounds` rounds of the 6×6 permutation in place (no feed-forward).
pub fn permute(x: &mut [u32; STATE_WORDS], rounds: u32, schedule: RoundSchedule, qrf: &Qrf) {
    match schedule {
        RoundSchedule::ColumnDiagonalV1 => {
            for r in 0..rounds {
                let quads = if r % 2 == 0 { &COLUMN_QUADS } else { &DIAGONAL_QUADS };
                apply_quads(x, quads, qrf);
            }
        }
    }
}

/// Permutation followed by word-wise feed-forward of the input state.
pub fn block_words(state: &StateMatrix, config: &CipherConfig) -> [u32; STATE_WORDS] {
    let mut x = *state.words();
    permute(&mut x, config.rounds, config.schedule, &config.qrf);
    for (o, s) in x.iter_mut().zip(state.words()) {
        *o = o.wrapping_add(*s);
    }
    x
}

/// Block function. Does not validate `config.rounds`; zero rounds yields
/// the doubled input state.
pub fn block(state: &StateMatrix, config: &CipherConfig) -> KeystreamBlock {
    let words = block_words(state, config);
    let mut out = [0u8; BLOCK_BYTES];
    for (dst, w) in out.chunks_exact_mut(4).zip(words) {
        dst.copy_from_slice(&w.to_le_bytes());
    }
    KeystreamBlock(out)
}

fn check_counter(km: &KeyMaterial, n_blocks: u64, config: &CipherConfig) -> Result<()> {
    let start = km.counter_value();
    let limit = match config.variant {
        Variant::EChaCha20 => u128::MAX,
        Variant::ChaCha20 => u32::MAX as u128,
    };
    let last_offset = n_blocks.saturating_sub(1) as u128;
    if start > limit || limit - start < last_offset {
        return Err(Error::CounterOverflow {
            start,
            blocks: n_blocks,
        });
    }
    Ok(())
}

/// Concatenated blocks for counters `c, c+1, ..., c+n_blocks-1`.
///
/// Blocks are generated in parallel; the output is identical to calling
/// [`block`] once per counter in order.
pub fn keystream(km: &KeyMaterial, n_blocks: u64, config: &CipherConfig) -> Result<Vec<u8>> {
    config.validate()?;
    if n_blocks == 0 {
        return Err(Error::InvalidConfig("n_blocks must be at least 1".into()));
    }
    check_counter(km, n_blocks, config)?;
    // Rejects malformed nonce widths up front.
    init_state(km, config)?;

    let len = config.block_len();
    let start = km.counter_value();
    let mut out = vec![0u8; len * n_blocks as usize];
    out.par_chunks_mut(len)
        .enumerate()
        .try_for_each(|(i, chunk)| -> Result<()> {
            let km_i = km.with_counter(start + i as u128);
            match config.variant {
                Variant::EChaCha20 => {
                    let state = init_state(&km_i, config)?;
                    chunk.copy_from_slice(block(&state, config).as_bytes());
                }
                Variant::ChaCha20 => chunk.copy_from_slice(&chacha20_block(&km_i)?),
            }
            Ok(())
        })?;
    Ok(out)
}

/// XORs `plaintext` with the keystream; applying it twice is the identity.
pub fn xor_encrypt(plaintext: &[u8], km: &KeyMaterial, config: &CipherConfig) -> Result<Vec<u8>> {
    if plaintext.is_empty() {
        config.validate()?;
        return Ok(Vec::new());
    }
    let n_blocks = plaintext.len().div_ceil(config.block_len()) as u64;
    let ks = keystream(km, n_blocks, config)?;
    Ok(plaintext.iter().zip(&ks).map(|(p, k)| p ^ k).collect())
}
