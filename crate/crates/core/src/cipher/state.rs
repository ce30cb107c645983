use std::ops::Index;

use serde::{Deserialize, Serialize};

use super::config::{CipherConfig, NonceWidth, Padding};
use crate::{Error, Result};

/// "expand 32-byte k" as four little-endian words.
pub const SIGMA: [u32; 4] = [0x61707865, 0x3320646e, 0x79622d32, 0x6b206574];

pub const STATE_WORDS: usize = 36;
pub const BLOCK_BYTES: usize = STATE_WORDS * 4;

/// Key, nonce and block counter. The counter is a 128-bit little-endian
/// integer: `counter[0]` is the least significant word.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub key: [u32; 8],
    pub nonce: [u32; 4],
    pub counter: [u32; 4],
}

impl KeyMaterial {
    pub const fn new(key: [u32; 8], nonce: [u32; 4], counter: [u32; 4]) -> Self {
        KeyMaterial {
            key,
            nonce,
            counter,
        }
    }

    /// Builds key material from word slices. The nonce may be 4 words, or 2
    /// words for 64-bit mode (upper words zero). An empty counter is zero.
    pub fn from_words(key: &[u32], nonce: &[u32], counter: &[u32]) -> Result<Self> {
        let key: [u32; 8] = key
            .try_into()
            .map_err(|_| Error::MalformedKey(format!("key must be 8 words, got {}", key.len())))?;
        let mut n = [0u32; 4];
        match nonce.len() {
            2 | 4 => n[..nonce.len()].copy_from_slice(nonce),
            len => return Err(Error::MalformedKey(format!("nonce must be 2 or 4 words, got {len}"))),
        }
        if counter.len() > 4 {
            return Err(Error::MalformedKey(format!(
                "counter must be at most 4 words, got {}",
                counter.len()
            )));
        }
        let mut c = [0u32; 4];
        c[..counter.len()].copy_from_slice(counter);
        Ok(KeyMaterial::new(key, n, c))
    }

    /// Little-endian decoding of a 32-byte key and an 8- or 16-byte nonce.
    pub fn from_bytes(key: &[u8], nonce: &[u8]) -> Result<Self> {
        if key.len() != 32 {
            return Err(Error::MalformedKey(format!("key must be 32 bytes, got {}", key.len())));
        }
        if nonce.len() != 8 && nonce.len() != 16 {
            return Err(Error::MalformedKey(format!(
                "nonce must be 8 or 16 bytes, got {}",
                nonce.len()
            )));
        }
        let k: Vec<u32> = le_words(key);
        let n: Vec<u32> = le_words(nonce);
        KeyMaterial::from_words(&k, &n, &[])
    }

    pub fn counter_value(&self) -> u128 {
        self.counter
            .iter()
            .rev()
            .fold(0u128, |acc, &w| (acc << 32) | w as u128)
    }

    pub fn with_counter(mut self, value: u128) -> Self {
        for (i, w) in self.counter.iter_mut().enumerate() {
            *w = (value >> (32 * i)) as u32;
        }
        self
    }

    pub fn nonce_value(&self) -> u128 {
        self.nonce.iter().rev().fold(0u128, |acc, &w| (acc << 32) | w as u128)
    }

    pub fn with_nonce_value(mut self, value: u128) -> Self {
        for (i, w) in self.nonce.iter_mut().enumerate() {
            *w = (value >> (32 * i)) as u32;
        }
        self
    }
}

fn le_words(bytes: &[u8]) -> Vec<u32> {
    bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect()
}

/// The 6×6 EChaCha20 state, row-major `m0..m35`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StateMatrix([u32; STATE_WORDS]);

impl StateMatrix {
    pub const fn from_words(words: [u32; STATE_WORDS]) -> Self {
        StateMatrix(words)
    }

    pub fn try_from_slice(words: &[u32]) -> Result<Self> {
        let arr: [u32; STATE_WORDS] = words.try_into().map_err(|_| Error::WordCount {
            expected: STATE_WORDS,
            got: words.len(),
        })?;
        Ok(StateMatrix(arr))
    }

    pub fn words(&self) -> &[u32; STATE_WORDS] {
        &self.0
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.0[6 * r..6 * r + 6]
    }
}

impl Index<usize> for StateMatrix {
    type Output = u32;

    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

/// Lays out the initial state:
///
/// ```text
/// row 0: σ0 σ1 σ2 σ3 k0 k1
/// row 1: k2 k3 k4 k5 k6 k7
/// row 2: n0 n1 n2 n3 c0 c1
/// row 3: c2 c3  0  0  0  0
/// row 4-5: padding (zero, or σ repeated)
/// ```
pub fn init_state(km: &KeyMaterial, config: &CipherConfig) -> Result<StateMatrix> {
    if config.nonce_width == NonceWidth::Bits64 && (km.nonce[2] != 0 || km.nonce[3] != 0) {
        return Err(Error::MalformedKey(
            "64-bit nonce mode requires nonce words 2 and 3 to be zero".into(),
        ));
    }
    let mut m = [0u32; STATE_WORDS];
    m[0..4].copy_from_slice(&SIGMA);
    m[4..12].copy_from_slice(&km.key);
    m[12..16].copy_from_slice(&km.nonce);
    m[16..20].copy_from_slice(&km.counter);
    if config.padding == Padding::Constant {
        for (i, w) in m[24..].iter_mut().enumerate() {
            *w = SIGMA[i % 4];
        }
    }
    Ok(StateMatrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_material_layout() {
        let s = init_state(&KeyMaterial::default(), &CipherConfig::default()).unwrap();
        assert_eq!(&s.words()[..4], &SIGMA);
        assert!(s.words()[4..].iter().all(|&w| w == 0));
    }

    #[test]
    fn key_nonce_counter_placement() {
        let mut km = KeyMaterial::default();
        km.key[0] = 0xFFFF_FFFF;
        km.key[7] = 7;
        km.nonce = [0xa, 0xb, 0xc, 0xd];
        km.counter = [1, 2, 3, 4];
        let s = init_state(&km, &CipherConfig::default()).unwrap();
        assert_eq!(s[4], 0xFFFF_FFFF);
        assert_eq!(s[11], 7);
        assert_eq!(s.row(2), &[0xa, 0xb, 0xc, 0xd, 1, 2]);
        assert_eq!(s.row(3), &[3, 4, 0, 0, 0, 0]);
    }

    #[test]
    fn deterministic() {
        let km = KeyMaterial::new([9; 8], [1, 2, 3, 4], [5, 0, 0, 0]);
        let cfg = CipherConfig::default();
        assert_eq!(init_state(&km, &cfg).unwrap(), init_state(&km, &cfg).unwrap());
    }

    #[test]
    fn constant_padding() {
        let cfg = CipherConfig {
            padding: Padding::Constant,
            ..CipherConfig::default()
        };
        let s = init_state(&KeyMaterial::default(), &cfg).unwrap();
        assert_eq!(s.row(4), &[SIGMA[0], SIGMA[1], SIGMA[2], SIGMA[3], SIGMA[0], SIGMA[1]]);
        assert_eq!(s[35], SIGMA[3]);
    }

    #[test]
    fn nonce_width_64() {
        let cfg = CipherConfig {
            nonce_width: NonceWidth::Bits64,
            ..CipherConfig::default()
        };
        let km = KeyMaterial::from_words(&[0; 8], &[1, 2], &[]).unwrap();
        assert!(init_state(&km, &cfg).is_ok());
        let wide = KeyMaterial::new([0; 8], [1, 2, 3, 0], [0; 4]);
        assert!(init_state(&wide, &cfg).is_err());
    }

    #[test]
    fn malformed_lengths_rejected() {
        assert!(KeyMaterial::from_words(&[0; 7], &[0; 4], &[]).is_err());
        assert!(KeyMaterial::from_words(&[0; 8], &[0; 3], &[]).is_err());
        assert!(KeyMaterial::from_words(&[0; 8], &[0; 4], &[0; 5]).is_err());
        assert!(KeyMaterial::from_bytes(&[0; 31], &[0; 16]).is_err());
        assert!(KeyMaterial::from_bytes(&[0; 32], &[0; 12]).is_err());
        let km = KeyMaterial::from_bytes(&[1; 32], &[2; 8]).unwrap();
        assert_eq!(km.key[0], 0x01010101);
        assert_eq!(km.nonce, [0x02020202, 0x02020202, 0, 0]);
    }

    #[test]
    fn counter_roundtrip() {
        let km = KeyMaterial::default().with_counter(0x0000_0001_0000_0002_0000_0003_0000_0004);
        assert_eq!(km.counter, [4, 3, 2, 1]);
        assert_eq!(km.counter_value(), 0x0000_0001_0000_0002_0000_0003_0000_0004);
    }
}
