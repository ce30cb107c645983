//! Reference ChaCha20 block function (4×4 state, 20 rounds, 32-bit
//! counter, 96-bit nonce) used for comparative runs.

use super::state::{KeyMaterial, SIGMA};
use crate::{Error, Result};

#[inline(always)]
fn quarter(x: &mut [u32; 16], a: usize, b: usize, c: usize, d: usize) {
    x[a] = x[a].wrapping_add(x[b]);
    x[d] = (x[d] ^ x[a]).rotate_left(16);
    x[c] = x[c].wrapping_add(x[d]);
    x[b] = (x[b] ^ x[c]).rotate_left(12);
    x[a] = x[a].wrapping_add(x[b]);
    x[d] = (x[d] ^ x[a]).rotate_left(8);
    x[c] = x[c].wrapping_add(x[d]);
    x[b] = (x[b] ^ x[c]).rotate_left(7);
}

/// One 64-byte ChaCha20 block. Uses `counter[0]` as the block counter and
/// `nonce[0..3]` as the nonce; `nonce[3]` and `counter[1..]` must be zero.
pub fn chacha20_block(km: &KeyMaterial) -> Result<[u8; 64]> {
    if km.nonce[3] != 0 {
        return Err(Error::MalformedKey("ChaCha20 takes a 96-bit nonce".into()));
    }
    if km.counter[1..].iter().any(|&w| w != 0) {
        return Err(Error::MalformedKey("ChaCha20 takes a 32-bit counter".into()));
    }
    let mut s = [0u32; 16];
    s[..4].copy_from_slice(&SIGMA);
    s[4..12].copy_from_slice(&km.key);
    s[12] = km.counter[0];
    s[13..16].copy_from_slice(&km.nonce[..3]);

    let mut x = s;
    for _ in 0..10 {
        quarter(&mut x, 0, 4, 8, 12);
        quarter(&mut x, 1, 5, 9, 13);
        quarter(&mut x, 2, 6, 10, 14);
        quarter(&mut x, 3, 7, 11, 15);
        quarter(&mut x, 0, 5, 10, 15);
        quarter(&mut x, 1, 6, 11, 12);
        quarter(&mut x, 2, 7, 8, 13);
        quarter(&mut x, 3, 4, 9, 14);
    }
    let mut out = [0u8; 64];
    for (i, dst) in out.chunks_exact_mut(4).enumerate() {
        dst.copy_from_slice(&x[i].wrapping_add(s[i]).to_le_bytes());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rfc8439_material() -> KeyMaterial {
        let key: Vec<u8> = (0u8..32).collect();
        let nonce = hex::decode("000000090000004a00000000").unwrap();
        let mut padded = nonce.clone();
        padded.extend_from_slice(&[0; 4]);
        KeyMaterial::from_bytes(&key, &padded).unwrap().with_counter(1)
    }

    #[test]
    fn rfc8439_block_vector() {
        let out = chacha20_block(&rfc8439_material()).unwrap();
        assert_eq!(
            hex::encode(out),
            "10f1e7e4d13b5915500fdd1fa32071c4c7d1f4c733c068030422aa9ac3d46c4e\
             d2826446079faa0914c2d705d98b02a2b5129cd1de164eb9cbd083e8a2503c4e"
        );
    }

    #[test]
    fn zero_key_vector() {
        let out = chacha20_block(&KeyMaterial::default()).unwrap();
        assert_eq!(
            hex::encode(out),
            "76b8e0ada0f13d90405d6ae55386bd28bdd219b8a08ded1aa836efcc8b770dc7\
             da41597c5157488d7724e03fb8d84a376a43b8f41518a11cc387b669b2ee6586"
        );
    }

    #[test]
    fn deterministic_and_validated() {
        let km = rfc8439_material();
        assert_eq!(chacha20_block(&km).unwrap(), chacha20_block(&km).unwrap());
        let mut bad = km;
        bad.nonce[3] = 1;
        assert!(chacha20_block(&bad).is_err());
        let mut bad = km;
        bad.counter[2] = 1;
        assert!(chacha20_block(&bad).is_err());
    }
}
