//! Encrypt and decrypt a message, and compare a block against ChaCha20.

use echacha_sbc::cipher::{chacha20_block, init_state, keystream, xor_encrypt, CipherConfig, KeyMaterial};

fn main() -> anyhow::Result<()> {
    let km = KeyMaterial::from_bytes(&[0x42; 32], &[7; 16])?;
    let cfg = CipherConfig::default();

    let msg = b"attack at dawn; bring the 6x6 state";
    let ct = xor_encrypt(msg, &km, &cfg)?;
    println!("ciphertext  {}", hex::encode(&ct));
    assert_eq!(xor_encrypt(&ct, &km, &cfg)?, msg);

    let st = init_state(&km, &cfg)?;
    for r in 0..6 {
        println!("state row {r}  {:08x?}", st.row(r));
    }
    let ks = keystream(&km, 1, &cfg)?;
    println!("EChaCha20 block ({} bytes)  {}…", ks.len(), hex::encode(&ks[..32]));

    // The 4x4 reference takes a 96-bit nonce: leave the fourth word zero.
    let small = KeyMaterial::new(km.key, [7, 7, 7, 0], [0; 4]);
    println!("ChaCha20 block  ({} bytes)  {}…", 64, hex::encode(&chacha20_block(&small)?[..32]));
    Ok(())
}
