//! EChaCha20 and the ChaCha20 reference.

mod block;
mod chacha20;
mod config;
mod qrf;
mod state;

pub use block::{
    block, block_words, keystream, permute, xor_encrypt, KeystreamBlock, COLUMN_QUADS,
    DIAGONAL_QUADS,
};
pub use chacha20::chacha20_block;
pub use config::{CipherConfig, NonceWidth, Padding, RoundSchedule, Variant, PRESETS};
pub use qrf::{qrf, Qrf, QrfQuad, QrfVariant, ECHACHA_ROTATIONS};
pub use state::{init_state, KeyMaterial, StateMatrix, BLOCK_BYTES, SIGMA, STATE_WORDS};
