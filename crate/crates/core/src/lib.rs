//! Stringology-based cryptanalysis workbench for EChaCha20.
//!
//! The crate bundles five pieces that are meant to be used together:
//!
//! * [`cipher`]: the EChaCha20 cipher (6×6 state, six-rotation quarter-round)
//!   and a reference ChaCha20 block function.
//! * [`search`]: word-aligned exact matchers (KMP, Boyer-Moore, the windowed
//!   KMP/BM hybrid) and a brute-force oracle.
//! * [`freq`]: m-gram counting with z-score and χ² significance tests.
//! * [`differential`]: rotational-differential collision trials, avalanche
//!   profiling, rotation-constant sweeps and distinguisher advantage.
//! * [`dataset`]: fixed-key / variable-key keystream datasets with dual
//!   binary/hex encoding and a line-oriented file format.
//!
//! [`report`] glues them into the experiment runners used by the `sbc`
//! binary and writes CSV, JSON and SVG artifacts.
//!
//! ```
//! use echacha_sbc::cipher::{CipherConfig, KeyMaterial, keystream};
//!
//! let km = KeyMaterial::new([7; 8], [1, 2, 3, 4], [0; 4]);
//! let ks = keystream(&km, 2, &CipherConfig::default()).unwrap();
//! assert_eq!(ks.len(), 288);
//! ```

pub mod cipher;
pub mod dataset;
pub mod differential;
mod error;
pub mod freq;
pub mod report;
pub mod rng;
pub mod search;
pub mod word;

pub use error::{Error, Result};
