//! Keystream datasets: generation, dual encoding and persistence.
//!
//! File format: an optional first line holding the JSON-encoded
//! [`DatasetConfig`], then one block per line as 288 lowercase hex digits
//! (36 words, 8 digits each, most-significant digit first). Blank lines are
//! not allowed between blocks.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cipher::{keystream, CipherConfig, KeyMaterial, NonceWidth, Variant, STATE_WORDS};
use crate::rng::{self, DEFAULT_SEED};
use crate::{Error, Result};

pub const HEX_CHARS: usize = STATE_WORDS * 8;
pub const BINARY_CHARS: usize = STATE_WORDS * 32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetMode {
    /// One key; nonces start at a random value and increment per block.
    #[default]
    FixedKey,
    /// Fresh key and nonce per block.
    VariableKey,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Entropy {
    /// ChaCha20 generator seeded from `rng_seed`; reproducible.
    #[default]
    Seeded,
    /// Operating-system entropy; not reproducible.
    Os,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub mode: DatasetMode,
    pub n_blocks: u64,
    pub rng_seed: u64,
    pub cipher: CipherConfig,
    #[serde(default)]
    pub entropy: Entropy,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            mode: DatasetMode::FixedKey,
            n_blocks: 10_000,
            rng_seed: DEFAULT_SEED,
            cipher: CipherConfig::default(),
            entropy: Entropy::Seeded,
        }
    }
}

fn nonce_mask(width: NonceWidth) -> u128 {
    match width {
        NonceWidth::Bits128 => u128::MAX,
        NonceWidth::Bits64 => u64::MAX as u128,
    }
}

fn draw_material(rng: &mut impl RngCore, width: NonceWidth) -> KeyMaterial {
    let key = std::array::from_fn(|_| rng.next_u32());
    let nonce = ((rng.next_u64() as u128) << 64 | rng.next_u64() as u128) & nonce_mask(width);
    KeyMaterial::new(key, [0; 4], [0; 4]).with_nonce_value(nonce)
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_blocks == 0 {
            return Err(Error::InvalidConfig("n_blocks must be at least 1".into()));
        }
        if self.cipher.variant != Variant::EChaCha20 {
            return Err(Error::InvalidConfig("datasets hold 36-word EChaCha20 blocks".into()));
        }
        self.cipher.validate()
    }

    /// Key, nonce and counter of block `index` for seeded datasets.
    ///
    /// Fixed-key: key and starting nonce come from stream 0 of the seed;
    /// block `i` uses nonce `n0 + i` (wrapping within the nonce width).
    /// Variable-key: block `i` draws its key and nonce from stream `i + 1`.
    /// The block counter is always zero.
    pub fn key_material(&self, index: u64) -> Result<KeyMaterial> {
        if self.entropy == Entropy::Os {
            return Err(Error::InvalidConfig("OS-entropy datasets are not reproducible".into()));
        }
        let width = self.cipher.nonce_width;
        Ok(match self.mode {
            DatasetMode::FixedKey => {
                let base = draw_material(&mut rng::stream(self.rng_seed, 0), width);
                let nonce = base.nonce_value().wrapping_add(index as u128) & nonce_mask(width);
                base.with_nonce_value(nonce)
            }
            DatasetMode::VariableKey => draw_material(&mut rng::stream(self.rng_seed, index + 1), width),
        })
    }
}

pub type BlockWords = [u32; STATE_WORDS];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    /// `None` for datasets loaded from a file without a header.
    pub config: Option<DatasetConfig>,
    pub blocks: Vec<BlockWords>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn encoded(&self, index: usize) -> EncodedBlock {
        encode_words(&self.blocks[index])
    }

    /// Blocks flattened back into the little-endian keystream byte order.
    pub fn keystream_bytes(&self) -> Vec<u8> {
        self.blocks
            .iter()
            .flat_map(|b| b.iter().flat_map(|w| w.to_le_bytes()))
            .collect()
    }

    pub fn words(&self) -> Vec<u32> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<dataset>", e);
        if let Some(cfg) = &self.config {
            serde_json::to_writer(&mut out, cfg)?;
            out.write_all(b"\n").map_err(io)?;
        }
        let mut line = String::with_capacity(HEX_CHARS + 1);
        for b in &self.blocks {
            line.clear();
            for w in b {
                write!(line, "{w:08x}").unwrap();
            }
            line.push('\n');
            out.write_all(line.as_bytes()).map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn persist(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file)).map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            e => e,
        })
    }

    /// Parses the dataset format; `path` only labels errors.
    pub fn read_from<R: BufRead>(input: R, path: &Path) -> Result<Dataset> {
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut config = None;
        let mut blocks = Vec::new();
        let mut last_line = 0;
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim_end();
            if i == 0 && line.starts_with('{') {
                let cfg: DatasetConfig =
                    serde_json::from_str(line).map_err(|e| parse_err(line_no, format!("bad header: {e}")))?;
                config = Some(cfg);
                continue;
            }
            blocks.push(decode_hex(line).map_err(|e| parse_err(line_no, e))?);
        }
        if let Some(cfg) = &config {
            if blocks.len() as u64 != cfg.n_blocks {
                return Err(parse_err(
                    last_line + 1,
                    format!("header promises {} blocks, file holds {}", cfg.n_blocks, blocks.len()),
                ));
            }
        }
        Ok(Dataset { config, blocks })
    }

    pub fn load(path: &Path) -> Result<Dataset> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Dataset::read_from(BufReader::new(file), path)
    }
}

/// A block in its three equivalent forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedBlock {
    pub words: BlockWords,
    /// 1152 characters, each word MSB first.
    pub binary: String,
    /// 288 lowercase hex characters.
    pub hex: String,
}

fn encode_words(words: &BlockWords) -> EncodedBlock {
    let mut binary = String::with_capacity(BINARY_CHARS);
    let mut hex = String::with_capacity(HEX_CHARS);
    for w in words {
        write!(binary, "{w:032b}").unwrap();
        write!(hex, "{w:08x}").unwrap();
    }
    EncodedBlock {
        words: *words,
        binary,
        hex,
    }
}

pub fn encode_block(words: &[u32]) -> Result<EncodedBlock> {
    let arr: &BlockWords = words.try_into().map_err(|_| Error::WordCount {
        expected: STATE_WORDS,
        got: words.len(),
    })?;
    Ok(encode_words(arr))
}

fn decode_radix(s: &str, digits: usize, radix: u32) -> std::result::Result<BlockWords, String> {
    if s.len() != digits * STATE_WORDS {
        return Err(format!(
            "expected {} characters, got {}",
            digits * STATE_WORDS,
            s.len()
        ));
    }
    if !s.is_ascii() {
        return Err("non-ASCII characters".into());
    }
    let mut out = [0u32; STATE_WORDS];
    for (i, w) in out.iter_mut().enumerate() {
        let part = &s[i * digits..(i + 1) * digits];
        *w = u32::from_str_radix(part, radix).map_err(|e| format!("word {i} ({part:?}): {e}"))?;
    }
    Ok(out)
}

pub fn decode_hex(s: &str) -> std::result::Result<BlockWords, String> {
    decode_radix(s, 8, 16)
}

pub fn decode_binary(s: &str) -> std::result::Result<BlockWords, String> {
    decode_radix(s, 32, 2)
}

pub fn generate_dataset(cfg: &DatasetConfig) -> Result<Dataset> {
    cfg.validate()?;
    let materials: Vec<KeyMaterial> = match cfg.entropy {
        Entropy::Seeded => (0..cfg.n_blocks).map(|i| cfg.key_material(i)).collect::<Result<_>>()?,
        Entropy::Os => {
            let mut os = rng::from_os();
            let width = cfg.cipher.nonce_width;
            let base = draw_material(&mut os, width);
            (0..cfg.n_blocks)
                .map(|i| match cfg.mode {
                    DatasetMode::FixedKey => base.with_nonce_value(
                        base.nonce_value().wrapping_add(i as u128) & nonce_mask(width),
                    ),
                    DatasetMode::VariableKey => draw_material(&mut os, width),
                })
                .collect()
        }
    };
    let blocks = materials
        .par_iter()
        .map(|km| {
            let bytes = keystream(km, 1, &cfg.cipher)?;
            let mut w = [0u32; STATE_WORDS];
            for (dst, c) in w.iter_mut().zip(bytes.chunks_exact(4)) {
                *dst = u32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        config: Some(*cfg),
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: DatasetMode, n: u64) -> DatasetConfig {
        DatasetConfig {
            mode,
            n_blocks: n,
            rng_seed: 42,
            ..DatasetConfig::default()
        }
    }

    #[test]
    fn encodings_of_known_words() {
        let mut w = [0u32; STATE_WORDS];
        w[0] = 0x61707865;
        let e = encode_block(&w).unwrap();
        assert_eq!(&e.hex[..8], "61707865");
        assert_eq!(&e.hex[8..16], "00000000");
        assert_eq!(&e.binary[..32], "01100001011100000111100001100101");
        assert_eq!(&e.binary[32..64], "0".repeat(32));
        assert_eq!(e.binary.len(), BINARY_CHARS);
        assert_eq!(e.hex.len(), HEX_CHARS);
        assert_eq!(decode_hex(&e.hex).unwrap(), w);
        assert_eq!(decode_binary(&e.binary).unwrap(), w);
        assert!(encode_block(&w[..35]).is_err());
    }

    #[test]
    fn single_block_equals_direct_call() {
        for mode in [DatasetMode::FixedKey, DatasetMode::VariableKey] {
            let c = cfg(mode, 1);
            let d = generate_dataset(&c).unwrap();
            let direct = keystream(&c.key_material(0).unwrap(), 1, &c.cipher).unwrap();
            assert_eq!(d.keystream_bytes(), direct);
        }
    }

    #[test]
    fn fixed_key_nonces_increment() {
        let c = cfg(DatasetMode::FixedKey, 1000);
        let n0 = c.key_material(0).unwrap();
        for i in [1u64, 17, 999] {
            let ki = c.key_material(i).unwrap();
            assert_eq!(ki.key, n0.key);
            assert_eq!(ki.nonce_value(), n0.nonce_value().wrapping_add(i as u128));
        }
        let c64 = DatasetConfig {
            cipher: CipherConfig {
                nonce_width: NonceWidth::Bits64,
                ..CipherConfig::default()
            },
            ..c
        };
        let km = c64.key_material(5).unwrap();
        assert_eq!(km.nonce[2..], [0, 0]);
        generate_dataset(&DatasetConfig { n_blocks: 4, ..c64 }).unwrap();
    }

    #[test]
    fn variable_key_differs_per_block() {
        let c = cfg(DatasetMode::VariableKey, 3);
        assert_ne!(c.key_material(0).unwrap().key, c.key_material(1).unwrap().key);
    }

    #[test]
    fn round_trip_and_errors() {
        let d = generate_dataset(&cfg(DatasetMode::VariableKey, 20)).unwrap();
        let mut buf = Vec::new();
        d.write_to(&mut buf).unwrap();
        let back = Dataset::read_from(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back, d);

        // truncate the last block
        let cut = &buf[..buf.len() - 10];
        match Dataset::read_from(cut, Path::new("mem")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 21),
            other => panic!("{other:?}"),
        }
        let empty = Dataset::read_from(&b""[..], Path::new("mem")).unwrap();
        assert!(empty.is_empty());
        assert!(empty.config.is_none());
    }

    #[test]
    fn zero_blocks_rejected() {
        assert!(generate_dataset(&cfg(DatasetMode::FixedKey, 0)).is_err());
        let cc = DatasetConfig {
            cipher: CipherConfig::preset("chacha20").unwrap(),
            ..cfg(DatasetMode::FixedKey, 1)
        };
        assert!(generate_dataset(&cc).is_err());
    }
}
