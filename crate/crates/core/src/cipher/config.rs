use serde::{Deserialize, Serialize};

use super::qrf::{Qrf, QrfVariant};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    #[serde(rename = "echacha20")]
    EChaCha20,
    #[serde(rename = "chacha20")]
    ChaCha20,
}

/// Order in which the quarter-round visits the 6×6 state.
///
/// `ColumnDiagonalV1` alternates two kinds of rounds. Even-numbered rounds
/// (0, 2, ...) are column rounds: for each column `i` the quarter-round is
/// applied to rows 0–3 of that column and then to rows 2–5. Odd-numbered
/// rounds are diagonal rounds: for each `j` the quarter-round is applied to
/// `(row0[j], row1[j+1], row2[j+2], row3[j+3])` and then to
/// `(row2[j], row3[j+1], row4[j+2], row5[j+3])`, column indices mod 6.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundSchedule {
    #[default]
    ColumnDiagonalV1,
}

/// Contents of rows 4–5 of the initial state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Padding {
    #[default]
    Zero,
    /// The four sigma constants repeated three times.
    Constant,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonceWidth {
    #[default]
    Bits128,
    /// Only nonce words 0 and 1 are used; words 2 and 3 must be zero.
    Bits64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CipherConfig {
    pub variant: Variant,
    pub rounds: u32,
    pub schedule: RoundSchedule,
    pub qrf: Qrf,
    pub padding: Padding,
    pub nonce_width: NonceWidth,
}

impl Default for CipherConfig {
    fn default() -> Self {
        CipherConfig {
            variant: Variant::EChaCha20,
            rounds: 20,
            schedule: RoundSchedule::ColumnDiagonalV1,
            qrf: Qrf::echacha(),
            padding: Padding::Zero,
            nonce_width: NonceWidth::Bits128,
        }
    }
}

/// Names accepted by [`CipherConfig::preset`].
pub const PRESETS: &[&str] = &["echacha-colrow-v1", "rfc-style-qrf", "chacha20"];

impl CipherConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = CipherConfig::default();
        match name {
            "echacha-colrow-v1" => Ok(base),
            "rfc-style-qrf" => Ok(CipherConfig {
                qrf: Qrf::rfc_style(),
                ..base
            }),
            "chacha20" => Ok(CipherConfig {
                variant: Variant::ChaCha20,
                ..base
            }),
            other => Err(Error::InvalidConfig(format!(
                "unknown preset {other:?} (known: {})",
                PRESETS.join(", ")
            ))),
        }
    }

    pub fn with_rounds(self, rounds: u32) -> Self {
        CipherConfig { rounds, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds < 2 || !self.rounds.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "rounds must be even and at least 2, got {}",
                self.rounds
            )));
        }
        if self.variant == Variant::ChaCha20 && self.rounds != 20 {
            return Err(Error::InvalidConfig("the ChaCha20 reference is fixed at 20 rounds".into()));
        }
        Qrf::with_rotations(self.qrf.variant, self.qrf.rotations)?;
        Ok(())
    }

    /// Keystream bytes per block: 144 for EChaCha20, 64 for ChaCha20.
    pub fn block_len(&self) -> usize {
        match self.variant {
            Variant::EChaCha20 => super::BLOCK_BYTES,
            Variant::ChaCha20 => 64,
        }
    }

    /// Parses a TOML cipher description.
    ///
    /// ```toml
    /// preset = "rfc-style-qrf"   # optional, defaults to echacha-colrow-v1
    /// rounds = 12                # optional overrides
    /// padding = "constant"
    /// nonce_width = "bits64"
    /// rotations = [16, 12, 8, 7, 4, 2]
    /// qrf_variant = "paper-order"
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct File {
            preset: Option<String>,
            rounds: Option<u32>,
            padding: Option<Padding>,
            nonce_width: Option<NonceWidth>,
            rotations: Option<[u32; 6]>,
            qrf_variant: Option<QrfVariant>,
        }
        let file: File = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut cfg = CipherConfig::preset(file.preset.as_deref().unwrap_or("echacha-colrow-v1"))?;
        if let Some(r) = file.rounds {
            cfg.rounds = r;
        }
        if let Some(p) = file.padding {
            cfg.padding = p;
        }
        if let Some(n) = file.nonce_width {
            cfg.nonce_width = n;
        }
        if let Some(v) = file.qrf_variant {
            cfg.qrf.variant = v;
        }
        if let Some(rot) = file.rotations {
            cfg.qrf = Qrf::with_rotations(cfg.qrf.variant, rot)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
