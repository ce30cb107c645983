//! Exact pattern matching over byte or 32-bit word alphabets.
//!
//! All engines report every occurrence, overlapping ones included, and
//! count the symbol comparisons they perform. [`brute_force_search`] is the
//! ground truth the other engines are tested against.

mod bm;
mod brute;
mod hybrid;
pub mod io;
mod kmp;

use std::fmt;
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bm::{bm_preprocess, bm_search, BadCharTable, GoodSuffixTable};
pub use brute::brute_force_search;
pub use hybrid::{
    hierarchy_probability, hybrid_search, HierarchyEstimate, HybridConfig, HybridOutcome,
    HybridPatternReport,
};
pub use kmp::{kmp_preprocess, kmp_search, PrefixTable};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alphabet {
    Byte,
    Word,
}

impl Alphabet {
    pub fn name(self) -> &'static str {
        match self {
            Alphabet::Byte => "byte",
            Alphabet::Word => "word",
        }
    }
}

/// A searchable symbol: `u8` for byte-level, `u32` for word-aligned analysis.
pub trait Symbol: Copy + Eq + Hash + fmt::Debug + Send + Sync + 'static {
    const ALPHABET: Alphabet;
    const BITS: u32;

    /// XOR of two symbols widened to 32 bits; zero iff they are equal.
    fn fold(self, other: Self) -> u32;
}

impl Symbol for u8 {
    const ALPHABET: Alphabet = Alphabet::Byte;
    const BITS: u32 = 8;

    #[inline(always)]
    fn fold(self, other: Self) -> u32 {
        (self ^ other) as u32
    }
}

impl Symbol for u32 {
    const ALPHABET: Alphabet = Alphabet::Word;
    const BITS: u32 = 32;

    #[inline(always)]
    fn fold(self, other: Self) -> u32 {
        self ^ other
    }
}

/// Text to be searched.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolStream<T>(pub Vec<T>);

impl<T> std::ops::Deref for SymbolStream<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl SymbolStream<u32> {
    /// Little-endian words; a trailing partial word is dropped.
    pub fn words_from_le_bytes(bytes: &[u8]) -> Self {
        SymbolStream(
            bytes
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        )
    }
}

impl SymbolStream<u8> {
    pub fn bytes(bytes: impl Into<Vec<u8>>) -> Self {
        SymbolStream(bytes.into())
    }
}

/// A non-empty pattern with an opaque identifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordPattern<T> {
    pub id: String,
    symbols: Vec<T>,
}

impl<T: Symbol> WordPattern<T> {
    pub fn new(id: impl Into<String>, symbols: Vec<T>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyPattern);
        }
        Ok(WordPattern {
            id: id.into(),
            symbols,
        })
    }

    pub fn symbols(&self) -> &[T] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Pattern length in bits (`|P|`).
    pub fn bits(&self) -> u32 {
        self.symbols.len() as u32 * T::BITS
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engine {
    #[serde(rename = "kmp")]
    Kmp,
    #[serde(rename = "bm")]
    BoyerMoore,
    #[serde(rename = "hybrid")]
    Hybrid,
    #[serde(rename = "brute")]
    BruteForce,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Kmp, Engine::BoyerMoore, Engine::Hybrid, Engine::BruteForce];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Kmp => "kmp",
            Engine::BoyerMoore => "bm",
            Engine::Hybrid => "hybrid",
            Engine::BruteForce => "brute",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kmp" => Ok(Engine::Kmp),
            "bm" | "boyer-moore" => Ok(Engine::BoyerMoore),
            "hybrid" => Ok(Engine::Hybrid),
            "brute" | "brute-force" => Ok(Engine::BruteForce),
            other => Err(format!("unknown engine {other:?}")),
        }
    }
}

/// Occurrences of one pattern found by one engine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub pattern_id: String,
    pub engine: Engine,
    /// Start offsets in symbols, strictly increasing.
    pub positions: Vec<usize>,
    pub comparisons: u64,
    pub windows_scanned: u64,
}

impl MatchReport {
    pub(crate) fn new(pattern_id: &str, engine: Engine) -> Self {
        MatchReport {
            pattern_id: pattern_id.to_string(),
            engine,
            positions: Vec::new(),
            comparisons: 0,
            windows_scanned: 0,
        }
    }
}

/// Runs a single-pattern engine. The hybrid engine is run with its default
/// configuration, falling back to a window as large as the pattern.
pub fn search<T: Symbol>(engine: Engine, text: &[T], pattern: &WordPattern<T>) -> Result<MatchReport> {
    Ok(match engine {
        Engine::Kmp => kmp_search(text, pattern, &kmp_preprocess(pattern)),
        Engine::BoyerMoore => bm_search(text, pattern, &bm_preprocess(pattern)),
        Engine::BruteForce => brute_force_search(text, pattern),
        Engine::Hybrid => {
            let mut cfg = HybridConfig::default();
            let window_symbols = (cfg.window_bits / T::BITS) as usize;
            if window_symbols < pattern.len() {
                cfg.window_bits = pattern.len() as u32 * T::BITS;
            }
            let outcome = hybrid_search(text, std::slice::from_ref(pattern), &cfg)?;
            outcome.reports.into_iter().next().expect("one pattern in, one report out").report
        }
    })
}

/// Splits `text` into `segments` pieces overlapping by `m - 1` symbols and
/// searches them in parallel. The merged report has the same positions as a
/// single sequential run.
pub fn par_search<T: Symbol>(
    engine: Engine,
    text: &[T],
    pattern: &WordPattern<T>,
    segments: usize,
) -> Result<MatchReport> {
    let m = pattern.len();
    let n = text.len();
    let segments = segments.max(1);
    let step = n.div_ceil(segments).max(1);
    let starts: Vec<usize> = (0..n).step_by(step).collect();
    let parts: Vec<Result<MatchReport>> = starts
        .par_iter()
        .map(|&s| {
            let end = (s + step + m - 1).min(n);
            let mut r = search(engine, &text[s..end], pattern)?;
            // Keep only matches that start inside this segment's own range.
            r.positions.retain(|&p| p < step);
            r.positions.iter_mut().for_each(|p| *p += s);
            Ok(r)
        })
        .collect();
    let mut merged = MatchReport::new(&pattern.id, engine);
    for part in parts {
        let part = part?;
        merged.positions.extend(part.positions);
        merged.comparisons += part.comparisons;
        merged.windows_scanned += part.windows_scanned;
    }
    Ok(merged)
}

/// Text loaded at run time, alphabet decided by the caller or file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyStream {
    Bytes(SymbolStream<u8>),
    Words(SymbolStream<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyPattern {
    Bytes(WordPattern<u8>),
    Words(WordPattern<u32>),
}

impl AnyStream {
    pub fn alphabet(&self) -> Alphabet {
        match self {
            AnyStream::Bytes(_) => Alphabet::Byte,
            AnyStream::Words(_) => Alphabet::Word,
        }
    }
}

impl AnyPattern {
    pub fn alphabet(&self) -> Alphabet {
        match self {
            AnyPattern::Bytes(_) => Alphabet::Byte,
            AnyPattern::Words(_) => Alphabet::Word,
        }
    }

    pub fn id(&self) -> &str {
        match self {
            AnyPattern::Bytes(p) => &p.id,
            AnyPattern::Words(p) => &p.id,
        }
    }
}

/// Dynamic dispatch over alphabets; mismatched alphabets are an error.
pub fn search_any(engine: Engine, text: &AnyStream, pattern: &AnyPattern) -> Result<MatchReport> {
    match (text, pattern) {
        (AnyStream::Bytes(t), AnyPattern::Bytes(p)) => search(engine, t, p),
        (AnyStream::Words(t), AnyPattern::Words(p)) => search(engine, t, p),
        _ => Err(Error::AlphabetMismatch {
            text: text.alphabet().name(),
            pattern: pattern.alphabet().name(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_pattern_rejected() {
        assert!(matches!(WordPattern::<u8>::new("e", vec![]), Err(Error::EmptyPattern)));
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let text = AnyStream::Bytes(SymbolStream::bytes(vec![1, 2, 3]));
        let pat = AnyPattern::Words(WordPattern::new("w", vec![1u32]).unwrap());
        for engine in Engine::ALL {
            assert!(matches!(
                search_any(engine, &text, &pat),
                Err(Error::AlphabetMismatch { .. })
            ));
        }
    }

    #[test]
    fn parallel_segments_match_sequential() {
        let text: Vec<u8> = (0..5000u32).map(|i| (i * 7 % 5) as u8).collect();
        let pat = WordPattern::new("p", vec![0u8, 2, 4]).unwrap();
        for engine in Engine::ALL {
            let seq = search(engine, &text, &pat).unwrap();
            for segs in [1, 2, 3, 7, 64] {
                let par = par_search(engine, &text, &pat, segs).unwrap();
                assert_eq!(par.positions, seq.positions, "{engine} {segs}");
            }
        }
    }

    #[test]
    fn words_from_bytes() {
        let s = SymbolStream::words_from_le_bytes(&[1, 0, 0, 0, 0xff, 0, 0, 0x80, 9]);
        assert_eq!(&*s, &[1, 0x8000_00ff]);
    }
}
