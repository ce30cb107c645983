//! Loading texts and patterns; writing match reports.
//!
//! Hex text files may contain whitespace, blank lines, `#` comments and a
//! leading JSON header line (as written by the dataset module), all of which
//! are ignored. In the word alphabet each 8 hex digits are one word written
//! most-significant digit first (`61707865` is `0x61707865`); raw binary
//! files are read as little-endian words.

use std::io::Write;
use std::path::Path;

use super::{Alphabet, AnyPattern, AnyStream, MatchReport, SymbolStream, WordPattern};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Raw,
    Hex,
}

impl Encoding {
    /// `.hex` and `.txt` files are hex; anything else is raw.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("hex") | Some("txt") => Encoding::Hex,
            _ => Encoding::Raw,
        }
    }
}

fn parse_hex_symbols(digits: &str, alphabet: Alphabet, path: &Path, line: usize) -> Result<AnyStream> {
    let err = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    match alphabet {
        Alphabet::Byte => hex::decode(digits)
            .map(|b| AnyStream::Bytes(SymbolStream(b)))
            .map_err(|e| err(e.to_string())),
        Alphabet::Word => {
            if !digits.len().is_multiple_of(8) {
                return Err(err(format!("{} hex digits is not a whole number of words", digits.len())));
            }
            let words = (0..digits.len())
                .step_by(8)
                .map(|i| u32::from_str_radix(&digits[i..i + 8], 16).map_err(|e| err(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyStream::Words(SymbolStream(words)))
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn load_stream(path: &Path, alphabet: Alphabet, encoding: Encoding) -> Result<AnyStream> {
    let data = read(path)?;
    match encoding {
        Encoding::Raw => Ok(match alphabet {
            Alphabet::Byte => AnyStream::Bytes(SymbolStream(data)),
            Alphabet::Word => {
                if data.len() % 4 != 0 {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: 0,
                        msg: format!("{} bytes is not a whole number of words", data.len()),
                    });
                }
                AnyStream::Words(SymbolStream::words_from_le_bytes(&data))
            }
        }),
        Encoding::Hex => {
            let text = String::from_utf8(data).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                msg: e.to_string(),
            })?;
            let mut digits = String::new();
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.starts_with('{') {
                    continue;
                }
                digits.extend(line.chars().filter(|c| !c.is_whitespace()));
            }
            parse_hex_symbols(&digits, alphabet, path, 0)
        }
    }
}

/// One pattern per line: `<hex>` or `<id> <hex>`. Lines without an id are
/// named `p<line>`.
pub fn load_patterns(path: &Path, alphabet: Alphabet) -> Result<Vec<AnyPattern>> {
    let data = read(path)?;
    let text = String::from_utf8_lossy(&data);
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (id, digits) = match line.split_once(char::is_whitespace) {
            Some((id, rest)) => (id.to_string(), rest.trim().to_string()),
            None => (format!("p{line_no}"), line.to_string()),
        };
        let pattern = match parse_hex_symbols(&digits, alphabet, path, line_no)? {
            AnyStream::Bytes(s) => AnyPattern::Bytes(WordPattern::new(id, s.0)?),
            AnyStream::Words(s) => AnyPattern::Words(WordPattern::new(id, s.0)?),
        };
        out.push(pattern);
    }
    Ok(out)
}

/// CSV with columns `pattern_id, position, engine, comparisons`; one row
/// per occurrence.
pub fn write_reports_csv<W: Write>(out: W, reports: &[MatchReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["pattern_id", "position", "engine", "comparisons"])?;
    for r in reports {
        for p in &r.positions {
            w.write_record([
                r.pattern_id.as_str(),
                &p.to_string(),
                r.engine.name(),
                &r.comparisons.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_reports_json<W: Write>(out: W, reports: &[MatchReport]) -> Result<()> {
    serde_json::to_writer_pretty(out, reports)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Engine;

    #[test]
    fn hex_word_stream_with_header_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.hex");
        std::fs::write(&path, "{\"mode\":\"x\"}\n61707865 00000001 # c\n\nffffffff\n").unwrap();
        let s = load_stream(&path, Alphabet::Word, Encoding::Hex).unwrap();
        assert_eq!(s, AnyStream::Words(SymbolStream(vec![0x61707865, 1, 0xffffffff])));
        let b = load_stream(&path, Alphabet::Byte, Encoding::Hex).unwrap();
        assert_eq!(b, AnyStream::Bytes(SymbolStream(hex::decode("6170786500000001ffffffff").unwrap())));
    }

    #[test]
    fn raw_word_stream() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bin");
        std::fs::write(&path, [1u8, 0, 0, 0, 2, 0, 0, 0]).unwrap();
        assert_eq!(
            load_stream(&path, Alphabet::Word, Encoding::Raw).unwrap(),
            AnyStream::Words(SymbolStream(vec![1, 2]))
        );
        std::fs::write(&path, [1u8, 0, 0]).unwrap();
        assert!(load_stream(&path, Alphabet::Word, Encoding::Raw).is_err());
    }

    #[test]
    fn pattern_file_errors_name_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.txt");
        std::fs::write(&path, "sigma 61707865\n0000000\n").unwrap();
        match load_patterns(&path, Alphabet::Word) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        std::fs::write(&path, "sigma 61707865\n\n00000000 00000001\n").unwrap();
        let pats = load_patterns(&path, Alphabet::Word).unwrap();
        assert_eq!(pats.len(), 2);
        assert_eq!(pats[0].id(), "sigma");
        assert_eq!(pats[1].id(), "00000000");
    }

    #[test]
    fn csv_columns() {
        let r = MatchReport {
            pattern_id: "p".into(),
            engine: Engine::Kmp,
            positions: vec![3, 9],
            comparisons: 12,
            windows_scanned: 0,
        };
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &[r]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "pattern_id,position,engine,comparisons\np,3,kmp,12\np,9,kmp,12\n"
        );
    }
}
