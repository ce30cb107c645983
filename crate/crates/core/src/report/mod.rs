//! Experiment runners and the CSV / JSON / SVG artifacts they emit.
//!
//! Every CSV starts with a `# config_hash: <hex>` line naming the SHA-256
//! (first 16 hex digits) of the JSON-serialized configuration that produced
//! it, followed by the column header row.

mod bench;
mod experiments;
pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub use bench::{run_bench, BenchConfig, BenchMode, BenchReport, BenchResult, MIN_STABLE_CORPUS};
pub use experiments::{
    run_avalanche, run_experiment_1, run_experiment_2, run_sweep, Exp1Config, Exp1Summary, Exp2Config,
    MgramSummary, SearchCheck, SweepConfig,
};

/// First 16 hex digits of SHA-256 over the JSON form of `config`.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("configurations serialize");
    let digest = Sha256::digest(&json);
    hex::encode(&digest[..8])
}

/// Writes a CSV with the config-hash line, `header`, then `rows`.
pub fn write_csv<I, R>(path: &Path, hash: &str, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut file = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    writeln!(file, "# config_hash: {hash}").map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash(&(1, "x"));
        assert_eq!(a, config_hash(&(1, "x")));
        assert_ne!(a, config_hash(&(2, "x")));
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn csv_has_hash_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_csv(&p, "abcd", &["a", "b"], [["1", "2"]]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "# config_hash: abcd\na,b\n1,2\n");
    }
}
