//! Output files named after a hash of everything that determines them.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// First 16 hex digits of the SHA-256 of `key`.
pub fn config_hash(key: &serde_json::Value) -> String {
    let digest = Sha256::digest(key.to_string().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Files written for one run; removed again by [`Artifacts::discard`].
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    stem: String,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path, command: &str, key: &serde_json::Value) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: format!("{command}-{}", config_hash(key)),
            written: Vec::new(),
        })
    }

    pub fn stem(&self) -> &str {
        &self.stem
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn path(&mut self, suffix: &str, ext: &str) -> PathBuf {
        let p = self.dir.join(format!("{}{suffix}.{ext}", self.stem));
        self.written.push(p.clone());
        p
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> io::Result<PathBuf> {
        let p = self.path("", "json");
        let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(&p, text)?;
        Ok(p)
    }

    /// `suffix` distinguishes several tables of one run, e.g. `-fields`.
    pub fn csv(&mut self, suffix: &str, header: &[String], rows: &[Vec<String>]) -> io::Result<PathBuf> {
        let p = self.path(suffix, "csv");
        let mut w = csv::Writer::from_path(&p)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(p)
    }

    pub fn discard(self) {
        for p in self.written {
            let _ = fs::remove_file(p);
        }
    }
}

pub const SCHEMA_MD: &str = "\
# lacewalk output files

Every run writes `{command}-{hash}.json` plus CSV tables. `hash` is the first
16 hex digits of the SHA-256 of the resolved configuration and the command
arguments (thread count, budget and output directory excluded), so identical inputs
give identical file names and contents.

Numbers are shortest round-trip decimals in float mode. In rational mode,
columns ending in `_exact` hold exact values as integers or reduced `p/q`; float-mode `_exact` columns are empty.

## enumerate

`enumerate-{hash}.csv`: `n, c_n, moment2, msd, c_n_exact, moment2_exact`
(`c_n = sum_x C_n(x)`, `moment2 = sum_x |x|^2 C_n(x)`, `msd = moment2 / c_n`).

`enumerate-{hash}-fields.csv`: `n, x1..xd, value, value_exact`, one row per
point of each `C_n`.

## lace

`lace-{hash}.csv`: `n, N, laces, pi_n_N, support_radius, condition,
pi_n_N_exact` where `pi_n_N = sum_x Pi_n^(N)(x)` and `condition` is
`sum |terms| / |sum|` from accumulation.

`lace-{hash}-fields.csv`: `n, N, x1..xd, value, value_exact`.

## verify

`verify-{hash}.csv`: `check, parameters, lhs, rhs, holds, asserted`. A check
with `asserted = false` is informational (e.g. a bound whose smallness
condition fails, or a key-inequality case outside the proof's deformation) and
does not affect the exit status.

## series

`series-{hash}.csv`: `n, c_n, mu_root, mu_ratio, msd, msd_over_n, pi_n`.
The JSON holds `muRoot, muRatio, delta0, tau, sigma, delta, truncationN,
muUsed, diagnostics {lastTauTerm, lastSigmaTerm}`.

## sample

`sample-{hash}.csv`: `n, count, seed, cn_estimate, cn_std_error,
msd_estimate, effective_samples, nonzero_samples, rng`.
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = serde_json::json!({"n": 1, "kappa": "0.1"});
        let b = serde_json::json!({"n": 2, "kappa": "0.1"});
        assert_eq!(config_hash(&a), config_hash(&a.clone()));
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 16);
    }

    #[test]
    fn discard_removes_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::new(dir.path(), "x", &serde_json::json!({})).unwrap();
        let p = a.json(&serde_json::json!({"a": 1})).unwrap();
        let q = a.csv("-t", &["a".into()], &[vec!["1".into()]]).unwrap();
        assert!(p.exists() && q.exists());
        a.discard();
        assert!(!p.exists() && !q.exists());
    }
}
