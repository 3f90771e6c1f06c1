//! Output sinks, run manifests and the on-disk closure cache.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use mifkit_core::cayley::{bfs_closure, FiniteGroupTable};
use mifkit_core::modp::{reduce_generators, Specialization};
use mifkit_core::ring::GroupSpec;

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Written as `<out>.manifest.json` next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: Value,
    pub seed: u64,
    pub version: &'static str,
    /// sha256 of every input file, by path.
    pub inputs: Vec<(String, String)>,
    pub summary: Value,
    pub wall_seconds: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Either the `--out` file or stdout.
pub struct Sink {
    pub path: Option<PathBuf>,
}

impl Sink {
    pub fn write_bytes(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.path {
            Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(p.clone(), e)),
            None => io::stdout().write_all(bytes).map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e)),
        }
    }

    pub fn write_csv<R: CsvRow>(&self, rows: &[R]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(R::HEADER)?;
        for r in rows {
            w.write_record(r.fields())?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        self.write_bytes(&bytes)
    }

    pub fn write_json(&self, v: &Value) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(v).map_err(mifkit_core::Error::from)?;
        s.push('\n');
        self.write_bytes(s.as_bytes())
    }

    pub fn finish(&self, manifest: &RunManifest) -> Result<(), CliError> {
        if let Some(p) = &self.path {
            let mp = manifest_path(p);
            let mut s = serde_json::to_string_pretty(manifest).map_err(mifkit_core::Error::from)?;
            s.push('\n');
            fs::write(&mp, s).map_err(|e| CliError::Io(mp, e))?;
        }
        Ok(())
    }
}

/// A table with a fixed header.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn flag(v: bool) -> String {
    u8::from(v).to_string()
}

/// Closures memoized under `$MIFKIT_CACHE/<group hash>/<p>[_point].json`.
pub struct ClosureCache {
    dir: Option<PathBuf>,
    group_hash: String,
}

impl ClosureCache {
    pub fn from_env(spec: &GroupSpec) -> Self {
        let dir = std::env::var_os("MIFKIT_CACHE").map(PathBuf::from);
        let group_hash = sha256_hex(spec.to_json().to_string().as_bytes());
        ClosureCache { dir, group_hash }
    }

    fn path(&self, phi: &Specialization) -> Option<PathBuf> {
        let mut name = phi.p.to_string();
        for a in &phi.point {
            name.push('_');
            name.push_str(&a.to_string());
        }
        Some(self.dir.as_ref()?.join(&self.group_hash).join(name + ".json"))
    }

    pub fn closure(&self, spec: &GroupSpec, phi: &Specialization, cap: usize) -> Result<FiniteGroupTable, CliError> {
        let path = self.path(phi);
        if let Some(path) = &path {
            if let Ok(text) = fs::read_to_string(path) {
                if let Ok(mut table) = serde_json::from_str::<FiniteGroupTable>(&text) {
                    if table.order() > cap {
                        let needed = table.order() as u128;
                        return Err(mifkit_core::Error::CapExceeded { needed, cap: cap as u128 }.into());
                    }
                    table.reindex();
                    return Ok(table);
                }
            }
        }
        let table = bfs_closure(&reduce_generators(spec, phi)?, cap)?;
        if let Some(path) = path {
            let dir = path.parent().expect("cache file has a parent");
            fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
            let text = serde_json::to_string(&table).map_err(mifkit_core::Error::from)?;
            fs::write(&path, text).map_err(|e| CliError::Io(path.clone(), e))?;
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_sits_beside_output() {
        assert_eq!(manifest_path(Path::new("/a/gaps.csv")), PathBuf::from("/a/gaps.csv.manifest.json"));
        assert_eq!(opt::<u8>(None), "");
        assert_eq!(flag(true), "1");
    }
}
