//! Run manifests and JSON report files.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub polymin: &'static str,
    pub polymin_cli: &'static str,
}

/// Everything needed to rerun a command on one thread.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub versions: Versions,
    /// Worker threads of the global pool.
    pub threads: usize,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_time_secs: f64,
    /// SHA-256 of every file input and output, keyed by path.
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
struct Report<'a, T: Serialize> {
    manifest: &'a RunManifest,
    result: &'a T,
}

pub struct Run {
    start: Instant,
    manifest: RunManifest,
}

impl Run {
    pub fn new(command: &str, parameters: impl Serialize, seed: Option<u64>) -> Self {
        Run {
            start: Instant::now(),
            manifest: RunManifest {
                command: command.to_string(),
                parameters: serde_json::to_value(parameters).expect("parameters serialize"),
                seed,
                versions: Versions { polymin: polymin::VERSION, polymin_cli: env!("CARGO_PKG_VERSION") },
                threads: rayon::current_num_threads(),
                inputs: Vec::new(),
                outputs: Vec::new(),
                wall_time_secs: 0.0,
                artifacts: BTreeMap::new(),
            },
        }
    }

    /// Records an input source; files are hashed, builtins are not.
    pub fn input(&mut self, source: &str) -> std::io::Result<()> {
        self.manifest.inputs.push(source.to_string());
        if Path::new(source).is_file() {
            self.hash(source)?;
        }
        Ok(())
    }

    /// Records a file this run has written.
    pub fn output(&mut self, path: &Path) -> std::io::Result<()> {
        let s = path.display().to_string();
        self.manifest.outputs.push(s.clone());
        self.hash(&s)
    }

    fn hash(&mut self, path: &str) -> std::io::Result<()> {
        let digest = Sha256::digest(std::fs::read(path)?);
        let hex = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.manifest.artifacts.insert(path.to_string(), hex);
        Ok(())
    }

    /// Writes `{"manifest": .., "result": ..}` to `path`, or to stdout when
    /// no path is given.
    pub fn finish<T: Serialize>(mut self, result: &T, path: Option<&Path>) -> std::io::Result<()> {
        self.manifest.wall_time_secs = self.start.elapsed().as_secs_f64();
        if let Some(p) = path {
            self.manifest.outputs.push(p.display().to_string());
        }
        let text = serde_json::to_string_pretty(&Report { manifest: &self.manifest, result })?;
        match path {
            Some(p) => std::fs::write(p, text + "\n"),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}
