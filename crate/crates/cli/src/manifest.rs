use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use noncvx::report::SCHEMA_VERSION;

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> std::io::Result<Self> {
        Ok(Self::of_bytes(path, &std::fs::read(path)?))
    }

    pub fn of_bytes(path: &Path, bytes: &[u8]) -> Self {
        let hash = Sha256::digest(bytes);
        FileDigest {
            path: path.display().to_string(),
            sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

/// Record of one invocation. Unlike the reports it carries a timestamp and
/// timings, so it is not byte-reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub command_line: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub threads: usize,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub version: String,
    pub timestamp: String,
    pub elapsed_secs: f64,
    pub timings: Option<Value>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            command_line: std::env::args().collect(),
            config: Value::Null,
            seed: None,
            threads: rayon::current_num_threads(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: time::OffsetDateTime::now_utc()
                .replace_nanosecond(0)
                .ok()
                .and_then(|t| t.format(&time::format_description::well_known::Rfc3339).ok())
                .unwrap_or_default(),
            elapsed_secs: 0.0,
            timings: None,
        }
    }

    pub fn input(&mut self, path: &Path) -> std::io::Result<()> {
        self.inputs.push(FileDigest::of(path)?);
        Ok(())
    }
}

/// Where the manifest goes: an explicit path, next to the main output, or
/// standard error.
pub fn manifest_path(explicit: Option<&Path>, out: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        out.map(|o| {
            let mut name = o.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        })
    })
}
