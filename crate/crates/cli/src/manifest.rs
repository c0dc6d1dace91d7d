use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

/// Record of one run, written as `run_manifest.json` next to its outputs.
pub struct RunManifest {
    pub command: &'static str,
    pub parameters: Map<String, Value>,
    pub outputs: Vec<PathBuf>,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Self {
            command,
            parameters: Map::new(),
            outputs: Vec::new(),
            seed,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// Writes the manifest beside the first output. Keys come out sorted.
    pub fn write(&self) -> std::io::Result<Option<PathBuf>> {
        let Some(first) = self.outputs.first() else {
            return Ok(None);
        };
        let dir = first
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        let path = dir.join("run_manifest.json");
        let value = json!({
            "command": self.command,
            "parameters": self.parameters,
            "outputs": self.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "versions": format!("torsionlab {}", env!("CARGO_PKG_VERSION")),
            "seed": self.seed,
        });
        let mut text = serde_json::to_string_pretty(&value).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(Some(path))
    }
}
