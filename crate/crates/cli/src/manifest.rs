use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::CliResult;

/// Everything needed to rerun a command and get identical output.
#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub command: String,
    pub entries: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn set_list(&mut self, key: &str, values: &[f64]) {
        self.set(key, join(values));
    }

    pub fn render(&self) -> String {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut s = String::new();
        let _ = writeln!(s, "tool = fincov {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "command_line = {}", std::env::args().collect::<Vec<_>>().join(" "));
        let _ = writeln!(s, "timestamp_unix = {timestamp}");
        match self.seed {
            Some(seed) => {
                let _ = writeln!(s, "seed = {seed}");
            }
            None => {
                let _ = writeln!(s, "seed = none");
            }
        }
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        for out in &self.outputs {
            let _ = writeln!(s, "output = {}", out.display());
        }
        s
    }

    /// Prints the manifest to stderr and, when files were written, saves it
    /// next to the first one as `<file>.manifest`.
    pub fn publish(&self) -> CliResult<()> {
        let text = self.render();
        eprint!("{text}");
        if let Some(first) = self.outputs.first() {
            std::fs::write(sidecar_path(first), text)?;
        }
        Ok(())
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

/// Locale-independent shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn join(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

/// One CSV table, optionally labelled by the deployment shape it belongs to.
pub struct Block {
    pub label: Option<(String, f64)>,
    pub csv: String,
}

/// Writes blocks to `out` (one file per labelled block when there are
/// several) or to stdout, returning the files written.
pub fn emit(blocks: &[Block], out: Option<&Path>) -> CliResult<Vec<PathBuf>> {
    match out {
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            let many = blocks.len() > 1;
            for block in blocks {
                if let (true, Some((name, b))) = (many, &block.label) {
                    writeln!(handle, "# preset={name} b={}", num(*b))?;
                }
                handle.write_all(block.csv.as_bytes())?;
            }
            Ok(Vec::new())
        }
        Some(path) if blocks.len() == 1 => {
            std::fs::write(path, &blocks[0].csv)?;
            Ok(vec![path.to_path_buf()])
        }
        Some(path) => {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let ext = path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
            let mut written = Vec::new();
            for (i, block) in blocks.iter().enumerate() {
                let tag = block.label.as_ref().map(|l| l.0.clone()).unwrap_or_else(|| i.to_string());
                let file = path.with_file_name(format!("{stem}_{tag}.{ext}"));
                std::fs::write(&file, &block.csv)?;
                written.push(file);
            }
            Ok(written)
        }
    }
}
