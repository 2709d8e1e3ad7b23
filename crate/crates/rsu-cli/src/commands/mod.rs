//! Subcommand implementations. Every command writes only inside its output
//! directory and removes partial artifacts when it fails.

pub mod compare;
pub mod optimize;
pub mod report;
pub mod synth;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Exit-code carrying error: 2 for configuration/validation problems, 1 for
/// runtime failures.
#[derive(Debug)]
pub enum CmdError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CmdError::Config(e) => format!("{e:#}"),
            CmdError::Runtime(e) => format!("{e:#}"),
        }
    }
}

pub type CmdResult = std::result::Result<(), CmdError>;

pub fn config_err(e: impl Into<anyhow::Error>) -> CmdError {
    CmdError::Config(e.into())
}

pub fn runtime_err(e: impl Into<anyhow::Error>) -> CmdError {
    CmdError::Runtime(e.into())
}

/// Tracks files written during a command so a failure can clean them up.
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Removes everything written so far (best effort).
    pub fn discard(self) {
        for path in self.written {
            let _ = fs::remove_file(path);
        }
    }
}
