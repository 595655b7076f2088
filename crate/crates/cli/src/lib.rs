//! Command implementations behind the `deltashell` binary.

pub mod commands;
pub mod config;
pub mod identities;
pub mod report;

use std::path::{Path, PathBuf};

pub use commands::{Outcome, RunFlags};
pub use config::ProblemConfig;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "DELTASHELL_OUT";
pub const DEFAULT_OUT: &str = "deltashell-out";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 1 config (and unmet preconditions), 4 solver or output failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Precondition(_) => 1,
            CliError::Solver(_) | CliError::Io(_) => 4,
        }
    }
}

/// Output directory: the flag, then the config, then the environment.
pub fn output_dir(flag: Option<&Path>, config: Option<&ProblemConfig>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(dir) = config.and_then(|c| c.output.dir.as_ref()) {
        return PathBuf::from(dir);
    }
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn write_outcome(dir: &Path, outcome: &Outcome) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (name, contents) in &outcome.files {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
