//! Sidecar run logs. Timestamps live only here so reports stay reproducible.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{CliError, CliResult};

/// Appends `"<unix seconds> <command line> exit=<code>"` to `path`.
pub fn append(path: &Path, args: &[String], exit_code: i32) -> CliResult<()> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    writeln!(f, "{secs} {} exit={exit_code}", args.join(" ")).map_err(|e| CliError::io(path, e))
}
