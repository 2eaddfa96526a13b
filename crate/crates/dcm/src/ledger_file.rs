//! Ledger persistence: one event line per text line, appended in place.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::Path;

use dcm_core::ledger::LedgerEvent;
use dcm_core::{Registry, RoundingProfile};

use crate::error::DcmError;

/// Reads every event line. A missing file is an empty ledger.
pub fn read_lines(path: &Path) -> Result<Vec<String>, DcmError> {
    let text = match fs::read(path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(DcmError::io(path, e)),
    };
    // invalid UTF-8 is kept lossily and then fails its hash check
    let text = String::from_utf8_lossy(&text);
    let body = text.strip_suffix('\n').unwrap_or(&text);
    if body.is_empty() {
        return Ok(Vec::new());
    }
    Ok(body.split('\n').map(str::to_owned).collect())
}

/// Replays a ledger file into a registry.
pub fn load(path: &Path, profile: RoundingProfile) -> Result<Registry, DcmError> {
    let lines = read_lines(path)?;
    Ok(Registry::replay_lines(profile, lines.iter().map(String::as_str))?)
}

/// Appends events, one `write_all` per line so each event lands whole.
pub fn append(path: &Path, events: &[LedgerEvent]) -> Result<(), DcmError> {
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| DcmError::io(path, e))?;
    for event in events {
        let mut line = event.to_line();
        line.push('\n');
        file.write_all(line.as_bytes()).map_err(|e| DcmError::io(path, e))?;
    }
    file.sync_data().map_err(|e| DcmError::io(path, e))
}

/// Runs `op` against the registry stored at `path` and appends whatever
/// events it produced.
pub fn with_registry<T>(
    path: &Path,
    profile: RoundingProfile,
    op: impl FnOnce(&mut Registry) -> Result<T, DcmError>,
) -> Result<T, DcmError> {
    let mut registry = load(path, profile)?;
    let before = registry.events().len();
    let out = op(&mut registry)?;
    append(path, &registry.events()[before..])?;
    Ok(out)
}
