//! Append-only log of formula discrepancies.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

pub const ERRATA_FILE: &str = "errata.log";

#[derive(Debug, Clone, PartialEq)]
pub struct ErrataEntry {
    pub equation: String,
    pub fingerprint: String,
    pub closed_form: f64,
    pub oracle: f64,
    pub note: String,
}

impl ErrataEntry {
    pub fn new(equation: &str, fingerprint: &str, closed_form: f64, oracle: f64, note: &str) -> Self {
        Self {
            equation: equation.to_string(),
            fingerprint: fingerprint.to_string(),
            closed_form,
            oracle,
            note: note.to_string(),
        }
    }

    pub fn gap(&self) -> f64 {
        (self.closed_form - self.oracle).abs()
    }

    /// `equation fingerprint closed_form oracle gap # note`
    pub fn line(&self) -> String {
        format!(
            "{} {} {:.12e} {:.12e} {:.3e} # {}",
            self.equation,
            self.fingerprint,
            self.closed_form,
            self.oracle,
            self.gap(),
            self.note
        )
    }
}

/// First 16 hex digits of SHA-256 over the point description.
pub fn fingerprint(key: &str) -> String {
    let digest = Sha256::digest(key.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn append(dir: &Path, entries: &[ErrataEntry]) -> std::io::Result<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join(ERRATA_FILE))?;
    for e in entries {
        writeln!(f, "{}", e.line())?;
    }
    Ok(())
}
