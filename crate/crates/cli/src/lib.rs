//! Command-line tools and the HTTP annotation service for forestjudge
//! corpora.

pub mod commands;
pub mod server;
pub mod view;

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;

use forestjudge::store::MergeReport;

/// File in a corpus directory collecting judgments that a merge dropped,
/// in replay script format.
pub const VANISHED_FILE: &str = "vanished.tsv";

/// Appends the judgments a merge could not transfer to the corpus archive.
pub fn archive_vanished(dir: &Path, report: &MergeReport) -> io::Result<()> {
    if report.vanished.is_empty() {
        return Ok(());
    }
    let mut f = OpenOptions::new().create(true).append(true).open(dir.join(VANISHED_FILE))?;
    for j in &report.vanished {
        writeln!(f, "{}\t{}\t{}\t{}", report.id, j.target, j.value, j.provenance)?;
    }
    Ok(())
}
