use std::path::{Path, PathBuf};

use crate::annotations::parse_annotations;
use crate::masks::write_atomic;
use crate::stats::{dataset_stats, DEFAULT_WIDTH_BUCKETS};

use super::EXIT_OK;

/// Prints dataset statistics; optionally writes the CSV form.
pub fn cmd_stats(ann: &Path, csv: Option<&PathBuf>) -> anyhow::Result<i32> {
    let set = parse_annotations(ann)?;
    let report = dataset_stats(&set, &DEFAULT_WIDTH_BUCKETS);
    print!("{}", report.render_text());
    if let Some(csv_path) = csv {
        write_atomic(csv_path, report.render_csv().as_bytes())?;
    }
    Ok(EXIT_OK)
}
