use std::path::{Path, PathBuf};

use gdv_core::io::{load_labeled_csv, load_mnist};
use gdv_core::LabeledDataset;

use crate::error::{CliError, CliResult};

/// Loads a labeled CSV file, or the image/label IDX pair inside a directory
/// (plain or gzipped, file names containing `images`/`idx3` and
/// `labels`/`idx1`).
pub fn load_source(path: &Path) -> CliResult<LabeledDataset> {
    if path.is_dir() {
        let (images, labels) = find_idx_pair(path)?;
        Ok(load_mnist(images, labels)?)
    } else {
        Ok(load_labeled_csv(path)?)
    }
}

fn find_idx_pair(dir: &Path) -> CliResult<(PathBuf, PathBuf)> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| gdv_core::Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    let find = |key: &str| {
        entries
            .iter()
            .find(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.contains(key)))
            .cloned()
    };
    match (find("idx3"), find("idx1")) {
        (Some(i), Some(l)) => Ok((i, l)),
        _ => Err(CliError::usage(format!("{} holds no IDX image/label pair", dir.display()))),
    }
}

/// Rows `offset..offset + size` (`size` 0 means "to the end").
pub fn slice(data: &LabeledDataset, offset: usize, size: usize) -> CliResult<LabeledDataset> {
    let n = data.n_points();
    let end = if size == 0 { n } else { offset.saturating_add(size) };
    if offset >= n || end > n {
        return Err(CliError::usage(format!("requested rows {offset}..{end} but the data has {n}")));
    }
    Ok(data.select(&(offset..end).collect::<Vec<_>>())?)
}
