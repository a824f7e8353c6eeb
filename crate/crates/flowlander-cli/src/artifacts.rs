//! Artifact directory layout.
//!
//! A run directory holds `config.toml` (the resolved snapshot), `log.csv`,
//! and `metrics.txt`. A sweep directory holds the swept snapshot, one run
//! directory per cell under `cells/`, and the rendered `summary.txt` /
//! `summary.csv`. Existing non-empty targets are refused unless the caller
//! passed the overwrite flag, in which case the old tree is replaced.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use crate::report::{parse_metrics_text, CellResult};

pub fn prepare_dir(path: &Path, overwrite: bool) -> Result<()> {
    if path.exists() {
        let occupied = path
            .read_dir()
            .with_context(|| format!("inspecting {}", path.display()))?
            .next()
            .is_some();
        if occupied {
            if !overwrite {
                bail!(
                    "output directory {} already holds artifacts (pass --overwrite to replace them)",
                    path.display()
                );
            }
            std::fs::remove_dir_all(path)
                .with_context(|| format!("clearing {}", path.display()))?;
        }
    }
    std::fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(())
}

pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))
}

/// Output file target: refuses to clobber without the overwrite flag.
pub fn prepare_file(path: &Path, overwrite: bool) -> Result<()> {
    if path.exists() && !overwrite {
        bail!("{} already exists (pass --overwrite to replace it)", path.display());
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    Ok(())
}

/// Cell directories of a sweep, in ordinal (= grid) order.
pub fn cell_dirs(sweep_dir: &Path) -> Result<Vec<PathBuf>> {
    let cells = sweep_dir.join("cells");
    let mut dirs: Vec<PathBuf> = cells
        .read_dir()
        .with_context(|| format!("reading {}", cells.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        bail!("{} holds no cell directories", cells.display());
    }
    Ok(dirs)
}

/// Reads every cell's metrics back for a report. A cell directory without a
/// readable metrics file is skipped with a warning; the summary renderer
/// then blanks whatever the grid expected from it.
pub fn read_cells(sweep_dir: &Path) -> Result<(Vec<CellResult>, Vec<String>)> {
    let mut cells = Vec::new();
    let mut warnings = Vec::new();
    for dir in cell_dirs(sweep_dir)? {
        let path = dir.join("metrics.txt");
        let parsed = std::fs::read_to_string(&path)
            .map_err(anyhow::Error::from)
            .and_then(|text| parse_metrics_text(&text));
        match parsed {
            Ok(cell) => cells.push(cell),
            Err(e) => warnings.push(format!("unreadable cell {}: {e:#}", dir.display())),
        }
    }
    if cells.is_empty() {
        bail!("no readable cell metrics under {}", sweep_dir.display());
    }
    Ok((cells, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_occupied_dir_without_overwrite() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("run");
        prepare_dir(&out, false).unwrap();
        prepare_dir(&out, false).unwrap(); // empty dir is fine
        write_file(&out, "log.csv", "x\n").unwrap();
        let err = prepare_dir(&out, false).unwrap_err().to_string();
        assert!(err.contains("--overwrite"), "{err}");
        prepare_dir(&out, true).unwrap();
        assert!(!out.join("log.csv").exists());
    }

    #[test]
    fn file_target_needs_overwrite_too() {
        let tmp = tempfile::tempdir().unwrap();
        let target = tmp.path().join("plots/a.svg");
        prepare_file(&target, false).unwrap();
        std::fs::write(&target, "x").unwrap();
        assert!(prepare_file(&target, false).is_err());
        prepare_file(&target, true).unwrap();
    }

    #[test]
    fn cells_come_back_in_grid_order() {
        let tmp = tempfile::tempdir().unwrap();
        let sweep = tmp.path();
        for (name, law) in [("001_pid_ts-0.2_a0", "pid"), ("000_indi_ts-0.2_a0", "indi")] {
            let dir = sweep.join("cells").join(name);
            std::fs::create_dir_all(&dir).unwrap();
            write_file(
                &dir,
                "metrics.txt",
                &crate::report::failure_text(law, -0.2, 0.0, "x"),
            )
            .unwrap();
        }
        let (cells, warnings) = read_cells(sweep).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(cells[0].law, "indi");
        assert_eq!(cells[1].law, "pid");
    }

    #[test]
    fn unreadable_cell_becomes_warning() {
        let tmp = tempfile::tempdir().unwrap();
        let sweep = tmp.path();
        let good = sweep.join("cells/000_indi_ts-0.2_a0");
        std::fs::create_dir_all(&good).unwrap();
        write_file(&good, "metrics.txt", &crate::report::failure_text("indi", -0.2, 0.0, "x"))
            .unwrap();
        std::fs::create_dir_all(sweep.join("cells/001_pid_ts-0.2_a0")).unwrap();
        let (cells, warnings) = read_cells(sweep).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("001_pid"), "{}", warnings[0]);
    }
}
