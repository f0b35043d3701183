use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// Output files staged in memory and written together. If any write or
/// read-back check fails, every file written by this batch is removed.
#[derive(Default)]
pub struct Outputs {
    staged: Vec<(PathBuf, String)>,
}

impl Outputs {
    pub fn add(&mut self, path: impl Into<PathBuf>, text: impl Into<String>) {
        self.staged.push((path.into(), text.into()));
    }

    pub fn commit(self) -> Result<()> {
        let mut written: Vec<&Path> = Vec::new();
        let result = (|| -> Result<()> {
            for (path, text) in &self.staged {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
                written.push(path);
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
                let back = fs::read_to_string(path).with_context(|| format!("re-reading {}", path.display()))?;
                if back != *text {
                    bail!("{} did not read back identically", path.display());
                }
            }
            Ok(())
        })();
        if result.is_err() {
            for p in written {
                let _ = fs::remove_file(p);
            }
        }
        result?;
        for (path, _) in &self.staged {
            log::info!("wrote {}", path.display());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_batch_removes_written_files() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("a.txt");
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let mut out = Outputs::default();
        out.add(&good, "hello");
        out.add(blocker.join("b.txt"), "nested under a file");
        assert!(out.commit().is_err());
        assert!(!good.exists());

        let mut out = Outputs::default();
        out.add(&good, "hello");
        out.commit().unwrap();
        assert_eq!(fs::read_to_string(&good).unwrap(), "hello");
    }
}
