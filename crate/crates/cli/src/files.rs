use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use walkdir::WalkDir;

pub const LABELED_SUFFIX: &str = ".labeled.ipynb";
pub const STRIPPED_SUFFIX: &str = ".stripped.ipynb";

/// A notebook found on the command line, with the path it should be
/// written under relative to an output directory.
#[derive(Debug, Clone)]
pub struct Found {
    pub path: PathBuf,
    pub relative: PathBuf,
}

/// Expands directories recursively. Files named on the command line are
/// always kept; inside directories checkpoint folders are skipped, and so
/// are files ending in `skip_suffix`.
pub fn discover(inputs: &[PathBuf], skip_suffix: Option<&str>) -> Result<Vec<Found>> {
    let mut found = Vec::new();
    for input in inputs {
        let meta = std::fs::metadata(input).with_context(|| format!("cannot read {}", input.display()))?;
        if meta.is_file() {
            let name = input
                .file_name()
                .map(PathBuf::from)
                .unwrap_or_else(|| input.clone());
            found.push(Found {
                path: input.clone(),
                relative: name,
            });
            continue;
        }
        let walker = WalkDir::new(input)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| e.file_name() != ".ipynb_checkpoints");
        for entry in walker {
            let entry = entry.with_context(|| format!("cannot walk {}", input.display()))?;
            let name = entry.file_name().to_string_lossy();
            if !entry.file_type().is_file() || !name.ends_with(".ipynb") {
                continue;
            }
            if skip_suffix.is_some_and(|s| name.ends_with(s)) {
                continue;
            }
            let relative = entry
                .path()
                .strip_prefix(input)
                .unwrap_or(entry.path())
                .to_path_buf();
            found.push(Found {
                path: entry.path().to_path_buf(),
                relative,
            });
        }
    }
    found.sort_by(|a, b| a.path.cmp(&b.path));
    found.dedup_by(|a, b| a.path == b.path);
    Ok(found)
}

/// `a/b.ipynb` -> `a/b<suffix>`; an existing `.labeled.ipynb` is replaced,
/// not extended.
pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = name
        .strip_suffix(LABELED_SUFFIX)
        .or_else(|| name.strip_suffix(".ipynb"))
        .unwrap_or(&name);
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn output_path(found: &Found, output_dir: Option<&Path>, in_place: bool, suffix: &str) -> PathBuf {
    if in_place {
        found.path.clone()
    } else if let Some(dir) = output_dir {
        dir.join(&found.relative)
    } else {
        with_suffix(&found.path, suffix)
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        assert_eq!(
            with_suffix(Path::new("a/b.ipynb"), LABELED_SUFFIX),
            PathBuf::from("a/b.labeled.ipynb")
        );
        assert_eq!(
            with_suffix(Path::new("a/b.labeled.ipynb"), STRIPPED_SUFFIX),
            PathBuf::from("a/b.stripped.ipynb")
        );
        assert_eq!(
            with_suffix(Path::new("b.labeled.ipynb"), LABELED_SUFFIX),
            PathBuf::from("b.labeled.ipynb")
        );
    }

    #[test]
    fn discovery_skips_checkpoints_and_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        std::fs::create_dir_all(root.join("sub/.ipynb_checkpoints")).unwrap();
        for f in [
            "x.ipynb",
            "x.labeled.ipynb",
            "sub/y.ipynb",
            "sub/.ipynb_checkpoints/y-checkpoint.ipynb",
            "notes.txt",
        ] {
            std::fs::write(root.join(f), "{}").unwrap();
        }
        let found = discover(&[root.to_path_buf()], Some(LABELED_SUFFIX)).unwrap();
        let rel: Vec<_> = found.iter().map(|f| f.relative.clone()).collect();
        assert_eq!(rel, vec![PathBuf::from("sub/y.ipynb"), PathBuf::from("x.ipynb")]);

        let explicit = discover(&[root.join("x.labeled.ipynb")], Some(LABELED_SUFFIX)).unwrap();
        assert_eq!(explicit.len(), 1);
    }
}
