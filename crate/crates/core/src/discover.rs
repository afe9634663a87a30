//! File discovery: walks a scan root, finds Helm chart roots and standalone
//! YAML files, and applies the ignore list.

use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use walkdir::WalkDir;

/// Directory names skipped by default, in addition to hidden entries.
const DEFAULT_IGNORED_DIRS: [&str; 2] = ["node_modules", "vendor"];

#[derive(Debug, thiserror::Error)]
pub enum DiscoverError {
    #[error("scan root does not exist or is not a directory: {0}")]
    RootNotFound(PathBuf),
    #[error("invalid ignore pattern {pattern:?}: {source}")]
    BadIgnorePattern {
        pattern: String,
        source: globset::Error,
    },
    #[error("walk failed: {0}")]
    Walk(#[from] walkdir::Error),
}

/// Compiled ignore list: hidden entries and vendored directory names are
/// always skipped; user globs match root-relative paths.
#[derive(Debug)]
pub struct IgnoreList {
    globs: GlobSet,
}

impl IgnoreList {
    pub fn new<S: AsRef<str>>(patterns: &[S]) -> Result<Self, DiscoverError> {
        let mut builder = GlobSetBuilder::new();
        for p in patterns {
            let glob = Glob::new(p.as_ref()).map_err(|source| DiscoverError::BadIgnorePattern {
                pattern: p.as_ref().to_string(),
                source,
            })?;
            builder.add(glob);
        }
        let globs = builder.build().map_err(|source| DiscoverError::BadIgnorePattern {
            pattern: String::new(),
            source,
        })?;
        Ok(Self { globs })
    }

    pub fn empty() -> Self {
        Self::new::<&str>(&[]).expect("empty glob set")
    }

    fn skips_name(name: &str) -> bool {
        name.starts_with('.') || DEFAULT_IGNORED_DIRS.contains(&name)
    }

    fn skips_rel_path(&self, rel: &Path) -> bool {
        self.globs.is_match(rel)
    }
}

/// Result of walking a scan root. All paths are relative to the root.
#[derive(Debug, Default)]
pub struct Discovered {
    /// Helm chart roots: directories containing `Chart.yaml`, or a
    /// `templates/` directory next to a `values.yaml`.
    pub chart_roots: Vec<PathBuf>,
    /// YAML files outside any chart's values/templates area.
    pub standalone: Vec<PathBuf>,
}

pub fn discover(root: &Path, ignore: &IgnoreList) -> Result<Discovered, DiscoverError> {
    if !root.is_dir() {
        return Err(DiscoverError::RootNotFound(root.to_path_buf()));
    }

    let mut yaml_files: Vec<PathBuf> = Vec::new();
    let mut chart_roots: Vec<PathBuf> = Vec::new();

    let walker = WalkDir::new(root).into_iter().filter_entry(|e| {
        if e.depth() == 0 {
            return true;
        }
        let name = e.file_name().to_string_lossy();
        if IgnoreList::skips_name(&name) {
            return false;
        }
        let rel = e.path().strip_prefix(root).unwrap_or(e.path());
        !ignore.skips_rel_path(rel)
    });

    for entry in walker {
        let entry = entry?;
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path()).to_path_buf();
        if entry.file_type().is_dir() {
            let dir = entry.path();
            // Chart markers count only when the ignore list leaves them in;
            // ignoring a chart's contents must also stop the chart loader
            // from reading them behind discovery's back.
            let marker = |name: &str| {
                dir.join(name).exists() && !ignore.skips_rel_path(&rel.join(name))
            };
            let has_chart_yaml = dir.join("Chart.yaml").is_file() && marker("Chart.yaml");
            let has_values = (dir.join("values.yaml").is_file() && marker("values.yaml"))
                || (dir.join("values.yml").is_file() && marker("values.yml"));
            let has_templates = dir.join("templates").is_dir() && marker("templates");
            if has_chart_yaml || (has_values && has_templates) {
                chart_roots.push(rel);
            }
        } else if entry.file_type().is_file()
            && matches!(
                entry.path().extension().and_then(|e| e.to_str()),
                Some("yaml") | Some("yml")
            )
        {
            yaml_files.push(rel);
        }
    }

    chart_roots.sort();

    // Files claimed by a chart (its values file and anything under its
    // templates directory) are loaded through the chart; everything else is
    // a standalone script. Chart.yaml itself is package metadata, not a
    // configuration script.
    let mut standalone: Vec<PathBuf> = Vec::new();
    'files: for file in yaml_files {
        for chart in chart_roots.iter().rev() {
            if !file.starts_with(chart) {
                continue;
            }
            let within = file.strip_prefix(chart).unwrap();
            let claimed = within == Path::new("values.yaml")
                || within == Path::new("values.yml")
                || within.starts_with("templates")
                || within == Path::new("Chart.yaml");
            if claimed {
                continue 'files;
            }
            break;
        }
        if file.file_name().is_some_and(|n| n == "Chart.yaml") {
            continue;
        }
        standalone.push(file);
    }
    standalone.sort();

    Ok(Discovered {
        chart_roots,
        standalone,
    })
}
