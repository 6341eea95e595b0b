//! Dataset manifests: one video per line,
//! `<video_id>\t<path>\t<label>[\t<appearance.pmtx>]`, `#` starts a comment.
//!
//! `path` is either a directory of lexicographically ordered PGM/PPM frames
//! or a `.pmtx` descriptor series (rows = time steps), which bypasses flow
//! and description. For `.pmtx` entries the optional fourth column names a
//! single-row PMTX appearance vector. Relative paths resolve against the
//! manifest's directory.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VideoSource {
    Frames(PathBuf),
    Descriptors {
        motion: PathBuf,
        appearance: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub video_id: String,
    pub source: VideoSource,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
}

fn is_pmtx(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pmtx"))
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.video_id.as_str()) {
                return Err(Error::invalid(format!("duplicate video id `{}`", e.video_id)));
            }
        }
        Ok(Self { entries })
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        let mut offset = 0u64;
        for (lineno, raw) in text.lines().enumerate() {
            let line_offset = offset;
            offset += raw.len() as u64 + 1;
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if !(3..=4).contains(&fields.len()) || fields.iter().any(|f| f.is_empty()) {
                return Err(Error::format(
                    line_offset,
                    format!(
                        "manifest line {}: expected `id<TAB>path<TAB>label[<TAB>appearance]`",
                        lineno + 1
                    ),
                ));
            }
            let resolve = |p: &str| {
                let p = Path::new(p);
                if p.is_absolute() {
                    p.to_path_buf()
                } else {
                    base.join(p)
                }
            };
            let path = resolve(fields[1]);
            let source = if is_pmtx(&path) {
                VideoSource::Descriptors {
                    motion: path,
                    appearance: fields.get(3).map(|a| resolve(a)),
                }
            } else {
                if fields.len() == 4 {
                    return Err(Error::format(
                        line_offset,
                        format!(
                            "manifest line {}: appearance column is only valid for .pmtx entries",
                            lineno + 1
                        ),
                    ));
                }
                VideoSource::Frames(path)
            };
            entries.push(ManifestEntry {
                video_id: fields[0].to_string(),
                source,
                label: fields[2].to_string(),
            });
        }
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Manifest text with paths written as given (relative paths stay relative).
    pub fn to_text(&self, base: &Path) -> String {
        let rel = |p: &Path| p.strip_prefix(base).unwrap_or(p).display().to_string();
        let mut out = String::from("# video_id\tpath\tlabel\n");
        for e in &self.entries {
            match &e.source {
                VideoSource::Frames(p) => {
                    let _ = writeln!(out, "{}\t{}\t{}", e.video_id, rel(p), e.label);
                }
                VideoSource::Descriptors { motion, appearance } => {
                    let _ = write!(out, "{}\t{}\t{}", e.video_id, rel(motion), e.label);
                    if let Some(a) = appearance {
                        let _ = write!(out, "\t{}", rel(a));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.label.clone()).collect()
    }

    /// Sorted distinct labels.
    pub fn classes(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| e.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn class_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for e in &self.entries {
            *counts.entry(e.label.clone()).or_insert(0) += 1;
        }
        counts
    }
}
