//! Hashed revision manifests: the frozen, content-addressed input of an
//! analysis run.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    /// Path relative to the manifest root, `/`-separated.
    pub path: String,
    /// Lowercase hex SHA-256 of the file content.
    pub content_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Revision {
    pub label: String,
    /// Informational only; never used for ordering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevisionManifest {
    pub project: String,
    /// Directory holding the files, relative to the manifest file.
    pub root: String,
    pub revisions: Vec<Revision>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path} is not a valid manifest: {source}")]
    Format { path: PathBuf, source: serde_json::Error },
    #[error("manifest lists no revisions")]
    NoRevisions,
    #[error("revision label `{0}` appears more than once")]
    DuplicateLabel(String),
    #[error("revision `{revision}`: `{path}` is listed twice")]
    DuplicatePath { revision: String, path: String },
    #[error("revision `{revision}`: path `{path}` must be relative and stay inside the root")]
    UnsafePath { revision: String, path: String },
    #[error("revision `{revision}`: `{path}` has malformed hash `{hash}` (expected 64 lowercase hex digits)")]
    MalformedHash { revision: String, path: String, hash: String },
    #[error("revision `{revision}`: file `{path}` is missing ({source})")]
    MissingFile { revision: String, path: String, source: std::io::Error },
    #[error("revision `{revision}`: hash mismatch for `{path}`: expected {expected}, actual {actual}")]
    HashMismatch { revision: String, path: String, expected: String, actual: String },
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn is_safe_relative(path: &str) -> bool {
    let p = Path::new(path);
    !path.is_empty() && p.components().all(|c| matches!(c, Component::Normal(_) | Component::CurDir))
}

fn is_sha256_hex(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

/// A manifest whose every file has been read and checked against its hash.
/// Contents are kept by hash, so files shared between revisions are stored
/// once.
#[derive(Debug, Clone)]
pub struct VerifiedManifest {
    pub manifest: RevisionManifest,
    pub root: PathBuf,
    contents: BTreeMap<String, Arc<[u8]>>,
}

impl VerifiedManifest {
    pub fn content(&self, entry: &FileEntry) -> &[u8] {
        &self.contents[&entry.content_hash]
    }

    pub fn project(&self) -> &str {
        &self.manifest.project
    }

    pub fn revisions(&self) -> &[Revision] {
        &self.manifest.revisions
    }
}

impl RevisionManifest {
    /// Checks everything that does not need the file system.
    pub fn validate_shape(&self) -> Result<(), ManifestError> {
        if self.revisions.is_empty() {
            return Err(ManifestError::NoRevisions);
        }
        let mut labels = BTreeSet::new();
        for rev in &self.revisions {
            if !labels.insert(rev.label.as_str()) {
                return Err(ManifestError::DuplicateLabel(rev.label.clone()));
            }
            let mut paths = BTreeSet::new();
            for f in &rev.files {
                if !is_safe_relative(&f.path) {
                    return Err(ManifestError::UnsafePath { revision: rev.label.clone(), path: f.path.clone() });
                }
                if !paths.insert(f.path.as_str()) {
                    return Err(ManifestError::DuplicatePath { revision: rev.label.clone(), path: f.path.clone() });
                }
                if !is_sha256_hex(&f.content_hash) {
                    return Err(ManifestError::MalformedHash {
                        revision: rev.label.clone(),
                        path: f.path.clone(),
                        hash: f.content_hash.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Reads and hashes every listed file below `root`.
    pub fn verify(self, root: PathBuf) -> Result<VerifiedManifest, ManifestError> {
        self.validate_shape()?;
        let mut contents: BTreeMap<String, Arc<[u8]>> = BTreeMap::new();
        for rev in &self.revisions {
            for f in &rev.files {
                let bytes = fs::read(root.join(&f.path)).map_err(|source| ManifestError::MissingFile {
                    revision: rev.label.clone(),
                    path: f.path.clone(),
                    source,
                })?;
                let actual = sha256_hex(&bytes);
                if actual != f.content_hash {
                    return Err(ManifestError::HashMismatch {
                        revision: rev.label.clone(),
                        path: f.path.clone(),
                        expected: f.content_hash.clone(),
                        actual,
                    });
                }
                contents.entry(actual).or_insert_with(|| bytes.into());
            }
        }
        Ok(VerifiedManifest { manifest: self, root, contents })
    }
}

/// Parses the manifest at `path` and verifies every file it lists.
pub fn load_manifest(path: &Path) -> Result<VerifiedManifest, ManifestError> {
    let text = fs::read_to_string(path).map_err(|source| ManifestError::Io { path: path.to_owned(), source })?;
    let manifest: RevisionManifest =
        serde_json::from_str(&text).map_err(|source| ManifestError::Format { path: path.to_owned(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let root = base.join(&manifest.root);
    manifest.verify(root)
}

/// Builds a manifest from a directory tree in which each listed label is a
/// subdirectory of `root` holding one revision.
pub fn manifest_from_tree(project: &str, root: &Path, labels: &[String]) -> Result<RevisionManifest, ManifestError> {
    let mut revisions = Vec::with_capacity(labels.len());
    for label in labels {
        let dir = root.join(label);
        let mut files = Vec::new();
        collect_files(&dir, &dir, &mut files)?;
        files.sort();
        let files = files
            .into_iter()
            .map(|rel| {
                let bytes = fs::read(dir.join(&rel)).map_err(|source| ManifestError::Io { path: dir.join(&rel), source })?;
                Ok(FileEntry { path: format!("{label}/{rel}"), content_hash: sha256_hex(&bytes) })
            })
            .collect::<Result<Vec<_>, ManifestError>>()?;
        revisions.push(Revision { label: label.clone(), timestamp: None, files });
    }
    let manifest = RevisionManifest { project: project.to_owned(), root: root.display().to_string(), revisions };
    manifest.validate_shape()?;
    Ok(manifest)
}

fn collect_files(base: &Path, dir: &Path, out: &mut Vec<String>) -> Result<(), ManifestError> {
    let entries = fs::read_dir(dir).map_err(|source| ManifestError::Io { path: dir.to_owned(), source })?;
    for entry in entries {
        let entry = entry.map_err(|source| ManifestError::Io { path: dir.to_owned(), source })?;
        let path = entry.path();
        if path.is_dir() {
            collect_files(base, &path, out)?;
        } else {
            let rel = path.strip_prefix(base).unwrap_or(&path);
            let parts: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
            out.push(parts.join("/"));
        }
    }
    Ok(())
}
