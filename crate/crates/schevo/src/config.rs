//! Analysis configuration: which files hold schema declarations and how
//! their DDL is normalized.

use std::fs;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobMatcher};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use schevo_core::{NormalizeConfig, NormalizeError, SourceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Sql,
    CLike,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileRule {
    pub pattern: String,
    pub kind: RuleKind,
}

fn default_selection_mode() -> String {
    String::from("default")
}

/// The on-disk form of an [`AnalysisConfig`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub file_rules: Vec<FileRule>,
    #[serde(default)]
    pub normalize: NormalizeConfig,
    #[serde(default = "default_selection_mode")]
    pub selection_mode: String,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: unsupported config extension (use .json or .toml)")]
    Extension { path: PathBuf },
    #[error("file_rules must contain at least one rule that is not `ignore`")]
    NoActiveRule,
    #[error("invalid glob `{pattern}`: {source}")]
    Glob { pattern: String, source: globset::Error },
    #[error("invalid normalize section: {0}")]
    Normalize(#[from] NormalizeError),
}

/// A validated configuration. File rules are tried in order and the first
/// matching pattern decides a file's kind.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    rules: Vec<(GlobMatcher, RuleKind)>,
    file: ConfigFile,
}

impl AnalysisConfig {
    pub fn new(file: ConfigFile) -> Result<Self, ConfigError> {
        if !file.file_rules.iter().any(|r| r.kind != RuleKind::Ignore) {
            return Err(ConfigError::NoActiveRule);
        }
        file.normalize.validate()?;
        let rules = file
            .file_rules
            .iter()
            .map(|r| {
                Glob::new(&r.pattern)
                    .map(|g| (g.compile_matcher(), r.kind))
                    .map_err(|source| ConfigError::Glob { pattern: r.pattern.clone(), source })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { rules, file })
    }

    /// The source kind for `path`, or `None` when it is ignored or matches
    /// no rule.
    pub fn classify(&self, path: &str) -> Option<SourceKind> {
        match self.rules.iter().find(|(m, _)| m.is_match(path)).map(|(_, k)| *k)? {
            RuleKind::Sql => Some(SourceKind::Sql),
            RuleKind::CLike => Some(SourceKind::CLike),
            RuleKind::Ignore => None,
        }
    }

    pub fn normalize(&self) -> &NormalizeConfig {
        &self.file.normalize
    }

    pub fn selection_mode(&self) -> &str {
        &self.file.selection_mode
    }

    pub fn set_selection_mode(&mut self, mode: impl Into<String>) {
        self.file.selection_mode = mode.into();
    }

    pub fn file(&self) -> &ConfigFile {
        &self.file
    }
}

pub fn load_config(path: &Path) -> Result<AnalysisConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    let format_err = |message: String| ConfigError::Format { path: path.to_owned(), message };
    let file: ConfigFile = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str(&text).map_err(|e| format_err(e.to_string()))?,
        Some("toml") => toml::from_str(&text).map_err(|e| format_err(e.to_string()))?,
        _ => return Err(ConfigError::Extension { path: path.to_owned() }),
    };
    AnalysisConfig::new(file)
}
