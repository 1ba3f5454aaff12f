use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

/// A line span inside one source file. Lines are 1-based and inclusive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Origin {
    pub path: String,
    pub first_line: u32,
    pub last_line: u32,
}

impl Origin {
    pub fn new(path: impl Into<String>, first_line: u32, last_line: u32) -> Self {
        let first_line = first_line.max(1);
        Self { path: path.into(), first_line, last_line: last_line.max(first_line) }
    }

    pub fn line(path: impl Into<String>, line: u32) -> Self {
        Self::new(path, line, line)
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.first_line == self.last_line {
            write!(f, "{}:{}", self.path, self.first_line)
        } else {
            write!(f, "{}:{}-{}", self.path, self.first_line, self.last_line)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// A non-fatal finding attached to an extraction, a snapshot or an emission.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub origin: Option<Origin>,
    pub message: String,
}

impl Diagnostic {
    pub fn warning(origin: Option<Origin>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, origin, message: message.into() }
    }

    pub fn error(origin: Option<Origin>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, origin, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match &self.origin {
            Some(origin) => write!(f, "{level}: {origin}: {}", self.message),
            None => write!(f, "{level}: {}", self.message),
        }
    }
}
