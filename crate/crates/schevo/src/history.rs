//! Runs extraction, parsing and normalization over every revision of a
//! verified manifest, then diffs consecutive snapshots.

use rayon::prelude::*;
use serde::Serialize;

use schevo_core::{
    diff_schemas, extract_ddl, normalize_snapshot, parse_schema, DiffError, DiffResult, ParseError, RawStatement,
    SchemaSnapshot, Severity, SourceFile, StatementKind,
};

use crate::config::AnalysisConfig;
use crate::manifest::{Revision, VerifiedManifest};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RevisionResult {
    pub label: String,
    pub snapshot: SchemaSnapshot,
    /// Files selected by the file rules.
    pub files_scanned: usize,
    /// `CREATE TABLE` statements handed to the parser.
    pub statements_extracted: usize,
}

fn analyze_revision(m: &VerifiedManifest, rev: &Revision, cfg: &AnalysisConfig) -> RevisionResult {
    let mut statements: Vec<RawStatement> = Vec::new();
    let mut diagnostics = Vec::new();
    let mut extraction_errors = Vec::new();
    let mut files_scanned = 0;
    for entry in &rev.files {
        let Some(kind) = cfg.classify(&entry.path) else { continue };
        files_scanned += 1;
        let bytes = m.content(entry);
        let text = String::from_utf8_lossy(bytes);
        if let std::borrow::Cow::Owned(_) = text {
            diagnostics.push(schevo_core::Diagnostic::warning(
                Some(schevo_core::Origin::line(&entry.path, 1)),
                "file is not valid UTF-8; invalid bytes were replaced",
            ));
        }
        let ex = extract_ddl(&SourceFile::new(&entry.path, kind, text.into_owned()));
        statements.extend(ex.statements.into_iter().filter(|s| s.kind == StatementKind::CreateTable));
        for d in ex.diagnostics {
            match (d.severity, d.origin) {
                // A broken literal or comment may have swallowed declarations,
                // so the snapshot must count as partial.
                (Severity::Error, Some(origin)) => {
                    extraction_errors.push(ParseError { origin, message: d.message, statement_text: String::new() })
                }
                (severity, origin) => diagnostics.push(schevo_core::Diagnostic { severity, origin, message: d.message }),
            }
        }
    }
    if files_scanned == 0 {
        diagnostics.push(schevo_core::Diagnostic::warning(None, "no file of this revision matched the file rules"));
    }
    let mut parsed = parse_schema(&statements, &rev.label);
    parsed.errors.splice(0..0, extraction_errors);
    parsed.diagnostics.splice(0..0, diagnostics);
    let snapshot = normalize_snapshot(&parsed, cfg.normalize()).expect("normalize config validated on load");
    RevisionResult { label: rev.label.clone(), snapshot, files_scanned, statements_extracted: statements.len() }
}

/// One result per revision, in manifest order. Revisions are processed in
/// parallel; nothing here fails, problems end up in snapshot diagnostics.
pub fn build_history(m: &VerifiedManifest, cfg: &AnalysisConfig) -> Vec<RevisionResult> {
    m.revisions().par_iter().map(|rev| analyze_revision(m, rev, cfg)).collect()
}

/// Diffs each revision against its predecessor.
pub fn consecutive_diffs(history: &[RevisionResult]) -> Result<Vec<DiffResult>, DiffError> {
    history.par_windows(2).map(|w| diff_schemas(&w[0].snapshot, &w[1].snapshot)).collect()
}
