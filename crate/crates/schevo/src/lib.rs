//! File formats, the revision-history driver and report rendering around
//! `schevo-core`.

pub mod config;
pub mod history;
pub mod manifest;
pub mod report;

use thiserror::Error;

use schevo_core::{
    aggregate, apply_smos, per_revision_table, relative_difference, DiffError, DiffResult, KindCounts, MetricError,
};

pub use config::{load_config, AnalysisConfig, ConfigError, ConfigFile, FileRule, RuleKind};
pub use history::{build_history, consecutive_diffs, RevisionResult};
pub use manifest::{load_manifest, manifest_from_tree, sha256_hex, ManifestError, RevisionManifest, VerifiedManifest};
pub use report::{Format, Report};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    /// A differ or aggregator invariant did not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl From<DiffError> for AnalysisError {
    fn from(e: DiffError) -> Self {
        AnalysisError::Invariant(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub history: Vec<RevisionResult>,
    pub diffs: Vec<DiffResult>,
    pub report: Report,
}

/// The whole pipeline: snapshots, consecutive diffs, statistics and, given
/// baseline counts, the comparison against them.
pub fn analyze(m: &VerifiedManifest, cfg: &AnalysisConfig, baseline: Option<&KindCounts>) -> Result<Analysis, AnalysisError> {
    let history = build_history(m, cfg);
    let diffs = consecutive_diffs(&history)?;
    let stats = aggregate(&diffs);
    stats.check().map_err(AnalysisError::Invariant)?;
    let comparison = baseline.map(|p| relative_difference(p, &stats.counts)).transpose()?;
    let report = Report {
        project: m.project().to_owned(),
        selection_mode: cfg.selection_mode().to_owned(),
        stats,
        per_revision: per_revision_table(&diffs),
        comparison,
    };
    Ok(Analysis { history, diffs, report })
}

/// Replays every diff on its base snapshot and checks that the result has
/// the target's shape.
pub fn verify_round_trip(history: &[RevisionResult], diffs: &[DiffResult]) -> Result<(), AnalysisError> {
    for (pair, diff) in history.windows(2).zip(diffs) {
        let replayed = apply_smos(&pair[0].snapshot, &diff.smos).map_err(|e| AnalysisError::Invariant(e.to_string()))?;
        if replayed.shape() != pair[1].snapshot.shape() {
            return Err(AnalysisError::Invariant(format!(
                "replaying the diff {} -> {} does not reproduce {}",
                pair[0].label, pair[1].label, pair[1].label
            )));
        }
    }
    Ok(())
}
