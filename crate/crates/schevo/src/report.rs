//! Report rendering. Every renderer is a pure function of its input, and
//! all output uses `\n` line endings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use schevo_core::{ChangeStats, ComparisonReport, KindCounts, RevisionTable, SmoKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub project: String,
    pub selection_mode: String,
    pub stats: ChangeStats,
    pub per_revision: RevisionTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonReport>,
}

/// A file of per-kind counts, either bare or inside a JSON report's
/// `stats.counts`.
pub fn parse_counts(text: &str) -> Result<KindCounts, serde_json::Error> {
    #[derive(Deserialize)]
    struct Stats {
        counts: KindCounts,
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum CountsFile {
        Report { stats: Stats },
        Bare(KindCounts),
    }
    Ok(match serde_json::from_str::<CountsFile>(text)? {
        CountsFile::Report { stats } => stats.counts,
        CountsFile::Bare(c) => c,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

fn csv_string(rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv of UTF-8 fields")
}

pub fn stats_csv(project: &str, selection_mode: &str, stats: &ChangeStats) -> String {
    let mut rows = vec![["project", "kind", "count", "percent", "suspect_count", "selection_mode"].map(String::from).to_vec()];
    for kind in SmoKind::ALL {
        rows.push(vec![
            project.to_owned(),
            kind.name().to_owned(),
            stats.counts[kind].to_string(),
            stats.percentages[kind].to_string(),
            stats.suspect_counts[kind].to_string(),
            selection_mode.to_owned(),
        ]);
    }
    rows.push(vec![
        project.to_owned(),
        "total".to_owned(),
        stats.total.to_string(),
        if stats.total > 0 { "100.0" } else { "0.0" }.to_owned(),
        stats.suspect_total.to_string(),
        selection_mode.to_owned(),
    ]);
    csv_string(&rows)
}

pub fn per_revision_csv(project: &str, selection_mode: &str, table: &RevisionTable) -> String {
    let mut rows = vec![["project", "revision", "changes", "suspect", "selection_mode"].map(String::from).to_vec()];
    for r in &table.rows {
        rows.push(vec![
            project.to_owned(),
            r.revision.clone(),
            r.changes.to_string(),
            r.suspect.to_string(),
            selection_mode.to_owned(),
        ]);
    }
    csv_string(&rows)
}

pub fn comparison_csv(project: &str, c: &ComparisonReport) -> String {
    let mut rows = vec![["project", "kind", "baseline", "reproduced", "abs_diff"].map(String::from).to_vec()];
    for kind in SmoKind::ALL {
        let (p, r) = (c.baseline[kind], c.reproduced[kind]);
        rows.push(vec![project.to_owned(), kind.name().to_owned(), p.to_string(), r.to_string(), p.abs_diff(r).to_string()]);
    }
    rows.push(vec![
        project.to_owned(),
        "total".to_owned(),
        c.baseline_total.to_string(),
        c.reproduced_total.to_string(),
        c.abs_diff.to_string(),
    ]);
    let mut out = csv_string(&rows);
    out.push('\n');
    out.push_str(&csv_string(&[
        vec!["project".into(), "rel_diff_percent".into()],
        vec![project.to_owned(), c.rel_diff_percent.to_string()],
    ]));
    out
}

fn escape_cell(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Per-kind counts with percentages, one row per project. Projects with no
/// changes contribute no row.
pub fn stats_markdown(rows: &[(&str, &ChangeStats)]) -> String {
    let mut out = String::from("| Project |");
    for kind in SmoKind::ALL {
        let _ = write!(out, " {} |", kind.title());
    }
    out.push_str(" Total | Suspect |\n|---|");
    out.push_str(&"---:|".repeat(SmoKind::ALL.len() + 2));
    out.push('\n');
    for (project, stats) in rows.iter().filter(|(_, s)| s.total > 0) {
        let _ = write!(out, "| {} |", escape_cell(project));
        for kind in SmoKind::ALL {
            let _ = write!(out, " {} ({}%) |", stats.counts[kind], stats.percentages[kind]);
        }
        let _ = writeln!(out, " {} | {} |", stats.total, stats.suspect_total);
    }
    out
}

/// Changes per revision laid out horizontally, revisions as columns.
pub fn per_revision_markdown(table: &RevisionTable) -> String {
    let mut out = String::from("| Revision |");
    for r in &table.rows {
        let _ = write!(out, " {}{} |", escape_cell(&r.revision), if r.suspect { " (suspect)" } else { "" });
    }
    out.push_str(" Total |\n|---|");
    out.push_str(&"---:|".repeat(table.rows.len() + 1));
    out.push_str("\n| Changes |");
    for r in &table.rows {
        let _ = write!(out, " {} |", r.changes);
    }
    let _ = writeln!(out, " {} |", table.total);
    out
}

pub fn comparison_markdown(project: &str, c: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| | {} |", escape_cell(project));
    out.push_str("|---|---:|\n");
    let _ = writeln!(out, "| Baseline total | {} |", c.baseline_total);
    let _ = writeln!(out, "| Reproduced total | {} |", c.reproduced_total);
    let _ = writeln!(out, "| Abs. diff | {} |", c.abs_diff);
    let _ = writeln!(out, "| Rel. diff [%] | {} |", c.rel_diff_percent);
    out
}

pub fn report_markdown(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Schema evolution of {}\n", r.project);
    let _ = writeln!(out, "Selection mode: `{}`\n", r.selection_mode);
    out.push_str("## Change statistics\n\n");
    out.push_str(&stats_markdown(&[(&r.project, &r.stats)]));
    out.push_str("\n## Changes per revision\n\n");
    out.push_str(&per_revision_markdown(&r.per_revision));
    if let Some(c) = &r.comparison {
        out.push_str("\n## Comparison with baseline\n\n");
        out.push_str(&comparison_markdown(&r.project, c));
    }
    out
}

/// Output files for `format`, as (file name, content) pairs.
pub fn render_report(r: &Report, format: Format) -> Vec<(&'static str, String)> {
    match format {
        Format::Json => vec![("report.json", to_json(r))],
        Format::Markdown => vec![("report.md", report_markdown(r))],
        Format::Csv => {
            let mut files = vec![
                ("stats.csv", stats_csv(&r.project, &r.selection_mode, &r.stats)),
                ("per_revision.csv", per_revision_csv(&r.project, &r.selection_mode, &r.per_revision)),
            ];
            if let Some(c) = &r.comparison {
                files.push(("comparison.csv", comparison_csv(&r.project, c)));
            }
            files
        }
    }
}
