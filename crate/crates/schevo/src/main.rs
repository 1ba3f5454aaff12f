use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use schevo::report::{self, Format};
use schevo::{analyze, load_config, load_manifest, manifest_from_tree, verify_round_trip, AnalysisError};
use schevo_core::{
    extract_ddl, normalize_snapshot, parse_schema, relative_difference, render_schema, NormalizeConfig, SourceFile,
    SourceKind,
};

#[derive(Parser)]
#[command(name = "schevo", version, about = "Mine schema evolution from embedded and standalone SQL DDL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the DDL statements found in source files.
    Extract {
        /// Classify files with this config's file rules instead of by extension.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the parsed and normalized schema instead of raw statements.
        #[arg(long)]
        schema: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Analyze every revision of a manifest and report schema changes.
    Analyze {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        /// Output directory; reports go to standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replay every diff and fail with exit code 2 on a mismatch.
        #[arg(long)]
        verify: bool,
        /// Label recorded in reports; overrides the config's value.
        #[arg(long)]
        selection_mode: Option<String>,
        /// Per-kind baseline counts (JSON) to compare against.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Also write each revision's normalized schema here.
        #[arg(long)]
        schemas_dir: Option<PathBuf>,
    },
    /// Compare reproduced counts against baseline counts.
    Compare {
        /// A JSON report from `analyze` or a bare per-kind counts file.
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        #[arg(long, default_value = "project")]
        project: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a hashed manifest for revision directories below a root.
    Manifest {
        #[arg(long)]
        project: String,
        #[arg(long)]
        root: PathBuf,
        /// Manifest file to write; printed to standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Revision subdirectories of the root, oldest first.
        #[arg(required = true)]
        labels: Vec<String>,
    },
}

enum Failure {
    Invalid(anyhow::Error),
    Invariant(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Invariant(msg) => Failure::Invariant(msg),
            other => Failure::Invalid(other.into()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Extract { config, schema, files } => cmd_extract(config.as_deref(), schema, &files)?,
        Command::Analyze { manifest, config, format, out, verify, selection_mode, baseline, schemas_dir } => {
            let m = load_manifest(&manifest).context("loading manifest")?;
            let mut cfg = load_config(&config).context("loading config")?;
            if let Some(mode) = selection_mode {
                cfg.set_selection_mode(mode);
            }
            let baseline = baseline.map(|p| read_counts(&p)).transpose()?;
            let analysis = analyze(&m, &cfg, baseline.as_ref())?;
            if verify {
                verify_round_trip(&analysis.history, &analysis.diffs)?;
            }
            if let Some(dir) = schemas_dir {
                for rev in &analysis.history {
                    let name = format!("{}.sql", rev.label.replace(['/', '\\'], "_"));
                    write_file(&dir, &name, &render_schema(&rev.snapshot))?;
                }
            }
            emit(out.as_deref(), report::render_report(&analysis.report, format))?;
        }
        Command::Compare { report: report_path, baseline, format, project, out } => {
            let r = read_counts(&report_path)?;
            let p = read_counts(&baseline)?;
            let c = relative_difference(&p, &r).map_err(|e| anyhow::anyhow!("{}: {e}", baseline.display()))?;
            let file = match format {
                Format::Json => ("comparison.json", report::to_json(&c)),
                Format::Markdown => ("comparison.md", report::comparison_markdown(&project, &c)),
                Format::Csv => ("comparison.csv", report::comparison_csv(&project, &c)),
            };
            emit(out.as_deref(), vec![file])?;
        }
        Command::Manifest { project, root, out, labels } => {
            let mut m = manifest_from_tree(&project, &root, &labels).context("building manifest")?;
            if let Some(out) = &out {
                m.root = relative_root(&root, out)?;
            }
            let text = report::to_json(&m);
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn cmd_extract(config: Option<&Path>, schema: bool, files: &[PathBuf]) -> anyhow::Result<()> {
    let cfg = config.map(load_config).transpose()?;
    let normalize = cfg.as_ref().map_or_else(NormalizeConfig::default, |c| c.normalize().clone());
    let mut stdout = std::io::stdout().lock();
    let mut statements = Vec::new();
    for path in files {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let name = path.display().to_string();
        let kind = match &cfg {
            Some(c) => match c.classify(&name) {
                Some(k) => k,
                None => continue,
            },
            None if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("sql")) => SourceKind::Sql,
            None => SourceKind::CLike,
        };
        let ex = extract_ddl(&SourceFile::new(name, kind, text));
        for d in &ex.diagnostics {
            eprintln!("{d}");
        }
        if schema {
            statements.extend(ex.statements);
            continue;
        }
        for stmt in &ex.statements {
            writeln!(stdout, "-- {}\n{};\n", stmt.origin, stmt.text)?;
        }
    }
    if schema {
        let snapshot = normalize_snapshot(&parse_schema(&statements, "input"), &normalize)?;
        for e in &snapshot.errors {
            eprintln!("error: {e}");
        }
        for d in &snapshot.diagnostics {
            eprintln!("{d}");
        }
        write!(stdout, "{}", render_schema(&snapshot))?;
    }
    Ok(())
}

fn read_counts(path: &Path) -> anyhow::Result<schevo_core::KindCounts> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    report::parse_counts(&text).with_context(|| format!("{} holds no per-kind counts", path.display()))
}

fn write_file(dir: &Path, name: &str, content: &str) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, files: Vec<(&'static str, String)>) -> anyhow::Result<()> {
    match out {
        Some(dir) => files.iter().try_for_each(|(name, content)| write_file(dir, name, content)),
        None => {
            let text: Vec<String> = files.into_iter().map(|(_, c)| c).collect();
            print!("{}", text.join("\n"));
            Ok(())
        }
    }
}

/// `root` expressed relative to the directory of the manifest at `out`.
fn relative_root(root: &Path, out: &Path) -> anyhow::Result<String> {
    let abs = |p: &Path| std::path::absolute(p).with_context(|| format!("resolving {}", p.display()));
    let root = abs(root)?;
    let base = abs(out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")))?;
    let (r, b): (Vec<_>, Vec<_>) = (root.components().collect(), base.components().collect());
    let common = r.iter().zip(&b).take_while(|(x, y)| x == y).count();
    if common == 0 {
        bail!("{} and {} share no common ancestor", root.display(), base.display());
    }
    let mut parts: Vec<String> = vec!["..".into(); b.len() - common];
    parts.extend(r[common..].iter().map(|c| c.as_os_str().to_string_lossy().into_owned()));
    Ok(if parts.is_empty() { ".".into() } else { parts.join("/") })
}
