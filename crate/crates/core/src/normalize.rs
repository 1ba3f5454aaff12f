//! Dialect normalization: default types for untyped columns, identifier case
//! folding and keyword rewriting, so that diffs see structure only.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::diag::{Diagnostic, Origin};
use crate::lexer::{join_tokens, tokenize, Tok};
use crate::model::{ParseError, SchemaSnapshot, TableDef};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseFold {
    #[default]
    Lower,
    Preserve,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizeConfig {
    /// Type given to columns declared without one.
    pub default_type: String,
    pub case_fold: CaseFold,
    /// Keyword rewrites applied word-wise to type names and column
    /// attributes, matched case-insensitively.
    pub keyword_map: Vec<(String, String)>,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        Self {
            default_type: String::from("integer"),
            case_fold: CaseFold::Lower,
            keyword_map: vec![(String::from("AUTOINCREMENT"), String::from("AUTO_INCREMENT"))],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    EmptyDefaultType,
    /// A rewrite's output is itself rewritten, so normalizing twice would
    /// not be a no-op.
    ChainedKeyword { keyword: String },
    ColumnCollision { table: String, first: String, second: String },
}

impl fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizeError::EmptyDefaultType => f.write_str("default_type must not be empty"),
            NormalizeError::ChainedKeyword { keyword } => {
                write!(f, "keyword_map rewrites `{keyword}` although it is also a rewrite target")
            }
            NormalizeError::ColumnCollision { table, first, second } => {
                write!(f, "columns `{first}` and `{second}` of table `{table}` collide after case folding")
            }
        }
    }
}

impl core::error::Error for NormalizeError {}

impl NormalizeConfig {
    pub fn validate(&self) -> Result<(), NormalizeError> {
        if self.default_type.trim().is_empty() {
            return Err(NormalizeError::EmptyDefaultType);
        }
        for (_, to) in &self.keyword_map {
            if self.keyword_map.iter().any(|(from, _)| from.eq_ignore_ascii_case(to)) {
                return Err(NormalizeError::ChainedKeyword { keyword: to.clone() });
            }
        }
        Ok(())
    }

    fn fold(&self, name: &str) -> String {
        match self.case_fold {
            CaseFold::Lower => name.to_lowercase(),
            CaseFold::Preserve => String::from(name),
        }
    }

    fn fold_all(&self, names: &[String]) -> Vec<String> {
        names.iter().map(|n| self.fold(n)).collect()
    }

    fn map_keyword<'a>(&'a self, word: &'a str) -> &'a str {
        self.keyword_map
            .iter()
            .find(|(from, _)| from.eq_ignore_ascii_case(word))
            .map_or(word, |(_, to)| to.as_str())
    }
}

/// Rewrites the bare words of a token sequence; quoted parts are untouched.
/// Text that does not lex is returned unchanged.
fn rewrite_words(text: &str, f: impl Fn(&str) -> String) -> String {
    match tokenize(text) {
        Ok(toks) => {
            let toks: Vec<Tok> = toks
                .into_iter()
                .map(|t| match t.tok {
                    Tok::Word(w) => Tok::Word(f(&w)),
                    other => other,
                })
                .collect();
            join_tokens(&toks)
        }
        Err(_) => String::from(text),
    }
}

/// Normalizes one table. Idempotent; the result always has a type on
/// every column.
pub fn normalize_table(t: &TableDef, cfg: &NormalizeConfig) -> Result<TableDef, NormalizeError> {
    cfg.validate()?;
    let mut out = t.clone();
    out.name = cfg.fold(&t.name);

    let mut seen: BTreeMap<String, &str> = BTreeMap::new();
    for (col, orig) in out.columns.iter_mut().zip(&t.columns) {
        col.name = cfg.fold(&orig.name);
        if let Some(first) = seen.insert(col.name.clone(), &orig.name) {
            return Err(NormalizeError::ColumnCollision {
                table: t.name.clone(),
                first: String::from(first),
                second: orig.name.clone(),
            });
        }
        let ty = orig.col_type.as_deref().unwrap_or(&cfg.default_type);
        col.col_type = Some(rewrite_words(ty, |w| cfg.map_keyword(w).to_lowercase()));
        col.default_value = orig.default_value.as_deref().map(|d| rewrite_words(d, |w| w.to_lowercase()));
        col.attributes = orig
            .attributes
            .iter()
            .map(|a| {
                rewrite_words(a, |w| {
                    let mapped = cfg.map_keyword(w);
                    match cfg.case_fold {
                        CaseFold::Lower => mapped.to_lowercase(),
                        CaseFold::Preserve => String::from(mapped),
                    }
                })
            })
            .collect();
    }

    out.primary_key = cfg.fold_all(&t.primary_key);
    out.uniques = t.uniques.iter().map(|u| cfg.fold_all(u)).collect();
    for fk in &mut out.foreign_keys {
        fk.columns = cfg.fold_all(&fk.columns);
        fk.ref_table = cfg.fold(&fk.ref_table);
        fk.ref_columns = cfg.fold_all(&fk.ref_columns);
    }
    if cfg.case_fold == CaseFold::Lower {
        out.raw_constraints = t.raw_constraints.iter().map(|r| rewrite_words(r, |w| w.to_lowercase())).collect();
    }
    Ok(out)
}

/// Normalizes every table of a snapshot and records the configuration used.
///
/// A table that cannot be normalized is removed and turned into a
/// [`ParseError`], which marks the snapshot partial. Only an invalid
/// configuration is an error.
pub fn normalize_snapshot(s: &SchemaSnapshot, cfg: &NormalizeConfig) -> Result<SchemaSnapshot, NormalizeError> {
    cfg.validate()?;
    let mut out = SchemaSnapshot::new(s.revision.clone());
    out.errors = s.errors.clone();
    out.diagnostics = s.diagnostics.clone();
    for table in s.tables.values() {
        match normalize_table(table, cfg) {
            Ok(n) => {
                if out.tables.contains_key(&n.name) {
                    out.diagnostics.push(Diagnostic::warning(
                        None,
                        format!("tables collide as `{}` after case folding; the later one is kept", n.name),
                    ));
                }
                out.tables.insert(n.name.clone(), n);
            }
            Err(e) => out.errors.push(ParseError {
                origin: Origin::line(s.revision.clone(), 1),
                message: format!("{e}"),
                statement_text: crate::render::render_table(table),
            }),
        }
    }
    out.normalized_with = Some(cfg.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{extract_ddl, SourceFile, SourceKind};
    use crate::model::ColumnDef;
    use crate::parse::parse_schema;
    use alloc::collections::BTreeSet;

    #[test]
    fn untyped_columns_get_the_default_type() {
        let code = "exec(sql, \"CREATE TABLE file_deltas\\n\"\n \"\\t(\\n\"\n \"\\tid not null,    -- strong hash of file contents\\n\"\n \"\\tbase not null,  -- joins with files.id or file_deltas.id\\n\"\n \"\\tdelta not null, -- compressed [...]\\n\"\n \"\\tunique(id, base)\\n\"\n \"\\t)\", NULL);";
        let ex = extract_ddl(&SourceFile::new("m.cc", SourceKind::CLike, code));
        let snap = parse_schema(&ex.statements, "r");
        let t = normalize_table(&snap.tables["file_deltas"], &NormalizeConfig::default()).unwrap();
        let want: Vec<ColumnDef> =
            ["id", "base", "delta"].iter().map(|n| ColumnDef::new(*n, Some("integer")).not_null()).collect();
        assert_eq!(t.columns, want);
        assert_eq!(t.uniques, BTreeSet::from([vec![String::from("id"), String::from("base")]]));
    }

    #[test]
    fn normalization_is_idempotent_on_an_example() {
        let mut t = TableDef::new("Books");
        t.columns.push(ColumnDef::new("ID", Some("INTEGER")));
        t.columns[0].attributes.push("AUTOINCREMENT".into());
        t.columns.push(ColumnDef::new("Title", Some("VARCHAR(20)")).with_default("NULL"));
        t.primary_key.push("ID".into());
        let cfg = NormalizeConfig::default();
        let once = normalize_table(&t, &cfg).unwrap();
        assert_eq!(once.name, "books");
        assert_eq!(once.columns[0].col_type.as_deref(), Some("integer"));
        assert_eq!(once.columns[0].attributes, ["auto_increment"]);
        assert_eq!(once.columns[1].col_type.as_deref(), Some("varchar(20)"));
        assert_eq!(once.columns[1].default_value.as_deref(), Some("null"));
        assert_eq!(once.primary_key, ["id"]);
        assert_eq!(normalize_table(&once, &cfg).unwrap(), once);
    }

    #[test]
    fn case_collision_is_an_error() {
        let mut t = TableDef::new("t");
        t.columns.push(ColumnDef::new("A", None));
        t.columns.push(ColumnDef::new("a", None));
        let e = normalize_table(&t, &NormalizeConfig::default()).unwrap_err();
        assert_eq!(e, NormalizeError::ColumnCollision { table: "t".into(), first: "A".into(), second: "a".into() });
        let preserve = NormalizeConfig { case_fold: CaseFold::Preserve, ..NormalizeConfig::default() };
        assert!(normalize_table(&t, &preserve).is_ok());
    }

    #[test]
    fn string_defaults_keep_their_case() {
        let mut t = TableDef::new("t");
        t.columns.push(ColumnDef::new("a", Some("enum('A','b')")).with_default("'Yes'"));
        let n = normalize_table(&t, &NormalizeConfig::default()).unwrap();
        assert_eq!(n.columns[0].col_type.as_deref(), Some("enum('A', 'b')"));
        assert_eq!(n.columns[0].default_value.as_deref(), Some("'Yes'"));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let empty = NormalizeConfig { default_type: " ".into(), ..NormalizeConfig::default() };
        assert_eq!(empty.validate(), Err(NormalizeError::EmptyDefaultType));
        let chained = NormalizeConfig {
            keyword_map: vec![("a".into(), "b".into()), ("B".into(), "c".into())],
            ..NormalizeConfig::default()
        };
        assert!(matches!(chained.validate(), Err(NormalizeError::ChainedKeyword { .. })));
    }

    #[test]
    fn snapshot_normalization_contains_bad_tables() {
        let mut bad = TableDef::new("bad");
        bad.columns.push(ColumnDef::new("X", None));
        bad.columns.push(ColumnDef::new("x", None));
        let s = SchemaSnapshot::new("r").with_table(bad).with_table(TableDef {
            columns: vec![ColumnDef::new("y", None)],
            ..TableDef::new("Good")
        });
        let n = normalize_snapshot(&s, &NormalizeConfig::default()).unwrap();
        assert_eq!(n.tables.keys().collect::<Vec<_>>(), ["good"]);
        assert!(n.partial());
        assert_eq!(n.normalized_with, Some(NormalizeConfig::default()));
    }
}
