use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::diag::{Diagnostic, Origin};
use crate::normalize::NormalizeConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDef {
    pub name: String,
    /// Type name as written, e.g. `varchar(255)` or `unsigned int`; `None`
    /// for untyped SQLite columns.
    pub col_type: Option<String>,
    pub not_null: bool,
    /// Default value as a whitespace-normalized token sequence.
    pub default_value: Option<String>,
    pub is_pk_inline: bool,
    /// Column attributes kept verbatim but never diffed (`AUTOINCREMENT`,
    /// `COLLATE nocase`, `CHECK(...)`, unknown dialect noise).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<String>,
}

impl ColumnDef {
    pub fn new(name: impl Into<String>, col_type: Option<&str>) -> Self {
        Self {
            name: name.into(),
            col_type: col_type.map(String::from),
            not_null: false,
            default_value: None,
            is_pk_inline: false,
            attributes: Vec::new(),
        }
    }

    pub fn not_null(mut self) -> Self {
        self.not_null = true;
        self
    }

    pub fn with_default(mut self, value: &str) -> Self {
        self.default_value = Some(String::from(value));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ForeignKey {
    pub columns: Vec<String>,
    pub ref_table: String,
    pub ref_columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDef {
    pub name: String,
    pub columns: Vec<ColumnDef>,
    pub primary_key: Vec<String>,
    pub uniques: BTreeSet<Vec<String>>,
    pub foreign_keys: Vec<ForeignKey>,
    pub raw_constraints: Vec<String>,
}

impl TableDef {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            columns: Vec::new(),
            primary_key: Vec::new(),
            uniques: BTreeSet::new(),
            foreign_keys: Vec::new(),
            raw_constraints: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<&ColumnDef> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Checks the structural invariants: nonempty, case-insensitively unique
    /// column names, and key/unique/foreign-key columns that exist.
    pub fn validate(&self) -> Result<(), String> {
        if self.name.is_empty() {
            return Err(String::from("empty table name"));
        }
        let mut seen = BTreeSet::new();
        for col in &self.columns {
            if col.name.is_empty() {
                return Err(String::from("empty column name"));
            }
            if !seen.insert(col.name.to_lowercase()) {
                return Err(alloc::format!("duplicate column `{}`", col.name));
            }
        }
        let referenced = self
            .primary_key
            .iter()
            .chain(self.uniques.iter().flatten())
            .chain(self.foreign_keys.iter().flat_map(|fk| fk.columns.iter()));
        for name in referenced {
            if self.column(name).is_none() {
                return Err(alloc::format!("constraint names unknown column `{name}`"));
            }
        }
        Ok(())
    }
}

/// A `CREATE TABLE` statement that could not be parsed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseError {
    pub origin: Origin,
    pub message: String,
    pub statement_text: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.origin, self.message)
    }
}

impl core::error::Error for ParseError {}

/// All tables of one revision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaSnapshot {
    pub revision: String,
    pub tables: BTreeMap<String, TableDef>,
    pub errors: Vec<ParseError>,
    pub diagnostics: Vec<Diagnostic>,
    /// The configuration the snapshot was normalized with, if any.
    pub normalized_with: Option<NormalizeConfig>,
}

impl SchemaSnapshot {
    pub fn new(revision: impl Into<String>) -> Self {
        Self {
            revision: revision.into(),
            tables: BTreeMap::new(),
            errors: Vec::new(),
            diagnostics: Vec::new(),
            normalized_with: None,
        }
    }

    /// True iff some statement of this revision failed to parse.
    pub fn partial(&self) -> bool {
        !self.errors.is_empty()
    }

    pub fn with_table(mut self, table: TableDef) -> Self {
        self.tables.insert(table.name.clone(), table);
        self
    }

    /// The part of the snapshot that schema modification operations observe.
    pub fn shape(&self) -> SchemaShape {
        self.tables.iter().map(|(name, t)| (name.clone(), TableShape::of(t))).collect()
    }
}

/// Per table: column name → (type, default) and the primary key. Two
/// snapshots with equal shapes diff to nothing.
pub type SchemaShape = BTreeMap<String, TableShape>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableShape {
    pub columns: BTreeMap<String, (Option<String>, Option<String>)>,
    pub primary_key: Vec<String>,
}

impl TableShape {
    pub fn of(t: &TableDef) -> Self {
        Self {
            columns: t
                .columns
                .iter()
                .map(|c| (c.name.clone(), (c.col_type.clone(), c.default_value.clone())))
                .collect(),
            primary_key: t.primary_key.clone(),
        }
    }
}
