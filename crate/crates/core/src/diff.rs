//! Schema differencing into the seven kinds of schema modification
//! operation, and the inverse `apply_smos` used to verify diffs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{ColumnDef, SchemaSnapshot, TableDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoKind {
    CreateTable,
    DropTable,
    AddColumn,
    DropColumn,
    TypeChange,
    InitChange,
    KeyChange,
}

impl SmoKind {
    pub const ALL: [SmoKind; 7] = [
        SmoKind::CreateTable,
        SmoKind::DropTable,
        SmoKind::AddColumn,
        SmoKind::DropColumn,
        SmoKind::TypeChange,
        SmoKind::InitChange,
        SmoKind::KeyChange,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Stable machine name, used as JSON key and CSV value.
    pub fn name(self) -> &'static str {
        match self {
            SmoKind::CreateTable => "create_table",
            SmoKind::DropTable => "drop_table",
            SmoKind::AddColumn => "add_column",
            SmoKind::DropColumn => "drop_column",
            SmoKind::TypeChange => "type_change",
            SmoKind::InitChange => "init_change",
            SmoKind::KeyChange => "key_change",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Column heading as used in published change tables.
    pub fn title(self) -> &'static str {
        match self {
            SmoKind::CreateTable => "CREATE TABLE",
            SmoKind::DropTable => "DROP TABLE",
            SmoKind::AddColumn => "ADD COLUMN",
            SmoKind::DropColumn => "DROP COLUMN",
            SmoKind::TypeChange => "Type change",
            SmoKind::InitChange => "Init change",
            SmoKind::KeyChange => "Key change",
        }
    }
}

impl fmt::Display for SmoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum SmoDetail {
    /// The created or dropped table.
    Table { table: TableDef },
    /// The added or dropped column.
    Column { column: ColumnDef },
    Type { old: Option<String>, new: Option<String> },
    Init { old: Option<String>, new: Option<String> },
    Key { old: Vec<String>, new: Vec<String> },
}

/// One schema modification operation.
///
/// Built only through the constructors, which keep `column` present exactly
/// for the column-level kinds and `old != new` for the change kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Smo {
    kind: SmoKind,
    table: String,
    column: Option<String>,
    detail: SmoDetail,
}

impl Smo {
    pub fn kind(&self) -> SmoKind {
        self.kind
    }

    pub fn table(&self) -> &str {
        &self.table
    }

    pub fn column(&self) -> Option<&str> {
        self.column.as_deref()
    }

    pub fn detail(&self) -> &SmoDetail {
        &self.detail
    }

    pub fn create_table(t: &TableDef) -> Self {
        Self { kind: SmoKind::CreateTable, table: t.name.clone(), column: None, detail: SmoDetail::Table { table: t.clone() } }
    }

    pub fn drop_table(t: &TableDef) -> Self {
        Self { kind: SmoKind::DropTable, table: t.name.clone(), column: None, detail: SmoDetail::Table { table: t.clone() } }
    }

    pub fn add_column(table: &str, c: &ColumnDef) -> Self {
        Self {
            kind: SmoKind::AddColumn,
            table: String::from(table),
            column: Some(c.name.clone()),
            detail: SmoDetail::Column { column: c.clone() },
        }
    }

    pub fn drop_column(table: &str, c: &ColumnDef) -> Self {
        Self {
            kind: SmoKind::DropColumn,
            table: String::from(table),
            column: Some(c.name.clone()),
            detail: SmoDetail::Column { column: c.clone() },
        }
    }

    pub fn type_change(table: &str, column: &str, old: Option<String>, new: Option<String>) -> Option<Self> {
        (old != new).then(|| Self {
            kind: SmoKind::TypeChange,
            table: String::from(table),
            column: Some(String::from(column)),
            detail: SmoDetail::Type { old, new },
        })
    }

    pub fn init_change(table: &str, column: &str, old: Option<String>, new: Option<String>) -> Option<Self> {
        (old != new).then(|| Self {
            kind: SmoKind::InitChange,
            table: String::from(table),
            column: Some(String::from(column)),
            detail: SmoDetail::Init { old, new },
        })
    }

    pub fn key_change(table: &str, old: Vec<String>, new: Vec<String>) -> Option<Self> {
        (old != new).then(|| Self { kind: SmoKind::KeyChange, table: String::from(table), column: None, detail: SmoDetail::Key { old, new } })
    }
}

impl fmt::Display for Smo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.column {
            Some(c) => write!(f, "{}({}.{})", self.kind, self.table, c),
            None => write!(f, "{}({})", self.kind, self.table),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffResult {
    pub from_revision: String,
    pub to_revision: String,
    pub smos: Vec<Smo>,
    /// Set when either side had parse errors, so drop/create pairs may be
    /// artifacts of a missing declaration rather than real changes.
    pub suspect: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffError {
    ConfigMismatch { from_revision: String, to_revision: String },
    TableMismatch { old: String, new: String },
}

impl fmt::Display for DiffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffError::ConfigMismatch { from_revision, to_revision } => write!(
                f,
                "revisions `{from_revision}` and `{to_revision}` were normalized with different configurations"
            ),
            DiffError::TableMismatch { old, new } => write!(f, "cannot diff table `{old}` against table `{new}`"),
        }
    }
}

impl core::error::Error for DiffError {}

/// Column-level operations turning `old` into `new`, which must share a name.
///
/// Dropped columns come first in `old` order, then additions, type changes
/// and default changes in `new` column order, then at most one key change.
pub fn diff_tables(old: &TableDef, new: &TableDef) -> Result<Vec<Smo>, DiffError> {
    if old.name != new.name {
        return Err(DiffError::TableMismatch { old: old.name.clone(), new: new.name.clone() });
    }
    let table = new.name.as_str();
    let mut smos: Vec<Smo> = old
        .columns
        .iter()
        .filter(|c| new.column(&c.name).is_none())
        .map(|c| Smo::drop_column(table, c))
        .collect();
    for col in &new.columns {
        match old.column(&col.name) {
            None => smos.push(Smo::add_column(table, col)),
            Some(prev) => {
                smos.extend(Smo::type_change(table, &col.name, prev.col_type.clone(), col.col_type.clone()));
                smos.extend(Smo::init_change(table, &col.name, prev.default_value.clone(), col.default_value.clone()));
            }
        }
    }
    smos.extend(Smo::key_change(table, old.primary_key.clone(), new.primary_key.clone()));
    Ok(smos)
}

/// Operations turning the `old` snapshot into `new`.
///
/// Tables are matched by name. Dropped tables come first, then created
/// tables, both alphabetical, then the column-level operations of each
/// surviving table in alphabetical table order. Created and dropped tables
/// do not additionally produce column operations.
pub fn diff_schemas(old: &SchemaSnapshot, new: &SchemaSnapshot) -> Result<DiffResult, DiffError> {
    if old.normalized_with != new.normalized_with {
        return Err(DiffError::ConfigMismatch {
            from_revision: old.revision.clone(),
            to_revision: new.revision.clone(),
        });
    }
    let mut smos: Vec<Smo> = old
        .tables
        .values()
        .filter(|t| !new.tables.contains_key(&t.name))
        .map(Smo::drop_table)
        .collect();
    smos.extend(new.tables.values().filter(|t| !old.tables.contains_key(&t.name)).map(Smo::create_table));
    for (name, new_table) in &new.tables {
        if let Some(old_table) = old.tables.get(name) {
            smos.extend(diff_tables(old_table, new_table)?);
        }
    }
    Ok(DiffResult {
        from_revision: old.revision.clone(),
        to_revision: new.revision.clone(),
        smos,
        suspect: old.partial() || new.partial(),
    })
}

/// An operation that does not fit the snapshot it is applied to. Seeing one
/// for a diff's own base means the differ is broken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplyError {
    pub smo: String,
    pub message: String,
}

impl fmt::Display for ApplyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot apply {}: {}", self.smo, self.message)
    }
}

impl core::error::Error for ApplyError {}

/// Replays operations on `base`. The result has the same [`shape`] as the
/// diff's target; attributes outside the operation taxonomy (nullability,
/// column order, unique and foreign-key constraints of surviving tables)
/// stay as they were in `base`.
///
/// [`shape`]: SchemaSnapshot::shape
pub fn apply_smos(base: &SchemaSnapshot, smos: &[Smo]) -> Result<SchemaSnapshot, ApplyError> {
    let mut out = base.clone();
    for smo in smos {
        let fail = |message: String| ApplyError { smo: format!("{smo}"), message };
        let table_name = smo.table.as_str();
        match (&smo.kind, &smo.detail) {
            (SmoKind::CreateTable, SmoDetail::Table { table }) => {
                if out.tables.contains_key(table_name) {
                    return Err(fail(String::from("table already exists")));
                }
                out.tables.insert(table.name.clone(), table.clone());
            }
            (SmoKind::DropTable, SmoDetail::Table { .. }) => {
                out.tables.remove(table_name).ok_or_else(|| fail(String::from("no such table")))?;
            }
            (kind, detail) => {
                let table = out.tables.get_mut(table_name).ok_or_else(|| fail(String::from("no such table")))?;
                let column = smo.column.as_deref().unwrap_or("");
                let position = table.columns.iter().position(|c| c.name == column);
                match (kind, detail, position) {
                    (SmoKind::AddColumn, SmoDetail::Column { column: def }, None) => table.columns.push(def.clone()),
                    (SmoKind::DropColumn, SmoDetail::Column { .. }, Some(i)) => {
                        table.columns.remove(i);
                    }
                    (SmoKind::TypeChange, SmoDetail::Type { old, new }, Some(i)) => {
                        let col = &mut table.columns[i];
                        if &col.col_type != old {
                            return Err(fail(format!("column type is {:?}, expected {old:?}", col.col_type)));
                        }
                        col.col_type = new.clone();
                    }
                    (SmoKind::InitChange, SmoDetail::Init { old, new }, Some(i)) => {
                        let col = &mut table.columns[i];
                        if &col.default_value != old {
                            return Err(fail(format!("column default is {:?}, expected {old:?}", col.default_value)));
                        }
                        col.default_value = new.clone();
                    }
                    (SmoKind::KeyChange, SmoDetail::Key { old, new }, _) => {
                        if &table.primary_key != old {
                            return Err(fail(format!("primary key is {:?}, expected {old:?}", table.primary_key)));
                        }
                        table.primary_key = new.clone();
                    }
                    (SmoKind::AddColumn, _, Some(_)) => return Err(fail(String::from("column already exists"))),
                    (_, _, None) => return Err(fail(String::from("no such column"))),
                    _ => return Err(fail(String::from("detail does not match the operation kind"))),
                }
            }
        }
    }
    Ok(out)
}
