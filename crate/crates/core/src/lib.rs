//! Core of the schema-evolution miner.
//!
//! Everything in this crate is a pure function over in-memory text and
//! schema values: pulling `CREATE TABLE` statements out of `.sql` files and
//! C-family string literals, parsing them into [`TableDef`]s, normalizing
//! dialect noise, diffing consecutive [`SchemaSnapshot`]s into schema
//! modification operations ([`Smo`]) and aggregating those into change
//! statistics. File IO, manifests and the command line live in the `schevo`
//! crate.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod diag;
pub mod diff;
pub mod extract;
pub mod lexer;
pub mod model;
pub mod normalize;
pub mod order;
pub mod parse;
pub mod render;
pub mod stats;

pub use diag::{Diagnostic, Origin, Severity};
pub use diff::{apply_smos, diff_schemas, diff_tables, ApplyError, DiffError, DiffResult, Smo, SmoDetail, SmoKind};
pub use extract::{
    extract_ddl, splice_string_literals, strip_sql_comments, Extraction, RawStatement, SourceFile,
    SourceKind, Spliced, SplicedLiteral, StatementKind, Stripped, PARAM_SENTINEL,
};
pub use model::{ColumnDef, ForeignKey, ParseError, SchemaShape, SchemaSnapshot, TableDef, TableShape};
pub use normalize::{normalize_snapshot, normalize_table, CaseFold, NormalizeConfig, NormalizeError};
pub use order::{order_for_emission, Emission};
pub use parse::{parse_create_table, parse_schema};
pub use render::{render_schema, render_table};
pub use stats::{
    aggregate, per_revision_table, relative_difference, ChangeStats, ComparisonReport, Hundredths, KindCounts,
    KindPercents, MetricError, RevisionRow, RevisionTable, Tenths,
};
