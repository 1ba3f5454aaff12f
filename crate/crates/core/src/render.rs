//! Canonical DDL rendering: lowercase keywords, one column or constraint per
//! line, identifiers quoted only when they would not lex back as themselves.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::lexer::quote_ident;
use crate::model::{SchemaSnapshot, TableDef};
use crate::order::order_for_emission;
use crate::parse::is_reserved;

fn ident(name: &str) -> String {
    let mut chars = name.chars();
    let plain = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain && !is_reserved(name) {
        String::from(name)
    } else {
        quote_ident(name)
    }
}

fn ident_list(names: &[String]) -> String {
    names.iter().map(|n| ident(n)).collect::<Vec<_>>().join(", ")
}

pub fn render_table(t: &TableDef) -> String {
    let inline_pk = match t.primary_key.as_slice() {
        [only] => t.columns.iter().any(|c| c.is_pk_inline && &c.name == only),
        _ => false,
    };
    let mut lines: Vec<String> = Vec::new();
    for c in &t.columns {
        let mut line = ident(&c.name);
        if let Some(ty) = &c.col_type {
            line.push(' ');
            line.push_str(ty);
        }
        if c.not_null {
            line.push_str(" not null");
        }
        if let Some(d) = &c.default_value {
            line.push_str(" default ");
            line.push_str(d);
        }
        if inline_pk && c.is_pk_inline {
            line.push_str(" primary key");
        }
        for attr in &c.attributes {
            line.push(' ');
            line.push_str(attr);
        }
        lines.push(line);
    }
    if !t.primary_key.is_empty() && !inline_pk {
        lines.push(alloc::format!("primary key ({})", ident_list(&t.primary_key)));
    }
    for u in &t.uniques {
        lines.push(alloc::format!("unique ({})", ident_list(u)));
    }
    for fk in &t.foreign_keys {
        let mut line = alloc::format!("foreign key ({}) references {}", ident_list(&fk.columns), ident(&fk.ref_table));
        if !fk.ref_columns.is_empty() {
            let _ = write!(line, " ({})", ident_list(&fk.ref_columns));
        }
        lines.push(line);
    }
    lines.extend(t.raw_constraints.iter().cloned());

    let mut out = alloc::format!("create table {} (\n", ident(&t.name));
    for (i, line) in lines.iter().enumerate() {
        out.push_str("  ");
        out.push_str(line);
        if i + 1 < lines.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(");\n");
    out
}

/// Renders every table of the snapshot in foreign-key emission order.
/// Ordering diagnostics are emitted as leading `--` comment lines.
pub fn render_schema(s: &SchemaSnapshot) -> String {
    let emission = order_for_emission(s);
    let mut out = String::new();
    for d in &emission.diagnostics {
        let _ = writeln!(out, "-- {d}");
    }
    for (i, t) in emission.tables.iter().enumerate() {
        if i > 0 || !emission.diagnostics.is_empty() {
            out.push('\n');
        }
        out.push_str(&render_table(t));
    }
    out
}

impl fmt::Display for TableDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_table(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Origin;
    use crate::extract::RawStatement;
    use crate::parse::parse_create_table;

    fn reparse(t: &TableDef) -> TableDef {
        parse_create_table(&RawStatement::new(render_table(t), Origin::line("r", 1))).unwrap()
    }

    #[test]
    fn renders_canonical_form() {
        let t = parse_create_table(&RawStatement::new(
            "CREATE TABLE file_deltas (id integer NOT NULL, base integer not null, delta INTEGER not null, UNIQUE(id, base))",
            Origin::line("x", 1),
        ))
        .unwrap();
        assert_eq!(
            render_table(&t),
            "create table file_deltas (\n  id integer not null,\n  base integer not null,\n  delta INTEGER not null,\n  unique (id, base)\n);\n"
        );
    }

    #[test]
    fn quotes_awkward_identifiers() {
        let mut t = TableDef::new("table");
        t.columns.push(crate::model::ColumnDef::new("my col", Some("text")));
        t.columns.push(crate::model::ColumnDef::new("key", None));
        t.columns.push(crate::model::ColumnDef::new("Weird\"Name", None));
        let text = render_table(&t);
        assert!(text.starts_with("create table \"table\" (\n  \"my col\" text,\n  \"key\",\n  \"Weird\"\"Name\"\n"));
        assert_eq!(reparse(&t), t);
    }

    #[test]
    fn round_trips_a_busy_table() {
        let src = "CREATE TABLE t (id INTEGER PRIMARY KEY AUTOINCREMENT, a varchar(10) NOT NULL DEFAULT 'x' COLLATE nocase, \
                   b int DEFAULT -1 CHECK (b > -5), c REFERENCES u(id), KEY idx (a), UNIQUE (a, b))";
        let t = parse_create_table(&RawStatement::new(src, Origin::line("x", 1))).unwrap();
        assert_eq!(reparse(&t), t);
    }
}
