//! A permissive parser for the SQLite/MySQL `CREATE TABLE` subset found in
//! application schemas. Dialect noise is kept verbatim instead of rejected;
//! only statements whose structure cannot be recovered fail.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::diag::{Diagnostic, Origin};
use crate::extract::{RawStatement, StatementKind};
use crate::lexer::{join_tokens, tokenize, Tok, Token};
use crate::model::{ColumnDef, ForeignKey, ParseError, SchemaSnapshot, TableDef};

/// Words that end a column's type and start one of its constraints.
const COLUMN_KEYWORDS: &[&str] = &[
    "CONSTRAINT",
    "PRIMARY",
    "NOT",
    "NULL",
    "UNIQUE",
    "CHECK",
    "DEFAULT",
    "COLLATE",
    "REFERENCES",
    "AUTOINCREMENT",
    "AUTO_INCREMENT",
    "GENERATED",
    "AS",
    "ON",
    "COMMENT",
];

/// Column constraints the parser understands; anything else is captured raw.
const KNOWN_COLUMN_CONSTRAINTS: &[&str] = &[
    "CONSTRAINT",
    "PRIMARY",
    "NOT",
    "NULL",
    "UNIQUE",
    "CHECK",
    "DEFAULT",
    "COLLATE",
    "REFERENCES",
    "AUTOINCREMENT",
    "AUTO_INCREMENT",
];

pub(crate) fn is_reserved(word: &str) -> bool {
    COLUMN_KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(word))
        || ["CREATE", "TABLE", "FOREIGN", "KEY", "INDEX", "FULLTEXT", "SPATIAL", "IF", "EXISTS", "TEMP", "TEMPORARY"]
            .iter()
            .any(|k| k.eq_ignore_ascii_case(word))
}

struct Failure {
    line: u32,
    message: String,
}

type PResult<T> = Result<T, Failure>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    last_line: u32,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.pos + n).map(|t| &t.tok)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos)?.tok.clone();
        self.pos += 1;
        Some(t)
    }

    fn at_word(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_word(kw))
    }

    fn at_punct(&self, p: char) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        if self.at_word(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_punct(&mut self, p: char) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        let line = self.toks.get(self.pos).map_or(self.last_line, |t| t.line);
        let found = match self.peek() {
            Some(t) => format!(", found `{}`", t.to_sql()),
            None => String::new(),
        };
        Err(Failure { line, message: format!("{}{found}", message.into()) })
    }

    fn eof<T>(&self) -> PResult<T> {
        self.fail("unexpected end of input")
    }

    fn expect_word(&mut self, kw: &str) -> PResult<()> {
        if self.eat_word(kw) {
            Ok(())
        } else if self.peek().is_none() {
            self.eof()
        } else {
            self.fail(format!("expected `{kw}`"))
        }
    }

    fn expect_punct(&mut self, p: char) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else if self.peek().is_none() {
            self.eof()
        } else {
            self.fail(format!("expected `{p}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        let name = match self.peek() {
            Some(Tok::Word(w)) => w.clone(),
            Some(Tok::Quoted(q)) => q.clone(),
            Some(Tok::Str(s)) if s.starts_with('\'') => s[1..s.len() - 1].replace("''", "'"),
            None => return self.eof(),
            _ => return self.fail(format!("expected {what}")),
        };
        if name.is_empty() {
            return self.fail(format!("empty {what}"));
        }
        self.pos += 1;
        Ok(name)
    }

    /// Table or column reference, dropping any `schema.` qualifier.
    fn qualified_ident(&mut self, what: &str) -> PResult<String> {
        let mut name = self.ident(what)?;
        while self.eat_punct('.') {
            name = self.ident(what)?;
        }
        Ok(name)
    }

    /// Consumes a parenthesized group, returning its tokens including the parentheses.
    fn group(&mut self) -> PResult<Vec<Tok>> {
        let mut out = Vec::new();
        let mut depth = 0usize;
        loop {
            match self.peek() {
                None => return self.eof(),
                Some(Tok::Punct(';')) => return self.fail("unbalanced parentheses"),
                Some(Tok::Punct('(')) => depth += 1,
                Some(Tok::Punct(')')) => depth -= 1,
                _ => {}
            }
            out.push(self.advance().unwrap_or(Tok::Punct(')')));
            if depth == 0 {
                return Ok(out);
            }
        }
    }

    /// Collects tokens up to the next `,` or `)` at nesting depth zero, or
    /// (when `stop_at_constraint`) the next recognized column constraint.
    fn raw_until_boundary(&mut self, stop_at_constraint: bool) -> PResult<Vec<Tok>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None => return self.eof(),
                Some(Tok::Punct(',' | ')')) => break,
                Some(Tok::Punct(';')) => return self.fail("unexpected `;` inside column list"),
                Some(Tok::Punct('(')) => out.extend(self.group()?),
                Some(Tok::Word(w))
                    if stop_at_constraint
                        && !out.is_empty()
                        && KNOWN_COLUMN_CONSTRAINTS.iter().any(|k| k.eq_ignore_ascii_case(w)) =>
                {
                    break
                }
                Some(_) => out.push(self.advance().unwrap_or(Tok::Punct(','))),
            }
        }
        Ok(out)
    }

    fn conflict_clause(&mut self) {
        if self.at_word("ON") && self.peek_at(1).is_some_and(|t| t.is_word("CONFLICT")) {
            self.pos += 2;
            self.advance();
        }
    }

    fn column_list(&mut self) -> PResult<Vec<String>> {
        self.expect_punct('(')?;
        let mut cols = Vec::new();
        loop {
            cols.push(self.ident("column name")?);
            if self.at_punct('(') {
                self.group()?;
            }
            if self.eat_word("COLLATE") {
                self.advance();
            }
            let _ = self.eat_word("ASC") || self.eat_word("DESC");
            if self.eat_punct(',') {
                continue;
            }
            self.expect_punct(')')?;
            return Ok(cols);
        }
    }

    fn references(&mut self, columns: Vec<String>) -> PResult<ForeignKey> {
        let ref_table = self.qualified_ident("referenced table name")?;
        let ref_columns = if self.at_punct('(') { self.column_list()? } else { Vec::new() };
        loop {
            if self.at_word("ON") && self.peek_at(1).is_some_and(|t| t.is_word("DELETE") || t.is_word("UPDATE")) {
                self.pos += 2;
                if self.eat_word("SET") || self.eat_word("NO") {
                    self.advance();
                } else if !(self.eat_word("CASCADE") || self.eat_word("RESTRICT")) {
                    return self.fail("expected a foreign-key action");
                }
            } else if self.eat_word("MATCH") {
                self.advance();
            } else if self.at_word("DEFERRABLE")
                || (self.at_word("NOT") && self.peek_at(1).is_some_and(|t| t.is_word("DEFERRABLE")))
            {
                self.eat_word("NOT");
                self.pos += 1;
                if self.eat_word("INITIALLY") {
                    self.advance();
                }
            } else {
                break;
            }
        }
        Ok(ForeignKey { columns, ref_table, ref_columns })
    }

    fn default_value(&mut self) -> PResult<String> {
        let toks = match self.peek() {
            None => return self.eof(),
            Some(Tok::Punct('(')) => self.group()?,
            Some(Tok::Op(op)) if op == "-" || op == "+" => {
                let sign = self.advance().unwrap_or(Tok::Op(String::from("-")));
                match self.peek() {
                    Some(Tok::Num(_)) => vec![sign, self.advance().unwrap_or(Tok::Num(String::from("0")))],
                    _ => return self.fail("expected a number after sign"),
                }
            }
            Some(Tok::Word(_)) => {
                let mut toks = vec![self.advance().unwrap_or(Tok::Word(String::new()))];
                if self.at_punct('(') {
                    toks.extend(self.group()?);
                }
                toks
            }
            Some(Tok::Str(_) | Tok::Num(_) | Tok::Quoted(_)) => vec![self.advance().unwrap_or(Tok::Num(String::new()))],
            Some(_) => return self.fail("DEFAULT requires a value"),
        };
        Ok(join_tokens(&toks))
    }

    fn is_table_constraint_start(&self) -> bool {
        let next_is = |n: usize, f: &dyn Fn(&Tok) -> bool| self.peek_at(n).is_some_and(f);
        match self.peek() {
            Some(t) if t.is_word("CONSTRAINT") || t.is_word("UNIQUE") => true,
            Some(t) if t.is_word("PRIMARY") || t.is_word("FOREIGN") => next_is(1, &|t| t.is_word("KEY")),
            Some(t) if t.is_word("CHECK") => next_is(1, &|t| t.is_punct('(')),
            Some(t) if t.is_word("FULLTEXT") || t.is_word("SPATIAL") => {
                next_is(1, &|t| matches!(t, Tok::Word(_) | Tok::Quoted(_)) || t.is_punct('('))
            }
            Some(t) if t.is_word("KEY") || t.is_word("INDEX") => {
                // `KEY idx (a, b)` is an index; `key varchar(10)` is a column.
                next_is(1, &|t| t.is_punct('('))
                    || (next_is(1, &|t| matches!(t, Tok::Word(_) | Tok::Quoted(_)))
                        && next_is(2, &|t| t.is_punct('('))
                        && next_is(3, &|t| !matches!(t, Tok::Num(_))))
            }
            _ => false,
        }
    }

    fn table_constraint(&mut self, table: &mut TableDef) -> PResult<()> {
        let start = self.pos;
        if self.eat_word("CONSTRAINT")
            && !self.at_word("PRIMARY")
            && !self.at_word("UNIQUE")
            && !self.at_word("FOREIGN")
            && !self.at_word("CHECK")
        {
            self.ident("constraint name")?;
        }
        if self.at_word("PRIMARY") && self.peek_at(1).is_some_and(|t| t.is_word("KEY")) {
            self.pos += 2;
            self.skip_index_name_and_using();
            let cols = self.column_list()?;
            self.conflict_clause();
            if !table.primary_key.is_empty() {
                return self.fail("table has more than one primary key");
            }
            table.primary_key = cols;
        } else if self.eat_word("UNIQUE") {
            let _ = self.eat_word("KEY") || self.eat_word("INDEX");
            self.skip_index_name_and_using();
            let cols = self.column_list()?;
            self.conflict_clause();
            table.uniques.insert(cols);
        } else if self.at_word("FOREIGN") && self.peek_at(1).is_some_and(|t| t.is_word("KEY")) {
            self.pos += 2;
            self.skip_index_name_and_using();
            let cols = self.column_list()?;
            self.expect_word("REFERENCES")?;
            let fk = self.references(cols)?;
            table.foreign_keys.push(fk);
        } else {
            self.raw_until_boundary(false)?;
            let toks: Vec<Tok> = self.toks[start..self.pos].iter().map(|t| t.tok.clone()).collect();
            table.raw_constraints.push(join_tokens(&toks));
            return Ok(());
        }
        // Trailing index options (MySQL `USING BTREE`, `COMMENT '...'`) are dropped.
        if !self.at_punct(',') && !self.at_punct(')') {
            self.raw_until_boundary(false)?;
        }
        Ok(())
    }

    fn skip_index_name_and_using(&mut self) {
        if matches!(self.peek(), Some(Tok::Word(_) | Tok::Quoted(_))) && !self.at_word("USING") {
            self.pos += 1;
        }
        if self.eat_word("USING") {
            self.advance();
        }
    }

    fn column_def(&mut self, table: &mut TableDef) -> PResult<()> {
        let name = match self.peek() {
            Some(Tok::Word(_) | Tok::Quoted(_) | Tok::Str(_)) => self.ident("column name")?,
            None => return self.eof(),
            _ => return self.fail("expected column name"),
        };
        let mut col = ColumnDef::new(name, None);

        let mut type_toks = Vec::new();
        while let Some(Tok::Word(w)) = self.peek() {
            if COLUMN_KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(w)) {
                break;
            }
            type_toks.push(self.advance().unwrap_or(Tok::Word(String::new())));
            if self.at_punct('(') {
                type_toks.extend(self.group()?);
            }
        }
        if !type_toks.is_empty() {
            col.col_type = Some(join_tokens(&type_toks));
        }

        loop {
            match self.peek() {
                None => return self.eof(),
                Some(Tok::Punct(',' | ')')) => break,
                Some(Tok::Punct(';')) => return self.fail("unexpected `;` inside column list"),
                Some(t) if t.is_word("CONSTRAINT") => {
                    self.pos += 1;
                    self.ident("constraint name")?;
                }
                Some(t) if t.is_word("NOT") && self.peek_at(1).is_some_and(|t| t.is_word("NULL")) => {
                    self.pos += 2;
                    col.not_null = true;
                    self.conflict_clause();
                }
                Some(t) if t.is_word("NULL") => self.pos += 1,
                Some(t) if t.is_word("PRIMARY") => {
                    self.pos += 1;
                    self.expect_word("KEY")?;
                    let _ = self.eat_word("ASC") || self.eat_word("DESC");
                    self.conflict_clause();
                    if col.is_pk_inline {
                        return self.fail("column declared PRIMARY KEY twice");
                    }
                    col.is_pk_inline = true;
                }
                Some(t) if t.is_word("UNIQUE") => {
                    self.pos += 1;
                    self.eat_word("KEY");
                    self.conflict_clause();
                    table.uniques.insert(vec![col.name.clone()]);
                }
                Some(t) if t.is_word("DEFAULT") => {
                    self.pos += 1;
                    col.default_value = Some(self.default_value()?);
                }
                Some(Tok::Word(w)) if w.eq_ignore_ascii_case("AUTOINCREMENT") || w.eq_ignore_ascii_case("AUTO_INCREMENT") => {
                    col.attributes.push(w.clone());
                    self.pos += 1;
                }
                Some(t) if t.is_word("COLLATE") => {
                    let kw = self.advance().unwrap_or(Tok::Word(String::new()));
                    match self.advance() {
                        Some(name) => col.attributes.push(join_tokens(&[kw, name])),
                        None => return self.eof(),
                    }
                }
                Some(t) if t.is_word("CHECK") => {
                    let mut toks = vec![self.advance().unwrap_or(Tok::Word(String::new()))];
                    if !self.at_punct('(') {
                        return self.fail("expected `(` after CHECK");
                    }
                    toks.extend(self.group()?);
                    col.attributes.push(join_tokens(&toks));
                }
                Some(t) if t.is_word("REFERENCES") => {
                    self.pos += 1;
                    let fk = self.references(vec![col.name.clone()])?;
                    table.foreign_keys.push(fk);
                }
                Some(_) => {
                    let toks = self.raw_until_boundary(true)?;
                    col.attributes.push(join_tokens(&toks));
                }
            }
        }
        table.columns.push(col);
        Ok(())
    }

    fn create_table(&mut self) -> PResult<TableDef> {
        self.expect_word("CREATE")?;
        let _ = self.eat_word("TEMP") || self.eat_word("TEMPORARY");
        self.expect_word("TABLE")?;
        if self.eat_word("IF") {
            self.expect_word("NOT")?;
            self.expect_word("EXISTS")?;
        }
        let name = self.qualified_ident("table name")?;
        let mut table = TableDef::new(name);
        if self.at_word("AS") {
            return self.fail("CREATE TABLE ... AS SELECT is not supported");
        }
        if self.at_word("LIKE") {
            return self.fail("CREATE TABLE ... LIKE is not supported");
        }
        self.expect_punct('(')?;
        loop {
            if self.peek().is_none() {
                return self.eof();
            }
            if self.is_table_constraint_start() {
                self.table_constraint(&mut table)?;
            } else {
                self.column_def(&mut table)?;
            }
            if self.eat_punct(',') {
                continue;
            }
            self.expect_punct(')')?;
            break;
        }
        // Table options (`ENGINE=InnoDB`, `WITHOUT ROWID`, ...) are dropped.
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Punct(';') => {
                    self.pos += 1;
                    if self.peek().is_some() {
                        return self.fail("unexpected text after `;`");
                    }
                }
                Tok::Punct('(') => {
                    self.group()?;
                }
                Tok::Punct(')') => return self.fail("unbalanced `)`"),
                _ => self.pos += 1,
            }
        }
        self.finish(table)
    }

    fn finish(&self, mut table: TableDef) -> PResult<TableDef> {
        if table.columns.is_empty() {
            return Err(Failure { line: self.last_line, message: String::from("table declares no columns") });
        }
        let inline: Vec<String> = table.columns.iter().filter(|c| c.is_pk_inline).map(|c| c.name.clone()).collect();
        if !inline.is_empty() {
            if inline.len() > 1 || !table.primary_key.is_empty() {
                return Err(Failure { line: self.last_line, message: String::from("table has more than one primary key") });
            }
            table.primary_key = inline;
        }
        let mut unknown = None;
        let mut resolve = |name: &mut String, cols: &[ColumnDef]| match cols.iter().find(|c| c.name.to_lowercase() == name.to_lowercase()) {
            Some(c) => *name = c.name.clone(),
            None => {
                unknown.get_or_insert_with(|| name.clone());
            }
        };
        let cols = table.columns.clone();
        table.primary_key.iter_mut().for_each(|n| resolve(n, &cols));
        table.uniques = core::mem::take(&mut table.uniques)
            .into_iter()
            .map(|mut u| {
                u.iter_mut().for_each(|n| resolve(n, &cols));
                u
            })
            .collect();
        for fk in &mut table.foreign_keys {
            fk.columns.iter_mut().for_each(|n| resolve(n, &cols));
        }
        if let Some(name) = unknown {
            return Err(Failure { line: self.last_line, message: format!("constraint names unknown column `{name}`") });
        }
        table.validate().map_err(|message| Failure { line: self.last_line, message })?;
        Ok(table)
    }
}

/// Parses one `CREATE TABLE` statement.
pub fn parse_create_table(stmt: &RawStatement) -> Result<TableDef, ParseError> {
    let error_at = |line: u32, message: String| {
        let abs = (stmt.origin.first_line + line.saturating_sub(1)).min(stmt.origin.last_line);
        ParseError { origin: Origin::line(&stmt.origin.path, abs), message, statement_text: stmt.text.clone() }
    };
    let toks = tokenize(&stmt.text).map_err(|e| error_at(e.line, e.message))?;
    let last_line = toks.last().map_or(1, |t| t.line);
    let mut parser = Parser { toks, pos: 0, last_line };
    parser.create_table().map_err(|f| error_at(f.line, f.message))
}

/// Parses every `CREATE TABLE` statement of one revision independently.
///
/// Statements of other kinds are ignored. A failing statement becomes a
/// [`ParseError`] and never affects the others. When a table name repeats
/// (case-insensitively) the last definition wins and a warning is recorded.
pub fn parse_schema(stmts: &[RawStatement], revision: &str) -> SchemaSnapshot {
    let mut snapshot = SchemaSnapshot::new(revision);
    for stmt in stmts.iter().filter(|s| s.kind == StatementKind::CreateTable) {
        match parse_create_table(stmt) {
            Ok(table) => {
                let folded = table.name.to_lowercase();
                let previous = snapshot.tables.keys().find(|k| k.to_lowercase() == folded).cloned();
                if let Some(prev) = previous {
                    snapshot.tables.remove(&prev);
                    snapshot.diagnostics.push(Diagnostic::warning(
                        Some(stmt.origin.clone()),
                        format!("table `{}` declared again; the later declaration replaces the earlier one", table.name),
                    ));
                }
                snapshot.tables.insert(table.name.clone(), table);
            }
            Err(e) => snapshot.errors.push(e),
        }
    }
    snapshot
}
