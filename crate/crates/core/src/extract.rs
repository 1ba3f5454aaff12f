//! Locating `CREATE TABLE` statements in `.sql` files and in string literals
//! embedded in C, C++ and Objective-C sources.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::diag::{Diagnostic, Origin};

/// Identifier substituted for `printf`-style placeholders found in embedded DDL.
pub const PARAM_SENTINEL: &str = "__param__";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Sql,
    CLike,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub path: String,
    pub kind: SourceKind,
    pub content: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, kind: SourceKind, content: impl Into<String>) -> Self {
        Self { path: path.into(), kind, content: content.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementKind {
    CreateTable,
    Other,
}

/// One SQL statement recovered from a source file, already decoded and
/// comment-stripped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawStatement {
    pub text: String,
    pub origin: Origin,
    pub kind: StatementKind,
}

impl RawStatement {
    /// Builds a statement and classifies it from its text.
    pub fn new(text: impl Into<String>, origin: Origin) -> Self {
        let text = text.into();
        let kind = classify(&text);
        Self { text, origin, kind }
    }
}

/// A maximal run of adjacent string literals, decoded and concatenated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplicedLiteral {
    pub text: String,
    pub first_line: u32,
    pub last_line: u32,
}

/// A problem found while lexing, located by line only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub line: u32,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Spliced {
    pub literals: Vec<SplicedLiteral>,
    pub issues: Vec<Issue>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stripped {
    pub text: String,
    pub issues: Vec<Issue>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub statements: Vec<RawStatement>,
    pub diagnostics: Vec<Diagnostic>,
}

struct Cursor<'a> {
    chars: &'a [char],
    pos: usize,
    line: u32,
}

impl<'a> Cursor<'a> {
    fn new(chars: &'a [char]) -> Self {
        Self { chars, pos: 0, line: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    fn at_line_start(&self) -> bool {
        self.chars[..self.pos].iter().rev().take_while(|c| **c != '\n').all(|c| c.is_whitespace())
    }

    fn skip_to_eol(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }
}

/// Finds every run of adjacent C string literals in `code` and returns each
/// run as one decoded string.
///
/// Literals separated only by whitespace or comments belong to the same run.
/// `@"..."` (Objective-C), `L`/`u`/`U`/`u8` prefixes and `R"d(...)d"` raw
/// strings are recognized. An unterminated literal discards the run it
/// belongs to and is reported as an issue.
pub fn splice_string_literals(code: &str) -> Spliced {
    let chars: Vec<char> = code.chars().collect();
    let mut cur = Cursor::new(&chars);
    let mut out = Spliced::default();
    let mut run: Option<SplicedLiteral> = None;

    fn flush(run: &mut Option<SplicedLiteral>, out: &mut Spliced) {
        if let Some(r) = run.take() {
            out.literals.push(r);
        }
    }

    while let Some(c) = cur.peek() {
        match c {
            '/' if cur.peek_at(1) == Some('/') => cur.skip_to_eol(),
            '/' if cur.peek_at(1) == Some('*') => {
                cur.bump();
                cur.bump();
                loop {
                    match cur.bump() {
                        Some('*') if cur.peek() == Some('/') => {
                            cur.bump();
                            break;
                        }
                        Some(_) => {}
                        None => break,
                    }
                }
            }
            '#' if cur.at_line_start() && is_include_directive(&chars[cur.pos..]) => {
                flush(&mut run, &mut out);
                cur.skip_to_eol();
            }
            c if c.is_whitespace() => {
                cur.bump();
            }
            '"' => read_literal(&mut cur, &mut run, &mut out, false),
            '@' if cur.peek_at(1) == Some('"') => {
                cur.bump();
                read_literal(&mut cur, &mut run, &mut out, false);
            }
            '\'' => {
                flush(&mut run, &mut out);
                skip_char_literal(&mut cur);
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = cur.pos;
                while cur.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    cur.bump();
                }
                let ident: String = chars[start..cur.pos].iter().collect();
                if cur.peek() == Some('"') {
                    match ident.as_str() {
                        "L" | "u" | "U" | "u8" => {
                            read_literal(&mut cur, &mut run, &mut out, false);
                            continue;
                        }
                        "R" | "LR" | "uR" | "UR" | "u8R" => {
                            read_literal(&mut cur, &mut run, &mut out, true);
                            continue;
                        }
                        _ => {}
                    }
                }
                flush(&mut run, &mut out);
            }
            _ => {
                flush(&mut run, &mut out);
                cur.bump();
            }
        }
    }
    flush(&mut run, &mut out);
    out
}

fn is_include_directive(rest: &[char]) -> bool {
    let directive: String = rest[1..]
        .iter()
        .skip_while(|c| **c == ' ' || **c == '\t')
        .take_while(|c| c.is_ascii_alphabetic())
        .collect();
    directive == "include" || directive == "import"
}

fn skip_char_literal(cur: &mut Cursor<'_>) {
    cur.bump();
    while let Some(c) = cur.peek() {
        match c {
            '\\' => {
                cur.bump();
                if cur.peek() != Some('\n') {
                    cur.bump();
                }
            }
            '\'' => {
                cur.bump();
                return;
            }
            '\n' => return,
            _ => {
                cur.bump();
            }
        }
    }
}

/// Reads one literal starting at the opening quote and appends it to `run`.
fn read_literal(cur: &mut Cursor<'_>, run: &mut Option<SplicedLiteral>, out: &mut Spliced, raw: bool) {
    let start_line = cur.line;
    cur.bump();
    let decoded = if raw { read_raw_body(cur) } else { read_escaped_body(cur) };
    match decoded {
        Some(text) => {
            let end_line = cur.line;
            match run {
                Some(r) => {
                    r.text.push_str(&text);
                    r.last_line = end_line;
                }
                None => {
                    *run = Some(SplicedLiteral { text, first_line: start_line, last_line: end_line });
                }
            }
        }
        None => {
            *run = None;
            out.issues.push(Issue {
                line: start_line,
                message: String::from("unterminated string literal"),
            });
        }
    }
}

fn read_escaped_body(cur: &mut Cursor<'_>) -> Option<String> {
    let mut text = String::new();
    loop {
        match cur.peek()? {
            '"' => {
                cur.bump();
                return Some(text);
            }
            '\n' => return None,
            '\\' => {
                cur.bump();
                let esc = cur.bump()?;
                match esc {
                    'n' => text.push('\n'),
                    't' => text.push('\t'),
                    'r' => text.push('\r'),
                    'a' => text.push('\u{7}'),
                    'b' => text.push('\u{8}'),
                    'f' => text.push('\u{c}'),
                    'v' => text.push('\u{b}'),
                    '\n' => {}
                    '0'..='7' => {
                        let mut value = esc.to_digit(8).unwrap_or(0);
                        for _ in 0..2 {
                            match cur.peek().and_then(|c| c.to_digit(8)) {
                                Some(d) => {
                                    value = value * 8 + d;
                                    cur.bump();
                                }
                                None => break,
                            }
                        }
                        text.push(char::from_u32(value).unwrap_or('\u{fffd}'));
                    }
                    'x' => {
                        let mut value: u32 = 0;
                        while let Some(d) = cur.peek().and_then(|c| c.to_digit(16)) {
                            value = value.saturating_mul(16).saturating_add(d);
                            cur.bump();
                        }
                        text.push(char::from_u32(value).unwrap_or('\u{fffd}'));
                    }
                    // \" \\ \' \? and anything unknown stand for themselves.
                    other => text.push(other),
                }
            }
            _ => {
                text.push(cur.bump()?);
            }
        }
    }
}

fn read_raw_body(cur: &mut Cursor<'_>) -> Option<String> {
    let mut delim = String::new();
    loop {
        match cur.bump()? {
            '(' => break,
            '\n' | ')' | '\\' | ' ' => return None,
            c => delim.push(c),
        }
    }
    let mut text = String::new();
    loop {
        let c = cur.bump()?;
        if c == ')' {
            let close: Vec<char> = delim.chars().chain(core::iter::once('"')).collect();
            if cur.chars[cur.pos..].starts_with(&close) {
                for _ in 0..close.len() {
                    cur.bump();
                }
                return Some(text);
            }
        }
        text.push(c);
    }
}

/// Removes `-- ...` line comments and `/* ... */` block comments outside of
/// quoted strings and identifiers.
///
/// Newlines are kept so line numbers stay valid, whitespace left dangling in
/// front of a removed comment is trimmed, and a removed block comment that
/// separated two tokens leaves a single space behind. An unterminated block
/// comment runs to the end of the input and is reported.
pub fn strip_sql_comments(sql: &str) -> Stripped {
    let chars: Vec<char> = sql.chars().collect();
    let mut cur = Cursor::new(&chars);
    let mut text = String::with_capacity(sql.len());
    let mut issues = Vec::new();
    // Bytes of `text` that trimming must never touch (closed quotes).
    let mut protected = 0usize;

    fn trim_dangling(text: &mut String, protected: usize) {
        while text.len() > protected && text.ends_with([' ', '\t']) {
            text.pop();
        }
    }

    while let Some(c) = cur.peek() {
        match c {
            '-' if cur.peek_at(1) == Some('-') => {
                trim_dangling(&mut text, protected);
                cur.skip_to_eol();
            }
            '/' if cur.peek_at(1) == Some('*') => {
                let line = cur.line;
                trim_dangling(&mut text, protected);
                cur.bump();
                cur.bump();
                let mut newlines = 0;
                let mut closed = false;
                while let Some(c) = cur.bump() {
                    if c == '\n' {
                        newlines += 1;
                    } else if c == '*' && cur.peek() == Some('/') {
                        cur.bump();
                        closed = true;
                        break;
                    }
                }
                if !closed {
                    issues.push(Issue { line, message: String::from("unterminated block comment") });
                }
                for _ in 0..newlines {
                    text.push('\n');
                }
                let needs_gap = newlines == 0
                    && cur.peek().is_some_and(|c| !c.is_whitespace())
                    && text.chars().next_back().is_some_and(|c| !c.is_whitespace());
                if needs_gap {
                    text.push(' ');
                }
            }
            '\'' | '"' | '`' => {
                cur.bump();
                text.push(c);
                while let Some(q) = cur.bump() {
                    text.push(q);
                    if q == c {
                        // A doubled quote is an escaped quote and keeps us inside.
                        if cur.peek() == Some(c) {
                            text.push(c);
                            cur.bump();
                        } else {
                            break;
                        }
                    }
                }
                protected = text.len();
            }
            _ => {
                text.push(c);
                cur.bump();
            }
        }
    }
    Stripped { text, issues }
}

/// Splits comment-free SQL at semicolons that are not inside quotes. Returns
/// each nonblank piece with its byte offset in `sql`.
fn split_statements(sql: &str) -> Vec<(usize, &str)> {
    let mut pieces = Vec::new();
    let mut start = 0;
    let mut quote: Option<char> = None;
    for (i, c) in sql.char_indices() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None => match c {
                '\'' | '"' | '`' => quote = Some(c),
                ';' => {
                    pieces.push((start, &sql[start..i]));
                    start = i + 1;
                }
                _ => {}
            },
        }
    }
    pieces.push((start, &sql[start..]));
    pieces.retain(|(_, s)| !s.trim().is_empty());
    pieces
}

fn classify(text: &str) -> StatementKind {
    let mut words = text.split_whitespace();
    let first = words.next().unwrap_or("");
    let second = words.next().unwrap_or("");
    let table = second.split('(').next().unwrap_or("");
    if first.eq_ignore_ascii_case("create") && table.eq_ignore_ascii_case("table") {
        StatementKind::CreateTable
    } else {
        StatementKind::Other
    }
}

/// Replaces `printf`-style placeholders with [`PARAM_SENTINEL`]. `%%` is left alone.
fn replace_placeholders(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(idx) = rest.find('%') {
        out.push_str(&rest[..idx]);
        let tail = &rest[idx + 1..];
        if let Some(after) = tail.strip_prefix('%') {
            out.push_str("%%");
            rest = after;
            continue;
        }
        let length_mods = tail.chars().take_while(|c| *c == 'l').count().min(2);
        let conv = tail[length_mods..].chars().next();
        match conv {
            Some('s' | 'd' | 'q' | 'Q' | 'i' | 'u' | 'w') => {
                out.push_str(PARAM_SENTINEL);
                rest = &tail[length_mods + 1..];
            }
            _ => {
                out.push('%');
                rest = tail;
            }
        }
    }
    out.push_str(rest);
    out
}

fn line_of(text: &str, byte: usize) -> u32 {
    1 + text[..byte].matches('\n').count() as u32
}

/// Extracts statements from one source file.
///
/// `.sql` content is comment-stripped and split at top-level semicolons;
/// every nonblank statement is returned and classified. C-like content is
/// scanned for string literal runs; each run is comment-stripped, has its
/// placeholders replaced, and contributes only its `CREATE TABLE`
/// statements.
pub fn extract_ddl(file: &SourceFile) -> Extraction {
    let mut out = Extraction::default();
    let to_diag = |path: &str, issue: Issue| Diagnostic::error(Some(Origin::line(path, issue.line)), issue.message);
    match file.kind {
        SourceKind::Sql => {
            let stripped = strip_sql_comments(&file.content);
            out.diagnostics.extend(stripped.issues.into_iter().map(|i| to_diag(&file.path, i)));
            for (offset, piece) in split_statements(&stripped.text) {
                let lead = piece.len() - piece.trim_start().len();
                let body = piece.trim();
                let first = line_of(&stripped.text, offset + lead);
                let last = line_of(&stripped.text, offset + lead + body.len());
                out.statements.push(RawStatement::new(body, Origin::new(&file.path, first, last)));
            }
        }
        SourceKind::CLike => {
            let spliced = splice_string_literals(&file.content);
            out.diagnostics.extend(spliced.issues.into_iter().map(|i| to_diag(&file.path, i)));
            for lit in spliced.literals {
                let stripped = strip_sql_comments(&lit.text);
                let origin = Origin::new(&file.path, lit.first_line, lit.last_line);
                for issue in stripped.issues {
                    out.diagnostics.push(Diagnostic::error(Some(origin.clone()), issue.message));
                }
                let text = replace_placeholders(&stripped.text);
                for (_, piece) in split_statements(&text) {
                    let stmt = RawStatement::new(piece.trim(), origin.clone());
                    if stmt.kind == StatementKind::CreateTable {
                        out.statements.push(stmt);
                    }
                }
            }
        }
    }
    out
}
