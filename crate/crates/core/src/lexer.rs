//! SQL tokenizer shared by the parser, the normalizer and the renderer.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Bare identifier or keyword.
    Word(String),
    /// Delimited identifier (`"x"`, `` `x` `` or `[x]`), unquoted.
    Quoted(String),
    /// String or blob literal, kept with its quotes exactly as written.
    Str(String),
    Num(String),
    /// `(`, `)`, `,`, `;` and `.`
    Punct(char),
    /// Any other operator symbol.
    Op(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    /// 1-based line within the tokenized text.
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub message: String,
}

impl Tok {
    pub fn is_word(&self, kw: &str) -> bool {
        matches!(self, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    pub fn is_punct(&self, p: char) -> bool {
        matches!(self, Tok::Punct(c) if *c == p)
    }

    /// The token as it would be written back into SQL text.
    pub fn to_sql(&self) -> String {
        match self {
            Tok::Word(w) | Tok::Num(w) | Tok::Str(w) | Tok::Op(w) => w.clone(),
            Tok::Quoted(q) => quote_ident(q),
            Tok::Punct(c) => c.to_string(),
        }
    }
}

pub fn quote_ident(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 2);
    out.push('"');
    for c in name.chars() {
        if c == '"' {
            out.push('"');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn is_word_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1u32;

    while i < chars.len() {
        let c = chars[i];
        let start_line = line;
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        // Blob literals x'..' lex as one string token.
        if (c == 'x' || c == 'X') && chars.get(i + 1) == Some(&'\'') {
            let (end, lines) = scan_quoted(&chars, i + 1, '\'', start_line)?;
            tokens.push(Token { tok: Tok::Str(chars[i..end].iter().collect()), line: start_line });
            line = lines;
            i = end;
            continue;
        }
        let tok = match c {
            '\'' => {
                let (end, lines) = scan_quoted(&chars, i, '\'', start_line)?;
                let raw: String = chars[i..end].iter().collect();
                line = lines;
                i = end;
                Tok::Str(raw)
            }
            '"' | '`' => {
                let (end, lines) = scan_quoted(&chars, i, c, start_line)?;
                let inner: String = chars[i + 1..end - 1].iter().collect();
                let mut doubled = String::new();
                doubled.push(c);
                doubled.push(c);
                let single = c.to_string();
                line = lines;
                i = end;
                Tok::Quoted(inner.replace(&doubled, &single))
            }
            '[' => {
                let close = chars[i + 1..].iter().position(|c| *c == ']').ok_or(LexError {
                    line: start_line,
                    message: String::from("unterminated [identifier]"),
                })?;
                let inner: String = chars[i + 1..i + 1 + close].iter().collect();
                line += inner.matches('\n').count() as u32;
                i += close + 2;
                Tok::Quoted(inner)
            }
            '(' | ')' | ',' | ';' => {
                i += 1;
                Tok::Punct(c)
            }
            '.' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                i += 1;
                Tok::Punct('.')
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                if c == '0' && matches!(chars.get(i + 1), Some('x' | 'X')) {
                    i += 2;
                    while chars.get(i).is_some_and(|d| d.is_ascii_hexdigit()) {
                        i += 1;
                    }
                } else {
                    while chars.get(i).is_some_and(|d| d.is_ascii_digit() || *d == '.') {
                        i += 1;
                    }
                    if matches!(chars.get(i), Some('e' | 'E')) {
                        let mut j = i + 1;
                        if matches!(chars.get(j), Some('+' | '-')) {
                            j += 1;
                        }
                        if chars.get(j).is_some_and(|d| d.is_ascii_digit()) {
                            i = j;
                            while chars.get(i).is_some_and(|d| d.is_ascii_digit()) {
                                i += 1;
                            }
                        }
                    }
                }
                Tok::Num(chars[start..i].iter().collect())
            }
            c if is_word_start(c) => {
                let start = i;
                while chars.get(i).is_some_and(|c| is_word_char(*c)) {
                    i += 1;
                }
                Tok::Word(chars[start..i].iter().collect())
            }
            _ => {
                let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                let op = match two.as_str() {
                    "<=" | ">=" | "<>" | "!=" | "==" | "||" | "<<" | ">>" => two,
                    _ => c.to_string(),
                };
                i += op.chars().count();
                Tok::Op(op)
            }
        };
        tokens.push(Token { tok, line: start_line });
    }
    Ok(tokens)
}

/// Scans a quoted run starting at `open`, where a doubled quote is an escaped
/// quote. Returns the index one past the closing quote and the line reached.
fn scan_quoted(chars: &[char], open: usize, quote: char, mut line: u32) -> Result<(usize, u32), LexError> {
    let start_line = line;
    let mut i = open + 1;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
        }
        if c == quote {
            if chars.get(i + 1) == Some(&quote) {
                i += 2;
                continue;
            }
            return Ok((i + 1, line));
        }
        i += 1;
    }
    Err(LexError { line: start_line, message: alloc::format!("unterminated {quote}-quoted token") })
}

/// Joins tokens back into canonical SQL text: single spaces between tokens,
/// none inside parentheses, before commas, between a word and its argument
/// list, or after a unary sign.
pub fn join_tokens(tokens: &[Tok]) -> String {
    let mut out = String::new();
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 && needs_space(&tokens[i - 1], tok, i.checked_sub(2).map(|j| &tokens[j])) {
            out.push(' ');
        }
        out.push_str(&tok.to_sql());
    }
    out
}

fn needs_space(prev: &Tok, cur: &Tok, before_prev: Option<&Tok>) -> bool {
    if prev.is_punct('(') || prev.is_punct('.') {
        return false;
    }
    if cur.is_punct(')') || cur.is_punct(',') || cur.is_punct('.') || cur.is_punct(';') {
        return false;
    }
    if cur.is_punct('(') {
        return !matches!(prev, Tok::Word(_) | Tok::Quoted(_));
    }
    if let Tok::Op(op) = prev {
        let unary = match before_prev {
            None => true,
            Some(t) => t.is_punct('(') || t.is_punct(',') || matches!(t, Tok::Op(_)),
        };
        if unary && (op == "-" || op == "+") && !matches!(cur, Tok::Op(_)) {
            return false;
        }
    }
    true
}
