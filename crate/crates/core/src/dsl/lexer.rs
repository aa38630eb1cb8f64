//! Tokenizer for `.dwk` scripts.

use std::fmt;

use serde::Serialize;

/// Byte range plus 1-based line and column of its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Path(String),
    Arrow,
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(k) => write!(f, "'{k}'"),
            Tok::Path(p) => write!(f, "'{p}'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Error at a byte position, reported by the lexer.
#[derive(Clone, Debug)]
pub struct LexError {
    pub span: SourceSpan,
    pub message: String,
}

const SYMBOLS: &str = ";:=~()[]{},.&";

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let pos = |k: usize| bytes.get(k).map_or(src.len(), |b| b.0);
    while i < bytes.len() {
        let c = bytes[i].1;
        let start = pos(i);
        let (sl, sc) = (line, col);
        let span = |end_idx: usize| SourceSpan { start, end: pos(end_idx), line: sl, column: sc };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let mut j = i + 1;
        let tok = if ident_start(c) {
            while j < bytes.len() && ident_char(bytes[j].1) {
                j += 1;
            }
            Tok::Ident(src[start..pos(j)].to_string())
        } else if c.is_ascii_digit() || (c == '-' && bytes.get(j).is_some_and(|b| b.1.is_ascii_digit())) {
            while j < bytes.len() && bytes[j].1.is_ascii_digit() {
                j += 1;
            }
            let text = &src[start..pos(j)];
            match text.parse::<i64>() {
                Ok(k) => Tok::Int(k),
                Err(_) => return Err(LexError { span: span(j), message: format!("integer out of range: {text}") }),
            }
        } else if c == '-' && bytes.get(j).is_some_and(|b| b.1 == '>') {
            j += 1;
            Tok::Arrow
        } else if c == '/' {
            loop {
                let k0 = j;
                while j < bytes.len() && bytes[j].1.is_ascii_digit() {
                    j += 1;
                }
                if j == k0 {
                    if k0 != i + 1 {
                        return Err(LexError { span: span(j), message: "path segment must be a number".into() });
                    }
                    break;
                }
                if j < bytes.len() && bytes[j].1 == '/' {
                    j += 1;
                } else {
                    break;
                }
            }
            Tok::Path(src[start..pos(j)].to_string())
        } else if SYMBOLS.contains(c) {
            Tok::Sym(c)
        } else {
            return Err(LexError { span: span(j), message: format!("unexpected character '{c}'") });
        };
        col += j - i;
        i = j;
        out.push(Token { tok, span: span(i) });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan { start: src.len(), end: src.len(), line, column: col },
    });
    Ok(out)
}
