//! A small, forgiving lexer for Python cell source.
//!
//! It only recognizes what the rewrite rules need: string literals (with
//! prefixes and triple quotes), comments, and bracket nesting. Anything that
//! would be a syntax error in Python is still scanned to the end; an
//! unterminated single-quoted string stops at the end of its line and an
//! unterminated triple-quoted one at the end of the text.

use std::ops::Range;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrLit {
    /// Byte span of the full literal, prefix and quotes included.
    pub span: Range<usize>,
    /// Lower-cased prefix letters (`r`, `f`, `rb`, ...).
    pub prefix: String,
    pub triple: bool,
    /// Byte span of the text between the quotes.
    pub body: Range<usize>,
}

impl StrLit {
    pub fn is_raw(&self) -> bool {
        self.prefix.contains('r')
    }

    pub fn is_fstring(&self) -> bool {
        self.prefix.contains('f')
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lexeme {
    Str(StrLit),
    /// From `#` up to (not including) the line break.
    Comment(Range<usize>),
}

impl Lexeme {
    pub fn span(&self) -> Range<usize> {
        match self {
            Lexeme::Str(s) => s.span.clone(),
            Lexeme::Comment(r) => r.clone(),
        }
    }
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

const PREFIXES: [&str; 8] = ["r", "u", "b", "f", "br", "rb", "fr", "rf"];

/// Scans `text` for string literals and comments, in order.
pub fn lex(text: &str) -> Vec<Lexeme> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'#' => {
                let end = text[i..].find('\n').map_or(text.len(), |p| i + p);
                out.push(Lexeme::Comment(i..end));
                i = end;
            }
            b'\'' | b'"' => {
                let lit = scan_string(text, i, i);
                i = lit.span.end;
                out.push(Lexeme::Str(lit));
            }
            _ if b.is_ascii() && !(b.is_ascii_alphabetic() || b == b'_') => i += 1,
            _ => {
                // identifier (or a string prefix)
                let start = i;
                let rest = &text[i..];
                let len: usize = rest
                    .char_indices()
                    .take_while(|&(_, c)| is_ident_char(c))
                    .last()
                    .map_or_else(
                        || rest.chars().next().map_or(1, char::len_utf8),
                        |(p, c)| p + c.len_utf8(),
                    );
                let word = &text[start..start + len];
                let next = bytes.get(start + len).copied();
                if matches!(next, Some(b'\'' | b'"'))
                    && PREFIXES.contains(&word.to_ascii_lowercase().as_str())
                {
                    let lit = scan_string(text, start, start + len);
                    i = lit.span.end;
                    out.push(Lexeme::Str(lit));
                } else {
                    i = start + len;
                }
            }
        }
    }
    out
}

fn scan_string(text: &str, start: usize, quote_at: usize) -> StrLit {
    let bytes = text.as_bytes();
    let prefix = text[start..quote_at].to_ascii_lowercase();
    let q = bytes[quote_at];
    let triple = bytes.get(quote_at + 1) == Some(&q) && bytes.get(quote_at + 2) == Some(&q);
    let body_start = quote_at + if triple { 3 } else { 1 };
    let lit = |body_end: usize, end: usize| StrLit {
        span: start..end,
        prefix: prefix.clone(),
        triple,
        body: body_start..body_end,
    };
    let mut j = body_start;
    while j < bytes.len() {
        match bytes[j] {
            // Even in raw strings a backslash keeps the next quote from closing.
            b'\\' => j += 2,
            b'\n' if !triple => return lit(j, j),
            c if c == q && !triple => return lit(j, j + 1),
            c if c == q && bytes.get(j + 1) == Some(&q) && bytes.get(j + 2) == Some(&q) => {
                return lit(j, j + 3)
            }
            _ => j += 1,
        }
    }
    lit(bytes.len(), bytes.len())
}

/// Masks every lexeme with spaces (keeping newlines), leaving only code.
/// Byte offsets are preserved.
pub fn code_only(text: &str, lexemes: &[Lexeme]) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    for lx in lexemes {
        let span = lx.span();
        out.push_str(&text[pos..span.start]);
        for c in text[span.clone()].chars() {
            if c == '\n' {
                out.push('\n');
            } else {
                out.extend(std::iter::repeat(' ').take(c.len_utf8()));
            }
        }
        pos = span.end;
    }
    out.push_str(&text[pos..]);
    out
}

/// Replaces byte ranges (sorted, non-overlapping) with new text.
pub fn splice(text: &str, edits: &[(Range<usize>, String)]) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    for (range, replacement) in edits {
        out.push_str(&text[pos..range.start]);
        out.push_str(replacement);
        pos = range.end;
    }
    out.push_str(&text[pos..]);
    out
}

/// Expressions inside the `{...}` placeholders of an f-string body. Format
/// specs, conversions, and the `=` debug marker are dropped.
pub fn fstring_expressions(body: &str) -> Vec<String> {
    let chars: Vec<char> = body.chars().collect();
    let mut exprs = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '{' if chars.get(i + 1) == Some(&'{') => i += 2,
            '{' => {
                let mut depth = 0usize;
                let mut j = i + 1;
                let mut expr = String::new();
                let mut quote: Option<char> = None;
                let mut in_expr = true;
                while j < chars.len() {
                    let c = chars[j];
                    if let Some(q) = quote {
                        if in_expr {
                            expr.push(c);
                        }
                        if c == q {
                            quote = None;
                        }
                        j += 1;
                        continue;
                    }
                    match c {
                        '\'' | '"' => {
                            quote = Some(c);
                            if in_expr {
                                expr.push(c);
                            }
                        }
                        '(' | '[' | '{' => {
                            depth += 1;
                            if in_expr {
                                expr.push(c);
                            }
                        }
                        ')' | ']' => {
                            depth = depth.saturating_sub(1);
                            if in_expr {
                                expr.push(c);
                            }
                        }
                        '}' if depth == 0 => break,
                        '}' => {
                            depth -= 1;
                            if in_expr {
                                expr.push(c);
                            }
                        }
                        '!' if depth == 0 && chars.get(j + 1) != Some(&'=') => in_expr = false,
                        ':' if depth == 0 => in_expr = false,
                        '=' if depth == 0
                            && !matches!(chars.get(j + 1), Some('='))
                            && !matches!(expr.chars().last(), Some('=' | '!' | '<' | '>')) =>
                        {
                            in_expr = false
                        }
                        _ => {
                            if in_expr {
                                expr.push(c);
                            }
                        }
                    }
                    j += 1;
                }
                let expr = expr.trim();
                if !expr.is_empty() {
                    exprs.push(expr.to_string());
                }
                i = j + 1;
            }
            _ => i += 1,
        }
    }
    exprs
}

/// Net bracket depth at each line start of `code` (code_only text).
pub fn depth_at_line_starts(code: &str) -> Vec<i64> {
    let mut depths = vec![0];
    let mut depth = 0i64;
    for c in code.chars() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            '\n' => depths.push(depth.max(0)),
            _ => {}
        }
    }
    depths
}
