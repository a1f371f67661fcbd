//! Rewrites a code cell into the reduced text the classifiers consume.
//!
//! The rewrites run in a fixed order:
//!
//! 1. magic commands and import statements become `SETUP`
//! 2. comments are deleted
//! 3. string arguments of `print` calls are cleared
//! 4. path-like string literals become `PATH`
//! 5. a trailing bare value access (the cell's implicit return) becomes
//!    `VALIDATION`
//! 6. blank lines and trailing whitespace are removed
//!
//! Every step is a string-aware text rewrite; nothing here requires the
//! source to be valid Python.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::notebook::{Cell, OutputType};
use crate::pysrc::{self, Lexeme, StrLit};

pub const SETUP_TOKEN: &str = "SETUP";
pub const PATH_TOKEN: &str = "PATH";
pub const VALIDATION_TOKEN: &str = "VALIDATION";

const PATH_EXTENSIONS: [&str; 10] = [
    ".csv", ".json", ".txt", ".parquet", ".xlsx", ".zip", ".h5", ".pkl", ".png", ".jpg",
];

const PY_KEYWORDS: [&str; 35] = [
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def",
    "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is",
    "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
];

static IMPORT_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:import\s+[\w.]|from\s+[\w.]+\s+import\b)").unwrap());

static PY2_PRINT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\s*)print[ \t]+([^\s(=.,;:)\]]|$)").unwrap());

static KEYWORD_ARG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*([A-Za-z_]\w*)\s*=[^=]").unwrap());

static SETUP_WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\bSETUP\b").unwrap());
static VALIDATION_WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\bVALIDATION\b").unwrap());

static CONSTANT_DECL: LazyLock<Regex> = LazyLock::new(|| {
    let lit = r#"(?:[-+]?(?:\d[\d_]*(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+)|PATH|True|False|None|[rRbBuUfF]{0,2}(?:'[^'\n]*'|"[^"\n]*"))"#;
    let seq = format!(r"(?:{lit}\s*,\s*)*{lit}\s*,?");
    Regex::new(&format!(
        r"^[A-Z_][A-Z0-9_]*\s*=\s*(?:{lit}|\(\s*(?:{seq})?\s*\)|\[\s*(?:{seq})?\s*\]|{seq})\s*;?\s*$"
    ))
    .unwrap()
});

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CellFlags {
    pub has_setup_token: bool,
    pub has_validation_token: bool,
    pub has_print_call: bool,
    pub has_magic: bool,
    pub has_constant_decl: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessedCell {
    pub stable_index: usize,
    pub original_source: String,
    pub processed_source: String,
    pub output_types: BTreeSet<OutputType>,
    /// Text of `stream` and `execute_result` outputs, concatenated.
    pub output_text: String,
    pub flags: CellFlags,
}

pub fn preprocess_cell(cell: &Cell) -> PreprocessedCell {
    debug_assert!(cell.is_code(), "only code cells are preprocessed");
    let output_types = cell.outputs.iter().map(|o| o.output_type.clone()).collect();
    let output_text = cell
        .outputs
        .iter()
        .filter(|o| matches!(o.output_type, OutputType::Stream | OutputType::ExecuteResult))
        .map(|o| o.text_payload.as_str())
        .collect();
    preprocess_parts(cell.stable_index, &cell.source, output_types, output_text)
}

/// Same as [`preprocess_cell`] for a cell given as loose parts (labeled
/// dataset records carry no notebook structure).
pub fn preprocess_parts(
    stable_index: usize,
    source: &str,
    output_types: BTreeSet<OutputType>,
    output_text: String,
) -> PreprocessedCell {
    let (processed_source, has_magic) = rewrite_source(source);
    let flags = CellFlags {
        has_setup_token: SETUP_WORD.is_match(&processed_source),
        has_validation_token: VALIDATION_WORD.is_match(&processed_source),
        has_print_call: has_print_call(&processed_source),
        has_magic,
        has_constant_decl: has_constant_decl(&processed_source),
    };
    PreprocessedCell {
        stable_index,
        original_source: source.to_string(),
        processed_source,
        output_types,
        output_text,
        flags,
    }
}

/// Applies all six rewrites. Returns the processed text and whether any
/// magic command was masked.
pub fn rewrite_source(source: &str) -> (String, bool) {
    let text = source.replace("\r\n", "\n").replace('\r', "\n");
    let (text, has_magic) = mask_setup(&text);
    let text = delete_comments(&text);
    let text = clear_prints(&text);
    let text = mask_paths(&text);
    let text = mask_implicit_return(&text);
    (collapse_lines(&text), has_magic)
}

/// True iff `last_line` is a bare value access: an identifier followed by
/// attribute accesses and/or subscripts, without calls or assignment.
pub fn detect_implicit_return(last_line: &str) -> bool {
    let s = last_line.trim();
    let mut chars = s.char_indices().peekable();
    let Some(ident) = take_ident(s, &mut chars) else {
        return false;
    };
    if PY_KEYWORDS.contains(&ident) || [SETUP_TOKEN, PATH_TOKEN, VALIDATION_TOKEN].contains(&ident) {
        return false;
    }
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            '.' => {
                chars.next();
                match take_ident(s, &mut chars) {
                    Some(attr) if !PY_KEYWORDS.contains(&attr) => {}
                    _ => return false,
                }
            }
            '[' => {
                let Some(close) = matching_bracket(&s[pos..]) else {
                    return false;
                };
                let inner = &s[pos + 1..pos + close];
                let code = pysrc::code_only(inner, &pysrc::lex(inner));
                if code.contains('(') || code.contains(":=") {
                    return false;
                }
                while chars.peek().is_some_and(|&(p, _)| p <= pos + close) {
                    chars.next();
                }
            }
            _ => return false,
        }
    }
    true
}

fn take_ident<'a>(s: &'a str, chars: &mut std::iter::Peekable<std::str::CharIndices<'a>>) -> Option<&'a str> {
    let &(start, first) = chars.peek()?;
    if !pysrc::is_ident_start(first) {
        return None;
    }
    let mut end = start;
    while let Some(&(p, c)) = chars.peek() {
        if !pysrc::is_ident_char(c) {
            break;
        }
        end = p + c.len_utf8();
        chars.next();
    }
    Some(&s[start..end])
}

/// Offset of the bracket closing the one at `s[0]`, skipping string literals.
fn matching_bracket(s: &str) -> Option<usize> {
    let code = pysrc::code_only(s, &pysrc::lex(s));
    let mut depth = 0i64;
    for (i, c) in code.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

struct Line<'a> {
    start: usize,
    text: &'a str,
}

fn lines_with_offsets(text: &str) -> Vec<Line<'_>> {
    let mut offset = 0;
    text.split('\n')
        .map(|line| {
            let l = Line {
                start: offset,
                text: line,
            };
            offset += line.len() + 1;
            l
        })
        .collect()
}

fn inside_string(lexemes: &[Lexeme], offset: usize) -> bool {
    lexemes.iter().any(|lx| match lx {
        Lexeme::Str(s) => s.span.start < offset && offset < s.span.end,
        Lexeme::Comment(_) => false,
    })
}

fn mask_setup(text: &str) -> (String, bool) {
    let lexemes = pysrc::lex(text);
    let code = pysrc::code_only(text, &lexemes);
    let lines = lines_with_offsets(text);
    let mut out: Vec<String> = Vec::with_capacity(lines.len());
    let mut has_magic = false;
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        let trimmed = line.text.trim_start();
        let indent = &line.text[..line.text.len() - trimmed.len()];
        if inside_string(&lexemes, line.start) {
            out.push(line.text.to_string());
        } else if trimmed.starts_with('%') || trimmed.starts_with('!') {
            has_magic = true;
            out.push(format!("{indent}{SETUP_TOKEN}"));
        } else if IMPORT_LINE.is_match(trimmed) {
            out.push(format!("{indent}{SETUP_TOKEN}"));
            // swallow continuation lines of a parenthesized or backslashed import
            let mut depth = 0i64;
            loop {
                let code_line = &code[lines[i].start..lines[i].start + lines[i].text.len()];
                depth += code_line.matches('(').count() as i64 - code_line.matches(')').count() as i64;
                let continued = depth > 0 || code_line.trim_end().ends_with('\\');
                if !continued || i + 1 >= lines.len() {
                    break;
                }
                i += 1;
            }
        } else {
            out.push(line.text.to_string());
        }
        i += 1;
    }
    (out.join("\n"), has_magic)
}

fn delete_comments(text: &str) -> String {
    let edits: Vec<_> = pysrc::lex(text)
        .into_iter()
        .filter_map(|lx| match lx {
            Lexeme::Comment(r) => Some((r, String::new())),
            Lexeme::Str(_) => None,
        })
        .collect();
    pysrc::splice(text, &edits)
}

/// Byte offsets of the `(` of every `print(` call in code-only text.
fn print_call_parens(code: &str) -> Vec<usize> {
    let bytes = code.as_bytes();
    let mut found = Vec::new();
    for (pos, _) in code.match_indices("print") {
        let before = code[..pos].chars().next_back();
        if before.is_some_and(|c| pysrc::is_ident_char(c) || c == '.') {
            continue;
        }
        let mut j = pos + "print".len();
        if code[j..].chars().next().is_some_and(pysrc::is_ident_char) {
            continue;
        }
        while j < bytes.len() && (bytes[j] == b' ' || bytes[j] == b'\t') {
            j += 1;
        }
        if bytes.get(j) == Some(&b'(') {
            found.push(j);
        }
    }
    found
}

fn has_print_call(text: &str) -> bool {
    let code = pysrc::code_only(text, &pysrc::lex(text));
    !print_call_parens(&code).is_empty()
}

fn clear_prints(text: &str) -> String {
    let text = convert_print_statements(text);
    let lexemes = pysrc::lex(&text);
    let code = pysrc::code_only(&text, &lexemes);
    let mut edits = Vec::new();
    let mut covered_until = 0;
    for open in print_call_parens(&code) {
        if open < covered_until {
            continue;
        }
        let close = matching_bracket(&code[open..]).map_or(text.len(), |c| open + c);
        let args = &text[open + 1..close];
        edits.push((open + 1..close, clean_args(args)));
        covered_until = close;
    }
    pysrc::splice(&text, &edits)
}

/// Python 2 style `print x, y` lines become `print(x, y)` so that one
/// clearing path handles both forms.
fn convert_print_statements(text: &str) -> String {
    let lexemes = pysrc::lex(text);
    let mut edits = Vec::new();
    for line in lines_with_offsets(text) {
        if inside_string(&lexemes, line.start) {
            continue;
        }
        if let Some(caps) = PY2_PRINT.captures(line.text) {
            let indent = caps.get(1).map_or("", |m| m.as_str());
            let rest_start = indent.len() + "print".len();
            let rest = line.text[rest_start..].trim();
            edits.push((
                line.start..line.start + line.text.len(),
                format!("{indent}print({rest})"),
            ));
        }
    }
    pysrc::splice(text, &edits)
}

fn split_top_level(code: &str) -> Vec<std::ops::Range<usize>> {
    let mut parts = Vec::new();
    let mut depth = 0i64;
    let mut start = 0;
    for (i, c) in code.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(start..i);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(start..code.len());
    parts
}

fn clean_args(args: &str) -> String {
    let code = pysrc::code_only(args, &pysrc::lex(args));
    let mut kept = Vec::new();
    for range in split_top_level(&code) {
        let arg = &args[range.clone()];
        if arg.trim().is_empty() {
            continue;
        }
        if let Some(caps) = KEYWORD_ARG.captures(&code[range.clone()]) {
            let name = caps.get(1).unwrap().as_str();
            let eq = code[range.clone()].find('=').unwrap();
            let value = clean_expr(&arg[eq + 1..]);
            if !value.is_empty() {
                kept.push(format!("{name}={value}"));
            }
        } else {
            let value = clean_expr(arg);
            if !value.is_empty() {
                kept.push(value);
            }
        }
    }
    kept.join(", ")
}

/// Removes every string literal from an expression. f-strings leave their
/// placeholder expressions behind.
fn clean_expr(expr: &str) -> String {
    let lexemes = pysrc::lex(expr);
    let edits: Vec<_> = lexemes
        .iter()
        .map(|lx| match lx {
            Lexeme::Str(lit) => (lit.span.clone(), literal_replacement(expr, lit)),
            Lexeme::Comment(r) => (r.clone(), String::new()),
        })
        .collect();
    if edits.is_empty() {
        return expr.trim().to_string();
    }
    let spliced = pysrc::splice(expr, &edits);
    spliced
        .trim_matches(|c: char| c.is_whitespace() || matches!(c, '+' | '%' | '*' | ',' | '.'))
        .to_string()
}

fn literal_replacement(text: &str, lit: &StrLit) -> String {
    if !lit.is_fstring() {
        return String::new();
    }
    pysrc::fstring_expressions(&text[lit.body.clone()])
        .iter()
        .map(|e| clean_expr(e))
        .filter(|e| !e.is_empty())
        .collect::<Vec<_>>()
        .join(", ")
}

fn mask_paths(text: &str) -> String {
    let edits: Vec<_> = pysrc::lex(text)
        .into_iter()
        .filter_map(|lx| match lx {
            Lexeme::Str(lit) if is_path_literal(&text[lit.body.clone()], lit.is_raw()) => {
                Some((lit.span, PATH_TOKEN.to_string()))
            }
            _ => None,
        })
        .collect();
    pysrc::splice(text, &edits)
}

/// A literal is a path when its content contains a path separator or ends
/// with a common data-file extension. Backslashes that form a recognized
/// escape sequence (`\n`, `\t`, ...) are not separators; `\\` is.
pub fn is_path_literal(content: &str, raw: bool) -> bool {
    if content.contains('/') {
        return true;
    }
    if content.contains('\\') {
        if raw {
            return true;
        }
        let mut chars = content.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                match chars.next() {
                    Some('\\') | None => return true,
                    Some(
                        '\n'
                        | '\''
                        | '"'
                        | 'a'
                        | 'b'
                        | 'f'
                        | 'n'
                        | 'r'
                        | 't'
                        | 'v'
                        | 'x'
                        | 'N'
                        | 'u'
                        | 'U'
                        | '0'..='7',
                    ) => {}
                    Some(_) => return true,
                }
            }
        }
    }
    let lower = content.trim_end().to_ascii_lowercase();
    PATH_EXTENSIONS.iter().any(|ext| lower.ends_with(ext))
}

fn mask_implicit_return(text: &str) -> String {
    let lexemes = pysrc::lex(text);
    let code = pysrc::code_only(text, &lexemes);
    let lines = lines_with_offsets(text);
    let Some(last) = lines.iter().rposition(|l| !l.text.trim().is_empty()) else {
        return text.to_string();
    };
    let line = &lines[last];
    if line.text.starts_with(char::is_whitespace) || inside_string(&lexemes, line.start) {
        return text.to_string();
    }
    let depths = pysrc::depth_at_line_starts(&code);
    if depths.get(last).copied().unwrap_or(0) > 0 {
        return text.to_string();
    }
    let continued = lines[..last]
        .iter()
        .rev()
        .find(|l| !l.text.trim().is_empty())
        .is_some_and(|prev| {
            code[prev.start..prev.start + prev.text.len()]
                .trim_end()
                .ends_with('\\')
        });
    if continued || !detect_implicit_return(line.text) {
        return text.to_string();
    }
    pysrc::splice(
        text,
        &[(
            line.start..line.start + line.text.len(),
            VALIDATION_TOKEN.to_string(),
        )],
    )
}

fn collapse_lines(text: &str) -> String {
    text.split('\n')
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

fn has_constant_decl(text: &str) -> bool {
    text.split('\n').any(|line| {
        !line.starts_with(char::is_whitespace)
            && line
                .chars()
                .take_while(|c| *c != '=')
                .any(|c| c.is_ascii_uppercase())
            && CONSTANT_DECL.is_match(line)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(src: &str) -> PreprocessedCell {
        preprocess_parts(0, src, BTreeSet::new(), String::new())
    }

    #[test]
    fn setup_masking_example() {
        let p = pp("import pandas as pd\n%matplotlib inline\n# config\nX = 5");
        assert_eq!(p.processed_source, "SETUP\nSETUP\nX = 5");
        assert!(p.flags.has_setup_token);
        assert!(p.flags.has_magic);
        assert!(p.flags.has_constant_decl);
        assert!(!p.flags.has_print_call);
    }

    #[test]
    fn print_strings_cleared() {
        let p = pp(r#"print("train accuracy:", acc)"#);
        assert_eq!(p.processed_source, "print(acc)");
        assert!(p.flags.has_print_call);
    }

    #[test]
    fn path_then_validation() {
        let p = pp("df = pd.read_csv('data/train.csv')\ndf.columns");
        assert_eq!(p.processed_source, "df = pd.read_csv(PATH)\nVALIDATION");
        assert!(p.flags.has_validation_token);
    }

    #[test]
    fn implicit_return_cases() {
        for yes in [
            "df",
            "df.columns",
            "df['age']",
            "df.shape[0]",
            "df[df['a'] > 3]",
            "x.y.z",
        ] {
            assert!(detect_implicit_return(yes), "{yes}");
        }
        for no in [
            "df.head()",
            "x = df.columns",
            "return x",
            "pass",
            "SETUP",
            "PATH",
            "df[f(x)]",
            "df, other",
            "df.",
            "1",
            "df;",
            "a + b",
            "",
        ] {
            assert!(!detect_implicit_return(no), "{no}");
        }
    }

    #[test]
    fn indented_or_continued_last_line_is_not_implicit_return() {
        assert_eq!(
            pp("for c in cols:\n    c").processed_source,
            "for c in cols:\n    c"
        );
        assert_eq!(pp("x = f(a,\nb)").processed_source, "x = f(a,\nb)");
        assert_eq!(pp("x = a + \\\nb").processed_source, "x = a + \\\nb");
    }

    #[test]
    fn multiline_import_is_swallowed() {
        let p = pp("from sklearn.metrics import (\n    accuracy_score,\n    f1_score,\n)\nm = 1");
        assert_eq!(p.processed_source, "SETUP\nm = 1");
    }

    #[test]
    fn magic_inside_string_untouched() {
        let src = "s = '''\n%not magic\nimport nothing\n'''";
        assert_eq!(pp(src).processed_source, src);
    }

    #[test]
    fn comment_hash_in_string_kept() {
        assert_eq!(
            pp("color = '#ff0000'  # red").processed_source,
            "color = '#ff0000'"
        );
    }

    #[test]
    fn print_variants() {
        assert_eq!(
            pp(r#"print(f"acc: {acc:.2f}, loss {loss}")"#).processed_source,
            "print(acc, loss)"
        );
        assert_eq!(pp(r#"print("a", x, sep="")"#).processed_source, "print(x)");
        assert_eq!(pp(r#"print("%.3f" % score)"#).processed_source, "print(score)");
        assert_eq!(
            pp(r#"print("{} rows".format(n))"#).processed_source,
            "print(format(n))"
        );
        assert_eq!(pp(r#"print('done')"#).processed_source, "print()");
        assert_eq!(pp(r#"print "hello", x"#).processed_source, "print(x)");
        assert_eq!(pp("sprint('x')").processed_source, "sprint('x')");
        assert!(!pp("sprint('x')").flags.has_print_call);
        assert!(!pp("obj.print('x')").flags.has_print_call);
        assert_eq!(
            pp("print(\n    'multi',\n    value,\n)").processed_source,
            "print(value)"
        );
    }

    #[test]
    fn path_detector() {
        assert!(is_path_literal("../input/train.csv", false));
        assert!(is_path_literal("model.PKL", false));
        assert!(is_path_literal(r"C:\\data", false));
        assert!(is_path_literal(r"C:\data", false));
        assert!(is_path_literal(r"a\nb", true));
        assert!(!is_path_literal(r"line\n", false));
        assert!(!is_path_literal("accuracy", false));
        assert!(!is_path_literal("checkpoint.pt", false));
    }

    #[test]
    fn constant_declarations() {
        for yes in [
            "SEED = 42",
            "LR = 1e-3",
            "DATA_DIR = PATH",
            "IMG = (224, 224)",
            "DEBUG = False",
            "NAMES = ['a', 'b']",
            "K=5",
        ] {
            assert!(has_constant_decl(yes), "{yes}");
        }
        for no in [
            "X = df.drop('y')",
            "x = 5",
            "  SEED = 42",
            "SEED == 42",
            "MODEL = Net()",
            "_ = 3",
        ] {
            assert!(!has_constant_decl(no), "{no}");
        }
    }

    #[test]
    fn blank_lines_and_crlf_collapse() {
        assert_eq!(
            pp("a = 1\r\n\r\n\r\nb = 2   \n\n").processed_source,
            "a = 1\nb = 2"
        );
        assert_eq!(pp("").processed_source, "");
        assert_eq!(pp("# only a comment").processed_source, "");
    }
}
