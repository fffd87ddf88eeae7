//! Tokenizer for the priority-function language.
//!
//! Produces Python-style logical lines: `Newline`, `Indent` and `Dedent`
//! tokens are synthesized from leading whitespace, and line breaks inside
//! brackets are joined implicitly.

use super::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    /// Numeric literal with its source spelling.
    Number(f64, String),
    Str(String),
    Kw(Keyword),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Def,
    Return,
    For,
    In,
    If,
    Elif,
    Else,
    And,
    Or,
    Not,
    Pass,
    True,
    False,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Self> {
        Some(match s {
            "def" => Self::Def,
            "return" => Self::Return,
            "for" => Self::For,
            "in" => Self::In,
            "if" => Self::If,
            "elif" => Self::Elif,
            "else" => Self::Else,
            "and" => Self::And,
            "or" => Self::Or,
            "not" => Self::Not,
            "pass" => Self::Pass,
            "True" => Self::True,
            "False" => Self::False,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// Byte range in the source text.
    pub start: usize,
    pub end: usize,
}

// Longest first so that `**=` wins over `**` and `*`.
const OPERATORS: &[&str] = &[
    "**=", "//=", "...", "**", "//", "==", "!=", "<=", ">=", "->", "+=", "-=", "*=", "/=", "%=", "+", "-", "*", "/", "%", "&", "|", "<",
    ">", "=", "(", ")", "[", "]", ",", ":", ".", "~",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    line_start: usize,
    depth: usize,
    indents: Vec<usize>,
    out: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, bytes: src.as_bytes(), pos: 0, line: 1, line_start: 0, depth: 0, indents: vec![0], out: Vec::new() }
    }

    fn col(&self) -> usize {
        self.pos - self.line_start + 1
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    fn push(&mut self, tok: Tok, start: usize) {
        let col = start - self.line_start + 1;
        self.out.push(Token { tok, line: self.line, col, start, end: self.pos });
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut at_line_start = true;
        while self.pos < self.bytes.len() {
            if at_line_start {
                if self.depth == 0 && self.handle_indent()? {
                    continue;
                }
                at_line_start = false;
            }
            let c = self.bytes[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\x0c' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b'\\' if self.bytes.get(self.pos + 1) == Some(&b'\n') => {
                    self.pos += 2;
                    self.line += 1;
                    self.line_start = self.pos;
                }
                b'\n' => {
                    if self.depth == 0 && !matches!(self.out.last().map(|t| &t.tok), None | Some(Tok::Newline)) {
                        let start = self.pos;
                        self.pos += 1;
                        self.push(Tok::Newline, start);
                    } else {
                        self.pos += 1;
                    }
                    self.line += 1;
                    self.line_start = self.pos;
                    at_line_start = true;
                }
                b'0'..=b'9' => self.number()?,
                b'.' if self.bytes.get(self.pos + 1).is_some_and(u8::is_ascii_digit) => self.number()?,
                b'"' | b'\'' => self.string()?,
                c if c == b'_' || c.is_ascii_alphabetic() => self.ident(),
                _ => self.operator()?,
            }
        }
        if !matches!(self.out.last().map(|t| &t.tok), None | Some(Tok::Newline)) {
            let p = self.pos;
            self.push(Tok::Newline, p);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            let p = self.pos;
            self.push(Tok::Dedent, p);
        }
        let p = self.pos;
        self.push(Tok::Eof, p);
        Ok(self.out)
    }

    /// Measures leading whitespace of a physical line. Returns true when the
    /// line is blank or comment-only (and has been consumed).
    fn handle_indent(&mut self) -> Result<bool, ParseError> {
        let mut width = 0usize;
        let mut p = self.pos;
        while p < self.bytes.len() {
            match self.bytes[p] {
                b' ' => width += 1,
                b'\t' => width = (width / 8 + 1) * 8,
                b'\x0c' | b'\r' => {}
                _ => break,
            }
            p += 1;
        }
        match self.bytes.get(p) {
            None => {
                self.pos = p;
                return Ok(true);
            }
            Some(b'\n') => {
                self.pos = p + 1;
                self.line += 1;
                self.line_start = self.pos;
                return Ok(true);
            }
            Some(b'#') => {
                while p < self.bytes.len() && self.bytes[p] != b'\n' {
                    p += 1;
                }
                self.pos = (p + 1).min(self.bytes.len());
                if p < self.bytes.len() {
                    self.line += 1;
                    self.line_start = self.pos;
                }
                return Ok(true);
            }
            _ => {}
        }
        self.pos = p;
        let current = *self.indents.last().unwrap();
        if width > current {
            self.indents.push(width);
            self.push(Tok::Indent, p);
        } else {
            while width < *self.indents.last().unwrap() {
                self.indents.pop();
                self.push(Tok::Dedent, p);
            }
            if width != *self.indents.last().unwrap() {
                return Err(self.err("unindent does not match any outer indentation level"));
            }
        }
        Ok(false)
    }

    fn number(&mut self) -> Result<(), ParseError> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'_') {
            self.pos += 1;
        }
        if self.pos < b.len() && b[self.pos] == b'.' && !(b.get(self.pos + 1) == Some(&b'.')) {
            self.pos += 1;
            while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'_') {
                self.pos += 1;
            }
        }
        if self.pos < b.len() && (b[self.pos] == b'e' || b[self.pos] == b'E') {
            let mut q = self.pos + 1;
            if q < b.len() && (b[q] == b'+' || b[q] == b'-') {
                q += 1;
            }
            if q < b.len() && b[q].is_ascii_digit() {
                while q < b.len() && b[q].is_ascii_digit() {
                    q += 1;
                }
                self.pos = q;
            }
        }
        let text = &self.src[start..self.pos];
        if self.pos < b.len() && (b[self.pos] == b'_' || b[self.pos].is_ascii_alphabetic()) {
            return Err(self.err(format!("invalid numeric literal `{text}{}`", b[self.pos] as char)));
        }
        let value: f64 = text
            .replace('_', "")
            .parse()
            .map_err(|_| ParseError::new(self.line, start - self.line_start + 1, format!("invalid numeric literal `{text}`")))?;
        self.push(Tok::Number(value, text.to_string()), start);
        Ok(())
    }

    fn string(&mut self) -> Result<(), ParseError> {
        let start = self.pos;
        let quote = self.bytes[self.pos];
        if self.bytes.get(self.pos + 1) == Some(&quote) && self.bytes.get(self.pos + 2) == Some(&quote) {
            return self.triple_string(start, quote);
        }
        self.pos += 1;
        let mut value = String::new();
        loop {
            let Some(&c) = self.bytes.get(self.pos) else {
                return Err(ParseError::new(self.line, start - self.line_start + 1, "unterminated string literal"));
            };
            match c {
                b'\n' => return Err(ParseError::new(self.line, start - self.line_start + 1, "unterminated string literal")),
                b'\\' => {
                    let esc = self.bytes.get(self.pos + 1).copied();
                    match esc {
                        Some(b'n') => value.push('\n'),
                        Some(b't') => value.push('\t'),
                        Some(b'\\') => value.push('\\'),
                        Some(b'\'') => value.push('\''),
                        Some(b'"') => value.push('"'),
                        _ => return Err(self.err("unsupported escape sequence")),
                    }
                    self.pos += 2;
                }
                c if c == quote => {
                    self.pos += 1;
                    break;
                }
                _ => {
                    // Copy one UTF-8 scalar.
                    let ch = self.src[self.pos..].chars().next().unwrap();
                    value.push(ch);
                    self.pos += ch.len_utf8();
                }
            }
        }
        self.push(Tok::Str(value), start);
        Ok(())
    }

    fn triple_string(&mut self, start: usize, quote: u8) -> Result<(), ParseError> {
        let (line, col) = (self.line, start - self.line_start + 1);
        let delim = [quote; 3];
        self.pos += 3;
        let body_start = self.pos;
        loop {
            if self.pos + 3 > self.bytes.len() {
                return Err(ParseError::new(line, col, "unterminated triple-quoted string"));
            }
            if self.bytes[self.pos..self.pos + 3] == delim {
                break;
            }
            if self.bytes[self.pos] == b'\\' {
                self.pos += 1;
            }
            if self.bytes[self.pos] == b'\n' {
                self.line += 1;
                self.line_start = self.pos + 1;
            }
            self.pos += 1;
        }
        let value = self.src[body_start..self.pos].to_string();
        self.pos += 3;
        self.out.push(Token { tok: Tok::Str(value), line, col, start, end: self.pos });
        Ok(())
    }

    fn ident(&mut self) {
        let start = self.pos;
        while self.pos < self.bytes.len() && (self.bytes[self.pos] == b'_' || self.bytes[self.pos].is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        let text = &self.src[start..self.pos];
        let tok = match Keyword::from_ident(text) {
            Some(k) => Tok::Kw(k),
            None => Tok::Name(text.to_string()),
        };
        self.push(tok, start);
    }

    fn operator(&mut self) -> Result<(), ParseError> {
        let rest = &self.src[self.pos..];
        let Some(op) = OPERATORS.iter().copied().find(|op| rest.starts_with(op)) else {
            let ch = rest.chars().next().unwrap();
            return Err(self.err(format!("unexpected character `{ch}`")));
        };
        match op {
            "(" | "[" => self.depth += 1,
            ")" | "]" => {
                if self.depth == 0 {
                    return Err(self.err(format!("unmatched `{op}`")));
                }
                self.depth -= 1;
            }
            _ => {}
        }
        let start = self.pos;
        self.pos += op.len();
        self.push(Tok::Op(op), start);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn indentation_produces_block_tokens() {
        let toks = kinds("def f(x):\n    return x\n");
        assert!(toks.contains(&Tok::Indent));
        assert!(toks.contains(&Tok::Dedent));
        assert_eq!(toks.last(), Some(&Tok::Eof));
    }

    #[test]
    fn brackets_join_lines() {
        let toks = kinds("x = (1 +\n     2)\n");
        let newlines = toks.iter().filter(|t| **t == Tok::Newline).count();
        assert_eq!(newlines, 1);
    }

    #[test]
    fn numbers_keep_spelling() {
        let toks = kinds("1e-2 0.5 3\n");
        assert_eq!(toks[0], Tok::Number(0.01, "1e-2".into()));
        assert_eq!(toks[2], Tok::Number(3.0, "3".into()));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let toks = kinds("# header\n\ndef f():\n\n    # inner\n    return 1\n");
        assert_eq!(toks.iter().filter(|t| **t == Tok::Indent).count(), 1);
    }

    #[test]
    fn bad_dedent_is_reported_with_position() {
        let err = tokenize("def f():\n        x = 1\n    return x\n").unwrap_err();
        assert_eq!(err.line, 3);
    }
}
