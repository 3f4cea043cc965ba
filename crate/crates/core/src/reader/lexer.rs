use std::fmt;

use super::error::{ReadError, ReadErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Atom,
    Var,
    Int,
    Float,
    Punct,
    Str,
    End,
}

/// Line and column are 1-based and count characters; `offset` is a byte
/// offset into the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Verbatim lexeme, except for quoted atoms and strings which hold the
    /// unescaped contents.
    pub text: String,
    pub pos: Pos,
    pub quoted: bool,
    /// Whitespace or a comment precedes the token. `foo(` is functional
    /// notation while `foo (` is not.
    pub layout_before: bool,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.text == p
    }

    /// Unquoted name token, the only kind that can act as an operator.
    pub fn op_name(&self) -> Option<&str> {
        match self.kind {
            TokenKind::Atom if !self.quoted => Some(&self.text),
            TokenKind::Punct if self.text == "," => Some(","),
            _ => None,
        }
    }
}

pub fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~:.?@#&$".contains(c)
}

pub fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|&(_, c)| c)
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.i + n).map(|&(_, c)| c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
            offset: self.chars.get(self.i).map_or(self.src.len(), |&(o, _)| o),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn slice_from(&self, start: Pos) -> &'a str {
        &self.src[start.offset..self.pos().offset]
    }

    /// Skips whitespace and comments; reports whether anything was skipped.
    fn skip_layout(&mut self) -> Result<bool, ReadError> {
        let mut skipped = false;
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => {
                                return Err(ReadError::new(
                                    ReadErrorKind::UnterminatedComment,
                                    start,
                                ))
                            }
                        }
                    }
                }
                _ => return Ok(skipped),
            }
            skipped = true;
        }
    }

    fn token(&self, kind: TokenKind, text: String, pos: Pos, layout_before: bool) -> Token {
        Token {
            kind,
            text,
            pos,
            quoted: false,
            layout_before,
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, ReadError> {
        let layout = self.skip_layout()?;
        let start = self.pos();
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = if c.is_ascii_digit() {
            self.number(start, layout)
        } else if c == '_' || c.is_uppercase() {
            while self.peek().is_some_and(is_alnum) {
                self.bump();
            }
            self.token(TokenKind::Var, self.slice_from(start).to_owned(), start, layout)
        } else if c.is_alphabetic() {
            while self.peek().is_some_and(is_alnum) {
                self.bump();
            }
            self.token(TokenKind::Atom, self.slice_from(start).to_owned(), start, layout)
        } else if c == '\'' || c == '"' {
            self.bump();
            let text = self.quoted(c, start)?;
            let kind = if c == '\'' { TokenKind::Atom } else { TokenKind::Str };
            let mut tok = self.token(kind, text, start, layout);
            tok.quoted = true;
            tok
        } else if "()[]{},|".contains(c) {
            self.bump();
            self.token(TokenKind::Punct, c.to_string(), start, layout)
        } else if c == '!' || c == ';' {
            self.bump();
            self.token(TokenKind::Atom, c.to_string(), start, layout)
        } else if is_symbol_char(c) {
            while self.peek().is_some_and(is_symbol_char) {
                self.bump();
            }
            let text = self.slice_from(start);
            let at_layout = self
                .peek()
                .is_none_or(|n| n.is_whitespace() || n == '%');
            if text == "." && at_layout {
                self.token(TokenKind::End, ".".to_owned(), start, layout)
            } else {
                self.token(TokenKind::Atom, text.to_owned(), start, layout)
            }
        } else {
            return Err(ReadError::new(ReadErrorKind::UnexpectedChar(c), start));
        };
        Ok(Some(tok))
    }

    fn number(&mut self, start: Pos, layout: bool) -> Token {
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        let mut kind = TokenKind::Int;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            kind = TokenKind::Float;
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            if matches!(self.peek(), Some('e' | 'E')) {
                let digits_at = match self.peek_at(1) {
                    Some('+' | '-') => 2,
                    _ => 1,
                };
                if self.peek_at(digits_at).is_some_and(|c| c.is_ascii_digit()) {
                    for _ in 0..digits_at {
                        self.bump();
                    }
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.bump();
                    }
                }
            }
        }
        self.token(kind, self.slice_from(start).to_owned(), start, layout)
    }

    fn quoted(&mut self, quote: char, start: Pos) -> Result<String, ReadError> {
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(ReadError::new(ReadErrorKind::UnterminatedQuoted, start));
            };
            if c == quote {
                if self.peek() == Some(quote) {
                    self.bump();
                    out.push(quote);
                    continue;
                }
                return Ok(out);
            }
            if c != '\\' {
                out.push(c);
                continue;
            }
            let esc_pos = self.pos();
            let Some(e) = self.bump() else {
                return Err(ReadError::new(ReadErrorKind::UnterminatedQuoted, start));
            };
            match e {
                'n' => out.push('\n'),
                't' => out.push('\t'),
                'r' => out.push('\r'),
                'a' => out.push('\x07'),
                'b' => out.push('\x08'),
                'f' => out.push('\x0c'),
                'v' => out.push('\x0b'),
                '0' => out.push('\0'),
                '\\' | '\'' | '"' | '`' => out.push(e),
                '\n' => {}
                'x' => {
                    let mut code = 0u32;
                    let mut digits = 0;
                    while let Some(d) = self.peek().and_then(|c| c.to_digit(16)) {
                        self.bump();
                        code = code.saturating_mul(16).saturating_add(d);
                        digits += 1;
                    }
                    let ch = char::from_u32(code).filter(|_| digits > 0);
                    match (ch, self.bump()) {
                        (Some(ch), Some('\\')) => out.push(ch),
                        _ => return Err(ReadError::new(ReadErrorKind::BadEscape, esc_pos)),
                    }
                }
                _ => return Err(ReadError::new(ReadErrorKind::BadEscape, esc_pos)),
            }
        }
    }
}

/// Splits Prolog text into tokens. Comments and layout are dropped; each
/// clause-terminating `.` becomes an [`TokenKind::End`] token.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ReadError> {
    let mut lexer = Lexer {
        src,
        chars: src.char_indices().collect(),
        i: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(tok) = lexer.next_token()? {
        tokens.push(tok);
    }
    Ok(tokens)
}

/// Position just past the last character of `src`.
pub fn end_pos(src: &str) -> Pos {
    let mut pos = Pos {
        line: 1,
        column: 1,
        offset: src.len(),
    };
    for c in src.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}
