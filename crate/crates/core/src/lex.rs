//! Tokenizer shared by the formula language and the model/task file format.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Caret,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    DotDot,
    At,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Number(s) => return write!(f, "number `{s}`"),
            Tok::Str(_) => "string",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Colon => "`:`",
            Tok::Caret => "`^`",
            Tok::Tilde => "`~`",
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::Arrow => "`->`",
            Tok::Eq => "`=`",
            Tok::Neq => "`~=`",
            Tok::Lt => "`<`",
            Tok::Le => "`<=`",
            Tok::Gt => "`>`",
            Tok::Ge => "`>=`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::DotDot => "`..`",
            Tok::At => "`@`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// Byte range in the source.
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Tokenize `src`. `#` starts a comment that runs to end of line. The
/// returned vector always ends with an `Eof` token.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    while i < bytes.len() {
        let c = bytes[i];
        let col = i - line_start + 1;
        let start = i;
        let single = |t: Tok| Some((t, 1usize));
        let two = |next: u8, yes: Tok, no: Tok| {
            if bytes.get(i + 1) == Some(&next) {
                Some((yes, 2usize))
            } else {
                Some((no, 1usize))
            }
        };
        let fixed = match c {
            b'\n' => {
                i += 1;
                line += 1;
                line_start = i;
                continue;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                continue;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'(' => single(Tok::LParen),
            b')' => single(Tok::RParen),
            b'{' => single(Tok::LBrace),
            b'}' => single(Tok::RBrace),
            b',' => single(Tok::Comma),
            b';' => single(Tok::Semi),
            b':' => single(Tok::Colon),
            b'^' => single(Tok::Caret),
            b'&' => single(Tok::Amp),
            b'|' => single(Tok::Bar),
            b'+' => single(Tok::Plus),
            b'*' => single(Tok::Star),
            b'/' => single(Tok::Slash),
            b'@' => single(Tok::At),
            b'=' => single(Tok::Eq),
            b'~' => two(b'=', Tok::Neq, Tok::Tilde),
            b'-' => two(b'>', Tok::Arrow, Tok::Minus),
            b'<' => two(b'=', Tok::Le, Tok::Lt),
            b'>' => two(b'=', Tok::Ge, Tok::Gt),
            b'.' if bytes.get(i + 1) == Some(&b'.') => Some((Tok::DotDot, 2)),
            _ => None,
        };
        if let Some((tok, len)) = fixed {
            i += len;
            out.push(Token { tok, line, col, start, end: i });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), line, col, start, end: i });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            // A fraction needs a digit after the dot; `0..45` is a range.
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push(Token { tok: Tok::Number(src[start..i].to_string()), line, col, start, end: i });
            continue;
        }
        if c == b'"' {
            let mut text = String::new();
            i += 1;
            let mut closed = false;
            while i < bytes.len() {
                let ch = src[i..].chars().next().expect("in bounds");
                i += ch.len_utf8();
                match ch {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => {
                        let esc = src[i..].chars().next();
                        i += esc.map_or(0, char::len_utf8);
                        match esc {
                            Some('n') => text.push('\n'),
                            Some('"') => text.push('"'),
                            Some('\\') => text.push('\\'),
                            _ => return Err(LexError { line, col, message: "bad escape in string".into() }),
                        }
                    }
                    '\n' => return Err(LexError { line, col, message: "unterminated string".into() }),
                    ch => text.push(ch),
                }
            }
            if !closed {
                return Err(LexError { line, col, message: "unterminated string".into() });
            }
            out.push(Token { tok: Tok::Str(text), line, col, start, end: i });
            continue;
        }
        let ch = src[i..].chars().next().expect("in bounds");
        return Err(LexError { line, col, message: format!("unexpected character `{ch}`") });
    }
    let col = bytes.len() - line_start + 1;
    out.push(Token { tok: Tok::Eof, line, col, start: bytes.len(), end: bytes.len() });
    Ok(out)
}
