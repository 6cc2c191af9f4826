use num_bigint::BigInt;

use super::{ParseError, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Arrow,
    Newline,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Arrow => "`->`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'')
}

pub(super) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            out.push(Token { tok: Tok::Newline, pos });
            line += 1;
            col = 1;
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
                col += 1;
            }
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(d);
                chars.next();
                col += 1;
            }
            let n = digits.parse().expect("ascii digits");
            out.push(Token { tok: Tok::Int(n), pos });
        } else if ident_start(c) {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|&&d| ident_continue(d)) {
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push(Token { tok: Tok::Ident(s), pos });
        } else if c == '-' {
            chars.next();
            col += 1;
            if chars.peek() == Some(&'>') {
                chars.next();
                col += 1;
                out.push(Token { tok: Tok::Arrow, pos });
            } else {
                out.push(Token { tok: Tok::Sym('-'), pos });
            }
        } else if "{}:=+/,*;".contains(c) {
            chars.next();
            col += 1;
            out.push(Token { tok: Tok::Sym(c), pos });
        } else {
            return Err(ParseError::syntax(pos, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}
