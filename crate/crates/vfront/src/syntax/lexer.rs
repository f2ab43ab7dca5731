//! Tokenizer for the surface syntax.

use std::fmt;

use crate::syntax::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    // punctuation
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Underscore,
    Semi,
    Comma,
    Assign,    // :=
    Equals,    // =
    // operators
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::LBracket => write!(f, "'['"),
            Tok::RBracket => write!(f, "']'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Underscore => write!(f, "'_'"),
            Tok::Semi => write!(f, "';'"),
            Tok::Comma => write!(f, "','"),
            Tok::Assign => write!(f, "':='"),
            Tok::Equals => write!(f, "'='"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Percent => write!(f, "'%'"),
            Tok::EqEq => write!(f, "'=='"),
            Tok::NotEq => write!(f, "'!='"),
            Tok::Lt => write!(f, "'<'"),
            Tok::Le => write!(f, "'<='"),
            Tok::Gt => write!(f, "'>'"),
            Tok::Ge => write!(f, "'>='"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok| {
            out.push(Spanned {
                tok,
                line: tl,
                col: tc,
            })
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '/' if i + 1 < bytes.len() && bytes[i + 1] == '/' => {
                while i < bytes.len() && bytes[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '[' => push(Tok::LBracket),
            ']' => push(Tok::RBracket),
            '{' => push(Tok::LBrace),
            '}' => push(Tok::RBrace),
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            ';' => push(Tok::Semi),
            ',' => push(Tok::Comma),
            '+' => push(Tok::Plus),
            '-' => push(Tok::Minus),
            '*' => push(Tok::Star),
            '/' => push(Tok::Slash),
            '%' => push(Tok::Percent),
            '_' => push(Tok::Underscore),
            ':' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '=' {
                    push(Tok::Assign);
                    i += 1;
                    col += 1;
                } else {
                    return Err(ParseError::at(line, col, "expected ':='".into()));
                }
            }
            '=' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '=' {
                    push(Tok::EqEq);
                    i += 1;
                    col += 1;
                } else {
                    push(Tok::Equals);
                }
            }
            '!' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '=' {
                    push(Tok::NotEq);
                    i += 1;
                    col += 1;
                } else {
                    return Err(ParseError::at(line, col, "expected '!='".into()));
                }
            }
            '<' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '=' {
                    push(Tok::Le);
                    i += 1;
                    col += 1;
                } else {
                    push(Tok::Lt);
                }
            }
            '>' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '=' {
                    push(Tok::Ge);
                    i += 1;
                    col += 1;
                } else {
                    push(Tok::Gt);
                }
            }
            c if c.is_ascii_digit() => {
                let mut n: i64 = 0;
                let mut len = 0;
                while i + len < bytes.len() && bytes[i + len].is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|m| m.checked_add((bytes[i + len] as u8 - b'0') as i64))
                        .ok_or_else(|| {
                            ParseError::at(line, col, "integer literal overflow".into())
                        })?;
                    len += 1;
                }
                push(Tok::Int(n));
                i += len;
                col += len as u32;
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut len = 0;
                while i + len < bytes.len()
                    && (bytes[i + len].is_ascii_alphanumeric()
                        || bytes[i + len] == '_'
                        || bytes[i + len] == '\'')
                {
                    len += 1;
                }
                // Trailing underscores belong to `]_mod` positions, not to
                // the identifier.
                while len > 0 && bytes[i + len - 1] == '_' {
                    len -= 1;
                }
                let s: String = bytes[i..i + len].iter().collect();
                push(Tok::Ident(s));
                i += len;
                col += len as u32;
                continue;
            }
            other => {
                return Err(ParseError::at(
                    line,
                    col,
                    format!("unexpected character '{other}'"),
                ));
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
