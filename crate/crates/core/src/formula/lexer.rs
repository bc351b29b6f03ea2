use std::ops::Range;

use thiserror::Error;

use crate::address::looks_like_coords;
use crate::value::ErrorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Text,
    Boolean,
    Identifier,
    /// A coordinate such as `A2` or `$B$7`.
    CellRef,
    Operator,
    Punct,
    ErrorLiteral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Exact source slice; text literals keep their quotes and escapes.
    pub lexeme: String,
    /// Character offsets into the source.
    pub span: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unterminated text literal starting at offset {0}")]
    UnterminatedText(usize),
    #[error("unterminated quoted sheet name starting at offset {0}")]
    UnterminatedQuote(usize),
    #[error("unterminated workbook qualifier starting at offset {0}")]
    UnterminatedBracket(usize),
    #[error("illegal character `{ch}` at offset {offset}")]
    IllegalChar { ch: char, offset: usize },
}

impl LexError {
    pub fn offset(&self) -> usize {
        match self {
            LexError::UnterminatedText(o) | LexError::UnterminatedQuote(o) | LexError::UnterminatedBracket(o) => *o,
            LexError::IllegalChar { offset, .. } => *offset,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.' || c == '$'
}

/// Splits formula source (without the leading `=`) into tokens. Whitespace
/// is skipped; every other character belongs to exactly one token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let slice = |a: usize, b: usize| chars[a..b].iter().collect::<String>();

    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let kind = match c {
            '"' => {
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(LexError::UnterminatedText(start)),
                        Some('"') if chars.get(i + 1) == Some(&'"') => i += 2,
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some(_) => i += 1,
                    }
                }
                TokenKind::Text
            }
            '\'' => {
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(LexError::UnterminatedQuote(start)),
                        Some('\'') if chars.get(i + 1) == Some(&'\'') => i += 2,
                        Some('\'') => {
                            i += 1;
                            break;
                        }
                        Some(_) => i += 1,
                    }
                }
                TokenKind::Identifier
            }
            '#' => {
                let rest: String = chars[i..].iter().take(8).collect();
                let err = ErrorKind::ALL
                    .into_iter()
                    .find(|e| rest.to_ascii_uppercase().starts_with(e.as_str()))
                    .ok_or(LexError::IllegalChar { ch: c, offset: i })?;
                i += err.as_str().chars().count();
                TokenKind::ErrorLiteral
            }
            '0'..='9' | '.' => {
                let digits_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if chars.get(i) == Some(&'.') {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i == digits_start + 1 && c == '.' {
                    return Err(LexError::IllegalChar { ch: c, offset: start });
                }
                if matches!(chars.get(i), Some('e' | 'E')) {
                    let mut j = i + 1;
                    if matches!(chars.get(j), Some('+' | '-')) {
                        j += 1;
                    }
                    if chars.get(j).is_some_and(|d| d.is_ascii_digit()) {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                TokenKind::Number
            }
            '+' | '-' | '*' | '/' | '^' | '&' | '=' => {
                i += 1;
                TokenKind::Operator
            }
            '<' => {
                i += 1;
                if matches!(chars.get(i), Some('=' | '>')) {
                    i += 1;
                }
                TokenKind::Operator
            }
            '>' => {
                i += 1;
                if chars.get(i) == Some(&'=') {
                    i += 1;
                }
                TokenKind::Operator
            }
            '[' => {
                // the workbook name between brackets is one identifier token,
                // whatever characters it contains
                tokens.push(Token {
                    kind: TokenKind::Punct,
                    lexeme: "[".to_string(),
                    span: i..i + 1,
                });
                i += 1;
                let name_start = i;
                while i < chars.len() && chars[i] != ']' {
                    i += 1;
                }
                if i > name_start {
                    tokens.push(Token {
                        kind: TokenKind::Identifier,
                        lexeme: slice(name_start, i),
                        span: name_start..i,
                    });
                }
                if i == chars.len() {
                    return Err(LexError::UnterminatedBracket(start));
                }
                i += 1;
                tokens.push(Token {
                    kind: TokenKind::Punct,
                    lexeme: "]".to_string(),
                    span: i - 1..i,
                });
                continue;
            }
            '(' | ')' | '{' | '}' | ';' | ',' | ':' | '!' | ']' => {
                i += 1;
                TokenKind::Punct
            }
            c if is_ident_start(c) => {
                while i < chars.len() && is_ident_continue(chars[i]) {
                    i += 1;
                }
                let word = slice(start, i);
                let next_is_paren = chars[i..]
                    .iter()
                    .find(|c| !c.is_whitespace())
                    .is_some_and(|c| *c == '(');
                if next_is_paren {
                    TokenKind::Identifier
                } else if word.eq_ignore_ascii_case("TRUE") || word.eq_ignore_ascii_case("FALSE") {
                    TokenKind::Boolean
                } else if looks_like_coords(&word) {
                    TokenKind::CellRef
                } else {
                    TokenKind::Identifier
                }
            }
            other => return Err(LexError::IllegalChar { ch: other, offset: i }),
        };
        tokens.push(Token {
            kind,
            lexeme: slice(start, i),
            span: start..i,
        });
    }
    Ok(tokens)
}
