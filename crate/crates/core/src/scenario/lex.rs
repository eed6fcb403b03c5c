//! Tokenizer for the scenario language.
//!
//! Line-oriented: newlines are significant (one declaration per line),
//! everything else is whitespace-insensitive. `#` starts a comment that
//! runs to the end of the line. Every token carries the 1-based line and
//! column of its first character.

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(super) enum TokenKind {
    /// Identifier or keyword.
    Word(String),
    /// Double-quoted string (no escapes).
    Str(String),
    /// Unsigned decimal; the raw text is kept for integer contexts.
    Number {
        value: f64,
        text: String,
    },
    LBracket,
    RBracket,
    Comma,
    Semicolon,
    Less,
    Plus,
    Minus,
    Newline,
    Eof,
}

impl TokenKind {
    pub(super) fn describe(&self) -> String {
        match self {
            TokenKind::Word(w) => format!("\"{w}\""),
            TokenKind::Str(_) => "string".to_string(),
            TokenKind::Number { text, .. } => format!("number {text}"),
            TokenKind::LBracket => "\"[\"".to_string(),
            TokenKind::RBracket => "\"]\"".to_string(),
            TokenKind::Comma => "\",\"".to_string(),
            TokenKind::Semicolon => "\";\"".to_string(),
            TokenKind::Less => "\"<\"".to_string(),
            TokenKind::Plus => "\"+\"".to_string(),
            TokenKind::Minus => "\"-\"".to_string(),
            TokenKind::Newline => "end of line".to_string(),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(super) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

pub(super) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    let mut line_has_tokens = false;

    while let Some(&ch) = chars.peek() {
        match ch {
            '\n' => {
                chars.next();
                if line_has_tokens {
                    tokens.push(Token {
                        kind: TokenKind::Newline,
                        line,
                        column,
                    });
                }
                line += 1;
                column = 1;
                line_has_tokens = false;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '"' => {
                let (start_line, start_col) = (line, column);
                chars.next();
                column += 1;
                let mut s = String::new();
                loop {
                    match chars.peek() {
                        Some('"') => {
                            chars.next();
                            column += 1;
                            break;
                        }
                        Some('\n') | None => {
                            return Err(ParseError {
                                line: start_line,
                                column: start_col,
                                message: "unterminated string".to_string(),
                                expected: vec!["closing '\"'".to_string()],
                            });
                        }
                        Some(&c) => {
                            s.push(c);
                            chars.next();
                            column += 1;
                        }
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Str(s),
                    line: start_line,
                    column: start_col,
                });
                line_has_tokens = true;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let (start_line, start_col) = (line, column);
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() || c == '.' {
                        text.push(c);
                        chars.next();
                        column += 1;
                    } else if (c == 'e' || c == 'E') && !text.is_empty() {
                        // Exponent: e, optional sign, digits.
                        let mut look = chars.clone();
                        look.next();
                        let mut exp = String::from(c);
                        if let Some(&sign) = look.peek() {
                            if sign == '+' || sign == '-' {
                                exp.push(sign);
                                look.next();
                            }
                        }
                        if look.peek().is_some_and(|d| d.is_ascii_digit()) {
                            for _ in 0..exp.len() {
                                chars.next();
                                column += 1;
                            }
                            text.push_str(&exp);
                            while let Some(&d) = chars.peek() {
                                if d.is_ascii_digit() {
                                    text.push(d);
                                    chars.next();
                                    column += 1;
                                } else {
                                    break;
                                }
                            }
                        }
                        break;
                    } else {
                        break;
                    }
                }
                let value: f64 = text.parse().map_err(|_| ParseError {
                    line: start_line,
                    column: start_col,
                    message: format!("malformed number {text:?}"),
                    expected: vec!["number".to_string()],
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number { value, text },
                    line: start_line,
                    column: start_col,
                });
                line_has_tokens = true;
            }
            c if c.is_alphabetic() || c == '_' => {
                let (start_line, start_col) = (line, column);
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Word(word),
                    line: start_line,
                    column: start_col,
                });
                line_has_tokens = true;
            }
            _ => {
                let kind = match ch {
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    ',' => TokenKind::Comma,
                    ';' => TokenKind::Semicolon,
                    '<' => TokenKind::Less,
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    other => {
                        return Err(ParseError {
                            line,
                            column,
                            message: format!("unexpected character {other:?}"),
                            expected: vec![],
                        });
                    }
                };
                tokens.push(Token { kind, line, column });
                chars.next();
                column += 1;
                line_has_tokens = true;
            }
        }
    }

    if line_has_tokens {
        tokens.push(Token {
            kind: TokenKind::Newline,
            line,
            column,
        });
        line += 1;
        column = 1;
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        line,
        column,
    });
    Ok(tokens)
}
