//! Recursive-descent parser for the scenario language.
//!
//! Grammar (one declaration per line, `#` comments):
//!
//! ```text
//! scenario  := "scenario" STRING NEWLINE decl+
//! decl      := telegraph | mirror | agent | order | shots
//! telegraph := "telegraph" IDENT "active" ANGLE "passive" ANGLE
//! mirror    := "mirror" IDENT ("gate" IDENT)?
//! agent     := "agent" "policy" (IDENT | matrix2)
//! matrix2   := "[" complex "," complex ";" complex "," complex "]"
//! order     := "order" IDENT ("<" IDENT)+
//! shots     := "shots" INTEGER
//! ANGLE     := decimal radians or the literal "pi"
//! complex   := [sign] NUMBER ["i"] [("+"|"-") NUMBER "i"]
//! ```
//!
//! Errors carry the first failure position; there is no recovery.

use num_complex::Complex64;

use super::lex::{tokenize, Token, TokenKind};
use super::{Decl, ParseError, PolicySpec, ScenarioAst, Spanned};

const DECL_KEYWORDS: [&str; 5] = ["telegraph", "mirror", "agent", "order", "shots"];

pub fn parse(text: &str) -> Result<ScenarioAst, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    parser.scenario()
}

/// Parse a standalone `[a, b; c, d]` matrix literal (the CLI --matrix
/// syntax, identical to the in-file form).
pub fn parse_matrix_literal(text: &str) -> Result<[Complex64; 4], ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let m = parser.matrix2()?;
    parser.expect_end()?;
    Ok(m)
}

/// Parse a standalone angle: a decimal or the literal "pi".
pub fn parse_angle_literal(text: &str) -> Result<f64, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let a = parser.angle()?;
    parser.expect_end()?;
    Ok(a)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let token = self.peek().clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn error_here(&self, expected: &[&str]) -> ParseError {
        let token = self.peek();
        ParseError {
            line: token.line,
            column: token.column,
            message: format!("unexpected {}", token.kind.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<(), ParseError> {
        match &self.peek().kind {
            TokenKind::Word(w) if w == keyword => {
                self.advance();
                Ok(())
            }
            _ => Err(self.error_here(&[keyword])),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match &self.peek().kind {
            TokenKind::Word(w) => {
                let w = w.clone();
                self.advance();
                Ok(w)
            }
            _ => Err(self.error_here(&[what])),
        }
    }

    fn expect_newline_or_eof(&mut self) -> Result<(), ParseError> {
        match self.peek().kind {
            TokenKind::Newline => {
                self.advance();
                Ok(())
            }
            TokenKind::Eof => Ok(()),
            _ => Err(self.error_here(&["end of line"])),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.peek().kind == TokenKind::Newline {
            self.advance();
        }
        match self.peek().kind {
            TokenKind::Eof => Ok(()),
            _ => Err(self.error_here(&["end of input"])),
        }
    }

    fn scenario(&mut self) -> Result<ScenarioAst, ParseError> {
        self.expect_keyword("scenario")?;
        let name = match &self.peek().kind {
            TokenKind::Str(s) => {
                let s = s.clone();
                self.advance();
                s
            }
            _ => return Err(self.error_here(&["quoted scenario name"])),
        };
        match self.peek().kind {
            TokenKind::Newline => {
                self.advance();
            }
            _ => return Err(self.error_here(&["end of line"])),
        }

        let mut declarations = Vec::new();
        while self.peek().kind != TokenKind::Eof {
            declarations.push(self.declaration()?);
            self.expect_newline_or_eof()?;
        }
        if declarations.is_empty() {
            return Err(self.error_here(&DECL_KEYWORDS));
        }
        Ok(ScenarioAst { name, declarations })
    }

    fn declaration(&mut self) -> Result<Spanned<Decl>, ParseError> {
        let token = self.peek().clone();
        let TokenKind::Word(keyword) = &token.kind else {
            return Err(self.error_here(&DECL_KEYWORDS));
        };
        let node = match keyword.as_str() {
            "telegraph" => {
                self.advance();
                let name = self.expect_ident("telegraph name")?;
                self.expect_keyword("active")?;
                let active = self.angle()?;
                self.expect_keyword("passive")?;
                let passive = self.angle()?;
                Decl::Telegraph {
                    name,
                    active,
                    passive,
                }
            }
            "mirror" => {
                self.advance();
                let name = self.expect_ident("mirror name")?;
                let gate = if matches!(&self.peek().kind, TokenKind::Word(w) if w == "gate") {
                    self.advance();
                    Some(self.expect_ident("gate name")?)
                } else {
                    None
                };
                Decl::Mirror { name, gate }
            }
            "agent" => {
                self.advance();
                self.expect_keyword("policy")?;
                let policy = match &self.peek().kind {
                    TokenKind::Word(w) => {
                        let w = w.clone();
                        self.advance();
                        PolicySpec::Named(w)
                    }
                    TokenKind::LBracket => PolicySpec::Matrix(self.matrix2()?),
                    _ => return Err(self.error_here(&["gate name", "\"[\""])),
                };
                Decl::Agent { policy }
            }
            "order" => {
                self.advance();
                let mut events = vec![self.expect_ident("event label")?];
                if self.peek().kind != TokenKind::Less {
                    return Err(self.error_here(&["\"<\""]));
                }
                while self.peek().kind == TokenKind::Less {
                    self.advance();
                    events.push(self.expect_ident("event label")?);
                }
                Decl::Order { events }
            }
            "shots" => {
                self.advance();
                let count = self.integer()?;
                Decl::Shots { count }
            }
            _ => return Err(self.error_here(&DECL_KEYWORDS)),
        };
        Ok(Spanned {
            node,
            line: token.line,
            column: token.column,
        })
    }

    fn angle(&mut self) -> Result<f64, ParseError> {
        match &self.peek().kind {
            TokenKind::Word(w) if w == "pi" => {
                self.advance();
                Ok(std::f64::consts::PI)
            }
            TokenKind::Minus => {
                self.advance();
                match &self.peek().kind {
                    TokenKind::Number { value, .. } => {
                        let v = *value;
                        self.advance();
                        Ok(-v)
                    }
                    _ => Err(self.error_here(&["number"])),
                }
            }
            TokenKind::Number { value, .. } => {
                let v = *value;
                self.advance();
                Ok(v)
            }
            _ => Err(self.error_here(&["number", "\"pi\""])),
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        match &self.peek().kind {
            TokenKind::Number { text, .. } if text.bytes().all(|b| b.is_ascii_digit()) => {
                let parsed = text.parse::<u64>().map_err(|_| ParseError {
                    line: self.peek().line,
                    column: self.peek().column,
                    message: format!("integer {text} out of range"),
                    expected: vec!["integer".to_string()],
                })?;
                self.advance();
                Ok(parsed)
            }
            _ => Err(self.error_here(&["integer"])),
        }
    }

    fn matrix2(&mut self) -> Result<[Complex64; 4], ParseError> {
        self.expect_token(TokenKind::LBracket, "\"[\"")?;
        let a = self.complex()?;
        self.expect_token(TokenKind::Comma, "\",\"")?;
        let b = self.complex()?;
        self.expect_token(TokenKind::Semicolon, "\";\"")?;
        let c = self.complex()?;
        self.expect_token(TokenKind::Comma, "\",\"")?;
        let d = self.complex()?;
        self.expect_token(TokenKind::RBracket, "\"]\"")?;
        Ok([a, b, c, d])
    }

    fn expect_token(&mut self, kind: TokenKind, name: &str) -> Result<(), ParseError> {
        if self.peek().kind == kind {
            self.advance();
            Ok(())
        } else {
            Err(self.error_here(&[name]))
        }
    }

    /// One complex literal: a real part, an imaginary part, or both
    /// (imaginary second, sign required, "i" suffix).
    fn complex(&mut self) -> Result<Complex64, ParseError> {
        let sign = match self.peek().kind {
            TokenKind::Minus => {
                self.advance();
                -1.0
            }
            TokenKind::Plus => {
                self.advance();
                1.0
            }
            _ => 1.0,
        };
        let first = match &self.peek().kind {
            TokenKind::Number { value, .. } => {
                let v = sign * *value;
                self.advance();
                v
            }
            _ => return Err(self.error_here(&["number"])),
        };
        // "i" immediately after the number makes the first term imaginary.
        if matches!(&self.peek().kind, TokenKind::Word(w) if w == "i") {
            self.advance();
            return Ok(Complex64::new(0.0, first));
        }
        // Optional imaginary tail: sign, number, "i".
        let tail_sign = match self.peek().kind {
            TokenKind::Plus => 1.0,
            TokenKind::Minus => -1.0,
            _ => return Ok(Complex64::new(first, 0.0)),
        };
        self.advance();
        let im = match &self.peek().kind {
            TokenKind::Number { value, .. } => {
                let v = tail_sign * *value;
                self.advance();
                v
            }
            _ => return Err(self.error_here(&["number"])),
        };
        match &self.peek().kind {
            TokenKind::Word(w) if w == "i" => {
                self.advance();
                Ok(Complex64::new(first, im))
            }
            _ => Err(self.error_here(&["\"i\""])),
        }
    }
}
