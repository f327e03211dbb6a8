//! Lexer and recursive-descent parser for the expression grammar.
//!
//! Precedence, loosest to tightest: `+ -`, `* /`, unary minus, `^`
//! (right-associative). The exponent of `^` is parsed at unary level so
//! `2^-x` works, and `-x^2` is `-(x^2)`.

use super::{BinaryOp, Expr, Function, NamedConstant};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number `{v}`"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn tokens(mut self) -> Result<Vec<(Token, usize)>> {
        let mut out = Vec::new();
        loop {
            self.skip_whitespace();
            let start = self.pos;
            let Some(&b) = self.bytes.get(self.pos) else {
                out.push((Token::End, start));
                return Ok(out);
            };
            let token = match b {
                b'+' => {
                    self.pos += 1;
                    Token::Plus
                }
                b'-' => {
                    self.pos += 1;
                    Token::Minus
                }
                b'*' => {
                    self.pos += 1;
                    Token::Star
                }
                b'/' => {
                    self.pos += 1;
                    Token::Slash
                }
                b'^' => {
                    self.pos += 1;
                    Token::Caret
                }
                b'(' => {
                    self.pos += 1;
                    Token::LParen
                }
                b')' => {
                    self.pos += 1;
                    Token::RParen
                }
                b'0'..=b'9' | b'.' => self.lex_number(start)?,
                b if b.is_ascii_alphabetic() || b == b'_' => self.lex_ident(),
                other => {
                    return Err(Error::Syntax {
                        offset: start,
                        message: format!("unexpected character `{}`", other as char),
                    })
                }
            };
            out.push((token, start));
        }
    }

    fn skip_whitespace(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn lex_number(&mut self, start: usize) -> Result<Token> {
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
        }
        // Exponent part only when followed by digits (with optional sign);
        // otherwise the `e` stays an identifier (the Euler constant).
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let mut probe = self.pos + 1;
            if matches!(self.bytes.get(probe), Some(b'+' | b'-')) {
                probe += 1;
            }
            if self.bytes.get(probe).is_some_and(u8::is_ascii_digit) {
                probe += 1;
                while self.bytes.get(probe).is_some_and(u8::is_ascii_digit) {
                    probe += 1;
                }
                self.pos = probe;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Token::Number).map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }

    fn lex_ident(&mut self) -> Token {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        Token::Ident(text.to_string())
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    index: usize,
    variable: Option<String>,
}

pub(super) fn parse(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".to_string(),
        });
    }
    let tokens = Lexer::new(text).tokens()?;
    let mut parser = Parser {
        tokens,
        index: 0,
        variable: None,
    };
    let expr = parser.expression()?;
    let (token, offset) = parser.peek();
    if token != &Token::End {
        return Err(Error::Syntax {
            offset,
            message: format!("unexpected {}", token.describe()),
        });
    }
    Ok(expr)
}

impl Parser {
    fn peek(&self) -> (&Token, usize) {
        let (t, o) = &self.tokens[self.index];
        (t, *o)
    }

    fn advance(&mut self) -> (Token, usize) {
        let entry = self.tokens[self.index].clone();
        if self.index + 1 < self.tokens.len() {
            self.index += 1;
        }
        entry
    }

    fn expression(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().0 {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().0 {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().0 == &Token::Minus {
            self.advance();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().0 == &Token::Caret {
            self.advance();
            // Exponent at unary level: right-associative, allows `2^-x`.
            let exponent = self.unary()?;
            return Ok(Expr::Binary {
                op: BinaryOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let (token, offset) = self.advance();
        match token {
            Token::Number(v) => Ok(Expr::Number(v)),
            Token::LParen => {
                let inner = self.expression()?;
                let (next, off) = self.advance();
                if next != Token::RParen {
                    return Err(Error::Syntax {
                        offset: off,
                        message: format!("expected `)`, found {}", next.describe()),
                    });
                }
                Ok(inner)
            }
            Token::Ident(name) => self.ident(name, offset),
            other => Err(Error::Syntax {
                offset,
                message: format!("expected a value, found {}", other.describe()),
            }),
        }
    }

    fn ident(&mut self, name: String, offset: usize) -> Result<Expr> {
        if self.peek().0 == &Token::LParen {
            let Some(func) = Function::from_name(&name) else {
                return Err(Error::UnknownIdentifier { name, offset });
            };
            self.advance(); // consume `(`
            let arg = self.expression()?;
            let (next, off) = self.advance();
            if next != Token::RParen {
                return Err(Error::Syntax {
                    offset: off,
                    message: format!("expected `)`, found {}", next.describe()),
                });
            }
            return Ok(Expr::Call {
                func,
                arg: Box::new(arg),
            });
        }
        if Function::from_name(&name).is_some() {
            return Err(Error::Syntax {
                offset,
                message: format!("function `{name}` must be called with parentheses"),
            });
        }
        match name.as_str() {
            "pi" => Ok(Expr::Constant(NamedConstant::Pi)),
            "e" => Ok(Expr::Constant(NamedConstant::E)),
            _ => {
                match &self.variable {
                    None => {
                        self.variable = Some(name.clone());
                        Ok(Expr::Variable(name))
                    }
                    Some(existing) if *existing == name => Ok(Expr::Variable(name)),
                    Some(_) => Err(Error::UnknownIdentifier { name, offset }),
                }
            }
        }
    }
}
