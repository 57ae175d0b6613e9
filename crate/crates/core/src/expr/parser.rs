//! Recursive-descent parser for rational map expressions in `z`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-'? atom ('^' uint)*
//! atom   := 'z' | number | '(' expr ')'
//! number := decimal with optional 'i' suffix
//! ```
//!
//! A number directly followed by `z` or `(` is an implicit product, so
//! `16z^2` reads as `16 * z^2`. Repeated `^` associates to the right.

use num_complex::Complex64;

use crate::error::ParseError;

const MAX_EXPONENT: u64 = 64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Z,
    Num { value: Complex64, integer: Option<u64> },
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Z => "'z'".into(),
            Tok::Num { value, .. } => format!("number {value}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let start = i;
        let tok = match ch {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            'z' | 'Z' => Tok::Z,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            'i' => Tok::Num {
                value: Complex64::new(0.0, 1.0),
                integer: None,
            },
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                // optional exponent part, e.g. 1e-3
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lexeme: String = chars[i..j].iter().collect();
                let value: f64 = lexeme.parse().map_err(|_| ParseError::Syntax {
                    position: start,
                    expected: "a number".into(),
                    found: format!("'{lexeme}'"),
                })?;
                let imaginary = j < chars.len() && chars[j] == 'i';
                let integer = if !imaginary && lexeme.chars().all(|c| c.is_ascii_digit()) {
                    lexeme.parse::<u64>().ok()
                } else {
                    None
                };
                i = if imaginary { j + 1 } else { j };
                out.push((
                    start,
                    Tok::Num {
                        value: if imaginary {
                            Complex64::new(0.0, value)
                        } else {
                            Complex64::new(value, 0.0)
                        },
                        integer,
                    },
                ));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    position: start,
                    expected: "a term".into(),
                    found: format!("'{other}'"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

/// Abstract syntax tree of a map expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var,
    Const(Complex64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Direct interpretation at a finite point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Expr::Var => z,
            Expr::Const(c) => *c,
            Expr::Neg(a) => -a.eval(z),
            Expr::Add(a, b) => a.eval(z) + b.eval(z),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Mul(a, b) => a.eval(z) * b.eval(z),
            Expr::Div(a, b) => a.eval(z) / b.eval(z),
            Expr::Pow(a, e) => a.eval(z).powu(*e),
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn position(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.position(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                // implicit product after a numeric literal: 16z, 2(z+1)
                Tok::Z | Tok::LParen if self.previous_was_number() => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn previous_was_number(&self) -> bool {
        self.pos > 0 && matches!(self.toks[self.pos - 1].1, Tok::Num { .. })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let negate = if matches!(self.peek(), Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let base = self.atom()?;
        let mut exps = Vec::new();
        while matches!(self.peek(), Tok::Caret) {
            self.bump();
            exps.push(self.exponent()?);
        }
        // right-associative: a^b^c = a^(b^c)
        let e = exps
            .into_iter()
            .rev()
            .try_fold(None::<u64>, |acc, e| match acc {
                None => Ok(Some(e)),
                Some(inner) => e
                    .checked_pow(inner.min(u32::MAX as u64) as u32)
                    .filter(|v| *v <= MAX_EXPONENT)
                    .map(Some)
                    .ok_or_else(|| self.error("an exponent of at most 64")),
            })?;
        let node = match e {
            Some(e) => Expr::Pow(Box::new(base), e as u32),
            None => base,
        };
        Ok(if negate { Expr::Neg(Box::new(node)) } else { node })
    }

    fn exponent(&mut self) -> Result<u64, ParseError> {
        let position = self.position();
        match self.peek().clone() {
            Tok::Num {
                integer: Some(n), ..
            } => {
                if n > MAX_EXPONENT {
                    return Err(self.error("an exponent of at most 64"));
                }
                self.bump();
                Ok(n)
            }
            Tok::Num { .. } | Tok::Minus => Err(ParseError::NonIntegerExponent { position }),
            _ => Err(self.error("a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Z => {
                self.bump();
                Ok(Expr::Var)
            }
            Tok::Num { value, .. } => {
                self.bump();
                Ok(Expr::Const(value))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if !matches!(self.peek(), Tok::RParen) {
                    return Err(self.error("')'"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error("'z', a number or '('")),
        }
    }
}

/// Parses an expression into its syntax tree.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if !matches!(p.peek(), Tok::End) {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}
