//! Recursive-descent parser for the field grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | x1..x4 | r2 | pi | func '(' expr ')' | 'pow' '(' expr ',' expr ')' | '(' expr ')'
//! func    := exp | ln | sin | cos | sqrt
//! ```

use super::expr::{raw, ScalarField};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| ParseError { column: col, message: format!("malformed number '{text}'") })?;
            out.push((Tok::Num(v), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(ParseError { column: col, message: format!("unexpected character '{c}'") });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { column: self.col(), message: message.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<ScalarField, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = raw::add(lhs, self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = raw::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarField, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = raw::mul(lhs, self.unary()?);
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = raw::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarField, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(raw::neg(self.unary()?));
        }
        let base = self.primary()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let e = self.unary()?;
            return Ok(raw::pow(base, e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ScalarField, ParseError> {
        let col = self.col();
        match self.bump() {
            Tok::Num(v) => Ok(ScalarField::constant(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "r2" => Ok(ScalarField::r2()),
                "pi" => Ok(ScalarField::constant(std::f64::consts::PI)),
                "exp" | "ln" | "sin" | "cos" | "sqrt" => {
                    self.expect('(')?;
                    let a = self.expr()?;
                    self.expect(')')?;
                    Ok(raw::func(&name, a))
                }
                "pow" => {
                    self.expect('(')?;
                    let a = self.expr()?;
                    self.expect(',')?;
                    let b = self.expr()?;
                    self.expect(')')?;
                    Ok(raw::pow(a, b))
                }
                _ => match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    Some(k) if (1..=4).contains(&k) => Ok(ScalarField::coord(k - 1)),
                    _ => Err(ParseError { column: col, message: format!("unknown identifier '{name}'") }),
                },
            },
            Tok::End => Err(ParseError { column: col, message: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(ParseError { column: col, message: format!("unexpected '{c}'") }),
        }
    }
}

/// Parse a field expression such as `"0.5*r2 + sin(x1)"`.
pub fn parse_field(src: &str) -> Result<ScalarField, ParseError> {
    let mut lx = Lexer { toks: lex(src)?, pos: 0 };
    let e = lx.expr()?;
    if *lx.peek() != Tok::End {
        return lx.err("trailing input");
    }
    Ok(e)
}

impl std::str::FromStr for ScalarField {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_field(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(s: &str, x: &[f64]) -> f64 {
        parse_field(s).unwrap().value(x).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("1 + 2*3", &[]), 7.0);
        assert_eq!(eval("-2^2", &[]), -4.0);
        assert_eq!(eval("2^3^2", &[]), 512.0);
        assert_eq!(eval("8/2/2", &[]), 2.0);
        assert_eq!(eval("x1*x2 - r2/2", &[2.0, 5.0]), 10.0 - 14.5);
        assert_eq!(eval("pow(x1, 2) + 1e-1", &[3.0]), 9.1);
    }

    #[test]
    fn rejects_unknown_identifier() {
        let e = parse_field("1 + y").unwrap_err();
        assert_eq!(e.column, 5);
        assert!(parse_field("x5").is_err());
        assert!(parse_field("sin x1").is_err());
        assert!(parse_field("(x1").is_err());
        assert!(parse_field("x1 x2").is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["0.1*x1 - exp(-r2/4)", "pow(x2, x1) + sqrt(2)", "-x3 / (1 + ln(x1))"] {
            let f = parse_field(s).unwrap();
            let g = parse_field(&f.to_string()).unwrap();
            assert_eq!(f, g, "{s}");
        }
    }
}
