//! Recursive-descent parser for chart component expressions.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          right-associative
//! atom  := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus on its left, so `-y^2` is `-(y^2)`,
//! while `2^-x` is accepted.

use thiserror::Error;

use crate::expr::{Func, Node, ScalarField};

/// Nesting limit counting parentheses, function arguments, unary minus and
/// exponents.
const MAX_DEPTH: usize = 200;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::UnknownFunction { offset, .. } => *offset,
        }
    }
}

pub fn parse_expression(src: &str, coords: &[String]) -> Result<ScalarField, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        coords,
        depth: 0,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.syntax("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [String],
    depth: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.syntax("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<ScalarField, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ScalarField::new(if c == b'+' { Node::Add(lhs, rhs) } else { Node::Sub(lhs, rhs) });
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ScalarField, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = ScalarField::new(if c == b'*' { Node::Mul(lhs, rhs) } else { Node::Div(lhs, rhs) });
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ScalarField, ParseError> {
        if self.peek() != Some(b'-') {
            return self.power();
        }
        self.pos += 1;
        self.enter()?;
        let out = ScalarField::new(Node::Neg(self.unary()?));
        self.depth -= 1;
        Ok(out)
    }

    fn power(&mut self) -> Result<ScalarField, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.enter()?;
        let exponent = self.unary()?;
        self.depth -= 1;
        Ok(ScalarField::new(Node::Pow(base, exponent)))
    }

    fn atom(&mut self) -> Result<ScalarField, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<ScalarField, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut mantissa = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            mantissa += digits(self);
        }
        if mantissa == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.syntax("malformed exponent"));
            }
        }
        // the slice is ASCII by construction
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(ScalarField::constant(v)),
            _ => Err(ParseError::Syntax {
                offset: start,
                message: format!("number `{text}` is not a finite value"),
            }),
        }
    }

    fn ident(&mut self) -> Result<ScalarField, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("").to_string();
        if self.peek() == Some(b'(') {
            let Some(func) = Func::from_name(&name) else {
                return Err(ParseError::UnknownFunction { name, offset: start });
            };
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.syntax("expected `)`"));
            }
            self.pos += 1;
            return Ok(arg.apply(func));
        }
        match self.coords.iter().position(|c| *c == name) {
            Some(i) => Ok(ScalarField::coord(i)),
            None => Err(ParseError::UnknownIdentifier { name, offset: start }),
        }
    }
}

/// Valid coordinate name: an identifier that is not a function name.
pub fn is_valid_coordinate_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && Func::from_name(name).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Vec<String> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_function_application() {
        let e = parse_expression("exp(2*z)", &xyz()).unwrap();
        let want = (ScalarField::constant(2.0) * ScalarField::coord(2)).exp();
        assert_eq!(e, want);
    }

    #[test]
    fn differential_notation_is_rejected() {
        assert_eq!(
            parse_expression("dz - y*dx", &xyz()),
            Err(ParseError::UnknownIdentifier {
                name: "dz".into(),
                offset: 0
            })
        );
    }

    #[test]
    fn power_binds_tighter_than_minus() {
        let e = parse_expression("-y^2", &xyz()).unwrap();
        assert_eq!(e.eval(&[0.0, 3.0, 0.0]).unwrap(), -9.0);
        let e = parse_expression("2^-1 + 2^3^2", &xyz()).unwrap();
        assert_eq!(e.eval(&[0.0; 3]).unwrap(), 0.5 + 512.0);
    }

    #[test]
    fn error_paths() {
        let c = xyz();
        assert!(matches!(parse_expression("", &c), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expression("x +", &c), Err(ParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_expression("(x", &c), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expression("1e999", &c), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expression("0x1p3", &c), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_expression("foo(x)", &c),
            Err(ParseError::UnknownFunction { offset: 0, .. })
        ));
        assert!(parse_expression(&"(".repeat(5000), &c).is_err());
        assert!(parse_expression(&"-".repeat(5000), &c).is_err());
    }

    #[test]
    fn numbers() {
        let c = xyz();
        for (s, v) in [("2", 2.0), ("0.25", 0.25), (".5", 0.5), ("3.", 3.0), ("1e-3", 1e-3), ("2.5E+2", 250.0)] {
            assert_eq!(parse_expression(s, &c).unwrap().eval(&[0.0; 3]).unwrap(), v, "{s}");
        }
    }

    #[test]
    fn print_then_reparse() {
        let c = xyz();
        for s in ["exp(z - y*x)*(x + y)", "-y^2", "(-y)^2", "x - (y - z)", "x^(-2)", "(x^y)^z", "x/(y*z)", "-(x + 1)", "x*-y", "1.5e-7*sqrt(x)"] {
            let e = parse_expression(s, &c).unwrap();
            let printed = e.display_with(&c).to_string();
            assert_eq!(parse_expression(&printed, &c).unwrap(), e, "{s} -> {printed}");
        }
    }
}
