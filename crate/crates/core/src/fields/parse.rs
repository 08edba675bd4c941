//! Recursive-descent parser for field expressions.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)?
//! exponent := ['-'] integer | '(' ['-'] integer ')'
//! primary  := number | 'x1'..'x4' | name | func '(' expr ')'
//!           | 'lin_inv' '(' literal ',' literal ',' literal ')' | '(' expr ')'
//! ```
//!
//! Unary minus applied directly to a numeric constant folds into the
//! constant; everything else is kept verbatim so printing and re-parsing
//! reproduces the same tree.

use std::collections::HashMap;

use super::expr::{Func, Node, ScalarField};
use crate::error::ParseError;

/// Named sub-expressions that identifiers may refer to.
pub type Bindings = HashMap<String, ScalarField>;

/// Parses `src` as a field on `dim` coordinates (`4`: x1..x4, `2`: x3, x4).
pub fn parse_field(src: &str, dim: usize) -> Result<ScalarField, ParseError> {
    parse_field_with(src, dim, &Bindings::new())
}

pub fn parse_field_with(src: &str, dim: usize, bindings: &Bindings) -> Result<ScalarField, ParseError> {
    assert!(dim == 2 || dim == 4, "dimension must be 2 or 4");
    let mut parser = Parser { src: src.as_bytes(), pos: 0, dim, bindings };
    let field = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(field)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
    bindings: &'a Bindings,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax { offset: self.pos, message: message.to_string() }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ScalarField, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = ScalarField::from_node(Node::Add(lhs, rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = ScalarField::from_node(Node::Sub(lhs, rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ScalarField, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                lhs = ScalarField::from_node(Node::Mul(lhs, rhs));
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                lhs = ScalarField::from_node(Node::Div(lhs, rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarField, ParseError> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(match inner.as_const() {
                Some(c) => ScalarField::constant(-c),
                None => ScalarField::from_node(Node::Neg(inner)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<ScalarField, ParseError> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let paren = self.eat(b'(');
        let exponent = self.integer()?;
        if paren {
            self.expect(b')')?;
        }
        Ok(ScalarField::from_node(Node::Pow(base, exponent)))
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(self.error("expected integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<i32>()
            .map_err(|_| ParseError::Syntax { offset: start, message: "exponent out of range".to_string() })
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.error("expected number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark + 1;
                return Err(self.error("expected exponent digits"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        text.parse::<f64>()
            .map_err(|_| ParseError::Syntax { offset: start, message: format!("invalid number `{text}`") })
    }

    fn signed_literal(&mut self) -> Result<f64, ParseError> {
        let negative = self.eat(b'-');
        let v = self.number()?;
        Ok(if negative { -v } else { v })
    }

    fn identifier(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {}
            _ => return None,
        }
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        Some((start, String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()))
    }

    fn primary(&mut self) -> Result<ScalarField, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(ScalarField::constant(self.number()?)),
            Some(_) => {
                let Some((offset, name)) = self.identifier() else {
                    return Err(self.error("unexpected character"));
                };
                self.named(offset, &name)
            }
        }
    }

    fn named(&mut self, offset: usize, name: &str) -> Result<ScalarField, ParseError> {
        if let Some(k) = coordinate_index(name) {
            let allowed = self.dim == 4 || k >= 3;
            if !allowed {
                return Err(ParseError::CoordinateNotAllowed { coord: k, dim: self.dim, offset });
            }
            return Ok(ScalarField::from_node(Node::Coord(k)));
        }
        if let Some(f) = Func::from_name(name) {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(ScalarField::from_node(Node::Func(f, arg)));
        }
        if name == "lin_inv" {
            self.expect(b'(')?;
            let a0 = self.signed_literal()?;
            self.expect(b',')?;
            let a3 = self.signed_literal()?;
            self.expect(b',')?;
            let a4 = self.signed_literal()?;
            self.expect(b')')?;
            return Ok(ScalarField::lin_inv(a0, a3, a4));
        }
        if let Some(bound) = self.bindings.get(name) {
            if self.dim == 2 {
                if let Some(&k) = bound.coordinates().iter().find(|&&k| k < 3) {
                    return Err(ParseError::CoordinateNotAllowed { coord: k, dim: 2, offset });
                }
            }
            return Ok(bound.clone());
        }
        Err(ParseError::UnknownIdentifier { name: name.to_string(), offset })
    }
}

fn coordinate_index(name: &str) -> Option<u8> {
    match name {
        "x1" => Some(1),
        "x2" => Some(2),
        "x3" => Some(3),
        "x4" => Some(4),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Point;

    fn x(k: u8) -> ScalarField {
        ScalarField::coord(k)
    }

    #[test]
    fn zero_literal() {
        assert!(parse_field("0", 4).unwrap().is_zero());
    }

    #[test]
    fn dangling_power_reports_offset() {
        let err = parse_field("x1^", 4).unwrap_err();
        assert_eq!(err.offset(), 3, "{err}");
    }

    #[test]
    fn precedence() {
        let p = Point([2.0, 3.0, 0.0, 0.0]);
        let eval = |s: &str| parse_field(s, 4).unwrap().eval(&p).unwrap();
        assert_eq!(eval("-x1^2"), -4.0);
        assert_eq!(eval("x1 + x2 * x1"), 8.0);
        assert_eq!(eval("x2 - x1 - x1"), -1.0);
        assert_eq!(eval("x2 / x1 / x1"), 0.75);
        assert_eq!(eval("2 * -x1"), -4.0);
        assert_eq!(eval("x1^-1"), 0.5);
        assert_eq!(eval("x1^(-2) * 4"), 1.0);
        assert_eq!(eval("1.5e1 + .5"), 15.5);
    }

    #[test]
    fn bound_sub_expressions() {
        let mut b = Bindings::new();
        b.insert("p".into(), parse_field("x3^2", 2).unwrap());
        b.insert("q".into(), parse_field("x4", 2).unwrap());
        let f = parse_field_with("x1*p + x2*q", 4, &b).unwrap();
        let jet = f.eval_jet2(&Point([1.0, 1.0, 2.0, 3.0])).unwrap();
        assert_eq!(jet.value, 7.0);
        assert_eq!(jet.grad, [4.0, 3.0, 4.0, 1.0]);
        // affine in (x1, x2)
        assert_eq!((jet.hess[0][0], jet.hess[0][1], jet.hess[1][1]), (0.0, 0.0, 0.0));
    }

    #[test]
    fn dimension_two_rejects_fiber_coordinates() {
        assert!(matches!(
            parse_field("x3 + x1", 2),
            Err(ParseError::CoordinateNotAllowed { coord: 1, dim: 2, offset: 5 })
        ));
        assert!(parse_field("sin(x3) * lin_inv(1, -2, 0.5)", 2).is_ok());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_field("y + 1", 4), Err(ParseError::UnknownIdentifier { offset: 0, .. })));
        assert!(parse_field("(x1 + 1", 4).is_err());
        assert!(parse_field("x1 x2", 4).is_err());
        assert!(parse_field("x1^2.5", 4).is_err());
        assert!(parse_field("lin_inv(1, x3, 0)", 4).is_err());
        assert!(parse_field("1e", 4).is_err());
        assert!(parse_field("", 4).is_err());
    }

    #[test]
    fn display_round_trip() {
        let trees = [
            x(1) * x(3) + ScalarField::constant(-2.5) * x(4).powi(-3),
            ScalarField::lin_inv(-1.0, 0.5, -3e-7).sin() / (x(2) - x(4)).exp(),
            -(x(3).ln()),
            ScalarField::constant(1e-12) * ScalarField::constant(1.5e30),
        ];
        for t in trees {
            let again = parse_field(&t.to_string(), 4).unwrap();
            assert_eq!(again, t, "{t}");
        }
    }
}
