//! Recursive-descent parser for the expression DSL.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;

use super::{Func, Node};
use crate::error::{Error, Result};

pub fn parse(text: &str, allowed_vars: &[&str]) -> Result<Node> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            offset: 0,
            message: String::from("empty expression"),
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars: allowed_vars,
    };
    let node = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(Error::Parse {
            offset: p.pos,
            message: format!("unexpected `{}`", p.peek_char()),
        });
    }
    Ok(node)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn peek_char(&self) -> char {
        self.src.get(self.pos).map(|b| *b as char).unwrap_or('\0')
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err_here(&self, message: String) -> Error {
        Error::Parse {
            offset: self.pos,
            message,
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Node::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Node::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Node::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Node::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            Ok(Node::Neg(Box::new(inner)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.exponent_chain()?;
            Ok(Node::Pow(Box::new(base), n))
        } else {
            Ok(base)
        }
    }

    /// Integer exponent; `a^b^c` folds right-associatively on the integer
    /// literals (`b^c` is computed in integer arithmetic).
    fn exponent_chain(&mut self) -> Result<i32> {
        let n = self.int_literal()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let m = self.exponent_chain()?;
            if m < 0 {
                return Err(self.err_here(String::from(
                    "negative exponent in exponent chain requires parentheses",
                )));
            }
            n.checked_pow(m as u32)
                .ok_or_else(|| self.err_here(String::from("exponent overflow")))
        } else {
            Ok(n)
        }
    }

    fn int_literal(&mut self) -> Result<i32> {
        self.skip_ws();
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err_here(String::from("expected integer exponent")));
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: i32 = digits
            .parse()
            .map_err(|_| self.err_here(String::from("integer exponent out of range")))?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.err_here(String::from("unexpected end of input"))),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err_here(String::from("expected `)`")));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(c) => Err(self.err_here(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len()
                && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            let dstart = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == dstart {
                // Not an exponent after all (e.g. a name follows); back off.
                self.pos = mark;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| Error::Parse {
            offset: start,
            message: format!("invalid number literal `{text}`"),
        })?;
        Ok(Node::Num(v))
    }

    fn name(&mut self) -> Result<Node> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && ((self.src[self.pos] as char).is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(func) = Func::from_name(name) {
            if !self.eat(b'(') {
                return Err(self.err_here(format!("expected `(` after function `{name}`")));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err_here(String::from("expected `)`")));
            }
            return Ok(Node::Fun(func, Box::new(arg)));
        }
        if self.peek() == Some(b'(') {
            return Err(Error::Parse {
                offset: start,
                message: format!("unknown function `{name}`"),
            });
        }
        match self.vars.iter().position(|v| *v == name) {
            Some(i) => Ok(Node::Var(i)),
            None => Err(Error::UnknownVariable {
                name: String::from(name),
                offset: start,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::Expr;
    use super::*;

    #[test]
    fn precedence_and_tree_shape() {
        let e = Expr::parse("x2^2 + x3^2", &["x0", "x1", "x2", "x3"]).unwrap();
        match e.node() {
            Node::Add(a, b) => {
                assert!(matches!(**a, Node::Pow(ref base, 2) if matches!(**base, Node::Var(2))));
                assert!(matches!(**b, Node::Pow(ref base, 2) if matches!(**base, Node::Var(3))));
            }
            other => panic!("unexpected tree {other:?}"),
        }
    }

    #[test]
    fn sqrt_function_parses() {
        let e = Expr::parse("sqrt(x2^2+x3^2)", &["x2", "x3"]).unwrap();
        assert!(matches!(e.node(), Node::Fun(Func::Sqrt, _)));
    }

    #[test]
    fn trailing_operator_reports_offset() {
        let err = Expr::parse("x2 + ", &["x2"]).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                offset: 5,
                message: String::from("unexpected end of input")
            }
        );
    }

    #[test]
    fn unknown_variable_named() {
        let err = Expr::parse("x2 + y", &["x2"]).unwrap_err();
        match err {
            Error::UnknownVariable { name, offset } => {
                assert_eq!(name, "y");
                assert_eq!(offset, 5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        // -x^2 must parse as -(x^2)
        let e = Expr::parse("-x^2", &["x"]).unwrap();
        assert_eq!(e.eval(&[3.0]).unwrap(), -9.0);
    }

    #[test]
    fn left_assoc_sub_and_div() {
        let e = Expr::parse("8 - 3 - 2", &[]).unwrap();
        assert_eq!(e.eval(&[]).unwrap(), 3.0);
        let e = Expr::parse("8 / 2 / 2", &[]).unwrap();
        assert_eq!(e.eval(&[]).unwrap(), 2.0);
    }

    #[test]
    fn right_assoc_exponent_chain() {
        let e = Expr::parse("x^2^3", &["x"]).unwrap();
        assert!(matches!(e.node(), Node::Pow(_, 8)));
    }

    #[test]
    fn negative_exponent() {
        let e = Expr::parse("x^-2", &["x"]).unwrap();
        assert_eq!(e.eval(&[2.0]).unwrap(), 0.25);
    }

    #[test]
    fn scientific_literals() {
        let e = Expr::parse("1.5e-3 + 2E2", &[]).unwrap();
        assert_eq!(e.eval(&[]).unwrap(), 0.0015 + 200.0);
    }

    #[test]
    fn unknown_function_rejected() {
        let err = Expr::parse("foo(x)", &["x"]).unwrap_err();
        assert!(matches!(err, Error::Parse { offset: 0, .. }));
    }

    #[test]
    fn empty_input_rejected() {
        assert!(Expr::parse("   ", &[]).is_err());
    }
}
