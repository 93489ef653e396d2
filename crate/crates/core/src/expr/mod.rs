//! Closed-form scalar expression DSL.
//!
//! Expressions are parsed against a declared variable list; the AST stores
//! variable indices into that list. Trees are immutable after parsing and
//! evaluation is pure, so sharing them across threads is safe.
//!
//! Grammar (see `docs/expr-grammar.ebnf` in the repository root):
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = unary { ("*" | "/") unary } ;
//! unary  = "-" unary | power ;
//! power  = atom [ "^" exponent ] ;          (* right-assoc, integer exponent *)
//! atom   = number | name | name "(" expr ")" | "(" expr ")" ;
//! ```
//!
//! Precedence: `^` > unary minus > `*`,`/` > `+`,`-`; `+ - * /` associate
//! left, `^` right. Functions: `sqrt exp log sin cos abs`.

mod eval;
mod parse;

pub use eval::ExprDerivs;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Result;
use crate::jet::Jet;

/// Unary functions admitted by the DSL.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Abs,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// Abstract syntax tree of a parsed expression. `Var` holds an index into
/// the variable list the expression was parsed against.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Neg(Box<Node>),
    Fun(Func, Box<Node>),
}

/// A parsed expression together with the variable list it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    node: Node,
    vars: Vec<String>,
}

impl Expr {
    /// Parses `text` against the allowed variable names.
    pub fn parse(text: &str, allowed_vars: &[&str]) -> Result<Expr> {
        let node = parse::parse(text, allowed_vars)?;
        Ok(Expr {
            node,
            vars: allowed_vars.iter().map(|s| String::from(*s)).collect(),
        })
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of variables in the declared list (not necessarily used).
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// Plain evaluation at a point.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        eval::eval_f64(&self.node, point)
    }

    /// Evaluates to a [`Jet`]: coefficient `k` is the k-th raw directional
    /// derivative along `direction` at `point`.
    pub fn jet_eval(&self, point: &[f64], direction: &[f64], order: usize) -> Result<Jet> {
        eval::jet_eval(&self.node, point, direction, order)
    }

    /// Evaluates with jet-valued variable assignments (composition along a
    /// curve described by the argument jets).
    pub fn eval_jets(&self, args: &[Jet]) -> Result<Jet> {
        eval::eval_jets(&self.node, args)
    }

    /// Symmetric derivative tensors at `point` up to `order` (max 3),
    /// recovered by polarization over univariate jets.
    pub fn derivs(&self, point: &[f64], order: usize) -> Result<ExprDerivs> {
        ExprDerivs::build(self, point, order)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.node, &self.vars, 0)
    }
}

// Precedence levels for minimal parenthesisation on display.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn node_prec(n: &Node) -> u8 {
    match n {
        Node::Add(..) | Node::Sub(..) => PREC_ADD,
        Node::Mul(..) | Node::Div(..) => PREC_MUL,
        Node::Neg(..) => PREC_NEG,
        Node::Pow(..) => PREC_POW,
        Node::Num(v) if *v < 0.0 => PREC_NEG,
        _ => PREC_ATOM,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, n: &Node, vars: &[String], min_prec: u8) -> fmt::Result {
    let prec = node_prec(n);
    let parens = prec < min_prec;
    if parens {
        write!(f, "(")?;
    }
    match n {
        Node::Num(v) => write!(f, "{v}")?,
        Node::Var(i) => write!(f, "{}", vars[*i])?,
        Node::Add(a, b) => {
            write_node(f, a, vars, PREC_ADD)?;
            write!(f, " + ")?;
            write_node(f, b, vars, PREC_ADD + 1)?;
        }
        Node::Sub(a, b) => {
            write_node(f, a, vars, PREC_ADD)?;
            write!(f, " - ")?;
            write_node(f, b, vars, PREC_ADD + 1)?;
        }
        Node::Mul(a, b) => {
            write_node(f, a, vars, PREC_MUL)?;
            write!(f, "*")?;
            write_node(f, b, vars, PREC_MUL + 1)?;
        }
        Node::Div(a, b) => {
            write_node(f, a, vars, PREC_MUL)?;
            write!(f, "/")?;
            write_node(f, b, vars, PREC_MUL + 1)?;
        }
        Node::Pow(a, n) => {
            write_node(f, a, vars, PREC_ATOM)?;
            write!(f, "^{n}")?;
        }
        Node::Neg(a) => {
            write!(f, "-")?;
            write_node(f, a, vars, PREC_NEG)?;
        }
        Node::Fun(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a, vars, 0)?;
            write!(f, ")")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}
