//! Expression evaluation: plain, jet-valued, and symmetric derivative
//! tensors via polarization.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Expr, Func, Node};
use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use crate::math;

pub(super) fn eval_f64(node: &Node, point: &[f64]) -> Result<f64> {
    Ok(match node {
        Node::Num(v) => *v,
        Node::Var(i) => {
            if *i >= point.len() {
                return Err(Error::Invalid {
                    message: format!(
                        "evaluation point has {} coordinates, variable index {i} requested",
                        point.len()
                    ),
                });
            }
            point[*i]
        }
        Node::Add(a, b) => eval_f64(a, point)? + eval_f64(b, point)?,
        Node::Sub(a, b) => eval_f64(a, point)? - eval_f64(b, point)?,
        Node::Mul(a, b) => eval_f64(a, point)? * eval_f64(b, point)?,
        Node::Div(a, b) => {
            let d = eval_f64(b, point)?;
            if d == 0.0 {
                return Err(Error::DivisionByZero);
            }
            eval_f64(a, point)? / d
        }
        Node::Pow(a, n) => {
            let base = eval_f64(a, point)?;
            if base == 0.0 && *n < 0 {
                return Err(Error::DivisionByZero);
            }
            math::powi(base, *n)
        }
        Node::Neg(a) => -eval_f64(a, point)?,
        Node::Fun(func, a) => {
            let x = eval_f64(a, point)?;
            match func {
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(Error::Domain {
                            what: format!("sqrt of negative value {x}"),
                        });
                    }
                    math::sqrt(x)
                }
                Func::Exp => math::exp(x),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(Error::Domain {
                            what: format!("log of non-positive value {x}"),
                        });
                    }
                    math::ln(x)
                }
                Func::Sin => math::sin(x),
                Func::Cos => math::cos(x),
                Func::Abs => math::fabs(x),
            }
        }
    })
}

pub(super) fn eval_jets(node: &Node, args: &[Jet]) -> Result<Jet> {
    let order = args.iter().map(|j| j.order()).max().unwrap_or(0);
    eval_jets_inner(node, args, order)
}

fn eval_jets_inner(node: &Node, args: &[Jet], order: usize) -> Result<Jet> {
    Ok(match node {
        Node::Num(v) => Jet::constant(*v, order),
        Node::Var(i) => {
            if *i >= args.len() {
                return Err(Error::Invalid {
                    message: format!(
                        "{} jet arguments supplied, variable index {i} requested",
                        args.len()
                    ),
                });
            }
            args[*i]
        }
        Node::Add(a, b) => eval_jets_inner(a, args, order)?.add(&eval_jets_inner(b, args, order)?),
        Node::Sub(a, b) => eval_jets_inner(a, args, order)?.sub(&eval_jets_inner(b, args, order)?),
        Node::Mul(a, b) => eval_jets_inner(a, args, order)?.mul(&eval_jets_inner(b, args, order)?),
        Node::Div(a, b) => {
            eval_jets_inner(a, args, order)?.div(&eval_jets_inner(b, args, order)?)?
        }
        Node::Pow(a, n) => eval_jets_inner(a, args, order)?.powi(*n)?,
        Node::Neg(a) => eval_jets_inner(a, args, order)?.neg(),
        Node::Fun(func, a) => {
            let x = eval_jets_inner(a, args, order)?;
            match func {
                Func::Sqrt => x.sqrt()?,
                Func::Exp => x.exp(),
                Func::Log => x.ln()?,
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Abs => x.abs()?,
            }
        }
    })
}

pub(super) fn jet_eval(node: &Node, point: &[f64], direction: &[f64], order: usize) -> Result<Jet> {
    if order > MAX_ORDER {
        return Err(Error::JetOrder {
            requested: order,
            max: MAX_ORDER,
        });
    }
    if point.len() != direction.len() {
        return Err(Error::Invalid {
            message: format!(
                "point has {} coordinates but direction has {}",
                point.len(),
                direction.len()
            ),
        });
    }
    let args: Vec<Jet> = point
        .iter()
        .zip(direction)
        .map(|(p, d)| Jet::variable(*p, *d, order))
        .collect();
    eval_jets_inner(node, &args, order)
}

/// Symmetric derivative tensors of an expression at a point, up to order 3.
///
/// Built by polarization over univariate jets along coordinate directions
/// and their signed sums, e.g. `hess(i,j) = (D2(ei+ej) - D2(ei) - D2(ej))/2`.
/// The tensors back [`ExprDerivs::partial_jet`], which produces the Taylor
/// expansion of a *partial derivative* of the expression along a curve —
/// the one derivative combination plain jet evaluation cannot deliver.
#[derive(Debug, Clone)]
pub struct ExprDerivs {
    n: usize,
    order: usize,
    t0: f64,
    t1: Vec<f64>,
    t2: Vec<f64>,
    t3: Vec<f64>,
}

impl ExprDerivs {
    pub fn build(expr: &Expr, point: &[f64], order: usize) -> Result<ExprDerivs> {
        if order > 3 {
            return Err(Error::JetOrder {
                requested: order,
                max: 3,
            });
        }
        let n = point.len();
        let mut d = ExprDerivs {
            n,
            order,
            t0: 0.0,
            t1: vec![0.0; n],
            t2: if order >= 2 {
                vec![0.0; n * n]
            } else {
                Vec::new()
            },
            t3: if order >= 3 {
                vec![0.0; n * n * n]
            } else {
                Vec::new()
            },
        };

        d.t0 = eval_f64(expr.node(), point)?;
        if n == 0 {
            return Ok(d);
        }

        let run = |dir: &[f64]| -> Result<Jet> { jet_eval(expr.node(), point, dir, order) };

        let mut dir = vec![0.0; n];
        // Axis runs.
        let mut axis = Vec::with_capacity(n);
        for i in 0..n {
            dir.iter_mut().for_each(|d| *d = 0.0);
            dir[i] = 1.0;
            axis.push(run(&dir)?);
        }
        for i in 0..n {
            d.t1[i] = axis[i].coeff(1);
            if order >= 2 {
                d.t2[i * n + i] = axis[i].coeff(2);
            }
            if order >= 3 {
                d.t3[(i * n + i) * n + i] = axis[i].coeff(3);
            }
        }

        if order >= 2 {
            for i in 0..n {
                for j in (i + 1)..n {
                    dir.iter_mut().for_each(|d| *d = 0.0);
                    dir[i] = 1.0;
                    dir[j] = 1.0;
                    let plus = run(&dir)?;
                    let tij = 0.5 * (plus.coeff(2) - axis[i].coeff(2) - axis[j].coeff(2));
                    d.t2[i * n + j] = tij;
                    d.t2[j * n + i] = tij;

                    if order >= 3 {
                        dir[j] = -1.0;
                        let minus = run(&dir)?;
                        let diii = axis[i].coeff(3);
                        let djjj = axis[j].coeff(3);
                        // D3(ei+ej) = Tiii + 3Tiij + 3Tijj + Tjjj
                        // D3(ei-ej) = Tiii - 3Tiij + 3Tijj - Tjjj
                        let tiij = (plus.coeff(3) - minus.coeff(3) - 2.0 * djjj) / 6.0;
                        let tijj = (plus.coeff(3) + minus.coeff(3) - 2.0 * diii) / 6.0;
                        d.set_t3_sym(i, i, j, tiij);
                        d.set_t3_sym(i, j, j, tijj);
                    }
                }
            }
        }

        if order >= 3 {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        dir.iter_mut().for_each(|d| *d = 0.0);
                        dir[i] = 1.0;
                        dir[j] = 1.0;
                        dir[k] = 1.0;
                        let ijk = run(&dir)?.coeff(3);
                        let pair = |a: usize, b: usize| -> Result<f64> {
                            let mut dd = vec![0.0; n];
                            dd[a] = 1.0;
                            dd[b] = 1.0;
                            Ok(run(&dd)?.coeff(3))
                        };
                        let tijk = (ijk - pair(i, j)? - pair(i, k)? - pair(j, k)?
                            + axis[i].coeff(3)
                            + axis[j].coeff(3)
                            + axis[k].coeff(3))
                            / 6.0;
                        d.set_t3_sym(i, j, k, tijk);
                    }
                }
            }
        }

        Ok(d)
    }

    fn set_t3_sym(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.n;
        let mut put = |a: usize, b: usize, c: usize| {
            self.t3[(a * n + b) * n + c] = v;
        };
        put(i, j, k);
        put(i, k, j);
        put(j, i, k);
        put(j, k, i);
        put(k, i, j);
        put(k, j, i);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.t0
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.t1[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.t2[i * self.n + j]
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        self.t3[(i * self.n + j) * self.n + k]
    }

    /// Taylor expansion of the expression itself along the curve described
    /// by `xjets` (raw coefficients; curve need not be a straight line).
    pub fn value_jet(&self, xjets: &[Jet]) -> Jet {
        self.compose(None, xjets)
    }

    /// Taylor expansion of the partial derivative `d/dx_p` of the
    /// expression along the curve `xjets`. Output order is capped at
    /// `self.order - 1` (tensor data available) and the curve order.
    pub fn partial_jet(&self, p: usize, xjets: &[Jet]) -> Jet {
        self.compose(Some(p), xjets)
    }

    /// Taylor expansion of the second partial `d^2/(dx_p dx_q)` along the
    /// curve `xjets`; output order capped at `self.order - 2`.
    pub fn partial2_jet(&self, p: usize, q: usize, xjets: &[Jet]) -> Jet {
        debug_assert_eq!(xjets.len(), self.n);
        let avail = self.order.saturating_sub(2);
        let inner = xjets.iter().map(|j| j.order()).max().unwrap_or(0);
        let out = avail.min(inner);
        let mut c = [0.0; 2];
        c[0] = self.hess(p, q);
        if out >= 1 {
            let mut acc = 0.0;
            for i in 0..self.n {
                acc += self.third(p, q, i) * xjets[i].coeff(1);
            }
            c[1] = acc;
        }
        Jet::from_coeffs(&c[..=out])
    }

    fn compose(&self, shift: Option<usize>, xjets: &[Jet]) -> Jet {
        debug_assert_eq!(xjets.len(), self.n);
        let avail = match shift {
            None => self.order,
            Some(_) => self.order.saturating_sub(1),
        };
        let inner = xjets.iter().map(|j| j.order()).max().unwrap_or(0);
        let out = avail.min(inner);
        let n = self.n;

        let f0 = match shift {
            None => self.t0,
            Some(p) => self.t1[p],
        };
        let f1 = |i: usize| match shift {
            None => self.t1[i],
            Some(p) => self.hess(p, i),
        };
        let f2 = |i: usize, j: usize| match shift {
            None => self.hess(i, j),
            Some(p) => self.third(p, i, j),
        };
        let f3 = |i: usize, j: usize, k: usize| match shift {
            None => self.third(i, j, k),
            Some(_) => unreachable!("partial_jet never needs third-order composition"),
        };

        let mut c = [0.0; 4];
        c[0] = f0;
        if out >= 1 {
            let mut acc = 0.0;
            for i in 0..n {
                acc += f1(i) * xjets[i].coeff(1);
            }
            c[1] = acc;
        }
        if out >= 2 {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += f2(i, j) * xjets[i].coeff(1) * xjets[j].coeff(1);
                }
                acc += f1(i) * xjets[i].coeff(2);
            }
            c[2] = acc;
        }
        if out >= 3 {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        acc +=
                            f3(i, j, k) * xjets[i].coeff(1) * xjets[j].coeff(1) * xjets[k].coeff(1);
                    }
                    acc += 3.0 * f2(i, j) * xjets[i].coeff(2) * xjets[j].coeff(1);
                }
                acc += f1(i) * xjets[i].coeff(3);
            }
            c[3] = acc;
        }
        Jet::from_coeffs(&c[..=out])
    }
}

#[cfg(test)]
mod tests {
    use super::super::Expr;
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_jet() {
        let e = Expr::parse("3", &["x"]).unwrap();
        let j = e.jet_eval(&[7.0], &[1.0], 2).unwrap();
        assert_eq!(j.coeffs(), &[3.0, 0.0, 0.0]);
    }

    #[test]
    fn polynomial_raw_derivatives() {
        let e = Expr::parse("x2^2", &["x2"]).unwrap();
        let j = e.jet_eval(&[3.0], &[1.0], 2).unwrap();
        assert_eq!(j.coeffs(), &[9.0, 6.0, 2.0]);
    }

    #[test]
    fn radial_norm_jet_along_axis() {
        // f = sqrt(x2^2 + x3^2) at (1,1) along (1,0):
        // value sqrt2, first derivative 1/sqrt2, second x3^2/f^3 = 1/(2 sqrt2).
        let e = Expr::parse("sqrt(x2^2+x3^2)", &["x2", "x3"]).unwrap();
        let j = e.jet_eval(&[1.0, 1.0], &[1.0, 0.0], 2).unwrap();
        let s2 = math::sqrt(2.0);
        assert_relative_eq!(j.coeff(0), s2, epsilon = 1e-15);
        assert_relative_eq!(j.coeff(1), 1.0 / s2, epsilon = 1e-15);
        assert_relative_eq!(j.coeff(2), 1.0 / (2.0 * s2), epsilon = 1e-15);
    }

    #[test]
    fn jet_order_cap() {
        let e = Expr::parse("x", &["x"]).unwrap();
        assert!(matches!(
            e.jet_eval(&[1.0], &[1.0], 5),
            Err(Error::JetOrder {
                requested: 5,
                max: 4
            })
        ));
    }

    #[test]
    fn division_by_zero_at_point() {
        let e = Expr::parse("1/x", &["x"]).unwrap();
        assert_eq!(e.eval(&[0.0]), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_partials_by_polarization() {
        // f = x^2 y + 3 x y^3
        let e = Expr::parse("x^2*y + 3*x*y^3", &["x", "y"]).unwrap();
        let (x, y) = (1.3, -0.7);
        let d = e.derivs(&[x, y], 3).unwrap();
        assert_relative_eq!(d.value(), x * x * y + 3.0 * x * y * y * y, epsilon = 1e-12);
        assert_relative_eq!(d.grad(0), 2.0 * x * y + 3.0 * y * y * y, epsilon = 1e-12);
        assert_relative_eq!(d.grad(1), x * x + 9.0 * x * y * y, epsilon = 1e-12);
        assert_relative_eq!(d.hess(0, 0), 2.0 * y, epsilon = 1e-11);
        assert_relative_eq!(d.hess(0, 1), 2.0 * x + 9.0 * y * y, epsilon = 1e-11);
        assert_relative_eq!(d.hess(1, 1), 18.0 * x * y, epsilon = 1e-11);
        assert_relative_eq!(d.third(0, 0, 1), 2.0, epsilon = 1e-10);
        assert_relative_eq!(d.third(0, 1, 1), 18.0 * y, epsilon = 1e-10);
        assert_relative_eq!(d.third(1, 1, 1), 18.0 * x, epsilon = 1e-10);
        assert_relative_eq!(d.third(0, 0, 0), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn partial_jet_matches_direct_derivative_expression() {
        // f = x^2 y; df/dx = 2xy. Expand both along the curve
        // (x,y) = (1+t, 2-3t) and compare.
        let f = Expr::parse("x^2*y", &["x", "y"]).unwrap();
        let dfdx = Expr::parse("2*x*y", &["x", "y"]).unwrap();
        let d = f.derivs(&[1.0, 2.0], 3).unwrap();
        let xj = [Jet::variable(1.0, 1.0, 2), Jet::variable(2.0, -3.0, 2)];
        let via_tensors = d.partial_jet(0, &xj);
        let direct = dfdx.eval_jets(&xj).unwrap();
        for k in 0..=2usize {
            assert_relative_eq!(via_tensors.coeff(k), direct.coeff(k), epsilon = 1e-11);
        }
    }

    #[test]
    fn value_jet_composition_matches_ring_evaluation() {
        let f = Expr::parse("sqrt(x^2 + y^2)*x", &["x", "y"]).unwrap();
        let d = f.derivs(&[1.2, 0.8], 3).unwrap();
        // Curved inner jets (non-zero second coefficients).
        let xj = [
            Jet::from_coeffs(&[1.2, 0.5, -1.0, 0.25]),
            Jet::from_coeffs(&[0.8, -0.3, 2.0, 1.0]),
        ];
        let composed = d.value_jet(&xj);
        let direct = f.eval_jets(&xj).unwrap();
        for k in 0..=3usize {
            assert_relative_eq!(composed.coeff(k), direct.coeff(k), max_relative = 1e-9);
        }
    }

    #[test]
    fn display_round_trip_examples() {
        for (src, vars) in [
            ("x2^2 + x3^2", &["x2", "x3"][..]),
            ("sqrt(x2^2+x3^2)", &["x2", "x3"][..]),
            ("-(x2 + 1)*x3/(2 - x2)^3", &["x2", "x3"][..]),
            ("1/(4*sqrt(x2^2+x3^2))", &["x2", "x3"][..]),
            ("exp(-x2)*sin(x3) - abs(x2)", &["x2", "x3"][..]),
        ] {
            let e = Expr::parse(src, vars).unwrap();
            let shown = alloc::format!("{e}");
            let back = Expr::parse(&shown, vars).unwrap();
            assert_eq!(e, back, "round-trip failed for `{src}` -> `{shown}`");
        }
    }
}
