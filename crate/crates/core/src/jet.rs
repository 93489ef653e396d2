//! Truncated univariate Taylor jets.
//!
//! A [`Jet`] of order `k` holds the value of a scalar quantity together with
//! its directional derivatives of orders `1..=k` along a single seed
//! direction. Coefficients are **raw derivatives**, not Taylor-scaled: the
//! Taylor coefficient of order `k` is `c[k] / k!`. Downstream curvature
//! formulas consume derivatives directly, which is why the raw convention is
//! used; the `k!` conversion appears only inside the elementary-function
//! recurrences below.
//!
//! Multiplication follows the Leibniz rule with binomial weights:
//! `(a*b).c[k] = sum_{i+j=k} binom(k,i) a.c[i] b.c[j]`.
//!
//! Mixed partial derivatives are not represented here; they are recovered by
//! polarization over jets along sums of seed directions (see
//! [`crate::expr::ExprDerivs`]).

use crate::error::{Error, Result};
use crate::math;

/// Maximum supported jet order. Order 3 is the minimum needed by curvature
/// of the induced connections; 4 leaves headroom for direct use.
pub const MAX_ORDER: usize = 4;

const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Value plus raw directional derivatives up to `order` along one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    order: usize,
    c: [f64; MAX_ORDER + 1],
}

impl Jet {
    /// A constant: all derivative coefficients are zero.
    pub fn constant(value: f64, order: usize) -> Jet {
        debug_assert!(order <= MAX_ORDER);
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = value;
        Jet { order, c }
    }

    /// A coordinate value moving with unit rate `rate` along the seed
    /// direction: first derivative `rate`, higher derivatives zero.
    pub fn variable(value: f64, rate: f64, order: usize) -> Jet {
        debug_assert!(order <= MAX_ORDER);
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = value;
        if order >= 1 {
            c[1] = rate;
        }
        Jet { order, c }
    }

    /// Builds a jet directly from raw derivative coefficients.
    pub fn from_coeffs(coeffs: &[f64]) -> Jet {
        debug_assert!(!coeffs.is_empty() && coeffs.len() <= MAX_ORDER + 1);
        let mut c = [0.0; MAX_ORDER + 1];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Jet {
            order: coeffs.len() - 1,
            c,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The value component `c[0]`.
    pub fn val(&self) -> f64 {
        self.c[0]
    }

    /// Raw derivative coefficient of order `k` (zero above the jet order).
    pub fn coeff(&self, k: usize) -> f64 {
        if k <= self.order {
            self.c[k]
        } else {
            0.0
        }
    }

    /// All coefficients `[c0, ..., c_order]`.
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..=self.order]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }

    fn promote(a: &Jet, b: &Jet) -> usize {
        // Mixed orders arise only from constants built at a lower order;
        // compute at the larger order, missing coefficients read as zero.
        a.order.max(b.order)
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        let order = Jet::promote(self, rhs);
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..=order {
            c[k] = self.coeff(k) + rhs.coeff(k);
        }
        Jet { order, c }
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        let order = Jet::promote(self, rhs);
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..=order {
            c[k] = self.coeff(k) - rhs.coeff(k);
        }
        Jet { order, c }
    }

    pub fn neg(&self) -> Jet {
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..=self.order {
            c[k] = -self.c[k];
        }
        Jet {
            order: self.order,
            c,
        }
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        let order = Jet::promote(self, rhs);
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..=order {
            let mut acc = 0.0;
            for i in 0..=k {
                acc += BINOM[k][i] * self.coeff(i) * rhs.coeff(k - i);
            }
            c[k] = acc;
        }
        Jet { order, c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..=self.order {
            c[k] = self.c[k] * s;
        }
        Jet {
            order: self.order,
            c,
        }
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet> {
        if rhs.c[0] == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let order = Jet::promote(self, rhs);
        // Solve a = c * b by the triangular Leibniz system.
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..=order {
            let mut acc = self.coeff(k);
            for i in 0..k {
                acc -= BINOM[k][i] * c[i] * rhs.coeff(k - i);
            }
            c[k] = acc / rhs.c[0];
        }
        Ok(Jet { order, c })
    }

    pub fn recip(&self) -> Result<Jet> {
        Jet::constant(1.0, self.order).div(self)
    }

    /// Taylor-scaled view of the coefficients (`c[k]/k!`).
    fn scaled(&self) -> [f64; MAX_ORDER + 1] {
        let mut t = [0.0; MAX_ORDER + 1];
        for k in 0..=self.order {
            t[k] = self.c[k] / FACT[k];
        }
        t
    }

    fn from_scaled(order: usize, t: [f64; MAX_ORDER + 1]) -> Jet {
        let mut c = [0.0; MAX_ORDER + 1];
        for k in 0..=order {
            c[k] = t[k] * FACT[k];
        }
        Jet { order, c }
    }

    pub fn sqrt(&self) -> Result<Jet> {
        if self.c[0] <= 0.0 {
            if self.c[0] == 0.0 && self.order == 0 {
                return Ok(Jet::constant(0.0, 0));
            }
            return Err(Error::Domain {
                what: alloc::format!("sqrt of non-positive value {}", self.c[0]),
            });
        }
        let a = self.scaled();
        let mut s = [0.0; MAX_ORDER + 1];
        s[0] = math::sqrt(a[0]);
        for k in 1..=self.order {
            let mut acc = a[k];
            for j in 1..k {
                acc -= s[j] * s[k - j];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        Ok(Jet::from_scaled(self.order, s))
    }

    pub fn exp(&self) -> Jet {
        let a = self.scaled();
        let mut e = [0.0; MAX_ORDER + 1];
        e[0] = math::exp(a[0]);
        for k in 1..=self.order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (j as f64) * a[j] * e[k - j];
            }
            e[k] = acc / (k as f64);
        }
        Jet::from_scaled(self.order, e)
    }

    pub fn ln(&self) -> Result<Jet> {
        if self.c[0] <= 0.0 {
            return Err(Error::Domain {
                what: alloc::format!("log of non-positive value {}", self.c[0]),
            });
        }
        let a = self.scaled();
        let mut l = [0.0; MAX_ORDER + 1];
        l[0] = math::ln(a[0]);
        for k in 1..=self.order {
            let mut acc = a[k];
            for j in 1..k {
                acc -= (j as f64) / (k as f64) * l[j] * a[k - j];
            }
            l[k] = acc / a[0];
        }
        Ok(Jet::from_scaled(self.order, l))
    }

    pub fn sin_cos(&self) -> (Jet, Jet) {
        let a = self.scaled();
        let mut s = [0.0; MAX_ORDER + 1];
        let mut c = [0.0; MAX_ORDER + 1];
        s[0] = math::sin(a[0]);
        c[0] = math::cos(a[0]);
        for k in 1..=self.order {
            let mut sa = 0.0;
            let mut ca = 0.0;
            for j in 1..=k {
                sa += (j as f64) * a[j] * c[k - j];
                ca += (j as f64) * a[j] * s[k - j];
            }
            s[k] = sa / (k as f64);
            c[k] = -ca / (k as f64);
        }
        (
            Jet::from_scaled(self.order, s),
            Jet::from_scaled(self.order, c),
        )
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    /// Absolute value. Smooth away from zero; differentiating through zero
    /// would require a subgradient choice, so it is rejected.
    pub fn abs(&self) -> Result<Jet> {
        if self.c[0] > 0.0 {
            Ok(*self)
        } else if self.c[0] < 0.0 {
            Ok(self.neg())
        } else if self.order == 0 {
            Ok(Jet::constant(0.0, 0))
        } else {
            Err(Error::Domain {
                what: alloc::string::String::from("derivative of abs at zero"),
            })
        }
    }

    /// Integer power by binary exponentiation (division for negative `n`).
    pub fn powi(&self, n: i32) -> Result<Jet> {
        let mut acc = Jet::constant(1.0, self.order);
        let mut base = if n < 0 { self.recip()? } else { *self };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        Ok(acc)
    }
}
