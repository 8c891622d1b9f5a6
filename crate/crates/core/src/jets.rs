//! Order-2 and order-1 jets in the two surface parameters `(u, v)`.
//!
//! A [`Jet2`] carries a value, its gradient and its (symmetric) Hessian. Arithmetic
//! propagates all three exactly through the Leibniz and chain rules, so the jets of
//! closed-form coordinate expressions are exact up to floating point rounding.
//!
//! A [`Jet1`] drops the Hessian. It is what a Poisson bracket of two order-2 jets
//! produces: the bracket uses one derivative, so only one derivative order is left.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::Real;

/// Denominators whose magnitude is at or below this floor are rejected.
pub const DIV_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by zero (denominator {value:e})")]
    DivisionByZero { value: f64 },
    #[error("{func}: argument {value} outside the real domain")]
    Domain { func: &'static str, value: f64 },
}

/// Which surface parameter a seeded jet tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    U,
    V,
}

impl Param {
    pub fn index(self) -> usize {
        match self {
            Param::U => 0,
            Param::V => 1,
        }
    }
}

/// Value, gradient and Hessian of a scalar function of `(u, v)` at one point.
///
/// The Hessian is stored as a full 2x2 array; every constructor and operation
/// writes the off-diagonal entries from a single computed value, so
/// `hess[0][1] == hess[1][0]` holds bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2<T> {
    pub value: T,
    pub grad: [T; 2],
    pub hess: [[T; 2]; 2],
}

/// Value and gradient of a scalar function of `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet1<T> {
    pub value: T,
    pub grad: [T; 2],
}

#[inline]
fn sym<T: Real>(h00: T, h01: T, h11: T) -> [[T; 2]; 2] {
    [[h00, h01], [h01, h11]]
}

fn check_denominator<T: Real>(d: T) -> Result<(), JetError> {
    let floor = T::lit(DIV_FLOOR);
    if d.abs() > floor {
        Ok(())
    } else {
        Err(JetError::DivisionByZero {
            value: d.to_f64_lossy(),
        })
    }
}

impl<T: Real> Jet2<T> {
    pub fn new(value: T, grad: [T; 2], h00: T, h01: T, h11: T) -> Self {
        Self {
            value,
            grad,
            hess: sym(h00, h01, h11),
        }
    }

    pub fn constant(value: T) -> Self {
        Self {
            value,
            grad: [T::zero(); 2],
            hess: [[T::zero(); 2]; 2],
        }
    }

    /// Coordinate jet of the parameter `which` at the point `at`.
    pub fn seed_variable(which: Param, at: [T; 2]) -> Self {
        let mut grad = [T::zero(); 2];
        grad[which.index()] = T::one();
        Self {
            value: at[which.index()],
            grad,
            hess: [[T::zero(); 2]; 2],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().flatten().all(|h| h.is_finite())
    }

    /// Drop the Hessian.
    pub fn truncate(&self) -> Jet1<T> {
        Jet1 {
            value: self.value,
            grad: self.grad,
        }
    }

    /// The first partial derivative `∂_a f` as an order-1 jet.
    pub fn partial(&self, a: usize) -> Jet1<T> {
        Jet1 {
            value: self.grad[a],
            grad: self.hess[a],
        }
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(
            self.value * k,
            [self.grad[0] * k, self.grad[1] * k],
            self.hess[0][0] * k,
            self.hess[0][1] * k,
            self.hess[1][1] * k,
        )
    }

    /// Applies `f` with derivatives `d1 = f'(value)` and `d2 = f''(value)`.
    fn chain(self, f0: T, d1: T, d2: T) -> Self {
        let g = self.grad;
        let h = self.hess;
        Self::new(
            f0,
            [d1 * g[0], d1 * g[1]],
            d1 * h[0][0] + d2 * g[0] * g[0],
            d1 * h[0][1] + d2 * g[0] * g[1],
            d1 * h[1][1] + d2 * g[1] * g[1],
        )
    }

    fn checked(self, func: &'static str, arg: T) -> Result<Self, JetError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(JetError::Domain {
                func,
                value: arg.to_f64_lossy(),
            })
        }
    }

    pub fn recip(self) -> Result<Self, JetError> {
        check_denominator(self.value)?;
        let inv = self.value.recip();
        let inv2 = inv * inv;
        Ok(self.chain(inv, -inv2, T::lit(2.0) * inv2 * inv))
    }

    pub fn try_div(self, rhs: Self) -> Result<Self, JetError> {
        check_denominator(rhs.value)?;
        Ok(self * rhs.recip()?)
    }

    pub fn sin(self) -> Result<Self, JetError> {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s).checked("sin", self.value)
    }

    pub fn cos(self) -> Result<Self, JetError> {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c).checked("cos", self.value)
    }

    pub fn tan(self) -> Result<Self, JetError> {
        let c = self.value.cos();
        if c.abs() <= T::lit(DIV_FLOOR) {
            return Err(JetError::Domain {
                func: "tan",
                value: self.value.to_f64_lossy(),
            });
        }
        let t = self.value.tan();
        let sec2 = T::one() + t * t;
        self.chain(t, sec2, T::lit(2.0) * t * sec2)
            .checked("tan", self.value)
    }

    pub fn sinh(self) -> Result<Self, JetError> {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s).checked("sinh", self.value)
    }

    pub fn cosh(self) -> Result<Self, JetError> {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c).checked("cosh", self.value)
    }

    pub fn tanh(self) -> Result<Self, JetError> {
        let t = self.value.tanh();
        let d1 = T::one() - t * t;
        self.chain(t, d1, -T::lit(2.0) * t * d1)
            .checked("tanh", self.value)
    }

    pub fn exp(self) -> Result<Self, JetError> {
        let e = self.value.exp();
        self.chain(e, e, e).checked("exp", self.value)
    }

    pub fn ln(self) -> Result<Self, JetError> {
        if !(self.value > T::zero()) {
            return Err(JetError::Domain {
                func: "ln",
                value: self.value.to_f64_lossy(),
            });
        }
        let inv = self.value.recip();
        self.chain(self.value.ln(), inv, -inv * inv)
            .checked("ln", self.value)
    }

    pub fn sqrt(self) -> Result<Self, JetError> {
        if !(self.value > T::zero()) {
            return Err(JetError::Domain {
                func: "sqrt",
                value: self.value.to_f64_lossy(),
            });
        }
        let s = self.value.sqrt();
        let d1 = T::lit(0.5) / s;
        let d2 = -T::lit(0.25) / (s * self.value);
        self.chain(s, d1, d2).checked("sqrt", self.value)
    }

    /// `self ^ exponent` for a constant exponent.
    ///
    /// Integer exponents accept any base; fractional exponents need a positive base.
    pub fn pow_const(self, exponent: T) -> Result<Self, JetError> {
        let x = self.value;
        let out = if exponent.fract() == T::zero() && exponent.abs() < T::lit(i32::MAX as f64) {
            let n = exponent.to_i32().unwrap_or(0);
            if n == 0 {
                return Ok(Self::constant(T::one()));
            }
            if n < 0 {
                check_denominator(x).map_err(|_| JetError::Domain {
                    func: "pow",
                    value: x.to_f64_lossy(),
                })?;
            }
            let nn = T::lit(n as f64);
            let d2 = if n == 1 {
                T::zero()
            } else {
                nn * (nn - T::one()) * x.powi(n - 2)
            };
            let d1 = nn * x.powi(n - 1);
            self.chain(x.powi(n), d1, d2)
        } else {
            if !(x > T::zero()) {
                return Err(JetError::Domain {
                    func: "pow",
                    value: x.to_f64_lossy(),
                });
            }
            let d1 = exponent * x.powf(exponent - T::one());
            let d2 = exponent * (exponent - T::one()) * x.powf(exponent - T::lit(2.0));
            self.chain(x.powf(exponent), d1, d2)
        };
        out.checked("pow", x)
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(
            self.value + r.value,
            [self.grad[0] + r.grad[0], self.grad[1] + r.grad[1]],
            self.hess[0][0] + r.hess[0][0],
            self.hess[0][1] + r.hess[0][1],
            self.hess[1][1] + r.hess[1][1],
        )
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        self + (-r)
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        let (a, b) = (self, r);
        Self::new(
            a.value * b.value,
            [
                a.grad[0] * b.value + a.value * b.grad[0],
                a.grad[1] * b.value + a.value * b.grad[1],
            ],
            a.value * b.hess[0][0] + b.value * a.hess[0][0] + T::lit(2.0) * a.grad[0] * b.grad[0],
            a.value * b.hess[0][1]
                + b.value * a.hess[0][1]
                + a.grad[0] * b.grad[1]
                + a.grad[1] * b.grad[0],
            a.value * b.hess[1][1] + b.value * a.hess[1][1] + T::lit(2.0) * a.grad[1] * b.grad[1],
        )
    }
}

impl<T: Real> Jet1<T> {
    pub fn new(value: T, grad: [T; 2]) -> Self {
        Self { value, grad }
    }

    pub fn constant(value: T) -> Self {
        Self {
            value,
            grad: [T::zero(); 2],
        }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.value * k, [self.grad[0] * k, self.grad[1] * k])
    }

    fn chain(self, f0: T, d1: T) -> Self {
        Self::new(f0, [d1 * self.grad[0], d1 * self.grad[1]])
    }

    pub fn recip(self) -> Result<Self, JetError> {
        check_denominator(self.value)?;
        let inv = self.value.recip();
        Ok(self.chain(inv, -inv * inv))
    }

    pub fn try_div(self, rhs: Self) -> Result<Self, JetError> {
        Ok(self * rhs.recip()?)
    }

    /// `|f|`, differentiated on the side of the current sign.
    pub fn abs(self) -> Self {
        if self.value < T::zero() {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Result<Self, JetError> {
        if !(self.value > T::zero()) {
            return Err(JetError::Domain {
                func: "sqrt",
                value: self.value.to_f64_lossy(),
            });
        }
        let s = self.value.sqrt();
        Ok(self.chain(s, T::lit(0.5) / s))
    }
}

impl<T: Real> Add for Jet1<T> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(
            self.value + r.value,
            [self.grad[0] + r.grad[0], self.grad[1] + r.grad[1]],
        )
    }
}

impl<T: Real> Sub for Jet1<T> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(
            self.value - r.value,
            [self.grad[0] - r.grad[0], self.grad[1] - r.grad[1]],
        )
    }
}

impl<T: Real> Neg for Jet1<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, [-self.grad[0], -self.grad[1]])
    }
}

impl<T: Real> Mul for Jet1<T> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.value * r.value,
            [
                self.grad[0] * r.value + self.value * r.grad[0],
                self.grad[1] * r.value + self.value * r.grad[1],
            ],
        )
    }
}

impl<T: Real> std::iter::Sum for Jet1<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}
