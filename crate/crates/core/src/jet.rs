//! Truncated Taylor series ("jets") with complex coefficients.
//!
//! A jet stores `f(t + h) = Σ c_n hⁿ` for `n ≤ order`. The phase-integral
//! tails need several derivatives of compositions like `1/φ'(t)`; carrying
//! them as jets keeps every trajectory variant on one code path.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub const MAX_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    coeffs: [Complex64; MAX_ORDER + 1],
    order: usize,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        Self::constant_complex(Complex64::new(value, 0.0), order)
    }

    pub fn constant_complex(value: Complex64, order: usize) -> Self {
        assert!(order <= MAX_ORDER);
        let mut coeffs = [Complex64::new(0.0, 0.0); MAX_ORDER + 1];
        coeffs[0] = value;
        Self { coeffs, order }
    }

    /// The independent variable `t + h` expanded at `t`.
    pub fn variable(t: f64, order: usize) -> Self {
        let mut j = Self::constant(t, order);
        if order >= 1 {
            j.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    /// Builds a jet from real Taylor coefficients (not derivatives).
    pub fn from_taylor(coeffs: &[f64], order: usize) -> Self {
        let mut j = Self::constant(0.0, order);
        for (slot, &c) in j.coeffs.iter_mut().zip(coeffs).take(order + 1) {
            *slot = Complex64::new(c, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Taylor coefficient `f⁽ⁿ⁾/n!`.
    pub fn coeff(&self, n: usize) -> Complex64 {
        if n <= self.order {
            self.coeffs[n]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// The n-th derivative at the expansion point.
    pub fn derivative_value(&self, n: usize) -> Complex64 {
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        self.coeff(n) * fact
    }

    /// `d/dh`; the order drops by one.
    pub fn derivative(&self) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let mut out = Self::constant(0.0, self.order - 1);
        for n in 0..self.order {
            out.coeffs[n] = self.coeffs[n + 1] * (n + 1) as f64;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for c in out.coeffs.iter_mut().take(self.order + 1) {
            *c *= s;
        }
        out
    }

    pub fn recip(&self) -> Self {
        let a0 = self.coeffs[0];
        let mut out = Self::constant(0.0, self.order);
        out.coeffs[0] = 1.0 / a0;
        for n in 1..=self.order {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=n {
                acc += self.coeffs[k] * out.coeffs[n - k];
            }
            out.coeffs[n] = -acc / a0;
        }
        out
    }

    pub fn exp(&self) -> Self {
        // f' = a' f  ⇒  n f_n = Σ k a_k f_{n-k}
        let mut out = Self::constant(0.0, self.order);
        out.coeffs[0] = self.coeffs[0].exp();
        for n in 1..=self.order {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=n {
                acc += self.coeffs[k] * out.coeffs[n - k] * k as f64;
            }
            out.coeffs[n] = acc / n as f64;
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        // f² = a  ⇒  2 f_0 f_n = a_n − Σ_{k=1}^{n-1} f_k f_{n-k}
        let mut out = Self::constant(0.0, self.order);
        out.coeffs[0] = self.coeffs[0].sqrt();
        for n in 1..=self.order {
            let mut acc = self.coeffs[n];
            for k in 1..n {
                acc -= out.coeffs[k] * out.coeffs[n - k];
            }
            out.coeffs[n] = acc / (2.0 * out.coeffs[0]);
        }
        out
    }

    fn combine(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let order = self.order.min(other.order);
        let mut out = Self::constant(0.0, order);
        for n in 0..=order {
            out.coeffs[n] = f(self.coeffs[n], other.coeffs[n]);
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.combine(&rhs, |a, b| a + b)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.combine(&rhs, |a, b| a - b)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::constant(0.0, order);
        for n in 0..=order {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=n {
                acc += self.coeffs[k] * rhs.coeffs[n - k];
            }
            out.coeffs[n] = acc;
        }
        out
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(Complex64::new(rhs, 0.0))
    }
}
