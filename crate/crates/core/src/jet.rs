//! Truncated complex Taylor series in a real parameter.
//!
//! A [`Jet`] of order `p` at base point `t0` stores `c_0..c_p` with
//! `c_j = g^{(j)}(t0) / j!`. Products, quotients and the elementary functions
//! below are exact up to the truncation order, which is what makes the
//! derivative-along-the-arc recurrence numerically clean.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    base: f64,
    coeffs: Vec<Complex64>,
}

impl Jet {
    /// Builds a jet from Taylor coefficients. Panics on an empty coefficient list.
    pub fn new(base: f64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { base, coeffs }
    }

    pub fn constant(base: f64, value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![ZERO; order + 1];
        coeffs[0] = value;
        Jet { base, coeffs }
    }

    /// The identity map `t -> t` expanded at `base`.
    pub fn variable(base: f64, order: usize) -> Self {
        let mut coeffs = vec![ZERO; order + 1];
        coeffs[0] = Complex64::new(base, 0.0);
        if order >= 1 {
            coeffs[1] = Complex64::new(1.0, 0.0);
        }
        Jet { base, coeffs }
    }

    /// Builds the jet of a polynomial in `t` given by its monomial coefficients.
    pub fn from_polynomial(base: f64, poly: &[Complex64], order: usize) -> Self {
        let t = Jet::variable(base, order);
        let mut acc = Jet::constant(base, ZERO, order);
        for &c in poly.iter().rev() {
            acc = &(&acc * &t) + c;
        }
        acc
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or(ZERO)
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `g^{(j)}(t0)`, i.e. `j! c_j`.
    pub fn derivative_value(&self, j: usize) -> Complex64 {
        let fact: f64 = (1..=j).map(|i| i as f64).product();
        self.coeff(j) * fact
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let n = (order + 1).min(self.coeffs.len());
        Jet {
            base: self.base,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// Jet of `g'`, one order lower. An order-0 jet differentiates to the zero constant.
    pub fn derivative(&self) -> Jet {
        if self.coeffs.len() == 1 {
            return Jet::constant(self.base, ZERO, 0);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(j, &c)| c * (j as f64 + 1.0))
            .collect();
        Jet {
            base: self.base,
            coeffs,
        }
    }

    pub fn conj(&self) -> Jet {
        Jet {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        Jet {
            base: self.base,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet> {
        let b0 = rhs.coeffs[0];
        if b0.norm() == 0.0 || !b0.is_finite() {
            return Err(Error::SingularJet);
        }
        let p = self.order().min(rhs.order());
        let mut q = vec![ZERO; p + 1];
        for k in 0..=p {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= rhs.coeffs[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Ok(Jet {
            base: self.base,
            coeffs: q,
        })
    }

    pub fn recip(&self) -> Result<Jet> {
        Jet::constant(self.base, Complex64::new(1.0, 0.0), self.order()).div(self)
    }

    /// Quotient of two jets whose constant terms both vanish at the base
    /// point. The common zero is cancelled before dividing, so the result
    /// has one order less than the inputs.
    pub fn div_removable(num: &Jet, den: &Jet) -> Result<Jet> {
        let p = num.order().min(den.order());
        if p == 0 {
            return Err(Error::SingularJet);
        }
        let n = Jet::new(num.base, num.coeffs[1..=p].to_vec());
        let d = Jet::new(den.base, den.coeffs[1..=p].to_vec());
        n.div(&d)
    }

    pub fn exp(&self) -> Jet {
        let p = self.order();
        let a = &self.coeffs;
        let mut g = vec![ZERO; p + 1];
        g[0] = a[0].exp();
        for k in 1..=p {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += a[j] * g[k - j] * j as f64;
            }
            g[k] = acc / k as f64;
        }
        Jet {
            base: self.base,
            coeffs: g,
        }
    }

    /// `(sin g, cos g)` computed jointly.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let p = self.order();
        let a = &self.coeffs;
        let mut s = vec![ZERO; p + 1];
        let mut c = vec![ZERO; p + 1];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..=p {
            let mut acc_s = ZERO;
            let mut acc_c = ZERO;
            for j in 1..=k {
                let w = a[j] * j as f64;
                acc_s += w * c[k - j];
                acc_c -= w * s[k - j];
            }
            s[k] = acc_s / k as f64;
            c[k] = acc_c / k as f64;
        }
        (
            Jet {
                base: self.base,
                coeffs: s,
            },
            Jet {
                base: self.base,
                coeffs: c,
            },
        )
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut acc = Jet::constant(self.base, Complex64::new(1.0, 0.0), self.order());
        let mut sq = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// Evaluates the truncated series at `t`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let h = t - self.base;
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * h + c)
    }

    /// Re-expands the truncated polynomial about a new base point.
    pub fn shift(&self, new_base: f64) -> Jet {
        let h = new_base - self.base;
        let mut c = self.coeffs.clone();
        let p = c.len();
        // repeated synthetic division by (t - new_base)
        for i in 0..p {
            for j in (i..p - 1).rev() {
                let next = c[j + 1];
                c[j] += next * h;
            }
        }
        Jet {
            base: new_base,
            coeffs: c,
        }
    }

    /// Composition `outer(inner(t))` where `self` is the jet of `outer` at
    /// `inner(t0)` and `inner` is a real-valued jet at `t0`.
    pub fn compose(&self, inner: &Jet) -> Jet {
        let p = self.order().min(inner.order());
        let mut delta = inner.truncate(p);
        delta.coeffs[0] = ZERO;
        let mut acc = Jet::constant(inner.base, ZERO, p);
        for &c in self.coeffs[..=p].iter().rev() {
            acc = &(&acc * &delta) + c;
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let p = self.order().min(rhs.order());
        Jet {
            base: self.base,
            coeffs: (0..=p).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let p = self.order().min(rhs.order());
        Jet {
            base: self.base,
            coeffs: (0..=p).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let p = self.order().min(rhs.order());
        let coeffs = (0..=p)
            .map(|k| {
                (0..=k).fold(ZERO, |acc, j| acc + self.coeffs[j] * rhs.coeffs[k - j])
            })
            .collect();
        Jet {
            base: self.base,
            coeffs,
        }
    }
}

impl Add<Complex64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: Complex64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl Sub<Complex64> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: Complex64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] -= rhs;
        out
    }
}

impl Mul<Complex64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: Complex64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn derivative_shifts_coefficients() {
        let j = Jet::new(0.0, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 1.0)]);
        let d = j.derivative();
        assert_eq!(d.order(), 1);
        assert_eq!(d.coeffs(), &[c(2.0, 0.0), c(6.0, 2.0)]);
    }

    #[test]
    fn exp_of_variable_matches_factorials() {
        let t = Jet::variable(0.3, 8);
        let e = t.exp();
        for k in 0..=8 {
            assert_relative_eq!(e.derivative_value(k).re, 0.3f64.exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn sin_cos_derivatives_cycle() {
        let t = Jet::variable(0.7, 6);
        let (s, co) = t.sin_cos();
        let expected = [0.7f64.sin(), 0.7f64.cos(), -0.7f64.sin(), -0.7f64.cos()];
        for k in 0..=6 {
            assert_relative_eq!(s.derivative_value(k).re, expected[k % 4], max_relative = 1e-13);
            assert_relative_eq!(co.derivative_value(k).re, expected[(k + 1) % 4], max_relative = 1e-13);
        }
    }

    #[test]
    fn quotient_times_denominator_is_numerator() {
        let t = Jet::variable(0.2, 7);
        let a = (&t * c(0.0, 2.0)).exp();
        let b = &t.sin() + c(1.5, 0.5);
        let q = a.div(&b).unwrap();
        let back = &q * &b;
        for k in 0..=7 {
            assert!(close(back.coeff(k), a.coeff(k), 1e-13));
        }
    }

    #[test]
    fn division_by_zero_constant_term_fails() {
        let t = Jet::variable(0.0, 3);
        let one = Jet::constant(0.0, c(1.0, 0.0), 3);
        assert_eq!(one.div(&t), Err(Error::SingularJet));
    }

    #[test]
    fn removable_quotient_of_sine_over_t() {
        // sin(t)/t at t = 0: 1 - t^2/6 + t^4/120
        let t = Jet::variable(0.0, 6);
        let q = Jet::div_removable(&t.sin(), &t).unwrap();
        assert_eq!(q.order(), 5);
        assert!(close(q.coeff(0), c(1.0, 0.0), 1e-15));
        assert!(close(q.coeff(2), c(-1.0 / 6.0, 0.0), 1e-15));
        assert!(close(q.coeff(4), c(1.0 / 120.0, 0.0), 1e-15));
    }

    #[test]
    fn shift_reexpands_polynomial() {
        let poly = [c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.0), c(0.0, 3.0)];
        let at0 = Jet::from_polynomial(0.0, &poly, 3);
        let at1 = at0.shift(0.75);
        let direct = Jet::from_polynomial(0.75, &poly, 3);
        for k in 0..=3 {
            assert!(close(at1.coeff(k), direct.coeff(k), 1e-14));
        }
    }

    #[test]
    fn compose_matches_direct_expansion() {
        // exp(i*tau(t)) with tau(t) = (t + t^2)/2 expanded at t0 = 0.4
        let t0 = 0.4;
        let tau = Jet::from_polynomial(t0, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0)], 6);
        let s0 = tau.value().re;
        let outer = (&Jet::variable(s0, 6) * c(0.0, 1.0)).exp();
        let composed = outer.compose(&tau);
        let direct = (&tau * c(0.0, 1.0)).exp();
        for k in 0..=6 {
            assert!(close(composed.coeff(k), direct.coeff(k), 1e-13));
        }
    }

    #[test]
    fn powi_matches_repeated_product() {
        let t = &Jet::variable(0.1, 5) + c(0.3, -0.2);
        let p = t.powi(5);
        let mut q = t.clone();
        for _ in 0..4 {
            q = &q * &t;
        }
        for k in 0..=5 {
            assert!(close(p.coeff(k), q.coeff(k), 1e-14));
        }
    }
}
