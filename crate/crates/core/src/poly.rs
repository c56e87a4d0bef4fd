//! Dense univariate polynomials with complex coefficients.
//!
//! Coefficients are stored in ascending powers. The zero polynomial is the
//! empty list. Trailing coefficients whose magnitude is at most
//! [`COEFF_TRIM_TOL`] times the largest coefficient magnitude are trimmed on
//! construction, so a nonzero polynomial always carries a significant
//! leading coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::Error;

/// Relative magnitude below which trailing coefficients are trimmed.
pub const COEFF_TRIM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, Default)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    /// Builds a polynomial from ascending-power coefficients, trimming
    /// trailing near-zero entries at the default tolerance.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self::with_trim_tol(coeffs, COEFF_TRIM_TOL)
    }

    /// Like [`ComplexPoly::new`] with an explicit relative trim tolerance.
    pub fn with_trim_tol(mut coeffs: Vec<Complex64>, tol: f64) -> Self {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            coeffs.clear();
            return Self { coeffs };
        }
        let cutoff = tol * scale;
        while let Some(last) = coeffs.last() {
            if last.norm() <= cutoff {
                coeffs.pop();
            } else {
                break;
            }
        }
        // Interior coefficients below the cutoff are kept; only the degree
        // is defined by trimming.
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * z^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `leading * prod (z - root)^mult`, multiplied out.
    pub fn from_roots(leading: Complex64, roots: &[(Complex64, usize)]) -> Self {
        let mut coeffs = vec![leading];
        for &(root, mult) in roots {
            for _ in 0..mult {
                let mut next = vec![ZERO; coeffs.len() + 1];
                for (i, &c) in coeffs.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= root * c;
                }
                coeffs = next;
            }
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// `sum |a_i| r^i`, the natural scale for evaluation residuals at radius `r`.
    pub fn eval_abs(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * r + c.norm();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Self::new(coeffs)
    }

    /// Coefficientwise complex conjugate.
    pub fn conj_coeffs(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Long division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), Error> {
        let dd = divisor.degree().ok_or(Error::ZeroDenominator)?;
        let Some(nd) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if nd < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ZERO; nd - dd + 1];
        for k in (dd..=nd).rev() {
            let q = rem[k] / lead;
            quot[k - dd] = q;
            if q != ZERO {
                for j in 0..=dd {
                    rem[k - dd + j] -= q * divisor.coeffs[j];
                }
            }
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Synthetic division by `(z - root)`, discarding the remainder.
    pub fn deflate(&self, root: Complex64) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero();
        }
        let mut q = vec![ZERO; n - 1];
        q[n - 2] = self.coeffs[n - 1];
        for k in (1..n - 1).rev() {
            q[k - 1] = self.coeffs[k] + root * q[k];
        }
        Self::new(q)
    }

    /// First `count` Taylor coefficients of the expansion at `a`, i.e. the
    /// coefficients of `(z - a)^0 .. (z - a)^{count-1}`.
    pub fn taylor_at(&self, a: Complex64, count: usize) -> Vec<Complex64> {
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            if work.is_empty() {
                out.push(ZERO);
                continue;
            }
            let n = work.len();
            let mut rem = work[n - 1];
            let mut quot = vec![ZERO; n - 1];
            for k in (0..n - 1).rev() {
                quot[k] = rem;
                rem = work[k] + a * rem;
            }
            out.push(rem);
            work = quot;
        }
        out
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![ZERO; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        ComplexPoly::new(coeffs)
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![ZERO; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] -= c;
        }
        ComplexPoly::new(coeffs)
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut coeffs = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ComplexPoly::new(coeffs)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        ComplexPoly {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

impl fmt::Display for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})*z", c)?,
                _ => write!(f, "({})*z^{}", c, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn difference_of_squares() {
        let a = ComplexPoly::from_real(&[1.0, 1.0]); // 1 + z
        let b = ComplexPoly::from_real(&[1.0, -1.0]); // 1 - z
        let p = &a * &b;
        assert_eq!(p.degree(), Some(2));
        assert!((p.coeff(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(p.coeff(1).norm() < 1e-15);
        assert!((p.coeff(2) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn add_zero_is_identity() {
        let p = ComplexPoly::new(vec![c(2.0, 1.0), c(0.0, -3.0), c(1.0, 0.0)]);
        let q = &p + &ComplexPoly::zero();
        assert_eq!(q.coeffs(), p.coeffs());
    }

    #[test]
    fn iz_squared_is_minus_z_squared() {
        let iz = ComplexPoly::monomial(c(0.0, 1.0), 1);
        let p = &iz * &iz;
        assert_eq!(p.degree(), Some(2));
        assert!((p.coeff(2) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trims_trailing_noise() {
        let p = ComplexPoly::new(vec![c(1.0, 0.0), c(1.0, 0.0), c(1e-14, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        assert!(ComplexPoly::new(vec![ZERO, ZERO]).is_zero());
    }

    #[test]
    fn div_rem_roundtrip() {
        let p = ComplexPoly::from_real(&[1.0, 0.0, 1.0, 2.0]); // 2z^3 + z^2 + 1
        let d = ComplexPoly::from_real(&[-1.0, 1.0]); // z - 1
        let (q, r) = p.div_rem(&d).unwrap();
        let back = &(&q * &d) + &r;
        for k in 0..4 {
            assert!((back.coeff(k) - p.coeff(k)).norm() < 1e-12);
        }
        assert!(r.degree().map_or(true, |d| d == 0));
    }

    #[test]
    fn deflate_matches_division() {
        let root = c(0.5, -2.0);
        let p = ComplexPoly::from_roots(c(2.0, 1.0), &[(root, 1), (c(-1.0, 0.0), 2)]);
        let q = p.deflate(root);
        let expect = ComplexPoly::from_roots(c(2.0, 1.0), &[(c(-1.0, 0.0), 2)]);
        for k in 0..3 {
            assert!((q.coeff(k) - expect.coeff(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn taylor_shift() {
        // p(z) = z^2 at a = 1: (z-1)^2 + 2(z-1) + 1
        let p = ComplexPoly::from_real(&[0.0, 0.0, 1.0]);
        let t = p.taylor_at(c(1.0, 0.0), 3);
        assert!((t[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((t[1] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((t[2] - c(1.0, 0.0)).norm() < 1e-15);
    }
}
