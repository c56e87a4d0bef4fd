//! The defining real polynomial of the inflection curve.
//!
//! For `R = Q/P` with Wronskian `W = Q'P - QP'`, the curve is the zero set
//! of
//!
//! ```text
//! F(z, zbar) = (W(z) conj(P(z))^2 - conj(W(z)) P(z)^2) / (2i)
//! ```
//!
//! rewritten in real coordinates `z = x + iy`. Off the poles this equals
//! `|P(z)|^4 * Im R'(z)`; unlike `Im R'` it is finite at the poles, which
//! is what makes the poles traceable as curve points.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Error;
use crate::jsonutil::sig12;
use crate::ratfun::{wronskian, RationalFunction};

/// Relative tolerance used both for the degree trim and for discarding the
/// imaginary residue left over by the change to real coordinates.
pub const BIVARIATE_TRIM_TOL: f64 = 1e-9;

/// Dense real polynomial in `x, y`; `coeff(i, j)` multiplies `x^i y^j`.
#[derive(Clone, Debug)]
pub struct RealBivariatePoly {
    coeffs: Vec<f64>,
    nx: usize,
    ny: usize,
}

impl RealBivariatePoly {
    pub fn zero() -> Self {
        Self {
            coeffs: Vec::new(),
            nx: 0,
            ny: 0,
        }
    }

    pub fn from_triples(triples: &[(usize, usize, f64)]) -> Self {
        let nx = triples.iter().map(|t| t.0 + 1).max().unwrap_or(0);
        let ny = triples.iter().map(|t| t.1 + 1).max().unwrap_or(0);
        let mut coeffs = vec![0.0; nx * ny];
        for &(i, j, c) in triples {
            coeffs[i * ny + j] += c;
        }
        Self { coeffs, nx, ny }
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i < self.nx && j < self.ny {
            self.coeffs[i * self.ny + j]
        } else {
            0.0
        }
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.max_coeff_norm() == 0.0
    }

    /// Largest `i + j` carrying a coefficient above the relative trim
    /// tolerance; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        let cutoff = BIVARIATE_TRIM_TOL * self.max_coeff_norm();
        let mut best: Option<usize> = None;
        for i in 0..self.nx {
            for j in 0..self.ny {
                if self.coeffs[i * self.ny + j].abs() > cutoff {
                    best = Some(best.map_or(i + j, |b| b.max(i + j)));
                }
            }
        }
        best
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for i in (0..self.nx).rev() {
            let row = &self.coeffs[i * self.ny..(i + 1) * self.ny];
            let mut ry = 0.0;
            for &c in row.iter().rev() {
                ry = ry * y + c;
            }
            acc = acc * x + ry;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> f64 {
        self.eval(z.re, z.im)
    }

    pub fn partial_x(&self) -> Self {
        if self.nx <= 1 {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; (self.nx - 1) * self.ny];
        for i in 1..self.nx {
            for j in 0..self.ny {
                coeffs[(i - 1) * self.ny + j] = i as f64 * self.coeffs[i * self.ny + j];
            }
        }
        Self {
            coeffs,
            nx: self.nx - 1,
            ny: self.ny,
        }
    }

    pub fn partial_y(&self) -> Self {
        if self.ny <= 1 {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; self.nx * (self.ny - 1)];
        for i in 0..self.nx {
            for j in 1..self.ny {
                coeffs[i * (self.ny - 1) + (j - 1)] = j as f64 * self.coeffs[i * self.ny + j];
            }
        }
        Self {
            coeffs,
            nx: self.nx,
            ny: self.ny - 1,
        }
    }

    /// Same zero set, scaled so the largest coefficient has magnitude one.
    pub fn normalized(&self) -> Self {
        let scale = self.max_coeff_norm();
        if scale == 0.0 {
            return self.clone();
        }
        Self {
            coeffs: self.coeffs.iter().map(|c| c / scale).collect(),
            nx: self.nx,
            ny: self.ny,
        }
    }

    /// `{"coeffs": [[i, j, c], ...], "degree": d}` with entries above the
    /// trim tolerance.
    pub fn to_json(&self) -> Value {
        let cutoff = BIVARIATE_TRIM_TOL * self.max_coeff_norm();
        let mut entries = Vec::new();
        for i in 0..self.nx {
            for j in 0..self.ny {
                let c = self.coeffs[i * self.ny + j];
                if c.abs() > cutoff {
                    entries.push(json!([i, j, sig12(c)]));
                }
            }
        }
        json!({
            "coeffs": entries,
            "degree": self.total_degree(),
        })
    }
}

/// Report on the degree bookkeeping of the defining polynomial.
#[derive(Clone, Copy, Debug)]
pub struct DegreeReport {
    /// Degree of the Wronskian.
    pub wronskian_degree: usize,
    /// Upper bound `deg W + 2 deg P`.
    pub bound: usize,
    /// Total degree actually attained.
    pub actual: usize,
    /// Degree predicted for generic coefficients.
    pub generic_degree: usize,
    pub generic_formula_matches: bool,
}

impl DegreeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "wronskian_degree": self.wronskian_degree,
            "bound": self.bound,
            "actual": self.actual,
            "generic_degree": self.generic_degree,
            "generic_formula_matches": self.generic_formula_matches,
        })
    }
}

/// Precomputed data for one vector field: the rational function, its
/// derivative, and the defining polynomial of the inflection curve.
#[derive(Clone, Debug)]
pub struct InflectionCurve {
    r: RationalFunction,
    r_prime: RationalFunction,
    f: RealBivariatePoly,
}

impl InflectionCurve {
    pub fn new(r: RationalFunction) -> Result<Self, Error> {
        let f = defining_polynomial(&r)?;
        let r_prime = r.derivative()?;
        Ok(Self { r, r_prime, f })
    }

    pub fn rational(&self) -> &RationalFunction {
        &self.r
    }

    pub fn derivative(&self) -> &RationalFunction {
        &self.r_prime
    }

    pub fn defining_polynomial(&self) -> &RealBivariatePoly {
        &self.f
    }

    /// `Im R'(z)`; errors within pole proximity of `R'`.
    pub fn im_r_prime(&self, z: Complex64) -> Result<f64, Error> {
        self.r_prime
            .eval(z)
            .map(|v| v.im)
            .ok_or(Error::PoleProximity)
    }

    /// The inflection expression of the underlying real vector field
    /// `(u, v) = (Re R, Im R)`:
    ///
    /// ```text
    /// u (u v_x + v v_y) - v (u u_x + v u_y)
    /// ```
    ///
    /// with partials taken by central finite differences at step
    /// `h = 1e-4 max(1, |z|)`. Equals `|R|^2 Im R'` up to the
    /// finite-difference error.
    pub fn real_field_inflection_expression(&self, z: Complex64) -> Result<f64, Error> {
        let h = 1e-4 * z.norm().max(1.0);
        let at = |w: Complex64| self.r.eval(w).ok_or(Error::PoleProximity);
        let center = at(z)?;
        let xp = at(z + Complex64::new(h, 0.0))?;
        let xm = at(z - Complex64::new(h, 0.0))?;
        let yp = at(z + Complex64::new(0.0, h))?;
        let ym = at(z - Complex64::new(0.0, h))?;
        let (u, v) = (center.re, center.im);
        let ux = (xp.re - xm.re) / (2.0 * h);
        let vx = (xp.im - xm.im) / (2.0 * h);
        let uy = (yp.re - ym.re) / (2.0 * h);
        let vy = (yp.im - ym.im) / (2.0 * h);
        Ok(u * (u * vx + v * vy) - v * (u * ux + v * uy))
    }

    pub fn degree_report(&self) -> DegreeReport {
        let w = wronskian(self.r.numerator(), self.r.denominator());
        let n = w.degree().unwrap_or(0);
        let k = self.r.num_degree().unwrap_or(0);
        let l = self.r.den_degree();
        let bound = n + 2 * l;
        let actual = self.f.total_degree().unwrap_or(0);
        let generic_degree = if k != l {
            k + 3 * l - 1
        } else {
            4 * l.max(1) - 2
        };
        DegreeReport {
            wronskian_degree: n,
            bound,
            actual,
            generic_degree,
            generic_formula_matches: actual == generic_degree,
        }
    }
}

/// Builds the defining polynomial of the inflection curve of `R`.
///
/// Errors with [`Error::Degenerate`] when `R` is constant (zero Wronskian).
/// The result is unnormalized so that `F(x, y) = |P(z)|^4 Im R'(z)` holds
/// exactly off the poles; use [`RealBivariatePoly::normalized`] where only
/// the zero set matters.
pub fn defining_polynomial(r: &RationalFunction) -> Result<RealBivariatePoly, Error> {
    let w = wronskian(r.numerator(), r.denominator());
    if w.is_zero() {
        return Err(Error::Degenerate("constant rational function".into()));
    }
    let p2 = r.denominator() * r.denominator();
    let p2_conj = p2.conj_coeffs();
    let w_conj = w.conj_coeffs();

    // Coefficient matrix over the monomials z^i zbar^j, then divided by 2i.
    let nz = w.coeffs().len().max(p2.coeffs().len());
    let half_inv_i = Complex64::new(0.0, -0.5); // 1/(2i)
    let mut m = vec![vec![Complex64::new(0.0, 0.0); nz]; nz];
    for (i, &wi) in w.coeffs().iter().enumerate() {
        for (j, &pj) in p2_conj.coeffs().iter().enumerate() {
            m[i][j] += wi * pj * half_inv_i;
        }
    }
    for (i, &pi) in p2.coeffs().iter().enumerate() {
        for (j, &wj) in w_conj.coeffs().iter().enumerate() {
            m[i][j] -= pi * wj * half_inv_i;
        }
    }

    // Expand z^i zbar^j = (x+iy)^i (x-iy)^j into the x,y basis.
    let dmax = 2 * nz;
    let mut binom = vec![vec![0.0f64; dmax + 1]; dmax + 1];
    for n in 0..=dmax {
        binom[n][0] = 1.0;
        for k in 1..=n {
            binom[n][k] = binom[n - 1][k - 1] + if k <= n - 1 { binom[n - 1][k] } else { 0.0 };
        }
    }
    const IPOW: [Complex64; 4] = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dmax + 1]; dmax + 1];
    for (i, row) in m.iter().enumerate() {
        for (j, &mij) in row.iter().enumerate() {
            if mij.norm() == 0.0 {
                continue;
            }
            for a in 0..=i {
                for b in 0..=j {
                    // (iy)^{i-a} (-iy)^{j-b} = i^{(i-a) + 3(j-b)} y^{...}
                    let phase = IPOW[((i - a) + 3 * (j - b)) % 4];
                    let coeff = mij * binom[i][a] * binom[j][b] * phase;
                    out[a + b][(i - a) + (j - b)] += coeff;
                }
            }
        }
    }

    let scale = out
        .iter()
        .flatten()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let max_im = out
        .iter()
        .flatten()
        .map(|c| c.im.abs())
        .fold(0.0, f64::max);
    if scale > 0.0 && max_im > BIVARIATE_TRIM_TOL * scale {
        return Err(Error::Inconsistent(format!(
            "imaginary residue {max_im:e} in the defining polynomial"
        )));
    }

    let mut triples = Vec::new();
    for (i, row) in out.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if c.re != 0.0 {
                triples.push((i, j, c.re));
            }
        }
    }
    Ok(RealBivariatePoly::from_triples(&triples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ComplexPoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_over_z() -> RationalFunction {
        RationalFunction::new(
            ComplexPoly::one(),
            ComplexPoly::monomial(c(1.0, 0.0), 1),
        )
        .unwrap()
    }

    #[test]
    fn simple_pole_gives_2xy() {
        let f = defining_polynomial(&one_over_z()).unwrap();
        assert_eq!(f.total_degree(), Some(2));
        assert!((f.coeff(1, 1) - 2.0).abs() < 1e-12);
        assert!(f.coeff(0, 0).abs() < 1e-12);
        assert!(f.coeff(2, 0).abs() < 1e-12);
        assert!(f.coeff(0, 2).abs() < 1e-12);
    }

    #[test]
    fn z_squared_gives_2y() {
        let r = RationalFunction::from_poly(ComplexPoly::monomial(c(1.0, 0.0), 2));
        let f = defining_polynomial(&r).unwrap();
        assert_eq!(f.total_degree(), Some(1));
        assert!((f.coeff(0, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn noncompact_example_gives_2xy() {
        // R = z + 1/z = (z^2 + 1)/z
        let r = RationalFunction::new(
            ComplexPoly::from_real(&[1.0, 0.0, 1.0]),
            ComplexPoly::monomial(c(1.0, 0.0), 1),
        )
        .unwrap();
        let f = defining_polynomial(&r).unwrap();
        assert_eq!(f.total_degree(), Some(2));
        assert!((f.coeff(1, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_is_degenerate() {
        let r = RationalFunction::constant(c(2.0, 3.0));
        assert!(matches!(
            defining_polynomial(&r),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn im_r_prime_examples() {
        let r = RationalFunction::from_poly(ComplexPoly::monomial(c(1.0, 0.0), 2));
        let curve = InflectionCurve::new(r).unwrap();
        assert!((curve.im_r_prime(c(1.0, 1.0)).unwrap() - 2.0).abs() < 1e-12);

        // Real-coefficient R = z^d has Im R' = 0 on the real axis.
        for d in 2..=5 {
            let r = RationalFunction::from_poly(ComplexPoly::monomial(c(1.0, 0.0), d));
            let curve = InflectionCurve::new(r).unwrap();
            assert!(curve.im_r_prime(c(1.37, 0.0)).unwrap().abs() < 1e-12);
        }

        let r = RationalFunction::from_poly(ComplexPoly::monomial(c(1.0, 1.0), 1));
        let curve = InflectionCurve::new(r).unwrap();
        assert!((curve.im_r_prime(c(5.0, -3.0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_field_expression_examples() {
        // R = z^2 at z = 1: everything real, expression 0.
        let r = RationalFunction::from_poly(ComplexPoly::monomial(c(1.0, 0.0), 2));
        let curve = InflectionCurve::new(r).unwrap();
        assert!(curve
            .real_field_inflection_expression(c(1.0, 0.0))
            .unwrap()
            .abs()
            < 1e-8);

        // R = (1+i)z at z = 1: |1+i|^2 * Im(1+i) = 2.
        let r = RationalFunction::from_poly(ComplexPoly::monomial(c(1.0, 1.0), 1));
        let curve = InflectionCurve::new(r).unwrap();
        let v = curve.real_field_inflection_expression(c(1.0, 0.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-6);

        // R = 1/z at z = 1+i: matches |R|^2 Im R' within finite-difference error.
        let curve = InflectionCurve::new(one_over_z()).unwrap();
        let z = c(1.0, 1.0);
        let lhs = curve.real_field_inflection_expression(z).unwrap();
        let r_val = curve.rational().eval(z).unwrap();
        let rhs = r_val.norm_sqr() * curve.im_r_prime(z).unwrap();
        assert!((lhs - rhs).abs() < 1e-5);
    }

    #[test]
    fn identity_with_p4_im_rprime() {
        let curve = InflectionCurve::new(one_over_z()).unwrap();
        for &z in &[c(1.0, 0.5), c(-0.3, 1.2), c(2.0, -0.7)] {
            let f = curve.defining_polynomial().eval_complex(z);
            let p = curve.rational().denominator().eval(z).norm();
            let rhs = p.powi(4) * curve.im_r_prime(z).unwrap();
            assert!((f - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn degree_report_examples() {
        // R = 1/z: n = 0, bound = 2, actual = 2.
        let rep = InflectionCurve::new(one_over_z()).unwrap().degree_report();
        assert_eq!(rep.wronskian_degree, 0);
        assert_eq!(rep.bound, 2);
        assert_eq!(rep.actual, 2);

        // R = z^3: bound = 2, actual = 2 = k + 3l - 1.
        let r = RationalFunction::from_poly(ComplexPoly::monomial(c(1.0, 0.0), 3));
        let rep = InflectionCurve::new(r).unwrap().degree_report();
        assert_eq!(rep.bound, 2);
        assert_eq!(rep.actual, 2);
        assert!(rep.generic_formula_matches);

        // R = (z + i)/z: k = l = 1, actual = 4l - 2 = 2.
        let r = RationalFunction::new(
            ComplexPoly::new(vec![c(0.0, 1.0), c(1.0, 0.0)]),
            ComplexPoly::monomial(c(1.0, 0.0), 1),
        )
        .unwrap();
        let rep = InflectionCurve::new(r).unwrap().degree_report();
        assert_eq!(rep.actual, 2);
        assert!(rep.generic_formula_matches);
    }

    #[test]
    fn real_coefficients_flip_sign_under_conjugation() {
        // For real-coefficient R, F(x, -y) = -F(x, y).
        let r = RationalFunction::new(
            ComplexPoly::from_real(&[1.0, 2.0, 1.0]),
            ComplexPoly::from_real(&[0.5, -1.0, 0.0, 1.0]),
        )
        .unwrap();
        let f = defining_polynomial(&r).unwrap();
        for &(x, y) in &[(0.3, 0.8), (-1.1, 0.4), (2.0, -1.5)] {
            let a = f.eval(x, y);
            let b = f.eval(x, -y);
            assert!((a + b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}
