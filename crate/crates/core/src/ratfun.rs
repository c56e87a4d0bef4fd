//! Rational functions in lowest terms with monic denominator.
//!
//! Reduction works by common-root matching: roots of the denominator are
//! evaluated in the numerator and matched factors are deflated. Euclidean
//! remainder chains are avoided; they are numerically unstable in float
//! arithmetic.

use num_complex::Complex64;

use crate::error::Error;
use crate::poly::ComplexPoly;
use crate::roots::roots;

/// Relative threshold below which `|P(z)|` counts as "at a pole".
pub const POLE_PROXIMITY_REL: f64 = 1e-12;

/// Relative residual below which a denominator root also counts as a
/// numerator root during reduction.
const COMMON_ROOT_REL: f64 = 1e-8;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `W = Q' P - Q P'`, the numerator of `(Q/P)'`.
pub fn wronskian(q: &ComplexPoly, p: &ComplexPoly) -> ComplexPoly {
    &(&q.derivative() * p) - &(q * &p.derivative())
}

#[derive(Clone, Debug)]
pub struct RationalFunction {
    numer: ComplexPoly,
    denom: ComplexPoly,
}

impl RationalFunction {
    /// Builds `numer / denom` reduced to lowest terms with monic denominator.
    pub fn new(numer: ComplexPoly, denom: ComplexPoly) -> Result<Self, Error> {
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if numer.is_zero() {
            return Ok(Self::zero());
        }
        if denom.degree() == Some(0) {
            let inv = ONE / denom.coeff(0);
            return Ok(Self {
                numer: numer.scale(inv),
                denom: ComplexPoly::one(),
            });
        }

        let mut numer = numer;
        let mut denom = denom;
        for (r, m) in roots(&denom)? {
            let mut cancel = 0;
            while cancel < m {
                if numer.degree().map_or(true, |d| d == 0) {
                    break;
                }
                let scale = numer.eval_abs(r.norm()).max(1e-300);
                if numer.eval(r).norm() <= COMMON_ROOT_REL * scale {
                    numer = numer.deflate(r);
                    cancel += 1;
                } else {
                    break;
                }
            }
            for _ in 0..cancel {
                denom = denom.deflate(r);
            }
        }
        Ok(Self::from_reduced(numer, denom))
    }

    /// Wraps parts already known to be coprime; only normalizes the
    /// denominator to monic.
    pub(crate) fn from_reduced(numer: ComplexPoly, denom: ComplexPoly) -> Self {
        let lead = denom.leading().expect("nonzero denominator");
        let inv = ONE / lead;
        Self {
            numer: numer.scale(inv),
            denom: denom.scale(inv),
        }
    }

    pub fn from_poly(p: ComplexPoly) -> Self {
        Self {
            numer: p,
            denom: ComplexPoly::one(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_poly(ComplexPoly::constant(c))
    }

    pub fn zero() -> Self {
        Self {
            numer: ComplexPoly::zero(),
            denom: ComplexPoly::one(),
        }
    }

    /// The identity map `z`.
    pub fn var() -> Self {
        Self::from_poly(ComplexPoly::monomial(ONE, 1))
    }

    pub fn numerator(&self) -> &ComplexPoly {
        &self.numer
    }

    pub fn denominator(&self) -> &ComplexPoly {
        &self.denom
    }

    /// Degree of the numerator (`None` for the zero function).
    pub fn num_degree(&self) -> Option<usize> {
        self.numer.degree()
    }

    /// Degree of the denominator.
    pub fn den_degree(&self) -> usize {
        self.denom.degree().expect("nonzero denominator")
    }

    /// Degree as a map of the sphere: `max(deg numer, deg denom)`.
    pub fn map_degree(&self) -> usize {
        self.num_degree().unwrap_or(0).max(self.den_degree())
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num_degree().unwrap_or(0) == 0 && self.den_degree() == 0
    }

    pub fn as_constant(&self) -> Option<Complex64> {
        if self.is_constant() {
            Some(self.numer.coeff(0) / self.denom.coeff(0))
        } else {
            None
        }
    }

    /// Evaluation; `None` marks a point at or near a pole.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        let dv = self.denom.eval(z);
        if dv.norm() <= POLE_PROXIMITY_REL * self.denom.eval_abs(z.norm()).max(1e-300) {
            None
        } else {
            Some(self.numer.eval(z) / dv)
        }
    }

    /// Derivative in lowest terms.
    ///
    /// The numerator of the derivative is the Wronskian deflated by the
    /// shared pole factors; the denominator is rebuilt from the pole
    /// divisor with each order raised by one. This avoids a generic
    /// reduction of `W / P^2`.
    pub fn derivative(&self) -> Result<Self, Error> {
        if self.numer.is_zero() || self.is_constant() {
            return Ok(Self::zero());
        }
        let w = wronskian(&self.numer, &self.denom);
        if w.is_zero() {
            return Ok(Self::zero());
        }
        if self.den_degree() == 0 {
            return Ok(Self::from_poly(w.scale(ONE / self.denom.coeff(0))));
        }
        let pole_divisor = roots(&self.denom)?;
        let mut numer = w;
        for &(r, m) in &pole_divisor {
            for _ in 1..m {
                numer = numer.deflate(r);
            }
        }
        let denom_roots: Vec<(Complex64, usize)> =
            pole_divisor.iter().map(|&(r, m)| (r, m + 1)).collect();
        let denom = ComplexPoly::from_roots(ONE, &denom_roots);
        Ok(Self::from_reduced(numer, denom))
    }

    /// The coefficientwise conjugate map, satisfying
    /// `f_sigma(w) = conj(f(conj(w)))`.
    pub fn conjugate_map(&self) -> Self {
        Self {
            numer: self.numer.conj_coeffs(),
            denom: self.denom.conj_coeffs(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            numer: (&self.numer).scale(Complex64::new(-1.0, 0.0)),
            denom: self.denom.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, Error> {
        let numer = &(&self.numer * &rhs.denom) + &(&rhs.numer * &self.denom);
        let denom = &self.denom * &rhs.denom;
        Self::new(numer, denom)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, Error> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, Error> {
        Self::new(&self.numer * &rhs.numer, &self.denom * &rhs.denom)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, Error> {
        if rhs.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Self::new(&self.numer * &rhs.denom, &self.denom * &rhs.numer)
    }

    pub fn sub_constant(&self, c: Complex64) -> Self {
        let numer = &self.numer - &self.denom.scale(c);
        Self {
            numer,
            denom: self.denom.clone(),
        }
    }

    /// Finite poles with orders: the roots of the denominator.
    pub fn denominator_roots(&self) -> Result<Vec<(Complex64, usize)>, Error> {
        if self.den_degree() == 0 {
            return Ok(Vec::new());
        }
        roots(&self.denom)
    }

    /// Zeros with orders: the roots of the numerator.
    pub fn numerator_roots(&self) -> Result<Vec<(Complex64, usize)>, Error> {
        if self.numer.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        roots(&self.numer)
    }

    /// Partial fraction decomposition.
    ///
    /// The polynomial part comes from long division; the coefficients of
    /// `(z-a)^{-j}` come from the truncated Taylor series of
    /// `(z-a)^m f(z) = A / (B / (z-a)^m)` at `a`.
    pub fn partial_fractions(&self) -> Result<PartialFractions, Error> {
        let (poly_part, _) = self.numer.div_rem(&self.denom)?;
        let mut terms = Vec::new();
        for (a, m) in self.denominator_roots()? {
            let mut b_reduced = self.denom.clone();
            for _ in 0..m {
                b_reduced = b_reduced.deflate(a);
            }
            let ta = self.numer.taylor_at(a, m);
            let tb = b_reduced.taylor_at(a, m);
            // Power-series division ta / tb truncated at order m.
            let b0 = tb[0];
            let mut series = vec![Complex64::new(0.0, 0.0); m];
            for t in 0..m {
                let mut acc = ta[t];
                for s in 0..t {
                    acc -= series[s] * tb[t - s];
                }
                series[t] = acc / b0;
            }
            // c_{a,j} = series[m - j], j = 1..m.
            let coefficients: Vec<Complex64> =
                (1..=m).map(|j| series[m - j]).collect();
            terms.push(PoleExpansion {
                location: a,
                order: m,
                coefficients,
            });
        }
        Ok(PartialFractions {
            polynomial_part: poly_part,
            terms,
        })
    }

    /// `{"numerator": [[re, im], ...], "denominator": [[re, im], ...]}`,
    /// coefficients in ascending powers.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "numerator": crate::jsonutil::poly_json(&self.numer),
            "denominator": crate::jsonutil::poly_json(&self.denom),
        })
    }

    /// Residues at the finite poles: the `(z-a)^{-1}` coefficients.
    pub fn residues(&self) -> Result<Vec<(Complex64, Complex64)>, Error> {
        Ok(self
            .partial_fractions()?
            .terms
            .iter()
            .map(|t| (t.location, t.coefficients[0]))
            .collect())
    }
}

/// Principal part data at a single pole.
#[derive(Clone, Debug)]
pub struct PoleExpansion {
    pub location: Complex64,
    pub order: usize,
    /// `coefficients[j-1]` is the coefficient of `(z - location)^{-j}`.
    pub coefficients: Vec<Complex64>,
}

/// `f = polynomial_part + sum over poles of the principal parts`.
#[derive(Clone, Debug)]
pub struct PartialFractions {
    pub polynomial_part: ComplexPoly,
    pub terms: Vec<PoleExpansion>,
}

impl PartialFractions {
    /// Flattened `(pole, order j, coefficient)` triples.
    pub fn iter_terms(&self) -> impl Iterator<Item = (Complex64, usize, Complex64)> + '_ {
        self.terms.iter().flat_map(|t| {
            t.coefficients
                .iter()
                .enumerate()
                .map(move |(i, &c)| (t.location, i + 1, c))
        })
    }

    /// Reassembles the decomposition into a rational function.
    pub fn reconstruct(&self) -> Result<RationalFunction, Error> {
        let mut acc = RationalFunction::from_poly(self.polynomial_part.clone());
        for t in &self.terms {
            for (j, &c) in t.coefficients.iter().enumerate() {
                let denom = ComplexPoly::from_roots(ONE, &[(t.location, j + 1)]);
                let term = RationalFunction::new(ComplexPoly::constant(c), denom)?;
                acc = acc.add(&term)?;
            }
        }
        Ok(acc)
    }
}
