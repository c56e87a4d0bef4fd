//! Exactness of rational differentials: a rational `f` is a rational
//! derivative exactly when every finite residue of `f(z) dz` vanishes, in
//! which case a rational primitive is assembled from the partial fraction
//! decomposition.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Error;
use crate::jsonutil::complex_json;
use crate::poly::ComplexPoly;
use crate::ratfun::RationalFunction;

/// Default relative residue tolerance. The zero-residue condition is
/// codimension one and float-fragile, so it is exposed as a knob.
pub const DEFAULT_RESIDUE_TOL: f64 = 1e-8;

/// Residue report for one pole.
#[derive(Clone, Debug)]
pub struct ResidueEntry {
    pub pole: Complex64,
    pub residue: Complex64,
    /// Largest principal-part coefficient at this pole; the scale against
    /// which the residue is compared.
    pub scale: f64,
}

#[derive(Clone, Debug)]
pub struct ExactnessReport {
    pub exact: bool,
    pub residues: Vec<ResidueEntry>,
}

impl ExactnessReport {
    pub fn to_json(&self) -> Value {
        json!({
            "exact": self.exact,
            "residues": self.residues.iter().map(|e| json!({
                "pole": complex_json(e.pole),
                "residue": complex_json(e.residue),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Tests whether every finite residue vanishes relative to the local
/// principal-part scale.
pub fn is_exact(f: &RationalFunction, tol: f64) -> Result<ExactnessReport, Error> {
    let pf = f.partial_fractions()?;
    let mut exact = true;
    let mut residues = Vec::new();
    for term in &pf.terms {
        let scale = term
            .coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let residue = term.coefficients[0];
        if residue.norm() > tol * scale {
            exact = false;
        }
        residues.push(ResidueEntry {
            pole: term.location,
            residue,
            scale,
        });
    }
    Ok(ExactnessReport { exact, residues })
}

/// The rational primitive of an exact `f`, with integration constant zero:
///
/// ```text
/// R = int p  -  sum_a sum_{j>=2} c_{a,j} / ((j-1)(z-a)^{j-1})
/// ```
///
/// Errors with [`Error::NotExact`] when a residue is nonzero.
pub fn primitive(f: &RationalFunction) -> Result<RationalFunction, Error> {
    let pf = f.partial_fractions()?;
    for term in &pf.terms {
        let scale = term
            .coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        if term.coefficients[0].norm() > DEFAULT_RESIDUE_TOL * scale {
            return Err(Error::NotExact {
                pole: term.location,
                residue: term.coefficients[0],
            });
        }
    }

    // Integrate the polynomial part.
    let p = &pf.polynomial_part;
    let mut int_coeffs = vec![Complex64::new(0.0, 0.0); p.coeffs().len() + 1];
    for (k, &c) in p.coeffs().iter().enumerate() {
        int_coeffs[k + 1] = c / (k as f64 + 1.0);
    }
    let int_poly = ComplexPoly::new(int_coeffs);

    // Principal parts over the common denominator prod (z-a)^{m_a - 1}.
    let denom_roots: Vec<(Complex64, usize)> = pf
        .terms
        .iter()
        .filter(|t| t.order >= 2)
        .map(|t| (t.location, t.order - 1))
        .collect();
    let denom = ComplexPoly::from_roots(Complex64::new(1.0, 0.0), &denom_roots);

    let mut principal = ComplexPoly::zero();
    for term in &pf.terms {
        if term.order < 2 {
            continue;
        }
        // Cofactor of this pole in the common denominator.
        let cofactor_roots: Vec<(Complex64, usize)> = denom_roots
            .iter()
            .copied()
            .filter(|&(a, _)| (a - term.location).norm() > 0.0)
            .collect();
        let cofactor = ComplexPoly::from_roots(Complex64::new(1.0, 0.0), &cofactor_roots);
        for j in 2..=term.order {
            let c = term.coefficients[j - 1];
            // -c / ((j-1)(z-a)^{j-1}) over the common denominator:
            // multiply by (z-a)^{m_a - 1 - (j-1)} and the cofactor.
            let shift =
                ComplexPoly::from_roots(Complex64::new(1.0, 0.0), &[(term.location, term.order - j)]);
            let scaled = (&shift * &cofactor).scale(-c / (j as f64 - 1.0));
            principal = &principal + &scaled;
        }
    }

    let numer = &(&int_poly * &denom) + &principal;
    RationalFunction::new(numer, denom)
}

/// Pole report for the dessin-side restriction of an exact differential.
#[derive(Clone, Debug)]
pub struct DessinPole {
    pub location: Complex64,
    pub order: usize,
    /// Incident tangent rays at the pole-vertex: `2 * order`.
    pub ray_count: usize,
}

/// Asserts that every finite pole of an exact `f` has order at least two
/// and reports the forced vertex data. A simple finite pole with a
/// vanishing residue is a contradiction and reported as such.
pub fn dessin_pole_check(f: &RationalFunction) -> Result<Vec<DessinPole>, Error> {
    let report = is_exact(f, DEFAULT_RESIDUE_TOL)?;
    if !report.exact {
        let bad = report
            .residues
            .iter()
            .max_by(|a, b| {
                (a.residue.norm() / a.scale)
                    .partial_cmp(&(b.residue.norm() / b.scale))
                    .unwrap()
            })
            .expect("non-exact implies a residue entry");
        return Err(Error::NotExact {
            pole: bad.pole,
            residue: bad.residue,
        });
    }
    let mut out = Vec::new();
    for (location, order) in f.denominator_roots()? {
        if order < 2 {
            return Err(Error::Inconsistent(format!(
                "simple finite pole at {location} on an exact differential"
            )));
        }
        out.push(DessinPole {
            location,
            order,
            ray_count: 2 * order,
        });
    }
    Ok(out)
}
