//! Normal forms of exact rational maps of degree at most three.
//!
//! The class is determined solely by the finite-pole order partition: an
//! exact map cannot have a simple finite pole, which at these degrees
//! leaves a short list of partitions. Parameters are extracted so that the
//! class reconstructs the input map.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Error;
use crate::exactness::{is_exact, DEFAULT_RESIDUE_TOL};
use crate::jsonutil::{complex_json, sig12};
use crate::monodromy::{critical_data, CriticalValue};
use crate::poly::ComplexPoly;
use crate::ratfun::RationalFunction;

/// Relative tolerance for the `Im beta = 0` decision.
pub const IM_BETA_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum DegreeClass {
    /// `f = a z + b`
    Line { a: Complex64, b: Complex64 },
    /// `f = alpha (z - p)^2 + beta`
    QuadPoly {
        alpha: Complex64,
        beta: Complex64,
        p: Complex64,
    },
    /// `f = beta + alpha / (z - p)^2`
    QuadFiniteDoublePole {
        alpha: Complex64,
        beta: Complex64,
        p: Complex64,
    },
    /// `f = a (z - p)^3 + b (z - p) + c` (depressed cubic)
    CubicPoly {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        p: Complex64,
    },
    /// `f = c + a / (z - p)^3 + b / (z - p)^2`
    CubicTriplePole {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        p: Complex64,
    },
    /// `f = a (z - p) + b + c / (z - p)^2`
    CubicDoublePlusInfinity {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        p: Complex64,
    },
}

impl DegreeClass {
    pub fn degree(&self) -> usize {
        match self {
            DegreeClass::Line { .. } => 1,
            DegreeClass::QuadPoly { .. } | DegreeClass::QuadFiniteDoublePole { .. } => 2,
            _ => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DegreeClass::Line { .. } => "LINE",
            DegreeClass::QuadPoly { .. } => "QUAD_POLY",
            DegreeClass::QuadFiniteDoublePole { .. } => "QUAD_FINITE_DOUBLE_POLE",
            DegreeClass::CubicPoly { .. } => "CUBIC_POLY",
            DegreeClass::CubicTriplePole { .. } => "CUBIC_TRIPLE_POLE",
            DegreeClass::CubicDoublePlusInfinity { .. } => "CUBIC_DOUBLE_PLUS_INFINITY",
        }
    }

    /// Rebuilds the rational map from the normal-form parameters.
    pub fn reconstruct(&self) -> Result<RationalFunction, Error> {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            DegreeClass::Line { a, b } => {
                Ok(RationalFunction::from_poly(ComplexPoly::new(vec![b, a])))
            }
            DegreeClass::QuadPoly { alpha, beta, p } => {
                let shifted = ComplexPoly::from_roots(alpha, &[(p, 2)]);
                Ok(RationalFunction::from_poly(
                    &shifted + &ComplexPoly::constant(beta),
                ))
            }
            DegreeClass::QuadFiniteDoublePole { alpha, beta, p } => {
                let denom = ComplexPoly::from_roots(one, &[(p, 2)]);
                let numer = &denom.scale(beta) + &ComplexPoly::constant(alpha);
                RationalFunction::new(numer, denom)
            }
            DegreeClass::CubicPoly { a, b, c, p } => {
                let cubic = ComplexPoly::from_roots(a, &[(p, 3)]);
                let linear = ComplexPoly::new(vec![c - b * p, b]);
                Ok(RationalFunction::from_poly(&cubic + &linear))
            }
            DegreeClass::CubicTriplePole { a, b, c, p } => {
                let denom = ComplexPoly::from_roots(one, &[(p, 3)]);
                let quad = ComplexPoly::from_roots(b, &[(p, 1)]);
                let numer = &(&denom.scale(c) + &ComplexPoly::constant(a)) + &quad;
                RationalFunction::new(numer, denom)
            }
            DegreeClass::CubicDoublePlusInfinity { a, b, c, p } => {
                let denom = ComplexPoly::from_roots(one, &[(p, 2)]);
                let linear = ComplexPoly::new(vec![b - a * p, a]);
                let numer = &(&linear * &denom) + &ComplexPoly::constant(c);
                RationalFunction::new(numer, denom)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let params = match *self {
            DegreeClass::Line { a, b } => json!({
                "a": complex_json(a), "b": complex_json(b),
            }),
            DegreeClass::QuadPoly { alpha, beta, p }
            | DegreeClass::QuadFiniteDoublePole { alpha, beta, p } => json!({
                "alpha": complex_json(alpha),
                "beta": complex_json(beta),
                "p": complex_json(p),
            }),
            DegreeClass::CubicPoly { a, b, c, p }
            | DegreeClass::CubicTriplePole { a, b, c, p }
            | DegreeClass::CubicDoublePlusInfinity { a, b, c, p } => json!({
                "a": complex_json(a),
                "b": complex_json(b),
                "c": complex_json(c),
                "p": complex_json(p),
            }),
        };
        json!({
            "degree": self.degree(),
            "class": self.name(),
            "parameters": params,
        })
    }
}

/// Classifies an exact rational map of degree 1..3 by its pole partition
/// and extracts normal-form parameters.
pub fn classify_exact(f: &RationalFunction) -> Result<DegreeClass, Error> {
    let report = is_exact(f, DEFAULT_RESIDUE_TOL)?;
    if !report.exact {
        let worst = report
            .residues
            .iter()
            .max_by(|a, b| a.residue.norm().partial_cmp(&b.residue.norm()).unwrap())
            .expect("non-exact map has a residue");
        return Err(Error::NotExact {
            pole: worst.pole,
            residue: worst.residue,
        });
    }
    let d = f.map_degree();
    if !(1..=3).contains(&d) {
        return Err(Error::Degenerate(format!(
            "classification covers degrees 1 to 3, got {d}"
        )));
    }

    let pole_orders = f.denominator_roots()?;
    if let Some(&(p, _)) = pole_orders.iter().find(|&&(_, m)| m == 1) {
        return Err(Error::Inconsistent(format!(
            "simple finite pole at {p} on an exact map"
        )));
    }

    let numer = f.numerator();
    match (d, pole_orders.as_slice()) {
        (1, []) => Ok(DegreeClass::Line {
            a: numer.coeff(1),
            b: numer.coeff(0),
        }),
        (2, []) => {
            let alpha = numer.coeff(2);
            let p = -numer.coeff(1) / (2.0 * alpha);
            let beta = numer.eval(p);
            Ok(DegreeClass::QuadPoly { alpha, beta, p })
        }
        (2, &[(p, 2)]) => {
            let pf = f.partial_fractions()?;
            let beta = pf.polynomial_part.coeff(0);
            let alpha = pf.terms[0].coefficients[1];
            Ok(DegreeClass::QuadFiniteDoublePole { alpha, beta, p })
        }
        (3, []) => {
            let a = numer.coeff(3);
            let p = -numer.coeff(2) / (3.0 * a);
            let b = numer.derivative().eval(p);
            let c = numer.eval(p);
            Ok(DegreeClass::CubicPoly { a, b, c, p })
        }
        (3, &[(p, 3)]) => {
            let pf = f.partial_fractions()?;
            let c = pf.polynomial_part.coeff(0);
            let a = pf.terms[0].coefficients[2];
            let b = pf.terms[0].coefficients[1];
            Ok(DegreeClass::CubicTriplePole { a, b, c, p })
        }
        (3, &[(p, 2)]) => {
            let pf = f.partial_fractions()?;
            let a = pf.polynomial_part.coeff(1);
            let b = pf.polynomial_part.eval(p);
            let c = pf.terms[0].coefficients[1];
            Ok(DegreeClass::CubicDoublePlusInfinity { a, b, c, p })
        }
        _ => Err(Error::Inconsistent(
            "pole partition incompatible with an exact map of this degree".into(),
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveGeometry {
    Hyperbola,
    TwoLines,
}

/// Verdict on the degree-two curve in its normal coordinate.
#[derive(Clone, Debug)]
pub struct CurveVerdict {
    /// The normal-form equation all degree-two cases reduce to.
    pub form: &'static str,
    pub im_beta: f64,
    pub reducible: bool,
    pub geometry: CurveGeometry,
    /// Within a factor of ten of the reducibility tolerance; both verdicts
    /// are then suspect.
    pub near_degenerate: bool,
    /// Closed-form change of coordinates to the normal form.
    pub coordinate_map: String,
}

impl CurveVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "form": self.form,
            "im_beta": sig12(self.im_beta),
            "reducible": self.reducible,
            "geometry": match self.geometry {
                CurveGeometry::Hyperbola => "hyperbola",
                CurveGeometry::TwoLines => "two-lines",
            },
            "near_degenerate": self.near_degenerate,
            "coordinate_map": self.coordinate_map,
        })
    }
}

/// For a degree-two class: the curve is affinely (or inverted-affinely)
/// equivalent to `2xy + Im beta = 0`, a smooth hyperbola when
/// `Im beta != 0` and a pair of transverse lines when `Im beta = 0`.
pub fn degree_two_curve_verdict(class: &DegreeClass) -> Result<CurveVerdict, Error> {
    let (alpha, beta, p, inverted) = match *class {
        DegreeClass::QuadPoly { alpha, beta, p } => (alpha, beta, p, false),
        DegreeClass::QuadFiniteDoublePole { alpha, beta, p } => (alpha, beta, p, true),
        _ => {
            return Err(Error::Degenerate(
                "curve verdict applies to degree-two classes".into(),
            ))
        }
    };
    let tol = IM_BETA_TOL * (1.0 + beta.norm());
    let reducible = beta.im.abs() <= tol;
    let sqrt_alpha = alpha.sqrt();
    let coordinate_map = if inverted {
        format!(
            "u = ({} + {}i) / (z - ({} + {}i))",
            sig12(sqrt_alpha.re),
            sig12(sqrt_alpha.im),
            sig12(p.re),
            sig12(p.im)
        )
    } else {
        format!(
            "u = ({} + {}i) * (z - ({} + {}i))",
            sig12(sqrt_alpha.re),
            sig12(sqrt_alpha.im),
            sig12(p.re),
            sig12(p.im)
        )
    };
    Ok(CurveVerdict {
        form: "2xy + Im beta = 0",
        im_beta: beta.im,
        reducible,
        geometry: if reducible {
            CurveGeometry::TwoLines
        } else {
            CurveGeometry::Hyperbola
        },
        near_degenerate: beta.im.abs() <= 10.0 * tol && !reducible
            || reducible && beta.im.abs() > 0.1 * tol,
        coordinate_map,
    })
}

/// Non-pole critical values of a degree-three map with their real-line
/// flags. Additional finite singularities of the curve occur exactly at
/// the flagged values.
pub fn cubic_singularity_trigger(
    f: &RationalFunction,
    real_tol: f64,
) -> Result<Vec<(Complex64, bool)>, Error> {
    let cd = critical_data(f, real_tol)?;
    Ok(cd
        .values
        .iter()
        .zip(cd.real_flags.iter())
        .filter_map(|(v, &flag)| match v {
            CriticalValue::Finite(v) => Some((*v, flag)),
            CriticalValue::Infinity => None,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check_roundtrip(f: &RationalFunction, class: &DegreeClass) {
        let g = class.reconstruct().unwrap();
        for k in 0..20 {
            let theta = 0.37 + k as f64 * 0.31;
            let z = 1.4 * c(theta.cos(), theta.sin());
            let (Some(a), Some(b)) = (f.eval(z), g.eval(z)) else {
                continue;
            };
            assert!(
                (a - b).norm() <= 1e-8 * (1.0 + a.norm()),
                "{} roundtrip failed at {z}",
                class.name()
            );
        }
    }

    #[test]
    fn quad_poly_example() {
        // f = z^2 + i
        let f = RationalFunction::from_poly(ComplexPoly::new(vec![
            c(0.0, 1.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ]));
        let class = classify_exact(&f).unwrap();
        match &class {
            DegreeClass::QuadPoly { alpha, beta, p } => {
                assert!((alpha - c(1.0, 0.0)).norm() < 1e-12);
                assert!((beta - c(0.0, 1.0)).norm() < 1e-12);
                assert!(p.norm() < 1e-12);
            }
            other => panic!("wrong class {}", other.name()),
        }
        check_roundtrip(&f, &class);

        let verdict = degree_two_curve_verdict(&class).unwrap();
        assert!(!verdict.reducible);
        assert_eq!(verdict.geometry, CurveGeometry::Hyperbola);
    }

    #[test]
    fn quad_finite_double_pole_example() {
        // f = 2 + 3/(z-1)^2
        let denom = ComplexPoly::from_roots(c(1.0, 0.0), &[(c(1.0, 0.0), 2)]);
        let numer = &denom.scale(c(2.0, 0.0)) + &ComplexPoly::constant(c(3.0, 0.0));
        let f = RationalFunction::new(numer, denom).unwrap();
        let class = classify_exact(&f).unwrap();
        match &class {
            DegreeClass::QuadFiniteDoublePole { alpha, beta, p } => {
                assert!((alpha - c(3.0, 0.0)).norm() < 1e-10);
                assert!((beta - c(2.0, 0.0)).norm() < 1e-10);
                assert!((p - c(1.0, 0.0)).norm() < 1e-10);
            }
            other => panic!("wrong class {}", other.name()),
        }
        check_roundtrip(&f, &class);

        // beta real: two lines.
        let verdict = degree_two_curve_verdict(&class).unwrap();
        assert!(verdict.reducible);
        assert_eq!(verdict.geometry, CurveGeometry::TwoLines);
    }

    #[test]
    fn cubic_double_plus_infinity_example() {
        // f = z + 1/z^2
        let f = RationalFunction::new(
            ComplexPoly::from_real(&[1.0, 0.0, 0.0, 1.0]),
            ComplexPoly::monomial(c(1.0, 0.0), 2),
        )
        .unwrap();
        let class = classify_exact(&f).unwrap();
        match &class {
            DegreeClass::CubicDoublePlusInfinity { a, b, c: cc, p } => {
                assert!((a - c(1.0, 0.0)).norm() < 1e-10);
                assert!(b.norm() < 1e-10);
                assert!((cc - c(1.0, 0.0)).norm() < 1e-10);
                assert!(p.norm() < 1e-10);
            }
            other => panic!("wrong class {}", other.name()),
        }
        check_roundtrip(&f, &class);
    }

    #[test]
    fn cubic_triple_pole_example() {
        // f = 1 + 1/z^3 + 1/z^2 = (z^3 + z + 1)/z^3
        let f = RationalFunction::new(
            ComplexPoly::from_real(&[1.0, 1.0, 0.0, 1.0]),
            ComplexPoly::monomial(c(1.0, 0.0), 3),
        )
        .unwrap();
        let class = classify_exact(&f).unwrap();
        match &class {
            DegreeClass::CubicTriplePole { a, b, c: cc, p } => {
                assert!((a - c(1.0, 0.0)).norm() < 1e-10);
                assert!((b - c(1.0, 0.0)).norm() < 1e-10);
                assert!((cc - c(1.0, 0.0)).norm() < 1e-10);
                assert!(p.norm() < 1e-10);
            }
            other => panic!("wrong class {}", other.name()),
        }
        check_roundtrip(&f, &class);
    }

    #[test]
    fn cubic_poly_trigger() {
        // f = z^3: critical value 0 is real-flagged.
        let f = RationalFunction::from_poly(ComplexPoly::monomial(c(1.0, 0.0), 3));
        let class = classify_exact(&f).unwrap();
        assert_eq!(class.name(), "CUBIC_POLY");
        let trigger = cubic_singularity_trigger(&f, 1e-9).unwrap();
        assert_eq!(trigger.len(), 1);
        assert!(trigger[0].0.norm() < 1e-10);
        assert!(trigger[0].1);

        // f = z^3 + iz: critical values off the real line.
        let f = RationalFunction::from_poly(ComplexPoly::new(vec![
            c(0.0, 0.0),
            c(0.0, 1.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ]));
        let trigger = cubic_singularity_trigger(&f, 1e-9).unwrap();
        assert_eq!(trigger.len(), 2);
        for (v, flag) in trigger {
            let expected = v.im.abs() <= 1e-9 * (1.0 + v.norm_sqr());
            assert_eq!(flag, expected);
            assert!(!flag);
        }
    }

    #[test]
    fn simple_pole_is_rejected() {
        let f = RationalFunction::new(
            ComplexPoly::one(),
            ComplexPoly::monomial(c(1.0, 0.0), 1),
        )
        .unwrap();
        assert!(matches!(classify_exact(&f), Err(Error::NotExact { .. })));
    }
}
