//! Local structure at poles, singular-point candidates, asymptotic
//! directions at infinity, and the boundedness decision.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Error;
use crate::jsonutil::{complex_json, sig12};
use crate::ratfun::RationalFunction;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Angular tolerance for deduplication inside a [`DirectionSet`].
pub const ANGLE_TOL: f64 = 1e-9;

/// Sorted set of ray directions in `[0, 2*pi)`.
#[derive(Clone, Debug, Default)]
pub struct DirectionSet {
    angles: Vec<f64>,
}

impl DirectionSet {
    pub fn from_angles(raw: impl IntoIterator<Item = f64>) -> Self {
        let mut angles: Vec<f64> = raw
            .into_iter()
            .map(|a| {
                let mut a = a.rem_euclid(TAU);
                if a >= TAU - ANGLE_TOL {
                    a = 0.0;
                }
                a
            })
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        angles.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);
        Self { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Circular distance from `angle` to the nearest member.
    pub fn nearest_distance(&self, angle: f64) -> f64 {
        self.angles
            .iter()
            .map(|&a| {
                let d = (angle - a).rem_euclid(TAU);
                d.min(TAU - d)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Set equality at the given angular tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self.angles.iter().all(|&a| other.nearest_distance(a) <= tol)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.angles.iter().map(|&a| json!(sig12(a))).collect())
    }
}

/// Local data at one finite pole of `R`.
#[derive(Clone, Debug)]
pub struct PoleData {
    pub location: Complex64,
    /// Pole order `s`.
    pub order: usize,
    /// Coefficient of `(z - location)^{-s}` in `R`.
    pub leading_coeff: Complex64,
    /// The `2s + 2` tangent ray angles of the curve at the pole.
    pub tangent_rays: DirectionSet,
}

impl PoleData {
    /// Number of smooth analytic branches through the pole: `s + 1`.
    pub fn branch_count(&self) -> usize {
        self.order + 1
    }

    pub fn to_json(&self) -> Value {
        json!({
            "location": complex_json(self.location),
            "order": self.order,
            "leading_coeff": complex_json(self.leading_coeff),
            "branch_count": self.branch_count(),
            "tangent_rays": self.tangent_rays.to_json(),
            "separatrix_rays": separatrix_directions(self.order, self.leading_coeff).to_json(),
        })
    }
}

/// Leading behavior `c z^m` of a rational function at infinity.
#[derive(Clone, Copy, Debug)]
pub struct LaurentLeading {
    pub coeff: Complex64,
    pub exponent: i64,
}

/// All finite poles of `R` with their local data.
///
/// The leading coefficient is computed from the factorization of the
/// denominator rather than by limit sampling: with monic
/// `P = prod (z - p_j)^{m_j}`, the coefficient at `p_0` of order `s` is
/// `Q(p_0) / prod_{j != 0} (p_0 - p_j)^{m_j}`.
pub fn poles(r: &RationalFunction) -> Result<Vec<PoleData>, Error> {
    let divisor = r.denominator_roots()?;
    let mut out = Vec::with_capacity(divisor.len());
    for &(z0, s) in &divisor {
        let mut denom = Complex64::new(1.0, 0.0);
        for &(zj, mj) in &divisor {
            if (zj - z0).norm() > 0.0 {
                denom *= (z0 - zj).powu(mj as u32);
            }
        }
        let a = r.numerator().eval(z0) / denom;
        out.push(PoleData {
            location: z0,
            order: s,
            leading_coeff: a,
            tangent_rays: pole_tangent_rays(s, a),
        });
    }
    Ok(out)
}

/// Tangent rays of the curve at a pole of order `s` with leading
/// coefficient `a`: `arg(z - z0) = (arg(-s a) + m pi) / (s + 1)`,
/// `m = 0..2s+1`.
pub fn pole_tangent_rays(s: usize, a: Complex64) -> DirectionSet {
    let base = (-(s as f64) * a).arg();
    DirectionSet::from_angles(
        (0..2 * s + 2).map(|m| (base + m as f64 * std::f64::consts::PI) / (s as f64 + 1.0)),
    )
}

/// Incoming and outgoing separatrix directions of the field at the pole:
/// `arg w = (arg(-a) + j pi) / (s + 1)`. Coincides with
/// [`pole_tangent_rays`] since the positive factor `s` drops out of the
/// argument.
pub fn separatrix_directions(s: usize, a: Complex64) -> DirectionSet {
    let base = (-a).arg();
    DirectionSet::from_angles(
        (0..2 * s + 2).map(|j| (base + j as f64 * std::f64::consts::PI) / (s as f64 + 1.0)),
    )
}

/// Candidate singular points of the curve away from poles: finite roots of
/// the numerator of `R''` at which `|Im R'| <= tol`, excluding
/// pole-proximate roots.
pub fn singular_candidates(r: &RationalFunction, tol: f64) -> Result<Vec<Complex64>, Error> {
    let r_prime = r.derivative()?;
    if r_prime.is_zero() {
        return Err(Error::Degenerate("constant rational function".into()));
    }
    let r_second = r_prime.derivative()?;
    if r_second.is_zero() {
        return Ok(Vec::new());
    }
    let candidates = r_second.numerator_roots()?;
    let pole_set = r.denominator_roots()?;
    let mut out = Vec::new();
    for (z, _) in candidates {
        let near_pole = pole_set
            .iter()
            .any(|&(p, _)| (z - p).norm() <= 1e-8 * (1.0 + p.norm()));
        if near_pole {
            continue;
        }
        match r_prime.eval(z) {
            Some(v) if v.im.abs() <= tol => out.push(z),
            _ => {}
        }
    }
    Ok(out)
}

/// Leading pair `(c, m)` with `f(z) = c z^m + O(z^{m-1})` at infinity.
pub fn laurent_leading_at_infinity(f: &RationalFunction) -> Result<LaurentLeading, Error> {
    let k = f
        .num_degree()
        .ok_or_else(|| Error::Degenerate("leading behavior of the zero function".into()))?;
    let l = f.den_degree();
    let c = f.numerator().leading().expect("nonzero numerator")
        / f.denominator().leading().expect("nonzero denominator");
    Ok(LaurentLeading {
        coeff: c,
        exponent: k as i64 - l as i64,
    })
}

/// The `2|m|` asymptotic ray angles `arg z = (j pi - arg c)/m (mod 2 pi)`.
/// For `m < 0` the same angular equation applies after clearing the radial
/// factor, so the set only depends on `|m|` through its count.
pub fn asymptotic_rays(c: Complex64, m: i64) -> DirectionSet {
    assert!(m != 0, "asymptotic rays need a nonzero exponent");
    assert!(c.norm() > 0.0, "asymptotic rays need a nonzero coefficient");
    let arg_c = c.arg();
    let count = 2 * m.unsigned_abs() as usize;
    DirectionSet::from_angles(
        (0..count).map(|j| (j as f64 * std::f64::consts::PI - arg_c) / m as f64),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    Unbounded,
}

/// Verdict on the ends of the curve at infinity.
#[derive(Clone, Debug)]
pub struct BoundednessReport {
    pub verdict: Boundedness,
    pub end_count: usize,
    pub rays: DirectionSet,
    /// Leading pair of `R'` at infinity.
    pub leading: LaurentLeading,
    /// True when the real-constant-drift fallback was applied: for
    /// `R' -> c` with `c` real the criterion does not apply directly, and
    /// the remainder `R' - c` is analyzed instead.
    pub heuristic: bool,
}

impl BoundednessReport {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": match self.verdict {
                Boundedness::Bounded => "bounded",
                Boundedness::Unbounded => "unbounded",
            },
            "end_count": self.end_count,
            "rays": self.rays.to_json(),
            "leading_coeff": complex_json(self.leading.coeff),
            "leading_exponent": self.leading.exponent,
            "heuristic": self.heuristic,
        })
    }
}

/// Decides boundedness of the curve from the leading behavior of `R'`.
///
/// `m != 0`: unbounded with `2|m|` ends. `m = 0` and `Im c != 0`: bounded.
/// `m = 0` and `c` real: the constant is subtracted and the remainder
/// (which decays at infinity) is analyzed, flagged as heuristic. A
/// derivative that is constant real is degenerate: the whole plane
/// satisfies the curve equation.
pub fn boundedness_analysis(r: &RationalFunction) -> Result<BoundednessReport, Error> {
    let r_prime = r.derivative()?;
    if r_prime.is_zero() {
        return Err(Error::Degenerate(
            "derivative vanishes identically".into(),
        ));
    }
    analyze_ends(&r_prime, false)
}

fn analyze_ends(f: &RationalFunction, heuristic: bool) -> Result<BoundednessReport, Error> {
    let leading = laurent_leading_at_infinity(f)?;
    if leading.exponent != 0 {
        let rays = asymptotic_rays(leading.coeff, leading.exponent);
        return Ok(BoundednessReport {
            verdict: Boundedness::Unbounded,
            end_count: 2 * leading.exponent.unsigned_abs() as usize,
            rays,
            leading,
            heuristic,
        });
    }
    let c = leading.coeff;
    if c.im.abs() > 1e-10 * (1.0 + c.norm()) {
        return Ok(BoundednessReport {
            verdict: Boundedness::Bounded,
            end_count: 0,
            rays: DirectionSet::default(),
            leading,
            heuristic,
        });
    }
    let remainder = f.sub_constant(Complex64::new(c.re, 0.0));
    if remainder.is_zero() {
        return Err(Error::Degenerate(
            "derivative is a real constant; the curve is the whole plane".into(),
        ));
    }
    analyze_ends(&remainder, true)
}
