//! All-roots solver: Aberth–Ehrlich simultaneous iteration followed by
//! cluster detection to recover multiplicities.
//!
//! Multiplicities are semantically required downstream (pole orders), so the
//! solver clusters nearby approximations and certifies each merge by the
//! residual of the cluster centroid. An `m`-fold root scattered by float
//! noise has centroid residual at the evaluation noise floor, while honestly
//! distinct roots at moderate separation do not. Accepted cluster centers
//! are then polished by Newton on the `(m-1)`-th derivative, where an
//! `m`-fold root is simple.

use num_complex::Complex64;

use crate::error::Error;
use crate::poly::ComplexPoly;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct RootFindOpts {
    /// Iteration cap for the simultaneous solve.
    pub max_iterations: u32,
    /// Relative radius for the initial pairwise clustering pass.
    pub cluster_tol: f64,
    /// Relative residual below which a hypothesized cluster merge is accepted.
    pub merge_residual_tol: f64,
}

impl Default for RootFindOpts {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            cluster_tol: 1e-6,
            merge_residual_tol: 1e-9,
        }
    }
}

/// All complex roots of `p` with multiplicities, sorted by (re, im).
///
/// The multiplicity sum equals the degree. Errors if the iteration fails to
/// converge within the cap.
pub fn roots(p: &ComplexPoly) -> Result<Vec<(Complex64, usize)>, Error> {
    roots_with(p, &RootFindOpts::default())
}

pub fn roots_with(
    p: &ComplexPoly,
    opts: &RootFindOpts,
) -> Result<Vec<(Complex64, usize)>, Error> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::Degenerate("roots of the zero polynomial".into()))?;
    if deg == 0 {
        return Ok(Vec::new());
    }

    // Work on a normalized copy.
    let scale = p.max_coeff_norm();
    let coeffs: Vec<Complex64> = p.coeffs().iter().map(|&c| c / scale).collect();

    // Exact-ish roots at the origin are split off first; they are common
    // (poles at 0) and the iteration handles them poorly.
    let zero_floor = 1e-14;
    let mut zero_mult = 0;
    while zero_mult < deg && coeffs[zero_mult].norm() <= zero_floor {
        zero_mult += 1;
    }
    let inner = ComplexPoly::new(coeffs[zero_mult..].to_vec());

    let mut found: Vec<(Complex64, usize)> = Vec::new();
    if zero_mult > 0 {
        found.push((ZERO, zero_mult));
    }

    if let Some(n) = inner.degree() {
        if n > 0 {
            let approx = match n {
                1 => vec![-inner.coeff(0) / inner.coeff(1)],
                2 => quadratic_roots(inner.coeff(2), inner.coeff(1), inner.coeff(0)),
                _ => aberth(&inner, opts.max_iterations)?,
            };
            let clusters = cluster(&inner, approx, opts);
            found.extend(clusters);
        }
    }

    found.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    debug_assert_eq!(found.iter().map(|r| r.1).sum::<usize>(), deg);
    Ok(found)
}

/// Stable complex quadratic formula.
fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> Vec<Complex64> {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // Pick the sign that avoids cancellation in b +/- disc.
    let s = if (b + disc).norm() >= (b - disc).norm() {
        b + disc
    } else {
        b - disc
    };
    if s.norm() == 0.0 {
        // b = disc = 0: double root at origin of the shifted equation.
        let r = -b / (2.0 * a);
        return vec![r, r];
    }
    let q = -0.5 * s;
    vec![q / a, c / q]
}

/// Aberth–Ehrlich simultaneous iteration on a polynomial with nonzero
/// constant term (degree >= 3 callers; works for any degree >= 1).
fn aberth(p: &ComplexPoly, max_iterations: u32) -> Result<Vec<Complex64>, Error> {
    let n = p.degree().expect("nonzero polynomial");
    let dp = p.derivative();
    let lead = p.leading().expect("nonzero polynomial");

    // Cauchy bound: all roots lie within 1 + max |a_i/a_n|.
    let radius = 1.0
        + p.coeffs()[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut zs: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            radius * Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    let noise = |z: Complex64| p.eval_abs(z.norm()) * (n as f64) * 1e-14;
    for _ in 0..max_iterations {
        let mut all_done = true;
        for k in 0..n {
            let z = zs[k];
            let pv = p.eval(z);
            if pv.norm() <= noise(z) {
                continue;
            }
            let dv = dp.eval(z);
            if dv.norm() == 0.0 {
                zs[k] = z + Complex64::new(1e-6, 1e-6) * (1.0 + z.norm());
                all_done = false;
                continue;
            }
            let newton = pv / dv;
            let mut sum = ZERO;
            for (j, &zj) in zs.iter().enumerate() {
                if j != k {
                    let d = z - zj;
                    if d.norm() > 0.0 {
                        sum += 1.0 / d;
                    }
                }
            }
            let denom = 1.0 - newton * sum;
            let step = if denom.norm() < 1e-290 { newton } else { newton / denom };
            let mut znew = z - step;
            if !znew.re.is_finite() || !znew.im.is_finite() {
                znew = 0.5 * radius * Complex64::new((k as f64).cos(), (k as f64).sin());
            }
            zs[k] = znew;
            if step.norm() > 1e-14 * (1.0 + znew.norm()) {
                all_done = false;
            }
        }
        if all_done {
            return Ok(zs);
        }
    }
    // Accept a degraded-but-usable result; otherwise report nonconvergence.
    let ok = zs
        .iter()
        .all(|&z| p.eval(z).norm() <= 1e-9 * p.eval_abs(z.norm()).max(1e-300));
    if ok {
        Ok(zs)
    } else {
        Err(Error::RootFinding {
            iterations: max_iterations,
        })
    }
}

struct Cluster {
    members: Vec<Complex64>,
    center: Complex64,
}

impl Cluster {
    fn merge_with(&mut self, other: Cluster) {
        self.members.extend(other.members);
        let sum: Complex64 = self.members.iter().sum();
        self.center = sum / self.members.len() as f64;
    }
}

/// Groups approximate roots into multiplicity clusters.
fn cluster(
    p: &ComplexPoly,
    approx: Vec<Complex64>,
    opts: &RootFindOpts,
) -> Vec<(Complex64, usize)> {
    // Pass 1: single-linkage at the base radius.
    let mut clusters: Vec<Cluster> = Vec::new();
    for z in approx {
        let mut target: Option<usize> = None;
        for (i, cl) in clusters.iter().enumerate() {
            let tol = opts.cluster_tol * (1.0 + z.norm().max(cl.center.norm()));
            if cl.members.iter().any(|&m| (m - z).norm() <= tol) {
                target = Some(i);
                break;
            }
        }
        match target {
            Some(i) => {
                let members = std::mem::take(&mut clusters[i].members);
                let mut cl = Cluster { members, center: ZERO };
                cl.members.push(z);
                let sum: Complex64 = cl.members.iter().sum();
                cl.center = sum / cl.members.len() as f64;
                clusters[i] = cl;
            }
            None => clusters.push(Cluster {
                members: vec![z],
                center: z,
            }),
        }
    }

    // Pass 2: residual-certified merging. A true m-fold root split by float
    // noise leaves the centroid residual at the evaluation noise floor.
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let ci = clusters[i].center;
                let cj = clusters[j].center;
                let sep_gate = 1e-3 * (1.0 + ci.norm().max(cj.norm()));
                if (ci - cj).norm() > sep_gate {
                    continue;
                }
                let wi = clusters[i].members.len() as f64;
                let wj = clusters[j].members.len() as f64;
                let c = (ci * wi + cj * wj) / (wi + wj);
                let resid = p.eval(c).norm();
                if resid <= opts.merge_residual_tol * p.eval_abs(c.norm()).max(1e-300) {
                    let cj = clusters.swap_remove(j);
                    clusters[i].merge_with(cj);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }

    // Polish: an m-fold root of p is a simple root of p^(m-1).
    let mut out = Vec::with_capacity(clusters.len());
    for cl in clusters {
        let m = cl.members.len();
        let mut target = p.clone();
        for _ in 1..m {
            target = target.derivative();
        }
        let dtarget = target.derivative();
        let mut z = cl.center;
        let spread = cl
            .members
            .iter()
            .map(|&w| (w - cl.center).norm())
            .fold(0.0, f64::max);
        let move_cap = (10.0 * spread).max(1e-7 * (1.0 + cl.center.norm()));
        for _ in 0..40 {
            let dv = dtarget.eval(z);
            if dv.norm() == 0.0 {
                break;
            }
            let step = target.eval(z) / dv;
            z -= step;
            if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        if (z - cl.center).norm() > move_cap || !z.re.is_finite() || !z.im.is_finite() {
            z = cl.center;
        }
        out.push((z, m));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn conjugate_pair() {
        let p = ComplexPoly::from_real(&[1.0, 0.0, 1.0]); // z^2 + 1
        let rs = roots(&p).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].1, 1);
        assert_eq!(rs[1].1, 1);
        assert!((rs[0].0 - c(0.0, -1.0)).norm() < 1e-10);
        assert!((rs[1].0 - c(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn triple_root_reclustered() {
        // (z-1)^3 expanded.
        let p = ComplexPoly::from_real(&[-1.0, 3.0, -3.0, 1.0]);
        let rs = roots(&p).unwrap();
        assert_eq!(rs.len(), 1, "roots found: {:?}", rs);
        assert_eq!(rs[0].1, 3);
        assert!((rs[0].0 - c(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn degree_zero_has_no_roots() {
        let p = ComplexPoly::constant(c(3.0, -1.0));
        assert!(roots(&p).unwrap().is_empty());
    }

    #[test]
    fn zero_poly_is_degenerate() {
        assert!(matches!(
            roots(&ComplexPoly::zero()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn pure_power_at_origin() {
        let p = ComplexPoly::from_real(&[0.0, 0.0, 0.0, 2.0]); // 2z^3
        let rs = roots(&p).unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].1, 3);
        assert!(rs[0].0.norm() < 1e-12);
    }

    #[test]
    fn mixed_multiplicities() {
        // (z - 2)^2 (z + i) (z - i), expanded via from_roots.
        let p = ComplexPoly::from_roots(
            c(1.0, 0.0),
            &[(c(2.0, 0.0), 2), (c(0.0, -1.0), 1), (c(0.0, 1.0), 1)],
        );
        let rs = roots(&p).unwrap();
        assert_eq!(rs.len(), 3);
        let double = rs.iter().find(|r| r.1 == 2).expect("double root");
        assert!((double.0 - c(2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn residual_bound_holds() {
        let p = ComplexPoly::new(vec![
            c(0.3, -1.2),
            c(-2.0, 0.4),
            c(0.0, 1.0),
            c(1.5, 0.0),
            c(0.0, -0.7),
        ]);
        let deg = p.degree().unwrap() as i32;
        let scale = p.max_coeff_norm();
        for (r, _) in roots(&p).unwrap() {
            let bound = 1e-7 * scale * r.norm().max(1.0).powi(deg);
            assert!(p.eval(r).norm() <= bound, "residual too large at {r}");
        }
    }
}
