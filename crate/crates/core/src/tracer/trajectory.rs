//! Trajectory integration for the field `-R(z)` and the inflection
//! cross-check along integrated trajectories.

use num_complex::Complex64;

use crate::error::Error;
use crate::inflection::RealBivariatePoly;
use crate::ratfun::RationalFunction;

use super::Window;

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub rel_tol: f64,
    /// Hard stop around zeros and poles of `R`.
    pub stop_radius: f64,
    /// Arc-length cap as a multiple of the window diagonal.
    pub max_arc_factor: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            stop_radius: 1e-3,
            max_arc_factor: 30.0,
            max_steps: 20_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<Complex64>,
    /// Stopped by the step or arc-length cap rather than by leaving the
    /// window or reaching an equilibrium/pole.
    pub truncated: bool,
}

/// Integrates `dz/dt = -R(z)` forward and backward from each seed with an
/// embedded 4(5) pair and adaptive steps, until leaving the window,
/// reaching the arc cap, or entering the stop radius of a zero or pole.
pub fn integrate_trajectories(
    r: &RationalFunction,
    w: &Window,
    seeds: &[Complex64],
    ctrl: &StepControl,
) -> Result<Vec<Trajectory>, Error> {
    let mut stops: Vec<Complex64> = Vec::new();
    stops.extend(r.denominator_roots()?.iter().map(|&(z, _)| z));
    stops.extend(r.numerator_roots()?.iter().map(|&(z, _)| z));

    let mut out = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        if stops.iter().any(|&s| (seed - s).norm() <= 4.0 * ctrl.stop_radius) {
            continue;
        }
        let forward = integrate_one(r, w, seed, &stops, ctrl, false);
        let backward = integrate_one(r, w, seed, &stops, ctrl, true);
        let mut points: Vec<Complex64> = backward.points.into_iter().rev().collect();
        points.pop(); // seed is repeated at the junction
        points.extend(forward.points);
        out.push(Trajectory {
            points,
            truncated: forward.truncated || backward.truncated,
        });
    }
    Ok(out)
}

fn integrate_one(
    r: &RationalFunction,
    w: &Window,
    seed: Complex64,
    stops: &[Complex64],
    ctrl: &StepControl,
    reverse: bool,
) -> Trajectory {
    let sign = if reverse { 1.0 } else { -1.0 };
    let field = |z: Complex64| r.eval(z).map(|v| sign * v);
    let mut points = vec![seed];
    let mut z = seed;
    let mut arc = 0.0;
    let max_arc = ctrl.max_arc_factor * w.diagonal();
    let cell = w.cell();
    let mut h = {
        let speed = field(seed).map(|v| v.norm()).unwrap_or(1.0).max(1e-9);
        (0.5 * cell / speed).min(0.1)
    };
    let mut truncated = false;

    for _ in 0..ctrl.max_steps {
        let Some((znew, err, scale)) = rkf45_step(&field, z, h) else {
            break; // stepped into a pole
        };
        let tol = ctrl.rel_tol * (1.0 + scale);
        if err > tol {
            h = (0.9 * h * (tol / err).powf(0.25)).max(1e-12);
            continue;
        }
        let step_len = (znew - z).norm();
        z = znew;
        arc += step_len;
        points.push(z);
        if !w.contains(z) {
            return Trajectory { points, truncated };
        }
        if stops.iter().any(|&s| (z - s).norm() <= ctrl.stop_radius) {
            return Trajectory { points, truncated };
        }
        if arc >= max_arc {
            truncated = true;
            return Trajectory { points, truncated };
        }
        let grow = if err > 0.0 {
            (0.9 * (tol / err).powf(0.2)).min(2.0)
        } else {
            2.0
        };
        h = (h * grow).min(0.5 * cell / (field(z).map(|v| v.norm()).unwrap_or(1.0).max(1e-9)));
        h = h.max(1e-12);
    }
    truncated = true;
    Trajectory { points, truncated }
}

/// One Fehlberg 4(5) step; returns the 5th-order estimate, the error
/// estimate, and a magnitude scale. `None` when the field hits a pole.
fn rkf45_step(
    field: &impl Fn(Complex64) -> Option<Complex64>,
    z: Complex64,
    h: f64,
) -> Option<(Complex64, f64, f64)> {
    let k1 = field(z)?;
    let k2 = field(z + h * (0.25 * k1))?;
    let k3 = field(z + h * (0.09375 * k1 + 0.28125 * k2))?;
    let k4 = field(
        z + h * ((1932.0 / 2197.0) * k1 - (7200.0 / 2197.0) * k2 + (7296.0 / 2197.0) * k3),
    )?;
    let k5 = field(
        z + h * ((439.0 / 216.0) * k1 - 8.0 * k2 + (3680.0 / 513.0) * k3 - (845.0 / 4104.0) * k4),
    )?;
    let k6 = field(
        z + h * (-(8.0 / 27.0) * k1 + 2.0 * k2 - (3544.0 / 2565.0) * k3 + (1859.0 / 4104.0) * k4
            - (11.0 / 40.0) * k5),
    )?;
    let y4 = z + h * ((25.0 / 216.0) * k1 + (1408.0 / 2565.0) * k3 + (2197.0 / 4104.0) * k4
        - 0.2 * k5);
    let y5 = z + h * ((16.0 / 135.0) * k1 + (6656.0 / 12825.0) * k3 + (28561.0 / 56430.0) * k4
        - (9.0 / 50.0) * k5 + (2.0 / 55.0) * k6);
    Some(((y5), (y5 - y4).norm(), z.norm()))
}

/// Cross-check report: discrete-curvature sign changes along a trajectory
/// matched against sign changes of the defining polynomial.
#[derive(Clone, Debug, Default)]
pub struct CrossCheckReport {
    /// Point indices where the discrete curvature changes sign.
    pub curvature_changes: Vec<usize>,
    /// Point indices where the defining polynomial changes sign.
    pub f_changes: Vec<usize>,
    pub matched: usize,
    pub unmatched_curvature: Vec<usize>,
    pub unmatched_f: Vec<usize>,
}

impl CrossCheckReport {
    pub fn all_matched(&self) -> bool {
        self.unmatched_curvature.is_empty() && self.unmatched_f.is_empty()
    }
}

/// Matches curvature sign changes with zero crossings of `f` along the
/// trajectory, within `window` point indices. A degenerate curve
/// (`f = None`) contributes no crossings.
pub fn inflection_crosscheck(
    f: Option<&RealBivariatePoly>,
    traj: &Trajectory,
    window: usize,
) -> CrossCheckReport {
    let pts = &traj.points;
    if pts.len() < 3 {
        return CrossCheckReport::default();
    }

    // Signed parallelogram area of consecutive displacement pairs, with a
    // noise floor relative to the local step lengths.
    let mut curve_signs: Vec<i8> = vec![0; pts.len()];
    for i in 1..pts.len() - 1 {
        let u = pts[i] - pts[i - 1];
        let v = pts[i + 1] - pts[i];
        let cross = u.re * v.im - u.im * v.re;
        let floor = 1e-10 * u.norm() * v.norm();
        curve_signs[i] = if cross > floor {
            1
        } else if cross < -floor {
            -1
        } else {
            0
        };
    }
    let curvature_changes = sign_change_indices(&curve_signs);

    let f_changes = match f {
        None => Vec::new(),
        Some(f) => {
            let values: Vec<f64> = pts.iter().map(|&p| f.eval_complex(p)).collect();
            let vmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let floor = 1e-12 * vmax;
            let signs: Vec<i8> = values
                .iter()
                .map(|&v| {
                    if v > floor {
                        1
                    } else if v < -floor {
                        -1
                    } else {
                        0
                    }
                })
                .collect();
            sign_change_indices(&signs)
        }
    };

    let mut matched = 0;
    let mut used = vec![false; f_changes.len()];
    let mut unmatched_curvature = Vec::new();
    for &ci in &curvature_changes {
        let mut hit = None;
        for (j, &fi) in f_changes.iter().enumerate() {
            if !used[j] && ci.abs_diff(fi) <= window {
                hit = Some(j);
                break;
            }
        }
        match hit {
            Some(j) => {
                used[j] = true;
                matched += 1;
            }
            None => unmatched_curvature.push(ci),
        }
    }
    let unmatched_f = f_changes
        .iter()
        .enumerate()
        .filter(|&(j, _)| !used[j])
        .map(|(_, &fi)| fi)
        .collect();

    CrossCheckReport {
        curvature_changes,
        f_changes,
        matched,
        unmatched_curvature,
        unmatched_f,
    }
}

fn sign_change_indices(signs: &[i8]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut last: Option<(usize, i8)> = None;
    for (i, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if let Some((_, prev)) = last {
            if prev != s {
                out.push(i);
            }
        }
        last = Some((i, s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inflection::{defining_polynomial, InflectionCurve};
    use crate::poly::ComplexPoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn window() -> Window {
        Window::new(c(0.0, 0.0), 3.0, 3.0, 256)
    }

    #[test]
    fn linear_field_decays_along_real_axis() {
        // R = z: dz/dt = -z from 1 stays real and decays toward 0.
        let r = RationalFunction::var();
        let trajs =
            integrate_trajectories(&r, &window(), &[c(1.0, 0.0)], &StepControl::default())
                .unwrap();
        assert_eq!(trajs.len(), 1);
        let pts = &trajs[0].points;
        assert!(pts.len() > 5);
        // The combined polyline runs backward to the window edge and
        // forward toward the equilibrium, staying on the real axis.
        for p in pts {
            assert!(p.im.abs() < 1e-9);
            assert!(p.re > -1e-9);
        }
        let end = pts.last().unwrap();
        assert!(end.norm() < 0.02, "flow should approach the equilibrium");
    }

    #[test]
    fn constant_field_is_a_straight_line() {
        // R = i: straight motion in direction -i.
        let r = RationalFunction::constant(c(0.0, 1.0));
        let trajs =
            integrate_trajectories(&r, &window(), &[c(0.0, 0.0)], &StepControl::default())
                .unwrap();
        let pts = &trajs[0].points;
        for p in pts {
            assert!(p.re.abs() < 1e-9);
        }
        // No inflections on a straight line; no curve either.
        let report = inflection_crosscheck(None, &trajs[0], 2);
        assert!(report.curvature_changes.is_empty());
        assert!(report.all_matched());
    }

    #[test]
    fn reciprocal_field_conserves_im_z_squared() {
        // R = 1/z: d(z^2)/dt = -2, so Im z^2 is conserved.
        let r = RationalFunction::new(ComplexPoly::one(), ComplexPoly::monomial(c(1.0, 0.0), 1))
            .unwrap();
        let trajs =
            integrate_trajectories(&r, &window(), &[c(1.0, 1.0)], &StepControl::default())
                .unwrap();
        let pts = &trajs[0].points;
        let c0 = (c(1.0, 1.0) * c(1.0, 1.0)).im;
        for p in pts {
            assert!(((p * p).im - c0).abs() < 1e-6, "Im z^2 drifted at {p}");
        }
        // The trajectory stays on one side of the curve Im z^2 = 0.
        let f = defining_polynomial(&r).unwrap();
        let report = inflection_crosscheck(Some(&f), &trajs[0], 2);
        assert!(report.all_matched());
        assert!(report.f_changes.is_empty());
    }

    #[test]
    fn quadratic_field_inflections_on_the_antidiagonal() {
        // R = (1+i)z^2: curvature flips exactly where Im R' = 2 Im((1+i)z)
        // vanishes, the line y = -x.
        let r = RationalFunction::from_poly(ComplexPoly::monomial(c(1.0, 1.0), 2));
        let curve = InflectionCurve::new(r.clone()).unwrap();
        let trajs = integrate_trajectories(
            &r,
            &Window::new(c(0.0, 0.0), 4.0, 4.0, 256),
            &[c(1.0, 0.0)],
            &StepControl::default(),
        )
        .unwrap();
        let report = inflection_crosscheck(Some(curve.defining_polynomial()), &trajs[0], 2);
        assert!(
            report.all_matched(),
            "unmatched: curvature {:?}, f {:?}",
            report.unmatched_curvature,
            report.unmatched_f
        );
        // Every matched crossing lies near the antidiagonal.
        for &i in &report.f_changes {
            let p = trajs[0].points[i];
            assert!(
                (p.re + p.im).abs() < 0.05 * (1.0 + p.norm()),
                "crossing off the antidiagonal at {p}"
            );
        }
    }
}
