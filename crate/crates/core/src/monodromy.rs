//! Critical data of a rational map and the fiber-product connectivity test.
//!
//! The complexification of the curve `Im f(z) = 0` is the separated-variable
//! curve `A(z) B_sigma(w) - A_sigma(w) B(z) = 0`, the fiber product of the
//! covers `f` and `f_sigma`. It is irreducible exactly when the product
//! monodromy action on fiber pairs is transitive, which is what this module
//! computes: loops around each branch value are lifted through both
//! equations by predictor-corrector continuation, and the orbits of the
//! resulting pair permutations are counted.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Error;
use crate::jsonutil::complex_json;
use crate::poly::ComplexPoly;
use crate::ratfun::RationalFunction;
use crate::roots::roots;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// A critical value, possibly the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CriticalValue {
    Finite(Complex64),
    Infinity,
}

impl CriticalValue {
    pub fn to_json(&self) -> Value {
        match self {
            CriticalValue::Finite(v) => complex_json(*v),
            CriticalValue::Infinity => json!("inf"),
        }
    }
}

/// Critical points of a rational map with their values and real-line flags.
#[derive(Clone, Debug)]
pub struct CriticalData {
    pub points: Vec<Complex64>,
    pub values: Vec<CriticalValue>,
    /// Per value: lies on the real projective line within tolerance.
    /// Pole-type values (infinity) are always flagged.
    pub real_flags: Vec<bool>,
}

/// Critical points of `f`: roots of the numerator of the reduced `f'`,
/// plus multiple poles of `f` (which are critical over infinity).
pub fn critical_data(f: &RationalFunction, real_tol: f64) -> Result<CriticalData, Error> {
    let fp = f.derivative()?;
    if fp.is_zero() {
        return Err(Error::Degenerate("constant map has no critical data".into()));
    }
    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut real_flags = Vec::new();
    for (z, _) in fp.numerator_roots()? {
        match f.eval(z) {
            Some(v) => {
                points.push(z);
                values.push(CriticalValue::Finite(v));
                real_flags.push(v.im.abs() <= real_tol * (1.0 + v.norm_sqr()));
            }
            None => {
                points.push(z);
                values.push(CriticalValue::Infinity);
                real_flags.push(true);
            }
        }
    }
    for (z, m) in f.denominator_roots()? {
        if m >= 2 {
            points.push(z);
            values.push(CriticalValue::Infinity);
            real_flags.push(true);
        }
    }
    Ok(CriticalData {
        points,
        values,
        real_flags,
    })
}

#[derive(Clone, Debug)]
pub struct ContinuationOpts {
    /// Refuse maps of degree above this cap.
    pub degree_cap: usize,
    /// Initial number of steps per loop.
    pub base_steps: usize,
    /// Adaptive step cap per loop.
    pub max_steps: usize,
    /// Deterministic seed; only influences the base-point placement.
    pub seed: u64,
    /// Retry budget (each retry rotates the base point and doubles steps).
    pub retries: u32,
}

impl Default for ContinuationOpts {
    fn default() -> Self {
        Self {
            degree_cap: 5,
            base_steps: 64,
            max_steps: 4096,
            seed: 0,
            retries: 3,
        }
    }
}

/// One lifted loop: the permutations induced on the fibers of `f` and of
/// its conjugate map.
#[derive(Clone, Debug)]
pub struct LoopRecord {
    pub target: CriticalValue,
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
}

impl LoopRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target.to_json(),
            "sigma": cycle_notation(&self.sigma),
            "tau": cycle_notation(&self.tau),
        })
    }
}

#[derive(Clone, Debug)]
pub struct FiberProductResult {
    pub degree_pair: (usize, usize),
    pub connected: bool,
    pub orbit_count: usize,
    pub loops: Vec<LoopRecord>,
    /// Base point used for all loops.
    pub base_point: Complex64,
}

impl FiberProductResult {
    pub fn to_json(&self) -> Value {
        json!({
            "degree": [self.degree_pair.0, self.degree_pair.1],
            "connected": self.connected,
            "orbit_count": self.orbit_count,
            "base_point": complex_json(self.base_point),
            "loops": self.loops.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// One-line cycle notation, e.g. `(1 2)(3)`.
pub fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = perm[start];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = perm[cur];
        }
        out.push('(');
        out.push_str(
            &cycle
                .iter()
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
        out.push(')');
    }
    out
}

/// Composition in traversal order: the path of `p` first, then `q`.
pub fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    p.iter().map(|&i| q[i]).collect()
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Decides connectivity of the separated-variable fiber product of `f` and
/// its conjugate map by monodromy on fiber pairs.
pub fn fiber_product_connected(
    f: &RationalFunction,
    opts: &ContinuationOpts,
) -> Result<FiberProductResult, Error> {
    let d = f.map_degree();
    if d == 0 {
        return Err(Error::Degenerate("constant map".into()));
    }
    if d > opts.degree_cap {
        return Err(Error::DegreeCap {
            degree: d,
            cap: opts.degree_cap,
        });
    }
    let fs = f.conjugate_map();

    // Candidate finite branch values of both covers. Unbranched extras are
    // harmless: their loops lift to identity permutations.
    let mut values = finite_branch_candidates(f)?;
    values.extend(finite_branch_candidates(&fs)?);
    let values = dedup_values(values);

    let vmax = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut last_err = Error::Undetermined;
    for attempt in 0..=opts.retries {
        let angle = std::f64::consts::FRAC_PI_4
            + 0.37 * attempt as f64
            + 2e-3 * (opts.seed % 97) as f64;
        let base = (vmax + 1.0) * Complex64::new(angle.cos(), angle.sin());
        let steps = (opts.base_steps << attempt).min(opts.max_steps);
        match run_loops(f, &fs, &values, base, steps, d) {
            Ok(result) => return Ok(result),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Finite values over which the cover could be branched: images of the
/// finite critical points, plus the value at infinity when it is finite.
fn finite_branch_candidates(f: &RationalFunction) -> Result<Vec<Complex64>, Error> {
    let mut values = Vec::new();
    let fp = f.derivative()?;
    if !fp.is_zero() {
        for (z, _) in fp.numerator_roots()? {
            if let Some(v) = f.eval(z) {
                values.push(v);
            }
        }
    }
    let k = f.num_degree().unwrap_or(0);
    let l = f.den_degree();
    if k <= l {
        let v = if k < l {
            Complex64::new(0.0, 0.0)
        } else {
            f.numerator().leading().expect("nonzero numerator")
                / f.denominator().leading().expect("nonzero denominator")
        };
        values.push(v);
    }
    Ok(values)
}

fn dedup_values(values: Vec<Complex64>) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for v in values {
        if !out
            .iter()
            .any(|&u| (u - v).norm() <= 1e-8 * (1.0 + v.norm()))
        {
            out.push(v);
        }
    }
    out
}

/// The pencil polynomial `A - t B` whose roots are the fiber of `f` over `t`.
fn pencil(f: &RationalFunction, t: Complex64) -> ComplexPoly {
    let a = f.numerator();
    let b = f.denominator();
    let n = a.coeffs().len().max(b.coeffs().len());
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (i, &c) in a.coeffs().iter().enumerate() {
        coeffs[i] += c;
    }
    for (i, &c) in b.coeffs().iter().enumerate() {
        coeffs[i] -= t * c;
    }
    ComplexPoly::new(coeffs)
}

/// Simple fiber over a regular value, sorted deterministically.
fn base_fiber(f: &RationalFunction, t: Complex64, d: usize) -> Result<Vec<Complex64>, Error> {
    let p = pencil(f, t);
    if p.degree() != Some(d) {
        return Err(Error::Undetermined);
    }
    let rs = roots(&p)?;
    if rs.len() != d || rs.iter().any(|&(_, m)| m != 1) {
        return Err(Error::Undetermined);
    }
    let fiber: Vec<Complex64> = rs.into_iter().map(|(z, _)| z).collect();
    let min_sep = min_pairwise(&fiber);
    let scale = 1.0 + fiber.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if min_sep <= 1e-8 * scale {
        return Err(Error::Undetermined);
    }
    Ok(fiber)
}

fn min_pairwise(zs: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..zs.len() {
        for j in (i + 1)..zs.len() {
            best = best.min((zs[i] - zs[j]).norm());
        }
    }
    best
}

/// Piecewise path in the value plane.
enum PathSeg {
    Line(Complex64, Complex64),
    /// Counterclockwise arc around `center` of the given radius, from
    /// `start_angle` through `start_angle + sweep`.
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl PathSeg {
    fn length(&self) -> f64 {
        match self {
            PathSeg::Line(a, b) => (b - a).norm(),
            PathSeg::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    fn at(&self, s: f64) -> Complex64 {
        match self {
            PathSeg::Line(a, b) => a + (b - a) * s,
            PathSeg::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let th = start_angle + sweep * s;
                center + radius * Complex64::new(th.cos(), th.sin())
            }
        }
    }
}

/// Lasso around `v` based at `t0`: spoke in, full counterclockwise circle,
/// spoke out.
fn lasso(t0: Complex64, v: Complex64, radius: f64) -> Vec<PathSeg> {
    let dir = (t0 - v) / (t0 - v).norm();
    let entry = v + radius * dir;
    let theta = dir.arg();
    vec![
        PathSeg::Line(t0, entry),
        PathSeg::Arc {
            center: v,
            radius,
            start_angle: theta,
            sweep: TAU,
        },
        PathSeg::Line(entry, t0),
    ]
}

fn run_loops(
    f: &RationalFunction,
    fs: &RationalFunction,
    values: &[Complex64],
    base: Complex64,
    steps: usize,
    d: usize,
) -> Result<FiberProductResult, Error> {
    // The base point must sit outside the branch-value disk and off every
    // candidate; callers guarantee |base| = vmax + 1.
    let fiber_f = base_fiber(f, base, d)?;
    let fiber_fs = base_fiber(fs, base, d)?;

    // Order loops by increasing angle of (v - base): composing the lifted
    // permutations in this order reproduces the lift of the full
    // counterclockwise circle (verified by the total-monodromy relation).
    let mut ordered: Vec<Complex64> = values.to_vec();
    ordered.sort_by(|a, b| {
        let pa = (a - base).arg();
        let pb = (b - base).arg();
        pa.partial_cmp(&pb).unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut loops = Vec::new();
    for &v in &ordered {
        let mut radius = 0.45 * (v - base).norm();
        for &u in &ordered {
            if (u - v).norm() > 0.0 {
                radius = radius.min(0.5 * (u - v).norm());
            }
        }
        let path = lasso(base, v, radius);
        let sigma = lift_permutation(f, &path, &fiber_f, steps)?;
        let tau = lift_permutation(fs, &path, &fiber_fs, steps)?;
        loops.push(LoopRecord {
            target: CriticalValue::Finite(v),
            sigma,
            tau,
        });
    }

    // Loop around infinity: the counterclockwise circle through the base
    // point encloses every finite branch value; traversed clockwise it is
    // the loop around infinity, so we record the inverses.
    let circle = vec![PathSeg::Arc {
        center: Complex64::new(0.0, 0.0),
        radius: base.norm(),
        start_angle: base.arg(),
        sweep: TAU,
    }];
    let sigma_cw = inverse(&lift_permutation(f, &circle, &fiber_f, steps * 2)?);
    let tau_cw = inverse(&lift_permutation(fs, &circle, &fiber_fs, steps * 2)?);
    loops.push(LoopRecord {
        target: CriticalValue::Infinity,
        sigma: sigma_cw,
        tau: tau_cw,
    });

    // Orbits of the generated group acting on fiber pairs.
    let mut uf = UnionFind::new(d * d);
    for rec in &loops {
        for i in 0..d {
            for j in 0..d {
                uf.union(i * d + j, rec.sigma[i] * d + rec.tau[j]);
            }
        }
    }
    let orbit_count = uf.count();
    Ok(FiberProductResult {
        degree_pair: (d, d),
        connected: orbit_count == 1,
        orbit_count,
        loops,
        base_point: base,
    })
}

/// Lifts the fiber along the path by predictor-corrector continuation and
/// returns the induced permutation of the base fiber.
fn lift_permutation(
    f: &RationalFunction,
    path: &[PathSeg],
    fiber: &[Complex64],
    steps: usize,
) -> Result<Vec<usize>, Error> {
    let da = f.numerator().derivative();
    let db = f.denominator().derivative();
    let total_len: f64 = path.iter().map(|s| s.length()).sum();
    let mut zs: Vec<Complex64> = fiber.to_vec();

    for seg in path {
        let frac = if total_len > 0.0 {
            seg.length() / total_len
        } else {
            1.0
        };
        let nsteps = ((steps as f64 * frac).ceil() as usize).max(8);
        for step in 1..=nsteps {
            let t = seg.at(step as f64 / nsteps as f64);
            let p = pencil(f, t);
            let scale = 1.0 + zs.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let sep = min_pairwise(&zs).min(f64::INFINITY);
            for z in zs.iter_mut() {
                let start = *z;
                let mut cur = start;
                let mut ok = false;
                for _ in 0..30 {
                    let pv = p.eval(cur);
                    if pv.norm() <= 1e-12 * p.eval_abs(cur.norm()).max(1e-300) {
                        ok = true;
                        break;
                    }
                    let dv = da.eval(cur) - t * db.eval(cur);
                    if dv.norm() == 0.0 {
                        break;
                    }
                    let delta = pv / dv;
                    cur -= delta;
                    if delta.norm() <= 1e-14 * (1.0 + cur.norm()) {
                        ok = true;
                        break;
                    }
                }
                // Reject corrections that jump beyond half the local root
                // separation; they may have hopped to another sheet.
                if !ok
                    || !cur.re.is_finite()
                    || !cur.im.is_finite()
                    || (cur - start).norm() > 0.5 * sep.max(1e-12 * scale)
                    || cur.norm() > 1e9 * (1.0 + t.norm())
                {
                    return Err(Error::Undetermined);
                }
                *z = cur;
            }
            if min_pairwise(&zs) <= 1e-9 * scale {
                return Err(Error::Undetermined);
            }
        }
    }

    // Match final positions back to the base fiber.
    let min_sep = min_pairwise(fiber);
    let mut perm = vec![usize::MAX; fiber.len()];
    let mut used = vec![false; fiber.len()];
    for (i, &z) in zs.iter().enumerate() {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, &w) in fiber.iter().enumerate() {
            let dist = (z - w).norm();
            if dist < best_d {
                best = j;
                best_d = dist;
            }
        }
        if best == usize::MAX || best_d > 0.3 * min_sep || used[best] {
            return Err(Error::Undetermined);
        }
        used[best] = true;
        perm[i] = best;
    }
    Ok(perm)
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    count: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            count: n,
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        self.count -= 1;
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }

    fn count(&self) -> usize {
        self.count
    }
}
