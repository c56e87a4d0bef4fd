//! Module-level invariants checked on seeded random instances.

use inflectus_core::exactness::{is_exact, primitive, DEFAULT_RESIDUE_TOL};
use inflectus_core::geometry::{
    asymptotic_rays, boundedness_analysis, laurent_leading_at_infinity, pole_tangent_rays,
    poles, separatrix_directions, Boundedness,
};
use inflectus_core::inflection::InflectionCurve;
use inflectus_core::poly::ComplexPoly;
use inflectus_core::ratfun::RationalFunction;
use inflectus_core::roots::roots;
use inflectus_core::Complex64;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> ComplexPoly {
    let mut coeffs: Vec<Complex64> = (0..degree).map(|_| random_coeff(rng)).collect();
    // Keep the leading coefficient well away from zero.
    let mut lead = random_coeff(rng);
    while lead.norm() < 0.3 {
        lead = random_coeff(rng);
    }
    coeffs.push(lead);
    ComplexPoly::new(coeffs)
}

fn random_rational(rng: &mut ChaCha8Rng, k: usize, l: usize) -> RationalFunction {
    loop {
        let q = random_poly(rng, k);
        let p = random_poly(rng, l);
        if let Ok(r) = RationalFunction::new(q, p) {
            if r.num_degree() == Some(k) && r.den_degree() == l && !r.is_constant() {
                return r;
            }
        }
    }
}

fn sample_point(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

#[test]
fn reduction_is_idempotent_on_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let (k, l) = (rng.random_range(0..=4), rng.random_range(1..=4));
        let r = random_rational(&mut rng, k, l);
        let again =
            RationalFunction::new(r.numerator().clone(), r.denominator().clone()).unwrap();
        let mut checked = 0;
        while checked < 50 {
            let z = sample_point(&mut rng);
            let (Some(a), Some(b)) = (r.eval(z), again.eval(z)) else {
                continue;
            };
            assert!(
                (a - b).norm() <= 1e-9 * (1.0 + a.norm()),
                "reduction changed values at {z}"
            );
            checked += 1;
        }
    }
}

#[test]
fn derivative_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let (k1, l1) = (rng.random_range(0..=3), rng.random_range(1..=3));
        let r1 = random_rational(&mut rng, k1, l1);
        let (k2, l2) = (rng.random_range(0..=3), rng.random_range(1..=3));
        let r2 = random_rational(&mut rng, k2, l2);
        let sum = r1.add(&r2).unwrap();
        let lhs = sum.derivative().unwrap();
        let (d1, d2) = (r1.derivative().unwrap(), r2.derivative().unwrap());
        let mut checked = 0;
        while checked < 50 {
            let z = sample_point(&mut rng);
            let (Some(a), Some(b1), Some(b2)) = (lhs.eval(z), d1.eval(z), d2.eval(z)) else {
                continue;
            };
            let b = b1 + b2;
            assert!(
                (a - b).norm() <= 1e-8 * (1.0 + a.norm().max(b.norm())),
                "derivative not additive at {z}: {a} vs {b}"
            );
            checked += 1;
        }
    }
}

#[test]
fn conjugation_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..50 {
        let (k, l) = (rng.random_range(0..=4), rng.random_range(0..=4));
        let f = random_rational(&mut rng, k, l);
        let g = f.conjugate_map().conjugate_map();
        for (a, b) in f
            .numerator()
            .coeffs()
            .iter()
            .zip(g.numerator().coeffs().iter())
        {
            assert!((a - b).norm() <= 1e-12);
        }
        for (a, b) in f
            .denominator()
            .coeffs()
            .iter()
            .zip(g.denominator().coeffs().iter())
        {
            assert!((a - b).norm() <= 1e-12);
        }
    }
}

#[test]
fn residues_sum_to_the_coefficient_at_infinity() {
    // Sum of finite residues equals the 1/z coefficient of the expansion at
    // infinity when deg numer <= deg denom + 1; the latter comes from the
    // division remainder, an independent extraction route.
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut done = 0;
    while done < 100 {
        let l = rng.random_range(1..=5usize);
        let k = rng.random_range(0..=(l + 1).min(6));
        let f = random_rational(&mut rng, k, l);
        let Ok(res) = f.residues() else { continue };
        let sum: Complex64 = res.iter().map(|&(_, r)| r).sum();
        let (_, rem) = f.numerator().div_rem(f.denominator()).unwrap();
        let c1 = rem.coeff(l - 1); // denominator is monic
        assert!(
            (sum - c1).norm() <= 1e-7 * (1.0 + c1.norm()),
            "residue sum {sum} vs coefficient {c1} for k={k}, l={l}"
        );
        done += 1;
    }
}

#[test]
fn root_residuals_are_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..60 {
        let deg_pick = rng.random_range(1..=7);
        let p = random_poly(&mut rng, deg_pick);
        let deg = p.degree().unwrap() as i32;
        let scale = p.max_coeff_norm();
        let rs = roots(&p).unwrap();
        assert_eq!(rs.iter().map(|r| r.1).sum::<usize>(), deg as usize);
        for (r, _) in rs {
            let bound = 1e-7 * scale * r.norm().max(1.0).powi(deg);
            assert!(p.eval(r).norm() <= bound, "residual at {r}");
        }
    }
}

#[test]
fn defining_polynomial_identity_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for _ in 0..40 {
        let (k, l) = (rng.random_range(0..=4), rng.random_range(0..=4));
        let r = random_rational(&mut rng, k, l);
        let Ok(curve) = InflectionCurve::new(r.clone()) else {
            continue; // constant derivative
        };
        let f = curve.defining_polynomial();
        let mut checked = 0;
        while checked < 50 {
            let z = sample_point(&mut rng);
            let Ok(im) = curve.im_r_prime(z) else { continue };
            let p4 = r.denominator().eval(z).norm().powi(4);
            let lhs = f.eval_complex(z);
            let rhs = p4 * im;
            let scale = p4 * (1.0 + im.abs()).max(1.0);
            assert!(
                (lhs - rhs).abs() <= 1e-7 * scale,
                "defining identity failed at {z}: {lhs} vs {rhs}"
            );
            checked += 1;
        }
    }
}

#[test]
fn degree_bound_never_exceeded() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let (k, l) = (rng.random_range(0..=4), rng.random_range(0..=4));
        let r = random_rational(&mut rng, k, l);
        let Ok(curve) = InflectionCurve::new(r) else {
            continue;
        };
        let rep = curve.degree_report();
        assert!(
            rep.actual <= rep.bound,
            "degree {} exceeds bound {}",
            rep.actual,
            rep.bound
        );
    }
}

#[test]
fn real_field_expression_matches_im_r_prime() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for _ in 0..10 {
        let (k, l) = (rng.random_range(0..=3), rng.random_range(0..=3));
        let r = random_rational(&mut rng, k, l);
        let Ok(curve) = InflectionCurve::new(r.clone()) else {
            continue;
        };
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 50 && attempts < 5000 {
            attempts += 1;
            let z = sample_point(&mut rng);
            let Ok(expr) = curve.real_field_inflection_expression(z) else {
                continue;
            };
            let Ok(im) = curve.im_r_prime(z) else { continue };
            let Some(rv) = r.eval(z) else { continue };
            // Keep away from poles so the finite-difference stencil is sane.
            if r.denominator().eval(z).norm()
                < 1e-2 * r.denominator().eval_abs(z.norm()).max(1e-300)
            {
                continue;
            }
            let rhs = rv.norm_sqr() * im;
            let scale = (1.0 + rv.norm_sqr()) * (1.0 + im.abs());
            assert!(
                (expr - rhs).abs() <= 1e-4 * scale,
                "cross-check failed at {z}: {expr} vs {rhs}"
            );
            checked += 1;
        }
        assert!(checked >= 50, "not enough usable sample points");
    }
}

#[test]
fn separatrix_and_tangent_rays_coincide() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let s = rng.random_range(1..=4usize);
        let mut a = random_coeff(&mut rng);
        while a.norm() < 0.05 {
            a = random_coeff(&mut rng);
        }
        let t = pole_tangent_rays(s, a);
        let sep = separatrix_directions(s, a);
        assert_eq!(t.len(), 2 * s + 2);
        assert!(t.approx_eq(&sep, 1e-9), "mismatch for s={s}, a={a}");
    }
}

#[test]
fn ray_counts_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    for _ in 0..100 {
        let m: i64 = *[-4, -3, -2, -1, 1, 2, 3, 4]
            .get(rng.random_range(0..8usize))
            .unwrap();
        let mut cc = random_coeff(&mut rng);
        while cc.norm() < 0.05 {
            cc = random_coeff(&mut rng);
        }
        assert_eq!(asymptotic_rays(cc, m).len(), 2 * m.unsigned_abs() as usize);
    }
}

#[test]
fn tangent_rays_see_sign_changes_of_the_defining_polynomial() {
    // For each pole and each tangent ray, the defining polynomial changes
    // sign across the ray at small radii.
    let cases: Vec<RationalFunction> = vec![
        RationalFunction::new(ComplexPoly::one(), ComplexPoly::monomial(c(1.0, 0.0), 1)).unwrap(),
        RationalFunction::new(
            ComplexPoly::constant(c(0.4, 0.8)),
            ComplexPoly::from_roots(c(1.0, 0.0), &[(c(0.5, -0.3), 2)]),
        )
        .unwrap(),
        RationalFunction::new(
            ComplexPoly::from_real(&[1.0, 0.3]),
            ComplexPoly::from_roots(c(1.0, 0.0), &[(c(-0.2, 0.1), 3)]),
        )
        .unwrap(),
    ];
    for r in cases {
        let curve = InflectionCurve::new(r.clone()).unwrap();
        let f = curve.defining_polynomial();
        for pole in poles(&r).unwrap() {
            let s = pole.order;
            let half_gap = std::f64::consts::PI / (8.0 * (s as f64 + 1.0));
            for &theta in pole.tangent_rays.angles() {
                for radius in [1e-3, 1e-4] {
                    let zp = pole.location
                        + radius * c((theta + half_gap).cos(), (theta + half_gap).sin());
                    let zm = pole.location
                        + radius * c((theta - half_gap).cos(), (theta - half_gap).sin());
                    let (vp, vm) = (f.eval_complex(zp), f.eval_complex(zm));
                    assert!(
                        vp * vm < 0.0,
                        "no sign change across ray {theta} at radius {radius} (pole {})",
                        pole.location
                    );
                }
            }
        }
    }
}

#[test]
fn asymptotic_rays_see_sign_changes_of_im_r_prime() {
    let mut rng = ChaCha8Rng::seed_from_u64(222);
    let mut done = 0;
    while done < 20 {
        let k = rng.random_range(0..=4usize);
        let l = rng.random_range(0..=3usize);
        if (k as i64 - l as i64 - 1) == 0 {
            continue;
        }
        let r = random_rational(&mut rng, k, l);
        let Ok(rp) = r.derivative() else { continue };
        if rp.is_zero() {
            continue;
        }
        let Ok(leading) = laurent_leading_at_infinity(&rp) else {
            continue;
        };
        if leading.exponent == 0 {
            continue;
        }
        let rays = asymptotic_rays(leading.coeff, leading.exponent);
        let gap = 0.25 * std::f64::consts::PI / rays.len() as f64;
        let radius = 1e3;
        for &theta in rays.angles() {
            let zp = radius * c((theta + gap).cos(), (theta + gap).sin());
            let zm = radius * c((theta - gap).cos(), (theta - gap).sin());
            let (Some(vp), Some(vm)) = (rp.eval(zp), rp.eval(zm)) else {
                panic!("evaluation at large radius hit a pole");
            };
            assert!(
                vp.im * vm.im < 0.0,
                "no sign change across asymptotic ray {theta}"
            );
        }
        done += 1;
    }
}

#[test]
fn generic_end_count_matches_degree_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(333);
    let mut done = 0;
    while done < 50 {
        let k = rng.random_range(0..=4usize);
        let l = rng.random_range(0..=4usize);
        if k == l || (k as i64 - l as i64 - 1) == 0 {
            continue;
        }
        let r = random_rational(&mut rng, k, l);
        let Ok(report) = boundedness_analysis(&r) else {
            continue;
        };
        let expected = 2 * (k as i64 - l as i64 - 1).unsigned_abs() as usize;
        assert_eq!(report.verdict, Boundedness::Unbounded);
        assert_eq!(report.end_count, expected, "k={k}, l={l}");
        done += 1;
    }
}

#[test]
fn exactness_roundtrip_on_random_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(444);
    let mut done = 0;
    while done < 200 {
        let (k, l) = (rng.random_range(0..=4), rng.random_range(0..=4));
        let r = random_rational(&mut rng, k, l);
        let Ok(d) = r.derivative() else { continue };
        if d.is_zero() {
            continue;
        }
        let report = is_exact(&d, DEFAULT_RESIDUE_TOL).unwrap();
        assert!(report.exact, "derivative reported non-exact: {:?}", report);
        // All finite poles of an exact map have order >= 2.
        for (_, order) in d.denominator_roots().unwrap() {
            assert!(order >= 2);
        }
        let prim = primitive(&d).unwrap();
        // primitive(derivative(R)) - R is constant: sample the difference.
        let mut values = Vec::new();
        let mut attempts = 0;
        while values.len() < 20 && attempts < 4000 {
            attempts += 1;
            let z = sample_point(&mut rng);
            let (Some(a), Some(b)) = (prim.eval(z), r.eval(z)) else {
                continue;
            };
            values.push(a - b);
        }
        let mean: Complex64 = values.iter().sum::<Complex64>() / values.len() as f64;
        let spread = values
            .iter()
            .map(|v| (v - mean).norm())
            .fold(0.0, f64::max);
        assert!(
            spread <= 1e-7 * (1.0 + mean.norm()),
            "primitive differs from the original by a non-constant: spread {spread}"
        );
        done += 1;
    }
}

#[test]
fn simple_pole_residues_obstruct_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(555);
    let mut done = 0;
    while done < 100 {
        // f = residue/(z - a) + polynomial, residue bounded away from zero.
        let a = sample_point(&mut rng);
        let mut residue = random_coeff(&mut rng);
        while residue.norm() <= 1e-3 {
            residue = random_coeff(&mut rng);
        }
        let tail_deg = rng.random_range(0..=2);
        let tail = random_poly(&mut rng, tail_deg);
        let denom = ComplexPoly::from_roots(c(1.0, 0.0), &[(a, 1)]);
        let numer = &(&tail * &denom) + &ComplexPoly::constant(residue);
        let Ok(f) = RationalFunction::new(numer, denom) else {
            continue;
        };
        if f.den_degree() == 0 {
            continue;
        }
        let report = is_exact(&f, DEFAULT_RESIDUE_TOL).unwrap();
        assert!(!report.exact, "nonzero residue {residue} went undetected");
        done += 1;
    }
}
