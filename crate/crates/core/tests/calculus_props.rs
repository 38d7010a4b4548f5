use std::f64::consts::{FRAC_PI_3, PI};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yieldconvex::calculus::*;
use yieldconvex::convex_analysis::random_symmetric;
use yieldconvex::convexity::singular_plane_angles;
use yieldconvex::criteria::*;
use yieldconvex::fd;
use yieldconvex::tensor::*;
use yieldconvex::Error;

fn shapes() -> Vec<DeviatoricShape> {
    let mut v: Vec<DeviatoricShape> = catalog().into_iter().map(|c| c.2).collect();
    v.push(DeviatoricShape::bp(1.0, 1.0).unwrap());
    v.push(DeviatoricShape::bp(1.7, 0.4).unwrap());
    v
}

/// Plane angle at least `gap` away from every axis and breakpoint image.
fn smooth_angle(shape: &DeviatoricShape, rng: &mut ChaCha8Rng, gap: f64) -> f64 {
    let bad = singular_plane_angles(shape);
    loop {
        let psi: f64 = rng.gen_range(0.0..2.0 * PI);
        let clear = bad.iter().all(|b| {
            let d = (psi - b).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d) >= gap
        });
        if clear {
            return psi;
        }
    }
}

#[test]
fn dev_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for shape in shapes() {
        for _ in 0..100 {
            let q = rng.gen_range(0.1..3.0);
            let s = DeviatoricPair::from_polar(q, smooth_angle(&shape, &mut rng, 1e-2));
            let g = dev_gradient(&s, &shape).unwrap();
            let h = 1e-6 * s.norm();
            let num = fd::gradient_2d(
                |x| dev_value(&DeviatoricPair::new(x[0], x[1]), &shape),
                [s.s1, s.s2],
                h,
            );
            let scale = g[0].hypot(g[1]);
            assert!(
                (g[0] - num[0]).hypot(g[1] - num[1]) <= 1e-6 * scale,
                "{}: {g:?} vs {num:?}",
                shape.label()
            );
        }
    }
}

#[test]
fn dev_gradient_is_degree_zero_homogeneous_and_euler() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for shape in shapes() {
        for _ in 0..50 {
            let s = DeviatoricPair::from_polar(1.0, smooth_angle(&shape, &mut rng, 1e-3));
            let g = dev_gradient(&s, &shape).unwrap();
            let g3 = dev_gradient(&(s * 3.0), &shape).unwrap();
            assert!((g[0] - g3[0]).abs() < 1e-12 && (g[1] - g3[1]).abs() < 1e-12);
            // q/g is 1-homogeneous, so ∇φ·s = φ
            let euler = g[0] * s.s1 + g[1] * s.s2;
            assert!((euler - dev_value(&s, &shape)).abs() < 1e-12);
        }
    }
}

#[test]
fn grad_f_matches_directional_finite_differences() {
    let params = BpMeridianParams::new(1.2, 2.0, 0.3, 0.8, 2.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for shape in shapes() {
        let crit = YieldCriterion::new(Meridian::Bp(params), shape.clone());
        let mut checked = 0;
        while checked < 40 {
            let sigma = random_symmetric(&mut rng) * 0.8 + SymmetricTensor3::identity() * -0.9;
            let s = canonical_pair(&sigma);
            let inv = invariants(&sigma).unwrap();
            let ph = phi(inv.p, &params);
            let near_singular = singular_plane_angles(&shape).iter().any(|b| {
                let d = (s.plane_angle() - b).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d) < 1e-2
            });
            if near_singular || !(0.05..0.95).contains(&ph) || inv.q < 1e-2 {
                continue;
            }
            let g = grad_f(&sigma, &crit).unwrap();
            assert!(g.smooth);
            let dir = random_symmetric(&mut rng);
            let h = 1e-6;
            let f = |t: f64| crit.eval(&(sigma + dir * t)).unwrap().value();
            let num = (f(h) - f(-h)) / (2.0 * h);
            assert!(
                (g.gradient.dot(&dir) - num).abs() <= 1e-6 * (1.0 + num.abs()),
                "{}",
                shape.label()
            );
            checked += 1;
        }
    }
}

#[test]
fn subgradients_support_convex_criteria() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let convex = [
        DeviatoricShape::constant(),
        DeviatoricShape::hill1950(),
        DeviatoricShape::two_piece_bp_default(),
        DeviatoricShape::bp(1.0, 1.0).unwrap(),
        DeviatoricShape::bp(0.5, 0.99).unwrap(),
    ];
    for shape in convex {
        let crit = YieldCriterion::new(Meridian::Offset(-1.0), shape.clone());
        let mut points = vec![
            SymmetricTensor3::diag(1.0, 0.0, 0.0),
            SymmetricTensor3::diag(-1.0, 0.0, 0.0),
            SymmetricTensor3::diag(0.5, 0.5, 0.5),
        ];
        for b in shape.breakpoints() {
            let s = principal_from_invariants(0.2, 1.3, b).unwrap();
            points.push(SymmetricTensor3::diag(s[0], s[1], s[2]));
        }
        for sigma in points {
            let g = subgradient_f(&sigma, &crit).unwrap();
            let f0 = crit.eval(&sigma).unwrap().value();
            for _ in 0..500 {
                let tau = sigma + random_symmetric(&mut rng) * 2.0;
                let ft = crit.eval(&tau).unwrap().value();
                assert!(
                    ft >= f0 + g.gradient.dot(&(tau - sigma)) - 1e-12,
                    "{}",
                    shape.label()
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn vanishing_identity_holds(q in 0.05f64..20.0, psi in 0.0f64..(2.0 * PI)) {
        let s = DeviatoricPair::from_polar(q, psi);
        prop_assume!(h_sign(&s).is_ok());
        let d = psi.rem_euclid(FRAC_PI_3);
        prop_assume!(d.min(FRAC_PI_3 - d) > 1e-2);
        let r = vanishing_identity_check(&s).unwrap();
        prop_assert!(r.normalized <= 1e-5, "{:?}", r);
    }

    #[test]
    fn hessian_annihilates_radial_direction(q in 0.1f64..5.0, psi in 0.0f64..(2.0 * PI), beta in 0.0f64..=2.0, gamma in 0.0f64..0.999) {
        let shape = DeviatoricShape::bp(beta, gamma).unwrap();
        let s = DeviatoricPair::from_polar(q, psi);
        prop_assume!(h_sign(&s).is_ok());
        let h = dev_hessian(&s, &shape).unwrap();
        let r = h.apply([s.s1, s.s2]);
        prop_assert!(r[0].abs() + r[1].abs() <= 1e-10 * (1.0 + h.frobenius() * s.norm()));
        prop_assert!(h.det().abs() <= 1e-10 * (1.0 + h.frobenius().powi(2)));
        prop_assert!(h.trace() >= -1e-10);
    }
}

/// Second-order one-sided difference of `h` at 0 towards `sign`.
fn one_sided(h: &dyn Fn(f64) -> f64, sign: f64, eps: f64) -> f64 {
    sign * (-3.0 * h(0.0) + 4.0 * h(sign * eps) - h(2.0 * sign * eps)) / (2.0 * eps)
}

#[test]
fn singular_slopes_match_one_sided_differences() {
    let ks = [-10.0, -2.0, -0.5, 0.0, 0.3, 1.0, 4.0, 10.0];
    for shape in shapes() {
        let mut points = vec![DeviatoricPair::new(0.0, 0.0)];
        for k in 0..6 {
            points.push(DeviatoricPair::from_polar(1.3, k as f64 * FRAC_PI_3));
        }
        for b in shape.breakpoints() {
            for k in 0..3 {
                points.push(DeviatoricPair::from_polar(
                    0.8,
                    2.0 * FRAC_PI_3 * k as f64 + b,
                ));
                points.push(DeviatoricPair::from_polar(
                    0.8,
                    2.0 * FRAC_PI_3 * (k as f64 + 1.0) - b,
                ));
            }
        }
        for p in &points {
            for &k in &ks {
                let (l, r) = line_restriction_slopes(p, k, &shape).unwrap();
                let h = |e: f64| dev_value(&DeviatoricPair::new(p.s1 + e, p.s2 + k * e), &shape);
                let eps = 1e-6;
                let (nl, nr) = (one_sided(&h, -1.0, eps), one_sided(&h, 1.0, eps));
                let tol = 1e-5 * (1.0 + nl.abs() + nr.abs());
                assert!(
                    (l - nl).abs() <= tol && (r - nr).abs() <= tol,
                    "{} at {p:?}, k={k}: ({l},{r}) vs ({nl},{nr})",
                    shape.label()
                );
            }
        }
    }
}

#[test]
fn origin_slope_jump_closed_form() {
    for shape in shapes() {
        for k in [-2.0, 0.0, 1.0, 10.0] {
            let (l, r) =
                line_restriction_slopes(&DeviatoricPair::new(0.0, 0.0), k, &shape).unwrap();
            let root = 3f64.sqrt() * (1.0f64 + k + k * k).sqrt();
            let ahead = shape.g(DeviatoricPair::new(1.0, k).lode_angle()).unwrap();
            assert!((r - root / ahead).abs() < 1e-12);
            assert!(r - l > 0.0);
        }
    }
}

#[test]
fn smooth_points_are_rejected() {
    let s = DeviatoricPair::from_polar(1.0, 0.3);
    assert_eq!(
        line_restriction_slopes(&s, 0.5, &DeviatoricShape::hill1950()),
        Err(Error::NotSingular)
    );
}
