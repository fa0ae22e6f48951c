use num_complex::Complex;
use num_rational::Rational64;
use omega_bergman::bergman::{
    basis_norm_sq, kernel_eval, project, BasisIndex, Component, RadialTerm, RadialTermFunction, Slot, Truncation,
};
use omega_bergman::geometry::*;
use omega_bergman::measure::*;
use omega_bergman::regularity::*;
use omega_bergman::special::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn params(mu: f64) -> DomainParams<f64> {
    DomainParams::new(mu).unwrap()
}

fn mu_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.5), Just(2.0), Just(2.5), Just(3.0), Just(30.0 / 7.0), 1.05f64..6.0]
}

/// Complex Hessian `d^2 rho / dz_j dzbar_k` by central differences.
fn hessian(z: &CoverPoint<f64>, h: f64) -> [[Complex<f64>; 2]; 2] {
    let rho = |d: [f64; 4]| {
        let p = CoverPoint::new(z.z1 + Complex::new(d[0], d[1]), z.z2 + Complex::new(d[2], d[3])).unwrap();
        rho_tilde_direct(&p).unwrap()
    };
    let second = |a: usize, b: usize| {
        let mut d = [[0.0; 4]; 4];
        for (n, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
            d[n][a] += sa * h;
            d[n][b] += sb * h;
        }
        (rho(d[0]) - rho(d[1]) - rho(d[2]) + rho(d[3])) / (4.0 * h * h)
    };
    let mut m = [[Complex::new(0.0, 0.0); 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            m[j][k] = Complex::new(second(xj, xk) + second(yj, yk), second(xj, yk) - second(yj, xk)) * 0.25;
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn alpha_symmetry_and_shifts(x in 0.05f64..12.0, y in 0.05f64..12.0) {
        let a = alpha_eval(AlphaArgs::new(x, y).unwrap(), 1e-14).unwrap();
        let b = alpha_eval(AlphaArgs::new(y, x).unwrap(), 1e-14).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert!(alpha_recursion_residual(AlphaArgs::new(x, y).unwrap()).unwrap() <= 1e-10);
    }

    #[test]
    fn beta_even_and_recursive(x in 0.05f64..8.0, y in -8.0f64..8.0) {
        let p = beta_eval(BetaArgs::new(x, y).unwrap(), 1e-14).unwrap();
        let m = beta_eval(BetaArgs::new(x, -y).unwrap(), 1e-14).unwrap();
        prop_assert!(p > 0.0 && (p - m).abs() <= 1e-13 * p);
        prop_assert!(beta_recursion_residual(BetaArgs::new(x, y).unwrap()).unwrap() <= 1e-10);
    }

    #[test]
    fn holder_bounds(x in 0.0f64..10.0, y in 0.0f64..10.0, s in 0.0f64..0.49) {
        let (xa, ya) = (x + 2.0 * s + 1e-3, y + 2.0 * s + 1e-3);
        prop_assert!(alpha_holder_margin(xa, ya, s).unwrap() >= -1e-9);
        let xb = x + 4.0 * s + 1e-2;
        prop_assert!(beta_holder_margin(xb, y - 5.0, s, 1e-14).unwrap() >= -1e-9);
    }

    #[test]
    fn ratio_between_one_and_bound(mu in mu_strategy(), margin in 0.05f64..4.0, y in -20.0f64..20.0, s in 0.0f64..0.45) {
        let p = params(mu);
        // the ratio needs x/mu + 1 > s at both s and -s, i.e. margin measured at s
        let x = mu * (margin - 1.0 + s);
        let r = lambda_ratio(x, y, s, &p).unwrap();
        let b = lambda_ratio_bound(x, s, &p).unwrap();
        prop_assert!(r >= 1.0 - 1e-12);
        prop_assert!(r <= b * (1.0 + 1e-9), "ratio {} bound {}", r, b);
    }

    #[test]
    fn ratio_bound_decreasing_in_x(mu in mu_strategy(), margin in 0.05f64..4.0, dx in 0.01f64..5.0, s in 0.0f64..0.45) {
        let p = params(mu);
        let x = mu * (margin - 1.0 + s);
        prop_assert!(lambda_ratio_bound(x + dx, s, &p).unwrap() <= lambda_ratio_bound(x, s, &p).unwrap());
    }

    #[test]
    fn integrability_matches_clauses(mu in mu_strategy(), x in -8.0f64..8.0, s in -0.3f64..0.8) {
        let v = integrability_violations(&x, &s, &mu);
        prop_assert_eq!(v.contains(&IntegrabilityClause::RadialExponent), !(x / mu + 1.0 - s > 0.0));
        prop_assert_eq!(v.contains(&IntegrabilityClause::BoundaryExponent), !(s < 0.5));
        let lam = lambda_closed(&MomentArgs::new(params(mu), x, 0.3, s));
        prop_assert_eq!(lam.is_finite(), v.is_empty());
    }

    #[test]
    fn geometry_round_trips(mu in mu_strategy(), seed in any::<u64>(), k in -3i64..=3) {
        let p = params(mu);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_model(&p, &mut rng);
        let z = inverse_map(&p, &w, k).unwrap();
        let back = forward_map(&p, &z).unwrap();
        prop_assert!((back.w1 - w.w1).norm() <= 1e-12 * w.w1.norm().max(1e-300) + 1e-15);
        prop_assert!((back.w2 - w.w2).norm() <= 1e-12 * w.w2.norm());
        let rho = rho_tilde(&z).unwrap();
        prop_assert!(rho < 0.0);
        prop_assert!((rho - rho_tilde_direct(&z).unwrap()).abs() <= 1e-12);
        let d = delta0(&p, &w).unwrap();
        prop_assert!(d > 0.0);
        prop_assert!((d + rho / 4.0).abs() <= 1e-12 * rho.abs().max(1.0));
        prop_assert!(equivalent(&p, &z, &inverse_map(&p, &w, 0).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn isometries_rotate_the_model(mu in mu_strategy(), seed in any::<u64>(), t1 in -6.3f64..6.3, t2 in -6.3f64..6.3) {
        let p = params(mu);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = sample_cover(&p, &mut rng);
        let w = forward_map(&p, &z).unwrap();
        let moved = isometry_apply(&p, t1, t2, &z).unwrap();
        prop_assert!((rho_tilde(&moved).unwrap() - rho_tilde(&z).unwrap()).abs() <= 1e-12);
        let v = forward_map(&p, &moved).unwrap();
        prop_assert!((v.w1 - w.w1 * Complex::from_polar(1.0, t1)).norm() <= 1e-12 * w.w1.norm().max(1e-300));
        prop_assert!((v.w2 - w.w2 * Complex::from_polar(1.0, t2)).norm() <= 1e-12 * w.w2.norm());
    }

    #[test]
    fn frame_is_dual(mu in mu_strategy(), seed in any::<u64>()) {
        let p = params(mu);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_model(&p, &mut rng);
        let f = frame_at(&p, &w).unwrap();
        prop_assert!(omega_bergman::verify::frame_duality_residual(&f) <= 1e-12);
    }

    #[test]
    fn levi_form_matches_hessian(x in -1.95f64..-0.05, upper in any::<bool>(), l in -3.0f64..3.0, a in -3.1f64..3.1) {
        let z = cover_boundary_point(x, upper, l, a).unwrap();
        let levi = levi_form_boundary(&z).unwrap();
        prop_assert!(levi >= 0.0);
        // Z = (2y/z2, -(x - iy + 1) e^{-iL}) spans the complex tangent space
        let e = Complex::from_polar(1.0, -z.z2.norm_sqr().ln());
        let t = z.z1 * e;
        let zv = [Complex::new(2.0 * t.im, 0.0) / z.z2, -(t.conj() + 1.0) * e];
        let h = hessian(&z, 1e-4);
        let mut oracle = Complex::new(0.0, 0.0);
        for j in 0..2 {
            for k in 0..2 {
                oracle += h[j][k] * zv[j] * zv[k].conj();
            }
        }
        prop_assert!(oracle.im.abs() <= 1e-5 * levi.max(1.0));
        prop_assert!((oracle.re - levi).abs() <= 1e-5 * levi.max(1.0), "oracle {} levi {}", oracle, levi);
    }

    #[test]
    fn threshold_formula(num in 1001i64..20000) {
        let mu = Rational64::new(num, 1000);
        for p in 0..3u8 {
            let t = threshold(mu, p).unwrap();
            let half = Rational64::new(1, 2);
            let radial = if p == 0 { (Rational64::from_integer(1) - mu.floor()) / mu + 1 } else { mu.recip() };
            prop_assert_eq!(t.r, radial.min(half));
            let sharp = sharp_threshold(mu, p).unwrap().r;
            prop_assert!(sharp <= t.r);
            prop_assert!(sharp > Rational64::from_integer(0));
        }
    }

    #[test]
    fn inverse_threshold_round_trip(num in 1i64..500) {
        let r = Rational64::new(num, 1000);
        for p in 0..3u8 {
            let mu = mu_for_threshold(r, p).unwrap();
            prop_assert_eq!(threshold(mu, p).unwrap().r, r);
            if p == 0 {
                prop_assert_eq!(mu.floor(), r.recip().ceil());
            }
            let mu = mu_for_sharp_threshold(r, p).unwrap();
            prop_assert_eq!(sharp_threshold(mu, p).unwrap().r, r);
        }
    }

    #[test]
    fn sharp_threshold_is_first_divergence(num in 1001i64..9000, p in 0u8..3) {
        // Just below the sharp threshold every unweighted basis element stays
        // in the weighted space; at it, the sharp witness leaves.
        let mu = Rational64::new(num, 1000);
        let r = sharp_threshold(mu, p).unwrap().r;
        let below = r - Rational64::new(1, 100_000);
        let zero = Rational64::from_integer(0);
        for &c in Component::for_degree(p).unwrap() {
            let j0 = BasisIndex::min_admissible_j(c, &zero, &mu);
            for j in j0..j0 + 5 {
                prop_assert!(BasisIndex::new(j, 0, c).is_admissible(&below, &mu));
            }
        }
        if r < Rational64::new(1, 2) {
            let w = sharp_witness_index(&mu, p).unwrap();
            prop_assert!(w.is_admissible(&zero, &mu));
            prop_assert!(!w.is_admissible(&r, &mu));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_quadrature(mu in prop_oneof![Just(1.5), Just(2.0), Just(3.0)], margin in 0.1f64..3.0, y in -6.0f64..6.0, s in 0.0f64..0.45) {
        let m = MomentArgs::new(params(mu), mu * (margin - 1.0 + s), y, s);
        let c = lambda_closed(&m).value().unwrap();
        let q = lambda_quadrature(&m, 1e-11).unwrap().value().unwrap();
        prop_assert!((c - q).abs() <= 1e-8 * c);
    }

    #[test]
    fn radial_integral_matches_closed_form(mu in 1.2f64..4.0, margin in 0.3f64..3.0, y in -3.0f64..3.0, s in 0.0f64..0.4) {
        let m = MomentArgs::new(params(mu), mu * (margin - 1.0 + s), y, s);
        let c = lambda_closed(&m).value().unwrap();
        let q = lambda_radial(&m, 1e-11).unwrap().value;
        prop_assert!((c - q).abs() <= 1e-8 * c, "closed {} radial {}", c, q);
    }

    #[test]
    fn projection_selects_one_index(mu in 1.5f64..4.0, a in -1i64..4, b in -3i64..4, slot in 0usize..6, shift in 0.1f64..2.0) {
        let p = params(mu);
        let slots = [Slot::Function, Slot::Theta1, Slot::Theta2, Slot::Dw1, Slot::Theta1Theta2, Slot::Dw1Theta2];
        let slot = slots[slot];
        let g: omega_bergman::bergman::Profile<f64> = Arc::new(move |pt: &RadialPoint<f64>| {
            Complex::new(pt.r1_pow(2.0 * shift) * (1.0 + pt.r2()), 0.0)
        });
        let f = RadialTermFunction::new(slot.degree(), vec![RadialTerm::new(g, a, b, slot, "profile")]).unwrap();
        let r = project(&f, &p, Truncation::new(10, 10), 1e-11).unwrap();
        prop_assert!(r.coefficients.len() <= 1);
        if let Some((idx, c)) = r.coefficients.iter().next() {
            prop_assert!(idx.is_admissible(&0.0, &mu));
            let again = project(&RadialTermFunction::from_projection(&r, &p, f.p), &p, Truncation::new(10, 10), 1e-11).unwrap();
            prop_assert!((again.coefficients[idx].value - c.value).norm() <= 1e-10 * c.value.norm());
        }
    }

    #[test]
    fn kernel_hermitian_and_positive(mu in 1.5f64..4.0, seed in any::<u64>(), n in 1i64..12) {
        let p = params(mu);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, u) = (sample_model(&p, &mut rng), sample_model(&p, &mut rng));
        let t = Truncation::new(n, n);
        let a = kernel_eval(&w, &u, &p, t).unwrap().value;
        let b = kernel_eval(&u, &w, &p, t).unwrap().value;
        prop_assert_eq!(a, b.conj());
        let d = kernel_eval(&w, &w, &p, t).unwrap().value;
        prop_assert!(d.im == 0.0 && d.re > 0.0);
    }

    #[test]
    fn certificate_sup_grows_with_s(m in 2i64..6, p in 0u8..3, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let mu = Rational64::from_integer(m);
        let thr = threshold(mu, p).unwrap().r.to_f64_lossy();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let lattice = Lattice { j_max: 20, k_max: 20 };
        let c_lo = continuity_certificate(mu.to_f64_lossy(), p, lo * thr * 0.999, lattice).unwrap();
        let c_hi = continuity_certificate(mu.to_f64_lossy(), p, hi * thr * 0.999, lattice).unwrap();
        prop_assert!(c_hi.sup_ratio >= c_lo.sup_ratio * (1.0 - 1e-12));
        prop_assert!(c_hi.within_bound(1e-9));
    }
}

trait Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl Lossy for Rational64 {
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

#[test]
fn norm_of_witness_diverges_exactly_at_threshold() {
    let p3 = params(3.0);
    assert!(basis_norm_sq(&BasisIndex::function(-2, 0), 0.0, &p3).is_finite());
    assert!(!basis_norm_sq(&BasisIndex::function(-2, 0), 0.34, &p3).is_finite());
}
