//! Pointwise geometry of the cover domain and its Reinhardt model.
//!
//! The cover domain lives in `C x (C \ {0})` and is cut out by
//! `|z1 + e^{i log|z2|^2}|^2 < 1`. The model domain is
//!
//! ```text
//! D = { 0 < |w1| < 1,  |log|w2|^2| < arccos(|w1|^mu) }
//! ```
//!
//! and the two are related by [`forward_map`] / [`inverse_map`], modulo the
//! deck shift `(z1, z2) -> (e^{2 pi mu i} z1, e^{pi mu} z2)`.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;

/// The shape parameter `mu > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainParams<F> {
    mu: F,
}

impl<F: Real> DomainParams<F> {
    pub fn new(mu: F) -> Result<Self> {
        if !(mu > F::one()) || !mu.is_finite() {
            return Err(domain(format!("mu must be a finite real > 1, got {mu}")));
        }
        Ok(Self { mu })
    }

    #[inline]
    pub fn mu(&self) -> F {
        self.mu
    }

    /// `|z2|` scale factor of one deck shift, `e^{pi mu}`.
    pub fn deck_scale(&self) -> F {
        (F::PI() * self.mu).exp()
    }

    /// Rotation angle of `z1` under one deck shift, `2 pi mu`.
    pub fn deck_angle(&self) -> F {
        F::TAU() * self.mu
    }
}

impl<'de, F: Real> Deserialize<'de> for DomainParams<F> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw<F> {
            mu: F,
        }
        let raw = Raw::<F>::deserialize(d)?;
        DomainParams::new(raw.mu).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint<F> {
    pub w1: Complex<F>,
    pub w2: Complex<F>,
}

impl<F: Real> ModelPoint<F> {
    pub fn new(w1: Complex<F>, w2: Complex<F>) -> Self {
        Self { w1, w2 }
    }

    pub fn real(w1: F, w2: F) -> Self {
        Self::new(Complex::new(w1, F::zero()), Complex::new(w2, F::zero()))
    }

    pub fn from_polar(r1: F, t1: F, r2: F, t2: F) -> Self {
        Self::new(Complex::from_polar(r1, t1), Complex::from_polar(r2, t2))
    }

    /// `log|w2|^2`.
    #[inline]
    pub fn log_r2_sq(&self) -> F {
        self.w2.norm_sqr().ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverPoint<F> {
    pub z1: Complex<F>,
    pub z2: Complex<F>,
}

impl<F: Real> CoverPoint<F> {
    pub fn new(z1: Complex<F>, z2: Complex<F>) -> Result<Self> {
        let p = Self { z1, z2 };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if self.z2 == Complex::new(F::zero(), F::zero()) || !self.z2.norm_sqr().is_finite() {
            return Err(domain("cover point needs z2 != 0"));
        }
        Ok(())
    }

    /// `log|z2|^2`.
    #[inline]
    fn log_r2_sq(&self) -> F {
        self.z2.norm_sqr().ln()
    }

    /// `Re(z1 e^{-i log|z2|^2})`, the coordinate controlling the Levi form.
    pub fn twisted_re(&self) -> F {
        (self.z1 * Complex::from_polar(F::one(), -self.log_r2_sq())).re
    }
}

/// Frame vectors (coefficients of `d/dw1`, `d/dw2`) and dual coframe
/// (coefficients of `dw1`, `dw2`) at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameAt<F> {
    pub point: ModelPoint<F>,
    pub l1: [Complex<F>; 2],
    pub l2: [Complex<F>; 2],
    pub theta1: [Complex<F>; 2],
    pub theta2: [Complex<F>; 2],
}

impl<F: Real> FrameAt<F> {
    /// `pairing[i][j] = theta^{i+1}(L_{j+1})`.
    pub fn pairing(&self) -> [[Complex<F>; 2]; 2] {
        let pair = |c: &[Complex<F>; 2], v: &[Complex<F>; 2]| c[0] * v[0] + c[1] * v[1];
        [
            [pair(&self.theta1, &self.l1), pair(&self.theta1, &self.l2)],
            [pair(&self.theta2, &self.l1), pair(&self.theta2, &self.l2)],
        ]
    }

    /// Expands `dw1` as `a theta^1 + b theta^2`; returns `(a, b)`.
    pub fn dw1_in_frame(&self) -> (Complex<F>, Complex<F>) {
        // dw1 evaluated on the frame vectors gives its coframe coefficients.
        (self.l1[0], self.l2[0])
    }

    /// Expands `dw2` as `a theta^1 + b theta^2`.
    pub fn dw2_in_frame(&self) -> (Complex<F>, Complex<F>) {
        (self.l1[1], self.l2[1])
    }
}

pub fn contains<F: Real>(params: &DomainParams<F>, w: &ModelPoint<F>) -> bool {
    let r1 = w.w1.norm();
    if !(r1 > F::zero() && r1 < F::one()) || w.w2.norm_sqr() == F::zero() {
        return false;
    }
    w.log_r2_sq().abs() < r1.powf(params.mu()).acos()
}

/// `(a, b) = (exp(-arccos(r1^mu)/2), exp(arccos(r1^mu)/2))`, the range of `|w2|`
/// over the circle `|w1| = r1`.
pub fn radial_bounds<F: Real>(params: &DomainParams<F>, r1: F) -> Result<(F, F)> {
    if !(r1 > F::zero() && r1 < F::one()) {
        return Err(domain(format!("radial bounds need 0 < r1 < 1, got {r1}")));
    }
    let half_width = r1.powf(params.mu()).acos() * F::half();
    Ok(((-half_width).exp(), half_width.exp()))
}

/// Boundary weight `|w1|^mu (cos(log|w2|^2) - |w1|^mu)` on the closure of `D`.
///
/// Points within rounding of the boundary return 0.
pub fn delta0<F: Real>(params: &DomainParams<F>, w: &ModelPoint<F>) -> Result<F> {
    let r1 = w.w1.norm();
    let slack = F::c(1e3) * F::epsilon();
    if !(r1 > F::zero() && r1 <= F::one()) || w.w2.norm_sqr() == F::zero() {
        return Err(domain("delta0 needs 0 < |w1| <= 1 and w2 != 0"));
    }
    let p = r1.powf(params.mu());
    let l = w.log_r2_sq();
    if l.abs() > p.min(F::one()).acos() + slack {
        return Err(domain(format!("point outside the closed domain: |log|w2|^2| = {}", l.abs())));
    }
    Ok((p * (l.cos() - p)).max(F::zero()))
}

/// `|z1 + e^{i log|z2|^2}|^2 - 1`, evaluated as `|z1|^2 + 2 Re(z1 e^{-i log|z2|^2})`.
pub fn rho_tilde<F: Real>(z: &CoverPoint<F>) -> Result<F> {
    z.check()?;
    Ok(z.z1.norm_sqr() + F::two() * z.twisted_re())
}

/// The defining function in its first written form, kept for cross-checks.
pub fn rho_tilde_direct<F: Real>(z: &CoverPoint<F>) -> Result<F> {
    z.check()?;
    let e = Complex::from_polar(F::one(), z.log_r2_sq());
    Ok((z.z1 + e).norm_sqr() - F::one())
}

/// Levi form of the defining function at a boundary point,
/// `2(-x)(rho + 1)/|z2|^2` with `x = Re(z1 e^{-i log|z2|^2})`.
pub fn levi_form_boundary<F: Real>(z: &CoverPoint<F>) -> Result<F> {
    let rho = rho_tilde(z)?;
    if rho.abs() > F::c(1e-10) {
        return Err(domain(format!("not a boundary point: rho = {rho}")));
    }
    let x = z.twisted_re();
    Ok(F::two() * (-x) * (rho + F::one()) / z.z2.norm_sqr())
}

/// Logarithm of `zeta` with imaginary part in `[log t^2, log t^2 + 2 pi)`.
pub fn log_branch<F: Real>(t: F, zeta: Complex<F>) -> Result<Complex<F>> {
    if !(t > F::zero()) || !t.is_finite() {
        return Err(domain(format!("branch parameter must be positive, got {t}")));
    }
    if zeta.norm_sqr() == F::zero() {
        return Err(domain("log of zero"));
    }
    let lo = F::two() * t.ln();
    let tau = F::TAU();
    let mut arg = zeta.arg();
    arg = arg + tau * ((lo - arg) / tau).ceil();
    if arg < lo {
        arg = arg + tau;
    } else if arg >= lo + tau {
        arg = arg - tau;
    }
    Ok(Complex::new(zeta.norm().ln(), arg))
}

/// The covering map onto the model domain.
pub fn forward_map<F: Real>(params: &DomainParams<F>, z: &CoverPoint<F>) -> Result<ModelPoint<F>> {
    if !(rho_tilde(z)? < F::zero()) {
        return Err(domain("point is not inside the cover domain"));
    }
    forward_map_unchecked(params, z)
}

fn forward_map_unchecked<F: Real>(params: &DomainParams<F>, z: &CoverPoint<F>) -> Result<ModelPoint<F>> {
    let log_z1 = log_branch(z.z2.norm(), z.z1)?;
    let i = Complex::new(F::zero(), F::one());
    let w1 = ((log_z1 - F::two().ln()) / params.mu()).exp();
    let w2 = z.z2 * ((i * log_z1 + F::PI()) * F::half()).exp();
    Ok(ModelPoint { w1, w2 })
}

/// The `k`-th preimage of `w` under [`forward_map`].
pub fn inverse_map<F: Real>(params: &DomainParams<F>, w: &ModelPoint<F>, k: i64) -> Result<CoverPoint<F>> {
    if !contains(params, w) {
        return Err(domain("point is not in the model domain"));
    }
    let mu = params.mu();
    let i = Complex::new(F::zero(), F::one());
    let mu_log_w1 = w.w1.ln() * mu;
    let kf = F::from_int(k);
    let z1 = (mu_log_w1 + i * (F::TAU() * mu * kf)).exp() * F::two();
    let z2 = w.w2 * (F::PI() * mu * kf).exp() * (-(i * (mu_log_w1 + F::two().ln()) + F::PI()) * F::half()).exp();
    Ok(CoverPoint { z1, z2 })
}

/// Applies the deck shift `(z1, z2) -> (e^{2 pi mu i} z1, e^{pi mu} z2)` `k` times.
pub fn deck_shift<F: Real>(params: &DomainParams<F>, z: &CoverPoint<F>, k: i64) -> CoverPoint<F> {
    let kf = F::from_int(k);
    CoverPoint {
        z1: z.z1 * Complex::from_polar(F::one(), params.deck_angle() * kf),
        z2: z.z2 * (F::PI() * params.mu() * kf).exp(),
    }
}

/// Whether `b` is a deck shift of `a`, up to relative tolerance `tol`.
pub fn equivalent<F: Real>(params: &DomainParams<F>, a: &CoverPoint<F>, b: &CoverPoint<F>, tol: F) -> Result<bool> {
    a.check()?;
    b.check()?;
    let k = ((b.z2.norm() / a.z2.norm()).ln() / (F::PI() * params.mu())).round();
    let Some(k) = k.to_i64() else { return Ok(false) };
    let s = deck_shift(params, a, k);
    let close = |p: Complex<F>, q: Complex<F>| (p - q).norm() <= tol * p.norm().max(q.norm()).max(F::one());
    Ok(close(s.z1, b.z1) && close(s.z2, b.z2))
}

/// The isometry `(e^{i mu t1} z1, e^{mu t1 / 2 + i t2} z2)` of the cover domain.
pub fn isometry_apply<F: Real>(params: &DomainParams<F>, theta1: F, theta2: F, z: &CoverPoint<F>) -> Result<CoverPoint<F>> {
    z.check()?;
    let mu = params.mu();
    Ok(CoverPoint {
        z1: z.z1 * Complex::from_polar(F::one(), mu * theta1),
        z2: z.z2 * Complex::from_polar((mu * theta1 * F::half()).exp(), theta2),
    })
}

pub fn frame_at<F: Real>(params: &DomainParams<F>, w: &ModelPoint<F>) -> Result<FrameAt<F>> {
    let zero = Complex::new(F::zero(), F::zero());
    if w.w1 == zero || w.w2 == zero {
        return Err(domain("frame needs w1 != 0 and w2 != 0"));
    }
    let mu = params.mu();
    let i = Complex::new(F::zero(), F::one());
    let p = w.w1.norm().powf(mu);
    let e = Complex::from_polar(F::one(), w.log_r2_sq());
    let two_mu = F::two() * mu;
    Ok(FrameAt {
        point: *w,
        l1: [-w.w1 * e / (two_mu * p), -i * w.w2 * e / (F::c(4.0) * p)],
        l2: [zero, w.w2],
        theta1: [-(e.conj() * two_mu * p) / w.w1, zero],
        theta2: [-i * mu / (w.w1 * F::two()), w.w2.inv()],
    })
}

fn density<F: Real>(mu: F, w: &ModelPoint<F>) -> F {
    F::c(4.0) * mu * mu * w.w1.norm().powf(F::two() * mu - F::two()) / w.w2.norm_sqr()
}

/// Density of the model volume element against Lebesgue measure,
/// `4 mu^2 |w1|^(2mu-2) / |w2|^2`.
pub fn volume_density<F: Real>(params: &DomainParams<F>, w: &ModelPoint<F>) -> Result<F> {
    let zero = Complex::new(F::zero(), F::zero());
    if w.w1 == zero || w.w2 == zero {
        return Err(domain("volume density needs w1 != 0 and w2 != 0"));
    }
    Ok(density(params.mu(), w))
}

/// Radii `(|w1|, |w2|)` for the rectangle coordinates `u1 in (0,1)`,
/// `u2 in (-pi/2, pi/2)`, in which the model domain is a product.
pub fn radii_from_u<F: Real>(params: &DomainParams<F>, u1: F, u2: F) -> (F, F) {
    ((u1 * u2.cos()).powf(params.mu().recip()), (u2 * F::half()).exp())
}

/// Inverse of [`radii_from_u`].
pub fn u_from_radii<F: Real>(params: &DomainParams<F>, r1: F, r2: F) -> (F, F) {
    let u2 = F::two() * r2.ln();
    (r1.powf(params.mu()) / u2.cos(), u2)
}

fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let v: f64 = rng.gen();
        if v > 0.0 {
            return v;
        }
    }
}

/// A random interior point of the model domain (uniform in the rectangle
/// coordinates and both angles).
pub fn sample_model<F: Real, R: Rng + ?Sized>(params: &DomainParams<F>, rng: &mut R) -> ModelPoint<F> {
    loop {
        let u1 = F::c(unit_open(rng));
        let u2 = F::c((unit_open(rng) - 0.5) * std::f64::consts::PI);
        let (r1, r2) = radii_from_u(params, u1, u2);
        let t1 = F::c(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let t2 = F::c(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let w = ModelPoint::from_polar(r1, t1, r2, t2);
        if contains(params, &w) {
            return w;
        }
    }
}

/// A random interior point of the cover domain, on sheet `k in [-2, 2]`.
pub fn sample_cover<F: Real, R: Rng + ?Sized>(params: &DomainParams<F>, rng: &mut R) -> CoverPoint<F> {
    loop {
        let w = sample_model(params, rng);
        let k = rng.gen_range(-2..=2);
        if let Ok(z) = inverse_map(params, &w, k) {
            if rho_tilde(&z).map(|r| r < F::zero()).unwrap_or(false) {
                return z;
            }
        }
    }
}

/// A boundary point of the cover domain with prescribed `x = Re(z1 e^{-i log|z2|^2})`
/// in `[-2, 0]`, sign of the conjugate coordinate, and `log|z2|^2`.
pub fn cover_boundary_point<F: Real>(x: F, upper: bool, log_r2_sq: F, arg_z2: F) -> Result<CoverPoint<F>> {
    if !(x >= -F::two() && x <= F::zero()) {
        return Err(domain(format!("boundary coordinate x must lie in [-2, 0], got {x}")));
    }
    let y = (-x * (x + F::two())).max(F::zero()).sqrt();
    let y = if upper { y } else { -y };
    let z1 = Complex::new(x, y) * Complex::from_polar(F::one(), log_r2_sq);
    CoverPoint::new(z1, Complex::from_polar((log_r2_sq * F::half()).exp(), arg_z2))
}

/// A random boundary point of the cover domain; `log|z2|^2` sweeps one deck period.
pub fn sample_cover_boundary<F: Real, R: Rng + ?Sized>(params: &DomainParams<F>, rng: &mut R) -> CoverPoint<F> {
    let x = F::c(rng.gen_range(-2.0..=0.0));
    let upper = rng.gen_bool(0.5);
    let l = F::c(rng.gen_range(0.0..1.0)) * params.deck_angle();
    let a = F::c(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
    cover_boundary_point(x, upper, l, a).expect("x sampled in range")
}

/// A random point of the outer boundary `|log|w2|^2| = arccos(|w1|^mu)` of the model domain.
pub fn sample_model_boundary<F: Real, R: Rng + ?Sized>(params: &DomainParams<F>, rng: &mut R) -> ModelPoint<F> {
    let u2 = F::c((unit_open(rng) - 0.5) * std::f64::consts::PI);
    let (r1, r2) = radii_from_u(params, F::one(), u2);
    let t1 = F::c(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
    let t2 = F::c(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
    ModelPoint::from_polar(r1, t1, r2, t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn params_reject_small_mu() {
        assert!(DomainParams::<f64>::new(1.0).is_err());
        assert!(DomainParams::<f64>::new(0.5).is_err());
        assert!(DomainParams::<f64>::new(f64::NAN).is_err());
        assert!(DomainParams::<f64>::new(1.5).is_ok());
    }

    #[test]
    fn membership_examples() {
        let p = DomainParams::<f64>::new(2.0).unwrap();
        assert!(contains(&p, &ModelPoint::real(0.5, 1.0)));
        assert!(!contains(&p, &ModelPoint::real(0.5, E)));
        assert!(!contains(&p, &ModelPoint::real(0.0, 1.0)));
        assert!(!contains(&p, &ModelPoint::real(1.0, 1.0)));
    }

    #[test]
    fn radial_bound_examples() {
        let p = DomainParams::<f64>::new(2.0).unwrap();
        let (a, b) = radial_bounds(&p, 1.0 - 1e-12).unwrap();
        assert!((a - 1.0).abs() < 1e-5 && (b - 1.0).abs() < 1e-5);
        let (a, b) = radial_bounds(&p, 1e-9).unwrap();
        assert!((a - (-FRAC_PI_4).exp()).abs() < 1e-12 && (b - FRAC_PI_4.exp()).abs() < 1e-12);
        let (a, b) = radial_bounds(&p, 0.5).unwrap();
        assert!((a - (-(0.25f64).acos() / 2.0).exp()).abs() < 1e-15);
        assert!((a * b - 1.0).abs() < 1e-15 && a < 1.0 && b > 1.0);
        assert!(contains(&p, &ModelPoint::real(0.5, a * (1.0 + 1e-9))));
        assert!(!contains(&p, &ModelPoint::real(0.5, a * (1.0 - 1e-9))));
        assert!(radial_bounds(&p, 0.0).is_err() && radial_bounds(&p, 1.0).is_err());
    }

    #[test]
    fn delta0_examples() {
        let p = DomainParams::<f64>::new(2.0).unwrap();
        let w = ModelPoint::real(0.5f64.sqrt(), 1.0);
        assert!((delta0(&p, &w).unwrap() - 0.25).abs() < 1e-15);
        let w = ModelPoint::real(0.5, 1.1);
        let l = (1.21f64).ln();
        assert!((delta0(&p, &w).unwrap() - 0.25 * (l.cos() - 0.25)).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let b = sample_model_boundary(&p, &mut rng);
            assert!(delta0(&p, &b).unwrap() < 1e-14);
        }
        assert!(delta0(&p, &ModelPoint::real(0.5, E)).is_err());
    }

    #[test]
    fn rho_examples() {
        let z = CoverPoint::new(c(0.0, 0.0), c(1.7, -0.2)).unwrap();
        assert_eq!(rho_tilde(&z).unwrap(), 0.0);
        let z2 = c(0.4, 2.0);
        let l = z2.norm_sqr().ln();
        let z = CoverPoint::new(-Complex::from_polar(1.0, l), z2).unwrap();
        assert!((rho_tilde(&z).unwrap() + 1.0).abs() < 1e-15);
        let z = CoverPoint::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(rho_tilde(&z).unwrap(), 3.0);
        assert!(CoverPoint::new(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn levi_examples() {
        let z = CoverPoint::new(c(0.0, 0.0), c(0.3, 0.9)).unwrap();
        assert_eq!(levi_form_boundary(&z).unwrap(), 0.0);
        let z = cover_boundary_point(-0.5f64, true, 0.7, 0.2).unwrap();
        let expected = 1.0 / z.z2.norm_sqr();
        assert!((levi_form_boundary(&z).unwrap() - expected).abs() < 1e-12 * expected);
        let z = cover_boundary_point(-1.3f64, false, -2.0, 0.0).unwrap();
        assert!(levi_form_boundary(&z).unwrap() > 0.0);
        let z = CoverPoint::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(levi_form_boundary(&z).is_err());
    }

    #[test]
    fn log_branch_examples() {
        assert_eq!(log_branch(1.0, c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        let l: Complex<f64> = log_branch(1.0, c(-1.0, 0.0)).unwrap();
        assert!(l.re.abs() < 1e-16 && (l.im - PI).abs() < 1e-15);
        let l = log_branch(PI.exp(), c(1.0, 0.0)).unwrap();
        assert!((l.im - 2.0 * PI).abs() < 1e-14);
        assert!(log_branch(1.0, c(0.0, 0.0)).is_err());
        assert!(log_branch(0.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn volume_density_examples() {
        assert_eq!(density(1.0, &ModelPoint::real(0.3, 1.0)), 4.0);
        let p = DomainParams::<f64>::new(2.0).unwrap();
        assert!((volume_density(&p, &ModelPoint::real(0.5, 1.0)).unwrap() - 4.0).abs() < 1e-15);
        assert!(volume_density(&p, &ModelPoint::real(1e-8, 1.0)).unwrap() < 1e-14);
        assert!(volume_density(&p, &ModelPoint::real(0.0, 1.0)).is_err());
    }

    #[test]
    fn frame_examples() {
        let p = DomainParams::<f64>::new(2.5).unwrap();
        let w = ModelPoint::new(c(0.3, -0.2), c(0.8, 0.5));
        let f = frame_at(&p, &w).unwrap();
        let m = f.pairing();
        assert!((m[0][0] - 1.0).norm() < 1e-14 && m[0][1].norm() < 1e-14);
        assert!(m[1][0].norm() < 1e-14 && (m[1][1] - 1.0).norm() < 1e-14);
        let (a, b) = f.dw1_in_frame();
        let e = Complex::from_polar(1.0, w.log_r2_sq());
        let expected = -w.w1 * e / (2.0 * 2.5 * w.w1.norm().powf(2.5));
        assert!((a - expected).norm() < 1e-14 * expected.norm() && b.norm() == 0.0);
        let target = w.w1.norm().powf(2.0 - 5.0) / (4.0 * 6.25);
        assert!((a.norm_sqr() - target).abs() < 1e-13 * target);
        assert!(frame_at(&p, &ModelPoint::real(0.0, 1.0)).is_err());
    }

    #[test]
    fn maps_round_trip_and_deck() {
        let p = DomainParams::<f64>::new(2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let w = sample_model(&p, &mut rng);
            let z0 = inverse_map(&p, &w, 0).unwrap();
            assert!((z0.z1.norm() - 2.0 * w.w1.norm().powf(2.5)).abs() < 1e-14);
            let z1 = inverse_map(&p, &w, 1).unwrap();
            let shifted = deck_shift(&p, &z0, 1);
            assert!((shifted.z1 - z1.z1).norm() < 1e-12 * z1.z1.norm().max(1.0));
            assert!((shifted.z2 - z1.z2).norm() < 1e-12 * z1.z2.norm());
            assert!(equivalent(&p, &z0, &z1, 1e-12).unwrap());
            for k in [-2, 0, 1, 3] {
                let z = inverse_map(&p, &w, k).unwrap();
                let back = forward_map(&p, &z).unwrap();
                assert!((back.w1 - w.w1).norm() < 1e-12 && (back.w2 - w.w2).norm() < 1e-12 * w.w2.norm());
            }
        }
    }
}
