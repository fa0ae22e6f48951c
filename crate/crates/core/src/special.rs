//! The Beta-type integrals
//!
//! ```text
//! alpha(x, y) = ∫_0^1 t^(x-1) (1-t)^(y-1) dt                  x, y > 0
//! beta(x, y)  = ∫_{-pi/2}^{pi/2} cos(t)^(x-1) e^(y t) dt       x > 0
//! ```
//!
//! together with their recursions and the Hölder-type normalized bounds
//! that control the weighted moments.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::TanhSinh;
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for real `x > 0` (Lanczos, with reflection below 1/2).
pub fn ln_gamma<F: Real>(x: F) -> F {
    if x < F::half() {
        // Γ(x)Γ(1-x) = π / sin(πx); for 0 < x < 1/2 the sine is positive.
        return (F::PI() / (F::PI() * x).sin()).ln() - ln_gamma(F::one() - x);
    }
    let z = x - F::one();
    let mut acc = F::c(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + F::c(c) / (z + F::from_int(i as i64));
    }
    let t = z + F::c(LANCZOS_G) + F::half();
    F::half() * (F::TAU()).ln() + (z + F::half()) * t.ln() - t + acc.ln()
}

/// `ln Γ(z)` for complex `z` with `Re z >= 1/2`.
pub fn ln_gamma_complex<F: Real>(z: Complex<F>) -> Result<Complex<F>> {
    if z.re < F::half() {
        return Err(domain(format!("complex ln_gamma needs Re z >= 1/2, got {}", z.re)));
    }
    let z = z - F::one();
    let mut acc = Complex::new(F::c(LANCZOS_COEFFS[0]), F::zero());
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + Complex::new(F::c(c), F::zero()) / (z + F::from_int(i as i64));
    }
    let t = z + F::c(LANCZOS_G) + F::half();
    Ok(Complex::new(F::half() * F::TAU().ln(), F::zero()) + (z + F::half()) * t.ln() - t + acc.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaArgs<F> {
    pub x: F,
    pub y: F,
}

impl<F: Real> AlphaArgs<F> {
    pub fn new(x: F, y: F) -> Result<Self> {
        if !(x > F::zero() && y > F::zero()) || !x.is_finite() || !y.is_finite() {
            return Err(domain(format!("alpha needs x > 0 and y > 0, got ({x}, {y})")));
        }
        Ok(Self { x, y })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaArgs<F> {
    pub x: F,
    pub y: F,
}

impl<F: Real> BetaArgs<F> {
    pub fn new(x: F, y: F) -> Result<Self> {
        if !(x > F::zero()) || !x.is_finite() || !y.is_finite() {
            return Err(domain(format!("beta needs x > 0, got ({x}, {y})")));
        }
        Ok(Self { x, y })
    }
}

/// Evaluation route for `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AlphaMethod {
    /// `exp(lnΓ(x) + lnΓ(y) - lnΓ(x+y))`.
    #[default]
    LogGamma,
    /// Direct quadrature of the integrand, with the endpoint powers removed
    /// by substitution.
    Quadrature,
}

/// Evaluation route for `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BetaMethod {
    /// Quadrature of the smooth integrand for `x >= 1`; for `x < 1` the
    /// value at `x + 2` is computed and the recursion is inverted.
    #[default]
    Quadrature,
    /// Quadrature directly on the (possibly singular) integrand, using the
    /// substitution `tau = v^(1/x)` at the endpoints.
    Singular,
    /// `pi Γ(x) / (2^(x-1) |Γ((x+1+iy)/2)|^2)`.
    GammaProduct,
}

pub fn ln_alpha<F: Real>(a: AlphaArgs<F>) -> F {
    ln_gamma(a.x) + ln_gamma(a.y) - ln_gamma(a.x + a.y)
}

pub fn alpha_eval<F: Real>(a: AlphaArgs<F>, tol: F) -> Result<F> {
    alpha_eval_with(a, AlphaMethod::LogGamma, tol)
}

pub fn alpha_eval_with<F: Real>(a: AlphaArgs<F>, method: AlphaMethod, tol: F) -> Result<F> {
    let a = AlphaArgs::new(a.x, a.y)?;
    match method {
        AlphaMethod::LogGamma => Ok(ln_alpha(a).exp()),
        AlphaMethod::Quadrature => Ok(alpha_half(a.x, a.y, tol)? + alpha_half(a.y, a.x, tol)?),
    }
}

/// `∫_0^{1/2} t^(p-1) (1-t)^(q-1) dt`.
fn alpha_half<F: Real>(p: F, q: F, tol: F) -> Result<F> {
    let rule = TanhSinh::with_tolerance(tol);
    let qm1 = q - F::one();
    if p >= F::one() {
        let pm1 = p - F::one();
        Ok(rule.integrate(F::zero(), F::half(), |n| n.to_a.powf(pm1) * (F::one() - n.x).powf(qm1))?.value)
    } else {
        // t = v^(1/p) turns t^(p-1) dt into dv / p.
        let upper = F::half().powf(p);
        let inv = p.recip();
        let est = rule.integrate(F::zero(), upper, |n| (F::one() - n.to_a.powf(inv)).powf(qm1))?;
        Ok(est.value / p)
    }
}

pub fn beta_eval<F: Real>(b: BetaArgs<F>, tol: F) -> Result<F> {
    beta_eval_with(b, BetaMethod::Quadrature, tol)
}

pub fn beta_eval_with<F: Real>(b: BetaArgs<F>, method: BetaMethod, tol: F) -> Result<F> {
    let b = BetaArgs::new(b.x, b.y)?;
    // beta(x, y) = beta(x, -y) by t -> -t; working with |y| keeps the two
    // signs bit-identical.
    let (x, y) = (b.x, b.y.abs());
    match method {
        BetaMethod::Quadrature => {
            if x >= F::one() {
                beta_smooth(x, y, tol)
            } else {
                let shifted = beta_smooth(x + F::two(), y, tol)?;
                Ok(shifted / beta_recursion_factor(x, y))
            }
        }
        BetaMethod::Singular => beta_singular(x, y, tol),
        BetaMethod::GammaProduct => Ok(ln_beta_gamma_product(x, y)?.exp()),
    }
}

/// Ratio `beta(x+2, y) / beta(x, y) = x(x+1) / ((x+1)^2 + y^2)`.
pub fn beta_recursion_factor<F: Real>(x: F, y: F) -> F {
    let xp1 = x + F::one();
    x * xp1 / (xp1 * xp1 + y * y)
}

/// Ratios `(alpha(x, y+1), alpha(x+1, y)) / alpha(x, y)`.
pub fn alpha_recursion_factors<F: Real>(x: F, y: F) -> (F, F) {
    (y / (x + y), x / (x + y))
}

fn beta_smooth<F: Real>(x: F, y: F, tol: F) -> Result<F> {
    let rule = TanhSinh::with_tolerance(tol);
    let xm1 = x - F::one();
    let est = rule.integrate(-F::FRAC_PI_2(), F::FRAC_PI_2(), |n| {
        n.to_nearest().sin().powf(xm1) * (y * n.x).exp()
    })?;
    Ok(est.value)
}

fn beta_singular<F: Real>(x: F, y: F, tol: F) -> Result<F> {
    // Fold onto [0, pi/2] and write tau = pi/2 - |t|, so that the singular
    // factor sin(tau)^(x-1) sits at tau = 0.
    let rule = TanhSinh::with_tolerance(tol);
    let xm1 = x - F::one();
    let fold = |tau: F| F::two() * (y * (F::FRAC_PI_2() - tau)).cosh();
    if x >= F::one() {
        let est = rule.integrate(F::zero(), F::FRAC_PI_2(), |n| n.to_a.sin().powf(xm1) * fold(n.to_a))?;
        Ok(est.value)
    } else {
        let inv = x.recip();
        let upper = F::FRAC_PI_2().powf(x);
        let est = rule.integrate(F::zero(), upper, |n| {
            let tau = n.to_a.powf(inv);
            let sinc = if tau > F::zero() { tau.sin() / tau } else { F::one() };
            sinc.powf(xm1) * fold(tau)
        })?;
        Ok(est.value / x)
    }
}

fn ln_beta_gamma_product<F: Real>(x: F, y: F) -> Result<F> {
    let z = Complex::new((x + F::one()) * F::half(), y * F::half());
    let lg = ln_gamma_complex(z)?;
    Ok(F::PI().ln() + ln_gamma(x) - (x - F::one()) * F::two().ln() - F::two() * lg.re)
}

/// Largest relative residual among symmetry and the two shift recursions
/// of `alpha` at `(x, y)`.
pub fn alpha_recursion_residual<F: Real>(a: AlphaArgs<F>) -> Result<F> {
    alpha_recursion_residual_with(a, AlphaMethod::LogGamma, F::c(1e-13))
}

pub fn alpha_recursion_residual_with<F: Real>(a: AlphaArgs<F>, method: AlphaMethod, tol: F) -> Result<F> {
    let a = AlphaArgs::new(a.x, a.y)?;
    let (x, y) = (a.x, a.y);
    let eval = |x: F, y: F| alpha_eval_with(AlphaArgs { x, y }, method, tol);
    let base = eval(x, y)?;
    let swapped = eval(y, x)?;
    let up_y = eval(x, y + F::one())?;
    let up_x = eval(x + F::one(), y)?;
    let (fy, fx) = alpha_recursion_factors(x, y);
    let symmetry = (base - swapped).abs() / base;
    let ry = (up_y - fy * base).abs() / up_y;
    let rx = (up_x - fx * base).abs() / up_x;
    Ok(symmetry.max(ry).max(rx))
}

/// Relative residual of `beta(x+2, y) = x(x+1)/((x+1)^2+y^2) beta(x, y)`.
pub fn beta_recursion_residual<F: Real>(b: BetaArgs<F>) -> Result<F> {
    beta_recursion_residual_with(b, BetaMethod::Quadrature, F::c(1e-13))
}

pub fn beta_recursion_residual_with<F: Real>(b: BetaArgs<F>, method: BetaMethod, tol: F) -> Result<F> {
    let b = BetaArgs::new(b.x, b.y)?;
    let lhs = beta_eval_with(BetaArgs { x: b.x + F::two(), y: b.y }, method, tol)?;
    let rhs = beta_recursion_factor(b.x, b.y) * beta_eval_with(b, method, tol)?;
    Ok((lhs - rhs).abs() / lhs)
}

fn check_s<F: Real>(s: F) -> Result<()> {
    if !(s >= F::zero() && s < F::half()) {
        return Err(domain(format!("need 0 <= s < 1/2, got s = {s}")));
    }
    Ok(())
}

/// Right side minus left side of
/// `alpha(x-2s, y-2s) alpha(x+2s, y+2s) / alpha(x, y)^2 <= xy / ((x-2s)(y-2s))`.
pub fn alpha_holder_margin<F: Real>(x: F, y: F, s: F) -> Result<F> {
    check_s(s)?;
    let ts = F::two() * s;
    if !(x > ts && y > ts) {
        return Err(domain(format!("alpha bound needs x, y > 2s, got x = {x}, y = {y}, s = {s}")));
    }
    let lhs = (ln_alpha(AlphaArgs { x: x - ts, y: y - ts }) + ln_alpha(AlphaArgs { x: x + ts, y: y + ts })
        - F::two() * ln_alpha(AlphaArgs { x, y }))
    .exp();
    let rhs = x * y / ((x - ts) * (y - ts));
    Ok(rhs - lhs)
}

/// Right side minus left side of
/// `beta(x-4s, y) beta(x+4s, y) / beta(x, y)^2 <= (1+4s) x / (x-4s)`.
///
/// The bound is usually stated for `y > 0`; since `beta` is even in `y` it is
/// applied here through `|y|`, with `y = 0` as the continuous limit.
pub fn beta_holder_margin<F: Real>(x: F, y: F, s: F, tol: F) -> Result<F> {
    check_s(s)?;
    let fs = F::c(4.0) * s;
    if !(x > fs) {
        return Err(domain(format!("beta bound needs x > 4s, got x = {x}, s = {s}")));
    }
    let eval = |x: F| beta_eval(BetaArgs { x, y }, tol);
    let lhs = eval(x - fs)? * eval(x + fs)? / eval(x)?.powi(2);
    let rhs = (F::one() + fs) * x / (x - fs);
    Ok(rhs - lhs)
}
