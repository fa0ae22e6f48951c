//! Weighted monomial moments
//!
//! ```text
//! lambda(x, y, s) = ∫_D |w1|^(2x) |w2|^(2y) delta0(w)^(-2s) dV
//! ```
//!
//! In the rectangle coordinates `u1 = |w1|^mu / cos(log|w2|^2)`,
//! `u2 = log|w2|^2` the domain becomes `(0,1) x (-pi/2, pi/2)`, the volume
//! element becomes `8 pi^2 mu u1 cos(u2)^2 du1 du2` (after integrating out both
//! angles) and `delta0 = u1 cos(u2)^2 (1 - u1)`, so the moment factors as
//!
//! ```text
//! 8 pi^2 mu alpha(2x/mu + 2 - 2s, 1 - 2s) beta(2x/mu + 3 - 4s, y).
//! ```

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::cell::{Cell, RefCell};
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::geometry::DomainParams;
use crate::quadrature::{Estimate, TanhSinh};
use crate::scalar::{ExactScalar, QuadValue, Real};
use crate::special::{self, AlphaArgs, AlphaMethod, BetaArgs, BetaMethod};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentArgs<F> {
    pub x: F,
    pub y: F,
    pub s: F,
    pub params: DomainParams<F>,
}

/// The two clauses of the integrability condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntegrabilityClause {
    /// `x/mu + 1 - s > 0`, integrability at `w1 = 0`.
    RadialExponent,
    /// `s < 1/2`, integrability at the outer boundary.
    BoundaryExponent,
}

impl fmt::Display for IntegrabilityClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RadialExponent => write!(f, "x/mu+1-s>0 violated"),
            Self::BoundaryExponent => write!(f, "s<1/2 violated"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MomentValue<F> {
    Finite { value: F, err_estimate: F },
    Divergent { violated: Vec<IntegrabilityClause> },
}

impl<F: Real> MomentValue<F> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite { .. })
    }

    pub fn value(&self) -> Option<F> {
        match self {
            Self::Finite { value, .. } => Some(*value),
            Self::Divergent { .. } => None,
        }
    }

    /// Human-readable list of violated clauses, `None` when finite.
    pub fn violated_condition(&self) -> Option<String> {
        match self {
            Self::Finite { .. } => None,
            Self::Divergent { violated } => {
                Some(violated.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
            }
        }
    }
}

/// Exponents of the separated integrand: `u1^(a-1) (1-u1)^(b-1)` and
/// `cos(u2)^(c-1) e^(y u2)`, with `c = a + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatedExponents<F> {
    pub a: F,
    pub b: F,
    pub c: F,
}

impl<F: Real> MomentArgs<F> {
    pub fn new(params: DomainParams<F>, x: F, y: F, s: F) -> Self {
        Self { x, y, s, params }
    }

    /// `x/mu + 1 - s`; positive exactly when the radial clause holds.
    pub fn radial_margin(&self) -> F {
        self.x / self.params.mu() + F::one() - self.s
    }

    pub fn exponents(&self) -> SeparatedExponents<F> {
        let two = F::two();
        let a = two * self.x / self.params.mu() + two - two * self.s;
        let b = F::one() - two * self.s;
        SeparatedExponents { a, b, c: a + b }
    }

    pub fn with_s(&self, s: F) -> Self {
        Self { s, ..*self }
    }
}

/// Violated integrability clauses, in any ordered field.
pub fn integrability_violations<T: ExactScalar>(x: &T, s: &T, mu: &T) -> Vec<IntegrabilityClause> {
    let mut out = Vec::new();
    if !(x.clone() / mu.clone() + T::one() - s.clone() > T::zero()) {
        out.push(IntegrabilityClause::RadialExponent);
    }
    if !(*s < T::one_half()) {
        out.push(IntegrabilityClause::BoundaryExponent);
    }
    out
}

pub fn is_integrable<F: Real + ExactScalar>(m: &MomentArgs<F>) -> bool {
    integrability_violations(&m.x, &m.s, &m.params.mu()).is_empty()
}

fn divergent_or<F: Real + ExactScalar>(m: &MomentArgs<F>) -> Option<MomentValue<F>> {
    let violated = integrability_violations(&m.x, &m.s, &m.params.mu());
    (!violated.is_empty()).then_some(MomentValue::Divergent { violated })
}

fn ln_prefactor<F: Real>(params: &DomainParams<F>) -> F {
    (F::c(8.0) * F::PI() * F::PI() * params.mu()).ln()
}

/// `ln lambda` from the Gamma-function forms of both factors.
pub fn ln_lambda_closed<F: Real + ExactScalar>(m: &MomentArgs<F>) -> Result<F> {
    if let Some(MomentValue::Divergent { violated }) = divergent_or(m) {
        return Err(Error::Divergent(violated.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")));
    }
    let e = m.exponents();
    let ln_a = special::ln_alpha(AlphaArgs::new(e.a, e.b)?);
    let ln_b = special::beta_eval_with(BetaArgs::new(e.c, m.y)?, BetaMethod::GammaProduct, F::epsilon())?.ln();
    Ok(ln_prefactor(&m.params) + ln_a + ln_b)
}

/// Closed form `8 pi^2 mu alpha(a, b) beta(c, y)`.
pub fn lambda_closed<F: Real + ExactScalar>(m: &MomentArgs<F>) -> MomentValue<F> {
    if let Some(d) = divergent_or(m) {
        return d;
    }
    match ln_lambda_closed(m) {
        Ok(l) => {
            let value = l.exp();
            MomentValue::Finite { value, err_estimate: value * F::c(64.0) * F::epsilon() }
        }
        Err(_) => MomentValue::Divergent { violated: Vec::new() },
    }
}

/// The same moment by two independent 1D quadratures of the separated
/// integrand, neither of which goes through the Gamma function.
pub fn lambda_quadrature<F: Real + ExactScalar>(m: &MomentArgs<F>, tol: F) -> Result<MomentValue<F>> {
    if let Some(MomentValue::Divergent { violated }) = divergent_or(m) {
        return Err(domain(format!(
            "moment is not integrable ({})",
            violated.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
        )));
    }
    let e = m.exponents();
    let inner_tol = (tol * F::c(1e-2)).max(F::c(1e-14)).max(F::c(8.0) * F::epsilon());
    let radial = special::alpha_eval_with(AlphaArgs::new(e.a, e.b)?, AlphaMethod::Quadrature, inner_tol)?;
    let angular = special::beta_eval_with(BetaArgs::new(e.c, m.y)?, BetaMethod::Singular, inner_tol)?;
    let value = ln_prefactor(&m.params).exp() * radial * angular;
    Ok(MomentValue::Finite { value, err_estimate: value * inner_tol })
}

/// Relative tolerance for closed-form vs quadrature agreement: `1e-8` for
/// radial margin `>= 0.1`, loosened linearly to `1e-6` at margin `0.02`.
pub fn agreement_tolerance<F: Real>(radial_margin: F) -> F {
    let (hi, lo) = (F::c(0.1), F::c(0.02));
    let (tight, loose) = (F::c(1e-8), F::c(1e-6));
    if radial_margin >= hi {
        tight
    } else if radial_margin <= lo {
        loose
    } else {
        loose + (tight - loose) * (radial_margin - lo) / (hi - lo)
    }
}

fn check_ratio_args<F: Real + ExactScalar>(x: F, s: F, params: &DomainParams<F>) -> Result<()> {
    if !(s >= F::zero() && s < F::half()) {
        return Err(domain(format!("ratio needs 0 <= s < 1/2, got {s}")));
    }
    if !integrability_violations(&x, &s, &params.mu()).is_empty() {
        return Err(Error::Divergent(format!("lambda({x}, ., {s}) is not finite")));
    }
    Ok(())
}

/// `lambda(x,y,s) lambda(x,y,-s) / lambda(x,y,0)^2`.
pub fn lambda_ratio<F: Real + ExactScalar>(x: F, y: F, s: F, params: &DomainParams<F>) -> Result<F> {
    check_ratio_args(x, s, params)?;
    let m = MomentArgs::new(*params, x, y, s);
    let l = ln_lambda_closed(&m)? + ln_lambda_closed(&m.with_s(-s))? - F::two() * ln_lambda_closed(&m.with_s(F::zero()))?;
    Ok(l.exp())
}

/// Upper bound for [`lambda_ratio`] (uniform in `y`):
/// `X(1+4s)Y / ((X-2s)(1-2s)(Y-4s))` with `X = 2x/mu + 2`, `Y = 2x/mu + 3`.
/// It decreases in `x`.
pub fn lambda_ratio_bound<F: Real + ExactScalar>(x: F, s: F, params: &DomainParams<F>) -> Result<F> {
    check_ratio_args(x, s, params)?;
    let two = F::two();
    let xx = two * x / params.mu() + two;
    let yy = xx + F::one();
    let four_s = F::c(4.0) * s;
    Ok(xx * (F::one() + four_s) * yy / ((xx - two * s) * (F::one() - two * s) * (yy - four_s)))
}

/// Tolerance for the inner rule of a nested quadrature, tight enough that its
/// noise does not stall the outer refinement.
fn inner_tolerance<F: Real>(tol: F) -> F {
    (tol * F::c(1e-2)).max(F::c(64.0) * F::epsilon())
}

/// A node of the rectangle-coordinate product rule, with every quantity a
/// radial profile may need evaluated without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint<F> {
    pub u1: F,
    pub one_minus_u1: F,
    pub u2: F,
    pub cos_u2: F,
    /// `ln |w1|`.
    pub ln_r1: F,
    mu: F,
}

impl<F: Real> RadialPoint<F> {
    pub fn r1(&self) -> F {
        self.ln_r1.exp()
    }

    pub fn r2(&self) -> F {
        (self.u2 * F::half()).exp()
    }

    /// `|w1|^p`.
    pub fn r1_pow(&self, p: F) -> F {
        (p * self.ln_r1).exp()
    }

    /// `|w2|^p`.
    pub fn r2_pow(&self, p: F) -> F {
        (p * self.u2 * F::half()).exp()
    }

    /// `|w1|^mu`.
    pub fn r1_mu(&self) -> F {
        self.u1 * self.cos_u2
    }

    /// `log |w2|^2`.
    pub fn log_r2_sq(&self) -> F {
        self.u2
    }

    pub fn ln_delta0(&self) -> F {
        self.u1.ln() + F::two() * self.cos_u2.ln() + self.one_minus_u1.ln()
    }

    pub fn delta0_pow(&self, p: F) -> F {
        if p == F::zero() {
            F::one()
        } else {
            (p * self.ln_delta0()).exp()
        }
    }

    pub fn mu(&self) -> F {
        self.mu
    }
}

/// `∫_D g dV` for a profile depending only on `(|w1|, |w2|)`, by a nested
/// product rule in rectangle coordinates.
pub fn radial_integral<F, V, G>(params: &DomainParams<F>, tol: F, g: G) -> Result<Estimate<V, F>>
where
    F: Real,
    V: QuadValue<F>,
    G: Fn(&RadialPoint<F>) -> V + Sync,
{
    radial_integral_with(params, tol, TanhSinh::<F>::default().abs_tol, g)
}

/// [`radial_integral`] with an absolute error floor, applied to every
/// `u1` slice and to the outer sum. Needed when the integrand is itself a
/// cancelling sum whose roundoff exceeds `tol` on slices where it is tiny.
pub fn radial_integral_with<F, V, G>(params: &DomainParams<F>, tol: F, abs_tol: F, g: G) -> Result<Estimate<V, F>>
where
    F: Real,
    V: QuadValue<F>,
    G: Fn(&RadialPoint<F>) -> V + Sync,
{
    integrate_with_density(params, tol, abs_tol, |p| g(p) * (p.u1 * p.cos_u2 * p.cos_u2))
}

/// Nested rule over the rectangle; `g` returns the integrand already
/// multiplied by the density `u1 cos^2 u2`, so callers can combine factors
/// that overflow separately.
fn integrate_with_density<F, V, G>(params: &DomainParams<F>, tol: F, abs_tol: F, g: G) -> Result<Estimate<V, F>>
where
    F: Real,
    V: QuadValue<F>,
    G: Fn(&RadialPoint<F>) -> V + Sync,
{
    let rule = TanhSinh { abs_tol, ..TanhSinh::with_tolerance(tol) };
    let inner_rule = TanhSinh { abs_tol, ..TanhSinh::with_tolerance(inner_tolerance(tol)) };
    let mu = params.mu();
    let inv_mu = mu.recip();
    let half_pi = F::FRAC_PI_2();
    let inner_error = Cell::new(F::zero());
    let inner_evals = Cell::new(0usize);
    let failure = RefCell::new(None);
    let outer = rule.integrate(F::zero(), F::one(), |n1| {
        let (u1, one_minus_u1) = (n1.to_a, n1.to_b);
        let ln_u1 = u1.ln();
        let inner = inner_rule.integrate(-half_pi, half_pi, |n2| {
            let cos_u2 = n2.to_nearest().sin();
            let p = RadialPoint { u1, one_minus_u1, u2: n2.x, cos_u2, ln_r1: (ln_u1 + cos_u2.ln()) * inv_mu, mu };
            g(&p)
        });
        match inner {
            Ok(e) => {
                inner_error.set(inner_error.get().max(e.error));
                inner_evals.set(inner_evals.get() + e.evaluations);
                e.value
            }
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                V::zero()
            }
        }
    });
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let outer = outer?;
    let (inner_error, inner_evals) = (inner_error.get(), inner_evals.get());
    let scale = F::c(8.0) * F::PI() * F::PI() * mu;
    Ok(Estimate {
        value: outer.value * scale,
        error: (outer.error + inner_error) * scale,
        levels: outer.levels,
        evaluations: outer.evaluations + inner_evals,
    })
}

/// Moment by direct 2D quadrature of `|w1|^(2x) |w2|^(2y) delta0^(-2s)`;
/// slower than [`lambda_quadrature`], used to validate [`radial_integral`].
pub fn lambda_radial<F: Real + ExactScalar>(m: &MomentArgs<F>, tol: F) -> Result<Estimate<F, F>> {
    if !is_integrable(m) {
        return Err(domain("moment is not integrable"));
    }
    let (x, y, s) = (m.x, m.y, m.s);
    let two = F::two();
    let abs_tol = TanhSinh::<F>::default().abs_tol;
    integrate_with_density(&m.params, tol, abs_tol, |p| {
        let ln_density = p.u1.ln() + two * p.cos_u2.ln();
        (two * x * p.ln_r1 + y * p.u2 - two * s * p.ln_delta0() + ln_density).exp()
    })
}

/// `∫_l^h u^(a-1) (1-u)^(b-1) du` for `0 < l < h <= 1`, with the complements
/// `1-l`, `1-h` supplied by the caller.
fn power_segment<F: Real>(rule: &TanhSinh<F>, l: F, cl: F, h: F, ch: F, a: F, b: F) -> Result<F> {
    let half = F::half();
    let mut total = F::zero();
    if l < half {
        // u = e^v removes the algebraic behaviour at small u.
        let top = h.min(half);
        let est = rule.integrate(l.ln(), top.ln(), |n| {
            let u = n.x.exp();
            (a * n.x).exp() * (F::one() - u).powf(b - F::one())
        })?;
        total = total + est.value;
    }
    if h > half {
        // w = 1 - u, v = w^b removes the singularity at u = 1.
        let (cl2, ch2) = if l < half { (half, ch) } else { (cl, ch) };
        let lo = ch2.powf(b);
        let hi = cl2.powf(b);
        let inv_b = b.recip();
        let est = rule.integrate(lo, hi, |n| (F::one() - n.x.powf(inv_b)).powf(a - F::one()))?;
        total = total + est.value / b;
    }
    Ok(total)
}

/// The moment restricted to `|w1| > eps_lo` and, when given, `|w1| <= eps_hi`.
fn lambda_band<F: Real + ExactScalar>(m: &MomentArgs<F>, eps_lo: F, eps_hi: Option<F>, tol: F) -> Result<F> {
    let e = m.exponents();
    if !(e.b > F::zero()) {
        return Err(domain("truncated moments need s < 1/2"));
    }
    let rule = TanhSinh::with_tolerance(tol);
    let inner_rule = TanhSinh::with_tolerance(inner_tolerance(tol));
    let mu = m.params.mu();
    let y = m.y;
    let half_pi = F::FRAC_PI_2();
    let lo_mu = eps_lo.powf(mu);
    let tau_lo = lo_mu.asin();
    let hi_mu = eps_hi.map(|h| h.powf(mu));
    let tau_hi = hi_mu.map(|h| h.asin());
    // tau = pi/2 - |u2|; cos(u2) = sin(tau) and both signs of u2 are folded.
    let weight = |tau: F, sin_tau: F| sin_tau.powf(e.c - F::one()) * F::two() * (y * (half_pi - tau)).cosh();
    let lower_limit = |d: F, sin_tau: F| {
        // 1 - eps^mu / sin(tau) with sin(tau) - sin(tau_lo) formed from the offset d.
        let gap = F::two() * (tau_lo + d * F::half()).cos() * (d * F::half()).sin();
        (lo_mu / sin_tau, gap / sin_tau)
    };
    let fail = RefCell::new(None);
    let mut total = F::zero();
    let full_top = tau_hi.unwrap_or(half_pi);
    if full_top > tau_lo {
        let est = rule.integrate(tau_lo, full_top, |n| {
            let tau = n.x;
            let sin_tau = if n.to_a < n.to_b {
                (tau_lo + n.to_a).sin()
            } else if tau_hi.is_none() {
                n.to_b.cos()
            } else {
                (full_top - n.to_b).sin()
            };
            let (l, cl) = lower_limit(n.to_a, sin_tau);
            match power_segment(&inner_rule, l, cl, F::one(), F::zero(), e.a, e.b) {
                Ok(v) => weight(tau, sin_tau) * v,
                Err(err) => {
                    fail.borrow_mut().get_or_insert(err);
                    F::zero()
                }
            }
        })?;
        total = total + est.value;
    }
    if let (Some(hi_mu), Some(tau_hi)) = (hi_mu, tau_hi) {
        let est = rule.integrate(tau_hi, half_pi, |n| {
            let tau = n.x;
            let sin_tau = if n.to_a < n.to_b { (tau_hi + n.to_a).sin() } else { n.to_b.cos() };
            let (l, cl) = lower_limit(tau - tau_lo, sin_tau);
            let h = hi_mu / sin_tau;
            let ch = F::two() * (tau_hi + n.to_a * F::half()).cos() * (n.to_a * F::half()).sin() / sin_tau;
            match power_segment(&inner_rule, l, cl, h, ch, e.a, e.b) {
                Ok(v) => weight(tau, sin_tau) * v,
                Err(err) => {
                    fail.borrow_mut().get_or_insert(err);
                    F::zero()
                }
            }
        })?;
        total = total + est.value;
    }
    if let Some(err) = fail.into_inner() {
        return Err(err);
    }
    Ok(ln_prefactor(&m.params).exp() * total)
}

/// The moment over `{|w1| > eps}`; finite for every `x` when `s < 1/2`.
pub fn lambda_truncated<F: Real + ExactScalar>(m: &MomentArgs<F>, eps: F, tol: F) -> Result<F> {
    if !(eps > F::zero() && eps < F::one()) {
        return Err(domain(format!("truncation radius must lie in (0,1), got {eps}")));
    }
    lambda_band(m, eps, None, tol)
}

/// The moment over the shell `{eps_lo < |w1| <= eps_hi}`.
pub fn lambda_shell<F: Real + ExactScalar>(m: &MomentArgs<F>, eps_lo: F, eps_hi: F, tol: F) -> Result<F> {
    if !(eps_lo > F::zero() && eps_lo < eps_hi && eps_hi < F::one()) {
        return Err(domain(format!("shell needs 0 < eps_lo < eps_hi < 1, got ({eps_lo}, {eps_hi})")));
    }
    lambda_band(m, eps_lo, Some(eps_hi), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthKind {
    /// `lambda_eps ~ eps^(mu e)` with `e < 0`.
    Power,
    /// `lambda_eps ~ K ln(1/eps)`.
    Logarithmic,
    /// `e > 0`: the truncated moments converge.
    Convergent,
}

/// Least-squares growth fit of truncated moments on `eps = 2^-m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit<F> {
    pub kind: GrowthKind,
    /// Analytic exponent `2x/mu + 2 - 2s`.
    pub predicted_exponent: F,
    /// Fitted slope of `ln(shell)` against `ln eps`, divided by `mu`.
    pub fitted_exponent: F,
    /// RMS residual of that fit.
    pub residual: F,
    /// For logarithmic growth: fitted slope of `lambda_eps` against `ln(1/eps)`.
    pub log_slope: Option<F>,
    /// For logarithmic growth: `8 pi^2 mu^2 beta(1-2s, y)`.
    pub predicted_log_slope: Option<F>,
    /// `(eps, lambda_eps)` on the grid.
    pub samples: Vec<(F, F)>,
}

impl<F: Real> GrowthFit<F> {
    /// Whether the fit reproduces the predicted growth within `tol`.
    pub fn matches(&self, tol: F) -> bool {
        let exp_ok = (self.fitted_exponent - self.predicted_exponent).abs() <= tol;
        match (self.kind, self.log_slope, self.predicted_log_slope) {
            (GrowthKind::Logarithmic, Some(got), Some(want)) => exp_ok && ((got - want) / want).abs() <= tol,
            _ => exp_ok,
        }
    }

    /// Numerical verdict, independent of the predicate: the shells fail to
    /// decay (half the matching tolerance is used as the cut).
    pub fn certifies_divergence(&self, tol: F) -> bool {
        self.fitted_exponent <= tol * F::half()
    }
}

fn least_squares<F: Real>(pts: &[(F, F)]) -> (F, F, F) {
    let n = F::from_int(pts.len() as i64);
    let mx = pts.iter().map(|p| p.0).sum::<F>() / n;
    let my = pts.iter().map(|p| p.1).sum::<F>() / n;
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<F>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<F>();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum::<F>();
    (slope, icpt, (rss / n).sqrt())
}

/// Fits the growth of [`lambda_truncated`] over `eps = 2^-m`, `m` in
/// `m_first..=m_last`, using the shell increments between consecutive radii.
pub fn growth_fit<F: Real + ExactScalar>(m: &MomentArgs<F>, m_first: u32, m_last: u32, tol: F) -> Result<GrowthFit<F>> {
    if m_last < m_first + 2 {
        return Err(domain("growth fit needs at least three radii"));
    }
    let mu = m.params.mu();
    let eps_of = |k: u32| F::two().powi(-(k as i32));
    let first = lambda_truncated(m, eps_of(m_first), tol)?;
    let mut samples = vec![(eps_of(m_first), first)];
    let mut shell_pts = Vec::new();
    let mut acc = first;
    for k in m_first..m_last {
        let (lo, hi) = (eps_of(k + 1), eps_of(k));
        let shell = lambda_shell(m, lo, hi, tol)?;
        acc = acc + shell;
        samples.push((lo, acc));
        shell_pts.push((hi.ln(), shell.ln()));
    }
    let (slope, _, residual) = least_squares(&shell_pts);
    let predicted = m.exponents().a;
    let kind = if predicted.abs() <= F::c(1e-9) {
        GrowthKind::Logarithmic
    } else if predicted < F::zero() {
        GrowthKind::Power
    } else {
        GrowthKind::Convergent
    };
    let (log_slope, predicted_log_slope) = if kind == GrowthKind::Logarithmic {
        let pts: Vec<(F, F)> = samples.iter().map(|&(e, v)| (-e.ln(), v)).collect();
        let (s, _, _) = least_squares(&pts);
        let beta = special::beta_eval(BetaArgs::new(m.exponents().b, m.y)?, F::c(1e-13).max(F::epsilon()))?;
        (Some(s), Some(ln_prefactor(&m.params).exp() * mu * beta))
    } else {
        (None, None)
    };
    Ok(GrowthFit {
        kind,
        predicted_exponent: predicted,
        fitted_exponent: slope / mu,
        residual,
        log_slope,
        predicted_log_slope,
        samples,
    })
}

/// Complex-valued variant of [`radial_integral`].
pub fn radial_integral_complex<F, G>(params: &DomainParams<F>, tol: F, g: G) -> Result<Estimate<Complex<F>, F>>
where
    F: Real,
    G: Fn(&RadialPoint<F>) -> Complex<F> + Sync,
{
    radial_integral(params, tol, g)
}
