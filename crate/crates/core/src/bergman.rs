//! Orthonormal bases of the weighted Bergman spaces of `(p,0)`-forms on the
//! model domain, projection of radially decomposable inputs and truncated
//! kernel sums.
//!
//! Forms are written in the orthonormal coframe `theta^1, theta^2`. The
//! bases are
//!
//! ```text
//! p = 0:  w1^j w2^k                           j > (s-1) mu    norm^2 lambda(j,     k, s)
//! p = 1:  w1^j w2^k theta^2                   j > (s-1) mu    norm^2 lambda(j,     k, s)
//!         2 mu w1^(j-1) w2^k dw1              j > s mu        norm^2 lambda(j - mu, k, s)
//! p = 2:  2 mu w1^(j-1) w2^k dw1 ^ theta^2    j > s mu        norm^2 lambda(j - mu, k, s)
//! ```
//!
//! with `dw1 = c theta^1`, `c = -w1 e^{i log|w2|^2} / (2 mu |w1|^mu)`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::geometry::{contains, DomainParams, ModelPoint};
use crate::measure::{integrability_violations, lambda_closed, radial_integral, MomentArgs, MomentValue, RadialPoint};
use crate::scalar::{ExactScalar, Real};

/// Which frame slot a basis element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    /// `p = 0`, scalar functions.
    Function,
    /// `p = 1`, multiples of `theta^2`.
    Theta2,
    /// `p = 1`, multiples of `dw1`.
    Dw1,
    /// `p = 2`, multiples of `dw1 ^ theta^2`.
    TwoForm,
}

impl Component {
    pub fn degree(self) -> u8 {
        match self {
            Self::Function => 0,
            Self::Theta2 | Self::Dw1 => 1,
            Self::TwoForm => 2,
        }
    }

    /// Whether the moment exponent is shifted, `x = j - mu`.
    pub fn shifted(self) -> bool {
        matches!(self, Self::Dw1 | Self::TwoForm)
    }

    pub fn for_degree(p: u8) -> Result<&'static [Component]> {
        match p {
            0 => Ok(&[Component::Function]),
            1 => Ok(&[Component::Theta2, Component::Dw1]),
            2 => Ok(&[Component::TwoForm]),
            _ => Err(domain(format!("form degree must be 0, 1 or 2, got {p}"))),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Function => "function",
            Self::Theta2 => "theta2",
            Self::Dw1 => "dw1",
            Self::TwoForm => "dw1^theta2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub j: i64,
    pub k: i64,
    pub component: Component,
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(j={}, k={}, p={}, {})", self.j, self.k, self.component.degree(), self.component.label())
    }
}

impl BasisIndex {
    pub fn new(j: i64, k: i64, component: Component) -> Self {
        Self { j, k, component }
    }

    pub fn function(j: i64, k: i64) -> Self {
        Self::new(j, k, Component::Function)
    }

    pub fn theta2(j: i64, k: i64) -> Self {
        Self::new(j, k, Component::Theta2)
    }

    pub fn dw1(j: i64, k: i64) -> Self {
        Self::new(j, k, Component::Dw1)
    }

    pub fn two_form(j: i64, k: i64) -> Self {
        Self::new(j, k, Component::TwoForm)
    }

    pub fn degree(&self) -> u8 {
        self.component.degree()
    }

    /// The first argument of the moment giving this element's squared norm.
    pub fn moment_x<T: ExactScalar>(&self, mu: &T) -> T {
        let j = T::from_integer(self.j);
        if self.component.shifted() {
            j - mu.clone()
        } else {
            j
        }
    }

    /// Membership at weight `s`, decided in the arithmetic of `T`.
    pub fn is_admissible<T: ExactScalar>(&self, s: &T, mu: &T) -> bool {
        integrability_violations(&self.moment_x(mu), s, mu).is_empty()
    }

    /// Smallest admissible `j` of a component at weight `s`.
    pub fn min_admissible_j<T: ExactScalar>(component: Component, s: &T, mu: &T) -> i64 {
        // j > (s-1) mu  or  j > s mu
        let bound = if component.shifted() { s.clone() * mu.clone() } else { (s.clone() - T::one()) * mu.clone() };
        let guess = bound.floor_exact().to_f64() as i64;
        let mut j = guess;
        while BasisIndex::new(j, 0, component).is_admissible(s, mu) {
            j -= 1;
        }
        j + 1
    }
}

/// Squared norm of a basis element at weight `s` (unnormalized).
pub fn basis_norm_sq<F: Real + ExactScalar>(idx: &BasisIndex, s: F, params: &DomainParams<F>) -> MomentValue<F> {
    lambda_closed(&MomentArgs::new(*params, idx.moment_x(&params.mu()), F::from_int(idx.k), s))
}

/// [`basis_norm_sq`] with membership decided in the arithmetic of `T` and
/// the value computed in `f64`.
pub fn basis_norm_sq_exact<T: ExactScalar>(idx: &BasisIndex, s: &T, mu: &T) -> Result<MomentValue<f64>> {
    let violated = integrability_violations(&idx.moment_x(mu), s, mu);
    if !violated.is_empty() {
        return Ok(MomentValue::Divergent { violated });
    }
    let params = DomainParams::new(mu.to_f64())?;
    Ok(basis_norm_sq(idx, s.to_f64(), &params))
}

fn norm_value<F: Real + ExactScalar>(idx: &BasisIndex, s: F, params: &DomainParams<F>) -> Result<F> {
    basis_norm_sq(idx, s, params)
        .value()
        .ok_or_else(|| Error::Inadmissible(format!("{idx} at s = {s}")))
}

/// Radial factor of the unnormalized basis element in its frame slot, i.e.
/// the element is `radial(r) e^{i(j t1 + k t2)}` times a unit coframe vector.
fn radial_factor<F: Real>(idx: &BasisIndex, p: &RadialPoint<F>) -> Complex<F> {
    let j = F::from_int(idx.j);
    let k = F::from_int(idx.k);
    if idx.component.shifted() {
        // 2 mu w1^(j-1) w2^k c = -w1^j w2^k e^{iL} / |w1|^mu
        let m = p.r1_pow(j - p.mu()) * p.r2_pow(k);
        -Complex::from_polar(m, p.log_r2_sq())
    } else {
        Complex::new(p.r1_pow(j) * p.r2_pow(k), F::zero())
    }
}

/// Basis element value at a point: its coefficient on the unit coframe slot
/// (`1`, `theta^2`, `theta^1` or `theta^1 ^ theta^2`), unnormalized.
pub fn basis_monomial<F: Real>(idx: &BasisIndex, params: &DomainParams<F>, w: &ModelPoint<F>) -> Complex<F> {
    let mono = w.w1.powi(idx.j as i32) * w.w2.powi(idx.k as i32);
    if idx.component.shifted() {
        let e = Complex::from_polar(F::one(), w.log_r2_sq());
        -(mono * e) / w.w1.norm().powf(params.mu())
    } else {
        mono
    }
}

/// The frame slot a term of a [`RadialTermFunction`] is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Slot {
    /// `p = 0`.
    Function,
    /// `p = 1`, coefficient of `theta^1`.
    Theta1,
    /// `p = 1`, coefficient of `theta^2`.
    Theta2,
    /// `p = 1`, coefficient of `dw1`.
    Dw1,
    /// `p = 2`, coefficient of `theta^1 ^ theta^2`.
    Theta1Theta2,
    /// `p = 2`, coefficient of `dw1 ^ theta^2`.
    Dw1Theta2,
}

impl Slot {
    pub fn degree(self) -> u8 {
        match self {
            Self::Function => 0,
            Self::Theta1 | Self::Theta2 | Self::Dw1 => 1,
            Self::Theta1Theta2 | Self::Dw1Theta2 => 2,
        }
    }
}

pub type Profile<F> = Arc<dyn Fn(&RadialPoint<F>) -> Complex<F> + Send + Sync>;

/// One term `g(|w1|, |w2|) w1^a w2^b` in a given frame slot.
#[derive(Clone)]
pub struct RadialTerm<F> {
    pub profile: Profile<F>,
    pub a: i64,
    pub b: i64,
    pub slot: Slot,
    pub label: String,
}

impl<F> fmt::Debug for RadialTerm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialTerm")
            .field("label", &self.label)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("slot", &self.slot)
            .finish()
    }
}

impl<F: Real> RadialTerm<F> {
    pub fn new(profile: Profile<F>, a: i64, b: i64, slot: Slot, label: impl Into<String>) -> Self {
        Self { profile, a, b, slot, label: label.into() }
    }

    /// Constant profile.
    pub fn constant(value: Complex<F>, a: i64, b: i64, slot: Slot) -> Self {
        Self::new(Arc::new(move |_: &RadialPoint<F>| value), a, b, slot, format!("{value}"))
    }

    /// The only basis index this term can pair with.
    pub fn partner(&self) -> BasisIndex {
        match self.slot {
            Slot::Function => BasisIndex::function(self.a, self.b),
            Slot::Theta2 => BasisIndex::theta2(self.a, self.b),
            Slot::Theta1 => BasisIndex::dw1(self.a, self.b),
            Slot::Dw1 => BasisIndex::dw1(self.a + 1, self.b),
            Slot::Theta1Theta2 => BasisIndex::two_form(self.a, self.b),
            Slot::Dw1Theta2 => BasisIndex::two_form(self.a + 1, self.b),
        }
    }

    /// Pointwise value of the radial integrand whose integral is the inner
    /// product with the unnormalized partner element.
    fn pairing_density(&self, p: &RadialPoint<F>) -> Complex<F> {
        let g = (self.profile)(p);
        let two_mu = F::two() * p.mu();
        let a = F::from_int(self.a);
        let b = F::from_int(self.b);
        let e_minus = Complex::from_polar(F::one(), -p.log_r2_sq());
        match self.slot {
            Slot::Function | Slot::Theta2 => g * (p.r1_pow(F::two() * a) * p.r2_pow(F::two() * b)),
            // g w1^a w2^b theta^1 against -w1^a w2^b e^{iL} |w1|^-mu theta^1
            Slot::Theta1 | Slot::Theta1Theta2 => {
                -(g * e_minus) * (p.r1_pow(F::two() * a - p.mu()) * p.r2_pow(F::two() * b))
            }
            // g w1^a w2^b dw1 against 2 mu w1^a w2^b dw1, with |dw1|^2 = |w1|^(2-2mu) / (4 mu^2)
            Slot::Dw1 | Slot::Dw1Theta2 => {
                g * (p.r1_pow(F::two() * (a + F::one() - p.mu())) * p.r2_pow(F::two() * b) / two_mu)
            }
        }
    }

    /// Pointwise `|term|^2` against the volume element.
    fn norm_density(&self, p: &RadialPoint<F>) -> F {
        let g = (self.profile)(p).norm_sqr();
        let a = F::from_int(self.a);
        let b = F::from_int(self.b);
        let scale = match self.slot {
            Slot::Function | Slot::Theta2 | Slot::Theta1 | Slot::Theta1Theta2 => p.r1_pow(F::two() * a),
            Slot::Dw1 | Slot::Dw1Theta2 => {
                let two_mu = F::two() * p.mu();
                p.r1_pow(F::two() * (a + F::one() - p.mu())) / (two_mu * two_mu)
            }
        };
        g * scale * p.r2_pow(F::two() * b)
    }
}

/// A finite sum of radial terms forming a `(p,0)`-form.
#[derive(Clone, Debug)]
pub struct RadialTermFunction<F> {
    pub p: u8,
    pub terms: Vec<RadialTerm<F>>,
}

impl<F: Real> RadialTermFunction<F> {
    pub fn new(p: u8, terms: Vec<RadialTerm<F>>) -> Result<Self> {
        Component::for_degree(p)?;
        if let Some((i, t)) = terms.iter().enumerate().find(|(_, t)| t.slot.degree() != p) {
            return Err(domain(format!("term {i} ({:?}) does not have degree {p}", t.slot)));
        }
        Ok(Self { p, terms })
    }

    /// The holomorphic form `coefficient * e_idx` (unnormalized element).
    pub fn from_basis(idx: &BasisIndex, coefficient: Complex<F>, params: &DomainParams<F>) -> Self {
        let two_mu = F::two() * params.mu();
        let term = match idx.component {
            Component::Function => RadialTerm::constant(coefficient, idx.j, idx.k, Slot::Function),
            Component::Theta2 => RadialTerm::constant(coefficient, idx.j, idx.k, Slot::Theta2),
            Component::Dw1 => RadialTerm::constant(coefficient * two_mu, idx.j - 1, idx.k, Slot::Dw1),
            Component::TwoForm => RadialTerm::constant(coefficient * two_mu, idx.j - 1, idx.k, Slot::Dw1Theta2),
        };
        Self { p: idx.degree(), terms: vec![term] }
    }

    /// Re-expands a projection as an input function.
    pub fn from_projection(result: &ProjectionResult<F>, params: &DomainParams<F>, p: u8) -> Self {
        let terms = result
            .coefficients
            .iter()
            .flat_map(|(idx, c)| Self::from_basis(idx, c.value, params).terms)
            .collect();
        Self { p, terms }
    }
}

/// A projection coefficient with respect to the unnormalized basis element,
/// `numerator / norm_sq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient<F> {
    pub value: Complex<F>,
    pub numerator: Complex<F>,
    pub norm_sq: F,
    pub error: F,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TailReport {
    /// Basis indices selected by some term but outside the truncation box.
    pub outside_truncation: Vec<BasisIndex>,
    /// Terms whose partner index is not in the Bergman space.
    pub without_partner: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionResult<F: Real> {
    #[serde(serialize_with = "serialize_coefficients")]
    pub coefficients: BTreeMap<BasisIndex, Coefficient<F>>,
    pub tail_report: TailReport,
}

fn serialize_coefficients<F: Serialize, S: Serializer>(
    map: &BTreeMap<BasisIndex, Coefficient<F>>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a, F> {
        index: &'a BasisIndex,
        #[serde(flatten)]
        coefficient: &'a Coefficient<F>,
    }
    ser.collect_seq(map.iter().map(|(index, coefficient)| Entry { index, coefficient }))
}

/// Truncation box `|j| <= j_max`, `|k| <= k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub j_max: i64,
    pub k_max: i64,
}

impl Truncation {
    pub fn new(j_max: i64, k_max: i64) -> Self {
        Self { j_max, k_max }
    }

    pub fn contains(&self, idx: &BasisIndex) -> bool {
        idx.j.abs() <= self.j_max && idx.k.abs() <= self.k_max
    }
}

/// Bergman projection (unweighted) of `f`, by the orthogonality calculus:
/// each term pairs with exactly one basis index.
pub fn project<F: Real + ExactScalar>(
    f: &RadialTermFunction<F>,
    params: &DomainParams<F>,
    truncation: Truncation,
    tol: F,
) -> Result<ProjectionResult<F>> {
    let zero = F::zero();
    let mut numerators: BTreeMap<BasisIndex, (Complex<F>, F)> = BTreeMap::new();
    let mut tail = TailReport::default();
    let evaluated: Vec<Result<Option<(BasisIndex, Complex<F>, F)>>> = f
        .terms
        .par_iter()
        .enumerate()
        .map(|(i, term)| {
            let idx = term.partner();
            let non_integrable = |e: Error| Error::NonIntegrableTerm { index: i, reason: format!("{}: {e}", term.label) };
            // Square integrability of the term itself.
            let norm = radial_integral(params, tol, |p| term.norm_density(p)).map_err(non_integrable)?;
            if !norm.value.is_finite() {
                return Err(Error::NonIntegrableTerm { index: i, reason: format!("{}: infinite norm", term.label) });
            }
            if !idx.is_admissible(&zero, &params.mu()) {
                return Ok(None);
            }
            let est = radial_integral(params, tol, |p| term.pairing_density(p)).map_err(non_integrable)?;
            Ok(Some((idx, est.value, est.error)))
        })
        .collect();
    for (i, r) in evaluated.into_iter().enumerate() {
        match r? {
            None => tail.without_partner.push(i),
            Some((idx, num, err)) => {
                let entry = numerators.entry(idx).or_insert((Complex::new(zero, zero), zero));
                entry.0 = entry.0 + num;
                entry.1 = entry.1 + err;
            }
        }
    }
    let mut coefficients = BTreeMap::new();
    for (idx, (numerator, error)) in numerators {
        if !truncation.contains(&idx) {
            tail.outside_truncation.push(idx);
            continue;
        }
        let norm_sq = norm_value(&idx, zero, params)?;
        coefficients.insert(idx, Coefficient { value: numerator / norm_sq, numerator, norm_sq, error: error / norm_sq });
    }
    if coefficients.is_empty() {
        tail.warnings.push("no selected basis index lies inside the truncation".into());
    }
    Ok(ProjectionResult { coefficients, tail_report: tail })
}

/// `a conj(b)` written so that swapping the arguments conjugates the result
/// bit for bit.
#[inline]
fn hermitian_product<F: Real>(a: Complex<F>, b: Complex<F>) -> Complex<F> {
    Complex::new(a.re * b.re + a.im * b.im, a.im * b.re - a.re * b.im)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue<F> {
    pub value: Complex<F>,
    /// Total modulus of the terms on the outer edge of the truncation box.
    pub tail_estimate: F,
    pub terms: usize,
}

/// Truncated Bergman kernel for functions with the basis norms computed once.
#[derive(Debug, Clone)]
pub struct KernelTable<F: Real> {
    params: DomainParams<F>,
    truncation: Truncation,
    terms: Vec<(BasisIndex, F)>,
}

impl<F: Real + ExactScalar> KernelTable<F> {
    pub fn new(params: &DomainParams<F>, truncation: Truncation) -> Result<Self> {
        let zero = F::zero();
        let j_lo = BasisIndex::min_admissible_j(Component::Function, &zero, &params.mu()).max(-truncation.j_max);
        let mut terms = Vec::new();
        for j in j_lo..=truncation.j_max {
            for k in -truncation.k_max..=truncation.k_max {
                let idx = BasisIndex::function(j, k);
                terms.push((idx, norm_value(&idx, zero, params)?));
            }
        }
        Ok(Self { params: *params, truncation, terms })
    }

    /// `sum_{j,k} e_jk(w) conj(e_jk(u))` over the truncation box.
    pub fn eval(&self, w: &ModelPoint<F>, u: &ModelPoint<F>) -> Result<KernelValue<F>> {
        if !contains(&self.params, w) || !contains(&self.params, u) {
            return Err(domain("kernel points must lie in the model domain"));
        }
        Ok(self.eval_unchecked(w, u))
    }

    /// [`Self::eval`] without the membership test. The truncated sum is a
    /// Laurent polynomial, so it extends to the closure minus the axes and
    /// quadrature nodes that round onto the boundary are harmless.
    pub fn eval_unchecked(&self, w: &ModelPoint<F>, u: &ModelPoint<F>) -> KernelValue<F> {
        let zero = F::zero();
        let mut value = Complex::new(zero, zero);
        let mut tail = zero;
        for (idx, norm) in &self.terms {
            let t = hermitian_product(basis_monomial(idx, &self.params, w), basis_monomial(idx, &self.params, u)) / *norm;
            value = value + t;
            if idx.j == self.truncation.j_max || idx.k.abs() == self.truncation.k_max {
                tail = tail + t.norm();
            }
        }
        KernelValue { value, tail_estimate: tail, terms: self.terms.len() }
    }
}

/// Truncated Bergman kernel for functions, `sum_{j,k} e_jk(w) conj(e_jk(u))`.
pub fn kernel_eval<F: Real + ExactScalar>(
    w: &ModelPoint<F>,
    u: &ModelPoint<F>,
    params: &DomainParams<F>,
    truncation: Truncation,
) -> Result<KernelValue<F>> {
    KernelTable::new(params, truncation)?.eval(w, u)
}

/// The first `n` basis elements of degree `p` admissible at weight `s`, in
/// order of increasing `(j - j_min) + |k|`, then component, `j`, `k`.
pub fn leading_basis<F: Real + ExactScalar>(p: u8, s: F, params: &DomainParams<F>, n: usize) -> Result<Vec<BasisIndex>> {
    let comps = Component::for_degree(p)?;
    let mut out = Vec::with_capacity(n);
    let mut shell = 0i64;
    while out.len() < n {
        let mut ring = Vec::new();
        for &c in comps {
            let j0 = BasisIndex::min_admissible_j(c, &s, &params.mu());
            for dj in 0..=shell {
                let dk = shell - dj;
                let ks: Vec<i64> = if dk == 0 { vec![0] } else { vec![-dk, dk] };
                for k in ks {
                    ring.push(BasisIndex::new(j0 + dj, k, c));
                }
            }
        }
        ring.sort_by_key(|i| (i.component, i.j, i.k));
        for idx in ring {
            if out.len() < n {
                out.push(idx);
            }
        }
        shell += 1;
    }
    Ok(out)
}

/// Average of `e^{i(n t1 + m t2)}` over both circles, by the trapezoid rule
/// (exact for `|n|, |m| < ANGLE_NODES`).
fn angular_average<F: Real>(n: i64, m: i64) -> Complex<F> {
    const ANGLE_NODES: i64 = 64;
    let step = F::TAU() / F::from_int(ANGLE_NODES);
    let mut acc = Complex::new(F::zero(), F::zero());
    for a in 0..ANGLE_NODES {
        for b in 0..ANGLE_NODES {
            let phase = step * F::from_int((n * a + m * b).rem_euclid(ANGLE_NODES));
            acc = acc + Complex::from_polar(F::one(), phase);
        }
    }
    acc / F::from_int(ANGLE_NODES * ANGLE_NODES)
}

/// Gram matrix of the normalized basis elements in `L^2(delta0^(-2s) dV)`.
pub fn gram_matrix<F: Real + ExactScalar>(
    indices: &[BasisIndex],
    s: F,
    params: &DomainParams<F>,
    tol: F,
) -> Result<Vec<Vec<Complex<F>>>> {
    let norms: Vec<F> = indices
        .iter()
        .map(|idx| {
            if !idx.is_admissible(&s, &params.mu()) {
                return Err(Error::Inadmissible(format!("{idx} at s = {s}")));
            }
            norm_value(idx, s, params)
        })
        .collect::<Result<_>>()?;
    let n = indices.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let two_s = F::two() * s;
    let entries: Vec<Result<Complex<F>>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (ia, ib) = (&indices[a], &indices[b]);
            let zero = Complex::new(F::zero(), F::zero());
            let same_slot = ia.component == ib.component;
            if !same_slot {
                // Different unit coframe slots are pointwise orthogonal.
                return Ok(zero);
            }
            let ang = angular_average::<F>(ia.j - ib.j, ia.k - ib.k);
            let scale = (norms[a] * norms[b]).sqrt();
            let radial = radial_integral(params, tol, |p| {
                hermitian_product(radial_factor(ia, p), radial_factor(ib, p)) * p.delta0_pow(-two_s)
            })?;
            Ok(ang * radial.value / scale)
        })
        .collect();
    let mut g = vec![vec![Complex::new(F::zero(), F::zero()); n]; n];
    for (&(a, b), e) in pairs.iter().zip(entries) {
        let e = e?;
        g[a][b] = e;
        g[b][a] = e.conj();
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(mu: f64) -> DomainParams<f64> {
        DomainParams::new(mu).unwrap()
    }

    #[test]
    fn norm_examples() {
        let p = params(2.0);
        let v = basis_norm_sq(&BasisIndex::function(0, 0), 0.0, &p).value().unwrap();
        assert!((v - 4.0 * PI.powi(3)).abs() < 1e-10);
        let p25 = params(2.5);
        assert!(!basis_norm_sq(&BasisIndex::dw1(1, 0), 0.45, &p25).is_finite());
        let p3 = params(3.0);
        assert!(basis_norm_sq(&BasisIndex::function(-2, 0), 0.0, &p3).is_finite());
        let third = num_rational::Rational64::new(1, 3);
        let three = num_rational::Rational64::from_integer(3);
        let v = basis_norm_sq_exact(&BasisIndex::dw1(1, 0), &third, &three).unwrap();
        assert!(!v.is_finite());
    }

    #[test]
    fn admissibility_and_minimum() {
        let mu = 3.0;
        assert_eq!(BasisIndex::min_admissible_j(Component::Function, &0.0, &mu), -2);
        assert_eq!(BasisIndex::min_admissible_j(Component::Dw1, &0.0, &mu), 1);
        assert_eq!(BasisIndex::min_admissible_j(Component::Dw1, &0.4, &mu), 2);
        assert_eq!(BasisIndex::min_admissible_j(Component::Function, &0.0, &2.5), -2);
        let r = num_rational::Rational64::new(1, 5);
        let m = num_rational::Rational64::new(5, 2);
        // j > (1/5 - 1) 5/2 = -2
        assert_eq!(BasisIndex::min_admissible_j(Component::Function, &r, &m), -1);
    }

    #[test]
    fn reproducing_and_selection() {
        let p = params(2.5);
        let t = Truncation::new(10, 10);
        let f = RadialTermFunction::from_basis(&BasisIndex::function(-1, 2), Complex::new(1.0, 0.0), &p);
        let r = project(&f, &p, t, 1e-11).unwrap();
        assert_eq!(r.coefficients.len(), 1);
        let c = r.coefficients[&BasisIndex::function(-1, 2)];
        assert!((c.value - 1.0).norm() < 1e-9, "{c:?}");

        // conj(w1) = |w1|^2 w1^-1
        let g: Profile<f64> = Arc::new(|p: &RadialPoint<f64>| Complex::new(p.r1_pow(2.0), 0.0));
        let f = RadialTermFunction::new(0, vec![RadialTerm::new(g, -1, 0, Slot::Function, "conj w1")]).unwrap();
        let r = project(&f, &p, t, 1e-11).unwrap();
        let c = r.coefficients[&BasisIndex::function(-1, 0)];
        let expected = lambda_closed(&MomentArgs::new(p, 0.0, 0.0, 0.0)).value().unwrap()
            / lambda_closed(&MomentArgs::new(p, -1.0, 0.0, 0.0)).value().unwrap();
        assert!((c.value - expected).norm() < 1e-9 * expected);
    }

    #[test]
    fn empty_truncation_warns() {
        let p = params(2.0);
        let f = RadialTermFunction::from_basis(&BasisIndex::function(5, 0), Complex::new(1.0, 0.0), &p);
        let r = project(&f, &p, Truncation::new(2, 2), 1e-10).unwrap();
        assert!(r.coefficients.is_empty());
        assert_eq!(r.tail_report.outside_truncation, vec![BasisIndex::function(5, 0)]);
        assert!(!r.tail_report.warnings.is_empty());
    }

    #[test]
    fn non_integrable_term_is_named() {
        let p = params(2.0);
        let f = RadialTermFunction::from_basis(&BasisIndex::function(-2, 0), Complex::new(1.0, 0.0), &p);
        let err = project(&f, &p, Truncation::new(5, 5), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NonIntegrableTerm { index: 0, .. }), "{err:?}");
    }

    #[test]
    fn one_form_components() {
        let p = params(2.5);
        let t = Truncation::new(10, 10);
        for idx in [BasisIndex::dw1(1, 0), BasisIndex::dw1(3, -2), BasisIndex::theta2(-2, 1), BasisIndex::two_form(2, 1)] {
            let f = RadialTermFunction::from_basis(&idx, Complex::new(0.5, -1.0), &p);
            let r = project(&f, &p, t, 1e-11).unwrap();
            assert_eq!(r.coefficients.len(), 1);
            assert!((r.coefficients[&idx].value - Complex::new(0.5, -1.0)).norm() < 1e-9);
        }
        // theta^1 input: w1^2 theta^1 = (1/c) w1^2 dw1 pairs with the dw1 row at j = 2.
        let f = RadialTermFunction::new(
            1,
            vec![RadialTerm::constant(Complex::new(1.0, 0.0), 2, 0, Slot::Theta1)],
        )
        .unwrap();
        let r = project(&f, &p, t, 1e-11).unwrap();
        assert!(r.coefficients.contains_key(&BasisIndex::dw1(2, 0)));
    }

    #[test]
    fn kernel_symmetry() {
        let p = params(2.0);
        let w = ModelPoint::new(Complex::new(0.3, 0.2), Complex::new(1.0, 0.1));
        let u = ModelPoint::new(Complex::new(-0.2, 0.4), Complex::new(0.9, -0.3));
        let t = Truncation::new(8, 8);
        let a = kernel_eval(&w, &u, &p, t).unwrap().value;
        let b = kernel_eval(&u, &w, &p, t).unwrap().value;
        assert_eq!(a, b.conj());
        let d = kernel_eval(&w, &w, &p, t).unwrap().value;
        assert_eq!(d.im, 0.0);
        assert!(d.re > 0.0);
    }

    #[test]
    fn small_gram_is_identity() {
        let p = params(2.5);
        let idx = leading_basis(1, 0.2, &p, 6).unwrap();
        let g = gram_matrix(&idx, 0.2, &p, 1e-10).unwrap();
        for a in 0..idx.len() {
            for b in 0..idx.len() {
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((g[a][b] - target).norm() < 1e-8, "{} {} {:?}", idx[a], idx[b], g[a][b]);
            }
        }
    }
}
