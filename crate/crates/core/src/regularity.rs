//! Sobolev thresholds of the Bergman projections, continuity certificates
//! below them and divergence witnesses at and above them.
//!
//! Threshold decisions are made in the arithmetic of the caller's scalar
//! (use `Rational64` to decide borderline cases exactly); the moment
//! numerics behind certificates and growth fits run in `f64`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::bergman::{BasisIndex, Component, RadialTerm, RadialTermFunction, Slot};
use crate::error::{domain, Error, Result};
use crate::geometry::DomainParams;
use crate::measure::{
    growth_fit, integrability_violations, lambda_closed, lambda_ratio, lambda_ratio_bound, GrowthFit, MomentArgs,
    MomentValue, RadialPoint,
};
use crate::scalar::{ExactScalar, Real};

/// Which form of the threshold formula produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdRule {
    /// `min(1/2, (1 - floor(mu))/mu + 1)` for `p = 0`, `min(1/2, 1/mu)` for `p = 1, 2`.
    Stated,
    /// The threshold actually forced by the moment integrability condition:
    /// `min(1/2, (1 - ceil(mu))/mu + 1)` for `p = 0, 1` and `min(1/2, 1/mu)` for `p = 2`.
    Sharp,
}

/// Which clause of the minimum is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BindingClause {
    /// The boundary clause `1/2`.
    Boundary,
    /// The radial clause depending on `mu`.
    Radial,
    /// Both clauses are equal.
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport<T> {
    pub mu: T,
    pub p: u8,
    pub r: T,
    pub radial_clause: T,
    pub binding: BindingClause,
    pub rule: ThresholdRule,
}

fn check_mu<T: ExactScalar>(mu: &T) -> Result<()> {
    if *mu > T::one() {
        Ok(())
    } else {
        Err(domain(format!("mu must exceed 1, got {mu}")))
    }
}

fn check_p(p: u8) -> Result<()> {
    if p <= 2 {
        Ok(())
    } else {
        Err(domain(format!("form degree must be 0, 1 or 2, got {p}")))
    }
}

fn report<T: ExactScalar>(mu: T, p: u8, radial: T, rule: ThresholdRule) -> ThresholdReport<T> {
    let half = T::one_half();
    let binding = if radial < half {
        BindingClause::Radial
    } else if radial > half {
        BindingClause::Boundary
    } else {
        BindingClause::Both
    };
    let r = T::min_of(half, radial.clone());
    ThresholdReport { mu, p, r, radial_clause: radial, binding, rule }
}

/// The threshold formula in its stated form.
pub fn threshold<T: ExactScalar>(mu: T, p: u8) -> Result<ThresholdReport<T>> {
    check_mu(&mu)?;
    check_p(p)?;
    let radial = match p {
        0 => (T::one() - mu.floor_exact()) / mu.clone() + T::one(),
        _ => T::one() / mu.clone(),
    };
    Ok(report(mu, p, radial, ThresholdRule::Stated))
}

/// The threshold at which the first basis element leaves the weighted
/// space. The lowest admissible exponent of the function row is
/// `1 - ceil(mu)`, which equals `1 - floor(mu)` only for integer `mu`; the
/// `theta^2` block of `p = 1` carries the same row.
pub fn sharp_threshold<T: ExactScalar>(mu: T, p: u8) -> Result<ThresholdReport<T>> {
    check_mu(&mu)?;
    check_p(p)?;
    let radial = match p {
        0 | 1 => (T::one() - mu.ceil_exact()) / mu.clone() + T::one(),
        _ => T::one() / mu.clone(),
    };
    Ok(report(mu, p, radial, ThresholdRule::Sharp))
}

fn check_r<T: ExactScalar>(r: &T) -> Result<()> {
    if *r > T::zero() && *r < T::one_half() {
        Ok(())
    } else {
        Err(domain(format!("target threshold must lie in (0, 1/2), got {r}")))
    }
}

/// A `mu` whose stated threshold is `r`: `(ceil(1/r) - 1)/(1 - r)` for
/// `p = 0` and `1/r` otherwise.
pub fn mu_for_threshold<T: ExactScalar>(r: T, p: u8) -> Result<T> {
    check_r(&r)?;
    check_p(p)?;
    Ok(match p {
        0 => {
            let l = (T::one() / r.clone()).ceil_exact();
            (l - T::one()) / (T::one() - r)
        }
        _ => T::one() / r,
    })
}

/// A `mu` whose sharp threshold is `r`: `(floor(1/r) - 1)/(1 - r)` for
/// `p = 0, 1` and `1/r` for `p = 2`.
pub fn mu_for_sharp_threshold<T: ExactScalar>(r: T, p: u8) -> Result<T> {
    check_r(&r)?;
    check_p(p)?;
    Ok(match p {
        0 | 1 => {
            let l = (T::one() / r.clone()).floor_exact();
            (l - T::one()) / (T::one() - r)
        }
        _ => T::one() / r,
    })
}

/// Lattice of a certificate scan: `j` from the lowest unweighted admissible
/// value up to `j_max`, `|k| <= k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Lattice {
    pub j_max: i64,
    pub k_max: i64,
}

impl Default for Lattice {
    fn default() -> Self {
        Self { j_max: 40, k_max: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityCertificate<T> {
    pub mu: T,
    pub p: u8,
    pub s: T,
    pub sup_ratio: f64,
    pub sup_attained_at: BasisIndex,
    /// Closed-form ratio bound at the lowest admissible moment exponent.
    pub bound_used: f64,
    pub worst_x: f64,
    /// Closed-form ratio bound at `j = j_max + 1`, valid for every index
    /// beyond the lattice.
    pub tail_bound: f64,
    pub lattice: Lattice,
    pub indices_scanned: usize,
}

impl<T> ContinuityCertificate<T> {
    pub fn within_bound(&self, rel: f64) -> bool {
        self.sup_ratio <= self.bound_used * (1.0 + rel)
    }
}

fn f64_params<T: ExactScalar>(mu: &T) -> Result<DomainParams<f64>> {
    DomainParams::new(mu.to_f64())
}

/// Scans `lambda(x,k,s) lambda(x,k,-s) / lambda(x,k,0)^2` over the basis
/// of degree `p`, starting from the lowest index in the unweighted space.
///
/// Fails with [`Error::AboveThreshold`] when `s` is not below the stated
/// threshold, and with [`Error::ThresholdNotAttained`] when some index of
/// the unweighted basis already has divergent weighted norm at `s`.
pub fn continuity_certificate<T: ExactScalar>(mu: T, p: u8, s: T, lattice: Lattice) -> Result<ContinuityCertificate<T>> {
    let thr = threshold(mu.clone(), p)?;
    if s < T::zero() {
        return Err(domain(format!("weight must be non-negative, got {s}")));
    }
    if s >= thr.r {
        return Err(Error::AboveThreshold { s: s.to_f64(), threshold: thr.r.to_f64() });
    }
    let params = f64_params(&mu)?;
    let (sf, muf) = (s.to_f64(), mu.to_f64());
    let zero = T::zero();
    let comps = crate::bergman::Component::for_degree(p)?;

    let mut rows = Vec::new();
    for &c in comps {
        let j0 = BasisIndex::min_admissible_j(c, &zero, &mu);
        if j0 > lattice.j_max {
            return Err(domain(format!("lattice j_max = {} is below the first index {j0}", lattice.j_max)));
        }
        for j in j0..=lattice.j_max {
            rows.push((c, j));
        }
    }
    // First inadmissible index, lowest j first.
    for &(c, j) in &rows {
        let idx = BasisIndex::new(j, 0, c);
        let bad = integrability_violations(&idx.moment_x(&mu), &s, &mu);
        if !bad.is_empty() {
            let reason = bad.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
            return Err(Error::ThresholdNotAttained {
                threshold: thr.r.to_f64(),
                s: sf,
                index: idx.to_string(),
                reason,
            });
        }
    }

    let scanned: Vec<Result<Vec<(BasisIndex, f64)>>> = rows
        .par_iter()
        .map(|&(c, j)| {
            (-lattice.k_max..=lattice.k_max)
                .map(|k| {
                    let idx = BasisIndex::new(j, k, c);
                    let x = idx.moment_x(&muf);
                    Ok((idx, lambda_ratio(x, k as f64, sf, &params)?))
                })
                .collect()
        })
        .collect();
    let mut best: Option<(BasisIndex, f64)> = None;
    let mut count = 0usize;
    for row in scanned {
        for (idx, r) in row? {
            count += 1;
            let better = match &best {
                None => true,
                Some((bi, br)) => r > *br || (r == *br && (idx.j, idx.k) < (bi.j, bi.k)),
            };
            if better {
                best = Some((idx, r));
            }
        }
    }
    let (sup_idx, sup_ratio) = best.ok_or_else(|| domain("empty lattice"))?;

    let mut worst_x = f64::INFINITY;
    let mut tail_x = f64::INFINITY;
    for &c in comps {
        let j0 = BasisIndex::min_admissible_j(c, &zero, &mu);
        worst_x = worst_x.min(BasisIndex::new(j0, 0, c).moment_x(&muf));
        tail_x = tail_x.min(BasisIndex::new(lattice.j_max + 1, 0, c).moment_x(&muf));
    }
    let bound_used = lambda_ratio_bound(worst_x, sf, &params)?;
    let tail_bound = lambda_ratio_bound(tail_x, sf, &params)?;
    Ok(ContinuityCertificate {
        mu,
        p,
        s,
        sup_ratio,
        sup_attained_at: sup_idx,
        bound_used,
        worst_x,
        tail_bound,
        lattice,
        indices_scanned: count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceWitness<T> {
    pub mu: T,
    pub p: u8,
    pub s: T,
    pub index: BasisIndex,
    pub lambda0: MomentValue<f64>,
    pub lambda_s: MomentValue<f64>,
    /// `2x/mu + 2 - 2s` in the caller's arithmetic.
    pub exponent: T,
    pub growth: GrowthFit<f64>,
    pub rule: ThresholdRule,
}

/// Grid of the truncation fit: `eps = 2^-m` for `m` in this range.
pub const WITNESS_FIT_RANGE: (u32, u32) = (4, 16);

fn witness_at<T: ExactScalar>(mu: T, p: u8, s: T, index: BasisIndex, thr: ThresholdReport<T>) -> Result<DivergenceWitness<T>> {
    if s < thr.r {
        return Err(Error::BelowThreshold { s: s.to_f64(), threshold: thr.r.to_f64() });
    }
    if s >= T::one_half() {
        return Err(domain(format!("weight must stay below 1/2, got {s}")));
    }
    let zero = T::zero();
    let x = index.moment_x(&mu);
    if !integrability_violations(&x, &zero, &mu).is_empty() {
        return Err(Error::Inadmissible(format!("{index} at s = 0")));
    }
    let violated = integrability_violations(&x, &s, &mu);
    if violated.is_empty() {
        return Err(Error::Domain(format!("{index} has finite weighted norm at s = {s}")));
    }
    let params = f64_params(&mu)?;
    let (xf, sf) = (x.to_f64(), s.to_f64());
    let lambda0 = lambda_closed(&MomentArgs::new(params, xf, index.k as f64, 0.0));
    let two = T::one() + T::one();
    let exponent = two.clone() * x / mu.clone() + two.clone() - two * s.clone();
    let growth = growth_fit(
        &MomentArgs::new(params, xf, index.k as f64, sf),
        WITNESS_FIT_RANGE.0,
        WITNESS_FIT_RANGE.1,
        1e-11,
    )?;
    Ok(DivergenceWitness {
        mu,
        p,
        s,
        index,
        lambda0,
        lambda_s: MomentValue::Divergent { violated },
        exponent,
        growth,
        rule: thr.rule,
    })
}

/// Index whose weighted norm diverges at the stated threshold:
/// `w1^(1 - floor(mu))` for `p = 0` and the `dw1` element at `j = 1` otherwise.
pub fn witness_index<T: ExactScalar>(mu: &T, p: u8) -> Result<BasisIndex> {
    check_p(p)?;
    Ok(match p {
        0 => BasisIndex::function(1 - mu.floor_exact().to_f64() as i64, 0),
        1 => BasisIndex::dw1(1, 0),
        _ => BasisIndex::two_form(1, 0),
    })
}

/// Index whose weighted norm diverges at the sharp threshold.
pub fn sharp_witness_index<T: ExactScalar>(mu: &T, p: u8) -> Result<BasisIndex> {
    check_p(p)?;
    let j = 1 - mu.ceil_exact().to_f64() as i64;
    Ok(match p {
        0 => BasisIndex::function(j, 0),
        1 => BasisIndex::theta2(j, 0),
        _ => BasisIndex::two_form(1, 0),
    })
}

/// Witness of unboundedness for `threshold(mu, p) <= s < 1/2`.
pub fn divergence_witness<T: ExactScalar>(mu: T, p: u8, s: T) -> Result<DivergenceWitness<T>> {
    let thr = threshold(mu.clone(), p)?;
    let idx = witness_index(&mu, p)?;
    witness_at(mu, p, s, idx, thr)
}

/// Witness of unboundedness for `sharp_threshold(mu, p) <= s < 1/2`.
pub fn sharp_divergence_witness<T: ExactScalar>(mu: T, p: u8, s: T) -> Result<DivergenceWitness<T>> {
    let thr = sharp_threshold(mu.clone(), p)?;
    let idx = sharp_witness_index(&mu, p)?;
    witness_at(mu, p, s, idx, thr)
}

/// `exp(-1 / |w1|^mu)` times the witness monomial, smooth up to the
/// boundary, in the slot matching `p`.
pub fn smooth_counterexample<F: Real + ExactScalar>(params: &DomainParams<F>, p: u8) -> Result<RadialTermFunction<F>> {
    let j = witness_index(&params.mu(), p)?.j;
    counterexample_with(p, j)
}

/// [`smooth_counterexample`] built on the sharp witness index.
pub fn sharp_smooth_counterexample<F: Real + ExactScalar>(params: &DomainParams<F>, p: u8) -> Result<RadialTermFunction<F>> {
    let idx = sharp_witness_index(&params.mu(), p)?;
    match idx.component {
        Component::Theta2 => {
            RadialTermFunction::new(1, vec![RadialTerm::new(exp_profile(), idx.j, 0, Slot::Theta2, "exp(-1/|w1|^mu) theta2")])
        }
        _ => counterexample_with(p, idx.j),
    }
}

fn exp_profile<F: Real>() -> crate::bergman::Profile<F> {
    Arc::new(|pt: &RadialPoint<F>| Complex::new((-pt.r1_mu().recip()).exp(), F::zero()))
}

fn counterexample_with<F: Real>(p: u8, j: i64) -> Result<RadialTermFunction<F>> {
    let term = match p {
        0 => RadialTerm::new(exp_profile(), j, 0, Slot::Function, "exp(-1/|w1|^mu) w1^j"),
        // j = 1 element of the dw1 row is w1^0 dw1
        1 => RadialTerm::new(exp_profile(), j - 1, 0, Slot::Dw1, "exp(-1/|w1|^mu) dw1"),
        _ => RadialTerm::new(exp_profile(), j - 1, 0, Slot::Dw1Theta2, "exp(-1/|w1|^mu) dw1^theta2"),
    };
    RadialTermFunction::new(p, vec![term])
}
