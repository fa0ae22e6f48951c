//! Invariant suites for every module, shared by the command-line runner and
//! the test harness. Results are assembled in a fixed order so that a given
//! configuration always produces the same report.

use num_complex::Complex;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::bergman::{
    gram_matrix, kernel_eval, leading_basis, project, BasisIndex, Component, Profile, RadialTerm, RadialTermFunction,
    Slot, Truncation,
};
use crate::geometry::{
    self, cover_boundary_point, delta0, equivalent, forward_map, frame_at, inverse_map, isometry_apply,
    levi_form_boundary, rho_tilde, sample_cover, sample_cover_boundary, sample_model, DomainParams, ModelPoint,
};
use crate::measure::{lambda_closed, lambda_quadrature, lambda_ratio, lambda_ratio_bound, MomentArgs, RadialPoint};
use crate::regularity::{
    continuity_certificate, divergence_witness, mu_for_sharp_threshold, mu_for_threshold, sharp_divergence_witness,
    sharp_threshold, smooth_counterexample, threshold, witness_index, Lattice, ThresholdRule,
};
use crate::scalar::ExactScalar;
use crate::special::{
    alpha_eval_with, alpha_holder_margin, alpha_recursion_factors, beta_eval_with, beta_holder_margin,
    beta_recursion_factor, AlphaArgs, AlphaMethod, BetaArgs, BetaMethod,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Special,
    Measure,
    Geometry,
    Bergman,
    Regularity,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] = [Self::Special, Self::Measure, Self::Geometry, Self::Bergman, Self::Regularity];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Special => "special",
            Self::Measure => "measure",
            Self::Geometry => "geometry",
            Self::Bergman => "bergman",
            Self::Regularity => "regularity",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Deliberate faults for checking that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Scales the beta recursion constant by `1 + 1e-6`.
    RecursionConstant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub recursion: f64,
    pub holder: f64,
    pub alpha_agreement: f64,
    pub lambda_agreement: f64,
    pub desk: f64,
    pub geometry: f64,
    pub levi: f64,
    pub gram_diagonal: f64,
    pub gram_off_diagonal: f64,
    pub idempotence: f64,
    pub reproducing: f64,
    pub exponent: f64,
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            recursion: 1e-10,
            holder: 1e-9,
            alpha_agreement: 1e-10,
            lambda_agreement: 1e-8,
            desk: 1e-10,
            geometry: 1e-12,
            levi: 1e-10,
            gram_diagonal: 1e-6,
            gram_off_diagonal: 1e-8,
            idempotence: 1e-10,
            reproducing: 1e-9,
            exponent: 0.05,
            quadrature: 1e-11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    pub geometry_mus: Vec<f64>,
    pub geometry_samples: usize,
    pub lambda_mus: Vec<f64>,
    pub lambda_triples: usize,
    pub gram_mu: f64,
    pub gram_size: usize,
    pub gram_weights: Vec<f64>,
    pub targets: Vec<f64>,
    pub sandwich_gap: f64,
    pub lattice: Lattice,
    /// Threshold formula used by the sharpness sandwich.
    pub rule: RuleChoice,
    pub tolerances: Tolerances,
    pub mutation: Option<Mutation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleChoice {
    Stated,
    Sharp,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 20240611,
            geometry_mus: vec![1.5, 2.0, 2.5, 3.0, 30.0 / 7.0],
            geometry_samples: 1000,
            lambda_mus: vec![1.5, 2.0, 3.0],
            lambda_triples: 500,
            gram_mu: 2.5,
            gram_size: 25,
            gram_weights: vec![0.0, 0.2, 0.4],
            targets: vec![0.1, 0.2, 0.3, 0.4],
            sandwich_gap: 0.02,
            lattice: Lattice::default(),
            rule: RuleChoice::Sharp,
            tolerances: Tolerances::default(),
            mutation: None,
        }
    }
}

/// Outcome of one property over many cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub first_counterexample: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub passed: bool,
    pub cases: usize,
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl SuiteReport {
    pub fn first_counterexample(&self) -> Option<(&str, &str)> {
        self.checks
            .iter()
            .find_map(|c| c.first_counterexample.as_deref().map(|e| (c.name.as_str(), e)))
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// One evaluated case.
#[derive(Debug, Clone)]
pub struct Case {
    residual: f64,
    ok: bool,
    detail: Option<String>,
}

impl Case {
    /// Passes when `residual <= tol`.
    fn within(residual: f64, tol: f64, detail: impl FnOnce() -> String) -> Self {
        let ok = residual <= tol;
        Self { residual, ok, detail: (!ok).then(detail) }
    }

    /// Passes when `margin >= -tol`; the reported residual is `-margin`.
    fn at_least(margin: f64, tol: f64, detail: impl FnOnce() -> String) -> Self {
        let ok = margin >= -tol;
        Self { residual: -margin, ok, detail: (!ok).then(detail) }
    }

    fn flag(ok: bool, detail: impl FnOnce() -> String) -> Self {
        Self { residual: if ok { 0.0 } else { 1.0 }, ok, detail: (!ok).then(detail) }
    }

    fn error(e: impl fmt::Display, context: impl fmt::Display) -> Self {
        Self { residual: f64::INFINITY, ok: false, detail: Some(format!("{context}: {e}")) }
    }
}

fn fold(name: &str, tol: f64, cases: Vec<Case>) -> CheckReport {
    let mut report = CheckReport {
        name: name.to_string(),
        cases: cases.len(),
        failures: 0,
        max_residual: f64::NEG_INFINITY,
        tolerance: tol,
        first_counterexample: None,
    };
    for c in cases {
        if c.residual > report.max_residual || c.residual.is_nan() {
            report.max_residual = c.residual;
        }
        if !c.ok {
            report.failures += 1;
            if report.first_counterexample.is_none() {
                report.first_counterexample = c.detail;
            }
        }
    }
    if report.cases == 0 {
        report.max_residual = 0.0;
    }
    report
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn crel(a: Complex<f64>, b: Complex<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn run_suite(name: SuiteName, cfg: &VerifyConfig) -> SuiteReport {
    let checks = match name {
        SuiteName::Special => special_suite(cfg),
        SuiteName::Measure => measure_suite(cfg),
        SuiteName::Geometry => geometry_suite(cfg),
        SuiteName::Bergman => bergman_suite(cfg),
        SuiteName::Regularity => regularity_suite(cfg),
    };
    SuiteReport {
        suite: name,
        passed: checks.iter().all(CheckReport::passed),
        cases: checks.iter().map(|c| c.cases).sum(),
        checks,
        elapsed_ms: None,
    }
}

const ALPHA_GRID: [f64; 8] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0];
const BETA_X_GRID: [f64; 7] = [0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0];
const BETA_Y_GRID: [f64; 6] = [-4.0, -1.0, 0.0, 0.5, 2.0, 6.0];
const S_GRID: [f64; 5] = [0.05, 0.1, 0.2, 0.3, 0.45];

fn special_suite(cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = &cfg.tolerances;
    let inner = 1e-14;
    let beta_scale = match cfg.mutation {
        Some(Mutation::RecursionConstant) => 1.0 + 1e-6,
        None => 1.0,
    };
    let alpha_pairs: Vec<(f64, f64)> = ALPHA_GRID.iter().flat_map(|&x| ALPHA_GRID.iter().map(move |&y| (x, y))).collect();
    let beta_pairs: Vec<(f64, f64)> =
        BETA_X_GRID.iter().flat_map(|&x| BETA_Y_GRID.iter().map(move |&y| (x, y))).collect();

    let alpha_rec = alpha_pairs
        .par_iter()
        .map(|&(x, y)| {
            let eval = |x: f64, y: f64| alpha_eval_with(AlphaArgs::new(x, y)?, AlphaMethod::Quadrature, inner);
            let run = || -> crate::Result<f64> {
                let base = eval(x, y)?;
                let (fy, fx) = alpha_recursion_factors(x, y);
                let sym = rel(eval(y, x)?, base);
                let ry = rel(fy * base, eval(x, y + 1.0)?);
                let rx = rel(fx * base, eval(x + 1.0, y)?);
                Ok(sym.max(ry).max(rx))
            };
            match run() {
                Ok(r) => Case::within(r, tol.recursion, || format!("alpha({x}, {y}): residual {r:e}")),
                Err(e) => Case::error(e, format!("alpha({x}, {y})")),
            }
        })
        .collect();

    let beta_rec = beta_pairs
        .par_iter()
        .map(|&(x, y)| {
            let run = || -> crate::Result<f64> {
                let lhs = beta_eval_with(BetaArgs::new(x + 2.0, y)?, BetaMethod::Singular, inner)?;
                let base = beta_eval_with(BetaArgs::new(x, y)?, BetaMethod::Singular, inner)?;
                Ok(rel(beta_scale * beta_recursion_factor(x, y) * base, lhs))
            };
            match run() {
                Ok(r) => Case::within(r, tol.recursion, || format!("beta({x}, {y}): residual {r:e}")),
                Err(e) => Case::error(e, format!("beta({x}, {y})")),
            }
        })
        .collect();

    let alpha_holder = alpha_pairs
        .par_iter()
        .flat_map_iter(|&(x, y)| {
            S_GRID.iter().filter(move |&&s| x > 2.0 * s && y > 2.0 * s).map(move |&s| {
                match alpha_holder_margin(x, y, s) {
                    Ok(m) => Case::at_least(m, tol.holder, || format!("alpha bound at ({x}, {y}, s={s}): margin {m:e}")),
                    Err(e) => Case::error(e, format!("alpha bound ({x}, {y}, {s})")),
                }
            })
        })
        .collect();

    let beta_holder = beta_pairs
        .par_iter()
        .flat_map_iter(|&(x, y)| {
            S_GRID.iter().filter(move |&&s| x > 4.0 * s).map(move |&s| match beta_holder_margin(x, y, s, inner) {
                Ok(m) => Case::at_least(m, tol.holder, || format!("beta bound at ({x}, {y}, s={s}): margin {m:e}")),
                Err(e) => Case::error(e, format!("beta bound ({x}, {y}, {s})")),
            })
        })
        .collect();

    let agreement = alpha_pairs
        .par_iter()
        .map(|&(x, y)| {
            let run = || -> crate::Result<f64> {
                let a = AlphaArgs::new(x, y)?;
                Ok(rel(
                    alpha_eval_with(a, AlphaMethod::Quadrature, inner)?,
                    alpha_eval_with(a, AlphaMethod::LogGamma, inner)?,
                ))
            };
            match run() {
                Ok(r) => Case::within(r, tol.alpha_agreement, || format!("alpha({x}, {y}): paths differ by {r:e}")),
                Err(e) => Case::error(e, format!("alpha({x}, {y})")),
            }
        })
        .collect();

    let beta_paths = beta_pairs
        .par_iter()
        .map(|&(x, y)| {
            let run = || -> crate::Result<f64> {
                let b = BetaArgs::new(x, y)?;
                let g = beta_eval_with(b, BetaMethod::GammaProduct, inner)?;
                let q = beta_eval_with(b, BetaMethod::Quadrature, inner)?;
                let s = beta_eval_with(b, BetaMethod::Singular, inner)?;
                Ok(rel(q, g).max(rel(s, g)))
            };
            match run() {
                Ok(r) => Case::within(r, tol.alpha_agreement, || format!("beta({x}, {y}): paths differ by {r:e}")),
                Err(e) => Case::error(e, format!("beta({x}, {y})")),
            }
        })
        .collect();

    vec![
        fold("alpha_recursion", tol.recursion, alpha_rec),
        fold("beta_recursion", tol.recursion, beta_rec),
        fold("alpha_holder_margin", tol.holder, alpha_holder),
        fold("beta_holder_margin", tol.holder, beta_holder),
        fold("alpha_path_agreement", tol.alpha_agreement, agreement),
        fold("beta_path_agreement", tol.alpha_agreement, beta_paths),
    ]
}

/// Seeded `(mu, x, y, s)` samples with radial margin in `[0.1, 3]`.
pub fn lambda_triples(cfg: &VerifyConfig) -> Vec<(f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6c61_6d62);
    (0..cfg.lambda_triples)
        .map(|i| {
            let mu = cfg.lambda_mus[i % cfg.lambda_mus.len()];
            let s: f64 = rng.gen_range(0.0..0.45);
            let margin: f64 = rng.gen_range(0.1..3.0);
            let y: f64 = rng.gen_range(-6.0..6.0);
            (mu, mu * (margin - 1.0 + s), y, s)
        })
        .collect()
}

fn measure_suite(cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = &cfg.tolerances;
    let triples = lambda_triples(cfg);
    let agreement = triples
        .par_iter()
        .map(|&(mu, x, y, s)| {
            let run = || -> crate::Result<f64> {
                let m = MomentArgs::new(DomainParams::new(mu)?, x, y, s);
                let closed = lambda_closed(&m).value().ok_or_else(|| crate::Error::Divergent(format!("{m:?}")))?;
                let quad = lambda_quadrature(&m, tol.quadrature)?.value().unwrap_or(f64::NAN);
                Ok(rel(quad, closed))
            };
            match run() {
                Ok(r) => Case::within(r, tol.lambda_agreement, || {
                    format!("lambda(x={x}, y={y}, s={s}; mu={mu}): closed form and quadrature differ by {r:e}")
                }),
                Err(e) => Case::error(e, format!("lambda(x={x}, y={y}, s={s}; mu={mu})")),
            }
        })
        .collect();

    let desk = cfg
        .lambda_mus
        .iter()
        .map(|&mu| {
            let p = DomainParams::new(mu).expect("mu > 1");
            let v = lambda_closed(&MomentArgs::new(p, 0.0, 0.0, 0.0)).value().unwrap_or(f64::NAN);
            let r = rel(v, 2.0 * PI.powi(3) * mu);
            Case::within(r, tol.desk, || format!("lambda(0,0,0; mu={mu}) = {v}"))
        })
        .collect();

    let ratio = triples
        .par_iter()
        .map(|&(mu, x, y, s)| {
            let run = || -> crate::Result<f64> {
                let p = DomainParams::new(mu)?;
                let r = lambda_ratio(x, y, s, &p)?;
                let b = lambda_ratio_bound(x, s, &p)?;
                // 1 <= ratio <= bound
                Ok((b - r).min(r - 1.0) / b)
            };
            match run() {
                Ok(m) => Case::at_least(m, 1e-9, || format!("ratio bound at (x={x}, y={y}, s={s}; mu={mu}): margin {m:e}")),
                Err(e) => Case::error(e, format!("ratio (x={x}, y={y}, s={s}; mu={mu})")),
            }
        })
        .collect();

    vec![
        fold("lambda_closed_vs_quadrature", tol.lambda_agreement, agreement),
        fold("lambda_desk_check", tol.desk, desk),
        fold("lambda_ratio_bound", 1e-9, ratio),
    ]
}

fn geometry_suite(cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = cfg.tolerances.geometry;
    let mut round = Vec::new();
    let mut quotient = Vec::new();
    let mut transport = Vec::new();
    let mut iso = Vec::new();
    let mut duality = Vec::new();
    let mut levi = Vec::new();
    let mut levi_zero = Vec::new();
    let angles = [-PI, -1.0, 0.5, 2.0];
    for (n, &mu) in cfg.geometry_mus.iter().enumerate() {
        let params = DomainParams::new(mu).expect("mu > 1");
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1000 * n as u64 + 1));
        let models: Vec<(ModelPoint<f64>, i64)> =
            (0..cfg.geometry_samples).map(|_| (sample_model(&params, &mut rng), rng.gen_range(-3..=3))).collect();
        let covers: Vec<_> = (0..cfg.geometry_samples).map(|_| sample_cover(&params, &mut rng)).collect();
        let bdry: Vec<_> = (0..cfg.geometry_samples).map(|_| sample_cover_boundary(&params, &mut rng)).collect();

        round.extend(models.par_iter().map(|&(w, k)| {
            let run = || -> crate::Result<f64> {
                let back = forward_map(&params, &inverse_map(&params, &w, k)?)?;
                Ok(crel(back.w1, w.w1).max(crel(back.w2, w.w2)))
            };
            match run() {
                Ok(r) => Case::within(r, tol, || format!("mu={mu}, w={w:?}, k={k}: round trip residual {r:e}")),
                Err(e) => Case::error(e, format!("mu={mu}, w={w:?}")),
            }
        }).collect::<Vec<_>>());

        quotient.extend(covers.par_iter().map(|z| {
            let run = || -> crate::Result<bool> {
                let w = forward_map(&params, z)?;
                equivalent(&params, z, &inverse_map(&params, &w, 0)?, tol)
            };
            match run() {
                Ok(ok) => Case::flag(ok, || format!("mu={mu}, z={z:?}: preimage not deck-equivalent")),
                Err(e) => Case::error(e, format!("mu={mu}, z={z:?}")),
            }
        }).collect::<Vec<_>>());

        transport.extend(covers.par_iter().map(|z| {
            let run = || -> crate::Result<f64> {
                let w = forward_map(&params, z)?;
                let rho = rho_tilde(z)?;
                let p = w.w1.norm().powf(mu);
                let pushed = 4.0 * p * (p - w.log_r2_sq().cos());
                let d = delta0(&params, &w)?;
                let scale = rho.abs().max(1.0);
                Ok(((rho - pushed).abs() / scale).max((d + rho / 4.0).abs() / scale))
            };
            match run() {
                Ok(r) => Case::within(r, tol, || format!("mu={mu}, z={z:?}: transport residual {r:e}")),
                Err(e) => Case::error(e, format!("mu={mu}, z={z:?}")),
            }
        }).collect::<Vec<_>>());

        iso.extend(covers.par_iter().flat_map_iter(|z| {
            let grid: Vec<(f64, f64)> = angles.iter().flat_map(|&t1| angles.iter().map(move |&t2| (t1, t2))).collect();
            grid.into_iter().map(move |(t1, t2)| {
                let run = || -> crate::Result<f64> {
                    let w = forward_map(&params, z)?;
                    let moved = forward_map(&params, &isometry_apply(&params, t1, t2, z)?)?;
                    let r1 = crel(moved.w1, w.w1 * Complex::from_polar(1.0, t1));
                    let r2 = crel(moved.w2, w.w2 * Complex::from_polar(1.0, t2));
                    Ok(r1.max(r2))
                };
                match run() {
                    Ok(r) => Case::within(r, tol, || format!("mu={mu}, z={z:?}, angles=({t1}, {t2}): residual {r:e}")),
                    Err(e) => Case::error(e, format!("mu={mu}, z={z:?}, angles=({t1}, {t2})")),
                }
            })
        }).collect::<Vec<_>>());

        duality.extend(models.par_iter().map(|&(w, _)| {
            match frame_at(&params, &w) {
                Ok(f) => {
                    let r = frame_duality_residual(&f);
                    Case::within(r, tol, || format!("mu={mu}, w={w:?}: duality residual {r:e}"))
                }
                Err(e) => Case::error(e, format!("mu={mu}, w={w:?}")),
            }
        }).collect::<Vec<_>>());

        levi.extend(bdry.par_iter().map(|z| match levi_form_boundary(z) {
            Ok(v) => Case::at_least(v, cfg.tolerances.levi, || format!("mu={mu}, z={z:?}: Levi form {v:e}")),
            Err(e) => Case::error(e, format!("mu={mu}, z={z:?}")),
        }).collect::<Vec<_>>());

        levi_zero.extend((0..16).map(|i| {
            let l = params.deck_angle() * i as f64 / 16.0;
            match cover_boundary_point(0.0, i % 2 == 0, l, 0.1 * i as f64).and_then(|z| levi_form_boundary(&z)) {
                Ok(v) => Case::flag(v == 0.0, || format!("mu={mu}, log|z2|^2={l}: Levi form {v:e} at x = 0")),
                Err(e) => Case::error(e, format!("mu={mu}, log|z2|^2={l}")),
            }
        }));
    }
    vec![
        fold("map_round_trip", tol, round),
        fold("preimage_equivalence", tol, quotient),
        fold("defining_function_transport", tol, transport),
        fold("isometry_push_forward", tol, iso),
        fold("frame_duality", tol, duality),
        fold("levi_nonnegative", cfg.tolerances.levi, levi),
        fold("levi_zero_at_x0", 0.0, levi_zero),
    ]
}

/// Largest deviation of the coframe pairing from the identity, relative to
/// the size of the products being summed in each entry.
pub fn frame_duality_residual(f: &geometry::FrameAt<f64>) -> f64 {
    let m = f.pairing();
    let rows = [&f.theta1, &f.theta2];
    let cols = [&f.l1, &f.l2];
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let scale = (rows[i][0] * cols[j][0]).norm() + (rows[i][1] * cols[j][1]).norm();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[i][j] - target).norm() / scale.max(1.0));
        }
    }
    worst
}

fn bergman_suite(cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = &cfg.tolerances;
    let params = DomainParams::new(cfg.gram_mu).expect("mu > 1");
    let mut diag = Vec::new();
    let mut off = Vec::new();
    for p in 0..3u8 {
        for &s in &cfg.gram_weights {
            let ctx = format!("p={p}, s={s}, mu={}", cfg.gram_mu);
            let g = leading_basis(p, s, &params, cfg.gram_size).and_then(|idx| Ok((gram_matrix(&idx, s, &params, tol.quadrature)?, idx)));
            match g {
                Ok((g, idx)) => {
                    for a in 0..idx.len() {
                        for b in 0..idx.len() {
                            if a == b {
                                let r = (g[a][a] - 1.0).norm();
                                diag.push(Case::within(r, tol.gram_diagonal, || format!("{ctx}: <e,e> at {} is {}", idx[a], g[a][a])));
                            } else if a < b {
                                let r = g[a][b].norm();
                                off.push(Case::within(r, tol.gram_off_diagonal, || {
                                    format!("{ctx}: <{}, {}> = {}", idx[a], idx[b], g[a][b])
                                }));
                            }
                        }
                    }
                }
                Err(e) => diag.push(Case::error(e, ctx)),
            }
        }
    }

    let truncation = Truncation::new(12, 12);
    let mut monomials = Vec::new();
    for c in [Component::Function, Component::Theta2, Component::Dw1, Component::TwoForm] {
        for j in -6..=6 {
            for k in -6..=6 {
                let idx = BasisIndex::new(j, k, c);
                if idx.is_admissible(&0.0, &params.mu()) {
                    monomials.push(idx);
                }
            }
        }
    }
    let reproducing = monomials
        .par_iter()
        .map(|idx| {
            let c = Complex::new(0.75, -0.5);
            let f = RadialTermFunction::from_basis(idx, c, &params);
            match project(&f, &params, truncation, tol.quadrature) {
                Ok(r) => {
                    let got = r.coefficients.get(idx).map(|x| x.value).unwrap_or_default();
                    let res = if r.coefficients.len() == 1 { crel(got, c) } else { f64::INFINITY };
                    Case::within(res, tol.reproducing, || format!("{idx}: coefficient {got}, {} entries", r.coefficients.len()))
                }
                Err(e) => Case::error(e, idx),
            }
        })
        .collect();

    let profiles: Vec<(&str, Profile<f64>)> = vec![
        ("|w1|^2", Arc::new(|p: &RadialPoint<f64>| Complex::new(p.r1_pow(2.0), 0.0))),
        ("exp(-1/|w1|^mu)", Arc::new(|p: &RadialPoint<f64>| Complex::new((-p.r1_mu().recip()).exp(), 0.0))),
        ("|w2|^i", Arc::new(|p: &RadialPoint<f64>| Complex::from_polar(1.0, p.r2().ln()))),
        ("delta0", Arc::new(|p: &RadialPoint<f64>| Complex::new(p.ln_delta0().exp(), 0.0))),
    ];
    let mut inputs = Vec::new();
    for (label, g) in &profiles {
        for (slot, p) in [(Slot::Function, 0u8), (Slot::Theta2, 1), (Slot::Theta1, 1), (Slot::Dw1, 1), (Slot::Dw1Theta2, 2)] {
            for (a, b) in [(0i64, 0i64), (1, -1), (2, 3)] {
                let t = RadialTerm::new(g.clone(), a, b, slot, format!("{label} w1^{a} w2^{b} [{slot:?}]"));
                inputs.push(RadialTermFunction::new(p, vec![t]).expect("slot matches degree"));
            }
        }
    }
    let projected: Vec<_> = inputs.par_iter().map(|f| project(f, &params, truncation, tol.quadrature)).collect();
    let mut selection = Vec::new();
    let mut idempotence = Vec::new();
    for (f, r) in inputs.iter().zip(&projected) {
        let label = &f.terms[0].label;
        match r {
            Ok(r) => {
                selection.push(Case::flag(r.coefficients.len() <= 1, || format!("{label}: {} coefficients", r.coefficients.len())));
                let again = RadialTermFunction::from_projection(r, &params, f.p);
                match project(&again, &params, truncation, tol.quadrature) {
                    Ok(r2) => {
                        let same_keys = r2.coefficients.keys().eq(r.coefficients.keys());
                        let res = if same_keys {
                            r.coefficients
                                .iter()
                                .map(|(k, c)| crel(r2.coefficients[k].value, c.value))
                                .fold(0.0, f64::max)
                        } else {
                            f64::INFINITY
                        };
                        idempotence.push(Case::within(res, tol.idempotence, || format!("{label}: re-projection differs by {res:e}")));
                    }
                    Err(e) => idempotence.push(Case::error(e, label)),
                }
            }
            Err(e) => selection.push(Case::error(e, label)),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6b65_726e);
    let pairs: Vec<_> = (0..64)
        .map(|_| (sample_model(&params, &mut rng), sample_model(&params, &mut rng), rng.gen_range(2..10i64)))
        .collect();
    let kernel = pairs
        .par_iter()
        .map(|&(w, u, n)| {
            let t = Truncation::new(n, n);
            let run = || -> crate::Result<bool> {
                let a = kernel_eval(&w, &u, &params, t)?.value;
                let b = kernel_eval(&u, &w, &params, t)?.value;
                let d = kernel_eval(&w, &w, &params, t)?.value;
                Ok(a == b.conj() && d.im == 0.0 && d.re > 0.0)
            };
            match run() {
                Ok(ok) => Case::flag(ok, || format!("w={w:?}, u={u:?}, truncation {n}")),
                Err(e) => Case::error(e, format!("w={w:?}, u={u:?}")),
            }
        })
        .collect();

    vec![
        fold("gram_diagonal", tol.gram_diagonal, diag),
        fold("gram_off_diagonal", tol.gram_off_diagonal, off),
        fold("reproducing_monomials", tol.reproducing, reproducing),
        fold("selection_rule", 0.0, selection),
        fold("idempotence", tol.idempotence, idempotence),
        fold("kernel_hermitian", 0.0, kernel),
    ]
}

fn rational_of(v: f64) -> Rational64 {
    Rational64::approximate_float(v).expect("representable")
}

fn regularity_suite(cfg: &VerifyConfig) -> Vec<CheckReport> {
    let tol = &cfg.tolerances;
    let sharp = cfg.rule == RuleChoice::Sharp;
    let cases: Vec<(Rational64, u8)> =
        cfg.targets.iter().flat_map(|&r| (0..3u8).map(move |p| (rational_of(r), p))).collect();
    let gap = rational_of(cfg.sandwich_gap);
    let sandwich: Vec<(Case, Case)> = cases
        .par_iter()
        .map(|&(r, p)| {
            let mu = if sharp { mu_for_sharp_threshold(r, p) } else { mu_for_threshold(r, p) };
            let Ok(mu) = mu else {
                let c = Case::error("no mu for target", format!("r={r}, p={p}"));
                return (c.clone(), c);
            };
            let ctx = format!("r={r}, p={p}, mu={mu}");
            let cont = match continuity_certificate(mu, p, r - gap, cfg.lattice) {
                Ok(c) => {
                    let m = (c.bound_used - c.sup_ratio) / c.bound_used;
                    Case::at_least(m, 1e-9, || format!("{ctx}: sup {} above bound {}", c.sup_ratio, c.bound_used))
                }
                Err(e) => Case::error(e, &ctx),
            };
            let wit = if sharp { sharp_divergence_witness(mu, p, r) } else { divergence_witness(mu, p, r) };
            let div = match wit {
                Ok(w) => {
                    let want = w.exponent.to_f64();
                    let d = (w.growth.fitted_exponent - want).abs();
                    let ok = w.lambda0.is_finite() && !w.lambda_s.is_finite() && w.growth.matches(tol.exponent);
                    Case { residual: d, ok, detail: (!ok).then(|| format!("{ctx}: fitted {} vs {want}", w.growth.fitted_exponent)) }
                }
                Err(e) => Case::error(e, &ctx),
            };
            (cont, div)
        })
        .collect();
    let (cont, div): (Vec<_>, Vec<_>) = sandwich.into_iter().unzip();

    let mut round = Vec::new();
    for i in 1..=9 {
        let r = Rational64::new(i, 20);
        for p in 0..3u8 {
            let (mu, back) = if sharp {
                let mu = mu_for_sharp_threshold(r, p).expect("r in range");
                (mu, sharp_threshold(mu, p).map(|t| t.r))
            } else {
                let mu = mu_for_threshold(r, p).expect("r in range");
                (mu, threshold(mu, p).map(|t| t.r))
            };
            round.push(match back {
                Ok(b) => Case::flag(b == r, || format!("r={r}, p={p}: mu={mu} gives {b}")),
                Err(e) => Case::error(e, format!("r={r}, p={p}")),
            });
            // the same round trip in floating point
            let rf = r.to_f64();
            let muf = if sharp { mu_for_sharp_threshold(rf, p) } else { mu_for_threshold(rf, p) }.expect("r in range");
            let bf = if sharp { sharp_threshold(muf, p) } else { threshold(muf, p) }.map(|t| t.r);
            round.push(match bf {
                Ok(b) => Case::within((b - rf).abs(), 1e-12, || format!("r={rf}, p={p}: mu={muf} gives {b}")),
                Err(e) => Case::error(e, format!("r={rf}, p={p}")),
            });
        }
    }

    // Every j above the witness row is admissible just below the threshold.
    let mut minimality = Vec::new();
    for &mu in &cfg.geometry_mus {
        let mu = rational_of(mu);
        let thr = if sharp { sharp_threshold(mu, 0) } else { threshold(mu, 0) }.expect("mu > 1").r;
        let s = thr - Rational64::new(1, 1000);
        let j0 = if sharp {
            crate::regularity::sharp_witness_index(&mu, 0).expect("p valid").j
        } else {
            witness_index(&mu, 0).expect("p valid").j
        };
        let ok = (j0 + 1..=j0 + 40).all(|j| BasisIndex::function(j, 0).is_admissible(&s, &mu));
        let borderline = !BasisIndex::function(j0, 0).is_admissible(&thr, &mu);
        minimality.push(Case::flag(ok && borderline, || format!("mu={mu}: witness row {j0} not minimal")));
    }

    // sup ratio is nondecreasing in s
    let mut monotone = Vec::new();
    for (mu, p) in [(3i64, 0u8), (2, 1), (4, 2)] {
        let mu = Rational64::from_integer(mu);
        let thr = threshold(mu, p).expect("mu > 1").r;
        let steps = 8;
        let sups: Vec<_> = (0..steps)
            .map(|i| thr * Rational64::new(i, steps))
            .map(|s| continuity_certificate(mu, p, s, cfg.lattice).map(|c| c.sup_ratio))
            .collect();
        let res = sups.into_iter().collect::<crate::Result<Vec<f64>>>();
        monotone.push(match res {
            Ok(v) => Case::flag(v.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)), || format!("mu={mu}, p={p}: {v:?}")),
            Err(e) => Case::error(e, format!("mu={mu}, p={p}")),
        });
    }

    // The p = 0 threshold jumps across integer mu; the p = 2 one does not.
    let mut jumps = Vec::new();
    for m in [2.0, 3.0, 4.0f64] {
        let (lo, hi) = (m - 1e-9, m + 1e-9);
        let t = |mu: f64, p: u8| threshold(mu, p).expect("mu > 1").r;
        let predicted = 0.5f64.min((2.0 - m) / m + 1.0) - 0.5f64.min((1.0 - m) / m + 1.0);
        let gap0 = t(lo, 0) - t(hi, 0);
        let gap2 = (t(lo, 2) - t(hi, 2)).abs();
        let r = (gap0 - predicted).abs().max(gap2);
        jumps.push(Case::within(r, 1e-8, || format!("m={m}: p=0 gap {gap0} (predicted {predicted}), p=2 gap {gap2}")));
    }

    // Counterexample transport at mu = 3.
    let params = DomainParams::new(3.0).expect("mu > 1");
    let transport = (0..3u8)
        .into_par_iter()
        .map(|p| {
            let run = || -> crate::Result<bool> {
                let f = smooth_counterexample(&params, p)?;
                let r = project(&f, &params, Truncation::new(20, 20), tol.quadrature)?;
                let want = witness_index(&3.0, p)?;
                let single = r.coefficients.len() == 1 && r.coefficients.get(&want).is_some_and(|c| c.value.norm() > 0.0);
                let three = Rational64::from_integer(3);
                let thr = threshold(three, p)?.r;
                let div = !crate::bergman::basis_norm_sq_exact(&want, &thr, &three)?.is_finite();
                Ok(single && div)
            };
            match run() {
                Ok(ok) => Case::flag(ok, || format!("p={p}: projection not a single nonzero witness coefficient")),
                Err(e) => Case::error(e, format!("p={p}")),
            }
        })
        .collect();

    let rule = if sharp { ThresholdRule::Sharp } else { ThresholdRule::Stated };
    let tag = |n: &str| format!("{n}[{rule:?}]").to_lowercase();
    vec![
        fold(&tag("continuity_below_threshold"), 1e-9, cont),
        fold(&tag("divergence_at_threshold"), tol.exponent, div),
        fold(&tag("inverse_round_trip"), 1e-12, round),
        fold(&tag("witness_minimality"), 0.0, minimality),
        fold("sup_ratio_monotone", 0.0, monotone),
        fold("threshold_jump_at_integers", 1e-8, jumps),
        fold("counterexample_transport", 0.0, transport),
    ]
}
