//! One line per acceptance criterion, written straight to stderr so the
//! lines survive the test harness's output capture.

use num_rational::Rational64;
use omega_bergman::bergman::{basis_norm_sq, basis_norm_sq_exact, project, Truncation};
use omega_bergman::geometry::DomainParams;
use omega_bergman::measure::{lambda_closed, lambda_radial, MomentArgs};
use omega_bergman::regularity::{
    continuity_certificate, divergence_witness, mu_for_sharp_threshold, mu_for_threshold, sharp_divergence_witness,
    smooth_counterexample, threshold, witness_index, ContinuityCertificate, DivergenceWitness,
};
use omega_bergman::special::{alpha_eval, beta_eval, AlphaArgs, BetaArgs};
use omega_bergman::verify::{lambda_triples, run_suite, SuiteName, SuiteReport, VerifyConfig};
use omega_bergman::Error;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn line(id: &str, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let in_time = budget.is_none_or(|b| took <= b);
    let pass = o.pass && in_time;
    let budget = budget.map(|b| format!(" / budget {:.0} s", b.as_secs_f64())).unwrap_or_default();
    let late = if in_time { "" } else { " [over budget]" };
    let _ = writeln!(
        std::io::stderr().lock(),
        "criterion {id:<6} {} {title}: {} ({:.2} s{budget}){late}",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64(),
    );
    pass
}

fn checks_pass(r: &SuiteReport, names: &[(&str, f64)], min_cases: usize) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(name, tol) in names {
        let Some(c) = r.check(name) else {
            pass = false;
            parts.push(format!("{name} missing"));
            continue;
        };
        let ok = c.passed() && c.tolerance <= tol && c.max_residual <= tol && c.cases >= min_cases;
        pass &= ok;
        parts.push(format!("{name} {:.1e}/{tol:.0e} over {}", c.max_residual, c.cases));
    }
    Outcome { pass, detail: parts.join(", ") }
}

fn criterion_1(cfg: &VerifyConfig) -> Outcome {
    let r = run_suite(SuiteName::Special, cfg);
    checks_pass(
        &r,
        &[
            ("alpha_recursion", 1e-10),
            ("beta_recursion", 1e-10),
            ("alpha_path_agreement", 1e-10),
        ],
        1,
    )
    .and(holder(&r))
}

/// Hölder margins are reported as `-margin`, so the bound is on the residual.
fn holder(r: &SuiteReport) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["alpha_holder_margin", "beta_holder_margin"] {
        let c = r.check(name).expect("suite reports the Hölder margins");
        pass &= c.passed() && c.max_residual <= 1e-9;
        parts.push(format!("{name} worst {:.1e}", -c.max_residual));
    }
    Outcome { pass, detail: parts.join(", ") }
}

impl Outcome {
    fn and(self, other: Outcome) -> Outcome {
        Outcome { pass: self.pass && other.pass, detail: format!("{}, {}", self.detail, other.detail) }
    }
}

fn criterion_2(cfg: &VerifyConfig) -> Outcome {
    let triples = lambda_triples(cfg);
    let margins_ok = triples.iter().all(|&(mu, x, _, s)| x / mu + 1.0 - s >= 0.1 - 1e-12);
    let mus_ok = [1.5, 2.0, 3.0].iter().all(|m| triples.iter().any(|t| t.0 == *m));
    let worst = triples
        .par_iter()
        .map(|&(mu, x, y, s)| {
            let m = MomentArgs::new(DomainParams::new(mu).unwrap(), x, y, s);
            let closed = lambda_closed(&m).value().expect("triple is integrable");
            let quad = lambda_radial(&m, 1e-11).expect("quadrature converges").value;
            (quad - closed).abs() / closed
        })
        .reduce(|| 0.0, f64::max);
    Outcome {
        pass: triples.len() >= 500 && margins_ok && mus_ok && worst <= 1e-8,
        detail: format!("{} triples, worst relative gap {worst:.2e} (tol 1e-8)", triples.len()),
    }
}

fn criterion_3() -> Outcome {
    let a: f64 = alpha_eval(AlphaArgs::new(2.0, 1.0).unwrap(), 1e-14).unwrap();
    let b: f64 = beta_eval(BetaArgs::new(3.0, 0.0).unwrap(), 1e-14).unwrap();
    let mut worst = ((a - 0.5) / 0.5).abs().max(((b - PI / 2.0) / (PI / 2.0)).abs());
    for mu in [1.5, 2.0, 3.0] {
        let v = lambda_closed(&MomentArgs::new(DomainParams::new(mu).unwrap(), 0.0, 0.0, 0.0)).value().unwrap();
        let want = 2.0 * PI.powi(3) * mu;
        worst = worst.max(((v - want) / want).abs());
    }
    Outcome { pass: worst <= 1e-10, detail: format!("worst relative error {worst:.1e} (tol 1e-10)") }
}

fn criterion_4(cfg: &VerifyConfig) -> Outcome {
    let r = run_suite(SuiteName::Geometry, cfg);
    let n = cfg.geometry_samples * cfg.geometry_mus.len();
    let core = checks_pass(
        &r,
        &[
            ("map_round_trip", 1e-12),
            ("defining_function_transport", 1e-12),
            ("isometry_push_forward", 1e-12),
            ("frame_duality", 1e-12),
        ],
        n,
    );
    let levi = checks_pass(&r, &[("levi_nonnegative", 1e-10)], 1000);
    let levi_zero = checks_pass(&r, &[("levi_zero_at_x0", 0.0)], 1);
    let out = core.and(levi).and(levi_zero);
    Outcome { pass: out.pass && cfg.geometry_samples >= 1000, detail: out.detail }
}

fn criterion_5(cfg: &VerifyConfig) -> Outcome {
    let r = run_suite(SuiteName::Bergman, cfg);
    let shape = cfg.gram_size == 25 && cfg.gram_weights == [0.0, 0.2, 0.4];
    // 3 degrees x 3 weights x 25 diagonal entries
    let out = checks_pass(&r, &[("gram_diagonal", 1e-6), ("gram_off_diagonal", 1e-8)], 225);
    Outcome { pass: out.pass && shape, detail: out.detail }
}

struct Sandwich {
    r: Rational64,
    p: u8,
    mu: Rational64,
    below: omega_bergman::Result<ContinuityCertificate<Rational64>>,
    at: omega_bergman::Result<DivergenceWitness<Rational64>>,
}

fn sandwich(sharp: bool) -> Vec<Sandwich> {
    let gap = Rational64::new(2, 100);
    let cases: Vec<(Rational64, u8)> = (1..=4).flat_map(|i| (0..3).map(move |p| (Rational64::new(i, 10), p))).collect();
    cases
        .into_par_iter()
        .map(|(r, p)| {
            let mu = if sharp { mu_for_sharp_threshold(r, p) } else { mu_for_threshold(r, p) }.unwrap();
            let below = continuity_certificate(mu, p, r - gap, Default::default());
            let at = if sharp { sharp_divergence_witness(mu, p, r) } else { divergence_witness(mu, p, r) };
            Sandwich { r, p, mu, below, at }
        })
        .collect()
}

fn part_a_ok(c: &omega_bergman::Result<ContinuityCertificate<Rational64>>) -> bool {
    c.as_ref().is_ok_and(|c| c.sup_ratio.is_finite() && c.within_bound(1e-9))
}

fn part_b(w: &omega_bergman::Result<DivergenceWitness<Rational64>>) -> Option<f64> {
    let w = w.as_ref().ok()?;
    let want = w.exponent.to_f64();
    let d = (w.growth.fitted_exponent - want).abs();
    (w.growth.matches(0.05) && !w.lambda_s.is_finite()).then_some(d)
}

trait ToF64 {
    fn to_f64(&self) -> f64;
}

impl ToF64 for Rational64 {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Sub-cases of part (a) that fail under the stated threshold: the targets
/// whose inverse `mu` is not an integer, for `p = 0, 1`.
const STATED_RED: [(i64, u8); 4] = [(3, 0), (3, 1), (4, 0), (4, 1)];

fn criterion_6(rows: &[Sandwich]) -> Outcome {
    let mut red = Vec::new();
    let mut b_worst: f64 = 0.0;
    let mut b_ok = true;
    for row in rows {
        if !part_a_ok(&row.below) {
            let why = match &row.below {
                Err(Error::ThresholdNotAttained { index, s, .. }) => format!("{index} diverges at s={s}"),
                Err(e) => e.to_string(),
                Ok(c) => format!("sup {} above bound {}", c.sup_ratio, c.bound_used),
            };
            red.push(format!("(r={}, p={}, mu={}): {why}", row.r, row.p, row.mu));
        }
        match part_b(&row.at) {
            Some(d) => b_worst = b_worst.max(d),
            None => b_ok = false,
        }
    }
    Outcome {
        pass: red.is_empty() && b_ok,
        detail: format!(
            "(a) {}/12 certified{}; (b) {} with worst exponent gap {b_worst:.3}",
            12 - red.len(),
            if red.is_empty() { String::new() } else { format!(", failing {}", red.join("; ")) },
            if b_ok { "12/12 witnesses" } else { "witness missing" },
        ),
    }
}

fn stated_red_set(rows: &[Sandwich]) -> Vec<(i64, u8)> {
    rows.iter()
        .filter(|row| !part_a_ok(&row.below))
        .map(|row| (*row.r.numer() * 10 / *row.r.denom(), row.p))
        .collect()
}

fn criterion_7() -> Outcome {
    let params = DomainParams::new(3.0).unwrap();
    let three = Rational64::from_integer(3);
    let mut pass = true;
    let mut parts = Vec::new();
    for p in 0..3u8 {
        let f = smooth_counterexample(&params, p).unwrap();
        let r = project(&f, &params, Truncation::new(20, 20), 1e-11).unwrap();
        let want = witness_index(&3.0, p).unwrap();
        let nonzero: Vec<_> = r.coefficients.iter().filter(|(_, c)| c.value.norm() > 0.0).map(|(i, _)| *i).collect();
        let thr = threshold(three, p).unwrap().r;
        let divergent = !basis_norm_sq_exact(&want, &thr, &three).unwrap().is_finite();
        let finite_at_zero = basis_norm_sq(&want, 0.0, &params).is_finite();
        let ok = nonzero == [want] && r.coefficients.len() == 1 && divergent && finite_at_zero;
        pass &= ok;
        parts.push(format!("p={p}: {} nonzero at {want}, norm at s={thr} {}", nonzero.len(), if divergent { "divergent" } else { "finite" }));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_8() -> Outcome {
    let half = Rational64::new(1, 2);
    let t = |mu: f64, p: u8| threshold(mu, p).unwrap().r;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for m in 2..=5i64 {
        // left limit uses floor = m - 1, right limit floor = m
        let left = half.min(Rational64::new(2 - m, m) + 1);
        let right = half.min(Rational64::new(1 - m, m) + 1);
        let predicted = (left - right).to_f64();
        let (lo, hi) = (m as f64 - 1e-9, m as f64 + 1e-9);
        let gap0 = t(lo, 0) - t(hi, 0);
        let gap2 = (t(lo, 2) - t(hi, 2)).abs();
        worst = worst.max((gap0 - predicted).abs()).max(gap2);
        parts.push(format!("m={m}: p=0 gap {gap0:.6} (predicted {predicted:.6}), p=2 gap {gap2:.1e}"));
    }
    Outcome { pass: worst <= 1e-8, detail: format!("{}; worst deviation {worst:.1e}", parts.join(", ")) }
}

fn criterion_9() -> Outcome {
    let args = ["omega-bergman", "verify", "--seed", "424242"];
    let once = || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = omega_bergman_cli::run(args, None, &mut out, &mut err);
        (code, out)
    };
    let (c1, a) = once();
    let (c2, b) = once();
    let parses = serde_json::from_slice::<serde_json::Value>(&a).is_ok();
    Outcome {
        pass: c1 == 0 && c2 == 0 && parses && a == b,
        detail: format!("{} bytes, exit codes {c1}/{c2}, identical: {}", a.len(), a == b),
    }
}

#[test]
fn acceptance() {
    let cfg = VerifyConfig::default();
    let secs = |s| Some(Duration::from_secs(s));
    let mut green = vec![
        line("1", "special-function suite", secs(10), || criterion_1(&cfg)),
        line("2", "moment closed form vs quadrature", secs(60), || criterion_2(&cfg)),
        line("3", "moment desk check", None, criterion_3),
        line("4", "geometry suite", None, || criterion_4(&cfg)),
        line("5", "Gram orthonormality", None, || criterion_5(&cfg)),
    ];

    let mut stated = Vec::new();
    let six = line("6", "threshold sharpness (stated threshold)", secs(300), || {
        stated = sandwich(false);
        criterion_6(&stated)
    });
    let six_sharp = line("6s", "threshold sharpness (sharp threshold)", secs(300), || criterion_6(&sandwich(true)));

    green.push(line("7", "counterexample transport", None, criterion_7));
    green.push(line("8", "threshold discontinuity", None, criterion_8));
    green.push(line("9", "determinism", None, criterion_9));

    assert!(green.iter().all(|&g| g), "a criterion other than 6 failed; see the lines above");
    assert!(six_sharp, "sharp-threshold sandwich must hold in full");
    // The stated threshold overshoots at non-integer mu for p = 0, 1; exactly
    // those sub-cases of part (a) are expected to fail, part (b) never.
    assert!(!six, "stated-threshold sandwich unexpectedly passed in full");
    assert_eq!(stated_red_set(&stated), STATED_RED.to_vec());
    assert!(stated.iter().all(|row| part_b(&row.at).is_some()));
}
