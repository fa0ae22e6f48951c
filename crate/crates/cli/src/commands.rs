//! The four subcommands. Each returns a serializable report together with
//! its CSV rows and a short text rendering.

use num_rational::Rational64;
use omega_bergman::geometry::DomainParams;
use omega_bergman::measure::{growth_fit, lambda_closed, lambda_quadrature, GrowthFit, MomentArgs};
use omega_bergman::regularity::{
    continuity_certificate, mu_for_sharp_threshold, mu_for_threshold, sharp_threshold, threshold, BindingClause,
    Lattice, ThresholdReport, ThresholdRule,
};
use omega_bergman::scalar::ExactScalar;
use omega_bergman::verify::{run_suite, RuleChoice, SuiteName, SuiteReport, VerifyConfig};
use omega_bergman::Error;
use serde::Serialize;
use std::time::Instant;

use crate::config::Decimal;
use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

/// A command result in every output format.
pub struct Rendered {
    pub json: serde_json::Value,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
    pub text: String,
    /// Exit status when properties were checked.
    pub passed: bool,
}

fn envelope(command: &str, result: impl Serialize) -> serde_json::Value {
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "result": result,
    })
}

fn exact_string(q: &Rational64) -> String {
    q.to_string()
}

#[derive(Serialize)]
struct ThresholdOut {
    mu: String,
    mu_decimal: f64,
    p: u8,
    r: String,
    r_decimal: f64,
    radial_clause: String,
    binding: BindingClause,
    rule: ThresholdRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    inverted_from: Option<String>,
}

fn threshold_out(t: &ThresholdReport<Rational64>, inverted_from: Option<Rational64>) -> ThresholdOut {
    ThresholdOut {
        mu: exact_string(&t.mu),
        mu_decimal: t.mu.to_f64(),
        p: t.p,
        r: exact_string(&t.r),
        r_decimal: t.r.to_f64(),
        radial_clause: exact_string(&t.radial_clause),
        binding: t.binding,
        rule: t.rule,
        inverted_from: inverted_from.map(|q| exact_string(&q)),
    }
}

fn lib_error(e: Error) -> Failure {
    match e {
        Error::Domain(_) | Error::Inadmissible(_) | Error::AboveThreshold { .. } | Error::BelowThreshold { .. } => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Runtime(e.to_string()),
    }
}

pub fn cmd_threshold(mu: Option<Decimal>, invert: Option<Decimal>, p: u8, rule: RuleChoice) -> Result<Rendered, Failure> {
    let sharp = rule == RuleChoice::Sharp;
    let (mu, inverted) = match (mu, invert) {
        (_, Some(r)) => {
            let mu = if sharp { mu_for_sharp_threshold(r.exact, p) } else { mu_for_threshold(r.exact, p) }.map_err(lib_error)?;
            (mu, Some(r.exact))
        }
        (Some(mu), None) => (mu.exact, None),
        (None, None) => return Err(Failure::Usage("threshold needs --mu or --invert".into())),
    };
    let t = if sharp { sharp_threshold(mu, p) } else { threshold(mu, p) }.map_err(lib_error)?;
    let out = threshold_out(&t, inverted);
    let text = format!(
        "mu = {} ({:.12}), p = {}: r = {} ({:.12}), binding {:?} [{:?}]\n",
        out.mu, out.mu_decimal, out.p, out.r, out.r_decimal, out.binding, out.rule
    );
    Ok(Rendered {
        csv_header: ["mu", "mu_decimal", "p", "r", "r_decimal", "binding", "rule"].map(String::from).to_vec(),
        csv_rows: vec![vec![
            out.mu.clone(),
            out.mu_decimal.to_string(),
            out.p.to_string(),
            out.r.clone(),
            out.r_decimal.to_string(),
            format!("{:?}", out.binding),
            format!("{:?}", out.rule),
        ]],
        json: envelope("threshold", &out),
        text,
        passed: true,
    })
}

#[derive(Serialize)]
struct LambdaOut {
    mu: f64,
    x: f64,
    y: f64,
    s: f64,
    integrable: bool,
    violated: Vec<String>,
    closed_form: Option<f64>,
    quadrature: Option<f64>,
    relative_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    growth: Option<GrowthFit<f64>>,
}

pub struct LambdaRequest {
    pub mu: Decimal,
    pub x: Decimal,
    pub y: Decimal,
    pub s: Decimal,
    pub tol: f64,
    pub fit: Option<(u32, u32)>,
}

pub fn cmd_lambda(req: &LambdaRequest) -> Result<Rendered, Failure> {
    let params = DomainParams::new(req.mu.value).map_err(lib_error)?;
    if !(req.tol > 0.0) {
        return Err(Failure::Usage("quadrature tolerance must be positive".into()));
    }
    let m = MomentArgs::new(params, req.x.value, req.y.value, req.s.value);
    let violated = omega_bergman::measure::integrability_violations(&req.x.exact, &req.s.exact, &req.mu.exact);
    let integrable = violated.is_empty();
    let (closed, quad) = if integrable {
        let c = lambda_closed(&m).value();
        let q = lambda_quadrature(&m, req.tol).map_err(lib_error)?.value();
        (c, q)
    } else {
        (None, None)
    };
    let growth = match req.fit {
        Some((a, b)) => Some(growth_fit(&m, a, b, req.tol).map_err(lib_error)?),
        None => None,
    };
    let out = LambdaOut {
        mu: req.mu.value,
        x: req.x.value,
        y: req.y.value,
        s: req.s.value,
        integrable,
        violated: violated.iter().map(|v| v.to_string()).collect(),
        closed_form: closed,
        quadrature: quad,
        relative_difference: closed.zip(quad).map(|(c, q)| (q - c).abs() / c.abs()),
        growth,
    };
    let mut text = format!("lambda(x={}, y={}, s={}; mu={})\n", req.x, req.y, req.s, req.mu);
    if integrable {
        text += &format!(
            "  closed form  {:.15e}\n  quadrature   {:.15e}\n  rel. diff.   {:.3e}\n  verdict      integrable\n",
            out.closed_form.unwrap_or(f64::NAN),
            out.quadrature.unwrap_or(f64::NAN),
            out.relative_difference.unwrap_or(f64::NAN)
        );
    } else {
        text += &format!("  verdict      divergent: {}\n", out.violated.join(", "));
    }
    if let Some(g) = &out.growth {
        text += &format!(
            "  growth       {:?}, fitted exponent {:.6} (predicted {:.6}), residual {:.2e}\n",
            g.kind, g.fitted_exponent, g.predicted_exponent, g.residual
        );
    }
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    Ok(Rendered {
        csv_header: [
            "mu", "x", "y", "s", "integrable", "violated", "closed_form", "quadrature", "relative_difference",
            "fitted_exponent", "predicted_exponent",
        ]
        .map(String::from)
        .to_vec(),
        csv_rows: vec![vec![
            out.mu.to_string(),
            out.x.to_string(),
            out.y.to_string(),
            out.s.to_string(),
            out.integrable.to_string(),
            out.violated.join("; "),
            opt(out.closed_form),
            opt(out.quadrature),
            opt(out.relative_difference),
            opt(out.growth.as_ref().map(|g| g.fitted_exponent)),
            opt(out.growth.as_ref().map(|g| g.predicted_exponent)),
        ]],
        json: envelope("lambda", &out),
        text,
        passed: true,
    })
}

#[derive(Serialize)]
struct ScanRow {
    s: String,
    s_decimal: f64,
    status: &'static str,
    sup_ratio: Option<f64>,
    bound: Option<f64>,
    argmax_j: Option<i64>,
    argmax_k: Option<i64>,
    note: Option<String>,
}

/// CSV columns of `scan`, in order.
pub const SCAN_COLUMNS: [&str; 7] = ["s", "status", "sup_ratio", "bound", "argmax_j", "argmax_k", "note"];

pub fn cmd_scan(mu: Decimal, p: u8, grid: &[Decimal], lattice: Lattice) -> Result<Rendered, Failure> {
    if grid.is_empty() {
        return Err(Failure::Usage("the s grid is empty".into()));
    }
    let thr = threshold(mu.exact, p).map_err(lib_error)?;
    if let Some(bad) = grid.iter().find(|s| s.exact < Rational64::from_integer(0)) {
        return Err(Failure::Usage(format!("weights must be non-negative, got {bad}")));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for s in grid {
        let base = ScanRow {
            s: exact_string(&s.exact),
            s_decimal: s.value,
            status: "FINITE",
            sup_ratio: None,
            bound: None,
            argmax_j: None,
            argmax_k: None,
            note: None,
        };
        let row = match continuity_certificate(mu.exact, p, s.exact, lattice) {
            Ok(c) => ScanRow {
                sup_ratio: Some(c.sup_ratio),
                bound: Some(c.bound_used),
                argmax_j: Some(c.sup_attained_at.j),
                argmax_k: Some(c.sup_attained_at.k),
                ..base
            },
            Err(Error::AboveThreshold { .. }) => {
                ScanRow { status: "DIVERGENT", note: Some(format!("s >= threshold {}", thr.r)), ..base }
            }
            Err(e @ Error::ThresholdNotAttained { .. }) => ScanRow { status: "DIVERGENT", note: Some(e.to_string()), ..base },
            Err(e) => return Err(lib_error(e)),
        };
        rows.push(row);
    }
    let opt = |v: Option<String>| v.unwrap_or_default();
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.s_decimal.to_string(),
                r.status.to_string(),
                opt(r.sup_ratio.map(|v| v.to_string())),
                opt(r.bound.map(|v| v.to_string())),
                opt(r.argmax_j.map(|v| v.to_string())),
                opt(r.argmax_k.map(|v| v.to_string())),
                opt(r.note.clone()),
            ]
        })
        .collect();
    let mut text = format!("scan mu = {mu}, p = {p}, threshold {}\n", thr.r);
    for r in &rows {
        match r.sup_ratio {
            Some(v) => {
                text += &format!(
                    "  s = {:<10} sup {:.12} <= {:.12} at (j={}, k={})\n",
                    r.s,
                    v,
                    r.bound.unwrap_or(f64::NAN),
                    r.argmax_j.unwrap_or_default(),
                    r.argmax_k.unwrap_or_default()
                )
            }
            None => text += &format!("  s = {:<10} DIVERGENT\n", r.s),
        }
    }
    let json = envelope(
        "scan",
        serde_json::json!({
            "mu": exact_string(&mu.exact),
            "p": p,
            "threshold": exact_string(&thr.r),
            "lattice": lattice,
            "rows": rows,
        }),
    );
    Ok(Rendered {
        csv_header: SCAN_COLUMNS.map(String::from).to_vec(),
        csv_rows,
        json,
        text,
        passed: true,
    })
}

pub fn cmd_verify(cfg: &VerifyConfig, suites: &[SuiteName], timings: bool) -> Result<Rendered, Failure> {
    let chosen: Vec<SuiteName> = if suites.is_empty() { SuiteName::ALL.to_vec() } else { suites.to_vec() };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for name in chosen {
        let start = Instant::now();
        let mut r = run_suite(name, cfg);
        if timings {
            r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        }
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    let mut text = String::new();
    let mut csv_rows = Vec::new();
    for r in &reports {
        text += &format!("{:<11} {}  ({} cases)\n", r.suite.as_str(), if r.passed { "PASS" } else { "FAIL" }, r.cases);
        for c in &r.checks {
            text += &format!(
                "  {:<40} {:>6} cases  {:>4} failed  max residual {:.3e} (tol {:.1e})\n",
                c.name, c.cases, c.failures, c.max_residual, c.tolerance
            );
            csv_rows.push(vec![
                r.suite.as_str().to_string(),
                c.name.clone(),
                c.cases.to_string(),
                c.failures.to_string(),
                c.max_residual.to_string(),
                c.tolerance.to_string(),
                c.passed().to_string(),
            ]);
        }
    }
    let json = envelope(
        "verify",
        serde_json::json!({
            "seed": cfg.seed,
            "config": cfg,
            "passed": passed,
            "suites": reports,
        }),
    );
    Ok(Rendered {
        json,
        csv_header: ["suite", "check", "cases", "failures", "max_residual", "tolerance", "passed"]
            .map(String::from)
            .to_vec(),
        csv_rows,
        text,
        passed,
    })
    .map(|mut r| {
        if !passed {
            if let Some((check, example)) = reports.iter().find_map(|s| s.first_counterexample()) {
                r.text += &format!("first counterexample ({check}): {example}\n");
            }
        }
        r
    })
}

/// First counterexample of a failed verify report, for the error stream.
pub fn first_counterexample(json: &serde_json::Value) -> Option<String> {
    let suites = json["result"]["suites"].as_array()?;
    suites.iter().flat_map(|s| s["checks"].as_array().into_iter().flatten()).find_map(|c| {
        c["first_counterexample"].as_str().map(|e| format!("{}: {e}", c["name"].as_str().unwrap_or("?")))
    })
}
