//! Human and JSON renderings. JSON integers are decimal strings.

use fpt_core::candidates::{Candidate, Provenance};
use fpt_core::corpus::Report;
use fpt_core::fptengine::{FptResult, PerturbationReport, UndeterminedReason, Verdict};
use fpt_core::lct::DiffBounds;
use fpt_core::Rational;
use serde_json::{json, Value};

pub fn frac(r: &Rational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

fn provenance_json(p: &Provenance) -> Value {
    match p {
        Provenance::Lambda => json!("lambda"),
        Provenance::Pair { l, e } => json!({ "L": l.to_string(), "E": e.to_string() }),
    }
}

pub fn candidate_json(c: &Candidate) -> Value {
    json!({
        "num": c.value.numer().to_string(),
        "den": c.value.denom().to_string(),
        "provenance": c.provenance.iter().map(provenance_json).collect::<Vec<_>>(),
        "filters": c.filters_passed.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

fn first_pair(cert: &[Provenance]) -> Option<(u64, u64)> {
    if cert.contains(&Provenance::Lambda) {
        return None;
    }
    cert.iter().find_map(|p| match p {
        Provenance::Pair { l, e } => Some((*l, *e)),
        Provenance::Lambda => None,
    })
}

fn reason_text(r: &UndeterminedReason) -> String {
    match r {
        UndeterminedReason::PrimeDividesDenominator => "p divides the denominator of lambda".into(),
        UndeterminedReason::LevelCap => "level cap reached".into(),
        UndeterminedReason::Capacity(msg) => format!("capacity: {msg}"),
    }
}

fn reason_tag(r: &UndeterminedReason) -> &'static str {
    match r {
        UndeterminedReason::PrimeDividesDenominator => "prime-divides-denominator",
        UndeterminedReason::LevelCap => "level-cap",
        UndeterminedReason::Capacity(_) => "capacity",
    }
}

fn nu_json(nu: &[u128]) -> Value {
    json!(nu.iter().map(ToString::to_string).collect::<Vec<_>>())
}

pub fn weights_json(w: &[u64]) -> Value {
    json!(w.iter().map(ToString::to_string).collect::<Vec<_>>())
}

pub fn fpt_json(poly: &str, weights: &[u64], res: &FptResult) -> Value {
    let result = match &res.verdict {
        Verdict::Exact { value, certificate } => {
            let (l, e) = match first_pair(certificate) {
                Some((l, e)) => (json!(l.to_string()), json!(e.to_string())),
                None => (Value::Null, Value::Null),
            };
            json!({
                "kind": "exact",
                "num": value.numer().to_string(),
                "den": value.denom().to_string(),
                "L": l,
                "E": e,
                "certificate": certificate.iter().map(provenance_json).collect::<Vec<_>>(),
                "survivors": [],
            })
        }
        Verdict::Undetermined {
            survivors,
            lower_bound,
            levels_computed,
            reason,
        } => json!({
            "kind": "undetermined",
            "lower_bound": frac(lower_bound),
            "levels": levels_computed.to_string(),
            "reason": reason_tag(reason),
            "survivors": survivors.iter().map(candidate_json).collect::<Vec<_>>(),
        }),
    };
    json!({
        "prime": res.prime.to_string(),
        "weights": weights_json(weights),
        "poly": poly,
        "lambda": frac(&res.lambda),
        "result": result,
        "nu": nu_json(&res.nu),
    })
}

pub fn fpt_text(res: &FptResult) -> String {
    let head = format!("p = {}  lambda = {}", res.prime, res.lambda);
    let mut out = match &res.verdict {
        Verdict::Exact { value, certificate } => {
            let cert = match first_pair(certificate) {
                None => "fpt = lambda".to_string(),
                Some(_) => {
                    let pairs: Vec<String> = certificate.iter().map(ToString::to_string).collect();
                    format!("(L,E) = {}", pairs.join(" "))
                }
            };
            format!("{head}  fpt = {value}  exact  {cert}")
        }
        Verdict::Undetermined {
            survivors,
            lower_bound,
            levels_computed,
            reason,
        } => {
            let vals: Vec<String> = survivors.iter().map(|c| c.value.to_string()).collect();
            let mut s = format!(
                "{head}  undetermined after {levels_computed} levels ({})  fpt >= {lower_bound}",
                reason_text(reason)
            );
            if !vals.is_empty() {
                s.push_str(&format!("\n  survivors: {}", vals.join(", ")));
            }
            s
        }
    };
    if !res.nu.is_empty() {
        let nus: Vec<String> = res.nu.iter().map(ToString::to_string).collect();
        out.push_str(&format!("\n  nu = {}", nus.join(", ")));
    }
    out
}

pub fn nu_json_obj(poly: &str, weights: &[u64], p: u64, nu: &[u128]) -> Value {
    json!({ "prime": p.to_string(), "weights": weights_json(weights), "poly": poly, "nu": nu_json(nu) })
}

pub fn nu_text(p: u64, nu: &[u128]) -> String {
    let mut out = format!("p = {p}");
    for (i, v) in nu.iter().enumerate() {
        out.push_str(&format!("\n  nu_{} = {v}", i + 1));
    }
    out
}

pub fn bounds_json(b: &DiffBounds) -> Value {
    json!({ "lower": frac(&b.lower), "upper": frac(&b.upper) })
}

pub fn perturb_json(poly: &str, g: &str, p: u64, r: &PerturbationReport) -> Value {
    json!({
        "prime": p.to_string(),
        "poly": poly,
        "g": g,
        "fpt": frac(&r.fpt_f),
        "certificate": r.certificate.iter().map(provenance_json).collect::<Vec<_>>(),
        "lower_ok": r.lower_ok,
        "upper_ok": r.upper_ok,
        "strict_increase": r.strict_increase,
        "constancy": {
            "high_degree": r.constancy.high_degree,
            "equals_lambda": r.constancy.equals_lambda,
            "integral_truncation": r.constancy.integral_truncation,
        },
        "min_perturbation_degree": r.min_perturbation_degree.to_string(),
        "min_degree_of_g": r.min_degree_of_g.to_string(),
    })
}

pub fn perturb_text(p: u64, r: &PerturbationReport) -> String {
    let upper = match r.upper_ok {
        Some(true) => "fpt(f+g) <= fpt(f)",
        Some(false) => "fpt(f+g) > fpt(f)",
        None => "not decided (fpt(f) is not k/p^L)",
    };
    let certs: Vec<String> = r.certificate.iter().map(ToString::to_string).collect();
    format!(
        "p = {p}  fpt(f) = {}  certificate {}\n  lower bound fpt(f) <= fpt(f+g): {}\n  upper check: {upper}\n  unchanged for every g of degree >= {}: {}\n  fpt(f) = lambda: {}\n  integral truncation: {}\n  smallest degree in g: {}",
        r.fpt_f,
        certs.join(" "),
        r.lower_ok,
        r.min_perturbation_degree,
        r.constancy.high_degree,
        r.constancy.equals_lambda,
        r.constancy.integral_truncation,
        r.min_degree_of_g
    )
}

pub fn verify_json(suite: &str, report: &Report) -> Value {
    json!({
        "suite": suite,
        "passed": report.passed(),
        "checks": report.checks.iter().map(|c| json!({
            "section": c.section,
            "name": c.name,
            "passed": c.passed,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    })
}
