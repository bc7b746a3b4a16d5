//! Input parsing and report construction shared by the subcommands and the
//! verification suite.
//!
//! Exit-code policy: anything wrong with the invocation itself (flags,
//! malformed JSON, unreadable files, bad germ syntax) is a usage error;
//! anything the mathematics rejects (non-lc input, dimension mismatch,
//! excluded loci) is a mathematical error carrying a structured diagnostic.

use std::fs;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Deserialize;
use serde_json::{json, Value};

use mldkit::algebra::{format_rational, parse_rational, AlgebraError, Rational};
use mldkit::blowup::{BlowupError, WeightedBlowup};
use mldkit::canonize::{BoundLedger, CanonizeError, CanonizeTrace, LemmaReport};
use mldkit::classify::{ClassifyError, CrepantCase, CrepantTag};
use mldkit::ideals::{IdealsError, MonomialIdeal, MonomialRIdeal, WeightedHomPoly};
use mldkit::surface::{BlowupSequence, SurfaceError};
use mldkit::valuations::{
    CentreFace, MldOptions, MldReport, Threshold, ToricGerm, ValuationsError,
};

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Math {
        domain: &'static str,
        message: String,
    },
}

impl AppError {
    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Usage(msg) => write!(f, "{msg}"),
            AppError::Math { domain, message } => write!(f, "{domain}: {message}"),
        }
    }
}

macro_rules! math_error_from {
    ($ty:ty, $domain:literal) => {
        impl From<$ty> for AppError {
            fn from(e: $ty) -> Self {
                AppError::Math {
                    domain: $domain,
                    message: e.to_string(),
                }
            }
        }
    };
}

math_error_from!(ValuationsError, "valuations");
math_error_from!(IdealsError, "ideals");
math_error_from!(BlowupError, "blowup");
math_error_from!(SurfaceError, "surface");
math_error_from!(CanonizeError, "canonize");
math_error_from!(ClassifyError, "classify");
math_error_from!(AlgebraError, "algebra");

impl From<serde_json::Error> for AppError {
    fn from(e: serde_json::Error) -> Self {
        // serde_json's message already carries line and column positions.
        AppError::Usage(format!("malformed JSON: {e}"))
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Usage(format!("io error: {e}"))
    }
}

/// An argument that is either inline JSON or a path to a JSON file.
pub fn inline_or_file(arg: &str) -> Result<String, AppError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg)
            .map_err(|e| AppError::Usage(format!("cannot read {arg}: {e}")))
    }
}

/// Germ syntax: `smooth2`, `smooth3`, or `1/r(a_1,...,a_d)`.
pub fn parse_germ(text: &str) -> Result<ToricGerm, AppError> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("smooth") {
        let dim: usize = rest
            .parse()
            .map_err(|_| AppError::usage(format!("bad germ '{t}': expected smooth<d>")))?;
        if !(2..=3).contains(&dim) {
            return Err(AppError::usage(format!(
                "bad germ '{t}': dimension must be 2 or 3"
            )));
        }
        return Ok(ToricGerm::smooth(dim));
    }
    let body = t
        .strip_prefix("1/")
        .and_then(|s| s.strip_suffix(')'))
        .and_then(|s| s.split_once('('))
        .ok_or_else(|| {
            AppError::usage(format!(
                "bad germ '{t}': expected smooth<d> or 1/r(a_1,...,a_d)"
            ))
        })?;
    let r: i64 = body
        .0
        .parse()
        .map_err(|_| AppError::usage(format!("bad germ '{t}': index must be an integer")))?;
    let weights: Vec<i64> = body
        .1
        .split(',')
        .map(|w| {
            w.trim()
                .parse()
                .map_err(|_| AppError::usage(format!("bad germ '{t}': bad weight '{w}'")))
        })
        .collect::<Result<_, _>>()?;
    if r < 1 {
        return Err(AppError::usage(format!("bad germ '{t}': index must be positive")));
    }
    if !(2..=3).contains(&weights.len()) {
        return Err(AppError::usage(format!(
            "bad germ '{t}': dimension must be 2 or 3"
        )));
    }
    Ok(ToricGerm::quotient(r, &weights)?)
}

pub fn parse_rational_arg(text: &str, what: &str) -> Result<Rational, AppError> {
    parse_rational(text.trim())
        .map_err(|e| AppError::usage(format!("bad {what} '{text}': {e}")))
}

/// Centre face given as comma-separated coordinate indices.
pub fn parse_centre(text: &str, dim: usize) -> Result<CentreFace, AppError> {
    let indices: Vec<usize> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| AppError::usage(format!("bad centre index '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    Ok(CentreFace::face(&indices, dim)?)
}

pub fn parse_rideal(arg: &str) -> Result<MonomialRIdeal, AppError> {
    let text = inline_or_file(arg)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Deserialize)]
struct IdealInput {
    dim: usize,
    gens: Vec<Vec<u64>>,
}

/// Plain monomial ideal: `{"dim": d, "gens": [[e,...],...]}`.
pub fn parse_ideal(arg: &str) -> Result<MonomialIdeal, AppError> {
    let text = inline_or_file(arg)?;
    let input: IdealInput = serde_json::from_str(&text)?;
    Ok(MonomialIdeal::new(
        input.dim,
        input
            .gens
            .into_iter()
            .map(|g| g.into_iter().map(BigInt::from).collect())
            .collect(),
    )?)
}

#[derive(Deserialize)]
struct TermInput {
    exp: Vec<u64>,
    coeff: String,
}

#[derive(Deserialize)]
struct PolyInput {
    #[serde(default)]
    weights: Option<Vec<u64>>,
    terms: Vec<TermInput>,
}

/// Weighted homogeneous polynomial with weights `(w1, w2, 1)`:
/// `{"terms": [{"exp": [1,0,1], "coeff": "1"},...]}`. A `weights` field, if
/// present, must match the flags.
pub fn parse_poly(arg: &str, w1: u64, w2: u64) -> Result<WeightedHomPoly, AppError> {
    let text = inline_or_file(arg)?;
    let input: PolyInput = serde_json::from_str(&text)?;
    let weights = vec![w1, w2, 1];
    if let Some(ws) = &input.weights {
        if *ws != weights {
            return Err(AppError::usage(format!(
                "polynomial weights {ws:?} do not match the flags ({w1}, {w2}, 1)"
            )));
        }
    }
    let mut terms = Vec::new();
    for t in input.terms {
        let coeff = parse_rational(&t.coeff)
            .map_err(|e| AppError::usage(format!("bad coefficient '{}': {e}", t.coeff)))?;
        terms.push((
            t.exp.into_iter().map(BigInt::from).collect::<Vec<BigInt>>(),
            coeff,
        ));
    }
    Ok(WeightedHomPoly::new(
        weights.into_iter().map(BigInt::from).collect(),
        terms,
    )?)
}

pub fn parse_weight_list(text: &str) -> Result<Vec<i64>, AppError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| AppError::usage(format!("bad weight entry '{s}'")))
        })
        .collect()
}

/// `MLD_BOX_LIMIT` overrides the enumeration cap of the mld box search.
pub fn box_options_from_env() -> Result<MldOptions, AppError> {
    let mut options = MldOptions::default();
    if let Ok(raw) = std::env::var("MLD_BOX_LIMIT") {
        let limit: u64 = raw.parse().map_err(|_| {
            AppError::usage(format!("MLD_BOX_LIMIT must be a positive integer, got '{raw}'"))
        })?;
        if limit == 0 {
            return Err(AppError::usage("MLD_BOX_LIMIT must be positive"));
        }
        options.box_limit = limit;
        options.initial_box = options.initial_box.min(limit);
    }
    Ok(options)
}

// ---- report builders ----

pub fn rational_value(v: &Rational) -> Value {
    Value::String(format_rational(v))
}

/// Coordinates serialize as JSON integers when integral, strings otherwise.
pub fn coord_value(c: &Rational) -> Value {
    if c.denom().is_one() {
        if let Some(n) = c.numer().to_i64() {
            return json!(n);
        }
    }
    rational_value(c)
}

pub fn coords_value(coords: &[Rational]) -> Value {
    Value::Array(coords.iter().map(coord_value).collect())
}

pub fn bigint_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => Value::String(n.to_string()),
    }
}

pub fn mld_report_value(report: &MldReport) -> Value {
    json!({
        "value": report.value.to_string(),
        "witness": report.witness.as_ref().map(|w| coords_value(w.weight().coords())),
        "certified": report.certified,
    })
}

pub fn threshold_value(t: &Threshold) -> Value {
    match t {
        Threshold::Finite(v) => json!({ "value": format_rational(v) }),
        Threshold::Infinite => json!({ "value": "inf" }),
    }
}

pub fn blowup_value(bl: &WeightedBlowup) -> Value {
    let charts: Vec<Value> = bl
        .charts()
        .iter()
        .map(|c| {
            json!({
                "coordinate": c.coordinate(),
                "germ": c.germ().to_string(),
                "index": bigint_value(c.germ().index()),
            })
        })
        .collect();
    json!({
        "source": bl.source().to_string(),
        "weight": coords_value(bl.weight().weight().coords()),
        "a_value": rational_value(&bl.weight().weight().coordinate_sum()),
        "exceptional": bl.exceptional().to_string(),
        "charts": charts,
    })
}

pub fn tower_value(vectors: &[Vec<BigInt>]) -> Value {
    Value::Array(
        vectors
            .iter()
            .map(|v| Value::Array(v.iter().map(bigint_value).collect()))
            .collect(),
    )
}

pub fn sequence_value(seq: &BlowupSequence) -> Value {
    let steps: Vec<Value> = seq
        .steps
        .iter()
        .map(|s| {
            json!({
                "valuation": coords_value(s.valuation.coords()),
                "a_value": rational_value(&s.a_value),
                "chart": s.chart_choice,
            })
        })
        .collect();
    json!({
        "rescale": seq.rescale.as_ref().map(|r| format_rational(r)),
        "target": rational_value(&seq.target),
        "steps": steps,
    })
}

pub fn ideal_value(ideal: &MonomialIdeal) -> Value {
    json!({
        "dim": ideal.dim(),
        "gens": ideal
            .generators()
            .iter()
            .map(|g| Value::Array(g.iter().map(bigint_value).collect()))
            .collect::<Vec<Value>>(),
    })
}

pub fn ledger_value(ledger: &BoundLedger) -> Value {
    json!({
        "epsilon": rational_value(&ledger.epsilon),
        "r_bound": rational_value(&ledger.r_bound),
        "c_bound": rational_value(&ledger.c_bound),
        "l_bound": rational_value(&ledger.l_bound),
        "empirical_gap": ledger.empirical_gap.as_ref().map(|g| format_rational(g)),
        "observed_index": bigint_value(&ledger.observed_index),
        "observed_discrepancy": rational_value(&ledger.observed_discrepancy),
        "sound": ledger.sound,
    })
}

pub fn lemma_value(report: &LemmaReport) -> Value {
    json!({
        "pass": report.pass(),
        "monotone_violations": report.monotone_violations,
        "crepant_bound_violations": report.crepant_bound_violations,
        "strict_bound_violations": report.strict_bound_violations,
        "ratio_bound_violations": report.ratio_bound_violations,
    })
}

pub fn canonize_report_value(
    trace: &CanonizeTrace,
    ledger: &BoundLedger,
    lemmas: &LemmaReport,
) -> Value {
    json!({
        "termination": trace.termination.to_string(),
        "steps": trace.steps.len(),
        "initial_mld": rational_value(&trace.initial_mld),
        "preserved_mld": rational_value(&trace.preserved_mld),
        "tracked": coords_value(trace.tracked.coords()),
        "output_germ": trace.output_germ.to_string(),
        "output_centre": trace.output_centre.support().iter().collect::<Vec<_>>(),
        "ledger": ledger_value(ledger),
        "lemmas": lemma_value(lemmas),
    })
}

pub fn canonize_trace_value(
    trace: &CanonizeTrace,
    ledger: &BoundLedger,
    lemmas: &LemmaReport,
    epsilon: &Rational,
) -> Result<Value, AppError> {
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "germ": s.germ.to_string(),
                "index": bigint_value(&s.index),
                "weak_ideal": ideal_value(&s.weak_ideal),
                "q_i": rational_value(&s.q_i),
                "chart_weight": coords_value(s.chart_weight.coords()),
                "global_weight": coords_value(s.global_weight.coords()),
                "a_original": rational_value(&s.a_original),
                "delta": s.delta.iter().map(rational_value).collect::<Vec<Value>>(),
                "exceptional_order": rational_value(&s.exceptional_order),
            })
        })
        .collect();
    Ok(json!({
        "ideal": ideal_value(&trace.ideal),
        "q": rational_value(&trace.q),
        "epsilon": rational_value(epsilon),
        "initial_mld": rational_value(&trace.initial_mld),
        "tracked": coords_value(trace.tracked.coords()),
        "steps": steps,
        "termination": trace.termination.to_string(),
        "output": {
            "germ": trace.output_germ.to_string(),
            "ideal": serde_json::to_value(&trace.output_ideal)?,
            "centre": trace.output_centre.support().iter().collect::<Vec<_>>(),
            "delta": trace.output_delta.iter().map(rational_value).collect::<Vec<Value>>(),
            "preserved_mld": rational_value(&trace.preserved_mld),
        },
        "ledger": ledger_value(ledger),
        "lemmas": lemma_value(lemmas),
    }))
}

pub fn poly_value(poly: &WeightedHomPoly) -> Value {
    let terms: Vec<Value> = poly
        .terms()
        .map(|(e, c)| {
            json!({
                "exp": e.iter().map(bigint_value).collect::<Vec<Value>>(),
                "coeff": format_rational(c),
            })
        })
        .collect();
    json!({
        "display": poly.to_string(),
        "terms": terms,
    })
}

pub fn classify_value(case: &CrepantCase) -> Value {
    let (tag, p, q) = match case.tag {
        CrepantTag::ExceptionalDivisor => ("exceptional-divisor", None, None),
        CrepantTag::HypersurfaceCurve { p, q } => ("hypersurface-curve", Some(p), Some(q)),
        CrepantTag::SaturatedCurve => ("saturated-curve", None, None),
    };
    json!({
        "tag": tag,
        "weights": [case.weights.0, case.weights.1],
        "p": p,
        "q": q,
        "substitutions": case.substitutions,
        "normal_form": case.normal_form.as_ref().map(poly_value),
    })
}

/// Structural validation of an emitted report against the published schema
/// (docs/schema.json). Returns the violations found; empty means the report
/// re-parses cleanly.
pub fn validate_report(kind: &str, report: &Value) -> Vec<String> {
    let mut bad = Vec::new();
    let obj = match report.as_object() {
        Some(o) => o,
        None => return vec![format!("{kind}: report is not an object")],
    };
    let mut need = |key: &str, pred: &dyn Fn(&Value) -> bool, desc: &str| {
        match obj.get(key) {
            Some(v) if pred(v) => {}
            Some(_) => bad.push(format!("{kind}.{key}: expected {desc}")),
            None => bad.push(format!("{kind}.{key}: missing")),
        }
    };
    let is_rational = |v: &Value| {
        v.as_str().is_some_and(|s| {
            let core = s.strip_prefix('-').unwrap_or(s);
            match core.split_once('/') {
                Some((p, q)) => {
                    !p.is_empty()
                        && !q.is_empty()
                        && p.chars().all(|c| c.is_ascii_digit())
                        && q.chars().all(|c| c.is_ascii_digit())
                }
                None => !core.is_empty() && core.chars().all(|c| c.is_ascii_digit()),
            }
        })
    };
    let is_value_string = |v: &Value| {
        is_rational(v) || v.as_str() == Some("-inf") || v.as_str() == Some("inf")
    };
    let is_coords = |v: &Value| {
        v.as_array().is_some_and(|a| {
            a.iter().all(|c| c.is_i64() || is_rational(c))
        })
    };
    match kind {
        "mld" => {
            need("value", &is_value_string, "rational string or -inf");
            need(
                "witness",
                &|v| v.is_null() || is_coords(v),
                "coordinate array or null",
            );
            need("certified", &Value::is_boolean, "boolean");
        }
        "threshold" => {
            need("value", &is_value_string, "rational string or inf");
        }
        "blowup" => {
            need("source", &|v| v.is_string(), "string");
            need("weight", &is_coords, "coordinate array");
            need("a_value", &is_rational, "rational string");
            need("exceptional", &|v| v.is_string(), "string");
            need(
                "charts",
                &|v| {
                    v.as_array().is_some_and(|a| {
                        a.iter().all(|c| {
                            c.get("coordinate").is_some_and(|x| x.is_u64())
                                && c.get("germ").is_some_and(|x| x.is_string())
                        })
                    })
                },
                "chart array",
            );
        }
        "tower" => {
            need(
                "tower",
                &|v| {
                    v.as_array().is_some_and(|a| {
                        a.iter().all(|row| {
                            row.as_array()
                                .is_some_and(|r| r.iter().all(|x| x.is_i64()))
                        })
                    })
                },
                "array of integer vectors",
            );
        }
        "surface-mld" => {
            need(
                "weights",
                &|v| v.as_array().is_some_and(|a| a.len() == 2),
                "weight pair",
            );
            need("value", &is_value_string, "rational string or -inf");
            need("certified", &Value::is_boolean, "boolean");
        }
        "canonize" => {
            need("termination", &|v| v.is_string(), "string");
            need("steps", &Value::is_u64, "count");
            need("initial_mld", &is_rational, "rational string");
            need("preserved_mld", &is_rational, "rational string");
            need(
                "ledger",
                &|v| v.get("sound").is_some_and(|s| s.is_boolean()),
                "ledger object",
            );
            need(
                "lemmas",
                &|v| v.get("pass").is_some_and(|s| s.is_boolean()),
                "lemma object",
            );
        }
        "classify" => {
            need("tag", &|v| v.is_string(), "string");
            need(
                "weights",
                &|v| v.as_array().is_some_and(|a| a.len() == 2),
                "weight pair",
            );
            need(
                "substitutions",
                &|v| v.as_array().is_some_and(|a| a.iter().all(Value::is_string)),
                "string array",
            );
        }
        "error" => {
            need(
                "error",
                &|v| {
                    v.get("domain").is_some_and(|d| d.is_string())
                        && v.get("message").is_some_and(|m| m.is_string())
                },
                "diagnostic object",
            );
        }
        other => bad.push(format!("unknown report kind {other}")),
    }
    bad
}
