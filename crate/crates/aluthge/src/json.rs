//! JSON encodings of charges and reports. Rationals are strings `"p/q"`.

use aluthge_core::families::{describe, FamilyInstance, FamilyParams, ScanResult};
use aluthge_core::measure::{AtomicCharge, Exponent, LatticeBase, MeasureError};
use aluthge_core::rational::{parse_rational, to_fraction_string, Rational};
use aluthge_core::shifts::{BergerRecovery, DiagramReport, RecoveryError, Verdict};
use aluthge_core::sqrt::{Fiber, PositiveSqrt, SignVerdict, SqrtCertificate};
use aluthge_core::suites::{SuiteReport, Violation};
use serde_json::{json, Value};

use crate::expr::print_measure;

pub fn rational(q: &Rational) -> Value {
    Value::String(to_fraction_string(q))
}

pub fn rationals<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> Value {
    Value::Array(qs.into_iter().map(rational).collect())
}

pub fn exponent(e: Exponent) -> Value {
    Value::String(e.to_string())
}

/// `{"lambda", "refinement", "mass0", "terms": [[exponent, coefficient]], "expr"}`.
/// `expr` is null when some atom is irrational.
/// Written at the coarsest lattice refinement that carries the charge.
pub fn charge(mu: &AtomicCharge) -> Value {
    let coarse = mu.with_refinement(mu.minimal_refinement());
    let mu = coarse.as_ref().unwrap_or(mu);
    json!({
        "lambda": rational(mu.lambda()),
        "refinement": mu.refinement(),
        "mass0": rational(mu.mass_at_zero()),
        "terms": mu.terms().map(|(e, c)| json!([exponent(e), rational(c)])).collect::<Vec<_>>(),
        "expr": print_measure(mu).ok(),
    })
}

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("missing or malformed field `{0}`")]
    Field(&'static str),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

fn parse_exponent(text: &str) -> Option<Exponent> {
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.parse::<i64>().ok()?, d.parse::<u64>().ok()?),
        None => (text.parse().ok()?, 1),
    };
    if !d.is_power_of_two() {
        return None;
    }
    Some(Exponent::from_ticks(n, d.trailing_zeros()))
}

/// Inverse of [`charge`]; `expr` is ignored.
pub fn charge_from_json(v: &Value) -> Result<AtomicCharge, DecodeError> {
    let rat = |key: &'static str| {
        v.get(key)
            .and_then(Value::as_str)
            .and_then(parse_rational)
            .ok_or(DecodeError::Field(key))
    };
    let lambda = rat("lambda")?;
    let m0 = rat("mass0")?;
    let s = v
        .get("refinement")
        .and_then(Value::as_u64)
        .and_then(|s| u32::try_from(s).ok())
        .ok_or(DecodeError::Field("refinement"))?;
    let base = LatticeBase::new(lambda, s)?;
    let mut terms = Vec::new();
    for t in v.get("terms").and_then(Value::as_array).ok_or(DecodeError::Field("terms"))? {
        let pair = t.as_array().filter(|p| p.len() == 2).ok_or(DecodeError::Field("terms"))?;
        let e = pair[0]
            .as_str()
            .and_then(parse_exponent)
            .and_then(|e| e.ticks_at(s))
            .ok_or(DecodeError::Field("terms"))?;
        let c = pair[1].as_str().and_then(parse_rational).ok_or(DecodeError::Field("terms"))?;
        terms.push((e, c));
    }
    Ok(AtomicCharge::from_ticks(base, m0, terms)?)
}

pub fn sign_verdict(v: SignVerdict) -> Value {
    Value::String(
        match v {
            SignVerdict::ConstantSign => "constant_sign",
            SignVerdict::MixedSign => "mixed_sign",
        }
        .into(),
    )
}

pub fn certificate(c: &SqrtCertificate) -> Value {
    json!({
        "root": charge(&c.root),
        "scalar": rational(&c.scalar),
        "sign_verdict": sign_verdict(c.sign_verdict),
        "exact_root": c.exact_root().as_ref().map(charge),
    })
}

pub fn verdict(v: Verdict) -> Value {
    match v {
        Verdict::True => Value::Bool(true),
        Verdict::False => Value::Bool(false),
        Verdict::Undecided => Value::String("undecided".into()),
    }
}

fn positive_sqrt(p: &PositiveSqrt) -> Value {
    json!({
        "monic": charge(&p.monic),
        "scalar": rational(&p.scalar),
        "exact": p.exact.as_ref().map(charge),
    })
}

pub fn diagram(r: &DiagramReport) -> Value {
    json!({
        "w_alpha_subnormal": r.w_alpha_subnormal,
        "sqrt_shift_subnormal": verdict(r.sqrt_shift_subnormal),
        "aluthge_subnormal": verdict(r.aluthge_subnormal),
        "mass_at_zero_stripped": rational(&r.mass_at_zero),
        "witnesses": {
            "sqrt_shift": r.sqrt_witness.as_ref().map(positive_sqrt),
            "aluthge": r.aluthge_witness.as_ref().map(positive_sqrt),
        },
        "implication_violations": r.implication_violations,
        "notes": r.notes,
    })
}

pub fn family_params(p: &FamilyParams) -> Value {
    match p {
        FamilyParams::Ex51 { lambda, x } => json!({
            "family": "ex51", "lambda": rational(lambda), "x": rational(x),
        }),
        FamilyParams::Ex52 { lambda, alpha, beta } => json!({
            "family": "ex52", "lambda": rational(lambda),
            "alpha": rational(alpha), "beta": rational(beta),
        }),
        FamilyParams::Ex61 { lambda, b } => json!({
            "family": "ex61", "lambda": rational(lambda), "b": rationals(b.iter()),
        }),
    }
}

pub fn family_instance(inst: &FamilyInstance) -> Value {
    json!({
        "params": family_params(&inst.params),
        "label": describe(&inst.params),
        "nu": charge(&inst.nu),
        "mu": charge(&inst.mu),
        "nu_t_nu": charge(&inst.nu_t_nu),
        "mu_positive": inst.mu_positive,
        "nu_t_nu_positive": inst.nu_t_nu_positive,
        "p": inst.p,
        "p_predicted": inst.p_predicted,
        "xx": inst.xx,
        "region_predicted": inst.region_predicted,
        "region_consistent": inst.region_consistent,
        "mu_has_positive_sqrt": verdict(inst.diagram.sqrt_shift_subnormal),
        "mu_t_mu_has_positive_sqrt": verdict(inst.diagram.aluthge_subnormal),
        "counterexample": inst.counterexample,
    })
}

pub fn scan(r: &ScanResult, elapsed_ms: u128) -> Value {
    json!({
        "evaluated": r.evaluated,
        "confirmed": r.confirmed.iter().map(|(i, inst)| {
            let mut v = family_instance(inst);
            v["index"] = json!(i);
            v
        }).collect::<Vec<_>>(),
        "errors": r.errors.iter().map(|(i, e)| json!({"index": i, "error": e.to_string()})).collect::<Vec<_>>(),
        "elapsed_ms": elapsed_ms,
    })
}

fn violation(v: &Violation) -> Value {
    json!({
        "trial": v.trial,
        "rule": v.rule.name(),
        "nu": charge(&v.nu),
        "detail": v.detail,
    })
}

pub fn suite(r: &SuiteReport, elapsed_ms: u128) -> Value {
    json!({
        "suite": r.kind.name(),
        "trials": r.trials,
        "seed": r.seed,
        "accepted": r.accepted,
        "attempts": r.attempts,
        "mixed_sign_accepted": r.mixed_sign_accepted,
        "violations": r.violations.iter().map(violation).collect::<Vec<_>>(),
        "elapsed_ms": elapsed_ms,
    })
}

pub fn recovery(r: &BergerRecovery) -> Value {
    json!({
        "charge": charge(&r.charge),
        "recurrence": rationals(&r.recurrence),
        "atoms": r.atoms.iter().map(|(x, w)| json!([rational(x), rational(w)])).collect::<Vec<_>>(),
        "subnormal": r.subnormal,
    })
}

/// Extra payload for recovery failures that carry data.
pub fn recovery_error_data(e: &RecoveryError) -> Option<Value> {
    match e {
        RecoveryError::IrrationalAtom {
            recurrence,
            approx_roots,
        } => Some(json!({
            "recurrence": rationals(recurrence),
            "approx_roots": approx_roots.iter().map(|(re, im)| json!([re, im])).collect::<Vec<_>>(),
            "exact": false,
        })),
        _ => None,
    }
}

pub fn fibers(fs: &[Fiber]) -> Value {
    Value::Array(
        fs.iter()
            .map(|f| {
                json!({
                    "exponent": exponent(f.exponent),
                    "pairs": f.pairs,
                    "cardinality": f.cardinality(),
                    "uniquely_represented": f.is_uniquely_represented(),
                })
            })
            .collect(),
    )
}
