//! Randomized property suites over charges `ν` with `ν*ν ≥ 0` and
//! `ν*tν ≥ 0`.
//!
//! Each trial draws proposals from its own stream (see [`trial_rng`]) until
//! one is accepted or [`MAX_ATTEMPTS`] is reached. Proposals are tested for
//! positivity of `ν*ν` first and of `ν*tν` second.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;

use num_traits::Zero;
use rand::Rng;

use crate::measure::{AtomicCharge, MeasureError};
use crate::sampling::{
    progression_exponents, random_charge, random_coefficient, random_lambda, random_positive_coefficient,
    trial_rng, SignMode,
};
use crate::sqrt::gamma_fibers;

pub const MAX_ATTEMPTS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteKind {
    SignConstancy,
    Lemmas,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::SignConstancy => "thm44",
            SuiteKind::Lemmas => "lemmas",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    /// Accepted `ν` with at most four atoms must have constant sign.
    SignConstancy,
    /// An atom `λ_k²` whose fiber has at most three pairs carries mass.
    DiagonalAtom,
    /// `q ≥ 4 ⇒ p ≥ 6`.
    AtomBoundFour,
    /// `q ≥ 5 ⇒ p ≥ 7`.
    AtomBoundFive,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::SignConstancy => "sign_constancy",
            Rule::DiagonalAtom => "diagonal_atom",
            Rule::AtomBoundFour => "q4_p6",
            Rule::AtomBoundFive => "q5_p7",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub trial: u64,
    pub rule: Rule,
    pub nu: AtomicCharge,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub accepted: bool,
    pub attempts: u32,
    pub mixed_sign: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub kind: SuiteKind,
    pub trials: u64,
    pub seed: u64,
    pub accepted: u64,
    pub attempts: u64,
    /// Accepted samples whose `ν` has mixed signs.
    pub mixed_sign_accepted: u64,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    /// Aggregates outcomes given in any order; violations end up sorted by
    /// trial and rule.
    pub fn aggregate(
        kind: SuiteKind,
        seed: u64,
        outcomes: impl IntoIterator<Item = TrialOutcome>,
    ) -> Self {
        let mut r = SuiteReport {
            kind,
            trials: 0,
            seed,
            accepted: 0,
            attempts: 0,
            mixed_sign_accepted: 0,
            violations: Vec::new(),
        };
        for o in outcomes {
            r.trials += 1;
            r.attempts += u64::from(o.attempts);
            if o.accepted {
                r.accepted += 1;
                r.mixed_sign_accepted += u64::from(o.mixed_sign);
            }
            r.violations.extend(o.violations);
        }
        r.violations.sort_by_key(|v| (v.trial, v.rule));
        r
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn accepts(nu: &AtomicCharge) -> Result<Option<AtomicCharge>, MeasureError> {
    let mu = nu.convolve(nu)?;
    if !mu.is_positive() {
        return Ok(None);
    }
    let nu_t_nu = nu.convolve(&nu.scale_by_t()?)?;
    Ok(nu_t_nu.is_positive().then_some(mu))
}

fn propose<R: Rng + ?Sized>(rng: &mut R, q: usize) -> Result<AtomicCharge, MeasureError> {
    match rng.gen_range(0..3) {
        0 => random_charge(rng, q, 1, 2 * q as i64 + 2, SignMode::Uniform),
        1 => random_charge(rng, q, 1, 2 * q as i64 + 2, SignMode::InteriorDip),
        _ => {
            let lambda = random_lambda(rng);
            let exps = progression_exponents(rng, q);
            let dip = if q >= 3 { rng.gen_range(1..q - 1) } else { usize::MAX };
            let terms: Vec<_> = exps
                .into_iter()
                .enumerate()
                .map(|(k, e)| {
                    let c = if k == dip {
                        -random_positive_coefficient(rng) / crate::rational::int(rng.gen_range(1..=5))
                    } else if rng.gen_bool(0.1) {
                        random_coefficient(rng)
                    } else {
                        random_positive_coefficient(rng)
                    };
                    (e, c)
                })
                .collect();
            AtomicCharge::on_integer_lattice(lambda, terms)
        }
    }
}

fn run_trial<F>(seed: u64, index: u64, qs: (usize, usize), check: F) -> TrialOutcome
where
    F: Fn(&AtomicCharge, &AtomicCharge) -> Vec<(Rule, String)>,
{
    let mut rng = trial_rng(seed, index);
    for attempt in 1..=MAX_ATTEMPTS {
        let q = rng.gen_range(qs.0..=qs.1);
        let nu = match propose(&mut rng, q) {
            Ok(nu) => nu,
            Err(_) => continue,
        };
        if let Ok(Some(mu)) = accepts(&nu) {
            let violations = check(&nu, &mu)
                .into_iter()
                .map(|(rule, detail)| Violation {
                    trial: index,
                    rule,
                    nu: nu.clone(),
                    detail,
                })
                .collect();
            return TrialOutcome {
                trial: index,
                accepted: true,
                attempts: attempt,
                mixed_sign: !nu.has_constant_sign(),
                violations,
            };
        }
    }
    TrialOutcome {
        trial: index,
        accepted: false,
        attempts: MAX_ATTEMPTS,
        mixed_sign: false,
        violations: Vec::new(),
    }
}

/// One trial of the sign-constancy suite: `ν` with 2 to 4 atoms.
pub fn sign_constancy_trial(seed: u64, index: u64) -> TrialOutcome {
    run_trial(seed, index, (2, 4), |nu, _| {
        if nu.has_constant_sign() {
            Vec::new()
        } else {
            alloc::vec![(Rule::SignConstancy, format!("{} atoms, mixed signs", nu.len()))]
        }
    })
}

/// Checks of the diagonal-atom and atom-count lemmas on an accepted `ν`.
pub fn lemma_checks(nu: &AtomicCharge, mu: &AtomicCharge) -> Vec<(Rule, String)> {
    let mut out = Vec::new();
    let ticks: Vec<i64> = nu.ticks().map(|(t, _)| t).collect();
    let fibers = gamma_fibers(nu);
    for (k, t) in ticks.iter().enumerate() {
        let fiber = fibers
            .iter()
            .find(|f| f.exponent == crate::measure::Exponent::from_ticks(2 * t, nu.refinement()))
            .expect("diagonal fiber exists");
        if fiber.cardinality() <= 3 && mu.coefficient_at(fiber.exponent).is_zero() {
            out.push((
                Rule::DiagonalAtom,
                format!("atom {k}: fiber of size {} but zero mass", fiber.cardinality()),
            ));
        }
    }
    let (q, p) = (nu.len(), mu.support_size());
    if q >= 4 && p < 6 {
        out.push((Rule::AtomBoundFour, format!("q = {q}, p = {p}")));
    }
    if q >= 5 && p < 7 {
        out.push((Rule::AtomBoundFive, format!("q = {q}, p = {p}")));
    }
    out
}

/// One trial of the lemma suite: `ν` with 4 to 7 atoms.
pub fn lemma_trial(seed: u64, index: u64) -> TrialOutcome {
    run_trial(seed, index, (4, 7), lemma_checks)
}

pub fn trial(kind: SuiteKind, seed: u64, index: u64) -> TrialOutcome {
    match kind {
        SuiteKind::SignConstancy => sign_constancy_trial(seed, index),
        SuiteKind::Lemmas => lemma_trial(seed, index),
    }
}

/// Sequential run; the `aluthge` crate provides a parallel one with the
/// same output.
pub fn run_suite(kind: SuiteKind, trials: u64, seed: u64) -> SuiteReport {
    SuiteReport::aggregate(kind, seed, (0..trials).map(|i| trial(kind, seed, i)))
}
