//! Weighted shifts: weights and moments, Aluthge weights, recovery of a
//! finitely atomic Berger measure from a moment prefix, and the diagram of
//! subnormality verdicts for `W_α`, `W_√α` and the Aluthge transform.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::format;

use num_traits::{One, Signed, Zero};

use crate::linalg::{approximate_roots, rational_roots, solve_consistent, symmetric_eigenvalues};
use crate::measure::{AtomicCharge, MeasureError, MomentSequence};
use crate::rational::{exact_sqrt, ln_abs, pow, to_f64, Rational};
use crate::sqrt::{positive_sqrt, PositiveSqrt, SqrtError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShiftError {
    #[error("moment γ_{0} is not positive")]
    NonpositiveMoment(usize),
    #[error("weight α_{0}² is not positive")]
    NonpositiveWeight(usize),
    #[error("at least two weights are required")]
    TooShort,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecoveryError {
    #[error("need at least {needed} moments, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("all moments vanish")]
    ZeroSequence,
    #[error("no linear recurrence fits the available moments")]
    RecurrenceFailure,
    #[error("characteristic polynomial has irrational roots")]
    IrrationalAtom {
        recurrence: Vec<Rational>,
        approx_roots: Vec<(f64, f64)>,
    },
    #[error("characteristic polynomial has a repeated root; the sequence is not finitely atomic")]
    RepeatedRoot,
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Squared weights `α_n²` (the weights themselves are usually irrational).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSequence {
    squared: Vec<Rational>,
}

impl WeightSequence {
    pub fn new(squared: Vec<Rational>) -> Result<Self, ShiftError> {
        if let Some(i) = squared.iter().position(|w| !w.is_positive()) {
            return Err(ShiftError::NonpositiveWeight(i));
        }
        Ok(WeightSequence { squared })
    }

    pub fn squared_weights(&self) -> &[Rational] {
        &self.squared
    }

    pub fn len(&self) -> usize {
        self.squared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squared.is_empty()
    }

    /// `sup α_n²` over the prefix, the estimate of `‖W_α‖²`.
    pub fn norm_squared_estimate(&self) -> Option<&Rational> {
        self.squared.iter().max()
    }

    /// `γ_0 = 1, γ_k = α_0²⋯α_{k−1}²`.
    pub fn moments(&self) -> MomentSequence {
        let mut gammas = Vec::with_capacity(self.squared.len() + 1);
        let mut acc = Rational::one();
        gammas.push(acc.clone());
        for w in &self.squared {
            acc *= w;
            gammas.push(acc.clone());
        }
        MomentSequence::new(gammas)
    }
}

/// `α_n² = γ_{n+1} / γ_n`.
pub fn moments_to_squared_weights(g: &MomentSequence) -> Result<WeightSequence, ShiftError> {
    let gammas = g.as_slice();
    if let Some(i) = gammas.iter().position(|x| !x.is_positive()) {
        return Err(ShiftError::NonpositiveMoment(i));
    }
    WeightSequence::new(gammas.windows(2).map(|w| &w[1] / &w[0]).collect())
}

/// One Aluthge weight `α̃_n² = α_n·α_{n+1}`. Its square
/// `α_n²·α_{n+1}²` is always rational; `squared` is filled in only when
/// that square has a rational square root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AluthgeWeight {
    pub fourth_power: Rational,
    pub squared: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AluthgeWeights {
    pub entries: Vec<AluthgeWeight>,
}

impl AluthgeWeights {
    /// `γ̃_n²` for `n = 0..=len`; exact because it is a product of the
    /// rational fourth powers.
    pub fn moments_squared(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.entries.len() + 1);
        let mut acc = Rational::one();
        out.push(acc.clone());
        for w in &self.entries {
            acc *= &w.fourth_power;
            out.push(acc.clone());
        }
        out
    }
}

pub fn aluthge_squared_weights(w: &WeightSequence) -> Result<AluthgeWeights, ShiftError> {
    if w.len() < 2 {
        return Err(ShiftError::TooShort);
    }
    let entries = w
        .squared
        .windows(2)
        .map(|p| {
            let fourth_power = &p[0] * &p[1];
            let squared = exact_sqrt(&fourth_power);
            AluthgeWeight {
                fourth_power,
                squared,
            }
        })
        .collect();
    Ok(AluthgeWeights { entries })
}

/// A recovered finitely atomic representing charge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BergerRecovery {
    pub charge: AtomicCharge,
    /// `c_0..c_{d−1}` with `γ_{n+d} = Σ c_i γ_{n+i}`.
    pub recurrence: Vec<Rational>,
    /// `(atom, density)` in increasing atom order.
    pub atoms: Vec<(Rational, Rational)>,
    /// All densities positive and all atoms non-negative.
    pub subnormal: bool,
}

/// Minimal linear recurrence supported by at least one surplus equation.
fn minimal_recurrence(gammas: &[Rational]) -> Option<Vec<Rational>> {
    let n = gammas.len();
    let mut d = 1;
    while n > 2 * d {
        let rows = n - d;
        let a: Vec<Vec<Rational>> = (0..rows)
            .map(|r| gammas[r..r + d].to_vec())
            .collect();
        let b: Vec<Rational> = (0..rows).map(|r| gammas[r + d].clone()).collect();
        if let Some(c) = solve_consistent(&a, &b) {
            return Some(c);
        }
        d += 1;
    }
    None
}

/// Recovers the finitely atomic charge whose moments are `g`.
pub fn berger_recover(g: &MomentSequence) -> Result<BergerRecovery, RecoveryError> {
    let gammas = g.as_slice();
    if gammas.len() < 3 {
        return Err(RecoveryError::TooShort {
            needed: 3,
            got: gammas.len(),
        });
    }
    if gammas.iter().all(Zero::is_zero) {
        return Err(RecoveryError::ZeroSequence);
    }
    let recurrence = minimal_recurrence(gammas).ok_or(RecoveryError::RecurrenceFailure)?;
    let d = recurrence.len();

    // x^d − Σ c_i x^i, constant term first.
    let mut poly: Vec<Rational> = recurrence.iter().map(|c| -c).collect();
    poly.push(Rational::one());
    let (mut roots, rest) = rational_roots(&poly);
    if rest.len() > 1 {
        let approx = approximate_roots(&poly.iter().map(to_f64).collect::<Vec<_>>());
        return Err(RecoveryError::IrrationalAtom {
            recurrence,
            approx_roots: approx.iter().map(|z| (z.re, z.im)).collect(),
        });
    }
    roots.sort();
    if roots.windows(2).any(|w| w[0] == w[1]) {
        return Err(RecoveryError::RepeatedRoot);
    }

    // Vandermonde system Σ_k w_k x_k^n = γ_n, n < d (0^0 = 1).
    let vander: Vec<Vec<Rational>> = (0..d)
        .map(|n| roots.iter().map(|x| pow(x, n as u64)).collect())
        .collect();
    let weights = solve_consistent(&vander, &gammas[..d]).ok_or(RecoveryError::RecurrenceFailure)?;

    let atoms: Vec<(Rational, Rational)> = roots.into_iter().zip(weights).collect();
    let charge = AtomicCharge::from_atoms(&atoms)?;
    let subnormal = atoms
        .iter()
        .all(|(x, w)| w.is_positive() && !x.is_negative());
    Ok(BergerRecovery {
        charge,
        recurrence,
        atoms,
        subnormal,
    })
}

/// Double-precision Hankel positivity test on a moment prefix: both
/// `[γ_{i+j}]` and `[γ_{i+j+1}]` (order ≤ 12) must have minimal eigenvalue
/// ≥ −1e−8. Each matrix is first brought to unit diagonal by the congruence
/// `H ↦ D·H·D`, `D = diag(H_ii^{−1/2})`, which keeps the inertia. Entries
/// are formed from the exact moments in the log domain, so large moments
/// neither overflow nor swamp the small atoms. A negative diagonal entry
/// is reported as the minimal eigenvalue.
pub fn hankel_psd(gammas: &[Rational]) -> HankelCheck {
    const MAX_ORDER: usize = 12;
    const THRESHOLD: f64 = -1e-8;
    let order = (gammas.len() / 2).min(MAX_ORDER);
    let logs: Vec<f64> = gammas.iter().map(ln_abs).collect();

    let min_eig = |shift: usize, k: usize| -> f64 {
        if k == 0 {
            return 0.0;
        }
        let diag = |i: usize| &gammas[2 * i + shift];
        if let Some(i) = (0..k).find(|&i| diag(i).is_negative()) {
            return to_f64(diag(i));
        }
        let active: Vec<usize> = (0..k).filter(|&i| !diag(i).is_zero()).collect();
        // a zero diagonal entry forces its row to vanish in a PSD matrix
        for i in (0..k).filter(|i| diag(*i).is_zero()) {
            if (0..k).any(|j| !gammas[i + j + shift].is_zero()) {
                return f64::NEG_INFINITY;
            }
        }
        let m: Vec<Vec<f64>> = active
            .iter()
            .map(|&i| {
                active
                    .iter()
                    .map(|&j| {
                        let g = &gammas[i + j + shift];
                        if g.is_zero() {
                            return 0.0;
                        }
                        let mag = libm::exp(
                            logs[i + j + shift] - 0.5 * (logs[2 * i + shift] + logs[2 * j + shift]),
                        );
                        if g.is_negative() {
                            -mag
                        } else {
                            mag
                        }
                    })
                    .collect()
            })
            .collect();
        symmetric_eigenvalues(&m).into_iter().fold(0.0, f64::min)
    };
    // order ≤ len/2 leaves room for γ_{2k−1}
    let min_eig_h0 = min_eig(0, order);
    let min_eig_h1 = min_eig(1, order);
    HankelCheck {
        order,
        min_eig_h0,
        min_eig_h1,
        positive: min_eig_h0 >= THRESHOLD && min_eig_h1 >= THRESHOLD,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelCheck {
    pub order: usize,
    pub min_eig_h0: f64,
    pub min_eig_h1: f64,
    pub positive: bool,
}

/// Outcome of one subnormality question in the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    /// No root on the once-refined lattice; the solver cannot decide.
    Undecided,
}

impl Verdict {
    pub fn is_true(self) -> bool {
        self == Verdict::True
    }
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramReport {
    pub w_alpha_subnormal: bool,
    pub sqrt_shift_subnormal: Verdict,
    pub aluthge_subnormal: Verdict,
    /// Mass at zero removed before the root questions (root existence does
    /// not depend on it).
    pub mass_at_zero: Rational,
    pub sqrt_witness: Option<PositiveSqrt>,
    pub aluthge_witness: Option<PositiveSqrt>,
    pub implication_violations: Vec<String>,
    pub notes: Vec<String>,
}

fn root_verdict(
    mu: &AtomicCharge,
    notes: &mut Vec<String>,
    label: &str,
) -> Result<(Verdict, Option<PositiveSqrt>), SqrtError> {
    match positive_sqrt(mu) {
        Ok(Some(root)) => Ok((Verdict::True, Some(root))),
        Ok(None) => Ok((Verdict::False, None)),
        Err(SqrtError::NegativeLeading(_)) => {
            notes.push(format!("{label}: smallest atom has negative mass"));
            Ok((Verdict::False, None))
        }
        Err(e @ (SqrtError::NoLatticeSqrt | SqrtError::RefinementLimit(_))) => {
            notes.push(format!("{label}: {e}"));
            Ok((Verdict::Undecided, None))
        }
        Err(e) => Err(e),
    }
}

/// Decides the three subnormality questions attached to `mu` and checks
/// the two implications `W_√α ⇒ W̃_α` and `W_√α ⇒ W_α`.
pub fn certify_diagram(mu: &AtomicCharge) -> Result<DiagramReport, SqrtError> {
    let w_alpha_subnormal = mu.is_positive();
    let (lattice, mass_at_zero) = mu.without_zero_atom();
    let mut notes = Vec::new();
    if !mass_at_zero.is_zero() {
        notes.push("atom at zero stripped before root extraction".to_string());
    }
    if !w_alpha_subnormal {
        notes.push("μ is a charge: W_√α is not subnormal and only the Aluthge column is meaningful".to_string());
    }

    let (sqrt_shift_subnormal, sqrt_witness, aluthge_subnormal, aluthge_witness) = if lattice.is_empty() {
        // aδ_0 has root √a·δ_0, and μ*tμ = 0.
        let ok = !mass_at_zero.is_negative();
        (Verdict::from(ok), None, Verdict::True, None)
    } else {
        // the square of a positive root is positive
        let (sv, sw) = if w_alpha_subnormal {
            root_verdict(&lattice, &mut notes, "μ")?
        } else {
            (Verdict::False, None)
        };
        let product = lattice.convolve(&lattice.scale_by_t()?)?;
        let (av, aw) = root_verdict(&product, &mut notes, "μ*tμ")?;
        // a negative atom at zero rules out a positive root of aδ_0 + μ
        let sv = if sv.is_true() && mass_at_zero.is_negative() {
            Verdict::False
        } else {
            sv
        };
        (sv, sw, av, aw)
    };

    let mut implication_violations = Vec::new();
    if sqrt_shift_subnormal == Verdict::True {
        if aluthge_subnormal == Verdict::False {
            implication_violations.push("W_√α subnormal but Aluthge transform not subnormal".to_string());
        }
        if !w_alpha_subnormal {
            implication_violations.push("W_√α subnormal but W_α not subnormal".to_string());
        }
    }

    Ok(DiagramReport {
        w_alpha_subnormal,
        sqrt_shift_subnormal,
        aluthge_subnormal,
        mass_at_zero,
        sqrt_witness,
        aluthge_witness,
        implication_violations,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use alloc::vec;

    #[test]
    fn weights_from_moments() {
        let g = MomentSequence::new(vec![int(1), ratio(1, 2), ratio(1, 3), ratio(1, 4)]);
        let w = moments_to_squared_weights(&g).unwrap();
        assert_eq!(w.squared_weights(), &[ratio(1, 2), ratio(2, 3), ratio(3, 4)]);
        assert_eq!(w.moments(), g);
        assert_eq!(w.norm_squared_estimate(), Some(&ratio(3, 4)));

        let dirac = AtomicCharge::from_atoms(&[(int(3), int(1))]).unwrap();
        let w = moments_to_squared_weights(&dirac.moments(6).unwrap()).unwrap();
        assert!(w.squared_weights().iter().all(|x| x == &int(3)));

        let bad = MomentSequence::new(vec![int(1), int(0), int(1)]);
        assert_eq!(moments_to_squared_weights(&bad), Err(ShiftError::NonpositiveMoment(1)));
    }

    #[test]
    fn aluthge_weights() {
        let w = WeightSequence::new(vec![int(2), int(8), int(32)]).unwrap();
        let a = aluthge_squared_weights(&w).unwrap();
        let sq: Vec<_> = a.entries.iter().map(|e| e.squared.clone()).collect();
        assert_eq!(sq, vec![Some(int(4)), Some(int(16))]);

        let c = WeightSequence::new(vec![int(3); 4]).unwrap();
        let a = aluthge_squared_weights(&c).unwrap();
        assert!(a.entries.iter().all(|e| e.squared == Some(int(3))));

        let irr = WeightSequence::new(vec![int(1), int(2)]).unwrap();
        let a = aluthge_squared_weights(&irr).unwrap();
        assert_eq!(a.entries[0].squared, None);
        assert_eq!(a.entries[0].fourth_power, int(2));

        assert_eq!(
            aluthge_squared_weights(&WeightSequence::new(vec![int(1)]).unwrap()),
            Err(ShiftError::TooShort)
        );
    }

    #[test]
    fn recover_two_atoms() {
        let g = MomentSequence::new(vec![
            int(1),
            ratio(3, 2),
            ratio(5, 2),
            ratio(9, 2),
            ratio(17, 2),
            ratio(33, 2),
        ]);
        let rec = berger_recover(&g).unwrap();
        assert_eq!(rec.atoms, vec![(int(1), ratio(1, 2)), (int(2), ratio(1, 2))]);
        assert!(rec.subnormal);
        assert_eq!(rec.recurrence, vec![int(-2), int(3)]);
    }

    #[test]
    fn recover_fibonacci_is_irrational() {
        let fib: Vec<Rational> = [1, 1, 2, 3, 5, 8, 13, 21].iter().map(|&v| int(v)).collect();
        match berger_recover(&MomentSequence::new(fib)) {
            Err(RecoveryError::IrrationalAtom {
                recurrence,
                approx_roots,
            }) => {
                assert_eq!(recurrence, vec![int(1), int(1)]);
                let mut re: Vec<f64> = approx_roots.iter().map(|r| r.0).collect();
                re.sort_by(f64::total_cmp);
                assert!((re[0] + 0.618).abs() < 1e-3 && (re[1] - 1.618).abs() < 1e-3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn recover_with_zero_atom_and_failure() {
        let mu = AtomicCharge::from_atoms(&[(int(0), ratio(1, 3)), (int(4), ratio(2, 3))]).unwrap();
        let rec = berger_recover(&mu.moments(6).unwrap()).unwrap();
        assert_eq!(rec.charge, mu);

        // 1, 2, 3, ... needs a double root at 1.
        let lin: Vec<Rational> = (1..=8).map(int).collect();
        assert_eq!(
            berger_recover(&MomentSequence::new(lin)),
            Err(RecoveryError::RepeatedRoot)
        );
        let short = MomentSequence::new(vec![int(1), int(2), int(5), int(1)]);
        assert_eq!(berger_recover(&short), Err(RecoveryError::RecurrenceFailure));
    }

    #[test]
    fn hankel_check_signs() {
        let pos = AtomicCharge::from_atoms(&[(int(1), int(1)), (int(2), int(3))]).unwrap();
        assert!(hankel_psd(pos.moments(6).unwrap().as_slice()).positive);
        let neg = AtomicCharge::from_atoms(&[(int(1), int(1)), (int(2), int(-1)), (int(4), int(3))]).unwrap();
        assert!(!hankel_psd(neg.moments(8).unwrap().as_slice()).positive);
    }

    #[test]
    fn diagram_for_unit_mass() {
        let d1 = AtomicCharge::from_atoms(&[(int(1), int(1))]).unwrap();
        let r = certify_diagram(&d1).unwrap();
        assert!(r.w_alpha_subnormal);
        assert_eq!(r.sqrt_shift_subnormal, Verdict::True);
        assert_eq!(r.aluthge_subnormal, Verdict::True);
        assert!(r.implication_violations.is_empty());
    }

    #[test]
    fn diagram_undecided_without_root() {
        let mu = AtomicCharge::from_atoms(&[(int(4), int(1)), (int(8), int(1))]).unwrap();
        let r = certify_diagram(&mu).unwrap();
        assert_eq!(r.sqrt_shift_subnormal, Verdict::Undecided);
        assert_eq!(r.aluthge_subnormal, Verdict::Undecided);
    }

    #[test]
    fn diagram_strips_zero_atom() {
        let mu = AtomicCharge::from_atoms(&[
            (int(0), int(5)),
            (int(4), int(1)),
            (int(8), int(2)),
            (int(16), int(1)),
        ])
        .unwrap();
        let r = certify_diagram(&mu).unwrap();
        assert_eq!(r.mass_at_zero, int(5));
        assert_eq!(r.sqrt_shift_subnormal, Verdict::True);
        assert_eq!(r.aluthge_subnormal, Verdict::True);
    }
}
