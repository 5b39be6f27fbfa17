//! Finitely atomic charges on a geometric lattice.
//!
//! A charge is `m0·δ_0 + Σ a_e·δ_{λ^e}` where `λ > 1` is rational and every
//! exponent `e ≥ 0` is a multiple of `2^-s` (`s` is the lattice refinement).
//! Exponents are stored as integer "ticks" `e·2^s`, so atom order is plain
//! integer order and no real number ever needs comparing.
//!
//! Invariants kept by every constructor:
//! - no stored coefficient is zero
//! - every tick is non-negative
//! - `λ > 1` and `s <= MAX_REFINEMENT`

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{dyadic_power, pow, Rational};

/// Hard ceiling on the refinement a lattice can carry (ticks are `i64`).
pub const MAX_REFINEMENT: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("lattice base must be a rational greater than 1, got {0}")]
    InvalidBase(Rational),
    #[error("refinement {0} exceeds the supported maximum")]
    RefinementTooLarge(u32),
    #[error("no rational base greater than 1 represents every atom as an integer power")]
    NoCommonBase,
    #[error("atom {0} lies strictly between 0 and 1")]
    AtomBelowOne(Rational),
    #[error("atom {0} is negative")]
    NegativeAtom(Rational),
    #[error("atom {0} appears more than once")]
    DuplicateAtom(Rational),
    #[error("at least one atom with a positive value is required")]
    NoPositiveAtom,
    #[error("exponents must be non-negative")]
    NegativeExponent,
    #[error("lattice bases differ: {} vs {}", .0.0, .0.1)]
    BaseMismatch(Box<(Rational, Rational)>),
    #[error("exponent {0} is not an integer")]
    NonIntegerExponent(Exponent),
    #[error("moment of order {order} is irrational (atom exponent {exponent})")]
    IrrationalMoment { order: u64, exponent: Exponent },
    #[error("atom value at exponent {0} is irrational")]
    IrrationalAtom(Exponent),
    #[error("charge has no atoms on the lattice")]
    EmptyLattice,
}

/// A dyadic rational exponent `num / 2^shift`, kept reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    num: i64,
    shift: u32,
}

impl Exponent {
    pub fn integer(k: i64) -> Self {
        Exponent { num: k, shift: 0 }
    }

    /// `ticks / 2^refinement`, reduced.
    pub fn from_ticks(ticks: i64, refinement: u32) -> Self {
        let mut num = ticks;
        let mut shift = refinement;
        while shift > 0 && num % 2 == 0 {
            num /= 2;
            shift -= 1;
        }
        if num == 0 {
            shift = 0;
        }
        Exponent { num, shift }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        1u64 << self.shift
    }

    /// Number of halvings in the reduced denominator.
    pub fn dyadic_order(&self) -> u32 {
        self.shift
    }

    pub fn is_integer(&self) -> bool {
        self.shift == 0
    }

    /// The exponent expressed in ticks of a lattice with the given
    /// refinement, if it lies on that lattice.
    pub fn ticks_at(&self, refinement: u32) -> Option<i64> {
        if self.shift > refinement {
            return None;
        }
        self.num.checked_mul(1i64 << (refinement - self.shift))
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.denominator() as f64
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = (self.num as i128) << other.shift;
        let b = (other.num as i128) << self.shift;
        a.cmp(&b)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.denominator())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

/// The geometric lattice `{λ^(k/2^s) : k ∈ ℤ}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBase {
    lambda: Rational,
    refinement: u32,
}

impl LatticeBase {
    pub fn new(lambda: Rational, refinement: u32) -> Result<Self, MeasureError> {
        if lambda <= Rational::one() {
            return Err(MeasureError::InvalidBase(lambda));
        }
        if refinement > MAX_REFINEMENT {
            return Err(MeasureError::RefinementTooLarge(refinement));
        }
        Ok(LatticeBase { lambda, refinement })
    }

    pub fn integer(lambda: Rational) -> Result<Self, MeasureError> {
        Self::new(lambda, 0)
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    pub(crate) fn ticks_per_unit(&self) -> i64 {
        1i64 << self.refinement
    }

    pub(crate) fn refined(&self, refinement: u32) -> Result<Self, MeasureError> {
        debug_assert!(refinement >= self.refinement);
        Self::new(self.lambda.clone(), refinement)
    }
}

/// A finitely atomic signed measure supported in `{0} ∪ [1, ∞)`.
#[derive(Debug, Clone)]
pub struct AtomicCharge {
    base: LatticeBase,
    mass_at_zero: Rational,
    terms: BTreeMap<i64, Rational>,
}

impl AtomicCharge {
    pub fn zero(base: LatticeBase) -> Self {
        AtomicCharge {
            base,
            mass_at_zero: Rational::zero(),
            terms: BTreeMap::new(),
        }
    }

    /// Builds a charge from `(ticks, coefficient)` pairs; repeated ticks are
    /// summed and zero coefficients dropped.
    pub fn from_ticks(
        base: LatticeBase,
        mass_at_zero: Rational,
        terms: impl IntoIterator<Item = (i64, Rational)>,
    ) -> Result<Self, MeasureError> {
        let mut map: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ticks, coeff) in terms {
            if ticks < 0 {
                return Err(MeasureError::NegativeExponent);
            }
            *map.entry(ticks).or_insert_with(Rational::zero) += coeff;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(AtomicCharge {
            base,
            mass_at_zero,
            terms: map,
        })
    }

    /// Convenience constructor for integer exponents on `λ` (refinement 0).
    pub fn on_integer_lattice(
        lambda: Rational,
        terms: impl IntoIterator<Item = (i64, Rational)>,
    ) -> Result<Self, MeasureError> {
        Self::from_ticks(LatticeBase::integer(lambda)?, Rational::zero(), terms)
    }

    /// Infers the finest rational lattice carrying every positive atom and
    /// places the charge on it. Atoms at `0` go to the mass at zero.
    pub fn from_atoms(atoms: &[(Rational, Rational)]) -> Result<Self, MeasureError> {
        let one = Rational::one();
        let mut seen: Vec<&Rational> = Vec::with_capacity(atoms.len());
        let mut mass_at_zero = Rational::zero();
        let mut has_positive = false;
        for (value, coeff) in atoms {
            if value.is_negative() {
                return Err(MeasureError::NegativeAtom(value.clone()));
            }
            if seen.contains(&value) {
                return Err(MeasureError::DuplicateAtom(value.clone()));
            }
            seen.push(value);
            if value.is_zero() {
                mass_at_zero += coeff;
            } else if value < &one {
                return Err(MeasureError::AtomBelowOne(value.clone()));
            } else {
                has_positive = true;
            }
        }
        if !has_positive {
            return Err(MeasureError::NoPositiveAtom);
        }

        let mut lambda: Option<Rational> = None;
        for (value, _) in atoms {
            if value > &one {
                lambda = Some(match lambda {
                    None => primitive_root(value),
                    Some(l) => common_base(&l, value).ok_or(MeasureError::NoCommonBase)?,
                });
            }
        }
        // Only atoms at 1 (and possibly 0): any base works.
        let lambda = lambda.unwrap_or_else(|| Rational::from_integer(2.into()));
        let base = LatticeBase::integer(lambda)?;

        let mut terms = Vec::with_capacity(atoms.len());
        for (value, coeff) in atoms {
            if value.is_zero() {
                continue;
            }
            let k = integer_log(base.lambda(), value).ok_or(MeasureError::NoCommonBase)?;
            terms.push((k, coeff.clone()));
        }
        Self::from_ticks(base, mass_at_zero, terms)
    }

    pub fn base(&self) -> &LatticeBase {
        &self.base
    }

    pub fn lambda(&self) -> &Rational {
        &self.base.lambda
    }

    pub fn refinement(&self) -> u32 {
        self.base.refinement
    }

    pub fn mass_at_zero(&self) -> &Rational {
        &self.mass_at_zero
    }

    /// Raw `(ticks, coefficient)` view in increasing exponent order.
    pub fn ticks(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> + '_ {
        self.terms.iter().map(|(t, c)| (*t, c))
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Exponent, &Rational)> + '_ {
        let s = self.base.refinement;
        self.terms
            .iter()
            .map(move |(t, c)| (Exponent::from_ticks(*t, s), c))
    }

    pub fn coefficients(&self) -> impl DoubleEndedIterator<Item = &Rational> + '_ {
        self.terms.values()
    }

    pub fn coefficient_at(&self, exponent: Exponent) -> Rational {
        exponent
            .ticks_at(self.base.refinement)
            .and_then(|t| self.terms.get(&t).cloned())
            .unwrap_or_else(Rational::zero)
    }

    /// Number of lattice atoms (the atom at zero is not counted).
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.mass_at_zero.is_zero()
    }

    /// Number of atoms including a nonzero atom at 0.
    pub fn support_size(&self) -> usize {
        self.terms.len() + usize::from(!self.mass_at_zero.is_zero())
    }

    pub fn min_exponent(&self) -> Option<Exponent> {
        self.terms().next().map(|(e, _)| e)
    }

    pub fn max_exponent(&self) -> Option<Exponent> {
        self.terms().next_back().map(|(e, _)| e)
    }

    /// Coefficient of the smallest lattice atom.
    pub fn leading(&self) -> Option<&Rational> {
        self.terms.values().next()
    }

    pub fn total_mass(&self) -> Rational {
        self.terms
            .values()
            .fold(self.mass_at_zero.clone(), |acc, c| acc + c)
    }

    /// The same charge expressed on a finer lattice.
    pub fn with_refinement(&self, refinement: u32) -> Result<Self, MeasureError> {
        if refinement < self.base.refinement {
            let coarse = self.minimal_refinement();
            if refinement < coarse {
                // Some exponent does not live on the coarser lattice.
                let (t, _) = self.terms.iter().find(|(t, _)| {
                    Exponent::from_ticks(**t, self.base.refinement).dyadic_order() > refinement
                }).expect("minimal refinement exceeds target");
                return Err(MeasureError::NonIntegerExponent(Exponent::from_ticks(
                    *t,
                    self.base.refinement,
                )));
            }
            let down = self.base.refinement - refinement;
            let base = LatticeBase::new(self.base.lambda.clone(), refinement)?;
            return Self::from_ticks(
                base,
                self.mass_at_zero.clone(),
                self.terms.iter().map(|(t, c)| (t >> down, c.clone())),
            );
        }
        let up = refinement - self.base.refinement;
        let base = self.base.refined(refinement)?;
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| (t << up, c.clone()))
            .collect();
        Ok(AtomicCharge {
            base,
            mass_at_zero: self.mass_at_zero.clone(),
            terms,
        })
    }

    /// Smallest refinement on which every exponent lies.
    pub fn minimal_refinement(&self) -> u32 {
        self.terms()
            .map(|(e, _)| e.dyadic_order())
            .max()
            .unwrap_or(0)
    }

    pub fn negated(&self) -> Self {
        self.scaled(&-Rational::one())
    }

    /// Multiplies every coefficient (and the mass at zero) by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return AtomicCharge::zero(self.base.clone());
        }
        AtomicCharge {
            base: self.base.clone(),
            mass_at_zero: &self.mass_at_zero * factor,
            terms: self.terms.iter().map(|(t, c)| (*t, c * factor)).collect(),
        }
    }

    /// Removes the atom at zero, returning its mass.
    pub fn without_zero_atom(&self) -> (Self, Rational) {
        let mut stripped = self.clone();
        let m0 = core::mem::replace(&mut stripped.mass_at_zero, Rational::zero());
        (stripped, m0)
    }

    /// Multiplicative convolution. Charges on the same `λ` with different
    /// refinements are first brought to the finer lattice.
    pub fn convolve(&self, other: &AtomicCharge) -> Result<AtomicCharge, MeasureError> {
        if self.base.lambda != other.base.lambda {
            return Err(MeasureError::BaseMismatch(Box::new((
                self.base.lambda.clone(),
                other.base.lambda.clone(),
            ))));
        }
        let s = self.base.refinement.max(other.base.refinement);
        let lhs = self.with_refinement(s)?;
        let rhs = other.with_refinement(s)?;

        let m0 = &lhs.mass_at_zero * rhs.total_mass() + &rhs.mass_at_zero * lhs.total_mass()
            - &lhs.mass_at_zero * &rhs.mass_at_zero;

        let mut terms: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ta, ca) in &lhs.terms {
            for (tb, cb) in &rhs.terms {
                let slot = terms.entry(ta + tb).or_insert_with(Rational::zero);
                *slot += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(AtomicCharge {
            base: lhs.base,
            mass_at_zero: m0,
            terms,
        })
    }

    /// The charge `t·μ`: each coefficient is multiplied by its atom value.
    /// The atom at zero vanishes. Requires integer exponents.
    pub fn scale_by_t(&self) -> Result<AtomicCharge, MeasureError> {
        let unit = self.base.ticks_per_unit();
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            if t % unit != 0 {
                return Err(MeasureError::NonIntegerExponent(Exponent::from_ticks(
                    *t,
                    self.base.refinement,
                )));
            }
            let k = (t / unit) as u64;
            terms.insert(*t, c * pow(&self.base.lambda, k));
        }
        Ok(AtomicCharge {
            base: self.base.clone(),
            mass_at_zero: Rational::zero(),
            terms,
        })
    }

    /// `γ_n = ∫ t^n dμ`, with `0^0 = 1` so that `γ_0` is the total mass.
    pub fn moment(&self, n: u64) -> Result<Rational, MeasureError> {
        if n == 0 {
            return Ok(self.total_mass());
        }
        let mut sum = Rational::zero();
        for (t, c) in &self.terms {
            let ticks = (*t as u64)
                .checked_mul(n)
                .ok_or(MeasureError::RefinementTooLarge(self.base.refinement))?;
            let e = Exponent::from_ticks(ticks as i64, self.base.refinement);
            let value = dyadic_power(&self.base.lambda, e.numerator() as u64, e.dyadic_order())
                .ok_or(MeasureError::IrrationalMoment {
                    order: n,
                    exponent: Exponent::from_ticks(*t, self.base.refinement),
                })?;
            sum += c * value;
        }
        Ok(sum)
    }

    /// `γ_0, …, γ_{count-1}`.
    pub fn moments(&self, count: usize) -> Result<MomentSequence, MeasureError> {
        let gammas = (0..count as u64)
            .map(|n| self.moment(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MomentSequence::new(gammas))
    }

    /// True iff the mass at zero is non-negative and every stored
    /// coefficient is positive. The zero charge is positive.
    pub fn is_positive(&self) -> bool {
        !self.mass_at_zero.is_negative() && self.terms.values().all(Signed::is_positive)
    }

    pub fn sign_pattern(&self) -> Vec<Sign> {
        self.terms
            .values()
            .map(|c| {
                if c.is_positive() {
                    Sign::Positive
                } else {
                    Sign::Negative
                }
            })
            .collect()
    }

    /// All lattice coefficients share one sign.
    pub fn has_constant_sign(&self) -> bool {
        let mut signs = self.terms.values().map(Signed::is_positive);
        match signs.next() {
            None => true,
            Some(first) => signs.all(|s| s == first),
        }
    }

    /// Divides every atom by the smallest lattice atom so that the support
    /// starts at 1. Returns the normalized charge and the dividing factor.
    /// The atom at zero is kept.
    pub fn normalize_support(&self) -> Result<(AtomicCharge, Rational), MeasureError> {
        let (&min, _) = self.terms.iter().next().ok_or(MeasureError::EmptyLattice)?;
        let e = Exponent::from_ticks(min, self.base.refinement);
        let factor = dyadic_power(&self.base.lambda, e.numerator() as u64, e.dyadic_order())
            .ok_or(MeasureError::IrrationalAtom(e))?;
        let terms = self.terms.iter().map(|(t, c)| (t - min, c.clone())).collect();
        Ok((
            AtomicCharge {
                base: self.base.clone(),
                mass_at_zero: self.mass_at_zero.clone(),
                terms,
            },
            factor,
        ))
    }

    /// Shifts every exponent by `delta` ticks (the product with `δ_{λ^δ}`).
    pub fn shifted(&self, delta: i64) -> Result<AtomicCharge, MeasureError> {
        Self::from_ticks(
            self.base.clone(),
            self.mass_at_zero.clone(),
            self.terms.iter().map(|(t, c)| (t + delta, c.clone())),
        )
    }

    /// Atom values and masses, atom at zero first. Fails when some atom
    /// value `λ^e` is irrational.
    pub fn atoms(&self) -> Result<Vec<(Rational, Rational)>, MeasureError> {
        let mut out = Vec::with_capacity(self.support_size());
        if !self.mass_at_zero.is_zero() {
            out.push((Rational::zero(), self.mass_at_zero.clone()));
        }
        for (e, c) in self.terms() {
            out.push((self.atom_value(e)?, c.clone()));
        }
        Ok(out)
    }

    pub fn atom_value(&self, e: Exponent) -> Result<Rational, MeasureError> {
        if e.numerator() < 0 {
            return Err(MeasureError::NegativeExponent);
        }
        dyadic_power(&self.base.lambda, e.numerator() as u64, e.dyadic_order())
            .ok_or(MeasureError::IrrationalAtom(e))
    }
}

/// Two charges are equal when they denote the same measure on the same
/// base `λ`, whatever refinement each one is stored at.
impl PartialEq for AtomicCharge {
    fn eq(&self, other: &Self) -> bool {
        self.base.lambda == other.base.lambda
            && self.mass_at_zero == other.mass_at_zero
            && self.terms.len() == other.terms.len()
            && self.terms().zip(other.terms()).all(|(a, b)| a == b)
    }
}

impl Eq for AtomicCharge {}

/// Moments `γ_0, γ_1, …` of a charge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSequence {
    gammas: Vec<Rational>,
}

impl MomentSequence {
    pub fn new(gammas: Vec<Rational>) -> Self {
        MomentSequence { gammas }
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.gammas
    }
}

impl From<Vec<Rational>> for MomentSequence {
    fn from(gammas: Vec<Rational>) -> Self {
        MomentSequence::new(gammas)
    }
}

/// `v = λ0^g` with `λ0` not a perfect power; returns `λ0`.
fn primitive_root(v: &Rational) -> Rational {
    // v > 1. Try the largest root first so the result is primitive.
    let bits = v.numer().bits().max(1);
    for k in (2..=bits).rev() {
        if let Some(r) = exact_root(v, k) {
            return r;
        }
    }
    v.clone()
}

fn exact_root(v: &Rational, k: u64) -> Option<Rational> {
    let k32 = u32::try_from(k).ok()?;
    let n = v.numer().nth_root(k32);
    let d = v.denom().nth_root(k32);
    if &num_traits::pow(n.clone(), k as usize) == v.numer()
        && &num_traits::pow(d.clone(), k as usize) == v.denom()
    {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Multiplicative Euclid: given `a = λ^m`, `b = λ^n` (both `> 1`) returns
/// `λ^gcd(m, n)`, or `None` when no such rational `λ` exists.
fn common_base(a: &Rational, b: &Rational) -> Option<Rational> {
    // m + n drops by at least one per step and num(λ^m) >= 2^m, so the bit
    // lengths bound the number of steps for dependent inputs.
    let mut budget = a.numer().bits() + b.numer().bits() + 2;
    let (mut a, mut b) = (a.clone(), b.clone());
    loop {
        match a.cmp(&b) {
            Ordering::Equal => return Some(a),
            Ordering::Greater => core::mem::swap(&mut a, &mut b),
            Ordering::Less => {}
        }
        b = &b / &a;
        if budget == 0 || b <= Rational::one() {
            return None;
        }
        budget -= 1;
    }
}

/// `k` with `lambda^k == value`, for `value >= 1`.
fn integer_log(lambda: &Rational, value: &Rational) -> Option<i64> {
    let mut k = 0i64;
    let mut cur = Rational::one();
    while &cur < value {
        cur *= lambda;
        k += 1;
    }
    (&cur == value).then_some(k)
}
