//! Seeded generators for random lattice charges.
//!
//! Trial `i` of a run with seed `s` draws from `ChaCha8Rng` seeded with `s`
//! on stream `i`, so every trial is reproducible on its own and results do
//! not depend on evaluation order.

use alloc::vec::Vec;

use num_traits::Signed;
use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measure::{AtomicCharge, MeasureError};
use crate::rational::{ratio, Rational};

/// Lattice bases drawn by the samplers.
pub const LAMBDAS: [(i64, i64); 8] = [(9, 8), (5, 4), (4, 3), (3, 2), (5, 3), (2, 1), (5, 2), (3, 1)];

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_lambda<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let (n, d) = LAMBDAS[rng.gen_range(0..LAMBDAS.len())];
    ratio(n, d)
}

/// `n/d` with `n ∈ [−10, 10] \ {0}` and `d ∈ 1..=5`.
pub fn random_coefficient<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let mut n = rng.gen_range(1..=10i64);
    if rng.gen_bool(0.5) {
        n = -n;
    }
    ratio(n, rng.gen_range(1..=5))
}

/// `n/d` with `n ∈ 1..=10`, `d ∈ 1..=5`.
pub fn random_positive_coefficient<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    random_coefficient(rng).abs()
}

/// `q` distinct exponents from `lo..=hi`, increasing.
pub fn random_exponents<R: Rng + ?Sized>(rng: &mut R, q: usize, lo: i64, hi: i64) -> Vec<i64> {
    let span = (hi - lo + 1) as usize;
    let mut e: Vec<i64> = sample(rng, span, q.min(span))
        .into_iter()
        .map(|i| lo + i as i64)
        .collect();
    e.sort_unstable();
    e
}

/// How a sampler assigns signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    /// Independent uniform signs.
    Uniform,
    /// All coefficients positive.
    Positive,
    /// Positive except one interior atom carrying a small negative mass
    /// (the shape of the known mixed-sign roots).
    InteriorDip,
}

/// A charge on `{λ^e}` with `q` atoms and exponents in `lo..=hi`.
pub fn random_charge<R: Rng + ?Sized>(
    rng: &mut R,
    q: usize,
    lo: i64,
    hi: i64,
    mode: SignMode,
) -> Result<AtomicCharge, MeasureError> {
    let lambda = random_lambda(rng);
    let exps = random_exponents(rng, q, lo, hi);
    let dip = if exps.len() >= 3 {
        rng.gen_range(1..exps.len() - 1)
    } else {
        usize::MAX
    };
    let terms: Vec<(i64, Rational)> = exps
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let c = match mode {
                SignMode::Uniform => random_coefficient(rng),
                SignMode::Positive => random_positive_coefficient(rng),
                SignMode::InteriorDip if k == dip => -ratio(1, rng.gen_range(1..=10)),
                SignMode::InteriorDip => random_positive_coefficient(rng),
            };
            (e, c)
        })
        .collect();
    AtomicCharge::on_integer_lattice(lambda, terms)
}

/// Exponents in an arithmetic progression `a, a+d, …`: the configurations
/// with the most coinciding products.
pub fn progression_exponents<R: Rng + ?Sized>(rng: &mut R, q: usize) -> Vec<i64> {
    let start = rng.gen_range(0..=2i64);
    let step = rng.gen_range(1..=2i64);
    (0..q as i64).map(|k| start + k * step).collect()
}

/// A positive lattice measure with `p` atoms, optionally with an atom at
/// zero, suitable for moment recovery.
pub fn random_positive_measure<R: Rng + ?Sized>(
    rng: &mut R,
    p: usize,
    max_exponent: i64,
) -> Result<AtomicCharge, MeasureError> {
    let lambda = random_lambda(rng);
    let with_zero = p >= 2 && rng.gen_bool(0.25);
    let lattice_atoms = if with_zero { p - 1 } else { p };
    let exps = random_exponents(rng, lattice_atoms, 0, max_exponent);
    let m0 = if with_zero {
        random_positive_coefficient(rng)
    } else {
        Rational::default()
    };
    let base = crate::measure::LatticeBase::integer(lambda)?;
    AtomicCharge::from_ticks(
        base,
        m0,
        exps.into_iter()
            .map(|e| (e, random_positive_coefficient(rng)))
            .collect::<Vec<_>>(),
    )
}

/// A probability measure on `[1, 2]`: `λ ∈ {9/8, 5/4, 4/3}`, 1 to 4 atoms
/// `λ^e ≤ 2`, positive weights normalized to total mass 1.
pub fn random_probability_measure<R: Rng + ?Sized>(rng: &mut R) -> Result<AtomicCharge, MeasureError> {
    const BASES: [(i64, i64, i64); 3] = [(9, 8, 5), (5, 4, 3), (4, 3, 2)];
    let (n, d, top) = BASES[rng.gen_range(0..BASES.len())];
    let q = rng.gen_range(1..=4usize).min(top as usize + 1);
    let exps = random_exponents(rng, q, 0, top);
    let terms: Vec<_> = exps.into_iter().map(|e| (e, random_positive_coefficient(rng))).collect();
    let mu = AtomicCharge::on_integer_lattice(ratio(n, d), terms)?;
    let total = mu.total_mass();
    Ok(mu.scaled(&(ratio(1, 1) / total)))
}

/// A charge whose moments are fed to the numeric Hankel test: `λ ∈ {3/2, 2,
/// 3}`, 1 to 5 atoms among `λ^0..λ^5` plus possibly an atom at zero. Half
/// of the draws are positive; the rest have independent uniform signs.
pub fn random_recoverable_charge<R: Rng + ?Sized>(rng: &mut R) -> Result<AtomicCharge, MeasureError> {
    const BASES: [(i64, i64); 3] = [(3, 2), (2, 1), (3, 1)];
    let (n, d) = BASES[rng.gen_range(0..BASES.len())];
    let positive = rng.gen_bool(0.5);
    let draw = |rng: &mut R| {
        if positive {
            random_positive_coefficient(rng)
        } else {
            random_coefficient(rng)
        }
    };
    let p = rng.gen_range(1..=5usize);
    let with_zero = p >= 2 && rng.gen_bool(0.25);
    let exps = random_exponents(rng, if with_zero { p - 1 } else { p }, 0, 5);
    let m0 = if with_zero { draw(rng) } else { Rational::default() };
    let terms: Vec<_> = exps.into_iter().map(|e| (e, draw(rng))).collect();
    AtomicCharge::from_ticks(crate::measure::LatticeBase::integer(ratio(n, d))?, m0, terms)
}
