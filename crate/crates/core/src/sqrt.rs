//! Square roots of lattice charges under multiplicative convolution.
//!
//! A charge `μ` with smallest coefficient `a_min > 0` is normalized to the
//! monic `μ̂ = μ / a_min` shifted to start at exponent 0. On the lattice
//! refined once (exponent step halved) the root coefficients follow the
//! recursion
//!
//! ```text
//! h_0 = 1,   h_j = (â_j − Σ_{0<i<j} h_i·h_{j−i}) / 2
//! ```
//!
//! The recursion only fixes the lower half of `h*h`; the candidate is
//! accepted only after an exact re-convolution reproduces `μ̂` entirely.
//! The root is unique up to sign, and the solver returns the one with
//! leading coefficient `+1`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::measure::{AtomicCharge, Exponent, MeasureError};
use crate::rational::{exact_sqrt, Rational};

/// Default ceiling on lattice refinement reached through root extraction.
pub const DEFAULT_MAX_REFINEMENT: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SqrtError {
    #[error("charge is zero")]
    ZeroCharge,
    #[error("charge has an atom at zero; strip it before extracting a root")]
    ZeroAtomPresent,
    #[error("smallest atom has negative mass {0}; no real root exists")]
    NegativeLeading(Rational),
    #[error("no square root exists on the once-refined lattice")]
    NoLatticeSqrt,
    #[error("root extraction would need refinement {0}, above the configured maximum")]
    RefinementLimit(u32),
    #[error("root of μ*tμ disagrees with the product of roots of μ")]
    Inconsistent,
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub max_refinement: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_refinement: DEFAULT_MAX_REFINEMENT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignVerdict {
    /// Every coefficient of the root has the same sign; `±root` is a
    /// positive measure.
    ConstantSign,
    MixedSign,
}

/// `μ = scalar · (root * root)` with `root` monic (smallest coefficient 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtCertificate {
    pub root: AtomicCharge,
    pub scalar: Rational,
    pub sign_verdict: SignVerdict,
}

impl SqrtCertificate {
    /// `√scalar · root` when `scalar` is a rational square.
    pub fn exact_root(&self) -> Option<AtomicCharge> {
        exact_sqrt(&self.scalar).map(|s| self.root.scaled(&s))
    }

    /// Re-squares the root and compares with `mu`.
    pub fn verify(&self, mu: &AtomicCharge) -> bool {
        match self.root.convolve(&self.root) {
            Ok(square) => &square.scaled(&self.scalar) == mu,
            Err(_) => false,
        }
    }
}

/// A positive square root, exact when `√scalar` is rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveSqrt {
    /// Positive monic root; the true root is `√scalar · monic`.
    pub monic: AtomicCharge,
    pub scalar: Rational,
    pub exact: Option<AtomicCharge>,
}

pub fn charge_sqrt(mu: &AtomicCharge) -> Result<SqrtCertificate, SqrtError> {
    charge_sqrt_with(mu, &SolverConfig::default())
}

pub fn charge_sqrt_with(
    mu: &AtomicCharge,
    config: &SolverConfig,
) -> Result<SqrtCertificate, SqrtError> {
    if !mu.mass_at_zero().is_zero() {
        return Err(SqrtError::ZeroAtomPresent);
    }
    let a_min = mu.leading().ok_or(SqrtError::ZeroCharge)?.clone();
    if a_min.is_negative() {
        return Err(SqrtError::NegativeLeading(a_min));
    }
    let refinement = mu.refinement() + 1;
    if refinement > config.max_refinement {
        return Err(SqrtError::RefinementLimit(refinement));
    }

    let (first, _) = mu.ticks().next().expect("nonempty");
    let (last, _) = mu.ticks().next_back().expect("nonempty");
    let span = usize::try_from(last - first).map_err(|_| SqrtError::NoLatticeSqrt)?;

    // Monic target on the refined lattice: index j ↔ exponent j / 2^(s+1)
    // above the shifted origin. Original ticks land on even indices.
    let inv = a_min.recip();
    let target: BTreeMap<usize, Rational> = mu
        .ticks()
        .map(|(t, c)| (2 * (t - first) as usize, c * &inv))
        .collect();
    let coeff = |j: usize| target.get(&j).cloned().unwrap_or_else(Rational::zero);

    let two = Rational::from_integer(2.into());
    let mut h: Vec<Rational> = vec![Rational::zero(); span + 1];
    h[0] = Rational::one();
    let mut nonzero: Vec<usize> = vec![0];
    for j in 1..=span {
        let mut acc = coeff(j);
        for &i in nonzero.iter().filter(|&&i| i > 0 && i < j) {
            let other = &h[j - i];
            if !other.is_zero() {
                acc -= &h[i] * other;
            }
        }
        if !acc.is_zero() {
            h[j] = acc / &two;
            nonzero.push(j);
        }
    }

    let base = mu.base().refined(refinement)?;
    let root = AtomicCharge::from_ticks(
        base,
        Rational::zero(),
        nonzero.iter().map(|&j| (j as i64 + first, h[j].clone())),
    )?;

    let square = root.convolve(&root)?;
    if square.scaled(&a_min) != *mu {
        return Err(SqrtError::NoLatticeSqrt);
    }

    let sign_verdict = if root.has_constant_sign() {
        SignVerdict::ConstantSign
    } else {
        SignVerdict::MixedSign
    };
    Ok(SqrtCertificate {
        root,
        scalar: a_min,
        sign_verdict,
    })
}

/// The positive square root of `mu`, if one exists. `Ok(None)` means the
/// unique charge root has mixed signs.
pub fn positive_sqrt(mu: &AtomicCharge) -> Result<Option<PositiveSqrt>, SqrtError> {
    let cert = charge_sqrt(mu)?;
    Ok(match cert.sign_verdict {
        SignVerdict::MixedSign => None,
        SignVerdict::ConstantSign => Some(PositiveSqrt {
            exact: cert.exact_root(),
            monic: cert.root,
            scalar: cert.scalar,
        }),
    })
}

/// Monic normalization: divide by the smallest-atom coefficient.
pub fn monic(mu: &AtomicCharge) -> Option<AtomicCharge> {
    mu.leading().map(|lead| mu.scaled(&lead.recip()))
}

/// Root `ν` of `μ*tμ`, i.e. the charge with `ν*ν = μ*tμ`. When `μ` itself
/// has a lattice root `ξ` with integer exponents, also checks that `ν` is
/// the monic form of `ξ*tξ`.
pub fn aluthge_root(mu: &AtomicCharge) -> Result<SqrtCertificate, SqrtError> {
    if !mu.mass_at_zero().is_zero() {
        return Err(SqrtError::ZeroAtomPresent);
    }
    let product = mu.convolve(&mu.scale_by_t()?)?;
    let cert = charge_sqrt(&product)?;

    if let Ok(xi) = charge_sqrt(mu) {
        if let Ok(t_xi) = xi.root.scale_by_t() {
            let expected = monic(&xi.root.convolve(&t_xi)?).ok_or(SqrtError::ZeroCharge)?;
            if cert.root != expected && cert.root != expected.negated() {
                return Err(SqrtError::Inconsistent);
            }
        }
    }
    Ok(cert)
}

/// The set `Γ(e)` of ordered index pairs `(i, j)` with `e_i + e_j = e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fiber {
    pub exponent: Exponent,
    pub pairs: Vec<(usize, usize)>,
}

impl Fiber {
    pub fn cardinality(&self) -> usize {
        self.pairs.len()
    }

    /// Uniquely represented: at most the pair and its transpose.
    pub fn is_uniquely_represented(&self) -> bool {
        self.pairs.len() <= 2
    }
}

/// Fibers of every exponent sum `e_i + e_j` over the lattice atoms of `nu`.
/// Indices refer to atoms in increasing exponent order, starting at 0.
pub fn gamma_fibers(nu: &AtomicCharge) -> Vec<Fiber> {
    let ticks: Vec<i64> = nu.ticks().map(|(t, _)| t).collect();
    let mut map: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, ti) in ticks.iter().enumerate() {
        for (j, tj) in ticks.iter().enumerate() {
            map.entry(ti + tj).or_default().push((i, j));
        }
    }
    let s = nu.refinement();
    map.into_iter()
        .map(|(t, pairs)| Fiber {
            exponent: Exponent::from_ticks(t, s),
            pairs,
        })
        .collect()
}
