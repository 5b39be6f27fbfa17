//! Exact rational scalars and the handful of number-theoretic helpers the
//! lattice code needs (exact powers, exact dyadic roots, best rational
//! approximations).

use alloc::string::String;
use core::fmt::Write;
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Builds `num/den` from machine integers. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical `"num/den"` rendering used by every machine-readable format.
/// The denominator is always printed, including `/1`.
pub fn to_fraction_string(q: &Rational) -> String {
    let mut s = String::new();
    let _ = write!(s, "{}/{}", q.numer(), q.denom());
    s
}

/// Parses `"n"` or `"n/d"` (optional leading sign, `d > 0`).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.sign() != Sign::Plus || den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow(base: &Rational, exp: u64) -> Rational {
    let mut result = Rational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

/// Exact square root of a non-negative rational, if it is rational.
pub fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// `base^(num / 2^shift)` when the result is rational. `base` must be
/// positive.
pub fn dyadic_power(base: &Rational, num: u64, shift: u32) -> Option<Rational> {
    let mut value = pow(base, num);
    for _ in 0..shift {
        value = exact_sqrt(&value)?;
    }
    Some(value)
}

/// Floating point approximation that survives numerators and denominators
/// far beyond the `f64` range.
pub fn to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    libm::exp(ln_abs(q)) * if q.is_negative() { -1.0 } else { 1.0 }
}

/// Natural logarithm of `|q|`; `-inf` for zero.
pub fn ln_abs(q: &Rational) -> f64 {
    ln_big(q.numer()) - ln_big(q.denom())
}

fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        if let Some(v) = n.abs().to_f64() {
            return libm::log(v);
        }
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::MAX);
    libm::log(top) + shift as f64 * core::f64::consts::LN_2
}

/// The rational with the smallest denominator (then smallest absolute
/// numerator) in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if lo.is_positive() {
        simplest_positive(lo, hi)
    } else if hi.is_negative() {
        -simplest_positive(&-hi, &-lo)
    } else {
        Rational::zero()
    }
}

fn simplest_positive(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if &(&fl + Rational::one()) <= hi {
        return fl + Rational::one();
    }
    // Same integer part: recurse on the reciprocals of the fractional parts.
    let rest = simplest_positive(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + rest.recip()
}

/// Least common multiple of the denominators of `values`.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
