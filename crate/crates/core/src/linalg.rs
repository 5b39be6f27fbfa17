//! Exact linear solves and polynomial root extraction over ℚ, plus a small
//! floating-point symmetric eigenvalue routine for the Hankel cross-check.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, Zero};

use crate::rational::{denominator_lcm, simplest_between, to_f64, Rational};

/// Solves `A x = b` exactly. Free variables are set to zero. Returns `None`
/// when the system is inconsistent.
pub fn solve_consistent(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for k in c..=cols {
            m[r][k] = &m[r][k] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Horner evaluation; coefficients are listed from the constant term up.
pub fn poly_eval(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Divides by `(x − root)`, which must be an exact root.
fn deflate(coeffs: &[Rational], root: &Rational) -> Vec<Rational> {
    let d = coeffs.len() - 1;
    let mut out = vec![Rational::zero(); d];
    let mut carry = Rational::zero();
    for i in (1..=d).rev() {
        carry = &coeffs[i] + carry * root;
        out[i - 1] = carry.clone();
    }
    out
}

/// Integer coefficients with unit content and the same roots.
fn primitive_integer(coeffs: &[Rational]) -> Vec<BigInt> {
    let lcm = denominator_lcm(coeffs);
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if content.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &content).collect()
}

/// Aberth–Ehrlich iteration for all complex roots of a polynomial with
/// `f64` coefficients (constant term first).
pub fn approximate_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Vec::new();
    }
    let lead = coeffs[d];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..d].iter().fold(0.0f64, |m, c| m.max(c.abs()));

    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };

    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let angle = core::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();
    for _ in 0..2000 {
        let mut worst = 0.0f64;
        for k in 0..d {
            let (p, dp) = eval(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                worst = worst.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

/// Tries to pin an approximate real root `approx` of `poly` to an exact
/// rational root.
fn refine_to_rational(poly: &[Rational], leading: &BigInt, approx: f64) -> Option<Rational> {
    if !approx.is_finite() {
        return None;
    }
    let is_root = |q: &Rational| poly_eval(poly, q).is_zero();
    let max_den = Rational::from_integer(leading.abs());

    // Continued-fraction convergents of the approximation.
    let target = Rational::from_f64(approx)?;
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut x = target.clone();
    for _ in 0..64 {
        let a = x.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if Rational::from_integer(q2.clone()) > max_den {
            break;
        }
        let cand = Rational::new(p2.clone(), q2.clone());
        if is_root(&cand) {
            return Some(cand);
        }
        let frac = &x - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        x = frac.recip();
        p0 = core::mem::replace(&mut p1, p2);
        q0 = core::mem::replace(&mut q1, q2);
    }

    // Exact bisection down to the width where at most one rational with
    // denominator ≤ |leading| fits, then take the simplest rational there.
    let sign = |q: &Rational| poly_eval(poly, q).signum();
    let scale = Rational::from_f64(approx.abs().max(1.0))?;
    let mut delta = scale * Rational::new(BigInt::one(), BigInt::from(1_000_000_000u64));
    let (mut lo, mut hi) = (None, None);
    for _ in 0..4 {
        let a = &target - &delta;
        let b = &target + &delta;
        let (sa, sb) = (sign(&a), sign(&b));
        if sa.is_zero() {
            return Some(a);
        }
        if sb.is_zero() {
            return Some(b);
        }
        if sa != sb {
            lo = Some(a);
            hi = Some(b);
            break;
        }
        delta *= Rational::from_integer(1000.into());
    }
    let (mut lo, mut hi) = (lo?, hi?);
    let s_lo = sign(&lo);
    let width = (Rational::from_integer(2.into()) * &max_den * &max_den).recip();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    while &hi - &lo >= width {
        let mid = (&lo + &hi) * &half;
        let s = sign(&mid);
        if s.is_zero() {
            return Some(mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let cand = simplest_between(&lo, &hi);
    is_root(&cand).then_some(cand)
}

/// Rational roots of `coeffs` (constant term first, nonzero leading term),
/// with multiplicity, together with the quotient left after dividing them
/// out.
pub fn rational_roots(coeffs: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut poly: Vec<Rational> = coeffs.to_vec();
    while poly.len() > 1 && poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
    let mut roots = Vec::new();
    while poly.len() > 1 && poly[0].is_zero() {
        roots.push(Rational::zero());
        poly.remove(0);
    }
    'outer: while poly.len() > 1 {
        let ints = primitive_integer(&poly);
        let leading = ints.last().expect("nonconstant").clone();
        let approx = approximate_roots(&poly.iter().map(to_f64).collect::<Vec<_>>());
        let mut candidates: Vec<Complex64> = approx
            .into_iter()
            .filter(|z| z.im.abs() <= 1e-6 * z.norm().max(1.0))
            .collect();
        candidates.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
        for z in candidates {
            if let Some(root) = refine_to_rational(&poly, &leading, z.re) {
                poly = deflate(&poly, &root);
                roots.push(root);
                continue 'outer;
            }
        }
        break;
    }
    (roots, poly)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}
