//! Mellin transforms of lattice charges as exponential polynomials,
//! `M_μ(z) = Σ a_e·exp(z·e·ln λ)`, evaluated in double precision.
//!
//! The atom at zero is excluded (the transform integrates over `t > 0`).
//! Everything here is a numerical diagnostic; nothing in the exact layer
//! depends on it.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::measure::AtomicCharge;
use crate::rational::{ln_abs, to_f64};

pub type ComplexPoint = Complex64;

/// Magnitude below which a boundary sample is treated as a zero.
pub const BOUNDARY_ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MellinError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("degenerate rectangle")]
    EmptyRect,
    #[error("transform vanishes (|M| < 1e-8) on the boundary near {re} + {im}i")]
    BoundaryZero { re: f64, im: f64 },
    #[error("argument jump of {jump} rad between samples; increase the sample count")]
    InsufficientSamples { jump: f64 },
}

/// Axis-aligned rectangle `[re_min, re_max] × [im_min, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, MellinError> {
        let all = [re_min, re_max, im_min, im_max];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(MellinError::NonFinite);
        }
        if re_min >= re_max || im_min >= im_max {
            return Err(MellinError::EmptyRect);
        }
        Ok(Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// Counter-clockwise corner sequence starting bottom-left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

/// Precomputed `(coefficient, e·ln λ)` pairs for repeated evaluation.
#[derive(Debug, Clone)]
pub struct ExpPolynomial {
    terms: Vec<(f64, f64)>,
}

impl ExpPolynomial {
    pub fn new(mu: &AtomicCharge) -> Self {
        let ln_lambda = ln_abs(mu.lambda());
        let terms = mu
            .terms()
            .map(|(e, c)| (to_f64(c), e.to_f64() * ln_lambda))
            .collect();
        ExpPolynomial { terms }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(a, freq)| (z * freq).exp() * a)
            .sum()
    }

    /// `Σ |a_k|·|exp(z·y_k)|`: the natural scale of `eval(z)` and of its
    /// rounding error.
    pub fn magnitude_bound(&self, z: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|&(a, freq)| a.abs() * libm::exp(z.re * freq))
            .sum()
    }
}

pub fn mellin_eval(mu: &AtomicCharge, z: ComplexPoint) -> ComplexPoint {
    ExpPolynomial::new(mu).eval(z)
}

fn wrap_angle(mut d: f64) -> f64 {
    while d > PI {
        d -= TAU;
    }
    while d <= -PI {
        d += TAU;
    }
    d
}

/// Winding number of `M_μ` around the boundary of `rect`, i.e. the number of
/// zeros inside counted with multiplicity.
pub fn zero_count(mu: &AtomicCharge, rect: &Rect, samples_per_edge: usize) -> Result<i64, MellinError> {
    let poly = ExpPolynomial::new(mu);
    let n = samples_per_edge.max(1);
    let corners = rect.corners();
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    let mut first: Option<f64> = None;
    for edge in 0..4 {
        let a = corners[edge];
        let b = corners[(edge + 1) % 4];
        for k in 0..n {
            let z = a + (b - a) * (k as f64 / n as f64);
            let w = poly.eval(z);
            if w.norm() < BOUNDARY_ZERO_THRESHOLD {
                return Err(MellinError::BoundaryZero { re: z.re, im: z.im });
            }
            let arg = w.arg();
            if let Some(p) = prev {
                let jump = wrap_angle(arg - p);
                if jump.abs() > FRAC_PI_2 {
                    return Err(MellinError::InsufficientSamples { jump });
                }
                total += jump;
            } else {
                first = Some(arg);
            }
            prev = Some(arg);
        }
    }
    let jump = wrap_angle(first.expect("sampled") - prev.expect("sampled"));
    if jump.abs() > FRAC_PI_2 {
        return Err(MellinError::InsufficientSamples { jump });
    }
    total += jump;
    Ok(libm::round(total / TAU) as i64)
}

/// One grid sample for plotting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub arg: f64,
}

/// Evaluates `M_μ` on an `nx × ny` grid covering `rect` (edges included),
/// row-major with the imaginary part varying slowest.
pub fn grid_scan(mu: &AtomicCharge, rect: &Rect, nx: usize, ny: usize) -> Vec<GridSample> {
    let poly = ExpPolynomial::new(mu);
    let step = |lo: f64, hi: f64, n: usize, i: usize| {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        let im = step(rect.im_min, rect.im_max, ny, iy);
        for ix in 0..nx {
            let re = step(rect.re_min, rect.re_max, nx, ix);
            let w = poly.eval(Complex64::new(re, im));
            out.push(GridSample {
                re,
                im,
                abs: w.norm(),
                arg: w.arg(),
            });
        }
    }
    out
}

/// An abscissa `R` beyond which the top atom dominates:
/// `|a_top|·x_top^R > Σ_{k≠top} |a_k|·x_k^R` for every `Re z ≥ R`, so `M_μ`
/// has no zeros there. `None` for charges with fewer than two atoms.
pub fn dominance_abscissa(mu: &AtomicCharge) -> Option<f64> {
    let poly = ExpPolynomial::new(mu);
    let terms = &poly.terms;
    if terms.len() < 2 {
        return None;
    }
    let (a_top, y_top) = terms[terms.len() - 1];
    let y_next = terms[terms.len() - 2].1;
    let rest: f64 = terms[..terms.len() - 1].iter().map(|(a, _)| a.abs()).sum();
    let gap = y_top - y_next;
    // Σ |a_k| e^{R(y_k − y_top)} ≤ rest·e^{−R·gap} < |a_top| once R exceeds this.
    Some((libm::log(rest / a_top.abs())).max(0.0) / gap + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use alloc::vec;

    fn example_mu() -> AtomicCharge {
        let xi = AtomicCharge::on_integer_lattice(
            int(2),
            vec![(1, int(1)), (2, int(1)), (3, ratio(-1, 5)), (4, int(1)), (5, int(1))],
        )
        .unwrap();
        xi.convolve(&xi).unwrap()
    }

    #[test]
    fn matches_integer_moments() {
        let mu = example_mu();
        for n in 1..8u64 {
            let exact = to_f64(&mu.moment(n).unwrap());
            let approx = mellin_eval(&mu, Complex64::new(n as f64, 0.0));
            assert!(((approx.re - exact) / exact).abs() < 1e-10);
            assert!(approx.im.abs() <= 1e-10 * exact.abs());
        }
    }

    #[test]
    fn zero_atom_excluded() {
        let mu = AtomicCharge::from_atoms(&[(int(0), int(7)), (int(1), int(1))]).unwrap();
        assert_eq!(mellin_eval(&mu, Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn simple_zero_of_two_atoms() {
        // 1 + 2^z vanishes at z = iπ/ln 2 (and its 2πi/ln 2 translates).
        let mu = AtomicCharge::on_integer_lattice(int(2), vec![(0, int(1)), (1, int(1))]).unwrap();
        let period = TAU / core::f64::consts::LN_2;
        let rect = Rect::new(-1.0, 1.0, 0.0, period).unwrap();
        assert_eq!(zero_count(&mu, &rect, 200).unwrap(), 1);
        let wide = Rect::new(-1.0, 1.0, -period, period).unwrap();
        assert_eq!(zero_count(&mu, &wide, 400).unwrap(), 2);
        let on_edge = Rect::new(-1.0, 1.0, period / 2.0, period).unwrap();
        assert!(matches!(
            zero_count(&mu, &on_edge, 200),
            Err(MellinError::BoundaryZero { .. })
        ));
        assert!(matches!(
            zero_count(&mu, &rect, 2),
            Err(MellinError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn zero_free_right_half_plane() {
        let mu = example_mu();
        let rect = Rect::new(10.0, 20.0, -5.0, 5.0).unwrap();
        assert_eq!(zero_count(&mu, &rect, 400).unwrap(), 0);
        let r = dominance_abscissa(&mu).unwrap();
        let right = Rect::new(r, r + 10.0, -5.0, 5.0).unwrap();
        assert_eq!(zero_count(&mu, &right, 400).unwrap(), 0);
    }

    #[test]
    fn grid_layout() {
        let mu = example_mu();
        let rect = Rect::new(0.0, 1.0, -1.0, 1.0).unwrap();
        let grid = grid_scan(&mu, &rect, 3, 2);
        assert_eq!(grid.len(), 6);
        assert_eq!((grid[0].re, grid[0].im), (0.0, -1.0));
        assert_eq!((grid[5].re, grid[5].im), (1.0, 1.0));
        assert!(Rect::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Rect::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }
}
