//! The three parameterized families of mixed-sign roots `ν` whose squares
//! separate subnormality of `W_√α` from subnormality of the Aluthge
//! transform, with the inequality test for positivity of `ν*tν`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::format;

use num_traits::{One, Signed, Zero};

use crate::measure::{AtomicCharge, Exponent, MeasureError};
use crate::rational::{int, ratio, Rational};
use crate::shifts::{certify_diagram, DiagramReport, Verdict};
use crate::sqrt::SqrtError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("b2 and b4 must be nonzero")]
    DegenerateCoefficient,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Sqrt(#[from] SqrtError),
}

/// `λ/(1+λ²) ≥ max(−b1·b3/b2², −b3·b5/b4²)`, exactly. These are the
/// coefficients of `λ⁴` and `λ⁸` in `ν*tν` for `ν = Σ b_k δ_{λ^k}`.
pub fn check_xx(b: &[Rational; 5], lambda: &Rational) -> Result<bool, FamilyError> {
    if lambda <= &Rational::one() {
        return Err(FamilyError::InvalidParameters("λ must exceed 1".to_string()));
    }
    if b[1].is_zero() || b[3].is_zero() {
        return Err(FamilyError::DegenerateCoefficient);
    }
    let lhs = lambda / (Rational::one() + lambda * lambda);
    let left = -(&b[0] * &b[2]) / (&b[1] * &b[1]);
    let right = -(&b[2] * &b[4]) / (&b[3] * &b[3]);
    Ok(lhs >= left.max(right))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyId {
    Ex51,
    Ex52,
    Ex61,
}

impl FamilyId {
    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Ex51 => "ex51",
            FamilyId::Ex52 => "ex52",
            FamilyId::Ex61 => "ex61",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyParams {
    /// `δ_λ + δ_{λ²} − x·δ_{λ³} + δ_{λ⁴} + δ_{λ⁵}`
    Ex51 { lambda: Rational, x: Rational },
    /// `δ_λ + α·δ_{λ²} − δ_{λ³} + α·δ_{λ⁴} + β·δ_{λ⁵}`
    Ex52 {
        lambda: Rational,
        alpha: Rational,
        beta: Rational,
    },
    /// `b1·δ_λ + b2·δ_{λ²} − δ_{λ³} + b4·δ_{λ⁴} + b5·δ_{λ⁵}`
    Ex61 { lambda: Rational, b: [Rational; 4] },
}

impl FamilyParams {
    pub fn id(&self) -> FamilyId {
        match self {
            FamilyParams::Ex51 { .. } => FamilyId::Ex51,
            FamilyParams::Ex52 { .. } => FamilyId::Ex52,
            FamilyParams::Ex61 { .. } => FamilyId::Ex61,
        }
    }

    pub fn lambda(&self) -> &Rational {
        match self {
            FamilyParams::Ex51 { lambda, .. }
            | FamilyParams::Ex52 { lambda, .. }
            | FamilyParams::Ex61 { lambda, .. } => lambda,
        }
    }

    /// The five coefficients of `ν` on `λ, …, λ⁵`.
    pub fn coefficients(&self) -> [Rational; 5] {
        match self {
            FamilyParams::Ex51 { x, .. } => [int(1), int(1), -x.clone(), int(1), int(1)],
            FamilyParams::Ex52 { alpha, beta, .. } => {
                [int(1), alpha.clone(), int(-1), alpha.clone(), beta.clone()]
            }
            FamilyParams::Ex61 { b, .. } => [
                b[0].clone(),
                b[1].clone(),
                int(-1),
                b[2].clone(),
                b[3].clone(),
            ],
        }
    }

    fn validate(&self) -> Result<(), FamilyError> {
        let bad = |m: &str| Err(FamilyError::InvalidParameters(m.to_string()));
        if self.lambda() <= &Rational::one() {
            return bad("λ must exceed 1");
        }
        match self {
            FamilyParams::Ex51 { x, .. } if !x.is_positive() => bad("x must be positive"),
            FamilyParams::Ex52 { alpha, beta, .. } if !alpha.is_positive() || !beta.is_positive() => {
                bad("α and β must be positive")
            }
            FamilyParams::Ex61 { b, .. } if b.iter().any(|v| !v.is_positive()) => {
                bad("b1, b2, b4, b5 must be positive")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    pub params: FamilyParams,
    pub nu: AtomicCharge,
    pub mu: AtomicCharge,
    pub nu_t_nu: AtomicCharge,
    pub mu_positive: bool,
    pub nu_t_nu_positive: bool,
    /// Atom count of `μ`.
    pub p: usize,
    /// Atom count predicted from the two cancelling coefficients
    /// `b1b4 + b2b3` (at `λ⁵`) and `b2b5 + b3b4` (at `λ⁷`): 9 minus the
    /// number that vanish. Other coefficients can vanish on region
    /// boundaries, so this may exceed `p`.
    pub p_predicted: usize,
    pub xx: bool,
    /// Whether the stated positivity region contains the parameters
    /// (`0 < x < 1/2` with `μ` 9-atomic, `α² ≥ 2β ≥ 2`; none for the third
    /// family, whose `μ` is a charge).
    pub region_predicted: Option<bool>,
    pub region_consistent: bool,
    pub diagram: DiagramReport,
    /// `μ` has no positive square root while `μ*tμ` has one.
    pub counterexample: bool,
}

pub fn family_nu(params: &FamilyParams) -> Result<AtomicCharge, FamilyError> {
    params.validate()?;
    let b = params.coefficients();
    Ok(AtomicCharge::on_integer_lattice(
        params.lambda().clone(),
        b.into_iter().enumerate().map(|(i, c)| (i as i64 + 1, c)),
    )?)
}

pub fn family_instance(params: FamilyParams) -> Result<FamilyInstance, FamilyError> {
    let nu = family_nu(&params)?;
    let b = params.coefficients();
    let mu = nu.convolve(&nu)?;
    let nu_t_nu = nu.convolve(&nu.scale_by_t()?)?;
    let mu_positive = mu.is_positive();
    let nu_t_nu_positive = nu_t_nu.is_positive();
    let p = mu.support_size();

    let c5 = &b[0] * &b[3] + &b[1] * &b[2];
    let c7 = &b[1] * &b[4] + &b[2] * &b[3];
    let p_predicted = 9 - usize::from(c5.is_zero()) - usize::from(c7.is_zero());
    let xx = check_xx(&b, params.lambda())?;

    let (region_predicted, region_consistent) = match &params {
        FamilyParams::Ex51 { x, .. } => {
            let inside = x < &ratio(1, 2);
            (Some(inside), inside == (mu_positive && p == 9))
        }
        FamilyParams::Ex52 { alpha, beta, .. } => {
            let two_beta = beta * int(2);
            let inside = alpha * alpha >= two_beta && two_beta >= int(2);
            (Some(inside), inside == mu_positive)
        }
        FamilyParams::Ex61 { .. } => (None, true),
    };

    let diagram = certify_diagram(&mu)?;
    let counterexample =
        diagram.sqrt_shift_subnormal == Verdict::False && diagram.aluthge_subnormal == Verdict::True;
    Ok(FamilyInstance {
        params,
        nu,
        mu,
        nu_t_nu,
        mu_positive,
        nu_t_nu_positive,
        p,
        p_predicted,
        xx,
        region_predicted,
        region_consistent,
        diagram,
        counterexample,
    })
}

/// Cartesian parameter grid, enumerated with `λ` outermost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyGrid {
    Ex51 {
        lambdas: Vec<Rational>,
        xs: Vec<Rational>,
    },
    Ex52 {
        lambdas: Vec<Rational>,
        alphas: Vec<Rational>,
        betas: Vec<Rational>,
    },
    Ex61 {
        lambdas: Vec<Rational>,
        bs: Vec<[Rational; 4]>,
    },
}

impl FamilyGrid {
    pub fn points(&self) -> Vec<FamilyParams> {
        let mut out = Vec::new();
        match self {
            FamilyGrid::Ex51 { lambdas, xs } => {
                for l in lambdas {
                    for x in xs {
                        out.push(FamilyParams::Ex51 {
                            lambda: l.clone(),
                            x: x.clone(),
                        });
                    }
                }
            }
            FamilyGrid::Ex52 {
                lambdas,
                alphas,
                betas,
            } => {
                for l in lambdas {
                    for a in alphas {
                        for b in betas {
                            out.push(FamilyParams::Ex52 {
                                lambda: l.clone(),
                                alpha: a.clone(),
                                beta: b.clone(),
                            });
                        }
                    }
                }
            }
            FamilyGrid::Ex61 { lambdas, bs } => {
                for l in lambdas {
                    for b in bs {
                        out.push(FamilyParams::Ex61 {
                            lambda: l.clone(),
                            b: b.clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScanResult {
    /// Confirmed counterexamples with their grid position.
    pub confirmed: Vec<(usize, FamilyInstance)>,
    pub errors: Vec<(usize, FamilyError)>,
    pub evaluated: usize,
}

impl ScanResult {
    /// Folds per-point outcomes (in any order) into a result sorted by grid
    /// position.
    pub fn collect(
        outcomes: impl IntoIterator<Item = (usize, Result<FamilyInstance, FamilyError>)>,
    ) -> Self {
        let mut result = ScanResult::default();
        for (i, outcome) in outcomes {
            result.evaluated += 1;
            match outcome {
                Ok(inst) if inst.counterexample => result.confirmed.push((i, inst)),
                Ok(_) => {}
                Err(e) => result.errors.push((i, e)),
            }
        }
        result.confirmed.sort_by_key(|(i, _)| *i);
        result.errors.sort_by_key(|(i, _)| *i);
        result
    }
}

pub fn scan(grid: &FamilyGrid) -> ScanResult {
    ScanResult::collect(
        grid.points()
            .into_iter()
            .enumerate()
            .map(|(i, p)| (i, family_instance(p))),
    )
}

/// Coefficients of `μ` at `λ²..λ¹⁰`, zeros included.
pub fn mu_profile(inst: &FamilyInstance) -> Vec<Rational> {
    (2..=10)
        .map(|k| inst.mu.coefficient_at(Exponent::integer(k)))
        .collect()
}

pub fn describe(params: &FamilyParams) -> String {
    use crate::rational::to_fraction_string as f;
    match params {
        FamilyParams::Ex51 { lambda, x } => format!("ex51 λ={} x={}", f(lambda), f(x)),
        FamilyParams::Ex52 {
            lambda,
            alpha,
            beta,
        } => format!("ex52 λ={} α={} β={}", f(lambda), f(alpha), f(beta)),
        FamilyParams::Ex61 { lambda, b } => format!(
            "ex61 λ={} b=({},{},-1,{},{})",
            f(lambda),
            f(&b[0]),
            f(&b[1]),
            f(&b[2]),
            f(&b[3])
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sqrt::charge_sqrt;
    use alloc::vec;

    fn b61() -> [Rational; 4] {
        [int(1), int(2), int(3), int(1)]
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&k| int(k)).collect()
    }

    #[test]
    fn xx_values() {
        let b = [int(1), int(1), ratio(-1, 5), int(1), int(1)];
        assert!(check_xx(&b, &int(2)).unwrap());
        let b = [int(1), int(2), int(-1), int(3), int(1)];
        assert!(check_xx(&b, &int(2)).unwrap());
        assert!(check_xx(&b, &ratio(41, 11)).unwrap());
        assert!(!check_xx(&b, &ratio(15, 4)).unwrap());
        let degenerate = [int(1), int(0), int(-1), int(3), int(1)];
        assert_eq!(check_xx(&degenerate, &int(2)), Err(FamilyError::DegenerateCoefficient));
    }

    #[test]
    fn first_family_at_one_fifth() {
        let inst = family_instance(FamilyParams::Ex51 {
            lambda: int(2),
            x: ratio(1, 5),
        })
        .unwrap();
        assert_eq!(
            mu_profile(&inst),
            vec![
                int(1),
                int(2),
                ratio(3, 5),
                ratio(8, 5),
                ratio(101, 25),
                ratio(8, 5),
                ratio(3, 5),
                int(2),
                int(1)
            ]
        );
        assert_eq!(inst.p, 9);
        assert!(inst.mu_positive && inst.nu_t_nu_positive && inst.xx);
        assert!(inst.counterexample && inst.region_consistent);
        let root = charge_sqrt(&inst.mu).unwrap();
        assert!(root.root == inst.nu || root.root == inst.nu.negated());
    }

    #[test]
    fn second_family_atom_counts() {
        let eight = family_instance(FamilyParams::Ex52 {
            lambda: int(2),
            alpha: int(3),
            beta: int(2),
        })
        .unwrap();
        assert_eq!(mu_profile(&eight), ints(&[1, 6, 7, 0, 23, 6, 5, 12, 4]));
        assert_eq!((eight.p, eight.p_predicted), (8, 8));

        let seven = family_instance(FamilyParams::Ex52 {
            lambda: int(2),
            alpha: int(2),
            beta: int(1),
        })
        .unwrap();
        assert_eq!(mu_profile(&seven), ints(&[1, 4, 2, 0, 11, 0, 2, 4, 1]));
        assert_eq!((seven.p, seven.p_predicted), (7, 7));
        assert!(seven.region_consistent && seven.counterexample);
    }

    #[test]
    fn third_family_is_a_charge() {
        let inst = family_instance(FamilyParams::Ex61 {
            lambda: int(2),
            b: b61(),
        })
        .unwrap();
        assert_eq!(mu_profile(&inst), ints(&[1, 4, 2, 2, 15, -2, 7, 6, 1]));
        assert!(!inst.mu_positive && inst.nu_t_nu_positive);
        assert!(!inst.diagram.w_alpha_subnormal);
        assert_eq!(inst.diagram.sqrt_shift_subnormal, Verdict::False);
        assert_eq!(inst.diagram.aluthge_subnormal, Verdict::True);
    }

    #[test]
    fn third_family_scan() {
        let grid = FamilyGrid::Ex61 {
            lambdas: vec![int(2), int(3), ratio(41, 11), ratio(15, 4)],
            bs: vec![b61()],
        };
        let result = scan(&grid);
        let lambdas: Vec<_> = result
            .confirmed
            .iter()
            .map(|(_, i)| i.params.lambda().clone())
            .collect();
        assert_eq!(lambdas, vec![int(2), int(3), ratio(41, 11)]);
        assert!(result.errors.is_empty());
    }

    #[test]
    fn invalid_and_empty() {
        assert!(matches!(
            family_instance(FamilyParams::Ex51 {
                lambda: int(1),
                x: ratio(1, 5)
            }),
            Err(FamilyError::InvalidParameters(_))
        ));
        let grid = FamilyGrid::Ex51 {
            lambdas: vec![],
            xs: vec![ratio(1, 5)],
        };
        assert_eq!(scan(&grid), ScanResult::default());
        let grid = FamilyGrid::Ex51 {
            lambdas: vec![int(2)],
            xs: vec![int(-1), ratio(1, 5)],
        };
        let r = scan(&grid);
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.confirmed.len(), 1);
        assert_eq!(r.confirmed[0].0, 1);
    }
}
