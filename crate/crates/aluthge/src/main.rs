use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use aluthge::expr::{parse_atoms, parse_measure, ExprError};
use aluthge::json;
use aluthge::run;
use aluthge_core::families::{family_instance, FamilyError, FamilyGrid, FamilyParams};
use aluthge_core::measure::{AtomicCharge, MeasureError, MomentSequence};
use aluthge_core::mellin::{mellin_eval, zero_count, ExpPolynomial, MellinError, Rect};
use aluthge_core::rational::{parse_rational, Rational};
use aluthge_core::shifts::{berger_recover, certify_diagram, RecoveryError};
use aluthge_core::sqrt::{aluthge_root, charge_sqrt, gamma_fibers, SqrtError};
use aluthge_core::suites::SuiteKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_traits::Zero;
use serde_json::{json, Value};

/// Exact square roots of atomic charges and subnormality of weighted shifts.
#[derive(Parser)]
#[command(name = "aluthge", version)]
struct Cli {
    /// Print an indented key/value listing instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Multiplicative convolution A*B.
    Convolve {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// A*A.
    Square {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// t·A.
    Tmul {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Power moments γ_0..γ_{n-1}.
    Moments {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        n: usize,
    },
    /// Square root certificate.
    Sqrt {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Root of A*tA.
    AluthgeRoot {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Subnormality verdicts for W_α, W_√α and the Aluthge transform.
    Certify {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Product fibers of the atoms of A.
    Fibers {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// One member of a counterexample family.
    Example {
        family: Family,
        #[arg(long, value_parser = rational_arg)]
        lambda: Rational,
        #[arg(long, value_parser = rational_arg)]
        x: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        alpha: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        beta: Option<Rational>,
        /// b1,b2,b4,b5
        #[arg(long, value_parser = quad_arg)]
        b: Option<[Rational; 4]>,
    },
    /// Grid sweep of a family; reports confirmed counterexamples.
    Scan {
        family: Family,
        #[arg(long, value_parser = list_arg)]
        lambdas: List,
        #[arg(long, value_parser = list_arg)]
        xs: Option<List>,
        #[arg(long, value_parser = list_arg)]
        alphas: Option<List>,
        #[arg(long, value_parser = list_arg)]
        betas: Option<List>,
        /// Semicolon-separated quadruples "b1,b2,b4,b5;…".
        #[arg(long, value_parser = quads_arg)]
        bs: Option<Quads>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Randomized property suite; exits 0 iff no violations.
    Suite {
        kind: Suite,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Recover a finitely atomic measure from moments "γ0,γ1,…".
    Recover {
        #[arg(long, value_parser = list_arg)]
        moments: List,
    },
    /// Evaluate the Mellin transform at z.
    Mellin {
        #[arg(allow_hyphen_values = true)]
        a: String,
        /// "re,im"
        #[arg(long, allow_hyphen_values = true, value_parser = point_arg)]
        z: (f64, f64),
    },
    /// Evaluate the Mellin transform on a grid and write CSV (re,im,abs,arg).
    MellinScan {
        #[arg(allow_hyphen_values = true)]
        a: String,
        /// "re_min,re_max,im_min,im_max"
        #[arg(long, allow_hyphen_values = true, value_parser = rect_arg)]
        rect: Rect,
        #[arg(long, default_value_t = 101)]
        nx: usize,
        #[arg(long, default_value_t = 101)]
        ny: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Count zeros of the Mellin transform inside a rectangle.
    Zeros {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true, value_parser = rect_arg)]
        rect: Rect,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Ex51,
    Ex52,
    Ex61,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Thm44,
    Lemmas,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).ok_or_else(|| format!("`{s}` is not a rational p/q"))
}

/// Comma-separated rationals.
#[derive(Clone)]
struct List(Vec<Rational>);

#[derive(Clone)]
struct Quads(Vec<[Rational; 4]>);

fn list_arg(s: &str) -> Result<List, String> {
    s.split(',').map(rational_arg).collect::<Result<_, _>>().map(List)
}

fn quad_arg(s: &str) -> Result<[Rational; 4], String> {
    list_arg(s)?
        .0
        .try_into()
        .map_err(|_| "expected four values b1,b2,b4,b5".to_string())
}

fn quads_arg(s: &str) -> Result<Quads, String> {
    s.split(';').map(quad_arg).collect::<Result<_, _>>().map(Quads)
}

fn floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers"));
    }
    Ok(v)
}

fn point_arg(s: &str) -> Result<(f64, f64), String> {
    let v = floats(s, 2)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err("coordinates must be finite".into());
    }
    Ok((v[0], v[1]))
}

fn rect_arg(s: &str) -> Result<Rect, String> {
    let v = floats(s, 4)?;
    Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Sqrt(#[from] SqrtError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Mellin(#[from] MellinError),
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn to_json(&self) -> Value {
        let kind = match self {
            CliError::Expr(ExprError::Syntax { .. }) => "SyntaxError".to_string(),
            CliError::Expr(ExprError::Measure(e)) | CliError::Measure(e) => variant(e),
            CliError::Sqrt(e) => variant(e),
            CliError::Family(e) => variant(e),
            CliError::Mellin(e) => variant(e),
            CliError::Recovery(e) => variant(e),
            CliError::Input(_) => "InvalidInput".to_string(),
            CliError::Csv(_) => "IoError".to_string(),
        };
        let mut err = json!({ "kind": kind, "message": self.to_string() });
        match self {
            CliError::Expr(ExprError::Syntax { offset, .. }) => err["offset"] = json!(offset),
            CliError::Recovery(e) => {
                if let Some(data) = json::recovery_error_data(e) {
                    err["data"] = data;
                }
            }
            _ => {}
        }
        json!({ "error": err })
    }
}

/// Variant name from the derived `Debug` output.
fn variant(e: &impl std::fmt::Debug) -> String {
    let d = format!("{e:?}");
    let end = d.find(|c: char| !c.is_alphanumeric()).unwrap_or(d.len());
    let name = &d[..end];
    // unwrap one level of wrapping variants such as Measure(..)
    match name {
        "Measure" | "Sqrt" => {
            let inner = &d[end + 1..];
            let e2 = inner.find(|c: char| !c.is_alphanumeric()).unwrap_or(inner.len());
            inner[..e2].to_string()
        }
        _ => name.to_string(),
    }
}

fn charge_arg(text: &str) -> Result<AtomicCharge, CliError> {
    Ok(parse_measure(text)?)
}

/// Places both charges on the lattice generated by all their atoms.
fn same_lattice(a: &str, b: &str) -> Result<(AtomicCharge, AtomicCharge), CliError> {
    let (a, b) = (parse_atoms(a)?, parse_atoms(b)?);
    let pad = |m: &[(Rational, Rational)], other: &[(Rational, Rational)]| {
        let mut atoms = m.to_vec();
        for (x, _) in other {
            if !m.iter().any(|(y, _)| y == x) {
                atoms.push((x.clone(), Rational::zero()));
            }
        }
        AtomicCharge::from_atoms(&atoms)
    };
    Ok((pad(&a, &b)?, pad(&b, &a)?))
}

fn execute(cmd: Cmd) -> Result<(Value, bool), CliError> {
    let ok = |v: Value| Ok((v, true));
    match cmd {
        Cmd::Convolve { a, b } => {
            let (a, b) = same_lattice(&a, &b)?;
            ok(json::charge(&a.convolve(&b)?))
        }
        Cmd::Square { a } => {
            let a = charge_arg(&a)?;
            ok(json::charge(&a.convolve(&a)?))
        }
        Cmd::Tmul { a } => ok(json::charge(&charge_arg(&a)?.scale_by_t()?)),
        Cmd::Moments { a, n } => {
            let g = charge_arg(&a)?.moments(n)?;
            ok(json!({ "moments": json::rationals(g.as_slice()) }))
        }
        Cmd::Sqrt { a } => ok(json::certificate(&charge_sqrt(&charge_arg(&a)?)?)),
        Cmd::AluthgeRoot { a } => ok(json::certificate(&aluthge_root(&charge_arg(&a)?)?)),
        Cmd::Certify { a } => ok(json::diagram(&certify_diagram(&charge_arg(&a)?)?)),
        Cmd::Fibers { a } => ok(json::fibers(&gamma_fibers(&charge_arg(&a)?))),
        Cmd::Example {
            family,
            lambda,
            x,
            alpha,
            beta,
            b,
        } => {
            let missing = |name: &str| CliError::Input(format!("--{name} is required for this family"));
            let params = match family {
                Family::Ex51 => FamilyParams::Ex51 {
                    lambda,
                    x: x.ok_or_else(|| missing("x"))?,
                },
                Family::Ex52 => FamilyParams::Ex52 {
                    lambda,
                    alpha: alpha.ok_or_else(|| missing("alpha"))?,
                    beta: beta.ok_or_else(|| missing("beta"))?,
                },
                Family::Ex61 => FamilyParams::Ex61 {
                    lambda,
                    b: b.ok_or_else(|| missing("b"))?,
                },
            };
            ok(json::family_instance(&family_instance(params)?))
        }
        Cmd::Scan {
            family,
            lambdas,
            xs,
            alphas,
            betas,
            bs,
            threads,
        } => {
            let missing = |name: &str| CliError::Input(format!("--{name} is required for this family"));
            let grid = match family {
                Family::Ex51 => FamilyGrid::Ex51 {
                    lambdas: lambdas.0,
                    xs: xs.ok_or_else(|| missing("xs"))?.0,
                },
                Family::Ex52 => FamilyGrid::Ex52 {
                    lambdas: lambdas.0,
                    alphas: alphas.ok_or_else(|| missing("alphas"))?.0,
                    betas: betas.ok_or_else(|| missing("betas"))?.0,
                },
                Family::Ex61 => FamilyGrid::Ex61 {
                    lambdas: lambdas.0,
                    bs: bs.ok_or_else(|| missing("bs"))?.0,
                },
            };
            let start = Instant::now();
            let result = run::with_threads(threads, || run::run_scan(&grid));
            ok(json::scan(&result, start.elapsed().as_millis()))
        }
        Cmd::Suite {
            kind,
            trials,
            seed,
            threads,
        } => {
            if trials == 0 {
                return Err(CliError::Input("--trials must be positive".into()));
            }
            let kind = match kind {
                Suite::Thm44 => SuiteKind::SignConstancy,
                Suite::Lemmas => SuiteKind::Lemmas,
            };
            let start = Instant::now();
            let report = run::with_threads(threads, || run::run_suite(kind, trials, seed));
            Ok((json::suite(&report, start.elapsed().as_millis()), report.passed()))
        }
        Cmd::Recover { moments } => {
            let rec = berger_recover(&MomentSequence::new(moments.0))?;
            ok(json::recovery(&rec))
        }
        Cmd::Mellin { a, z } => {
            let mu = charge_arg(&a)?;
            let z = Complex64::new(z.0, z.1);
            let w = mellin_eval(&mu, z);
            ok(json!({
                "z": [z.re, z.im],
                "re": w.re,
                "im": w.im,
                "abs": w.norm(),
                "arg": w.arg(),
                "magnitude_bound": ExpPolynomial::new(&mu).magnitude_bound(z),
            }))
        }
        Cmd::MellinScan {
            a,
            rect,
            nx,
            ny,
            out,
            threads,
        } => {
            let mu = charge_arg(&a)?;
            let samples = run::with_threads(threads, || run::mellin_grid(&mu, &rect, nx, ny));
            run::write_csv_file(&out, &samples)?;
            ok(json!({ "rows": samples.len(), "out": out.display().to_string() }))
        }
        Cmd::Zeros { a, rect, samples } => {
            let count = zero_count(&charge_arg(&a)?, &rect, samples)?;
            ok(json!({ "count": count }))
        }
    }
}

fn pretty(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(m) if !m.is_empty() => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        pretty(val, indent + 1, out);
                    }
                    Value::Array(a) if a.iter().any(|x| x.is_object()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        pretty(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k:<28} {}\n", scalar(val))),
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                pretty(item, indent + 1, out);
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, success) = match execute(cli.cmd) {
        Ok(r) => r,
        Err(e) => (e.to_json(), false),
    };
    if cli.pretty {
        let mut s = String::new();
        pretty(&value, 0, &mut s);
        print!("{s}");
    } else {
        println!("{value}");
    }
    if success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
