//! `jacobi0`: expansions, evaluations and verification suites for modified
//! Jacobi forms of index zero.

mod output;
mod parse;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use jacobi0::analysis::{count_form_zeros, embed_g, DEFAULT_Z0};
use jacobi0::jacobi::{coeff_relation_check, filtration_bound, filtration_index_of, graded_mul, Filtration, SampleGrid};
use jacobi0::json::{parse_series, SeriesDoc};
use jacobi0::klein::{klein_eval, klein_qexp, phi_x, phi_x_eval, DEFAULT_KLEIN_ORDER};
use jacobi0::qseries::{BiSeries, QOrder};
use jacobi0::weierstrass::is_integral_series;
use jacobi0::{EvalPoint, ModifiedJacobiForm, RationalPair, UnimodularMatrix};

use output::{num, re_im, render, series_table, Format, Table};
use suites::{Context, Suite, SuiteResult};

const DEFAULT_TRUNC: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "jacobi0", version, about = "Modified Jacobi forms of index zero")]
struct Cli {
    /// Tolerance for numerical checks (overrides each suite's default)
    #[arg(long, global = true, env = "JACOBI0_PRECISION", value_parser = parse::tolerance)]
    tol: Option<f64>,

    /// q-order of series expansions
    #[arg(long, global = true, value_parser = parse::trunc)]
    trunc: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormName {
    /// Weierstrass σ, weight −1
    Sigma,
    /// σ², weight −2
    Sigma2,
    /// σ³, weight −3
    Sigma3,
    /// the constant 1, weight 0
    One,
}

impl FormName {
    fn build(self, order: usize) -> ModifiedJacobiForm {
        let sigma = || ModifiedJacobiForm::sigma(order);
        let power = |n: usize| {
            (1..n).fold(sigma(), |acc, _| graded_mul(&acc, &sigma()).expect("exact series multiply"))
        };
        match self {
            FormName::Sigma => sigma(),
            FormName::Sigma2 => power(2),
            FormName::Sigma3 => power(3),
            FormName::One => ModifiedJacobiForm::constant_one(order),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the normalised development ρᵏφ as a bivariate series
    Expand {
        #[arg(value_enum, default_value_t = FormName::Sigma)]
        form: FormName,
    },
    /// Evaluate a form at (τ, z), directly and through its series
    Eval {
        #[arg(value_enum, default_value_t = FormName::Sigma)]
        form: FormName,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::tau)]
        tau: Complex64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        z: Complex64,
    },
    /// Product expansion of the Klein form 𝔨_X, or both evaluation paths at --tau
    Klein {
        #[arg(long = "X", allow_hyphen_values = true, value_parser = parse::pair)]
        x: RationalPair,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::tau)]
        tau: Option<Complex64>,
    },
    /// The specialisation φ_X(τ) = (φ|″X)(τ,0) as a fractional q-series
    Phix {
        #[arg(long, value_enum, default_value_t = FormName::Sigma)]
        form: FormName,
        #[arg(long = "X", allow_hyphen_values = true, value_parser = parse::pair)]
        x: RationalPair,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::tau)]
        tau: Option<Complex64>,
    },
    /// Run verification suites; exits 1 if any check fails
    Verify {
        #[arg(value_enum, conflicts_with = "suite_flag")]
        suite: Option<Suite>,
        #[arg(long = "suite", value_enum)]
        suite_flag: Option<Suite>,
        /// `default`, or a JSON file {"taus": [...], "zs": [...]} of complex strings
        #[arg(long, default_value = "default")]
        grid: String,
        /// Matrix "a,b,c,d"; repeat to replace the suite's matrix list
        #[arg(long, value_parser = parse::matrix)]
        matrix: Vec<UnimodularMatrix>,
    },
    /// Count zeros of z ↦ φ(τ₀, z) on a period cell by the argument principle
    Zeros {
        #[arg(long, value_enum, default_value_t = FormName::Sigma)]
        form: FormName,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::tau)]
        tau: Complex64,
        /// Base corner of the cell
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        z: Option<Complex64>,
    },
    /// Filtration index and coefficient checks for a form or a series file
    Classify {
        #[arg(long, value_enum, conflicts_with = "input")]
        form: Option<FormName>,
        /// A biseries JSON file holding ρᵏφ
        #[arg(long, requires = "weight")]
        input: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<i32>,
    },
    /// The embedding φ ↦ (φ_{X_j} Δᵐ)_j with cusp-order check
    Embed {
        #[arg(long, value_enum, default_value_t = FormName::Sigma)]
        form: FormName,
        #[arg(long)]
        m: u32,
        /// Characteristic "λ,μ"; give exactly 1 − k of them
        #[arg(long = "X", allow_hyphen_values = true, value_parser = parse::pair, required = true)]
        x: Vec<RationalPair>,
    },
}

/// A failed run: message and exit status.
struct Failure(String, u8);

impl From<jacobi0::Error> for Failure {
    fn from(e: jacobi0::Error) -> Self {
        use jacobi0::Error::*;
        let code = match e {
            Parse(_) | InvalidTau(_) | InvalidTolerance(_) | NotUnimodular { .. } | InvalidEmbedding(_) | Json(_) => 2,
            _ => 1,
        };
        Failure(e.to_string(), code)
    }
}

struct Done {
    text: String,
    ok: bool,
}

#[derive(Serialize)]
struct EvalOut {
    form: String,
    weight: i32,
    tau: [f64; 2],
    z: [f64; 2],
    value: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    series_value: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation: Option<f64>,
}

#[derive(Serialize)]
struct DualOut {
    index: String,
    tau: [f64; 2],
    direct: [f64; 2],
    series: [f64; 2],
    deviation: f64,
}

#[derive(Serialize)]
struct ClassifyOut {
    label: String,
    weight: i32,
    order: usize,
    filtration: Filtration,
    filtration_bound: String,
    integral: bool,
    coefficient_relation: jacobi0::jacobi::CoeffRelationReport,
}

#[derive(Serialize)]
struct EmbedComponent {
    index: String,
    ord: QOrder,
    series: SeriesDoc,
}

#[derive(Serialize)]
struct EmbedOut {
    weight: i32,
    m: u32,
    components: Vec<EmbedComponent>,
}

#[derive(Serialize)]
struct VerifyOut {
    pass: bool,
    suites: Vec<SuiteResult>,
}

#[derive(Deserialize)]
struct GridFile {
    taus: Vec<String>,
    #[serde(default)]
    zs: Vec<String>,
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn load_grid(arg: &str) -> Result<SampleGrid, Failure> {
    if arg == "default" {
        return Ok(SampleGrid::default());
    }
    let usage = |m: String| Failure(m, 2);
    let text = std::fs::read_to_string(arg).map_err(|e| usage(format!("cannot read grid `{arg}`: {e}")))?;
    let file: GridFile = serde_json::from_str(&text).map_err(|e| usage(format!("grid `{arg}`: {e}")))?;
    let taus = file.taus.iter().map(|s| parse::tau(s)).collect::<Result<Vec<_>, _>>().map_err(usage)?;
    let zs = file.zs.iter().map(|s| parse::complex(s)).collect::<Result<Vec<_>, _>>().map_err(usage)?;
    let default = SampleGrid::default();
    Ok(SampleGrid {
        taus: if taus.is_empty() { default.taus } else { taus },
        zs: if zs.is_empty() { default.zs } else { zs },
    })
}

fn series_output(doc: SeriesDoc, format: Format) -> Result<Done, Failure> {
    let text = render(&doc, || series_table(&doc), format).map_err(|e| Failure(e, 1))?;
    Ok(Done { text, ok: true })
}

fn run(cli: Cli) -> Result<Done, Failure> {
    let fmt = cli.output;
    let out = |e: String| Failure(e, 1);
    match cli.command {
        Command::Expand { form } => {
            let f = form.build(cli.trunc.unwrap_or(DEFAULT_TRUNC));
            series_output(SeriesDoc::from(&f.normalized().expect("named forms carry series").series), fmt)
        }
        Command::Eval { form, tau, z } => {
            let f = form.build(cli.trunc.unwrap_or(DEFAULT_TRUNC));
            let p = EvalPoint::new(tau, z)?;
            let value = f.eval(&p);
            let norm = f.normalized().expect("named forms carry series");
            let via_series = norm.scale * jacobi0::weierstrass::rho(&p).powi(-f.weight()) * norm.series.eval(&p);
            let o = EvalOut {
                form: f.label().to_string(),
                weight: f.weight(),
                tau: c2(tau),
                z: c2(z),
                value: c2(value),
                series_value: Some(c2(via_series)),
                deviation: f.series_deviation(&p),
            };
            let text = render(
                &o,
                || {
                    let mut t = Table::new(&["form", "tau_re", "tau_im", "z_re", "z_im", "re", "im", "deviation"]);
                    let mut row = vec![o.form.clone()];
                    row.extend(re_im(tau));
                    row.extend(re_im(z));
                    row.extend(re_im(value));
                    row.push(o.deviation.map(num).unwrap_or_default());
                    t.push(row);
                    t
                },
                fmt,
            )
            .map_err(out)?;
            Ok(Done { text, ok: true })
        }
        Command::Klein { x, tau } => {
            let order = cli.trunc.unwrap_or(DEFAULT_KLEIN_ORDER);
            let series = klein_qexp(&x, order);
            match tau {
                None => series_output(SeriesDoc::from(&series), fmt),
                Some(t) => dual_output(x, t, klein_eval(&x, t)?, series.eval(t), cli.tol.unwrap_or(1e-9), fmt),
            }
        }
        Command::Phix { form, x, tau } => {
            let f = form.build(cli.trunc.unwrap_or(20));
            let series = phi_x(&f, &x)?;
            match tau {
                None => series_output(SeriesDoc::from(&series), fmt),
                Some(t) => dual_output(x, t, phi_x_eval(&f, &x, t)?, series.eval(t), cli.tol.unwrap_or(1e-8), fmt),
            }
        }
        Command::Verify {
            suite,
            suite_flag,
            grid,
            matrix,
        } => {
            let Some(suite) = suite.or(suite_flag) else {
                return Err(Failure("a suite name is required (positional or --suite)".into(), 2));
            };
            let ctx = Context {
                grid: load_grid(&grid)?,
                matrices: (!matrix.is_empty()).then_some(matrix),
                tolerance: cli.tol,
                trunc: cli.trunc.unwrap_or(DEFAULT_TRUNC),
            };
            let results: Vec<SuiteResult> = suite.expand().into_iter().map(|s| suites::run(s, &ctx)).collect();
            let o = VerifyOut {
                pass: results.iter().all(|r| r.pass),
                suites: results,
            };
            let text = render(
                &o,
                || {
                    let mut t = Table::new(&["suite", "identity", "max_abs_deviation", "samples", "pass", "tolerance"]);
                    for s in &o.suites {
                        for r in &s.reports {
                            t.push(vec![
                                s.suite.to_string(),
                                r.identity.clone(),
                                num(r.max_abs_deviation),
                                r.samples.to_string(),
                                r.pass.to_string(),
                                num(r.tolerance),
                            ]);
                        }
                    }
                    t
                },
                fmt,
            )
            .map_err(out)?;
            Ok(Done { text, ok: o.pass })
        }
        Command::Zeros { form, tau, z } => {
            let f = form.build(4);
            let r = count_form_zeros(&f, tau, z.unwrap_or(DEFAULT_Z0))?;
            let text = render(
                &r,
                || {
                    let mut t = Table::new(&[
                        "tau0_re", "tau0_im", "z0_re", "z0_im", "integral_re", "integral_im", "count", "residual", "retries",
                    ]);
                    let mut row: Vec<String> = [r.tau0, r.z0, r.integral].iter().flatten().map(|v| num(*v)).collect();
                    row.extend([r.count.to_string(), num(r.residual), r.retries.to_string()]);
                    t.push(row);
                    t
                },
                fmt,
            )
            .map_err(out)?;
            Ok(Done {
                text,
                ok: r.count == -f.weight() as i64,
            })
        }
        Command::Classify { form, input, weight } => {
            let order = cli.trunc.unwrap_or(DEFAULT_TRUNC);
            let (label, k, series): (String, i32, BiSeries) = match (form, input) {
                (_, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure(format!("cannot read {}: {e}", path.display()), 2))?;
                    let series = parse_series(&text)?.into_biseries()?;
                    (path.display().to_string(), weight.expect("required by clap"), series)
                }
                (f, None) => {
                    let f = f.unwrap_or(FormName::Sigma).build(order);
                    let s = f.normalized().expect("named forms carry series").series.clone();
                    (f.label().to_string(), weight.unwrap_or(f.weight()), s)
                }
            };
            let relation = if series.field() == jacobi0::qseries::FieldTag::Exact {
                coeff_relation_check(&series, k, &[-2, -1, 1, 2])?
            } else {
                return Err(Failure("classify needs an exact series".into(), 2));
            };
            let o = ClassifyOut {
                label,
                weight: k,
                order: series.order(),
                filtration: filtration_index_of(&series, k),
                filtration_bound: filtration_bound(&series, k).to_string(),
                integral: is_integral_series(&series),
                coefficient_relation: relation,
            };
            let text = render(
                &o,
                || {
                    let mut t = Table::new(&["label", "weight", "order", "filtration", "bound", "integral", "violations"]);
                    t.push(vec![
                        o.label.clone(),
                        o.weight.to_string(),
                        o.order.to_string(),
                        match o.filtration {
                            Filtration::Index(m) => m.to_string(),
                            Filtration::ExceedsWindow => "exceeds window".into(),
                        },
                        o.filtration_bound.clone(),
                        o.integral.to_string(),
                        o.coefficient_relation.violations.len().to_string(),
                    ]);
                    t
                },
                fmt,
            )
            .map_err(out)?;
            Ok(Done { text, ok: true })
        }
        Command::Embed { form, m, x } => {
            let f = form.build(cli.trunc.unwrap_or(DEFAULT_TRUNC));
            let e = embed_g(&f, &x, m)?;
            let o = EmbedOut {
                weight: e.weight,
                m: e.m,
                components: e
                    .indices
                    .iter()
                    .zip(&e.components)
                    .map(|(x, s)| EmbedComponent {
                        index: x.to_string(),
                        ord: s.ord(),
                        series: SeriesDoc::from(s),
                    })
                    .collect(),
            };
            let text = render(
                &o,
                || {
                    let mut t = Table::new(&["index", "weight", "ord"]);
                    for c in &o.components {
                        t.push(vec![c.index.clone(), o.weight.to_string(), c.ord.to_string()]);
                    }
                    t
                },
                fmt,
            )
            .map_err(out)?;
            Ok(Done { text, ok: true })
        }
    }
}

fn dual_output(x: RationalPair, tau: Complex64, direct: Complex64, series: Complex64, tol: f64, fmt: Format) -> Result<Done, Failure> {
    let deviation = jacobi0::jacobi::deviation(direct, series);
    let o = DualOut {
        index: x.to_string(),
        tau: c2(tau),
        direct: c2(direct),
        series: c2(series),
        deviation,
    };
    let text = render(
        &o,
        || {
            let mut t = Table::new(&["index", "tau_re", "tau_im", "direct_re", "direct_im", "series_re", "series_im", "deviation"]);
            let mut row = vec![o.index.clone()];
            row.extend(re_im(tau));
            row.extend(re_im(direct));
            row.extend(re_im(series));
            row.push(num(deviation));
            t.push(row);
            t
        },
        fmt,
    )
    .map_err(|e| Failure(e, 1))?;
    Ok(Done {
        text,
        ok: deviation < tol,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(done) => {
            print!("{}", done.text);
            if !done.text.ends_with('\n') {
                println!();
            }
            if done.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
