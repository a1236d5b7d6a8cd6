//! Named verification suites behind `jacobi0 verify`.

use std::sync::Arc;

use clap::ValueEnum;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use jacobi0::analysis::{count_form_zeros, delta_coefficients, embed_g, legendre_check, DEFAULT_Z0};
use jacobi0::jacobi::{
    coeff_relation_check, default_characteristics, default_matrices, filtration_index, graded_mul, verify_cocycles,
    verify_invariance, Evaluator, Filtration, SampleGrid, VerificationReport,
};
use jacobi0::klein::{
    gamma8_witnesses, klein_dual_path, klein_fixtures, klein_qexp, translation_ratio, verify_phi_x_modularity,
    DEFAULT_KLEIN_ORDER,
};
use jacobi0::qseries::QOrder;
use jacobi0::{EvalPoint, ModifiedJacobiForm, RationalPair, UnimodularMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Legendre,
    SigmaTransform,
    Cocycle,
    CoeffRelation,
    KleinDual,
    PhixModularity,
    Zeros,
    Filtration,
    Embed,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Legendre => "legendre",
            Suite::SigmaTransform => "sigma-transform",
            Suite::Cocycle => "cocycle",
            Suite::CoeffRelation => "coeff-relation",
            Suite::KleinDual => "klein-dual",
            Suite::PhixModularity => "phix-modularity",
            Suite::Zeros => "zeros",
            Suite::Filtration => "filtration",
            Suite::Embed => "embed",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        use Suite::*;
        match self {
            All => vec![
                Legendre,
                SigmaTransform,
                Cocycle,
                CoeffRelation,
                KleinDual,
                PhixModularity,
                Zeros,
                Filtration,
                Embed,
            ],
            s => vec![s],
        }
    }
}

/// Inputs shared by the suites.
pub struct Context {
    pub grid: SampleGrid,
    /// Caller-supplied matrices; `None` uses each suite's defaults.
    pub matrices: Option<Vec<UnimodularMatrix>>,
    /// Caller-supplied tolerance; `None` uses each suite's defaults.
    pub tolerance: Option<f64>,
    pub trunc: usize,
}

impl Context {
    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub pass: bool,
    pub reports: Vec<VerificationReport>,
}

/// A report for an exact check: deviation counts mismatches.
fn exact(identity: impl Into<String>, mismatches: usize, samples: usize) -> VerificationReport {
    VerificationReport {
        identity: identity.into(),
        max_abs_deviation: mismatches as f64,
        samples,
        pass: mismatches == 0 && samples > 0,
        tolerance: 0.0,
    }
}

fn failed(identity: impl Into<String>, tolerance: f64) -> VerificationReport {
    VerificationReport {
        identity: identity.into(),
        max_abs_deviation: f64::INFINITY,
        samples: 0,
        pass: false,
        tolerance,
    }
}

pub fn run(suite: Suite, ctx: &Context) -> SuiteResult {
    let reports = match suite {
        Suite::Legendre => legendre(ctx),
        Suite::SigmaTransform => sigma_transform(ctx),
        Suite::Cocycle => cocycle(ctx),
        Suite::CoeffRelation => coeff_relation(ctx),
        Suite::KleinDual => klein_dual(ctx),
        Suite::PhixModularity => phix_modularity(ctx),
        Suite::Zeros => zeros(ctx),
        Suite::Filtration => filtration(ctx),
        Suite::Embed => embed(ctx),
        Suite::All => unreachable!("expanded by the caller"),
    };
    SuiteResult {
        suite: suite.name(),
        pass: !reports.is_empty() && reports.iter().all(|r| r.pass),
        reports,
    }
}

fn tau_label(t: Complex64) -> String {
    format!("{}{:+}i", t.re, t.im)
}

fn legendre(ctx: &Context) -> Vec<VerificationReport> {
    let tol = ctx.tol(1e-9);
    ctx.grid
        .taus
        .iter()
        .map(|&t| {
            let id = format!("legendre tau={}", tau_label(t));
            match legendre_check(t) {
                Ok(r) => VerificationReport::from_deviations(id, [r.deviation], tol),
                Err(_) => failed(id, tol),
            }
        })
        .collect()
}

fn sigma_transform(ctx: &Context) -> Vec<VerificationReport> {
    let tol = ctx.tol(1e-8);
    let (s, t) = (UnimodularMatrix::S, UnimodularMatrix::T);
    let matrices = ctx.matrices.clone().unwrap_or_else(|| vec![s, t, s * t]);
    let vectors = [(1, 0), (0, 1), (1, 1), (2, 0)].map(|(a, b)| RationalPair::from_integers(a, b));
    let sigma = ModifiedJacobiForm::sigma(ctx.trunc);
    match verify_invariance(&sigma, &matrices, &vectors, &ctx.grid, tol) {
        Ok(r) => r.to_vec(),
        Err(_) => vec![failed("sigma-invariance", tol)],
    }
}

fn cocycle(ctx: &Context) -> Vec<VerificationReport> {
    let tol = ctx.tol(1e-9);
    let sigma = ModifiedJacobiForm::sigma(ctx.trunc);
    let control: Evaluator =
        Arc::new(|p: &EvalPoint| (0.3 * p.z() * p.z() + p.tau() * p.z()).exp() + p.z() * p.tau());
    let xs = default_characteristics();
    let ms = ctx.matrices.clone().unwrap_or_else(default_matrices);
    let mut out = Vec::new();
    for (name, f, k) in [("sigma", sigma.evaluator().clone(), -1), ("control", control, 2)] {
        match verify_cocycles(&f, k, &xs, &ms, &ctx.grid, tol) {
            Ok(reports) => out.extend(reports.into_iter().map(|mut r| {
                r.identity = format!("{} {name}", r.identity);
                r
            })),
            Err(_) => out.push(failed(format!("cocycle {name}"), tol)),
        }
    }
    out
}

fn coeff_relation(ctx: &Context) -> Vec<VerificationReport> {
    let s = ModifiedJacobiForm::sigma(ctx.trunc);
    let sq = match graded_mul(&s, &s) {
        Ok(f) => f,
        Err(_) => return vec![failed("coeff-relation", 0.0)],
    };
    [(&s, "S"), (&sq, "S^2")]
        .into_iter()
        .map(|(form, name)| {
            let series = &form.normalized().expect("series present").series;
            let id = format!("coeff-relation {name} k={}", form.weight());
            match coeff_relation_check(series, form.weight(), &[-2, -1, 1, 2]) {
                Ok(r) => exact(id, r.violations.len(), r.checked),
                Err(_) => failed(id, 0.0),
            }
        })
        .collect()
}

fn klein_dual(ctx: &Context) -> Vec<VerificationReport> {
    let tol = ctx.tol(1e-9);
    let mut out: Vec<_> = klein_fixtures()
        .into_iter()
        .map(|x| {
            let id = format!("klein-dual X={x}");
            match klein_dual_path(&x, DEFAULT_KLEIN_ORDER, &ctx.grid.taus) {
                Ok(d) => VerificationReport::from_deviations(id, [d], tol),
                Err(_) => failed(id, tol),
            }
        })
        .collect();
    let ord = klein_qexp(&RationalPair::from_fractions(1, 2, 0, 1), 4).ord();
    let ok = ord == QOrder::Finite(Rational64::new(-1, 8));
    out.push(exact("klein-ord X=1/2,0 equals -1/8", usize::from(!ok), 1));
    out
}

fn phix_modularity(ctx: &Context) -> Vec<VerificationReport> {
    let tol = ctx.tol(1e-8);
    let sigma = ModifiedJacobiForm::sigma(ctx.trunc.max(12));
    let x = RationalPair::from_fractions(1, 2, 0, 1);
    let matrices = ctx.matrices.clone().unwrap_or_else(gamma8_witnesses);
    let mut out = Vec::new();
    match verify_phi_x_modularity(&sigma, &x, &matrices, &ctx.grid.taus, tol) {
        Ok(r) => {
            let outside = r.members.iter().filter(|m| !**m).count();
            out.push(exact("subgroup-membership X=1/2,0 k=-1", outside, r.members.len()));
            out.push(r.transform);
            out.push(r.invariance);
            let id = format!("cusp-order >= {}", r.cusp_bound);
            out.push(exact(id, usize::from(!r.cusp_orders_ok), r.cusp_orders.len()));
        }
        Err(_) => out.push(failed("phi-x-modularity", tol)),
    }
    let ratio_tol = ctx.tol(1e-9);
    let half = |a, b| RationalPair::from_fractions(a, 2, b, 2);
    for (a, b) in [(half(1, 0), half(3, 0)), (half(0, 1), half(0, 3)), (half(1, 0), half(1, 0))] {
        let id = format!("translation-ratio {a} / {b}");
        match translation_ratio(&sigma, &a, &b, &ctx.grid.taus, ratio_tol) {
            Ok(t) => out.push(VerificationReport::from_deviations(
                id,
                [t.spread, t.modulus_error],
                ratio_tol,
            )),
            Err(_) => out.push(failed(id, ratio_tol)),
        }
    }
    out
}

fn zeros(_ctx: &Context) -> Vec<VerificationReport> {
    let sigma = ModifiedJacobiForm::sigma(4);
    let Ok(square) = graded_mul(&sigma, &sigma) else {
        return vec![failed("zeros", 0.01)];
    };
    let taus = [Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(0.5, 1.0)];
    let mut out = Vec::new();
    for tau in taus {
        for form in [&sigma, &square] {
            let id = format!("zeros {} tau={} expect {}", form.label(), tau_label(tau), -form.weight());
            match count_form_zeros(form, tau, DEFAULT_Z0) {
                Ok(r) => {
                    let mut rep = VerificationReport::from_deviations(id, [r.residual], 0.01);
                    rep.pass &= r.count == -form.weight() as i64;
                    out.push(rep);
                }
                Err(_) => out.push(failed(id, 0.01)),
            }
        }
    }
    out
}

fn filtration(ctx: &Context) -> Vec<VerificationReport> {
    let sigma = ModifiedJacobiForm::sigma(ctx.trunc);
    let one = ModifiedJacobiForm::constant_one(ctx.trunc);
    let mut cases = vec![(sigma.clone(), 2), (one, 1)];
    if let Ok(sq) = graded_mul(&sigma, &sigma) {
        cases.push((sq, 3));
    }
    cases
        .into_iter()
        .map(|(form, expected)| {
            let id = format!("filtration {} = {expected}", form.label());
            let ok = matches!(filtration_index(&form), Ok(Filtration::Index(m)) if m == expected);
            exact(id, usize::from(!ok), 1)
        })
        .collect()
}

fn embed(ctx: &Context) -> Vec<VerificationReport> {
    let sigma = ModifiedJacobiForm::sigma(ctx.trunc.max(8));
    let xs = [RationalPair::from_fractions(1, 2, 1, 2), RationalPair::from_fractions(1, 3, 2, 3)];
    let mut out = Vec::new();
    match embed_g(&sigma, &xs, 2) {
        Ok(e) => {
            let ords = e.orders();
            let negative = ords
                .iter()
                .filter(|o| !o.finite().is_some_and(|v| v >= Rational64::from_integer(0)))
                .count();
            out.push(exact("embed sigma m=2 ord >= 0", negative, ords.len()));
            let first = ords[0] == QOrder::Finite(Rational64::new(15, 8));
            out.push(exact("embed sigma first ord = 15/8", usize::from(!first), 1));
        }
        Err(_) => out.push(failed("embed sigma m=2", 0.0)),
    }
    let delta = delta_coefficients(4);
    let expected = [0, 1, -24, 252, -1472];
    let wrong = delta.iter().zip(expected).filter(|(a, b)| **a != (*b).into()).count();
    out.push(exact("delta coefficients 1,-24,252,-1472", wrong, expected.len()));
    out
}
