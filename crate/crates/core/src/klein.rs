//! Klein forms and the specialisations `φ_X(τ) = (φ|″ₖX)(τ,0)`.

use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::{cocycle_factor, deviation, slash_dprime, ModifiedJacobiForm, UnimodularMatrix, VerificationReport};
use crate::qseries::{EvalPoint, FracQSeries, QOrder};
use crate::weierstrass::{sigma_eval, to_f64, RationalPair};
use crate::{e_real, TWO_PI_I};

/// Default `q`-order for product expansions.
pub const DEFAULT_KLEIN_ORDER: usize = 10;

/// The default `τ`-grid used by the Klein and `φ_X` checks.
pub fn default_taus() -> Vec<Complex64> {
    let c = Complex64::new;
    vec![c(0.0, 1.0), c(0.0, 2.0), c(0.5, 1.0), c(1.0 / 3.0, 2.0)]
}

/// Indices used for the Klein dual-path sweep.
pub fn klein_fixtures() -> Vec<RationalPair> {
    vec![
        RationalPair::from_fractions(1, 2, 0, 1),
        RationalPair::from_fractions(0, 1, 1, 2),
        RationalPair::from_fractions(1, 2, 1, 2),
        RationalPair::from_fractions(1, 3, 1, 3),
        RationalPair::from_fractions(1, 5, 2, 5),
    ]
}

/// `𝔨_X`, weight −1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KleinForm {
    index: RationalPair,
}

impl KleinForm {
    pub const WEIGHT: i32 = -1;

    pub fn new(index: RationalPair) -> Self {
        Self { index }
    }

    pub fn index(&self) -> RationalPair {
        self.index
    }

    pub fn level(&self) -> i64 {
        self.index.level()
    }

    /// Identically zero exactly on `ℤ²`.
    pub fn is_degenerate(&self) -> bool {
        self.index.is_integral()
    }

    pub fn eval(&self, tau: Complex64) -> Result<Complex64> {
        klein_eval(&self.index, tau)
    }

    pub fn qexp(&self, order: usize) -> FracQSeries {
        klein_qexp(&self.index, order)
    }
}

/// `𝔨_X(τ) = ψ(X) exp(−½ η(λτ+μ) (λτ+μ)) σ(τ, λτ+μ)`, computed as
/// `(σ|″₋₁X)(τ,0)`.
pub fn klein_eval(x: &RationalPair, tau: Complex64) -> Result<Complex64> {
    let p = EvalPoint::new(tau, Complex64::default())?;
    if x.is_integral() {
        return Ok(Complex64::default());
    }
    let sigma: crate::jacobi::Evaluator = Arc::new(sigma_eval);
    Ok(slash_dprime(&sigma, KleinForm::WEIGHT, *x)(&p))
}

/// `φ_{X+X′} / φ_X` for integral `X′`, for any `φ` of weight `k` that is
/// invariant under `|″ₖ` on `ℤ²`.
pub fn translation_factor(x: &RationalPair, shift: &RationalPair, k: i32) -> Complex64 {
    debug_assert!(shift.is_integral());
    1.0 / cocycle_factor(shift, x, k)
}

/// Splits `X` as `X₀ + (j, 0)` with `0 ≤ λ₀ < 1`.
fn reduce_lambda(x: &RationalPair) -> (RationalPair, RationalPair) {
    let j = x.lambda().floor();
    let shift = RationalPair::new(j, Rational64::from_integer(0));
    (*x - shift, shift)
}

/// `𝔨_X` as a fractional `q`-series through `q^order`:
///
/// ```text
/// −(1/2πi) e(μ(λ−1)/2) q^{λ(λ−1)/2} (1 − e(μ)q^λ)
///     ∏ₙ (1 − e(μ)q^{n+λ})(1 − e(−μ)q^{n−λ}) / (1 − qⁿ)²
/// ```
///
/// with `λ` first moved into `[0, 1)`. The `−1/(2πi)` is carried as the
/// series scale, so raw coefficients start with `e(μ(λ−1)/2)(1 − e(μ)q^λ)`.
/// An integral `X` yields the zero series.
pub fn klein_qexp(x: &RationalPair, order: usize) -> FracQSeries {
    let scale = -1.0 / TWO_PI_I;
    if x.is_integral() {
        return FracQSeries::new(1, 0, order as i64).scaled(scale);
    }
    let (x0, shift) = reduce_lambda(x);
    let reduction = translation_factor(&x0, &shift, KleinForm::WEIGHT);
    let (lambda, mu) = (x0.lambda(), x0.mu_f64());
    let den = *lambda.denom();
    let d = (2 * den * den) as u64;
    let units = |r: Rational64| {
        let v = r * Rational64::from_integer(d as i64);
        debug_assert!(v.is_integer());
        v.to_integer()
    };
    let lead_exp = units(lambda * (lambda - 1) / 2);
    let lam = units(lambda);
    let full = d as i64;
    let top = order as i64 * full;
    // factors below are power series; they are needed through top − lead_exp
    let window = top - lead_exp;
    let zmu = e_real(mu);
    let zmu_inv = e_real(-mu);
    let mut acc = FracQSeries::one_minus(d, lam, zmu, window);
    let mut n = 1i64;
    while (n - 1) * full <= window {
        let k = n * full;
        acc = acc.mul(&FracQSeries::one_minus(d, k + lam, zmu, window));
        acc = acc.mul(&FracQSeries::one_minus(d, k - lam, zmu_inv, window));
        let geometric = FracQSeries::from_terms(
            d,
            window,
            (0..).map(|j| j * k).take_while(|&e| e <= window).map(|e| (e, Complex64::new(1.0, 0.0))),
        );
        acc = acc.mul(&geometric).mul(&geometric);
        n += 1;
    }
    let lead = e_real(to_f64(x0.mu() * (lambda - 1) / 2)) * reduction;
    FracQSeries::monomial(d, lead_exp, lead, i64::MAX / 4).mul(&acc).scaled(scale)
}

/// `φ_X(τ) = (φ|″ₖX)(τ,0)` through the evaluator.
pub fn phi_x_eval(form: &ModifiedJacobiForm, x: &RationalPair, tau: Complex64) -> Result<Complex64> {
    let p = EvalPoint::new(tau, Complex64::default())?;
    Ok(form.slash_dprime(*x)(&p))
}

/// `φ_X` as a fractional `q`-series from the normalised development:
///
/// ```text
/// (ψ(X) e(½v(1−u)))ᵏ Σ c(n,r) e(vr) q^{n + ur + ku(1−u)/2},   X = (u, v)
/// ```
///
/// `u` is first moved into `[0, 1)`; the constant root of unity relating
/// the two characteristics is folded into the coefficients. The scale of
/// the normalised series is kept as the series scale. Exponents are kept
/// only where every contributing `(n, r)` lies inside the series window,
/// estimated from the support envelope at the last stored order.
pub fn phi_x(form: &ModifiedJacobiForm, x: &RationalPair) -> Result<FracQSeries> {
    let norm = form.require_series()?;
    let k = form.weight();
    let (x0, shift) = reduce_lambda(x);
    let reduction = translation_factor(&x0, &shift, k);
    let (u, v) = (x0.lambda(), x0.mu());
    let den = *u.denom();
    let d = 2 * den * den;
    let series = &norm.series;
    let order = series.order() as i64;
    let env = series.support_profile().envelope;
    let reach = *env.last().unwrap_or(&0) as i64 + 1;
    let shift_exp = Rational64::from_integer(k as i64) * u * (Rational64::from_integer(1) - u) / 2;
    let to_units = |r: Rational64| (r * Rational64::from_integer(d)).to_integer();
    let top = Rational64::from_integer(order + 1) - u * reach + shift_exp;
    // the largest exponent known complete, in units of 1/d
    let top_units = (top * Rational64::from_integer(d)).ceil().to_integer() - 1;
    let sign = if crate::weierstrass::psi(&x0) == -1 && k % 2 != 0 { -1.0 } else { 1.0 };
    let prefactor = (e_real(to_f64(v * (Rational64::from_integer(1) - u) / 2)) * sign).powi(k) * reduction;
    let mut out = FracQSeries::new(d as u64, top_units, top_units);
    for (n, r, c) in series.complex_terms() {
        let exp = Rational64::from_integer(n as i64) + u * r + shift_exp;
        let phase = e_real(to_f64((v * r).fract()));
        out.add_term(to_units(exp), prefactor * phase * c);
    }
    if out.terms().next().is_none() {
        return Err(Error::OutOfWindow { n: top_units, order: series.order() });
    }
    Ok(out.scaled(norm.scale))
}

/// `{M : XM ≡ X (mod 2ℤ²), (k/2)·det(X; XM − X) ∈ ℤ}`, tested through the
/// three quantities `(a−1)λ + cμ`, `bλ + (d−1)μ`, `k(bλ² + (d−a)λμ − cμ²)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CongruenceCondition {
    pub x: RationalPair,
    pub k: i32,
}

impl CongruenceCondition {
    pub fn new(x: RationalPair, k: i32) -> Self {
        Self { x, k }
    }

    pub fn quantities(&self, m: &UnimodularMatrix) -> [Rational64; 3] {
        let [a, b, c, d] = m.entries().map(Rational64::from_integer);
        let (l, mu) = (self.x.lambda(), self.x.mu());
        let one = Rational64::from_integer(1);
        [
            (a - one) * l + c * mu,
            b * l + (d - one) * mu,
            Rational64::from_integer(self.k as i64) * (b * l * l + (d - a) * l * mu - c * mu * mu),
        ]
    }
}

pub fn subgroup_member(cond: &CongruenceCondition, m: &UnimodularMatrix) -> bool {
    cond.quantities(m)
        .iter()
        .all(|q| q.is_integer() && q.to_integer().is_even())
}

/// Stored witnesses in `Γ(8)`: translations by `±8`, their transposes, and
/// one matrix with all entries nonzero.
pub fn gamma8_witnesses() -> Vec<UnimodularMatrix> {
    [(1, 8, 0, 1), (1, -8, 0, 1), (1, 0, 8, 1), (1, 0, -8, 1), (9, 8, -8, -7)]
        .into_iter()
        .map(|(a, b, c, d)| UnimodularMatrix::new(a, b, c, d).expect("unimodular witness"))
        .collect()
}

/// Measured `ξ = φ_X/φ_{X′}` on a `τ`-grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranslationRatio {
    pub xi: [f64; 2],
    /// Largest `|ratio(τ) − ratio(τ₀)|` across the grid.
    pub spread: f64,
    /// `||ξ| − 1|`.
    pub modulus_error: f64,
    /// Least `d` with `|ξᵈ − 1| < tolerance`, searched up to `4N²|k|`.
    pub order: Option<u64>,
    pub constant: bool,
    pub samples: usize,
}

impl TranslationRatio {
    pub fn xi(&self) -> Complex64 {
        Complex64::new(self.xi[0], self.xi[1])
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        self.constant && self.modulus_error < tolerance
    }
}

pub fn translation_ratio(
    form: &ModifiedJacobiForm,
    x: &RationalPair,
    x2: &RationalPair,
    taus: &[Complex64],
    tolerance: f64,
) -> Result<TranslationRatio> {
    if !(*x - *x2).is_integral() {
        return Err(Error::Parse(format!("{x} and {x2} differ by a non-integral vector")));
    }
    let mut ratios = Vec::with_capacity(taus.len());
    for &tau in taus {
        let num = phi_x_eval(form, x, tau)?;
        let den = phi_x_eval(form, x2, tau)?;
        if den.norm() < 1e-300 || !den.is_finite() {
            return Err(Error::ZeroDenominator);
        }
        ratios.push(num / den);
    }
    let xi = *ratios.first().ok_or(Error::ZeroDenominator)?;
    let spread = ratios.iter().map(|r| (r - xi).norm()).fold(0.0, f64::max);
    let modulus_error = (xi.norm() - 1.0).abs();
    let n = x.level().lcm(&x2.level()) as u64;
    let bound = (4 * n * n * form.weight().unsigned_abs() as u64).max(1);
    let order = (1..=bound).find(|&d| (xi.powu(d as u32) - 1.0).norm() < tolerance);
    Ok(TranslationRatio {
        xi: [xi.re, xi.im],
        spread,
        modulus_error,
        order,
        constant: spread < tolerance,
        samples: ratios.len(),
    })
}

/// Outcome of the `φ_X` modularity sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiXModularityReport {
    pub index: String,
    pub weight: i32,
    pub matrices: Vec<String>,
    /// `subgroup_member` for each matrix, in order.
    pub members: Vec<bool>,
    /// `(cτ+d)^{−k} φ_X(Mτ)` against `φ_{XM}(τ)`.
    pub transform: VerificationReport,
    /// `φ_{XM}(τ)` against `φ_X(τ)`.
    pub invariance: VerificationReport,
    /// `ord_q φ_{XM}` for each matrix.
    pub cusp_orders: Vec<QOrder>,
    /// `min{n − r₀(n)} + k/8`.
    pub cusp_bound: String,
    pub cusp_orders_ok: bool,
    pub pass: bool,
}

pub fn verify_phi_x_modularity(
    form: &ModifiedJacobiForm,
    x: &RationalPair,
    matrices: &[UnimodularMatrix],
    taus: &[Complex64],
    tolerance: f64,
) -> Result<PhiXModularityReport> {
    let k = form.weight();
    let cond = CongruenceCondition::new(*x, k);
    let members: Vec<bool> = matrices.iter().map(|m| subgroup_member(&cond, m)).collect();
    let mut transform = Vec::new();
    let mut invariance = Vec::new();
    let mut cusp_orders = Vec::new();
    let series = &form.require_series()?.series;
    let bound = crate::jacobi::filtration_bound(series, k);
    let mut cusp_ok = true;
    for m in matrices {
        let xm = x.times(m);
        for &tau in taus {
            let lhs = m.automorphy(tau).powi(-k) * phi_x_eval(form, x, m.act(tau))?;
            let at_xm = phi_x_eval(form, &xm, tau)?;
            transform.push(deviation(lhs, at_xm));
            invariance.push(deviation(at_xm, phi_x_eval(form, x, tau)?));
        }
        let ord = phi_x(form, &xm)?.ord();
        cusp_ok &= match ord {
            QOrder::Finite(o) => o >= bound,
            QOrder::ZeroSeries => true,
        };
        cusp_orders.push(ord);
    }
    let transform = VerificationReport::from_deviations("phi-x-transform", transform, tolerance);
    let invariance = VerificationReport::from_deviations("phi-x-invariance", invariance, tolerance);
    let pass = members.iter().all(|&b| b) && transform.pass && invariance.pass && cusp_ok;
    Ok(PhiXModularityReport {
        index: x.to_string(),
        weight: k,
        matrices: matrices.iter().map(|m| m.to_string()).collect(),
        members,
        transform,
        invariance,
        cusp_orders,
        cusp_bound: bound.to_string(),
        cusp_orders_ok: cusp_ok,
        pass,
    })
}

/// Largest scaled difference between [`klein_eval`] and the evaluated
/// product expansion over `taus`.
pub fn klein_dual_path(x: &RationalPair, order: usize, taus: &[Complex64]) -> Result<f64> {
    let series = klein_qexp(x, order);
    let mut worst = 0.0f64;
    for &tau in taus {
        worst = worst.max(deviation(klein_eval(x, tau)?, series.eval(tau)));
    }
    Ok(worst)
}
