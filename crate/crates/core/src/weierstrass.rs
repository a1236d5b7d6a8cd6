//! Weierstrass functions on the lattice `[τ, 1]`.
//!
//! Everything is evaluated through `q`-products and `q`-sums, so no
//! conditionally convergent lattice sum is ever formed. The quasi-period
//! `η(τ,[τ,1])` is obtained from `η(1,[τ,1])` through the Legendre relation;
//! [`eta_tau_quasi_period`] recomputes it from the ζ-function alone and is
//! the independent check used by the Legendre suite.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};

use crate::error::{Error, Result};
use crate::qseries::{BiSeries, EvalPoint, FracQSeries, Truncation};
use crate::{e, TWO_PI_I};

const PI_I: Complex64 = Complex64::new(0.0, std::f64::consts::PI);

/// A characteristic `X = (λ μ) ∈ ℚ²`, always in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalPair {
    lambda: Rational64,
    mu: Rational64,
}

impl RationalPair {
    pub fn new(lambda: Rational64, mu: Rational64) -> Self {
        Self { lambda, mu }
    }

    pub fn from_integers(lambda: i64, mu: i64) -> Self {
        Self::new(Rational64::from_integer(lambda), Rational64::from_integer(mu))
    }

    /// `(a/b, c/d)`.
    pub fn from_fractions(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(Rational64::new(a, b), Rational64::new(c, d))
    }

    pub fn lambda(&self) -> Rational64 {
        self.lambda
    }

    pub fn mu(&self) -> Rational64 {
        self.mu
    }

    /// Least `N ≥ 1` with `X ∈ N⁻¹ℤ²`.
    pub fn level(&self) -> i64 {
        self.lambda.denom().lcm(self.mu.denom())
    }

    pub fn is_integral(&self) -> bool {
        self.lambda.is_integer() && self.mu.is_integer()
    }

    /// `det(X; Y) = λ_X μ_Y − μ_X λ_Y` (rows `X` then `Y`).
    pub fn det(&self, other: &Self) -> Rational64 {
        self.lambda * other.mu - self.mu * other.lambda
    }

    /// The lattice vector `λτ + μ`.
    pub fn point(&self, tau: Complex64) -> Complex64 {
        tau * to_f64(self.lambda) + to_f64(self.mu)
    }

    pub fn lambda_f64(&self) -> f64 {
        to_f64(self.lambda)
    }

    pub fn mu_f64(&self) -> f64 {
        to_f64(self.mu)
    }
}

pub(crate) fn to_f64(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

impl Add for RationalPair {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.lambda + o.lambda, self.mu + o.mu)
    }
}

impl Sub for RationalPair {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.lambda - o.lambda, self.mu - o.mu)
    }
}

impl Neg for RationalPair {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.lambda, -self.mu)
    }
}

impl fmt::Display for RationalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lambda, self.mu)
    }
}

/// Parses `"p/q"` or `"p"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational64::new(p, q))
        }
        None => s.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
    }
}

impl FromStr for RationalPair {
    type Err = Error;

    /// `"λ,μ"` with each entry `p/q` or an integer.
    fn from_str(s: &str) -> Result<Self> {
        let (l, m) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `λ,μ`, got `{s}`")))?;
        Ok(Self::new(parse_rational(l)?, parse_rational(m)?))
    }
}

/// The lattice `[τ, 1]` with the truncation policy for its expansions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    tau: Complex64,
    truncation: Truncation,
}

impl Lattice {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::InvalidTau(tau));
        }
        Ok(Self {
            tau,
            truncation: Truncation::default(),
        })
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub(crate) fn from_point(p: &EvalPoint) -> Self {
        Self {
            tau: p.tau(),
            truncation: p.truncation(),
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn q(&self) -> Complex64 {
        e(self.tau)
    }

    /// The point `(τ, z)` with this lattice's truncation policy.
    pub fn point(&self, z: Complex64) -> EvalPoint {
        EvalPoint::new(self.tau, z)
            .expect("lattice τ is validated")
            .with_truncation(self.truncation)
    }

    /// Whether `z` is within `1e-12` of `[τ, 1]`.
    pub fn contains(&self, z: Complex64) -> bool {
        let a = z.im / self.tau.im;
        let b = z.re - a * self.tau.re;
        let near = |x: f64| (x - x.round()).abs() < 1e-12 * (1.0 + x.abs());
        near(a) && near(b)
    }
}

/// `ψ(X)`: `−1` on `ℤ² − 2ℤ²`, `+1` everywhere else.
pub fn psi(x: &RationalPair) -> i32 {
    if !x.is_integral() {
        return 1;
    }
    let (l, m) = (x.lambda.to_integer(), x.mu.to_integer());
    if l.is_even() && m.is_even() {
        1
    } else {
        -1
    }
}

/// `η(1,[τ,1]) = (2πi)²/12 · (−1 + 24 Σ n qⁿ/(1 − qⁿ))`.
pub fn eta1(lat: &Lattice) -> Complex64 {
    let q = lat.q();
    let Truncation { tolerance, max_terms } = lat.truncation;
    let mut sum = Complex64::default();
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..=max_terms {
        qn *= q;
        let term = qn * n as f64 / (1.0 - qn);
        sum += term;
        if term.norm() < tolerance * (1.0 + 24.0 * sum.norm()) {
            break;
        }
    }
    TWO_PI_I * TWO_PI_I / 12.0 * (-1.0 + 24.0 * sum)
}

/// The expansion of `η(1,[τ,1])` through `q^order`, coefficients including
/// the `(2πi)²/12` factor.
pub fn eta1_series(order: usize) -> FracQSeries {
    let c = TWO_PI_I * TWO_PI_I / 12.0;
    let mut s = FracQSeries::new(1, 0, order as i64);
    s.add_term(0, -c);
    for m in 1..=order as i64 {
        let divisor_sum: i64 = (1..=m).filter(|d| m % d == 0).sum();
        s.add_term(m, c * 24.0 * divisor_sum as f64);
    }
    s
}

/// `η(τ,[τ,1]) = τ·η(1,[τ,1]) − 2πi`.
pub fn eta_tau(lat: &Lattice) -> Complex64 {
    lat.tau * eta1(lat) - TWO_PI_I
}

/// `η(λτ + μ, [τ,1]) = λ·η(τ,[τ,1]) + μ·η(1,[τ,1])`.
pub fn eta_point(x: &RationalPair, lat: &Lattice) -> Complex64 {
    let e1 = eta1(lat);
    let et = lat.tau * e1 - TWO_PI_I;
    et * x.lambda_f64() + e1 * x.mu_f64()
}

/// `ρ(τ,z) = exp(½ η(1,[τ,1]) z² − πi z)`.
pub fn rho(p: &EvalPoint) -> Complex64 {
    rho_with_eta1(eta1(&p.lattice()), p.z())
}

pub(crate) fn rho_with_eta1(eta1: Complex64, z: Complex64) -> Complex64 {
    (0.5 * eta1 * z * z - PI_I * z).exp()
}

/// The normalised product `(1 − ζ) ∏ (1 − qⁿζ)(1 − qⁿζ⁻¹)/(1 − qⁿ)²`,
/// i.e. `−2πi ρ⁻¹ σ`.
pub fn sigma_product(p: &EvalPoint) -> Complex64 {
    let q = p.q();
    let zeta = p.zeta();
    let zeta_inv = 1.0 / zeta;
    let Truncation { tolerance, max_terms } = p.truncation();
    let mut acc = 1.0 - zeta;
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 1..=max_terms {
        qn *= q;
        let a = qn * zeta;
        let b = qn * zeta_inv;
        let one_minus_qn = 1.0 - qn;
        acc *= (1.0 - a) * (1.0 - b) / (one_minus_qn * one_minus_qn);
        if a.norm().max(b.norm()) < tolerance {
            break;
        }
    }
    acc
}

/// `σ(τ,z) = σ(z,[τ,1]) = −(1/2πi) ρ(τ,z) (1 − ζ) ∏ …`.
pub fn sigma_eval(p: &EvalPoint) -> Complex64 {
    -rho(p) * sigma_product(p) / TWO_PI_I
}

/// `S = −2πi ρ⁻¹ σ` through `q^order`, with exact integer coefficients.
pub fn sigma_series(order: usize) -> BiSeries {
    let one = |n: usize, r: i64, c: i64| ((n, r), BigRational::from_integer(BigInt::from(c)));
    let mut s = BiSeries::from_exact_terms(order, [one(0, 0, 1), one(0, 1, -1)]).expect("row 0");
    let mut euler = BiSeries::one(order);
    for n in 1..=order {
        // (1 − qⁿζ)(1 − qⁿζ⁻¹) = 1 − qⁿζ − qⁿζ⁻¹ + q²ⁿ
        let mut terms = vec![one(0, 0, 1), one(n, 1, -1), one(n, -1, -1)];
        if 2 * n <= order {
            terms.push(one(2 * n, 0, 1));
        }
        let factor = BiSeries::from_exact_terms(order, terms).expect("in window");
        s = s.mul(&factor).expect("exact");
        let e_factor = BiSeries::from_exact_terms(order, [one(0, 0, 1), one(n, 0, -1)]).expect("in window");
        euler = euler.mul(&e_factor).expect("exact");
    }
    let denominator = euler.mul(&euler).expect("exact");
    s.mul(&denominator.invert_unit().expect("constant term 1")).expect("exact")
}

/// Weierstrass `ζ(z,[τ,1]) = σ′/σ` from the logarithmic derivative of the
/// product.
pub fn wzeta_eval(p: &EvalPoint) -> Result<Complex64> {
    let lat = p.lattice();
    if lat.contains(p.z()) {
        return Err(Error::LatticePole(p.z()));
    }
    Ok(wzeta_with_eta1(eta1(&lat), p))
}

fn wzeta_with_eta1(eta1: Complex64, p: &EvalPoint) -> Complex64 {
    let q = p.q();
    let zeta = p.zeta();
    let zeta_inv = 1.0 / zeta;
    let Truncation { tolerance, max_terms } = p.truncation();
    let mut bracket = zeta / (1.0 - zeta);
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 1..=max_terms {
        qn *= q;
        let a = qn * zeta;
        let b = qn * zeta_inv;
        bracket += a / (1.0 - a) - b / (1.0 - b);
        if a.norm().max(b.norm()) < tolerance {
            break;
        }
    }
    eta1 * p.z() - PI_I - TWO_PI_I * bracket
}

/// `η(τ,[τ,1])` as the quasi-period `ζ(z + τ) − ζ(z)` at base point `z`.
pub fn eta_tau_quasi_period(lat: &Lattice, base: Complex64) -> Result<Complex64> {
    Ok(wzeta_eval(&lat.point(base + lat.tau))? - wzeta_eval(&lat.point(base))?)
}

/// `η(1,[τ,1])` as the quasi-period `ζ(z + 1) − ζ(z)`.
pub fn eta1_quasi_period(lat: &Lattice, base: Complex64) -> Result<Complex64> {
    Ok(wzeta_eval(&lat.point(base + 1.0))? - wzeta_eval(&lat.point(base))?)
}

/// `true` when every coefficient of `series` is an integer.
pub fn is_integral_series(series: &BiSeries) -> bool {
    series.exact_terms().all(|(_, _, c)| c.is_integer())
}
