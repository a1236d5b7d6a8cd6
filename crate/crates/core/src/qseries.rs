//! Truncated series in `q = e(τ)` and `ζ = e(z)`.
//!
//! [`BiSeries`] holds a bivariate Fourier–Laurent development
//! `Σ_{0≤n≤N} Σ_r c(n,r) qⁿ ζʳ` over one of two coefficient fields: exact
//! rationals (bit-reproducible arithmetic) or binary64 complex numbers.
//! [`FracQSeries`] holds a univariate series `scale · Σ_e c(e) q^{e/D}` whose
//! exponents may be negative; these are the shapes of Klein forms, `φ_X` and
//! powers of `Δ`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::weierstrass::Lattice;
use crate::{e, TWO_PI_I};

/// Default relative cut-off for infinite sums and products.
pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-17;
/// Default cap on the number of factors or terms in an infinite expansion.
pub const DEFAULT_MAX_TERMS: usize = 20_000;
/// Relative threshold below which a complex coefficient counts as zero when
/// locating the order of a [`FracQSeries`].
pub const DEFAULT_ORDER_TOLERANCE: f64 = 1e-10;

/// When to stop summing a geometric-type expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    pub tolerance: f64,
    pub max_terms: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TRUNCATION_TOLERANCE,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

impl Truncation {
    pub fn new(tolerance: f64, max_terms: usize) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidTolerance(tolerance));
        }
        Ok(Self {
            tolerance,
            max_terms: max_terms.max(1),
        })
    }
}

/// A point `(τ, z) ∈ ℌ × ℂ` together with the truncation policy used by
/// every evaluator that consumes it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPoint {
    tau: Complex64,
    z: Complex64,
    truncation: Truncation,
}

impl EvalPoint {
    pub fn new(tau: Complex64, z: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::InvalidTau(tau));
        }
        Ok(Self {
            tau,
            z,
            truncation: Truncation::default(),
        })
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    /// Same truncation policy at a new point. `tau` must lie in ℌ; callers
    /// only pass images of ℌ under SL₂(ℤ) or unchanged `τ`.
    pub(crate) fn moved(&self, tau: Complex64, z: Complex64) -> Self {
        debug_assert!(tau.im > 0.0, "moved point left the upper half-plane: {tau}");
        Self {
            tau,
            z,
            truncation: self.truncation,
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn q(&self) -> Complex64 {
        e(self.tau)
    }

    pub fn zeta(&self) -> Complex64 {
        e(self.z)
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::from_point(self)
    }
}

/// Coefficient field of a [`BiSeries`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Exact,
    Complex,
}

/// Minimal arithmetic shared by the two coefficient fields.
trait Ring: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (self.norm() > 0.0).then(|| self.inv())
    }
}

type TermMap<C> = BTreeMap<(usize, i64), C>;

fn convolve<C: Ring>(a: &TermMap<C>, b: &TermMap<C>, order: usize) -> TermMap<C> {
    let mut out: TermMap<C> = BTreeMap::new();
    for (&(n, r), ca) in a {
        if n > order {
            break;
        }
        for (&(m, s), cb) in b.range((0, i64::MIN)..=(order - n, i64::MAX)) {
            let slot = out.entry((n + m, r + s)).or_insert_with(C::zero);
            *slot = slot.add(&ca.mul(cb));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn add_maps<C: Ring>(a: &TermMap<C>, b: &TermMap<C>, order: usize) -> TermMap<C> {
    let mut out: TermMap<C> = a.range(..=(order, i64::MAX)).map(|(k, v)| (*k, v.clone())).collect();
    for (k, v) in b.range(..=(order, i64::MAX)) {
        let slot = out.entry(*k).or_insert_with(C::zero);
        *slot = slot.add(v);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn row<C: Ring>(map: &TermMap<C>, n: usize) -> impl Iterator<Item = (i64, &C)> {
    map.range((n, i64::MIN)..=(n, i64::MAX)).map(|(&(_, r), c)| (r, c))
}

/// Inverse of a series whose `q⁰` row is a nonzero constant.
fn invert_unit<C: Ring>(a: &TermMap<C>, order: usize) -> Result<TermMap<C>> {
    let mut lead = None;
    for (r, c) in row(a, 0) {
        if c.is_zero() {
            continue;
        }
        if r != 0 || lead.is_some() {
            return Err(Error::NotAUnit);
        }
        lead = Some(c.clone());
    }
    let inv0 = lead.and_then(|c| c.inv()).ok_or(Error::NotAUnit)?;
    let neg_inv0 = inv0.neg();

    // b_0 = 1/a_0,  b_n = -(1/a_0) Σ_{j=1..n} a_j b_{n-j}  (row products in ζ)
    let mut out: TermMap<C> = BTreeMap::new();
    out.insert((0, 0), inv0);
    for n in 1..=order {
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for j in 1..=n {
            for (r, ca) in row(a, j) {
                for (s, cb) in row(&out, n - j) {
                    let slot = acc.entry(r + s).or_insert_with(C::zero);
                    *slot = slot.add(&ca.mul(cb));
                }
            }
        }
        for (t, c) in acc {
            let v = c.mul(&neg_inv0);
            if !v.is_zero() {
                out.insert((n, t), v);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Terms {
    Exact(TermMap<BigRational>),
    Complex(TermMap<Complex64>),
}

/// Truncated bivariate series `Σ_{0≤n≤N} Σ_r c(n,r) qⁿ ζʳ`.
///
/// Explicit zero coefficients may be stored; they never contribute to the
/// support profile.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    order: usize,
    terms: Terms,
}

impl BiSeries {
    pub fn exact(order: usize) -> Self {
        Self {
            order,
            terms: Terms::Exact(BTreeMap::new()),
        }
    }

    pub fn complex(order: usize) -> Self {
        Self {
            order,
            terms: Terms::Complex(BTreeMap::new()),
        }
    }

    /// The constant series `1` in the exact field.
    pub fn one(order: usize) -> Self {
        let mut s = Self::exact(order);
        s.insert_exact(0, 0, BigRational::one()).expect("n = 0 is in every window");
        s
    }

    pub fn from_exact_terms<I>(order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, i64), BigRational)>,
    {
        let mut s = Self::exact(order);
        for ((n, r), c) in terms {
            s.insert_exact(n, r, c)?;
        }
        Ok(s)
    }

    /// Convenience for integer-valued exact series.
    pub fn from_integer_terms(order: usize, terms: &[(usize, i64, i64)]) -> Result<Self> {
        Self::from_exact_terms(
            order,
            terms
                .iter()
                .map(|&(n, r, c)| ((n, r), BigRational::from_integer(BigInt::from(c)))),
        )
    }

    pub fn from_complex_terms<I>(order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, i64), Complex64)>,
    {
        let mut s = Self::complex(order);
        for ((n, r), c) in terms {
            s.insert_complex(n, r, c)?;
        }
        Ok(s)
    }

    pub fn insert_exact(&mut self, n: usize, r: i64, c: BigRational) -> Result<()> {
        self.check_window(n)?;
        match &mut self.terms {
            Terms::Exact(map) => {
                map.insert((n, r), c);
                Ok(())
            }
            Terms::Complex(_) => Err(Error::FieldMismatch),
        }
    }

    pub fn insert_complex(&mut self, n: usize, r: i64, c: Complex64) -> Result<()> {
        self.check_window(n)?;
        match &mut self.terms {
            Terms::Complex(map) => {
                map.insert((n, r), c);
                Ok(())
            }
            Terms::Exact(_) => Err(Error::FieldMismatch),
        }
    }

    fn check_window(&self, n: usize) -> Result<()> {
        if n > self.order {
            return Err(Error::OutOfWindow {
                n: n as i64,
                order: self.order,
            });
        }
        Ok(())
    }

    /// Truncation order `N`: rows `0..=N` are stored.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn field(&self) -> FieldTag {
        match self.terms {
            Terms::Exact(_) => FieldTag::Exact,
            Terms::Complex(_) => FieldTag::Complex,
        }
    }

    /// Stored exact coefficient, `None` when absent or when the series is
    /// complex.
    pub fn exact_coeff(&self, n: usize, r: i64) -> Option<&BigRational> {
        match &self.terms {
            Terms::Exact(map) => map.get(&(n, r)),
            Terms::Complex(_) => None,
        }
    }

    /// Coefficient `c(n,r)` as a complex number (zero when absent).
    pub fn coeff(&self, n: usize, r: i64) -> Complex64 {
        match &self.terms {
            Terms::Exact(map) => map.get(&(n, r)).map(rational_to_c64).unwrap_or_default(),
            Terms::Complex(map) => map.get(&(n, r)).copied().unwrap_or_default(),
        }
    }

    /// All stored `(n, r, c(n,r))` in `(n, r)` order, converted to complex.
    pub fn complex_terms(&self) -> Vec<(usize, i64, Complex64)> {
        match &self.terms {
            Terms::Exact(map) => map.iter().map(|(&(n, r), c)| (n, r, rational_to_c64(c))).collect(),
            Terms::Complex(map) => map.iter().map(|(&(n, r), c)| (n, r, *c)).collect(),
        }
    }

    /// All stored exact terms; empty for a complex series.
    pub fn exact_terms(&self) -> impl Iterator<Item = (usize, i64, &BigRational)> {
        let map = match &self.terms {
            Terms::Exact(map) => Some(map),
            Terms::Complex(_) => None,
        };
        map.into_iter().flat_map(|m| m.iter().map(|(&(n, r), c)| (n, r, c)))
    }

    /// Number of stored coefficients (including explicit zeros).
    pub fn len(&self) -> usize {
        match &self.terms {
            Terms::Exact(map) => map.len(),
            Terms::Complex(map) => map.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The same series over the complex field.
    pub fn to_complex(&self) -> Self {
        match &self.terms {
            Terms::Complex(_) => self.clone(),
            Terms::Exact(map) => Self {
                order: self.order,
                terms: Terms::Complex(map.iter().map(|(k, c)| (*k, rational_to_c64(c))).collect()),
            },
        }
    }

    /// Drops every row beyond `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let terms = match &self.terms {
            Terms::Exact(m) => Terms::Exact(m.range(..=(order, i64::MAX)).map(|(k, v)| (*k, v.clone())).collect()),
            Terms::Complex(m) => Terms::Complex(m.range(..=(order, i64::MAX)).map(|(k, v)| (*k, *v)).collect()),
        };
        Self { order, terms }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let order = self.order.min(other.order);
        let terms = match (&self.terms, &other.terms) {
            (Terms::Exact(a), Terms::Exact(b)) => Terms::Exact(add_maps(a, b, order)),
            (Terms::Complex(a), Terms::Complex(b)) => Terms::Complex(add_maps(a, b, order)),
            _ => return Err(Error::FieldMismatch),
        };
        Ok(Self { order, terms })
    }

    pub fn neg(&self) -> Self {
        let terms = match &self.terms {
            Terms::Exact(m) => Terms::Exact(m.iter().map(|(k, v)| (*k, -v)).collect()),
            Terms::Complex(m) => Terms::Complex(m.iter().map(|(k, v)| (*k, -v)).collect()),
        };
        Self {
            order: self.order,
            terms,
        }
    }

    /// Cauchy product truncated to `min(N_a, N_b)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let order = self.order.min(other.order);
        let terms = match (&self.terms, &other.terms) {
            (Terms::Exact(a), Terms::Exact(b)) => Terms::Exact(convolve(a, b, order)),
            (Terms::Complex(a), Terms::Complex(b)) => Terms::Complex(convolve(a, b, order)),
            _ => return Err(Error::FieldMismatch),
        };
        Ok(Self { order, terms })
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = match self.field() {
            FieldTag::Exact => Self::one(self.order),
            FieldTag::Complex => Self::one(self.order).to_complex(),
        };
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same field");
            }
        }
        acc
    }

    /// Multiplicative inverse to the same truncation, for series whose `q⁰`
    /// row is a single nonzero constant.
    pub fn invert_unit(&self) -> Result<Self> {
        let terms = match &self.terms {
            Terms::Exact(m) => Terms::Exact(invert_unit(m, self.order)?),
            Terms::Complex(m) => Terms::Complex(invert_unit(m, self.order)?),
        };
        Ok(Self {
            order: self.order,
            terms,
        })
    }

    /// `Σ c(n,r) e(nτ + rz)` over the stored terms.
    pub fn eval(&self, p: &EvalPoint) -> Complex64 {
        let (tau, z) = (p.tau(), p.z());
        self.complex_terms()
            .into_iter()
            .map(|(n, r, c)| c * e(tau * n as f64 + z * r as f64))
            .sum()
    }

    /// Largest `|r|` with a nonzero coefficient in each row, plus its
    /// cumulative maximum.
    pub fn support_profile(&self) -> SupportProfile {
        let mut minimal = vec![0usize; self.order + 1];
        let mut record = |n: usize, r: i64, nonzero: bool| {
            if nonzero {
                minimal[n] = minimal[n].max(r.unsigned_abs() as usize);
            }
        };
        match &self.terms {
            Terms::Exact(m) => m.iter().for_each(|(&(n, r), c)| record(n, r, !Zero::is_zero(c))),
            Terms::Complex(m) => m.iter().for_each(|(&(n, r), c)| record(n, r, !Ring::is_zero(c))),
        }
        let envelope = minimal
            .iter()
            .scan(0usize, |acc, &r| {
                *acc = (*acc).max(r);
                Some(*acc)
            })
            .collect();
        SupportProfile { minimal, envelope }
    }
}

pub(crate) fn rational_to_c64(c: &BigRational) -> Complex64 {
    Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
}

/// Row-wise `ζ`-support of a [`BiSeries`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportProfile {
    /// `r₀(n) = max{|r| : c(n,r) ≠ 0}`, or 0 for an empty row.
    pub minimal: Vec<usize>,
    /// Monotone envelope `max_{m≤n} r₀(m)`; every inequality uses this.
    pub envelope: Vec<usize>,
}

impl SupportProfile {
    /// `n − r₀(n)` on the envelope for each row of the window.
    pub fn gaps(&self) -> Vec<i64> {
        self.envelope
            .iter()
            .enumerate()
            .map(|(n, &r)| n as i64 - r as i64)
            .collect()
    }
}

/// Order of a univariate q-series at `i∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QOrder {
    Finite(Rational64),
    ZeroSeries,
}

impl QOrder {
    pub fn finite(self) -> Option<Rational64> {
        match self {
            QOrder::Finite(r) => Some(r),
            QOrder::ZeroSeries => None,
        }
    }
}

impl fmt::Display for QOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QOrder::Finite(r) => write!(f, "{r}"),
            QOrder::ZeroSeries => f.write_str("zero-series"),
        }
    }
}

impl Serialize for QOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `scale · Σ_{min_exponent ≤ e ≤ truncation} c(e) q^{e/D}`.
///
/// Coefficients with exponent above `truncation` are unknown and never
/// stored. `scale` keeps transcendental prefactors such as `−1/(2πi)` or
/// `(2πi)¹²` out of the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FracQSeries {
    denominator: u64,
    coeffs: BTreeMap<i64, Complex64>,
    min_exponent: i64,
    truncation: i64,
    scale: Complex64,
}

impl FracQSeries {
    /// Empty series known to be zero for exponents `min_exponent..=truncation`.
    pub fn new(denominator: u64, min_exponent: i64, truncation: i64) -> Self {
        assert!(denominator >= 1, "q-series denominator must be positive");
        Self {
            denominator,
            coeffs: BTreeMap::new(),
            min_exponent,
            truncation,
            scale: Complex64::new(1.0, 0.0),
        }
    }

    pub fn from_terms<I>(denominator: u64, truncation: i64, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut s = Self::new(denominator, 0, truncation);
        let mut first = true;
        for (e, c) in terms {
            if first {
                s.min_exponent = e;
                first = false;
            }
            s.add_term(e, c);
        }
        s
    }

    /// `c · q^{e/D}` known exactly through `truncation`.
    pub fn monomial(denominator: u64, exponent: i64, c: Complex64, truncation: i64) -> Self {
        let mut s = Self::new(denominator, exponent, truncation);
        s.add_term(exponent, c);
        s
    }

    /// `1 − c · q^{e/D}` for `e ≥ 0`.
    pub fn one_minus(denominator: u64, exponent: i64, c: Complex64, truncation: i64) -> Self {
        let mut s = Self::new(denominator, exponent.min(0), truncation);
        s.add_term(0, Complex64::new(1.0, 0.0));
        s.add_term(exponent, -c);
        s
    }

    /// Adds `c` to the coefficient of `q^{e/D}`; ignored beyond the truncation.
    pub fn add_term(&mut self, e: i64, c: Complex64) {
        if e > self.truncation {
            return;
        }
        self.min_exponent = self.min_exponent.min(e);
        *self.coeffs.entry(e).or_default() += c;
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    /// Truncation as a rational power of `q`.
    pub fn truncation_exponent(&self) -> Rational64 {
        Rational64::new(self.truncation, self.denominator as i64)
    }

    pub fn min_exponent(&self) -> i64 {
        self.min_exponent
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    /// Raw (unscaled) coefficient of `q^{e/D}`.
    pub fn coeff(&self, e: i64) -> Complex64 {
        self.coeffs.get(&e).copied().unwrap_or_default()
    }

    /// Raw coefficient of `q^{x}` for a rational exponent `x`.
    pub fn coeff_at(&self, x: Rational64) -> Complex64 {
        let scaled = x * Rational64::from_integer(self.denominator as i64);
        if scaled.is_integer() {
            self.coeff(scaled.to_integer())
        } else {
            Complex64::default()
        }
    }

    /// Stored `(e, c(e))` pairs, unscaled.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, *c))
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.scale *= factor;
        self
    }

    /// Moves `scale` into the coefficients.
    pub fn folded(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= self.scale;
        }
        out.scale = Complex64::new(1.0, 0.0);
        out
    }

    /// Re-expresses the series with denominator `d`, a multiple of the
    /// current one.
    pub fn with_denominator(&self, d: u64) -> Self {
        assert!(d % self.denominator == 0, "{d} is not a multiple of {}", self.denominator);
        let f = (d / self.denominator) as i64;
        Self {
            denominator: d,
            coeffs: self.coeffs.iter().map(|(e, c)| (e * f, *c)).collect(),
            min_exponent: self.min_exponent * f,
            truncation: self.truncation * f,
            scale: self.scale,
        }
    }

    /// Drops every term above `q^{e/D}`.
    pub fn truncate(&self, e: i64) -> Self {
        let mut out = self.clone();
        out.truncation = out.truncation.min(e);
        let t = out.truncation;
        out.coeffs.retain(|&k, _| k <= t);
        out
    }

    /// Product; the result is known through
    /// `min(T_a + min_b, T_b + min_a)`.
    pub fn mul(&self, other: &Self) -> Self {
        let d = self.denominator.lcm(&other.denominator);
        let a = self.with_denominator(d);
        let b = other.with_denominator(d);
        let truncation = (a.truncation + b.min_exponent).min(b.truncation + a.min_exponent);
        let mut out = Self::new(d, a.min_exponent + b.min_exponent, truncation);
        out.scale = a.scale * b.scale;
        for (&ea, &ca) in &a.coeffs {
            if ea + b.min_exponent > truncation {
                break;
            }
            for (&eb, &cb) in &b.coeffs {
                if ea + eb > truncation {
                    break;
                }
                *out.coeffs.entry(ea + eb).or_default() += ca * cb;
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::monomial(self.denominator, 0, Complex64::new(1.0, 0.0), i64::MAX / 4);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Sum of two series on the common window.
    pub fn add(&self, other: &Self) -> Self {
        let d = self.denominator.lcm(&other.denominator);
        let a = self.with_denominator(d).folded();
        let b = other.with_denominator(d).folded();
        let mut out = Self::new(d, a.min_exponent.min(b.min_exponent), a.truncation.min(b.truncation));
        for (e, c) in a.terms().chain(b.terms()) {
            out.add_term(e, c);
        }
        out
    }

    /// [`FracQSeries::ord_with`] at [`DEFAULT_ORDER_TOLERANCE`].
    pub fn ord(&self) -> QOrder {
        self.ord_with(DEFAULT_ORDER_TOLERANCE)
    }

    /// Least exponent whose coefficient exceeds `tolerance` times the largest
    /// coefficient magnitude.
    pub fn ord_with(&self, tolerance: f64) -> QOrder {
        self.leading_with(tolerance)
            .map(|(x, _)| QOrder::Finite(x))
            .unwrap_or(QOrder::ZeroSeries)
    }

    /// Leading exponent and its raw coefficient.
    pub fn leading(&self) -> Option<(Rational64, Complex64)> {
        self.leading_with(DEFAULT_ORDER_TOLERANCE)
    }

    fn leading_with(&self, tolerance: f64) -> Option<(Rational64, Complex64)> {
        let max = self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 || self.scale.norm() == 0.0 {
            return None;
        }
        self.coeffs
            .iter()
            .find(|(_, c)| c.norm() > tolerance * max)
            .map(|(&e, &c)| (Rational64::new(e, self.denominator as i64), c))
    }

    /// `scale · Σ c(e) e(τ e / D)`.
    pub fn eval(&self, tau: Complex64) -> Complex64 {
        let step = tau / self.denominator as f64;
        let sum: Complex64 = self.coeffs.iter().map(|(&e, &c)| c * (TWO_PI_I * step * e as f64).exp()).sum();
        self.scale * sum
    }
}
