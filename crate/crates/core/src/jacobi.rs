//! Slash operators `|′ₖ`, `|″ₖ` and modified Jacobi forms of index zero.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qseries::{BiSeries, EvalPoint, FieldTag};
use crate::weierstrass::{eta_point, psi, rho, sigma_eval, sigma_series, to_f64, RationalPair};
use crate::{e_real, TWO_PI_I};

/// `M = (a b; c d) ∈ SL₂(ℤ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl UnimodularMatrix {
    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };
    /// `S = (0 −1; 1 0)`.
    pub const S: Self = Self { a: 0, b: -1, c: 1, d: 0 };
    /// `T = (1 1; 0 1)`.
    pub const T: Self = Self { a: 1, b: 1, c: 0, d: 1 };
    pub const T_INV: Self = Self { a: 1, b: -1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(Error::NotUnimodular { a, b, c, d, det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `(aτ + b)/(cτ + d)`.
    pub fn act(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / self.automorphy(tau)
    }

    /// `cτ + d`.
    pub fn automorphy(&self, tau: Complex64) -> Complex64 {
        tau * self.c as f64 + self.d as f64
    }

    /// Membership in the principal congruence subgroup `Γ(n)`.
    pub fn in_gamma(&self, n: i64) -> bool {
        (self.a - 1) % n == 0 && self.b % n == 0 && self.c % n == 0 && (self.d - 1) % n == 0
    }
}

impl Mul for UnimodularMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for UnimodularMatrix {
    type Err = Error;

    /// `"a,b,c,d"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("expected `a,b,c,d`, got `{s}`")))?;
        match parts[..] {
            [a, b, c, d] => Self::new(a, b, c, d),
            _ => Err(Error::Parse(format!("expected four entries, got `{s}`"))),
        }
    }
}

impl RationalPair {
    /// The row-vector product `X·M = (λa + μc, λb + μd)`.
    pub fn times(&self, m: &UnimodularMatrix) -> RationalPair {
        let [a, b, c, d] = m.entries().map(Rational64::from_integer);
        RationalPair::new(self.lambda() * a + self.mu() * c, self.lambda() * b + self.mu() * d)
    }
}

/// `{S, T, T⁻¹, ST, (1 1; 1 2)}`.
pub fn default_matrices() -> Vec<UnimodularMatrix> {
    use UnimodularMatrix as M;
    vec![M::S, M::T, M::T_INV, M::S * M::T, M { a: 1, b: 1, c: 1, d: 2 }]
}

/// Sample points for identity checks, chosen away from lattice points.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleGrid {
    pub taus: Vec<Complex64>,
    pub zs: Vec<Complex64>,
}

impl Default for SampleGrid {
    fn default() -> Self {
        let c = Complex64::new;
        Self {
            taus: vec![c(0.0, 1.0), c(0.0, 2.0), c(0.5, 1.0), c(1.0 / 3.0, 2.0)],
            zs: vec![c(0.1, 0.0), c(0.2, 0.3), c(-0.15, 0.05)],
        }
    }
}

impl SampleGrid {
    pub fn points(&self) -> Result<Vec<EvalPoint>> {
        let mut out = Vec::with_capacity(self.taus.len() * self.zs.len());
        for &tau in &self.taus {
            for &z in &self.zs {
                out.push(EvalPoint::new(tau, z)?);
            }
        }
        Ok(out)
    }
}

/// A function on `ℌ × ℂ`.
pub type Evaluator = Arc<dyn Fn(&EvalPoint) -> Complex64 + Send + Sync>;

/// `(φ|′ₖM)(τ,z) = (cτ + d)^{−k} φ(Mτ, z/(cτ + d))`.
pub fn slash_prime(phi: &Evaluator, k: i32, m: UnimodularMatrix) -> Evaluator {
    let phi = Arc::clone(phi);
    Arc::new(move |p: &EvalPoint| {
        let j = m.automorphy(p.tau());
        j.powi(-k) * phi(&p.moved(m.act(p.tau()), p.z() / j))
    })
}

/// `(φ|″ₖX)(τ,z) = (ψ(X) exp(η(λτ+μ)(z + ½(λτ+μ))))ᵏ φ(τ, z + λτ + μ)`.
pub fn slash_dprime(phi: &Evaluator, k: i32, x: RationalPair) -> Evaluator {
    let phi = Arc::clone(phi);
    let sign = if psi(&x) == -1 && k % 2 != 0 { -1.0 } else { 1.0 };
    Arc::new(move |p: &EvalPoint| {
        let w = x.point(p.tau());
        let eta = eta_point(&x, &p.lattice());
        let factor = (eta * (p.z() + 0.5 * w) * k as f64).exp() * sign;
        factor * phi(&p.moved(p.tau(), p.z() + w))
    })
}

/// `(ψ(X)ψ(X′)ψ(X+X′) e(½ det(X′; X)))ᵏ`.
pub fn cocycle_factor(x: &RationalPair, x2: &RationalPair, k: i32) -> Complex64 {
    let sign = psi(x) * psi(x2) * psi(&(*x + *x2));
    let sign = if sign == -1 && k % 2 != 0 { -1.0 } else { 1.0 };
    let phase = x2.det(x) * Rational64::new(k as i64, 2);
    e_real(to_f64(phase - phase.floor())) * sign
}

/// Scaled difference `|a − b| / max(1, |a|, |b|)`: absolute for values of
/// modest size, relative for large ones.
pub fn deviation(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Outcome of one sampled identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub max_abs_deviation: f64,
    pub samples: usize,
    pub pass: bool,
    pub tolerance: f64,
}

impl VerificationReport {
    pub fn from_deviations<I: IntoIterator<Item = f64>>(identity: impl Into<String>, deviations: I, tolerance: f64) -> Self {
        let mut samples = 0;
        let mut max = 0.0f64;
        let mut finite = true;
        for d in deviations {
            samples += 1;
            finite &= d.is_finite();
            max = max.max(d);
        }
        Self {
            identity: identity.into(),
            max_abs_deviation: if finite { max } else { f64::INFINITY },
            samples,
            pass: finite && samples > 0 && max < tolerance,
            tolerance,
        }
    }
}

/// `ρᵏφ` as a [`BiSeries`] times a fixed scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedSeries {
    pub series: BiSeries,
    pub scale: Complex64,
}

/// A candidate modified Jacobi form: an evaluator, a weight, and optionally
/// the development of `ρᵏφ`.
///
/// When the series is present the evaluator is expected to equal
/// `scale · ρ^{−k} · Σ c(n,r) qⁿ ζʳ` up to truncation; see
/// [`ModifiedJacobiForm::series_deviation`].
#[derive(Clone)]
pub struct ModifiedJacobiForm {
    label: String,
    weight: i32,
    evaluator: Evaluator,
    normalized: Option<NormalizedSeries>,
}

impl fmt::Debug for ModifiedJacobiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModifiedJacobiForm")
            .field("label", &self.label)
            .field("weight", &self.weight)
            .field("series_order", &self.normalized.as_ref().map(|s| s.series.order()))
            .finish()
    }
}

impl ModifiedJacobiForm {
    pub fn new(label: impl Into<String>, weight: i32, evaluator: Evaluator) -> Self {
        Self {
            label: label.into(),
            weight,
            evaluator,
            normalized: None,
        }
    }

    pub fn with_series(mut self, series: BiSeries, scale: Complex64) -> Self {
        self.normalized = Some(NormalizedSeries { series, scale });
        self
    }

    /// The Weierstrass σ-function, weight −1, with `ρ⁻¹σ = −(1/2πi)·S`
    /// developed through `q^order`.
    pub fn sigma(order: usize) -> Self {
        Self::new("sigma", -1, Arc::new(sigma_eval)).with_series(sigma_series(order), -1.0 / TWO_PI_I)
    }

    /// The constant form `1` of weight 0.
    pub fn constant_one(order: usize) -> Self {
        Self::new("one", 0, Arc::new(|_: &EvalPoint| Complex64::new(1.0, 0.0)))
            .with_series(BiSeries::one(order), Complex64::new(1.0, 0.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn normalized(&self) -> Option<&NormalizedSeries> {
        self.normalized.as_ref()
    }

    pub fn require_series(&self) -> Result<&NormalizedSeries> {
        self.normalized.as_ref().ok_or_else(|| Error::MissingSeries(self.label.clone()))
    }

    pub fn eval(&self, p: &EvalPoint) -> Complex64 {
        (self.evaluator)(p)
    }

    /// `c·φ`, same weight.
    pub fn scaled(&self, c: Complex64) -> Self {
        let inner = Arc::clone(&self.evaluator);
        Self {
            label: format!("{c}*{}", self.label),
            weight: self.weight,
            evaluator: Arc::new(move |p: &EvalPoint| c * inner(p)),
            normalized: self.normalized.as_ref().map(|n| NormalizedSeries {
                series: n.series.clone(),
                scale: n.scale * c,
            }),
        }
    }

    pub fn slash_prime(&self, m: UnimodularMatrix) -> Evaluator {
        slash_prime(&self.evaluator, self.weight, m)
    }

    pub fn slash_dprime(&self, x: RationalPair) -> Evaluator {
        slash_dprime(&self.evaluator, self.weight, x)
    }

    /// Scaled difference between the evaluator and its series realisation
    /// at `p`; `None` without a series.
    pub fn series_deviation(&self, p: &EvalPoint) -> Option<f64> {
        let n = self.normalized.as_ref()?;
        let from_series = n.scale * rho(p).powi(-self.weight) * n.series.eval(p);
        Some(deviation(self.eval(p), from_series))
    }

    /// Testable stand-in for `r₀(n)/n → 0`: the envelope ratio at the end of
    /// the window does not exceed the ratio at `n0`.
    pub fn sublinear_beyond(&self, n0: usize) -> Result<bool> {
        let n = self.require_series()?;
        let env = n.series.support_profile().envelope;
        let last = env.len() - 1;
        if n0 == 0 || n0 > last {
            return Ok(false);
        }
        Ok((env[last] * n0) <= (env[n0] * last))
    }
}

/// The product of two forms; weights add and normalized series multiply.
pub fn graded_mul(a: &ModifiedJacobiForm, b: &ModifiedJacobiForm) -> Result<ModifiedJacobiForm> {
    let sa = a.require_series()?;
    let sb = b.require_series()?;
    let series = sa.series.mul(&sb.series)?;
    let (fa, fb) = (Arc::clone(&a.evaluator), Arc::clone(&b.evaluator));
    Ok(ModifiedJacobiForm::new(
        format!("{}*{}", a.label, b.label),
        a.weight + b.weight,
        Arc::new(move |p: &EvalPoint| fa(p) * fb(p)),
    )
    .with_series(series, sa.scale * sb.scale))
}

/// Checks `(φ|″X)|″X′ = cocycle(X, X′)·φ|″(X+X′)` for every pair.
pub fn verify_dprime_cocycle(
    phi: &Evaluator,
    k: i32,
    pairs: &[(RationalPair, RationalPair)],
    points: &[EvalPoint],
    tolerance: f64,
) -> VerificationReport {
    let mut devs = Vec::new();
    for &(x, x2) in pairs {
        let lhs = slash_dprime(&slash_dprime(phi, k, x), k, x2);
        let rhs = slash_dprime(phi, k, x + x2);
        let factor = cocycle_factor(&x, &x2, k);
        devs.extend(points.iter().map(|p| deviation(lhs(p), factor * rhs(p))));
    }
    VerificationReport::from_deviations("cocycle-dprime", devs, tolerance)
}

/// Checks `(φ|′M)|″(XM) = (φ|″X)|′M` for every `(X, M)`.
pub fn verify_mixed_cocycle(
    phi: &Evaluator,
    k: i32,
    actions: &[(RationalPair, UnimodularMatrix)],
    points: &[EvalPoint],
    tolerance: f64,
) -> VerificationReport {
    let mut devs = Vec::new();
    for &(x, m) in actions {
        let lhs = slash_dprime(&slash_prime(phi, k, m), k, x.times(&m));
        let rhs = slash_prime(&slash_dprime(phi, k, x), k, m);
        devs.extend(points.iter().map(|p| deviation(lhs(p), rhs(p))));
    }
    VerificationReport::from_deviations("cocycle-mixed", devs, tolerance)
}

/// Both cocycle identities for `φ` over the given samples.
pub fn verify_cocycles(
    phi: &Evaluator,
    k: i32,
    xs: &[RationalPair],
    matrices: &[UnimodularMatrix],
    grid: &SampleGrid,
    tolerance: f64,
) -> Result<[VerificationReport; 2]> {
    let points = grid.points()?;
    let pairs: Vec<_> = xs.iter().flat_map(|&x| xs.iter().map(move |&y| (x, y))).collect();
    let actions: Vec<_> = xs.iter().flat_map(|&x| matrices.iter().map(move |&m| (x, m))).collect();
    Ok([
        verify_dprime_cocycle(phi, k, &pairs, &points, tolerance),
        verify_mixed_cocycle(phi, k, &actions, &points, tolerance),
    ])
}

/// Default rational characteristics for cocycle sweeps.
pub fn default_characteristics() -> Vec<RationalPair> {
    vec![
        RationalPair::from_fractions(1, 2, 0, 1),
        RationalPair::from_fractions(0, 1, 1, 3),
        RationalPair::from_fractions(1, 2, 1, 2),
        RationalPair::from_fractions(2, 3, -1, 4),
        RationalPair::from_integers(1, 0),
        RationalPair::from_integers(0, 1),
        RationalPair::from_integers(1, 1),
    ]
}

/// `φ|′ₖM = φ` for each matrix and `φ|″ₖX = φ` for each integral vector.
pub fn verify_invariance(
    form: &ModifiedJacobiForm,
    matrices: &[UnimodularMatrix],
    vectors: &[RationalPair],
    grid: &SampleGrid,
    tolerance: f64,
) -> Result<[VerificationReport; 2]> {
    let points = grid.points()?;
    let mut prime = Vec::new();
    for &m in matrices {
        let g = form.slash_prime(m);
        prime.extend(points.iter().map(|p| deviation(g(p), form.eval(p))));
    }
    let mut dprime = Vec::new();
    for &x in vectors {
        let g = form.slash_dprime(x);
        dprime.extend(points.iter().map(|p| deviation(g(p), form.eval(p))));
    }
    Ok([
        VerificationReport::from_deviations(format!("{}-slash-prime-invariance", form.label), prime, tolerance),
        VerificationReport::from_deviations(format!("{}-slash-dprime-invariance", form.label), dprime, tolerance),
    ])
}

/// One failure of the coefficient relation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffViolation {
    pub n: usize,
    pub r: i64,
    pub lambda: i64,
    pub partner_n: i64,
    pub partner_r: i64,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffRelationReport {
    /// `(n, r, λ)` triples whose partner index was decidable.
    pub checked: usize,
    /// Triples whose partner lies beyond the truncation window.
    pub skipped: usize,
    pub violations: Vec<CoeffViolation>,
}

impl CoeffRelationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

/// Checks `c(n,r) = (−1)^{λk} c(n − rλ − ½k(λ² + λ), r + λk)` for every
/// stored coefficient and every `λ`. Partners with negative `q`-exponent are
/// known zeros; partners beyond the window are skipped.
pub fn coeff_relation_check(series: &BiSeries, k: i32, lambdas: &[i64]) -> Result<CoeffRelationReport> {
    if series.field() != FieldTag::Exact {
        return Err(Error::ExactFieldRequired);
    }
    let k = k as i64;
    let zero = BigRational::zero();
    let mut report = CoeffRelationReport {
        checked: 0,
        skipped: 0,
        violations: Vec::new(),
    };
    for (n, r, c) in series.exact_terms() {
        for &lambda in lambdas {
            let partner_n = n as i64 - r * lambda - k * (lambda * lambda + lambda) / 2;
            let partner_r = r + lambda * k;
            if partner_n > series.order() as i64 {
                report.skipped += 1;
                continue;
            }
            report.checked += 1;
            let partner = if partner_n < 0 {
                zero.clone()
            } else {
                series.exact_coeff(partner_n as usize, partner_r).cloned().unwrap_or_default()
            };
            let rhs = if (lambda * k).rem_euclid(2) == 1 { -partner } else { partner };
            if *c != rhs {
                report.violations.push(CoeffViolation {
                    n,
                    r,
                    lambda,
                    partner_n,
                    partner_r,
                    lhs: c.to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
    }
    Ok(report)
}

/// Smallest `m ≥ 1` with `φ ∈ J_k^m`, when the window can decide it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filtration {
    Index(u32),
    ExceedsWindow,
}

impl Serialize for Filtration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Filtration::Index(m) => s.serialize_u32(*m),
            Filtration::ExceedsWindow => s.serialize_str("exceeds window"),
        }
    }
}

/// `max(1, ⌈−(min{n − r₀(n)} + k/8)⌉)` over the window of `series`.
///
/// The window is accepted only when `n − r₀(n)` (on the monotone envelope)
/// is nondecreasing over the last two steps and ends strictly above its
/// minimum; otherwise the answer is [`Filtration::ExceedsWindow`].
pub fn filtration_index_of(series: &BiSeries, k: i32) -> Filtration {
    let gaps = series.support_profile().gaps();
    let n = gaps.len();
    if n < 3 {
        return Filtration::ExceedsWindow;
    }
    let min = *gaps.iter().min().expect("nonempty");
    let edge_ok = gaps[n - 3] <= gaps[n - 2] && gaps[n - 2] <= gaps[n - 1] && gaps[n - 1] > min;
    if !edge_ok {
        return Filtration::ExceedsWindow;
    }
    let bound = -(Rational64::from_integer(min) + Rational64::new(k as i64, 8));
    let m = bound.ceil().to_integer().max(1);
    Filtration::Index(m as u32)
}

pub fn filtration_index(form: &ModifiedJacobiForm) -> Result<Filtration> {
    Ok(filtration_index_of(&form.require_series()?.series, form.weight))
}

/// `min{n − r₀(n)} + k/8` on the envelope.
pub fn filtration_bound(series: &BiSeries, k: i32) -> Rational64 {
    let min = series.support_profile().gaps().into_iter().min().unwrap_or(0);
    Rational64::from_integer(min) + Rational64::new(k as i64, 8)
}
