//! Zero counting on the torus, the Legendre relation, `Δ`, and the
//! embedding `φ ↦ (φ_{X_j}Δᵐ)_j`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::{filtration_index, Filtration, ModifiedJacobiForm};
use crate::klein::phi_x;
use crate::qseries::{EvalPoint, FracQSeries, QOrder};
use crate::weierstrass::{eta1, eta_tau, eta_tau_quasi_period, Lattice, RationalPair};
use crate::TWO_PI_I;

pub const DEFAULT_POINTS_PER_SEGMENT: usize = 64;
pub const DEFAULT_MIN_DISTANCE: f64 = 1e-3;
pub const MAX_RETRIES: usize = 8;
pub const WINDING_TOLERANCE: f64 = 0.01;

/// Offset applied to `z₀` on each re-basing.
pub const RETRY_STEP: Complex64 = Complex64::new(0.017, 0.013);

/// `0.11 + 0.13i`, away from the lattice for the usual `τ₀`.
pub const DEFAULT_Z0: Complex64 = Complex64::new(0.11, 0.13);

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n′(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// The parallelogram `z₀ → z₀+1 → z₀+1+τ₀ → z₀+τ₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusContour {
    pub tau0: Complex64,
    pub z0: Complex64,
    pub points_per_segment: usize,
    pub min_distance: f64,
}

impl TorusContour {
    pub fn new(tau0: Complex64, z0: Complex64) -> Result<Self> {
        if !(tau0.im > 0.0) {
            return Err(Error::InvalidTau(tau0));
        }
        Ok(Self {
            tau0,
            z0,
            points_per_segment: DEFAULT_POINTS_PER_SEGMENT,
            min_distance: DEFAULT_MIN_DISTANCE,
        })
    }

    pub fn with_points(mut self, n: usize) -> Self {
        self.points_per_segment = n.max(2);
        self
    }

    pub fn corners(&self, z0: Complex64) -> [Complex64; 4] {
        [z0, z0 + 1.0, z0 + 1.0 + self.tau0, z0 + self.tau0]
    }
}

/// Result of one argument-principle integration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroCount {
    pub tau0: [f64; 2],
    pub z0: [f64; 2],
    pub integral: [f64; 2],
    pub count: i64,
    pub residual: f64,
    pub retries: usize,
    /// `(1/2πi)` times the integrals over `∂F₁ + ∂F₃` and `∂F₂ + ∂F₄`.
    #[serde(skip)]
    pub pair_sums: [Complex64; 2],
}

impl ZeroCount {
    /// Distance of the `∂F₁ + ∂F₃` sum from `k·η(τ₀,[τ₀,1])/(2πi)`.
    pub fn pair_deviation(&self, k: i32) -> Result<f64> {
        let lat = Lattice::new(Complex64::new(self.tau0[0], self.tau0[1]))?;
        let expected = eta_tau(&lat) * k as f64 / TWO_PI_I;
        Ok((self.pair_sums[0] - expected).norm())
    }
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Counts zeros minus poles of `f` in the torus cell by the argument
/// principle, `f′` by central differences.
///
/// If `f` comes within `min_distance` of a zero on the contour (estimated
/// by `|f/f′|`), the base corner moves by [`RETRY_STEP`], up to
/// [`MAX_RETRIES`] times.
pub fn count_zeros<F>(f: F, contour: &TorusContour) -> Result<ZeroCount>
where
    F: Fn(Complex64) -> Complex64,
{
    let probe = contour.corners(contour.z0);
    let centre = contour.z0 + 0.5 * (1.0 + contour.tau0);
    let coarse = probe.iter().chain(std::iter::once(&centre)).map(|&z| f(z));
    if coarse.clone().all(|v| v == Complex64::zero()) {
        return Err(Error::IdenticallyZero);
    }
    let (nodes, weights) = gauss_legendre(contour.points_per_segment);
    let derivative = |z: Complex64| {
        let h = 1e-5 * z.norm().max(1.0);
        (f(z + h) - f(z - h)) / (2.0 * h)
    };
    'retry: for retries in 0..=MAX_RETRIES {
        let z0 = contour.z0 + RETRY_STEP * retries as f64;
        let corners = contour.corners(z0);
        for &z in &corners {
            let v = f(z);
            if !v.is_finite() || (v / derivative(z)).norm() < contour.min_distance {
                continue 'retry;
            }
        }
        let mut segs = [Complex64::zero(); 4];
        for s in 0..4 {
            let (a, b) = (corners[s], corners[(s + 1) % 4]);
            let half = (b - a) * 0.5;
            let mid = (a + b) * 0.5;
            for (x, w) in nodes.iter().zip(&weights) {
                let z = mid + half * *x;
                let v = f(z);
                let dv = derivative(z);
                let ratio = dv / v;
                if !ratio.is_finite() || (v / dv).norm() < contour.min_distance {
                    continue 'retry;
                }
                segs[s] += ratio * half * *w;
            }
        }
        let total: Complex64 = segs.iter().sum::<Complex64>() / TWO_PI_I;
        let count = total.re.round();
        let residual = (total - count).norm();
        if residual > WINDING_TOLERANCE {
            return Err(Error::NonIntegralWinding {
                integral: total,
                residual,
            });
        }
        return Ok(ZeroCount {
            tau0: c2(contour.tau0),
            z0: c2(z0),
            integral: c2(total),
            count: count as i64,
            residual,
            retries,
            pair_sums: [(segs[0] + segs[2]) / TWO_PI_I, (segs[1] + segs[3]) / TWO_PI_I],
        });
    }
    Err(Error::NearZeroOnContour { retries: MAX_RETRIES })
}

/// [`count_zeros`] for the slice `z ↦ φ(τ₀, z)`.
pub fn count_form_zeros(form: &ModifiedJacobiForm, tau0: Complex64, z0: Complex64) -> Result<ZeroCount> {
    let contour = TorusContour::new(tau0, z0)?;
    count_zeros(
        |z| EvalPoint::new(tau0, z).map(|p| form.eval(&p)).unwrap_or(Complex64::new(f64::NAN, 0.0)),
        &contour,
    )
}

/// Legendre relation `η(1)τ − η(τ) = 2πi` with `η(τ)` taken as the quasi-period
/// of the Weierstrass zeta function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LegendreReport {
    pub tau: [f64; 2],
    pub eta1: [f64; 2],
    pub eta_tau: [f64; 2],
    pub deviation: f64,
}

/// Base point for the quasi-period; any non-lattice point works.
const LEGENDRE_BASE: Complex64 = Complex64::new(0.23, 0.07);

pub fn legendre_check(tau: Complex64) -> Result<LegendreReport> {
    let lat = Lattice::new(tau)?;
    let e1 = eta1(&lat);
    let et = eta_tau_quasi_period(&lat, LEGENDRE_BASE)?;
    Ok(LegendreReport {
        tau: c2(tau),
        eta1: c2(e1),
        eta_tau: c2(et),
        deviation: (e1 * tau - et - TWO_PI_I).norm(),
    })
}

/// Coefficients of `q ∏ (1 − qⁿ)²⁴` for `q⁰ … q^order`.
pub fn delta_coefficients(order: usize) -> Vec<BigInt> {
    let len = order + 1;
    // Euler's pentagonal number theorem
    let mut euler = vec![BigInt::zero(); len];
    euler[0] = BigInt::from(1);
    for k in 1i64.. {
        let p1 = (k * (3 * k - 1) / 2) as usize;
        if p1 >= len {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        euler[p1] += sign;
        let p2 = (k * (3 * k + 1) / 2) as usize;
        if p2 < len {
            euler[p2] += sign;
        }
    }
    let mul = |a: &[BigInt], b: &[BigInt]| {
        let mut out = vec![BigInt::zero(); len];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().take(len - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let e2 = mul(&euler, &euler);
    let e4 = mul(&e2, &e2);
    let e8 = mul(&e4, &e4);
    let e16 = mul(&e8, &e8);
    let e24 = mul(&e16, &e8);
    let mut out = vec![BigInt::zero(); len];
    out[1..].clone_from_slice(&e24[..len - 1]);
    out
}

/// `Δ/(2πi)¹²` through `q^order`, with the `(2πi)¹²` carried as the scale.
pub fn delta_qexp(order: usize) -> FracQSeries {
    let coeffs = delta_coefficients(order);
    let mut s = FracQSeries::new(1, 1, order as i64);
    for (n, c) in coeffs.iter().enumerate().skip(1) {
        s.add_term(n as i64, Complex64::new(c.to_f64().expect("finite"), 0.0));
    }
    s.scaled(TWO_PI_I.powu(12))
}

/// `(φ_{X_j} Δᵐ)_j`, with weight `k + 12m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub weight: i32,
    pub m: u32,
    pub indices: Vec<RationalPair>,
    pub components: Vec<FracQSeries>,
}

impl Embedding {
    pub fn orders(&self) -> Vec<QOrder> {
        self.components.iter().map(|c| c.ord()).collect()
    }
}

/// Builds the embedding of `form` (weight `k < 1`) for `−k + 1` distinct
/// characteristics with `0 < u, v < 1`, and checks every component has
/// `ord_q ≥ 0`.
pub fn embed_g(form: &ModifiedJacobiForm, xs: &[RationalPair], m: u32) -> Result<Embedding> {
    let k = form.weight();
    let needed = 1 - k as i64;
    if needed < 1 || xs.len() as i64 != needed {
        return Err(Error::InvalidEmbedding(format!(
            "weight {k} needs {needed} characteristics, got {}",
            xs.len()
        )));
    }
    let (zero, one) = (Rational64::from_integer(0), Rational64::from_integer(1));
    for (i, x) in xs.iter().enumerate() {
        let inside = |r: Rational64| zero < r && r < one;
        if !inside(x.lambda()) || !inside(x.mu()) {
            return Err(Error::InvalidEmbedding(format!("{x} has an entry outside (0, 1)")));
        }
        if xs[..i].contains(x) {
            return Err(Error::InvalidEmbedding(format!("{x} repeated")));
        }
    }
    match filtration_index(form)? {
        Filtration::Index(f) if f <= m => {}
        Filtration::Index(f) => {
            return Err(Error::InvalidEmbedding(format!("m = {m} is below the filtration index {f}")))
        }
        Filtration::ExceedsWindow => {
            return Err(Error::InvalidEmbedding("filtration index not decidable in the window".into()))
        }
    }
    let order = form.require_series()?.series.order();
    let delta_m = delta_qexp(order + 1).pow(m);
    let mut components = Vec::with_capacity(xs.len());
    for (index, x) in xs.iter().enumerate() {
        let product = phi_x(form, x)?.mul(&delta_m);
        if let QOrder::Finite(o) = product.ord() {
            if o < zero {
                return Err(Error::InequalityViolation { index, ord: o.to_string() });
            }
        }
        components.push(product);
    }
    Ok(Embedding {
        weight: k + 12 * m as i32,
        m,
        indices: xs.to_vec(),
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::graded_mul;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((int - 2.0 / 9.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(64);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((int - (1f64.exp() - (-1f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn sigma_has_one_zero() {
        let sigma = ModifiedJacobiForm::sigma(4);
        let r = count_form_zeros(&sigma, c(0.0, 1.0), DEFAULT_Z0).unwrap();
        assert_eq!(r.count, 1);
        assert!(r.residual < 0.01);
        assert!(r.pair_deviation(-1).unwrap() < 1e-6, "{:?}", r.pair_sums);
    }

    #[test]
    fn sigma_square_has_two_zeros() {
        let sigma = ModifiedJacobiForm::sigma(4);
        let sq = graded_mul(&sigma, &sigma).unwrap();
        let r = count_form_zeros(&sq, c(0.0, 2.0), DEFAULT_Z0).unwrap();
        assert_eq!(r.count, 2);
        assert!(r.pair_deviation(-2).unwrap() < 1e-6);
    }

    #[test]
    fn constant_has_no_zeros() {
        let r = count_form_zeros(&ModifiedJacobiForm::constant_one(2), c(0.5, 1.0), DEFAULT_Z0).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn reciprocal_of_sigma_winds_negatively() {
        let sigma = ModifiedJacobiForm::sigma(4);
        let inv = ModifiedJacobiForm::new("1/sigma", 1, Arc::new(move |p: &EvalPoint| 1.0 / sigma.eval(p)));
        let r = count_form_zeros(&inv, c(0.0, 1.0), DEFAULT_Z0).unwrap();
        assert_eq!(r.count, -1);
    }

    #[test]
    fn contour_through_zero_is_rebased() {
        let sigma = ModifiedJacobiForm::sigma(4);
        let r = count_form_zeros(&sigma, c(0.0, 1.0), c(0.0, 0.0)).unwrap();
        assert!(r.retries >= 1);
        assert_eq!(r.count, 1);
    }

    #[test]
    fn zero_function_is_rejected() {
        let contour = TorusContour::new(c(0.0, 1.0), DEFAULT_Z0).unwrap();
        assert!(matches!(count_zeros(|_| c(0.0, 0.0), &contour), Err(Error::IdenticallyZero)));
        assert!(TorusContour::new(c(0.0, -1.0), DEFAULT_Z0).is_err());
    }

    #[test]
    fn legendre_on_grid() {
        for tau in [c(0.0, 1.0), c(0.0, 2.0), c(0.5, 1.0), c(1.0 / 3.0, 2.0)] {
            let r = legendre_check(tau).unwrap();
            assert!(r.deviation < 1e-9, "{tau}: {}", r.deviation);
        }
    }

    #[test]
    fn delta_first_coefficients() {
        let d = delta_coefficients(6);
        let expected = [0, 1, -24, 252, -1472, 4830, -6048];
        assert_eq!(d, expected.map(BigInt::from).to_vec());
        let s = delta_qexp(4);
        assert_eq!(s.ord(), QOrder::Finite(Rational64::from_integer(1)));
        let v = s.eval(c(0.0, 1.0)) / TWO_PI_I.powu(12);
        assert!(v.norm() > 1e-4);
    }

    #[test]
    fn embedding_of_sigma() {
        let sigma = ModifiedJacobiForm::sigma(12);
        let xs = [RationalPair::from_fractions(1, 2, 1, 2), RationalPair::from_fractions(1, 3, 2, 3)];
        let e = embed_g(&sigma, &xs, 2).unwrap();
        assert_eq!(e.weight, 23);
        let ords = e.orders();
        assert_eq!(ords[0], QOrder::Finite(Rational64::new(15, 8)));
        assert!(ords.iter().all(|o| o.finite().unwrap() >= Rational64::from_integer(0)));

        let doubled = embed_g(&sigma.scaled(c(2.0, 0.0)), &xs, 2).unwrap();
        let (_, a) = e.components[0].leading().unwrap();
        let (_, b) = doubled.components[0].leading().unwrap();
        let ratio = (b * doubled.components[0].scale()) / (a * e.components[0].scale());
        assert!((ratio - 2.0).norm() < 1e-12);
    }

    #[test]
    fn embedding_rejects_bad_input() {
        let sigma = ModifiedJacobiForm::sigma(12);
        let half = RationalPair::from_fractions(1, 2, 1, 2);
        assert!(embed_g(&sigma, &[half], 2).is_err());
        assert!(embed_g(&sigma, &[half, half], 2).is_err());
        assert!(embed_g(&sigma, &[half, RationalPair::from_fractions(1, 2, 0, 1)], 2).is_err());
        let xs = [half, RationalPair::from_fractions(1, 3, 2, 3)];
        assert!(matches!(embed_g(&sigma, &xs, 1), Err(Error::InvalidEmbedding(_))));
    }

    #[test]
    fn embedding_of_sigma_square() {
        let sigma = ModifiedJacobiForm::sigma(12);
        let sq = graded_mul(&sigma, &sigma).unwrap();
        let xs = [
            RationalPair::from_fractions(1, 2, 1, 2),
            RationalPair::from_fractions(1, 3, 2, 3),
            RationalPair::from_fractions(1, 4, 1, 4),
        ];
        let e = embed_g(&sq, &xs, 3).unwrap();
        assert_eq!(e.weight, 34);
        assert!(e.orders().iter().all(|o| o.finite().unwrap() >= Rational64::from_integer(0)));
    }
}
