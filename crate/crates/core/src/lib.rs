//! Modified Jacobi forms of weight `k` and index zero.
//!
//! The crate is organised bottom-up:
//!
//! - [`qseries`]: truncated bivariate series `Σ c(n,r) qⁿ ζʳ` with exact or
//!   complex coefficients, and univariate series in fractional powers of `q`.
//! - [`weierstrass`]: the sign `ψ`, the quasi-periods `η`, the normaliser `ρ`,
//!   and the Weierstrass `σ` and `ζ` functions on lattices `[τ, 1]`.
//! - [`jacobi`]: the slash operators `|′ₖ` and `|″ₖ`, the form abstraction,
//!   graded products, the coefficient relation and the `J_k^m` filtration.
//! - [`klein`]: Klein forms, the specialisation `φ_X`, congruence conditions and
//!   root-of-unity translation ratios.
//! - [`analysis`]: argument-principle zero counting, the Legendre check, the
//!   discriminant `Δ` and the embedding into modular forms.
//! - [`json`]: the wire formats shared with the command-line tool.
//!
//! ```
//! use jacobi0::weierstrass::sigma_series;
//! use num_rational::BigRational;
//!
//! let s = sigma_series(3);
//! assert_eq!(s.exact_coeff(3, 0), Some(&BigRational::from_integer(22.into())));
//! ```

pub mod analysis;
pub mod error;
pub mod jacobi;
pub mod json;
pub mod klein;
pub mod qseries;
pub mod weierstrass;

pub use error::{Error, Result};
pub use jacobi::{ModifiedJacobiForm, UnimodularMatrix};
pub use qseries::{BiSeries, EvalPoint, FracQSeries, QOrder};
pub use weierstrass::{Lattice, RationalPair};

use num_complex::Complex64;
use std::f64::consts::PI;

/// `2πi`.
pub const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// `e(x) = exp(2πi x)`.
#[inline]
pub fn e(x: Complex64) -> Complex64 {
    (TWO_PI_I * x).exp()
}

/// `e(x)` for a real argument, reduced mod 1 first so that large
/// arguments keep full precision.
#[inline]
pub fn e_real(x: f64) -> Complex64 {
    let t = x - x.round();
    Complex64::from_polar(1.0, 2.0 * PI * t)
}
