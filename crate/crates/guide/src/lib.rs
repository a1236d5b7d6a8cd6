//! Book listings, compiled as doc-tests.
//!
//! mdbook cannot link listings against workspace crates, so each chapter is
//! pulled in here and `cargo test --doc -p jacobi0-guide` runs it.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/series.md")]
pub mod series {}

#[doc = include_str!("../../../book/src/weierstrass.md")]
pub mod weierstrass {}

#[doc = include_str!("../../../book/src/slash.md")]
pub mod slash {}

#[doc = include_str!("../../../book/src/klein.md")]
pub mod klein {}

#[doc = include_str!("../../../book/src/zeros.md")]
pub mod zeros {}

#[doc = include_str!("../../../book/src/filtration.md")]
pub mod filtration {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
