//! Exact census and verification toolkit for reducible polynomials with
//! coefficients restricted to a finite integer set.
//!
//! The pieces:
//! - [`poly`], [`laurent`], [`balanced`]: exact integer polynomial and
//!   Laurent arithmetic, the balanced-ternary codec, and the expanded
//!   triadic product with its all-ones-window identity.
//! - [`factor`]: complete factorization over Z and the reducibility
//!   convention (primitive part reducible over Q) used everywhere else.
//! - [`census`]: sharded exhaustive enumeration of coefficient boxes with
//!   exact reducible counts.
//! - [`bounds`]: the explicit bound 4(n-1)·M^(n-2)·(Σ d(a))², modulus
//!   search, divisor statistics, and brute-force verifiers for the residue
//!   map and the per-key factorization sets behind the bound.
//! - [`bivariate`]: coefficient grids, substitution, the three-condition
//!   reducibility surrogate, and reproducible Monte Carlo decay estimates.

pub mod balanced;
pub mod bivariate;
pub mod bounds;
pub mod census;
pub mod error;
pub mod factor;
pub mod laurent;
pub mod poly;
pub mod serde_util;

pub use error::Error;
pub use poly::IntPoly;
