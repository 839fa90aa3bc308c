//! Exact-arithmetic engine for congruences of truncated hypergeometric series.
//!
//! The crate is organized around a small tower:
//!
//! - [`rational`]: arbitrary-precision rationals, p-adic valuations, harmonic sums
//! - [`padic`]: residues mod `p^s`, Hensel lifts, Teichmuller lifts, the p-adic gamma
//! - [`quadext`]: the quadratic extension ring `(Z/p^s)[u]/(u^2 - t)`
//! - [`hyperseries`]: truncated hypergeometric sums, Legendre polynomials,
//!   eta-product q-expansions, Apery numbers, harmonic-weighted auxiliary sums
//! - [`curves`]: point counts, traces, Hasse invariants and unit roots for the
//!   Legendre family and the CM family `y^2 = (x-1)(x^2 - 1/(1-lambda))`
//! - [`formal`]: truncated power-series algebra and formal group laws from
//!   hypergeometric logarithms
//! - [`congruence`]: every congruence family as a named checker producing a
//!   [`report::CongruenceReport`]
//! - [`store`] / [`scan`]: persistent result records and the parameter-scan driver
//!
//! No floating point is used anywhere; every verdict is an exact p-adic valuation.

pub mod congruence;
pub mod curves;
pub mod formal;
pub mod hyperseries;
pub mod padic;
pub mod quadext;
pub mod rational;
pub mod report;
pub mod scan;
pub mod store;

pub use padic::PadicInt;
pub use quadext::QuadExtElem;
pub use rational::Rational;
pub use report::{CongruenceReport, ValuationResult};

/// Engine version stamped into result records.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
