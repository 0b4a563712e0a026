//! Exact and approximate policies for the continuous-time joint replenishment
//! problem.
//!
//! Commodities follow EOQ cost curves `K/T + H·T` and share a joint ordering
//! cost `K0` charged once per distinct order epoch. This crate builds policies
//! whose order epochs live on rational grids (`base × multiplier`), so their
//! long-run joint ordering density can be evaluated exactly by
//! inclusion–exclusion over least common multiples.
//!
//! The pipeline lives in [`solver`]: a power-of-2 baseline estimates the
//! optimum, the overloaded-EOQ policy covers the regime of long cycles, and an
//! enumeration over candidate minimal intervals, active segments and labelled
//! alignment forests ([`alignment`]) produces grid policies that are assembled
//! and costed by [`policy`].
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod alignment;
pub mod baseline;
pub mod density;
pub mod eoq;
mod error;
pub mod numerics;
pub mod policy;
pub mod solver;

pub use error::{Error, Result};
pub use numerics::Rational;
