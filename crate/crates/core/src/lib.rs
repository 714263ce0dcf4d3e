//! Entangling power of quantum gates.
//!
//! The crate estimates how much entanglement a unitary gate must create from
//! product inputs (its minimum, average and maximum entangling power), with
//! respect to the entanglement entropy, the negativity and a smooth Schmidt-rank
//! surrogate. Alongside the estimators it provides exact integer formulas for
//! the generic values of these quantities, closed-form concentration bounds,
//! explicit gate constructions and a tensor-rank toolkit for multipartite
//! states.
//!
//! The crate is `no_std` and only needs `alloc`. Its `num_traits::Float`
//! imports go unused whenever std is linked into the build, hence their
//! `allow(unused_imports)`.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod error;
pub mod gates;
pub mod minimize;
pub mod multipartite;
pub mod sampling;
pub mod tensor;
pub mod varieties;

pub use error::{Error, Result};
