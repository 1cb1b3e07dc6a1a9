//! Exact front tracking and Lax-Oleinik tools for scalar conservation laws
//! `u_t + f(u)_x = 0` with piecewise-affine flux.

// `!(a < b)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characteristics;
pub mod error;
pub mod flux;
pub mod lax_oleinik;
pub mod legendre;
pub mod riemann;
pub mod scenario;
pub mod single_shock;
pub mod step;
pub mod tracking;

pub use error::{Error, Result};
pub use flux::Flux;
pub use step::StepFunction;
