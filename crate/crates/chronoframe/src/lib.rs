//! Relational quantum dynamics with finite ideal clocks.
//!
//! The crate builds constraint operators over labeled tensor-product spaces,
//! extracts physical states, reduces them to clock-conditioned states,
//! changes temporal reference frames and compiles timed interventions into
//! piecewise propagators. Everything is dense and allocation-based; the crate
//! is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod causality;
pub mod clock;
pub mod constraint;
mod error;
pub mod intervention;
pub mod perspective;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::C64;
