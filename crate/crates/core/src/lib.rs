//! Reconciliation stack for continuous-variable quantum key distribution.
//!
//! The crate models the post-measurement half of a CV-QKD link: Alice's raw
//! key bits are protected by a serially concatenated code (a single-parity-check
//! outer code, a seeded bit interleaver, Gray-labelled 8-PSK, and a differential
//! inner modulator), sent across a Gaussian channel with transmission `G` and
//! excess noise, and recovered on Bob's side by an iterative soft-decision
//! demodulator/decoder. On top of the codec sit a session protocol (coherent
//! state preparation, quadrature measurement, sifting, SNR estimation) and the
//! mutual-information accounting that decides whether the operating point is
//! secure against the standard Gaussian attacks.
//!
//! Everything in this crate is deterministic given its seeds and free of I/O;
//! the companion `cvqkd-sim` crate provides the Monte Carlo harness, file
//! formats, and CLI.
//!
//! # Feature flags
//!
//! * `std` (default) - uses the platform math library and enables the session
//!   wall-clock timing in [`protocol`].
//! * `libm` - pulls float math from the `libm` crate so the crate builds with
//!   `#![no_std]` (`alloc` is still required).
//! * `oracles` - test-support enumerators used by the verification suites.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("cvqkd-core needs either the `std` or the `libm` feature");

extern crate alloc;

pub mod channel;
pub mod codec;
pub mod error;
pub mod infotheory;
mod math;
pub mod protocol;
pub mod rng;

#[cfg(any(test, feature = "oracles"))]
pub mod oracles;

pub use error::{Error, Result};
