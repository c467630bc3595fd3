//! Redistribution of quantum mutual information in tripartite pure states.
//!
//! Given `|ψ⟩_ABC`, a unitary acting on `AB` leaves `I(AB:C) = 2S(ρ_C)` fixed but
//! moves correlation between `I(A:C)` and `I(B:C)`. Maximizing `I(A:C)` is the
//! same as maximizing the entropy difference `ΔS = S(ρ_A) − S(ρ_B)`, which is
//! bounded above by `S(ρ_C)`.
//!
//! Modules:
//!
//! - [`qlinalg`]: dense complex matrices, Hermitian eigensolvers, partial trace,
//!   Kronecker products and `exp(iH)`.
//! - [`states`]: tripartite states, entropies, mutual-information reports and the
//!   constructive optimal unitary for `rank(ρ_C) ≤ d_A`.
//! - [`npp`]: greedy and recurrent-greedy balanced number partitioning.
//! - [`permopt`]: disentangle-then-permute optimizer (exhaustive, `d = 2` closed
//!   form, RGNP heuristic).
//! - [`gdopt`]: parameterized unitaries, Adam ascent and local-maximum checks.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;
mod numeric;

pub mod gdopt;
pub mod npp;
pub mod permopt;
pub mod qlinalg;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numeric::NumericConfig;
