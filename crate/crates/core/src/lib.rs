//! Occupation-time distributions for classical coin-tossing walks and
//! monitored quantum walks on the integers.
//!
//! The quantum side works on a finite, symmetric window of sites around the
//! origin. A walk is described either by a sequence of 2×2 coins or by a
//! doubly-infinite sequence of Verblunsky coefficients (a CMV walk); both
//! are turned into a [`BandedUnitary`] acting on [`StateVector`]s. The
//! monitored occupation statistics `P(N_n = r)` are computed by one of the
//! engines in [`engine`]:
//!
//! * [`engine::brute_force`] sums the Born-rule norm of every projection
//!   sequence (exponential, used as the oracle),
//! * [`engine::density_recursion`] propagates one density block per
//!   positive-count,
//! * [`engine::transform_recursion`] propagates a single phase-twisted
//!   block per Fourier phase and inverts the transform at the end.
//!
//! The classical reference laws live in [`classical`], and the Riesz-product
//! measure with its Verblunsky coefficients in [`riesz`].

// `!(x < 1.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod classical;
pub mod cmv;
pub mod coin;
pub mod engine;
mod error;
pub mod par;
pub mod riesz;

pub use basis::{BasisIndex, Spin, StateVector};
pub use cmv::BandedUnitary;
pub use coin::{catalog, Coin, CoinSequence, ModelSpec, VerblunskySequence, Walk};
pub use engine::{Diagnostics, Engine, OccupationDistribution};
pub use error::{Error, Result};
pub use par::Execution;

pub use num_complex::Complex64 as C64;
