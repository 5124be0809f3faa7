//! Calibrated ordered risk minimization.
//!
//! Worst-case sample averages over permutation-invariant ambiguity sets
//! (φ-divergence balls and distortion weights) that upper-bound the true
//! mean of a bounded loss with a user-chosen probability. The crate covers
//! calibration of the set size, evaluation of the resulting risk
//! functionals and Monte-Carlo harnesses that check the guarantee.

pub mod bench;
pub mod calibrate;
pub mod cones;
pub mod crossing;
pub mod divergence;
pub mod error;
pub mod ext;
pub mod pav;
pub mod risk;
pub mod selftest;
pub mod specfun;

pub use error::{Error, Result};
pub use ext::ExtReal;
