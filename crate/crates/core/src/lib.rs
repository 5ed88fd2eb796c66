//! Paramagnetic and diamagnetic Faraday rotation of ytterbium isotopes on the
//! ¹S₀ → ¹P₁ line: exact angular-momentum algebra, rotation spectra, optical
//! pumping, polarimeter observables, experiment scenarios and curve fitting.
//!
//! Angular frequencies are in rad/s and measured from the ¹⁷⁴Yb resonance
//! unless a function says otherwise. Everything else is SI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod atomdata;
pub mod error;
pub mod experiments;
pub mod faraday;
pub mod fitting;
pub mod halfint;
pub mod io;
pub mod lineshape;
pub mod polarimeter;
pub mod pumping;
pub mod units;

pub use error::{Error, Result};
pub use halfint::HalfInt;
