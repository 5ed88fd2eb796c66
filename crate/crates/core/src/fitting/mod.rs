//! Levenberg-Marquardt least squares and the spectrum, decay and
//! precession model adapters.

mod lm;
mod models;

pub use lm::{
    finite_difference_jacobian, least_squares, Bounds, FitResult, LmOptions, Termination,
};
pub use models::{
    fit_absorption_spectrum, fit_damped_sinusoid, fit_exponential, sinusoid_initial_guess,
    zero_crossings, AbsorptionFit, AbsorptionInitial, ExponentialFit, ExponentialInitial,
    FrequencyMode, SinusoidFit, SinusoidInitial, DECAY_SPAN_LIMIT,
};
