//! Scalar special functions and semi-infinite quadrature.
//!
//! Everything that can overflow is evaluated in the log domain: the
//! non-central densities used by the capacity integrals multiply
//! `exp(-κw)` by Bessel functions of arguments in the hundreds.

mod bessel;
mod gamma;
mod quadrature;

pub use bessel::{hyp0f1_scalar, log_bessel_i, log_psi_factor, psi_factor};
pub use gamma::{log_gamma, log_multivariate_gamma};
pub use quadrature::{
    integrate_interval, integrate_semiinfinite, integrate_semiinfinite_with_hints, GaussLaguerre,
    Integral, QuadratureRule, FALLBACK_THRESHOLD, FALLBACK_TOLERANCE,
};
