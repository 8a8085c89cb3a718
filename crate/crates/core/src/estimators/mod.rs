//! Exact and sampled capacity estimators.
//!
//! Monte Carlo handles any antenna configuration; one-dimensional quadrature
//! against the scalar non-central Wishart law is exact when `min(N_T, N_R) = 1`.

mod monte_carlo;
mod wishart;

pub use monte_carlo::{mc_ergodic_capacity, mc_new_scheme_capacity, MonteCarloSpec, MIN_SAMPLES};
pub use wishart::{
    empirical_eigen_check, quadrature_capacity_m1, scalar_wishart_pdf, KsReport,
    ScalarWishartDensity,
};
