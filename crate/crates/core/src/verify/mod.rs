//! Independent checks of computed profiles.

pub mod convolution;
pub mod expansion;
pub mod residual;

pub use convolution::{convolution_q, kernel_flux, padded_window};
pub use expansion::{
    expansion_coeffs, expansion_fit, gamma_condition, regularity_order, ExpansionCoeffs,
    ExpansionFitReport, FitOptions, GammaCondition, GAMMA_THRESHOLD, REGULARITY_CAP,
};
pub use residual::{
    conservation_residuals, flux_by_convolution, integral_residual, n_residual, n_residual_order, n_residual_stride, n_residual_with_stride, ode_residual,
    q_cross_check, ResidualReport,
};
