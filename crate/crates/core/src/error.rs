use thiserror::Error;

use crate::manifold::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The inputs are outside the regime where a smooth profile is claimed.
    Refusal,
    /// The computation itself broke down.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("amplitude {a} cannot be reached on the 1-shock curve: {reason}")]
    AmplitudeUnreachable { a: f64, reason: String },

    #[error("Lax inequalities violated (margins: right-fast {right_fast:.3e}, right-slow {right_slow:.3e}, left {left:.3e})")]
    LaxViolation {
        right_fast: f64,
        right_slow: f64,
        left: f64,
    },

    #[error("gamma = {gamma} is outside (1, {threshold:.6}); the profile theory does not apply")]
    GammaOutOfRange { gamma: f64, threshold: f64 },

    #[error("zero amplitude: the profile is constant")]
    DegenerateAmplitude,

    #[error("no smooth profile: f(0)^2 - 2a^2 = {discriminant:.6e} <= 0 (f(0) = {f0:.6e}, a = {a:.6e})")]
    NoSmoothProfile { f0: f64, a: f64, discriminant: f64 },

    #[error("amplitude too large for C2 theory: node eigenvalues lambda2 = {lambda2:.6e} >= lambda1 = {lambda1:.6e}")]
    NodeOrdering { lambda1: f64, lambda2: f64 },

    #[error("phase-plane hypothesis failed: {0}")]
    Hypothesis(String),

    #[error("{side:?} integration failed at eta = {eta:.6e}, (V, W) = ({v:.6e}, {w:.6e}): {reason}")]
    Integration {
        side: Side,
        reason: String,
        eta: f64,
        v: f64,
        w: f64,
    },

    #[error("{side:?} trajectory left its trapping region across the {boundary} boundary at eta = {eta:.6e}, (V, W) = ({v:.6e}, {w:.6e})")]
    Containment {
        side: Side,
        boundary: &'static str,
        eta: f64,
        v: f64,
        w: f64,
    },

    #[error("reparametrization is not monotone on the {side:?} side near sample {index}")]
    NonMonotone { side: Side, index: usize },

    #[error("C2 gluing failed: w'(0-) = {left:.6e}, w'(0+) = {right:.6e}, expected {expected:.6e}")]
    GluingFailed {
        left: f64,
        right: f64,
        expected: f64,
    },

    #[error("reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("evaluation point {xi:.6} needs {required:.3} of padding but only {available:.3} is available")]
    Padding {
        xi: f64,
        required: f64,
        available: f64,
    },

    #[error("expansion order {requested} unavailable: denominator f(0)+(k+2)w0 <= 0 at k = {failed_k} (max order {max_order:?})")]
    ExpansionOrder {
        requested: usize,
        failed_k: usize,
        max_order: Option<usize>,
    },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("profile file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain(_)
            | Error::AmplitudeUnreachable { .. }
            | Error::LaxViolation { .. }
            | Error::GammaOutOfRange { .. }
            | Error::DegenerateAmplitude
            | Error::NoSmoothProfile { .. }
            | Error::NodeOrdering { .. }
            | Error::Hypothesis(_) => ErrorClass::Refusal,
            _ => ErrorClass::Numerical,
        }
    }

    /// Short stable identifier for machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::AmplitudeUnreachable { .. } => "amplitude_unreachable",
            Error::LaxViolation { .. } => "lax_violation",
            Error::GammaOutOfRange { .. } => "gamma_out_of_range",
            Error::DegenerateAmplitude => "degenerate_amplitude",
            Error::NoSmoothProfile { .. } => "no_smooth_profile",
            Error::NodeOrdering { .. } => "node_ordering",
            Error::Hypothesis(_) => "hypothesis",
            Error::Integration { .. } => "integration",
            Error::Containment { .. } => "containment",
            Error::NonMonotone { .. } => "non_monotone",
            Error::GluingFailed { .. } => "gluing_failed",
            Error::Reconstruction(_) => "reconstruction",
            Error::Padding { .. } => "padding",
            Error::ExpansionOrder { .. } => "expansion_order",
            Error::InsufficientSamples(_) => "insufficient_samples",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Format(_))
    }
}
