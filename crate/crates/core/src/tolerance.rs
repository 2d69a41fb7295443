//! Numerical tolerances shared across the crate.

/// Circuit identities and norm preservation.
pub const CIRCUIT_TOL: f64 = 1e-10;

/// Closed-form analytic expressions.
pub const ANALYTIC_TOL: f64 = 1e-12;

/// Accepted deviation of `Σ|amp|²` from 1 when wrapping raw amplitudes.
pub const NORM_TOL: f64 = 1e-10;

/// Norm deviation beyond which a state is refused for measurement.
pub const MEASURE_NORM_GUARD: f64 = 1e-6;

/// Mixture probabilities must sum to 1 within this.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Minimum eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

/// `|sin(·)|` below which the removable singularity of the Fourier
/// amplitude is replaced by its limit.
pub const RESONANCE_TOL: f64 = 1e-12;
