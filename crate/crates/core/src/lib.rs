//! Simulation toolkit for checking a purported inverse quantum Fourier
//! transform on average over Fourier basis states, and for using such an
//! average-case-good channel in phase estimation, period finding and
//! amplitude estimation.

pub mod applications;
pub mod bounds;
pub mod channels;
pub mod circuit;
pub mod error;
pub mod linalg;
pub mod numeric;
pub mod phase_estimation;
pub mod seed;
pub mod state;
pub mod tolerance;
pub mod verifier;

pub use applications::{
    amplitude_estimation, continued_fraction_convergents, fourier_coefficients_periodic,
    period_finding, period_finding_run, periodic_state, AmplitudeEstimate, PeriodFindingResult,
    PeriodicStateSpec,
};
pub use bounds::{
    alpha_sq, bounds_table, tail_bound_conjectured, tail_bound_rigorous,
    tail_bound_rigorous_uniform, tail_probability_exact, TailBoundRow,
};
pub use channels::{exact_per_basis_infidelity, Channel, NoiseBudget, PerBasisInfidelity};
pub use circuit::{approx_qft_circuit, inverse_qft_circuit, qft_circuit, Circuit, Gate};
pub use error::{Error, Result};
pub use linalg::operator_distance;
pub use phase_estimation::{
    bad_outcome_bound, bad_outcome_bound_with_tail, good_outcome, median_phase_estimate,
    randomized_pe, run_pe_once, small_support_psd_check, Offset, PhaseRunOutcome, WindowSpec,
};
pub use seed::SeedStream;
pub use state::{
    fidelity_pure, measure_computational, prepare_fourier_basis_state, prepare_phase_state,
    StateVector,
};
pub use verifier::{estimate_average_infidelity, verdict, InfidelityEstimate, Verdict};
