//! Three-level state algebra for the coin-tossing protocol.
//!
//! Alice's four states, Bob's two measurement bases, Born-rule sampling with
//! visibility loss and detector efficiency, projective collapse, and the
//! Helstrom discrimination bound.

mod discrimination;
mod labels;
mod measure;
mod state;

use thiserror::Error;

pub use discrimination::{helstrom_win_probability, trace_norm};
pub use labels::{BasisLabel, Coin, OutcomeLabel, StateLabel};
pub use measure::{
    apply_noise, born_probabilities, calibrate_visibility, collapse, collapse_computational,
    computational_probabilities, depolarize, honest_failure_rate, sample_outcome, Detection,
    NoiseModel,
};
pub(crate) use measure::sample_index;
pub use state::{
    basis_states, canonical_state, inner_product, outcome_state, DensityOperator, Operator,
    QutritState,
};

/// Tolerance for normalization, trace and Hermiticity checks.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density operator.
pub const PSD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QutritError {
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("operator has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("collapse onto {0} has zero probability")]
    ZeroProbabilityCollapse(String),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}
