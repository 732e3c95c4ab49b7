//! Exact single-qubit state and channel arithmetic.

mod channel;
mod matrix;
mod state;

pub use channel::{
    apply_channel, dephasing_channel, depolarizing_channel, identity_channel,
    seal_example_channel, validate_channel, ChannelFile, KrausChannel, ValidationReport,
    COMPLETENESS_TOL, NEGLIGIBLE_OPERATOR,
};
pub use matrix::{Mat2, C64};
pub use state::{
    bloch_from_density, density_from_bloch, measurement_prob, BlochVector, DensityMatrix,
    MeasurementBasis, MeasurementResult, ProtocolPureState, STATE_TOL,
};
