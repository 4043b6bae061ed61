//! Random streams, samplers, and the dense SPD kernel used by every policy.

mod linalg;
mod rng;
mod sampling;

pub use linalg::{
    cholesky, dot, max_abs_diff, sherman_morrison_in_place, sherman_morrison_update, CholeskyFactor,
    SpdMatrix, PIVOT_TOLERANCE,
};
pub(crate) use linalg::check_dim;
pub use rng::RngStream;
pub use sampling::{
    fill_standard_normal, sample_beta, sample_gamma, sample_mvn, sample_mvn_precision,
    sample_mvn_precision_into, standard_normal,
};
