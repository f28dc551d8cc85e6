//! Charts, pointwise differential geometry and global constants.

mod chart;
mod constants;
mod local;

pub use chart::{
    Chart, Domain, Immersion, ImmersionJet, ScalarField, ScalarJet, TensorField, TensorJet, DEFAULT_FD_RESOLUTION,
};
pub use constants::{
    compute_constants, riemannian_volume, unit_ball_volume, weighted_volume, GeometricConstants, MIN_SAMPLE_RESOLUTION,
};
pub use local::{second_fundamental_form, LocalGeometry, SecondFundamentalForm};
