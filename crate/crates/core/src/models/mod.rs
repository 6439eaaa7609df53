//! Hidden-function models: profiles, directions, and the query oracle.

mod oracle;
mod profile;

pub use oracle::{
    make_direction, DirectionMode, FunctionOracle, GroundTruth, ModelKind, NoiseSpec, NormKind,
    DOMAIN_TOL,
};
pub use profile::{make_profile, Lipschitz, Profile, PROFILE_NAMES, TANH_SECOND_DERIV_MAX};
