//! Quantum channels and superoperators.
//!
//! Superoperators on `M_D` are stored as `D^2 x D^2` matrices acting on
//! column-stacked vectorizations, so `vec(A M B) = (B^T ⊗ A) vec(M)`.
//! Channels that drive dynamics (fixed points, mixing) are expected to be
//! trace preserving; which Kraus convention produced them is irrelevant once
//! the superoperator exists.

mod density;
mod dobrushin;
mod kraus;
mod spectral;
mod superop;

pub use density::DensityMatrix;
pub use dobrushin::{
    check_contraction, convergence_trace, depolarizing_kappa, md_constant, mixing_rate, ContractionCheck, ConvergenceRow, Exactness,
    KappaMethod, MdReport,
};
pub use kraus::{is_cptp, is_unital, ChannelCheck, Convention, CptpReport, KrausFamily};
pub use spectral::{
    fixed_point, limit_channel, spectral_classification, SpectralReport, UNIT_CIRCLE_TOL,
};
pub use superop::SuperOperator;
