//! Matrix product state chains and their Heisenberg-picture evaluation.
//!
//! Basis indices are 0-based. Site positions are 1-based, so a window
//! `[first, last]` with `first = 1` starts at the left end of the chain.

mod chain;
mod ergodic;
mod heisenberg;
mod observable;
mod projective;
mod state;

pub use chain::{MpsChain, Sites};
pub use ergodic::ergodic_limit;
pub use heisenberg::{
    finite_expectation, lift_observable, normalization, transfer_channel, transfer_product,
    Evaluation,
};
pub use observable::LocalObservable;
pub use projective::{
    default_probes, gauge_check, projective_consistency_check, projective_limit,
    projectivity_probe, trace_product_identity, ConsistencyReport, GaugeReport, ProbeRecord,
    ProjectivityReport, TraceIdentityCheck, Verdict,
};
pub use state::{state_vector, Caps, EvalOptions, StateVector};
