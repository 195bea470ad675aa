//! Exact simulation of coined discrete-time quantum walks on a line and on
//! an n-cycle, with a generalized phase gate and qubit noise channels.
//!
//! Walks evolve as pure states (unitary runs) or dense density matrices
//! (noisy runs). The analysis layer measures how a phase gate
//! `G(α, β) = diag(e^{iα}, e^{iβ})` changes the position distribution
//! (Kolmogorov distance) and how much coherence survives the noise.

pub mod config;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod noise;
pub mod observables;
pub mod operators;
pub mod oracle;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use evolution::{
    evolve, evolve_noisy, evolve_pure, paired_run, Duration, EvolutionRecord, NoiseModel,
    RecordOptions, RunSpec, StepRecord, WalkerState,
};
pub use noise::{
    apply_channel, gad_kraus, phase_damping_kraus, thermal_occupation, GadParams, KrausSet,
};
pub use observables::{
    coherence_function, coherence_total, kolmogorov_distance, normalized_metrics,
    position_distribution, CoherenceProfile, Observable, PositionDistribution, SymmetryMetrics,
};
pub use operators::{
    apply_coin, apply_shift, build_coin, build_phase_gate, walk_step, CoinMatrix, CoinParams,
    PhaseGateParams, WalkState,
};
pub use oracle::{path_sum_state, phase_factor_audit, PathTerm, PhaseAudit};
pub use state::{
    make_initial_pure, pure_to_density, DensityMatrix, InitialStateParams, PureState, Topology,
};
