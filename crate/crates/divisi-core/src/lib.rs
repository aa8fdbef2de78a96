//! One-step positive-divisibility analysis of system-environment unitary
//! dynamics.
//!
//! Given a global unitary on a system ⊗ environment register and a pair of
//! (possibly correlated) joint input states, the crate computes trace-norm
//! and Hilbert-Schmidt distances at input and output for the joint state
//! and both marginals, classifies each evolution step as P-divisible or
//! P-indivisible, extracts Kraus operators from the dilation, checks
//! unitality and complete positivity, evaluates the joint/marginal
//! distance inequalities, and searches for witness pairs whose system
//! distance grows across the step.
//!
//! Conventions: qubit 0 is the leftmost ket symbol and the most
//! significant index bit; bipartitions may name arbitrary qubit subsets;
//! all tolerances are max-entry magnitudes unless stated otherwise.

pub mod channels;
pub mod divisibility;
pub mod error;
pub mod formats;
pub mod matkernel;
pub mod random;
pub mod scenarios;
pub mod states;

pub use channels::{KrausChannel, MixedUnitarySpec, UnitalityReport, UnitaryDilation};
pub use divisibility::{
    contraction_check, distance, hs_distance_sq, probe_step, probe_step_with, theorem1_identity,
    theorem2_report, trace_distance, witness_search, Metric, StepReport, StepVerdict,
    Theorem2Report, WitnessConfig, WitnessResult,
};
pub use error::{Error, Result};
pub use matkernel::{c64, ComplexMatrix};
pub use scenarios::{
    build_scenario, reference_distances, run_scenario, Mode, Scenario, ScenarioName,
    ScenarioReport,
};
pub use states::{Bipartition, DensityMatrix, PureState, Subsystem, Validation};
