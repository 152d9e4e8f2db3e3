//! Exact state-vector QAOA on small Ising models, with either the classical
//! energy or a Gibbs-state-encoding Hamiltonian as the cost.
//!
//! The Gibbs-encoding cost `H_S(T)` has the coherent Gibbs state
//! `Σ_σ sqrt(P_Gibbs(σ)) |σ⟩` as its unique zero-energy ground state, so
//! minimizing its expectation drives the measured distribution toward the
//! Boltzmann distribution at temperature `T` and samples degenerate ground
//! states evenly.

pub mod error;
pub mod evolution;
pub mod harness;
pub mod ising;
pub mod metrics;
pub mod operators;
pub mod variational;

pub use error::{HarnessError, IsingError, OperatorError, OptimizeError};
pub use evolution::{plus_state, probabilities, run_circuit, Circuit, CostKind, StateVector};
pub use harness::{run_point, run_sweep, Method, SweepConfig, SweepPoint, SweepRecord};
pub use ising::{
    classical_energy, gibbs_distribution, ground_set, parse_instance, toy_instance, Distribution,
    GibbsDistribution, GroundSet, IsingInstance, SpinConfig,
};
pub use metrics::{
    fairness_report, ground_state_probability, orbit_probabilities, total_variation_distance,
    FairnessReport,
};
pub use operators::{
    alpha, build_sbo, eigh, expectation, local_diagonal, DenseMatrix, DiagonalOperator,
    EigenDecomposition, Hamiltonian, SboOperator, TransverseField,
};
pub use variational::{
    linear_to_schedule, optimize_qaoa, powell_minimize, tqa_schedule, AngleSchedule, LinearParams,
    OptResult, PowellOptions, QaoaOptions, QaoaOutcome, Scheme,
};
