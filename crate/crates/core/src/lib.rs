//! A desk-scale quantum computing toolkit: a dense state-vector simulator
//! with a fixed gate set and a textual circuit format, builders for the
//! Fourier transform, phase-space adder, and QAOA circuits, Ising/QUBO
//! modeling with exact and sampled solvers, schedule-driven closed-system
//! annealing diagnostics, and Chimera minor-embedding.
//!
//! Conventions used throughout: qubit 0 is the most significant position of
//! a basis index, so `|q0 q1 ... q(n-1)>` reads left to right; energies
//! follow `E = sum h_i s_i + sum J_ij s_i s_j` over spins `s_i` in {-1, +1};
//! every source of randomness takes an explicit seed.

pub mod algorithms;
pub mod anneal;
pub mod circuit;
pub mod embed;
pub mod gates;
pub mod ising;
pub mod parser;
pub mod state;

pub use algorithms::{
    build_draper_adder, build_qaoa_circuit, build_qft, qaoa_landscape, qaoa_optimize,
    AlgorithmError, Landscape, QaoaOptimizeResult, QaoaParams,
};
pub use anneal::{
    adiabatic_time_estimate, evolve_closed, ground_subspace_probability, hamiltonian_at,
    landau_zener_probability, min_gap, simulated_annealing, AnnealError, LandauZenerParams,
    LandauZenerResult, MinGapResult, Schedule, SpectrumSample,
};
pub use circuit::{Circuit, CircuitError, GateOp, Instruction};
pub use embed::{
    chimera_graph, embed_model, find_embedding, unembed, validate_embedding, EmbedError,
    Embedding, EmbeddingViolation, HardwareGraph,
};
pub use gates::{equal_up_to_global_phase, axis_angle_of, AxisAngle, GateError, GateKind};
pub use ising::{
    build_garden_model, ising_to_qubo, parse_problem_json, problem_to_json, qubo_to_ising,
    IsingError, IsingModel, Problem, QuboModel, Relation, SpinConfig,
};
pub use parser::{parse_circuit, serialize_circuit, ParseError, SerializeError};
pub use state::{
    new_zero_state, BlochVector, SampleRow, SampleSet, StateError, StateVector, ValueDomain,
};
