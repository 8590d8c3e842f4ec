//! State-vector simulation and benchmarking of Grover search circuits.
//!
//! The crate is organised bottom-up:
//!
//! - [`circuit`]: gate set, register conventions and a dense-unitary reference.
//! - [`sim`]: noiseless state-vector kernels, exact distributions and shot sampling.
//! - [`grover`]: builders for the three oracle variants (SDP, no ancilla, one ancilla).
//! - [`noise`]: depolarizing and readout noise via Monte-Carlo trajectories.
//! - [`transpile`]: multi-controlled gate decomposition, routing and circuit metrics.
//! - [`analysis`]: selectivity, closed-form success probability, distances.
//! - [`qasm`]: OpenQASM 2.0 export.
//!
//! Basis states are little-endian: bit `i` of a basis index is the value of
//! qubit `q_i`, and bitstrings are rendered `q_{n-1} … q_0`, so `|1110⟩` on
//! four qubits is index 14.

pub mod analysis;
pub mod circuit;
mod error;
pub mod grover;
pub mod noise;
pub mod qasm;
pub mod sim;
pub mod transpile;

pub use analysis::{selectivity, theoretical_success, total_variation, SelectivityReport};
pub use circuit::{Circuit, GateKind, GateOp, UnitaryMatrix};
pub use error::{Error, Result};
pub use grover::{build_grover, GroverSpec, Variant};
pub use noise::{run_noisy, NoiseModel};
pub use sim::{run_ideal, Distribution, Histogram, StateVector};
pub use transpile::{decompose, metrics, route, CircuitMetrics, CouplingGraph};

/// Largest register the state-vector executor accepts (2^24 amplitudes ≈ 256 MiB).
pub const MAX_WIDTH: usize = 24;

/// Largest register for which a dense unitary is materialised.
pub const MAX_DENSE_WIDTH: usize = 10;
