//! Circuit representation, composition, inversion, simulation, and dense
//! unitary extraction.

use crate::gates::GateKind;
use crate::state::{bitstring_of_index, new_zero_state, SampleSet, StateError, StateVector};
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Dense unitary extraction allocates a `2^n x 2^n` complex matrix; 12
/// qubits is a 256 MB ceiling and more than any identity check needs.
pub const TO_UNITARY_MAX_QUBITS: usize = 12;

/// Errors raised by circuit construction and evaluation.
#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("circuit acts on {circuit} qubits but the state has {state}")]
    SizeMismatch { circuit: usize, state: usize },
    #[error("dense unitary extraction is capped at {TO_UNITARY_MAX_QUBITS} qubits, circuit has {num_qubits}")]
    UnitaryCapExceeded { num_qubits: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

/// One gate application: which gate, and which qubits it acts on, controls
/// listed before targets.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

/// A circuit instruction: either a gate or a barrier marker. Barriers are
/// purely structural (they survive round-trips through the text format)
/// and never touch amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Gate(GateOp),
    Barrier,
}

/// An ordered gate sequence over a fixed-width qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub ops: Vec<Instruction>,
    /// Marks that the caller intends to sample the final state; simulation
    /// itself stays pure and sampling is an explicit separate step.
    pub measure_all: bool,
}

impl Circuit {
    /// An empty circuit over `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            ops: Vec::new(),
            measure_all: false,
        }
    }

    /// Appends a gate after validating arity and qubit indices.
    pub fn push(&mut self, kind: GateKind, qubits: &[usize]) -> Result<&mut Self, CircuitError> {
        let arity = kind.arity();
        if qubits.len() != arity {
            return Err(StateError::ArityMismatch {
                expected: arity,
                got: qubits.len(),
            }
            .into());
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(StateError::IndexOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                }
                .into());
            }
            if qubits[..i].contains(&q) {
                return Err(StateError::DuplicateIndex { index: q }.into());
            }
        }
        self.ops.push(Instruction::Gate(GateOp {
            kind,
            qubits: qubits.to_vec(),
        }));
        Ok(self)
    }

    /// Appends a barrier marker.
    pub fn push_barrier(&mut self) -> &mut Self {
        self.ops.push(Instruction::Barrier);
        self
    }

    /// The gate operations in order, skipping barriers.
    pub fn gate_ops(&self) -> impl Iterator<Item = &GateOp> {
        self.ops.iter().filter_map(|op| match op {
            Instruction::Gate(g) => Some(g),
            Instruction::Barrier => None,
        })
    }

    /// Number of gate operations (barriers excluded).
    pub fn gate_count(&self) -> usize {
        self.gate_ops().count()
    }

    /// Applies the circuit to `initial`, left to right.
    pub fn simulate(&self, initial: &StateVector) -> Result<StateVector, CircuitError> {
        if initial.num_qubits() != self.num_qubits {
            return Err(CircuitError::SizeMismatch {
                circuit: self.num_qubits,
                state: initial.num_qubits(),
            });
        }
        let mut state = initial.clone();
        for op in self.gate_ops() {
            state.apply_gate(op)?;
        }
        Ok(state)
    }

    /// Convenience: simulate from `|0...0>`.
    pub fn simulate_from_zero(&self) -> Result<StateVector, CircuitError> {
        self.simulate(&new_zero_state(self.num_qubits)?)
    }

    /// The full `2^n x 2^n` unitary of the circuit, assembled column by
    /// column. Matrix-product order puts the first op rightmost.
    pub fn to_unitary(&self) -> Result<DMatrix<Complex64>, CircuitError> {
        if self.num_qubits > TO_UNITARY_MAX_QUBITS {
            return Err(CircuitError::UnitaryCapExceeded {
                num_qubits: self.num_qubits,
            });
        }
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[j] = Complex64::new(1.0, 0.0);
            let column = self.simulate(&StateVector::from_amplitudes(amps)?)?;
            for (i, a) in column.amplitudes().iter().enumerate() {
                m[(i, j)] = *a;
            }
        }
        Ok(m)
    }

    /// The inverse circuit: ops reversed, each gate replaced by its dagger.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            ops: self
                .ops
                .iter()
                .rev()
                .map(|op| match op {
                    Instruction::Gate(g) => Instruction::Gate(GateOp {
                        kind: g.kind.dagger(),
                        qubits: g.qubits.clone(),
                    }),
                    Instruction::Barrier => Instruction::Barrier,
                })
                .collect(),
            measure_all: self.measure_all,
        }
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.num_qubits != other.num_qubits {
            return Err(CircuitError::SizeMismatch {
                circuit: self.num_qubits,
                state: other.num_qubits,
            });
        }
        let mut out = self.clone();
        out.ops.extend(other.ops.iter().cloned());
        out.measure_all = other.measure_all;
        Ok(out)
    }
}

/// Reverses `j` as an `n`-bit integer.
pub fn bit_reverse(j: usize, n: usize) -> usize {
    let mut out = 0;
    for b in 0..n {
        out |= ((j >> b) & 1) << (n - 1 - b);
    }
    out
}

/// Moves the amplitude at index `j` to index bit-reverse(`j`), converting
/// between the `|q0...q(n-1)>` ordering and its mirror. An involution.
pub fn reverse_state_bit_ordering(state: &StateVector) -> StateVector {
    let n = state.num_qubits();
    let src = state.amplitudes();
    let mut amps = vec![Complex64::new(0.0, 0.0); src.len()];
    for (j, a) in src.iter().enumerate() {
        amps[bit_reverse(j, n)] = *a;
    }
    StateVector::from_amplitudes(amps).expect("permuting amplitudes preserves the norm")
}

/// The same reindexing applied to sampled outcomes: every bitstring is
/// reversed and rows are re-sorted canonically.
pub fn reverse_samples_bit_ordering(set: &SampleSet) -> SampleSet {
    let mut out = set.clone();
    for row in &mut out.rows {
        row.bitstring = row.bitstring.chars().rev().collect();
    }
    out.sort_rows();
    out
}

/// Renders the basis index of each nonzero amplitude; used by callers that
/// report states in ket notation.
pub fn basis_label(j: usize, num_qubits: usize) -> String {
    bitstring_of_index(j, num_qubits)
}
