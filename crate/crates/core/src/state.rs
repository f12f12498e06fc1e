//! Dense state-vector simulation.
//!
//! A register of `n` qubits is stored as `2^n` double-precision complex
//! amplitudes. Index `j` encodes the basis state `|q0 q1 ... q(n-1)>` with
//! qubit 0 as the most significant bit, i.e. `j = sum_i q_i 2^(n-i-1)`.
//! Global phase is never normalized away; comparisons up to phase are
//! explicit operations in [`crate::gates`].

use crate::circuit::GateOp;
use crate::gates::GateKind;
use crate::ising::IsingModel;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Hard cap on register width. At 28 qubits the amplitude array alone is
/// 4 GiB, which is as far as a desk-scale machine reasonably stretches.
pub const MAX_QUBITS: usize = 28;

/// Errors raised by state construction and manipulation.
#[derive(Debug, Error)]
pub enum StateError {
    #[error("num_qubits must be between 1 and {MAX_QUBITS}, got {requested}")]
    CapacityExceeded { requested: usize },
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error("qubit index {index} appears more than once")]
    DuplicateIndex { index: usize },
    #[error("gate acts on {expected} qubits but {got} indices were given")]
    ArityMismatch { expected: usize, got: usize },
    #[error("states have different sizes: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("operation requires a single-qubit state, got {num_qubits} qubits")]
    NotSingleQubit { num_qubits: usize },
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("amplitude array length {len} is not a power of two between 2 and 2^{MAX_QUBITS}")]
    BadAmplitudeCount { len: usize },
    #[error("amplitude norm {norm} is not 1 within 1e-8")]
    NotNormalized { norm: f64 },
    #[error(transparent)]
    Gate(#[from] crate::gates::GateError),
}

/// Bloch-sphere coordinates of a single-qubit pure state.
///
/// Carries both the Cartesian Pauli expectation values and the spherical
/// angles, with `theta` in `[0, pi]` and `phi` in `[0, 2 pi)`. At the
/// poles the azimuth is degenerate and reported as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Which values the characters of a sample bitstring stand for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ValueDomain {
    /// '0'/'1' are the qubit values themselves.
    Binary,
    /// '0' stands for spin -1 and '1' for spin +1.
    Spin,
}

/// One distinct outcome in a [`SampleSet`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SampleRow {
    /// Outcome rendered as characters for q0..q(n-1), most significant first.
    pub bitstring: String,
    /// Model energy of the outcome, when an energy function applies.
    pub energy: Option<f64>,
    pub occurrences: u64,
    /// Fraction of chains that disagreed internally before repair; 0 for
    /// anything that never went through an embedding.
    pub chain_break_fraction: f64,
}

/// A multiset of measurement or sampling outcomes.
///
/// Rows are unique by bitstring. When energies are present rows are sorted
/// ascending by energy; otherwise by occurrences descending, then
/// bitstring, so the most frequent outcome comes first either way.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SampleSet {
    pub rows: Vec<SampleRow>,
    pub num_variables: usize,
    pub total_shots: u64,
    pub domain: ValueDomain,
}

impl SampleSet {
    /// Orders rows canonically: by energy when every row has one, by
    /// frequency otherwise.
    pub fn sort_rows(&mut self) {
        if self.rows.iter().all(|r| r.energy.is_some()) {
            self.rows.sort_by(|a, b| {
                a.energy
                    .partial_cmp(&b.energy)
                    .unwrap()
                    .then_with(|| a.bitstring.cmp(&b.bitstring))
            });
        } else {
            self.rows.sort_by(|a, b| {
                b.occurrences
                    .cmp(&a.occurrences)
                    .then_with(|| a.bitstring.cmp(&b.bitstring))
            });
        }
    }

    /// Occurrences of one exact bitstring, 0 when absent.
    pub fn count_of(&self, bitstring: &str) -> u64 {
        self.rows
            .iter()
            .find(|r| r.bitstring == bitstring)
            .map_or(0, |r| r.occurrences)
    }
}

/// Renders basis index `j` as the bitstring `q0...q(n-1)`.
pub fn bitstring_of_index(j: usize, num_qubits: usize) -> String {
    format!("{j:0num_qubits$b}")
}

/// The dense state vector of a qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// The all-zeros computational basis state `|0...0>`.
pub fn new_zero_state(num_qubits: usize) -> Result<StateVector, StateError> {
    if !(1..=MAX_QUBITS).contains(&num_qubits) {
        return Err(StateError::CapacityExceeded {
            requested: num_qubits,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << num_qubits];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector { num_qubits, amps })
}

impl StateVector {
    /// Builds a state from explicit amplitudes.
    ///
    /// The length must be a power of two and the norm must already be 1
    /// within 1e-8; the vector is then normalized exactly.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, StateError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > (1usize << MAX_QUBITS) {
            return Err(StateError::BadAmplitudeCount { len });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(StateError::NotNormalized { norm });
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector {
            num_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// L2 norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability of each basis state, `p_j = |psi_j|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`, with the conjugate on `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64, StateError> {
        if self.num_qubits != other.num_qubits {
            return Err(StateError::SizeMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies one gate operation in place.
    pub fn apply_gate(&mut self, op: &GateOp) -> Result<(), StateError> {
        self.apply(&op.kind, &op.qubits)
    }

    /// Applies `kind` to the listed qubits (controls before targets).
    pub fn apply(&mut self, kind: &GateKind, qubits: &[usize]) -> Result<(), StateError> {
        let arity = kind.arity();
        if qubits.len() != arity {
            return Err(StateError::ArityMismatch {
                expected: arity,
                got: qubits.len(),
            });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(StateError::IndexOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(StateError::DuplicateIndex { index: q });
            }
        }
        match kind {
            GateKind::Cnot => self.controlled_1q(&GateKind::X.matrix(), &[qubits[0]], qubits[1]),
            GateKind::CUk(k) => {
                self.controlled_1q(&GateKind::Rk(*k).matrix(), &[qubits[0]], qubits[1])
            }
            GateKind::CUkdg(k) => {
                self.controlled_1q(&GateKind::Rkdg(*k).matrix(), &[qubits[0]], qubits[1])
            }
            GateKind::CPhase(lambda) => {
                self.controlled_1q(&GateKind::U1(*lambda).matrix(), &[qubits[0]], qubits[1])
            }
            GateKind::Cz => self.controlled_1q(&GateKind::Z.matrix(), &[qubits[0]], qubits[1]),
            GateKind::Cs => self.controlled_1q(&GateKind::S.matrix(), &[qubits[0]], qubits[1]),
            GateKind::Csdg => self.controlled_1q(&GateKind::Sdg.matrix(), &[qubits[0]], qubits[1]),
            GateKind::Toffoli => {
                self.controlled_1q(&GateKind::X.matrix(), &qubits[..2], qubits[2])
            }
            GateKind::Custom2Q(m) => self.general_2q(m, qubits[0], qubits[1]),
            _ => self.general_1q(&kind.matrix(), qubits[0]),
        }
        Ok(())
    }

    /// Bit position (from the least significant end) of a qubit index.
    fn bit(&self, qubit: usize) -> usize {
        self.num_qubits - 1 - qubit
    }

    fn general_1q(&mut self, u: &DMatrix<Complex64>, target: usize) {
        let stride = 1usize << self.bit(target);
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        let mut base = 0;
        while base < self.amps.len() {
            for j0 in base..base + stride {
                let j1 = j0 + stride;
                let (a, b) = (self.amps[j0], self.amps[j1]);
                self.amps[j0] = u00 * a + u01 * b;
                self.amps[j1] = u10 * a + u11 * b;
            }
            base += stride << 1;
        }
    }

    fn controlled_1q(&mut self, u: &DMatrix<Complex64>, controls: &[usize], target: usize) {
        let stride = 1usize << self.bit(target);
        let cmask: usize = controls.iter().map(|&c| 1usize << self.bit(c)).sum();
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        let mut base = 0;
        while base < self.amps.len() {
            for j0 in base..base + stride {
                if j0 & cmask != cmask {
                    continue;
                }
                let j1 = j0 + stride;
                let (a, b) = (self.amps[j0], self.amps[j1]);
                self.amps[j0] = u00 * a + u01 * b;
                self.amps[j1] = u10 * a + u11 * b;
            }
            base += stride << 1;
        }
    }

    fn general_2q(&mut self, u: &DMatrix<Complex64>, first: usize, second: usize) {
        let hi = 1usize << self.bit(first);
        let lo = 1usize << self.bit(second);
        for j in 0..self.amps.len() {
            if j & hi != 0 || j & lo != 0 {
                continue;
            }
            let idx = [j, j | lo, j | hi, j | hi | lo];
            let old = idx.map(|i| self.amps[i]);
            for (row, &i) in idx.iter().enumerate() {
                self.amps[i] = (0..4).map(|col| u[(row, col)] * old[col]).sum();
            }
        }
    }

    /// Bloch coordinates of a single-qubit state.
    pub fn bloch_vector(&self) -> Result<BlochVector, StateError> {
        if self.num_qubits != 1 {
            return Err(StateError::NotSingleQubit {
                num_qubits: self.num_qubits,
            });
        }
        let (a, b) = (self.amps[0], self.amps[1]);
        let cross = a.conj() * b;
        let theta = 2.0 * b.norm().atan2(a.norm());
        let phi = if theta.sin() < 1e-12 {
            0.0
        } else {
            (b.arg() - a.arg()).rem_euclid(2.0 * std::f64::consts::PI)
        };
        Ok(BlochVector {
            rx: 2.0 * cross.re,
            ry: 2.0 * cross.im,
            rz: a.norm_sqr() - b.norm_sqr(),
            theta,
            phi,
        })
    }

    /// Draws `shots` independent basis-state samples.
    ///
    /// Sampling is inverse-CDF over the cumulative probability array with a
    /// ChaCha8 generator seeded from `seed`, so identical inputs give
    /// identical results regardless of platform. The state is not changed.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> Result<SampleSet, StateError> {
        if shots == 0 {
            return Err(StateError::ZeroShots);
        }
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * acc;
            let j = cumulative.partition_point(|&c| c <= u).min(self.amps.len() - 1);
            *counts.entry(j).or_insert(0) += 1;
        }
        let mut set = SampleSet {
            rows: counts
                .into_iter()
                .map(|(j, occurrences)| SampleRow {
                    bitstring: bitstring_of_index(j, self.num_qubits),
                    energy: None,
                    occurrences,
                    chain_break_fraction: 0.0,
                })
                .collect(),
            num_variables: self.num_qubits,
            total_shots: shots,
            domain: ValueDomain::Binary,
        };
        set.sort_rows();
        Ok(set)
    }

    /// Expectation value of an Ising energy function in this state.
    ///
    /// Uses the gate-based spin convention: qubit value 0 means spin +1 and
    /// qubit value 1 means spin -1, i.e. `q_i = (1 - s_i) / 2`.
    pub fn ising_expectation(&self, model: &IsingModel) -> Result<f64, StateError> {
        if let Some(&index) = model
            .variables()
            .iter()
            .find(|&&v| v >= self.num_qubits)
        {
            return Err(StateError::IndexOutOfRange {
                index,
                num_qubits: self.num_qubits,
            });
        }
        let spin = |j: usize, i: usize| 1.0 - 2.0 * ((j >> self.bit(i)) & 1) as f64;
        let mut expectation = 0.0;
        for (j, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut energy = model.offset();
            for (&i, &h) in model.fields() {
                energy += h * spin(j, i);
            }
            for (&(i, k), &coupling) in model.couplings() {
                energy += coupling * spin(j, i) * spin(j, k);
            }
            expectation += p * energy;
        }
        Ok(expectation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateKind;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_state_shapes() {
        let s = new_zero_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = new_zero_state(2).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert_eq!(s.amplitudes().len(), 4);
        assert!(matches!(
            new_zero_state(0),
            Err(StateError::CapacityExceeded { .. })
        ));
        assert!(matches!(
            new_zero_state(MAX_QUBITS + 1),
            Err(StateError::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn hadamard_makes_uniform_superposition() {
        let mut s = new_zero_state(1).unwrap();
        s.apply(&GateKind::H, &[0]).unwrap();
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_with_more_significant_control() {
        // |10> has q0 = 1 (control set), so the target flips to |11>.
        let mut s = new_zero_state(2).unwrap();
        s.apply(&GateKind::X, &[0]).unwrap();
        s.apply(&GateKind::Cnot, &[0, 1]).unwrap();
        assert!((s.amplitudes()[0b11] - c(1.0, 0.0)).norm() < 1e-15);
        // |01> leaves the control clear; nothing moves.
        let mut s = new_zero_state(2).unwrap();
        s.apply(&GateKind::X, &[1]).unwrap();
        s.apply(&GateKind::Cnot, &[0, 1]).unwrap();
        assert!((s.amplitudes()[0b01] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn toffoli_needs_both_controls() {
        let mut s = new_zero_state(3).unwrap();
        s.apply(&GateKind::X, &[0]).unwrap();
        s.apply(&GateKind::Toffoli, &[0, 1, 2]).unwrap();
        assert!((s.amplitudes()[0b100] - c(1.0, 0.0)).norm() < 1e-15);
        s.apply(&GateKind::X, &[1]).unwrap();
        s.apply(&GateKind::Toffoli, &[0, 1, 2]).unwrap();
        assert!((s.amplitudes()[0b111] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn index_validation() {
        let mut s = new_zero_state(2).unwrap();
        assert!(matches!(
            s.apply(&GateKind::H, &[2]),
            Err(StateError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            s.apply(&GateKind::Cnot, &[1, 1]),
            Err(StateError::DuplicateIndex { .. })
        ));
        assert!(matches!(
            s.apply(&GateKind::Cnot, &[0]),
            Err(StateError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn custom_2q_agrees_with_named_gates() {
        // A custom matrix equal to CNOT must act identically on a random
        // state, exercising the general 4x4 kernel against the controlled
        // fast path.
        let amps: Vec<Complex64> = vec![
            c(0.1, 0.2),
            c(-0.3, 0.1),
            c(0.4, -0.2),
            c(0.2, 0.3),
            c(-0.1, -0.4),
            c(0.3, 0.0),
            c(0.0, 0.25),
            c(0.35, -0.15),
        ];
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.into_iter().map(|a| a / norm).collect();
        for (hi, lo) in [(0usize, 1usize), (1, 2), (2, 0)] {
            let mut via_named = StateVector::from_amplitudes(amps.clone()).unwrap();
            via_named.apply(&GateKind::Cnot, &[hi, lo]).unwrap();
            let mut via_custom = StateVector::from_amplitudes(amps.clone()).unwrap();
            let custom = GateKind::custom_2q(GateKind::Cnot.matrix()).unwrap();
            via_custom.apply(&custom, &[hi, lo]).unwrap();
            for (x, y) in via_named.amplitudes().iter().zip(via_custom.amplitudes()) {
                assert!((x - y).norm() < 1e-14, "kernels disagree on ({hi},{lo})");
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut s = new_zero_state(3).unwrap();
        for q in 0..3 {
            s.apply(&GateKind::H, &[q]).unwrap();
        }
        s.apply(&GateKind::T, &[1]).unwrap();
        let p = s.probabilities();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| (x - 0.125).abs() < 1e-12));
    }

    #[test]
    fn bloch_vector_examples() {
        let s = new_zero_state(1).unwrap();
        let b = s.bloch_vector().unwrap();
        assert_eq!((b.rx, b.ry, b.rz), (0.0, 0.0, 1.0));
        assert_eq!(b.theta, 0.0);
        assert_eq!(b.phi, 0.0);

        // (|0> + i|1>)/sqrt 2 sits on the +y axis.
        let s = StateVector::from_amplitudes(vec![
            c(FRAC_1_SQRT_2, 0.0),
            c(0.0, FRAC_1_SQRT_2),
        ])
        .unwrap();
        let b = s.bloch_vector().unwrap();
        assert!(b.rx.abs() < 1e-12);
        assert!((b.ry - 1.0).abs() < 1e-12);
        assert!(b.rz.abs() < 1e-12);
        assert!((b.theta - PI / 2.0).abs() < 1e-12);
        assert!((b.phi - PI / 2.0).abs() < 1e-12);

        // cos(theta/2) = sqrt(3)/2, relative phase pi/4.
        let s = StateVector::from_amplitudes(vec![
            c(3f64.sqrt() / 2.0, 0.0),
            c(0.25 * 2f64.sqrt(), 0.25 * 2f64.sqrt()),
        ])
        .unwrap();
        let b = s.bloch_vector().unwrap();
        assert!((b.theta - PI / 3.0).abs() < 1e-12);
        assert!((b.phi - PI / 4.0).abs() < 1e-12);
        // Cartesian and spherical forms agree.
        assert!((b.rx - b.theta.sin() * b.phi.cos()).abs() < 1e-10);
        assert!((b.ry - b.theta.sin() * b.phi.sin()).abs() < 1e-10);
        assert!((b.rz - b.theta.cos()).abs() < 1e-10);

        let two = new_zero_state(2).unwrap();
        assert!(matches!(
            two.bloch_vector(),
            Err(StateError::NotSingleQubit { .. })
        ));
    }

    #[test]
    fn inner_product_basics() {
        let zero = new_zero_state(1).unwrap();
        let mut one = new_zero_state(1).unwrap();
        one.apply(&GateKind::X, &[0]).unwrap();
        assert_eq!(zero.inner_product(&zero).unwrap(), c(1.0, 0.0));
        assert_eq!(zero.inner_product(&one).unwrap(), c(0.0, 0.0));
        let other = new_zero_state(2).unwrap();
        assert!(matches!(
            zero.inner_product(&other),
            Err(StateError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_complete() {
        let mut s = new_zero_state(2).unwrap();
        s.apply(&GateKind::X, &[0]).unwrap();
        s.apply(&GateKind::X, &[1]).unwrap();
        let set = s.sample_counts(100, 7).unwrap();
        assert_eq!(set.rows.len(), 1);
        assert_eq!(set.rows[0].bitstring, "11");
        assert_eq!(set.rows[0].occurrences, 100);
        assert_eq!(set.total_shots, 100);

        let mut s = new_zero_state(3).unwrap();
        for q in 0..3 {
            s.apply(&GateKind::H, &[q]).unwrap();
        }
        let a = s.sample_counts(5000, 42).unwrap();
        let b = s.sample_counts(5000, 42).unwrap();
        assert_eq!(a, b);
        let other_seed = s.sample_counts(5000, 43).unwrap();
        assert_ne!(a, other_seed);
        assert_eq!(a.rows.iter().map(|r| r.occurrences).sum::<u64>(), 5000);
        assert!(matches!(s.sample_counts(0, 1), Err(StateError::ZeroShots)));
    }

    #[test]
    fn ising_expectation_uses_gate_convention() {
        let model = IsingModel::example_three_spin();
        // |000> is all spins +1: -1 + 1/2 - 1/2 + 1/2 + 1/2 = 0.
        let s = new_zero_state(3).unwrap();
        assert!(s.ising_expectation(&model).unwrap().abs() < 1e-12);
        // |010> flips the middle spin to -1 and lands on the minimum.
        let mut s = new_zero_state(3).unwrap();
        s.apply(&GateKind::X, &[1]).unwrap();
        assert!((s.ising_expectation(&model).unwrap() + 3.0).abs() < 1e-12);
        // The uniform superposition averages the full spectrum to zero.
        let mut s = new_zero_state(3).unwrap();
        for q in 0..3 {
            s.apply(&GateKind::H, &[q]).unwrap();
        }
        assert!(s.ising_expectation(&model).unwrap().abs() < 1e-12);
        // Out-of-range model variables are rejected.
        let narrow = new_zero_state(2).unwrap();
        assert!(matches!(
            narrow.ising_expectation(&model),
            Err(StateError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn from_amplitudes_validation() {
        assert!(matches!(
            StateVector::from_amplitudes(vec![c(1.0, 0.0); 3]),
            Err(StateError::BadAmplitudeCount { .. })
        ));
        assert!(matches!(
            StateVector::from_amplitudes(vec![c(0.9, 0.0), c(0.0, 0.0)]),
            Err(StateError::NotNormalized { .. })
        ));
        // A norm off by less than 1e-8 is accepted and renormalized.
        let s = StateVector::from_amplitudes(vec![c(1.0 + 4e-9, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }
}
