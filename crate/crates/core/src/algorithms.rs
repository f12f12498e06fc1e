//! Circuit builders for the QFT, the phase-space adder, and QAOA, plus the
//! QAOA landscape scan and a derivative-free optimization loop.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitError};
use crate::gates::GateKind;
use crate::ising::IsingModel;

/// Largest addend register the adder builder accepts; the full circuit then
/// spans twice this many qubits.
pub const MAX_ADDER_BITS: usize = 6;

#[derive(Debug, thiserror::Error)]
pub enum AlgorithmError {
    #[error("at least one target qubit is required")]
    EmptyQubitList,
    #[error("qubit {index} appears more than once")]
    DuplicateQubit { index: usize },
    #[error("register size {m} outside 1..={MAX_ADDER_BITS}")]
    AdderSizeOutOfRange { m: usize },
    #[error("angle lists must both have length {p}, got {betas} betas and {gammas} gammas")]
    ParamLengthMismatch {
        p: usize,
        betas: usize,
        gammas: usize,
    },
    #[error("order p must be at least 1")]
    ZeroOrder,
    #[error("model variables must be contiguous from 0; found index {index} with only {used} variables in use")]
    NonContiguousVariables { index: usize, used: usize },
    #[error("target bitstring {target:?} does not fit a {num_qubits}-qubit register")]
    BadTargetBitstring { target: String, num_qubits: usize },
    #[error("both parameter grids must be non-empty")]
    EmptyGrid,
    #[error("evaluation cap must be at least 1")]
    ZeroEvaluationCap,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Variational angles for one QAOA run: `p` mixing angles beta and `p`
/// weighting angles gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    pub p: usize,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self, AlgorithmError> {
        let p = betas.len();
        if p == 0 {
            return Err(AlgorithmError::ZeroOrder);
        }
        if gammas.len() != p {
            return Err(AlgorithmError::ParamLengthMismatch {
                p,
                betas: betas.len(),
                gammas: gammas.len(),
            });
        }
        Ok(QaoaParams { p, betas, gammas })
    }
}

/// Energy and success-probability surfaces over a (beta, gamma) grid.
#[derive(Debug, Clone)]
pub struct Landscape {
    pub beta_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    /// `energy[bi][gi]` belongs to `(beta_grid[bi], gamma_grid[gi])`.
    pub energy: Vec<Vec<f64>>,
    /// Overlap probability with the target bitstring, same layout.
    pub success_probability: Vec<Vec<f64>>,
}

impl Landscape {
    /// Renders the grid as CSV, row-major: all gammas for the first beta,
    /// then the next beta, and so on.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,gamma,energy,success_probability\n");
        for (bi, beta) in self.beta_grid.iter().enumerate() {
            for (gi, gamma) in self.gamma_grid.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    beta, gamma, self.energy[bi][gi], self.success_probability[bi][gi]
                ));
            }
        }
        out
    }
}

fn check_distinct(qubits: &[usize]) -> Result<(), AlgorithmError> {
    if qubits.is_empty() {
        return Err(AlgorithmError::EmptyQubitList);
    }
    for (pos, &q) in qubits.iter().enumerate() {
        if qubits[..pos].contains(&q) {
            return Err(AlgorithmError::DuplicateQubit { index: q });
        }
    }
    Ok(())
}

/// Swap two qubits using three CNOTs, since the gate set has no native swap.
fn push_swap(circuit: &mut Circuit, a: usize, b: usize) -> Result<(), CircuitError> {
    circuit.push(GateKind::Cnot, &[a, b])?;
    circuit.push(GateKind::Cnot, &[b, a])?;
    circuit.push(GateKind::Cnot, &[a, b])?;
    Ok(())
}

/// Builds the quantum Fourier transform over `qubits`, where `qubits[0]` is
/// the most significant position of the transformed register.
///
/// With `include_swaps` the circuit matrix is the DFT itself,
/// `F[j][k] = 2^(-N/2) exp(2 pi i j k / 2^N)`. Without the trailing swaps the
/// output register comes back bit-reversed, i.e. the matrix is the DFT
/// followed by the bit-reversal permutation.
pub fn build_qft(qubits: &[usize], include_swaps: bool) -> Result<Circuit, AlgorithmError> {
    check_distinct(qubits)?;
    let n = qubits.len();
    let width = qubits.iter().max().unwrap() + 1;
    let mut circuit = Circuit::new(width);
    for i in 0..n {
        circuit.push(GateKind::H, &[qubits[i]])?;
        for d in 1..(n - i) {
            let k = (d + 1) as u32;
            circuit.push(GateKind::CUk(k), &[qubits[i + d], qubits[i]])?;
        }
    }
    if include_swaps {
        for i in 0..n / 2 {
            push_swap(&mut circuit, qubits[i], qubits[n - 1 - i])?;
        }
    }
    Ok(circuit)
}

/// Builds the phase-space adder on `2m` qubits: qubits `0..m` hold the addend
/// `l`, qubits `m..2m` an accumulator `j`, and the circuit maps the basis
/// state `|l>|j>` to `|l>|(j+l) mod 2^m>`.
///
/// The accumulator is rotated into the Fourier basis, picks up the addend
/// through controlled phases, and is rotated back; no swaps are needed
/// because the phase layer is written against the bit-reversed layout.
pub fn build_draper_adder(m: usize) -> Result<Circuit, AlgorithmError> {
    if !(1..=MAX_ADDER_BITS).contains(&m) {
        return Err(AlgorithmError::AdderSizeOutOfRange { m });
    }
    let second: Vec<usize> = (m..2 * m).collect();
    let qft = build_qft(&second, false)?;
    let mut circuit = Circuit::new(2 * m);
    circuit = circuit.compose(&qft)?;
    // Addend bit a (0-based from the most significant) advances accumulator
    // position i by 2 pi / 2^(a-i+1) whenever both bits are set.
    for a in 0..m {
        for i in 0..=a {
            let k = (a - i + 1) as u32;
            circuit.push(GateKind::CUk(k), &[a, m + i])?;
        }
    }
    circuit = circuit.compose(&qft.inverse())?;
    Ok(circuit)
}

fn check_contiguous(model: &IsingModel) -> Result<(), AlgorithmError> {
    let used = model.variables();
    if let Some(&max) = used.last() {
        if max + 1 != used.len() {
            return Err(AlgorithmError::NonContiguousVariables {
                index: max,
                used: used.len(),
            });
        }
    }
    Ok(())
}

/// Builds the QAOA circuit for `model`: a Hadamard layer, then per order `k`
/// a weighting block of `Rz(2 gamma_k h_i)` and `CNOT Rz(2 gamma_k J_ij) CNOT`
/// terms followed by a mixing layer of `Rx(2 beta_k)` on every qubit.
/// Zero-coefficient terms contribute no gates.
pub fn build_qaoa_circuit(
    model: &IsingModel,
    params: &QaoaParams,
) -> Result<Circuit, AlgorithmError> {
    check_contiguous(model)?;
    let n = model.num_variables().max(1);
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.push(GateKind::H, &[q])?;
    }
    for k in 0..params.p {
        let gamma = params.gammas[k];
        let beta = params.betas[k];
        for (&i, &h) in model.fields() {
            circuit.push(GateKind::Rz(2.0 * gamma * h), &[i])?;
        }
        for (&(i, j), &coupling) in model.couplings() {
            circuit.push(GateKind::Cnot, &[i, j])?;
            circuit.push(GateKind::Rz(2.0 * gamma * coupling), &[j])?;
            circuit.push(GateKind::Cnot, &[i, j])?;
        }
        for q in 0..n {
            circuit.push(GateKind::Rx(2.0 * beta), &[q])?;
        }
    }
    circuit.measure_all = true;
    Ok(circuit)
}

fn target_index(target: &str, num_qubits: usize) -> Result<usize, AlgorithmError> {
    let bad = || AlgorithmError::BadTargetBitstring {
        target: target.to_string(),
        num_qubits,
    };
    if target.len() != num_qubits || !target.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(bad());
    }
    usize::from_str_radix(target, 2).map_err(|_| bad())
}

/// Evaluates the exact p=1 QAOA energy and target-state overlap over the
/// cartesian product of the two angle grids.
pub fn qaoa_landscape(
    model: &IsingModel,
    beta_grid: &[f64],
    gamma_grid: &[f64],
    target: &str,
) -> Result<Landscape, AlgorithmError> {
    if beta_grid.is_empty() || gamma_grid.is_empty() {
        return Err(AlgorithmError::EmptyGrid);
    }
    check_contiguous(model)?;
    let n = model.num_variables().max(1);
    let target = target_index(target, n)?;
    let mut energy = vec![vec![0.0; gamma_grid.len()]; beta_grid.len()];
    let mut success = vec![vec![0.0; gamma_grid.len()]; beta_grid.len()];
    for (bi, &beta) in beta_grid.iter().enumerate() {
        for (gi, &gamma) in gamma_grid.iter().enumerate() {
            let params = QaoaParams::new(vec![beta], vec![gamma])?;
            let circuit = build_qaoa_circuit(model, &params)?;
            let state = circuit.simulate_from_zero()?;
            energy[bi][gi] = state
                .ising_expectation(model)
                .map_err(CircuitError::from)?;
            success[bi][gi] = state.amplitudes()[target].norm_sqr();
        }
    }
    Ok(Landscape {
        beta_grid: beta_grid.to_vec(),
        gamma_grid: gamma_grid.to_vec(),
        energy,
        success_probability: success,
    })
}

/// Outcome of [`qaoa_optimize`].
#[derive(Debug, Clone)]
pub struct QaoaOptimizeResult {
    pub params: QaoaParams,
    pub energy: f64,
    /// False when the evaluation cap ran out before the simplex collapsed.
    pub converged: bool,
    pub evaluations: usize,
}

/// Minimizes the exact QAOA energy over all 2p angles with Nelder-Mead.
///
/// The simplex starts at `init` plus one vertex per coordinate offset by
/// 0.1 radian, the offset sign drawn from the seeded generator. The best
/// energy seen is never worse than the energy at `init`.
pub fn qaoa_optimize(
    model: &IsingModel,
    p: usize,
    init: &QaoaParams,
    max_evaluations: usize,
    seed: u64,
) -> Result<QaoaOptimizeResult, AlgorithmError> {
    if p == 0 {
        return Err(AlgorithmError::ZeroOrder);
    }
    if init.p != p {
        return Err(AlgorithmError::ParamLengthMismatch {
            p,
            betas: init.betas.len(),
            gammas: init.gammas.len(),
        });
    }
    if max_evaluations == 0 {
        return Err(AlgorithmError::ZeroEvaluationCap);
    }
    check_contiguous(model)?;

    let dim = 2 * p;
    let split = |x: &[f64]| -> QaoaParams {
        QaoaParams {
            p,
            betas: x[..p].to_vec(),
            gammas: x[p..].to_vec(),
        }
    };

    let mut evaluations = 0usize;
    let mut best_x: Vec<f64> = Vec::new();
    let mut best_f = f64::INFINITY;
    let eval = |x: &[f64],
                    evaluations: &mut usize,
                    best_x: &mut Vec<f64>,
                    best_f: &mut f64|
     -> Result<f64, AlgorithmError> {
        let circuit = build_qaoa_circuit(model, &split(x))?;
        let state = circuit.simulate_from_zero()?;
        let f = state
            .ising_expectation(model)
            .map_err(CircuitError::from)?;
        *evaluations += 1;
        if f < *best_f {
            *best_f = f;
            *best_x = x.to_vec();
        }
        Ok(f)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0: Vec<f64> = init.betas.iter().chain(init.gammas.iter()).copied().collect();
    let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
    for i in 0..dim {
        let mut v = x0.clone();
        v[i] += if rng.gen::<bool>() { 0.1 } else { -0.1 };
        simplex.push(v);
    }
    let mut values = Vec::with_capacity(dim + 1);
    for v in &simplex {
        if evaluations >= max_evaluations {
            break;
        }
        values.push(eval(v, &mut evaluations, &mut best_x, &mut best_f)?);
    }
    while values.len() < simplex.len() {
        simplex.pop();
    }

    let mut converged = false;
    if simplex.len() == dim + 1 {
        loop {
            let mut order: Vec<usize> = (0..simplex.len()).collect();
            order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = values[dim] - values[0];
            let size = simplex[1..]
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&simplex[0])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread.abs() < 1e-10 && size < 1e-8 {
                converged = true;
                break;
            }
            if evaluations >= max_evaluations {
                break;
            }

            let centroid: Vec<f64> = (0..dim)
                .map(|i| simplex[..dim].iter().map(|v| v[i]).sum::<f64>() / dim as f64)
                .collect();
            let at = |t: f64| -> Vec<f64> {
                (0..dim)
                    .map(|i| centroid[i] + t * (simplex[dim][i] - centroid[i]))
                    .collect()
            };

            let reflected = at(-1.0);
            let f_r = eval(&reflected, &mut evaluations, &mut best_x, &mut best_f)?;
            if f_r < values[0] {
                if evaluations >= max_evaluations {
                    break;
                }
                let expanded = at(-2.0);
                let f_e = eval(&expanded, &mut evaluations, &mut best_x, &mut best_f)?;
                if f_e < f_r {
                    simplex[dim] = expanded;
                    values[dim] = f_e;
                } else {
                    simplex[dim] = reflected;
                    values[dim] = f_r;
                }
                continue;
            }
            if f_r < values[dim - 1] {
                simplex[dim] = reflected;
                values[dim] = f_r;
                continue;
            }
            if evaluations >= max_evaluations {
                break;
            }
            let contracted = if f_r < values[dim] { at(-0.5) } else { at(0.5) };
            let f_c = eval(&contracted, &mut evaluations, &mut best_x, &mut best_f)?;
            if f_c < values[dim].min(f_r) {
                simplex[dim] = contracted;
                values[dim] = f_c;
                continue;
            }
            // Shrink toward the best vertex.
            for i in 1..=dim {
                if evaluations >= max_evaluations {
                    break;
                }
                simplex[i] = (0..dim)
                    .map(|c| simplex[0][c] + 0.5 * (simplex[i][c] - simplex[0][c]))
                    .collect();
                values[i] = eval(&simplex[i], &mut evaluations, &mut best_x, &mut best_f)?;
            }
            if evaluations >= max_evaluations {
                break;
            }
        }
    }

    Ok(QaoaOptimizeResult {
        params: split(&best_x),
        energy: best_f,
        converged,
        evaluations,
    })
}

/// Uniform grid of `count` points over `[lo, hi)`, the half-open ranges the
/// landscape scan uses for beta in `[0, pi)` and gamma in `[0, 2 pi)`.
pub fn half_open_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / count as f64)
        .collect()
}

/// Convenience for the common scan ranges: beta over `[0, pi)`.
pub fn default_beta_grid(count: usize) -> Vec<f64> {
    half_open_grid(0.0, PI, count)
}

/// Convenience for the common scan ranges: gamma over `[0, 2 pi)`.
pub fn default_gamma_grid(count: usize) -> Vec<f64> {
    half_open_grid(0.0, 2.0 * PI, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn dft_matrix(n_qubits: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n_qubits;
        let scale = (dim as f64).sqrt().recip();
        DMatrix::from_fn(dim, dim, |j, k| {
            let angle = 2.0 * PI * (j * k) as f64 / dim as f64;
            Complex64::from_polar(scale, angle)
        })
    }

    fn bit_reversal_matrix(n_qubits: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let r = crate::circuit::bit_reverse(j, n_qubits);
            m[(r, j)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn qft_single_qubit_is_hadamard() {
        let c = build_qft(&[0], true).unwrap();
        assert_eq!(c.gate_count(), 1);
        let u = c.to_unitary().unwrap();
        assert!(max_abs_diff(&u, &GateKind::H.matrix()) < 1e-15);
    }

    #[test]
    fn qft_matches_dft_up_to_six_qubits() {
        for n in 1..=6 {
            let qubits: Vec<usize> = (0..n).collect();
            let with_swaps = build_qft(&qubits, true).unwrap().to_unitary().unwrap();
            assert!(
                max_abs_diff(&with_swaps, &dft_matrix(n)) < 1e-10,
                "qft mismatch at n={n}"
            );
        }
    }

    #[test]
    fn qft_without_swaps_is_bit_reversed_dft() {
        for n in 2..=5 {
            let qubits: Vec<usize> = (0..n).collect();
            let bare = build_qft(&qubits, false).unwrap().to_unitary().unwrap();
            let fixed = bit_reversal_matrix(n) * &bare;
            let with_swaps = build_qft(&qubits, true).unwrap().to_unitary().unwrap();
            assert!(max_abs_diff(&fixed, &with_swaps) < 1e-12);
        }
    }

    #[test]
    fn qft_of_basis_one_on_two_qubits() {
        let mut state = crate::state::new_zero_state(2).unwrap();
        state.apply(&GateKind::X, &[1]).unwrap();
        let c = build_qft(&[0, 1], true).unwrap();
        let out = c.simulate(&state).unwrap();
        let expected = [
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, -0.5),
        ];
        for (a, e) in out.amplitudes().iter().zip(expected.iter()) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn qft_rejects_duplicates_and_empty() {
        assert!(matches!(
            build_qft(&[], true),
            Err(AlgorithmError::EmptyQubitList)
        ));
        assert!(matches!(
            build_qft(&[0, 1, 0], true),
            Err(AlgorithmError::DuplicateQubit { index: 0 })
        ));
    }

    #[test]
    fn adder_permutes_all_basis_states() {
        for m in 1..=3 {
            let circuit = build_draper_adder(m).unwrap();
            let u = circuit.to_unitary().unwrap();
            let size = 1usize << m;
            for l in 0..size {
                for j in 0..size {
                    let input = (l << m) | j;
                    let output = (l << m) | ((j + l) % size);
                    for row in 0..(size * size) {
                        let expected = if row == output { 1.0 } else { 0.0 };
                        assert!(
                            (u[(row, input)].norm() - expected).abs() < 1e-10,
                            "m={m} l={l} j={j} row={row}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn adder_on_superposed_accumulator() {
        // |2>(|0>+|1>)/sqrt2 -> |2>(|2>+|3>)/sqrt2 for m=2.
        let mut state = crate::state::new_zero_state(4).unwrap();
        state.apply(&GateKind::X, &[0]).unwrap();
        state.apply(&GateKind::H, &[3]).unwrap();
        let out = build_draper_adder(2).unwrap().simulate(&state).unwrap();
        let amps = out.amplitudes();
        let r = 0.5f64.sqrt();
        for (j, a) in amps.iter().enumerate() {
            let expected = if j == 0b1010 || j == 0b1011 { r } else { 0.0 };
            assert!((a.norm() - expected).abs() < 1e-12, "index {j}");
        }
    }

    #[test]
    fn adder_size_bounds() {
        assert!(matches!(
            build_draper_adder(0),
            Err(AlgorithmError::AdderSizeOutOfRange { m: 0 })
        ));
        assert!(matches!(
            build_draper_adder(7),
            Err(AlgorithmError::AdderSizeOutOfRange { m: 7 })
        ));
        assert!(build_draper_adder(1).is_ok());
    }

    #[test]
    fn qaoa_circuit_structure_for_example_model() {
        let model = IsingModel::example_three_spin();
        let params = QaoaParams::new(vec![0.3], vec![0.7]).unwrap();
        let circuit = build_qaoa_circuit(&model, &params).unwrap();
        // 3 H + 3 field Rz + 2 couplings * (CNOT Rz CNOT) + 3 Rx.
        assert_eq!(circuit.gate_count(), 3 + 3 + 6 + 3);
        let kinds: Vec<&GateKind> = circuit.gate_ops().map(|op| &op.kind).collect();
        assert!(matches!(kinds[0], GateKind::H));
        assert!(matches!(kinds[3], GateKind::Rz(_)));
        assert!(matches!(kinds[kinds.len() - 1], GateKind::Rx(_)));
    }

    #[test]
    fn qaoa_zero_model_emits_only_h_and_rx() {
        let model = IsingModel::new(2);
        let params = QaoaParams::new(vec![0.4, 0.1], vec![0.2, 0.9]).unwrap();
        let circuit = build_qaoa_circuit(&model, &params).unwrap();
        assert_eq!(circuit.gate_count(), 2 + 2 * 2);
        for op in circuit.gate_ops() {
            assert!(matches!(op.kind, GateKind::H | GateKind::Rx(_)));
        }
    }

    #[test]
    fn qaoa_rejects_gapped_variable_labels() {
        let mut model = IsingModel::new(8);
        model.set_coupling(0, 4, -1.0).unwrap();
        let params = QaoaParams::new(vec![0.1], vec![0.1]).unwrap();
        assert!(matches!(
            build_qaoa_circuit(&model, &params),
            Err(AlgorithmError::NonContiguousVariables { .. })
        ));
    }

    #[test]
    fn landscape_point_matches_reference_values() {
        let model = IsingModel::example_three_spin();
        let scan = qaoa_landscape(&model, &[2.5], &[0.7], "010").unwrap();
        assert!((scan.energy[0][0] - (-1.69)).abs() < 0.01);
        assert!((scan.success_probability[0][0] - 0.589).abs() < 0.001);
    }

    #[test]
    fn landscape_csv_layout() {
        let model = IsingModel::example_three_spin();
        let scan = qaoa_landscape(&model, &[0.1, 0.2], &[0.3, 0.4, 0.5], "010").unwrap();
        let csv = scan.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "beta,gamma,energy,success_probability");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("0.1,0.3,"));
        assert!(lines[4].starts_with("0.2,0.3,"));
    }

    #[test]
    fn optimize_beats_its_starting_point() {
        let model = IsingModel::example_three_spin();
        let init = QaoaParams::new(vec![2.4], vec![0.6]).unwrap();
        let init_energy = qaoa_landscape(&model, &[2.4], &[0.6], "010").unwrap().energy[0][0];
        let result = qaoa_optimize(&model, 1, &init, 400, 7).unwrap();
        assert!(result.converged);
        assert!(result.energy <= init_energy);
        assert!(result.energy <= -1.69);
        assert!(result.evaluations <= 400);
    }

    #[test]
    fn optimize_respects_tiny_evaluation_cap() {
        let model = IsingModel::example_three_spin();
        let init = QaoaParams::new(vec![2.4], vec![0.6]).unwrap();
        let result = qaoa_optimize(&model, 1, &init, 2, 7).unwrap();
        assert!(!result.converged);
        assert!(result.evaluations <= 2);
        let init_energy = qaoa_landscape(&model, &[2.4], &[0.6], "010").unwrap().energy[0][0];
        assert!(result.energy <= init_energy + 1e-12);
    }

    #[test]
    fn optimize_single_variable_respects_spectral_bound() {
        let mut model = IsingModel::new(1);
        model.set_field(0, -1.0).unwrap();
        let init = QaoaParams::new(vec![0.3], vec![0.8]).unwrap();
        let result = qaoa_optimize(&model, 1, &init, 200, 3).unwrap();
        assert!(result.energy >= -1.0 - 1e-12);
    }

    #[test]
    fn optimizer_is_deterministic_per_seed() {
        let model = IsingModel::example_three_spin();
        let init = QaoaParams::new(vec![1.0, 2.0], vec![0.5, 0.25]).unwrap();
        let a = qaoa_optimize(&model, 2, &init, 150, 11).unwrap();
        let b = qaoa_optimize(&model, 2, &init, 150, 11).unwrap();
        assert_eq!(a.params.betas, b.params.betas);
        assert_eq!(a.params.gammas, b.params.gammas);
        assert_eq!(a.energy, b.energy);
    }

    #[test]
    fn half_open_grids_exclude_the_endpoint() {
        let grid = default_beta_grid(4);
        assert_eq!(grid.len(), 4);
        assert_eq!(grid[0], 0.0);
        assert!(grid[3] < PI);
        let grid = default_gamma_grid(8);
        assert!((grid[1] - PI / 4.0).abs() < 1e-15);
    }
}
