//! Closed-system annealing over interpolated schedules, spectral-gap and
//! annealing-time diagnostics, the two-level avoided-crossing scenario, and
//! a classical simulated-annealing sampler.
//!
//! Throughout, the time-dependent operator is
//! `H(s) = A(s) (-sum sigma_x_i) + B(s) (sum h_i sigma_z_i + sum J_ij
//! sigma_z_i sigma_z_j)` with hbar = 1, so schedule values are plain energy
//! units. In the computational basis `sigma_z` assigns spin +1 to bit 0, the
//! same identification the state-vector module uses for energies; sample
//! bitstrings produced here, by contrast, follow the sampler convention
//! where character '1' stands for spin +1.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ising::{IsingError, IsingModel, SpinConfig};
use crate::state::{SampleRow, SampleSet, StateError, StateVector, ValueDomain};

/// Largest register the time-evolution routines accept.
pub const MAX_EVOLVE_QUBITS: usize = 14;
/// Largest register the spectrum diagnostics accept.
pub const MAX_SPECTRUM_QUBITS: usize = 12;
/// Levels within this distance of the lowest one count as one degenerate
/// ground subspace for gap and probability reporting.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum AnnealError {
    #[error("model has no variables")]
    EmptyModel,
    #[error("{num_variables} variables exceed the {max}-qubit cap for this operation")]
    CapacityExceeded { num_variables: usize, max: usize },
    #[error("schedule position s={s} outside [0, 1]")]
    SOutOfRange { s: f64 },
    #[error("{steps} steps is below the minimum of {min}")]
    TooFewSteps { steps: usize, min: usize },
    #[error("evolution time {t_max} must be non-negative")]
    NegativeTime { t_max: f64 },
    #[error("the s grid must not be empty")]
    EmptyGrid,
    #[error("at least one excited level is required")]
    ZeroLevels,
    #[error("gap closes at s={s} with nonzero coupling; the time estimate is infinite")]
    GaplessCrossing { s: f64 },
    #[error("a schedule needs at least two points")]
    ScheduleTooShort,
    #[error("schedule s values must be strictly increasing (violated at point {index})")]
    ScheduleNotIncreasing { index: usize },
    #[error("schedule must start at s=0 and end at s=1")]
    ScheduleEndpoints,
    #[error("schedule values must be finite and non-negative (point {index})")]
    ScheduleBadValue { index: usize },
    #[error("A(0) must dominate B(0) at the start of a schedule")]
    ScheduleStartOrder,
    #[error("B(1) must dominate A(1) at the end of a schedule")]
    ScheduleEndOrder,
    #[error("schedule CSV line {line}: {message}")]
    ScheduleCsv { line: usize, message: String },
    #[error("unknown schedule {name:?}; built-in schedules: linear")]
    UnknownSchedule { name: String },
    #[error("parameter {name} must be positive and finite, got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("state register of {state} qubits does not match the {model}-variable model")]
    SizeMismatch { model: usize, state: usize },
    #[error("reads must be at least 1")]
    ZeroReads,
    #[error("sweeps must be at least 1")]
    ZeroSweeps,
    #[error(transparent)]
    Ising(#[from] IsingError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A pair of interpolated annealing envelopes over `s` in [0, 1].
///
/// Points are `(s, A, B)` triples; between points both channels interpolate
/// linearly. A valid schedule starts transverse-dominated and ends
/// problem-dominated.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    points: Vec<(f64, f64, f64)>,
}

impl Schedule {
    pub fn new(points: Vec<(f64, f64, f64)>) -> Result<Self, AnnealError> {
        if points.len() < 2 {
            return Err(AnnealError::ScheduleTooShort);
        }
        for (i, &(s, a, b)) in points.iter().enumerate() {
            if !s.is_finite() || !a.is_finite() || !b.is_finite() || a < 0.0 || b < 0.0 {
                return Err(AnnealError::ScheduleBadValue { index: i });
            }
            if i > 0 && s <= points[i - 1].0 {
                return Err(AnnealError::ScheduleNotIncreasing { index: i });
            }
        }
        let first = points[0];
        let last = points[points.len() - 1];
        if first.0 != 0.0 || last.0 != 1.0 {
            return Err(AnnealError::ScheduleEndpoints);
        }
        if first.1 <= first.2 {
            return Err(AnnealError::ScheduleStartOrder);
        }
        if last.2 <= last.1 {
            return Err(AnnealError::ScheduleEndOrder);
        }
        Ok(Schedule { points })
    }

    /// The built-in straight-line schedule A = 1-s, B = s.
    pub fn linear() -> Self {
        Schedule {
            points: vec![(0.0, 1.0, 0.0), (1.0, 0.0, 1.0)],
        }
    }

    /// Looks a schedule up by name; the error lists what exists.
    pub fn builtin(name: &str) -> Result<Self, AnnealError> {
        match name {
            "linear" => Ok(Schedule::linear()),
            _ => Err(AnnealError::UnknownSchedule {
                name: name.to_string(),
            }),
        }
    }

    pub fn points(&self) -> &[(f64, f64, f64)] {
        &self.points
    }

    fn segment(&self, s: f64) -> usize {
        let after = self.points.partition_point(|p| p.0 <= s);
        after.saturating_sub(1).min(self.points.len() - 2)
    }

    /// Interpolated `(A(s), B(s))`.
    pub fn at(&self, s: f64) -> (f64, f64) {
        let k = self.segment(s);
        let (s0, a0, b0) = self.points[k];
        let (s1, a1, b1) = self.points[k + 1];
        let t = (s - s0) / (s1 - s0);
        (a0 + t * (a1 - a0), b0 + t * (b1 - b0))
    }

    /// Slopes `(A'(s), B'(s))` of the segment containing `s`; at a knot the
    /// segment to the right wins, except at s=1.
    pub fn slopes_at(&self, s: f64) -> (f64, f64) {
        let k = self.segment(s);
        let (s0, a0, b0) = self.points[k];
        let (s1, a1, b1) = self.points[k + 1];
        ((a1 - a0) / (s1 - s0), (b1 - b0) / (s1 - s0))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,A,B\n");
        for &(s, a, b) in &self.points {
            out.push_str(&format!("{},{},{}\n", s, a, b));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, AnnealError> {
        let mut points = Vec::new();
        let mut saw_header = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if !saw_header {
                if line != "s,A,B" {
                    return Err(AnnealError::ScheduleCsv {
                        line: i + 1,
                        message: format!("expected header \"s,A,B\", found {line:?}"),
                    });
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(AnnealError::ScheduleCsv {
                    line: i + 1,
                    message: format!("expected 3 comma-separated values, found {}", fields.len()),
                });
            }
            let mut values = [0.0f64; 3];
            for (slot, field) in values.iter_mut().zip(&fields) {
                *slot = field.parse().map_err(|_| AnnealError::ScheduleCsv {
                    line: i + 1,
                    message: format!("{field:?} is not a number"),
                })?;
            }
            points.push((values[0], values[1], values[2]));
        }
        if !saw_header {
            return Err(AnnealError::ScheduleCsv {
                line: 1,
                message: "missing header \"s,A,B\"".to_string(),
            });
        }
        Schedule::new(points)
    }
}

/// Inputs for the two-level avoided-crossing sweep `H(t) = -h_x sigma_x
/// - v t sigma_z` over `t` in `[-t_span, t_span]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauZenerParams {
    pub h_x: f64,
    pub v: f64,
    pub t_span: f64,
}

/// Final populations of the sweep; `p_down` is the probability of remaining
/// in the initial spin-down state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauZenerResult {
    pub p_up: f64,
    pub p_down: f64,
    /// Set when the requested span is below the documented sufficiency
    /// heuristic `20 max(1, h_x) / sqrt(v)`, so the asymptotic formula may
    /// not be reached.
    pub span_warning: bool,
}

/// One spectrum snapshot along the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    pub s: f64,
    /// Lowest levels, ascending; at most eight are kept.
    pub eigenvalues: Vec<f64>,
    /// Distance from the ground level to the first level outside the
    /// degenerate ground subspace.
    pub gap: f64,
}

/// Result of a gap scan: the location and size of the smallest gap plus all
/// per-point samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MinGapResult {
    pub s_star: f64,
    pub gap_star: f64,
    pub samples: Vec<SpectrumSample>,
}

fn check_size(model: &IsingModel, max: usize) -> Result<usize, AnnealError> {
    let n = model.num_variables();
    if n == 0 {
        return Err(AnnealError::EmptyModel);
    }
    if n > max {
        return Err(AnnealError::CapacityExceeded {
            num_variables: n,
            max,
        });
    }
    Ok(n)
}

/// Energies of the problem part (fields and couplings, no offset) for every
/// basis index, with bit 0 of a qubit read as spin +1.
fn diagonal_energies(model: &IsingModel, n: usize) -> Vec<f64> {
    let dim = 1usize << n;
    let spin = |j: usize, i: usize| -> f64 {
        if (j >> (n - 1 - i)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let mut diag = vec![0.0; dim];
    for (j, slot) in diag.iter_mut().enumerate() {
        let mut e = 0.0;
        for (&i, &h) in model.fields() {
            e += h * spin(j, i);
        }
        for (&(a, b), &coupling) in model.couplings() {
            e += coupling * spin(j, a) * spin(j, b);
        }
        *slot = e;
    }
    diag
}

/// Assembles `H(s)` as a real symmetric matrix in the computational basis.
pub fn hamiltonian_at(
    model: &IsingModel,
    schedule: &Schedule,
    s: f64,
) -> Result<DMatrix<f64>, AnnealError> {
    let n = check_size(model, MAX_EVOLVE_QUBITS)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(AnnealError::SOutOfRange { s });
    }
    let (a, b) = schedule.at(s);
    let dim = 1usize << n;
    let diag = diagonal_energies(model, n);
    let mut h = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        h[(j, j)] = b * diag[j];
        for i in 0..n {
            h[(j ^ (1 << (n - 1 - i)), j)] -= a;
        }
    }
    Ok(h)
}

/// Applies `exp(-i H dt)` to the state split into real and imaginary parts,
/// given the eigendecomposition `H = Q L Q^T`.
fn propagate(
    q: &DMatrix<f64>,
    eigenvalues: &DVector<f64>,
    dt: f64,
    re: &mut DVector<f64>,
    im: &mut DVector<f64>,
) {
    let mut wr = q.tr_mul(&*re);
    let mut wi = q.tr_mul(&*im);
    for i in 0..eigenvalues.len() {
        let phase = -eigenvalues[i] * dt;
        let (sin, cos) = phase.sin_cos();
        let r = wr[i] * cos - wi[i] * sin;
        let im_part = wr[i] * sin + wi[i] * cos;
        wr[i] = r;
        wi[i] = im_part;
    }
    *re = q * wr;
    *im = q * wi;
}

/// Evolves the instantaneous ground state of `H(0)` through the schedule by
/// piecewise-constant unitary steps, sampling `H` at each step midpoint.
pub fn evolve_closed(
    model: &IsingModel,
    schedule: &Schedule,
    t_max: f64,
    steps: usize,
) -> Result<StateVector, AnnealError> {
    let n = check_size(model, MAX_EVOLVE_QUBITS)?;
    if steps < 100 {
        return Err(AnnealError::TooFewSteps { steps, min: 100 });
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(AnnealError::NegativeTime { t_max });
    }
    let dim = 1usize << n;

    let initial = hamiltonian_at(model, schedule, 0.0)?.symmetric_eigen();
    let ground = (0..dim)
        .min_by(|&a, &b| {
            initial.eigenvalues[a]
                .partial_cmp(&initial.eigenvalues[b])
                .unwrap()
        })
        .unwrap();
    let mut re = DVector::from_fn(dim, |j, _| initial.eigenvectors[(j, ground)]);
    let mut im = DVector::zeros(dim);

    let dt = t_max / steps as f64;
    if dt > 0.0 {
        for k in 0..steps {
            let s = (k as f64 + 0.5) / steps as f64;
            let eig = hamiltonian_at(model, schedule, s)?.symmetric_eigen();
            propagate(&eig.eigenvectors, &eig.eigenvalues, dt, &mut re, &mut im);
        }
    }

    let amps = (0..dim)
        .map(|j| num_complex::Complex64::new(re[j], im[j]))
        .collect();
    Ok(StateVector::from_amplitudes(amps)?)
}

/// Total probability the state assigns to the lowest-energy spin
/// configurations of the model, degenerate levels counted together.
pub fn ground_subspace_probability(
    model: &IsingModel,
    state: &StateVector,
) -> Result<f64, AnnealError> {
    let n = model.num_variables();
    if n != state.num_qubits() {
        return Err(AnnealError::SizeMismatch {
            model: n,
            state: state.num_qubits(),
        });
    }
    let diag = diagonal_energies(model, n);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut total = 0.0;
    for (j, amp) in state.amplitudes().iter().enumerate() {
        if diag[j] - min < DEGENERACY_TOL {
            total += amp.norm_sqr();
        }
    }
    Ok(total)
}

fn gap_of(sorted: &[f64]) -> f64 {
    let e0 = sorted[0];
    sorted
        .iter()
        .skip(1)
        .map(|e| e - e0)
        .find(|&g| g >= DEGENERACY_TOL)
        .unwrap_or(0.0)
}

/// Scans the spectrum over `s_grid` and returns the smallest gap found.
///
/// When the ground level is degenerate within [`DEGENERACY_TOL`], the gap is
/// measured to the first level outside the degenerate subspace.
pub fn min_gap(
    model: &IsingModel,
    schedule: &Schedule,
    s_grid: &[f64],
) -> Result<MinGapResult, AnnealError> {
    check_size(model, MAX_SPECTRUM_QUBITS)?;
    if s_grid.is_empty() {
        return Err(AnnealError::EmptyGrid);
    }
    let mut samples = Vec::with_capacity(s_grid.len());
    let mut s_star = s_grid[0];
    let mut gap_star = f64::INFINITY;
    for &s in s_grid {
        let eig = hamiltonian_at(model, schedule, s)?.symmetric_eigen();
        let mut values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let gap = gap_of(&values);
        values.truncate(8);
        if gap < gap_star {
            gap_star = gap;
            s_star = s;
        }
        samples.push(SpectrumSample {
            s,
            eigenvalues: values,
            gap,
        });
    }
    Ok(MinGapResult {
        s_star,
        gap_star,
        samples,
    })
}

/// Estimates the annealing-time scale `max |<E_n| dH/ds |E_0>| / (E_0-E_n)^2`
/// over the grid and the lowest `levels` excited states.
///
/// Levels the derivative does not couple to (matrix element below 1e-10) are
/// skipped; a coupled level that is degenerate with the ground state makes
/// the estimate infinite, reported as an error carrying the offending `s`.
pub fn adiabatic_time_estimate(
    model: &IsingModel,
    schedule: &Schedule,
    s_grid: &[f64],
    levels: usize,
) -> Result<f64, AnnealError> {
    let n = check_size(model, MAX_SPECTRUM_QUBITS)?;
    if s_grid.is_empty() {
        return Err(AnnealError::EmptyGrid);
    }
    if levels == 0 {
        return Err(AnnealError::ZeroLevels);
    }
    let dim = 1usize << n;
    let diag = diagonal_energies(model, n);
    let mut estimate = 0.0f64;
    for &s in s_grid {
        let eig = hamiltonian_at(model, schedule, s)?.symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let e0 = eig.eigenvalues[order[0]];
        let v0 = eig.eigenvectors.column(order[0]);

        // dH/ds |E_0> assembled term by term: the A' part flips one bit at a
        // time, the B' part is diagonal.
        let (da, db) = schedule.slopes_at(s);
        let mut w = DVector::zeros(dim);
        for j in 0..dim {
            let mut x = db * diag[j] * v0[j];
            for i in 0..n {
                x -= da * v0[j ^ (1 << (n - 1 - i))];
            }
            w[j] = x;
        }

        for &idx in order.iter().skip(1).take(levels) {
            let coupling = eig.eigenvectors.column(idx).dot(&w);
            if coupling.abs() < 1e-10 {
                continue;
            }
            let gap = eig.eigenvalues[idx] - e0;
            if gap < DEGENERACY_TOL {
                return Err(AnnealError::GaplessCrossing { s });
            }
            estimate = estimate.max(coupling.abs() / (gap * gap));
        }
    }
    Ok(estimate)
}

/// Integrates the two-level sweep with midpoint-sampled exact step unitaries
/// starting from spin down, returning the final populations.
pub fn landau_zener_probability(
    params: &LandauZenerParams,
    steps: usize,
) -> Result<LandauZenerResult, AnnealError> {
    for (name, value) in [
        ("h_x", params.h_x),
        ("v", params.v),
        ("t_span", params.t_span),
    ] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(AnnealError::BadParameter { name, value });
        }
    }
    if steps == 0 {
        return Err(AnnealError::TooFewSteps { steps, min: 1 });
    }
    let span_warning = params.t_span < 20.0 * params.h_x.max(1.0) / params.v.sqrt();

    use num_complex::Complex64;
    let mut up = Complex64::new(0.0, 0.0);
    let mut down = Complex64::new(1.0, 0.0);
    let dt = 2.0 * params.t_span / steps as f64;
    for k in 0..steps {
        let t = -params.t_span + (k as f64 + 0.5) * dt;
        let hz = -params.v * t;
        let a = (params.h_x * params.h_x + hz * hz).sqrt();
        let (sin, cos) = (a * dt).sin_cos();
        let (nx, nz) = if a > 0.0 {
            (-params.h_x / a, hz / a)
        } else {
            (0.0, 0.0)
        };
        // exp(-i a dt n.sigma) = cos I - i sin (nx sigma_x + nz sigma_z)
        let d_up = Complex64::new(cos, -sin * nz);
        let d_down = Complex64::new(cos, sin * nz);
        let off = Complex64::new(0.0, -sin * nx);
        let new_up = d_up * up + off * down;
        let new_down = off * up + d_down * down;
        up = new_up;
        down = new_down;
    }
    Ok(LandauZenerResult {
        p_up: up.norm_sqr(),
        p_down: down.norm_sqr(),
        span_warning,
    })
}

/// Splits one seed into independent per-read streams.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Metropolis sampler over spin configurations: every read starts from a
/// random configuration and runs `sweeps` full passes in random variable
/// order while the inverse temperature rises geometrically from
/// `beta_schedule.0` to `beta_schedule.1`.
pub fn simulated_annealing(
    model: &IsingModel,
    reads: usize,
    sweeps: usize,
    beta_schedule: (f64, f64),
    seed: u64,
) -> Result<SampleSet, AnnealError> {
    let n = model.num_variables();
    if n == 0 {
        return Err(AnnealError::EmptyModel);
    }
    if reads == 0 {
        return Err(AnnealError::ZeroReads);
    }
    if sweeps == 0 {
        return Err(AnnealError::ZeroSweeps);
    }
    let (beta_start, beta_end) = beta_schedule;
    for (name, value) in [("beta_start", beta_start), ("beta_end", beta_end)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(AnnealError::BadParameter { name, value });
        }
    }

    let mut fields = vec![0.0; n];
    for (&i, &h) in model.fields() {
        fields[i] = h;
    }
    let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (&(i, j), &coupling) in model.couplings() {
        neighbors[i].push((j, coupling));
        neighbors[j].push((i, coupling));
    }
    let betas: Vec<f64> = (0..sweeps)
        .map(|t| {
            if sweeps == 1 {
                beta_end
            } else {
                let frac = t as f64 / (sweeps - 1) as f64;
                beta_start * (beta_end / beta_start).powf(frac)
            }
        })
        .collect();

    let mut tally: std::collections::BTreeMap<String, (f64, u64)> = Default::default();
    let mut order: Vec<usize> = (0..n).collect();
    for read in 0..reads {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, read as u64));
        let mut spins: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        for &beta in &betas {
            order.shuffle(&mut rng);
            for &i in &order {
                let mut local = fields[i];
                for &(j, coupling) in &neighbors[i] {
                    local += coupling * spins[j] as f64;
                }
                let delta = -2.0 * spins[i] as f64 * local;
                if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                    spins[i] = -spins[i];
                }
            }
        }
        let config = SpinConfig::new(spins)?;
        let energy = model.energy(&config)?;
        let entry = tally.entry(config.to_bitstring()).or_insert((energy, 0));
        entry.1 += 1;
    }

    let rows = tally
        .into_iter()
        .map(|(bitstring, (energy, occurrences))| SampleRow {
            bitstring,
            energy: Some(energy),
            occurrences,
            chain_break_fraction: 0.0,
        })
        .collect();
    let mut set = SampleSet {
        rows,
        num_variables: n,
        total_shots: reads as u64,
        domain: ValueDomain::Spin,
    };
    set.sort_rows();
    Ok(set)
}
