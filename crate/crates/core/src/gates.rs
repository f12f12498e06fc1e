//! Gate definitions and their unitary matrices.
//!
//! Matrices use the convention that basis states of a k-qubit gate are
//! indexed with the first listed qubit as the most significant bit, matching
//! the global state ordering in [`crate::state`]. For two-qubit controlled
//! gates the control is the more significant bit, so the matrix is
//! block-diagonal: identity on the control-0 subspace, the target unitary on
//! the control-1 subspace.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

/// Errors raised when constructing or combining gate matrices.
#[derive(Debug, Error)]
pub enum GateError {
    /// A custom matrix had the wrong dimensions.
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    BadShape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    /// A custom matrix failed the unitarity check.
    #[error("matrix is not unitary within {tol:e}")]
    NotUnitary { tol: f64 },
}

/// Rotation axes for the single-qubit rotation gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Axis-angle decomposition of a single-qubit unitary:
/// `U = e^{i global_phase} (cos(angle/2) I - i sin(angle/2) axis.sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    /// Unit rotation axis; the first component of magnitude above 1e-12 is
    /// nonnegative, resolving the `(n, theta) ~ (-n, -theta)` ambiguity.
    pub axis: [f64; 3],
    /// Rotation angle in `[0, 2 pi)`.
    pub angle: f64,
    /// Global phase in `(-pi, pi]`.
    pub global_phase: f64,
}

/// Every gate the simulator knows how to apply.
///
/// The set covers the fixed single-qubit gates, the parametric U1/U2/U3
/// family, phase gates `R(k)` with integer exponent, axis rotations, the
/// two-qubit controlled gates, the Toffoli gate, and escape hatches for
/// arbitrary unitaries of one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    I,
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    /// `diag(1, e^{i lambda})`.
    U1(f64),
    /// Single-qubit gate with one half-turn of amplitude mixing:
    /// `(1/sqrt 2) [[1, -e^{i lambda}], [e^{i phi}, e^{i(phi+lambda)}]]`.
    U2(f64, f64),
    /// General single-qubit gate with Euler angles `(theta, phi, lambda)`.
    U3(f64, f64, f64),
    /// `+X`: quarter turn about the x axis, `(1/sqrt 2) [[1, i], [i, 1]]`.
    PlusX,
    /// `-X`: the inverse quarter turn about the x axis.
    MinusX,
    /// `+Y`: quarter turn about the y axis, `(1/sqrt 2) [[1, 1], [-1, 1]]`.
    PlusY,
    /// `-Y`: the inverse quarter turn about the y axis.
    MinusY,
    /// Phase gate `diag(1, e^{2 pi i / 2^k})`.
    Rk(u32),
    /// Inverse phase gate `diag(1, e^{-2 pi i / 2^k})`.
    Rkdg(u32),
    /// Rotation by `theta` about the x axis.
    Rx(f64),
    /// Rotation by `theta` about the y axis.
    Ry(f64),
    /// Rotation by `theta` about the z axis.
    Rz(f64),
    /// Controlled NOT; the first qubit of the operation is the control.
    Cnot,
    /// Controlled phase `diag(1, 1, 1, e^{2 pi i / 2^k})`.
    CUk(u32),
    /// Inverse controlled phase `diag(1, 1, 1, e^{-2 pi i / 2^k})`.
    CUkdg(u32),
    /// Controlled phase with a free angle, `diag(1, 1, 1, e^{i lambda})`.
    CPhase(f64),
    Cz,
    Cs,
    Csdg,
    /// Doubly controlled NOT; the first two qubits are the controls.
    Toffoli,
    /// Arbitrary single-qubit unitary, validated on construction.
    Custom1Q(DMatrix<Complex64>),
    /// Arbitrary two-qubit unitary, validated on construction.
    Custom2Q(DMatrix<Complex64>),
}

const UNITARITY_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phase(angle: f64) -> Complex64 {
    Complex64::new(0.0, angle).exp()
}

/// `e^{2 pi i / 2^k}`, the phase step used by the `R(k)` family.
fn rk_phase(k: u32) -> Complex64 {
    phase(2.0 * PI / f64::powi(2.0, k as i32))
}

fn mat2(entries: [Complex64; 4]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &entries)
}

/// True when `m` is unitary to within `tol` in the max-norm of `m* m - I`.
pub fn is_unitary(m: &DMatrix<Complex64>, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let product = m.adjoint() * m;
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
            worst = worst.max((product[(i, j)] - expect).norm());
        }
    }
    worst <= tol
}

/// Rotation by `theta` about `axis`: `exp(-i theta sigma_axis / 2)`.
pub fn rotation(axis: Axis, theta: f64) -> DMatrix<Complex64> {
    let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match axis {
        Axis::X => mat2([c(cos, 0.0), c(0.0, -sin), c(0.0, -sin), c(cos, 0.0)]),
        Axis::Y => mat2([c(cos, 0.0), c(-sin, 0.0), c(sin, 0.0), c(cos, 0.0)]),
        Axis::Z => mat2([c(cos, -sin), c(0.0, 0.0), c(0.0, 0.0), c(cos, sin)]),
    }
}

fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> DMatrix<Complex64> {
    let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    mat2([
        c(cos, 0.0),
        -phase(lambda) * sin,
        phase(phi) * sin,
        phase(phi + lambda) * cos,
    ])
}

/// Embeds a single-qubit unitary as a controlled gate with the control on
/// the more significant bit.
fn controlled(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut m = DMatrix::identity(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            m[(2 + i, 2 + j)] = u[(i, j)];
        }
    }
    m
}

impl GateKind {
    /// Builds a validated single-qubit gate from an arbitrary matrix.
    pub fn custom_1q(m: DMatrix<Complex64>) -> Result<Self, GateError> {
        Self::validated(m, 2).map(GateKind::Custom1Q)
    }

    /// Builds a validated two-qubit gate from an arbitrary matrix.
    pub fn custom_2q(m: DMatrix<Complex64>) -> Result<Self, GateError> {
        Self::validated(m, 4).map(GateKind::Custom2Q)
    }

    fn validated(m: DMatrix<Complex64>, dim: usize) -> Result<DMatrix<Complex64>, GateError> {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(GateError::BadShape {
                expected: dim,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if !is_unitary(&m, UNITARITY_TOL) {
            return Err(GateError::NotUnitary { tol: UNITARITY_TOL });
        }
        Ok(m)
    }

    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot
            | GateKind::CUk(_)
            | GateKind::CUkdg(_)
            | GateKind::CPhase(_)
            | GateKind::Cz
            | GateKind::Cs
            | GateKind::Csdg
            | GateKind::Custom2Q(_) => 2,
            GateKind::Toffoli => 3,
            _ => 1,
        }
    }

    /// The full `2^k x 2^k` unitary matrix of the gate.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let f = FRAC_1_SQRT_2;
        match self {
            GateKind::I => DMatrix::identity(2, 2),
            GateKind::H => mat2([c(f, 0.0), c(f, 0.0), c(f, 0.0), c(-f, 0.0)]),
            GateKind::X => mat2([c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            GateKind::Y => mat2([c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
            GateKind::Z => mat2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
            GateKind::S => mat2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]),
            GateKind::Sdg => mat2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]),
            GateKind::T => mat2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(f, f)]),
            GateKind::Tdg => mat2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(f, -f)]),
            GateKind::U1(lambda) => {
                mat2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), phase(*lambda)])
            }
            GateKind::U2(phi, lambda) => mat2([
                c(f, 0.0),
                -phase(*lambda) * f,
                phase(*phi) * f,
                phase(phi + lambda) * f,
            ]),
            GateKind::U3(theta, phi, lambda) => u3_matrix(*theta, *phi, *lambda),
            GateKind::PlusX => mat2([c(f, 0.0), c(0.0, f), c(0.0, f), c(f, 0.0)]),
            GateKind::MinusX => mat2([c(f, 0.0), c(0.0, -f), c(0.0, -f), c(f, 0.0)]),
            GateKind::PlusY => mat2([c(f, 0.0), c(f, 0.0), c(-f, 0.0), c(f, 0.0)]),
            GateKind::MinusY => mat2([c(f, 0.0), c(-f, 0.0), c(f, 0.0), c(f, 0.0)]),
            GateKind::Rk(k) => mat2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), rk_phase(*k)]),
            GateKind::Rkdg(k) => {
                mat2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), rk_phase(*k).conj()])
            }
            GateKind::Rx(theta) => rotation(Axis::X, *theta),
            GateKind::Ry(theta) => rotation(Axis::Y, *theta),
            GateKind::Rz(theta) => rotation(Axis::Z, *theta),
            GateKind::Cnot => controlled(&GateKind::X.matrix()),
            GateKind::CUk(k) => controlled(&GateKind::Rk(*k).matrix()),
            GateKind::CUkdg(k) => controlled(&GateKind::Rkdg(*k).matrix()),
            GateKind::CPhase(lambda) => controlled(&GateKind::U1(*lambda).matrix()),
            GateKind::Cz => controlled(&GateKind::Z.matrix()),
            GateKind::Cs => controlled(&GateKind::S.matrix()),
            GateKind::Csdg => controlled(&GateKind::Sdg.matrix()),
            GateKind::Toffoli => {
                let mut m = DMatrix::identity(8, 8);
                for i in 0..2 {
                    for j in 0..2 {
                        m[(6 + i, 6 + j)] = GateKind::X.matrix()[(i, j)];
                    }
                }
                m
            }
            GateKind::Custom1Q(m) | GateKind::Custom2Q(m) => m.clone(),
        }
    }

    /// The inverse gate, expressed structurally where a named inverse
    /// exists and via the adjoint matrix otherwise.
    pub fn dagger(&self) -> GateKind {
        match self {
            GateKind::I => GateKind::I,
            GateKind::H => GateKind::H,
            GateKind::X => GateKind::X,
            GateKind::Y => GateKind::Y,
            GateKind::Z => GateKind::Z,
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::U1(lambda) => GateKind::U1(-lambda),
            GateKind::U2(phi, lambda) => GateKind::U2(PI - lambda, PI - phi),
            GateKind::U3(theta, phi, lambda) => GateKind::U3(-theta, -lambda, -phi),
            GateKind::PlusX => GateKind::MinusX,
            GateKind::MinusX => GateKind::PlusX,
            GateKind::PlusY => GateKind::MinusY,
            GateKind::MinusY => GateKind::PlusY,
            GateKind::Rk(k) => GateKind::Rkdg(*k),
            GateKind::Rkdg(k) => GateKind::Rk(*k),
            GateKind::Rx(theta) => GateKind::Rx(-theta),
            GateKind::Ry(theta) => GateKind::Ry(-theta),
            GateKind::Rz(theta) => GateKind::Rz(-theta),
            GateKind::Cnot => GateKind::Cnot,
            GateKind::CUk(k) => GateKind::CUkdg(*k),
            GateKind::CUkdg(k) => GateKind::CUk(*k),
            GateKind::CPhase(lambda) => GateKind::CPhase(-lambda),
            GateKind::Cz => GateKind::Cz,
            GateKind::Cs => GateKind::Csdg,
            GateKind::Csdg => GateKind::Cs,
            GateKind::Toffoli => GateKind::Toffoli,
            GateKind::Custom1Q(m) => GateKind::Custom1Q(m.adjoint()),
            GateKind::Custom2Q(m) => GateKind::Custom2Q(m.adjoint()),
        }
    }
}

/// Compares two matrices up to a global phase factor.
///
/// The candidate phase `c` is read off the first entry position (row-major)
/// where both matrices have modulus above `tol`; the comparison then checks
/// `max |a - c b| <= tol`. Mismatched shapes are never equal.
pub fn equal_up_to_global_phase(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    tol: f64,
) -> bool {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return false;
    }
    let mut c = Complex64::new(1.0, 0.0);
    'search: for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if a[(i, j)].norm() > tol && b[(i, j)].norm() > tol {
                let ratio = a[(i, j)] / b[(i, j)];
                c = ratio / ratio.norm();
                break 'search;
            }
        }
    }
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if (a[(i, j)] - c * b[(i, j)]).norm() > tol {
                return false;
            }
        }
    }
    true
}

fn wrap_to_signed_pi(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Decomposes a single-qubit unitary into rotation axis, angle, and global
/// phase, so that `AxisAngle` reconstructs the input within 1e-12.
///
/// The angle lands in `[0, 2 pi)`; the representation ambiguity
/// `(n, theta) ~ (-n, 2 pi - theta)` is resolved by making the first
/// non-negligible axis component positive. The identity (up to phase) gets
/// the conventional axis `(0, 0, 1)` with angle 0.
pub fn axis_angle_of(u: &DMatrix<Complex64>) -> Result<AxisAngle, GateError> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(GateError::BadShape {
            expected: 2,
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    if !is_unitary(u, 1e-10) {
        return Err(GateError::NotUnitary { tol: 1e-10 });
    }
    // det U = e^{2 i alpha}; dividing the phase out leaves an SU(2) matrix
    // cos(theta/2) I - i sin(theta/2) n.sigma with real coefficients.
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let mut alpha = det.arg() / 2.0;
    let v = u.map(|x| x * phase(-alpha));
    let cos_half = (v[(0, 0)] + v[(1, 1)]).re / 2.0;
    let sx = -(v[(0, 1)] + v[(1, 0)]).im / 2.0;
    let sy = (v[(1, 0)] - v[(0, 1)]).re / 2.0;
    let sz = -(v[(0, 0)] - v[(1, 1)]).im / 2.0;
    let sin_half = (sx * sx + sy * sy + sz * sz).sqrt();
    if sin_half < 1e-12 {
        if cos_half < 0.0 {
            alpha += PI;
        }
        return Ok(AxisAngle {
            axis: [0.0, 0.0, 1.0],
            angle: 0.0,
            global_phase: wrap_to_signed_pi(alpha),
        });
    }
    let mut axis = [sx / sin_half, sy / sin_half, sz / sin_half];
    let mut angle = 2.0 * sin_half.atan2(cos_half);
    if let Some(&lead) = axis.iter().find(|a| a.abs() > 1e-12) {
        if lead < 0.0 {
            axis = [-axis[0], -axis[1], -axis[2]];
            angle = 2.0 * PI - angle;
            alpha += PI;
        }
    }
    if angle >= 2.0 * PI {
        angle -= 2.0 * PI;
    }
    Ok(AxisAngle {
        axis,
        angle,
        global_phase: wrap_to_signed_pi(alpha),
    })
}

impl AxisAngle {
    /// Rebuilds the unitary `e^{i global_phase} (cos(angle/2) I
    /// - i sin(angle/2) axis.sigma)`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let (cos, sin) = ((self.angle / 2.0).cos(), (self.angle / 2.0).sin());
        let [nx, ny, nz] = self.axis;
        let m = mat2([
            c(cos, -sin * nz),
            c(-sin * ny, -sin * nx),
            c(sin * ny, -sin * nx),
            c(cos, sin * nz),
        ]);
        m.map(|x| x * phase(self.global_phase))
    }
}
