//! Circuit and gate identities checked as matrices, mostly up to a global
//! phase. Everything here goes through the public API: either raw gate
//! matrices or small circuits lowered with `to_unitary`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use qdesk::circuit::Circuit;
use qdesk::gates::{equal_up_to_global_phase, rotation, Axis, GateKind};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

fn phase(angle: f64) -> Complex64 {
    Complex64::new(0.0, angle).exp()
}

fn eye(n: usize) -> DMatrix<Complex64> {
    DMatrix::identity(n, n)
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn assert_phase_eq(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) {
    assert!(
        equal_up_to_global_phase(a, b, 1e-12),
        "matrices differ beyond a global phase:\n{a}\nvs\n{b}"
    );
}

/// Lowers a gate list to its unitary on `num_qubits` qubits; the list reads
/// left to right in application order.
fn unitary(num_qubits: usize, ops: &[(GateKind, &[usize])]) -> DMatrix<Complex64> {
    let mut c = Circuit::new(num_qubits);
    for (kind, qubits) in ops {
        c.push(kind.clone(), qubits).unwrap();
    }
    c.to_unitary().unwrap()
}

#[test]
fn hadamard_conjugation_swaps_x_and_z() {
    let h = GateKind::H.matrix();
    assert_phase_eq(&GateKind::X.matrix(), &(&h * GateKind::Z.matrix() * &h));
    assert_phase_eq(&GateKind::Z.matrix(), &(&h * GateKind::X.matrix() * &h));
}

#[test]
fn s_sandwich_around_quarter_x_turn_builds_hadamard() {
    let s = GateKind::S.matrix();
    let built = &s * rotation(Axis::X, FRAC_PI_2) * &s;
    assert_phase_eq(&GateKind::H.matrix(), &built);
}

#[test]
fn hth_is_an_eighth_x_turn() {
    let h = GateKind::H.matrix();
    let hth = &h * GateKind::T.matrix() * &h;
    assert_phase_eq(&hth, &rotation(Axis::X, FRAC_PI_4));
}

#[test]
fn t_squared_is_s() {
    let t = GateKind::T.matrix();
    assert_phase_eq(&GateKind::S.matrix(), &(&t * &t));
}

#[test]
fn paulis_and_hadamard_are_involutions() {
    for kind in [GateKind::X, GateKind::Y, GateKind::Z, GateKind::H] {
        let m = kind.matrix();
        assert_phase_eq(&eye(2), &(&m * &m));
    }
}

#[test]
fn x_conjugation_reverses_y_rotations() {
    let x = GateKind::X.matrix();
    for theta in [0.0, 0.3, 1.25, PI / 3.0, 2.71, -1.9, 5.5] {
        let lhs = &x * rotation(Axis::Y, theta) * &x;
        assert_phase_eq(&lhs, &rotation(Axis::Y, -theta));
    }
}

#[test]
fn cz_and_cs_ignore_qubit_order() {
    for kind in [GateKind::Cz, GateKind::Cs] {
        let forward = unitary(2, &[(kind.clone(), &[0, 1])]);
        let backward = unitary(2, &[(kind, &[1, 0])]);
        assert_phase_eq(&forward, &backward);
    }
}

#[test]
fn hadamards_on_the_target_turn_cz_into_cnot() {
    let built = unitary(
        2,
        &[
            (GateKind::H, &[1]),
            (GateKind::Cz, &[0, 1]),
            (GateKind::H, &[1]),
        ],
    );
    assert_phase_eq(&built, &unitary(2, &[(GateKind::Cnot, &[0, 1])]));
}

#[test]
fn hadamards_on_both_qubits_swap_cnot_roles() {
    let built = unitary(
        2,
        &[
            (GateKind::H, &[0]),
            (GateKind::H, &[1]),
            (GateKind::Cnot, &[0, 1]),
            (GateKind::H, &[0]),
            (GateKind::H, &[1]),
        ],
    );
    assert_phase_eq(&built, &unitary(2, &[(GateKind::Cnot, &[1, 0])]));
}

#[test]
fn z_rotations_commute_through_the_control() {
    for theta in [0.4, -2.2, 3.9] {
        let before = unitary(
            2,
            &[(GateKind::Rz(theta), &[0]), (GateKind::Cnot, &[0, 1])],
        );
        let after = unitary(
            2,
            &[(GateKind::Cnot, &[0, 1]), (GateKind::Rz(theta), &[0])],
        );
        assert!(max_diff(&before, &after) < 1e-12);
    }
}

#[test]
fn x_rotations_commute_through_the_target() {
    for theta in [0.4, -2.2, 3.9] {
        let before = unitary(
            2,
            &[(GateKind::Rx(theta), &[1]), (GateKind::Cnot, &[0, 1])],
        );
        let after = unitary(
            2,
            &[(GateKind::Cnot, &[0, 1]), (GateKind::Rx(theta), &[1])],
        );
        assert!(max_diff(&before, &after) < 1e-12);
    }
}

#[test]
fn controlled_global_phase_is_a_z_rotation_on_the_control() {
    for alpha in [0.4, -1.3, 2.9] {
        let mut controlled = eye(4);
        controlled[(2, 2)] = phase(alpha);
        controlled[(3, 3)] = phase(alpha);
        let rz_on_control = rotation(Axis::Z, alpha).kronecker(&eye(2));
        assert_phase_eq(&controlled, &rz_on_control);
    }
}

#[test]
fn controlled_s_from_t_gates_and_cnots() {
    let built = unitary(
        2,
        &[
            (GateKind::T, &[1]),
            (GateKind::Cnot, &[0, 1]),
            (GateKind::Tdg, &[1]),
            (GateKind::Cnot, &[0, 1]),
            (GateKind::T, &[0]),
        ],
    );
    let cs = GateKind::Cs.matrix();
    // This decomposition reproduces CS on the nose, not merely up to phase.
    assert!(max_diff(&built, &cs) < 1e-12);
    assert_phase_eq(&built, &cs);
}

#[test]
fn cnot_conjugation_realizes_the_two_spin_coupling_phase() {
    for (gamma, j) in [(0.7, 0.5), (1.9, -1.25), (0.35, 2.0)] {
        let built = unitary(
            2,
            &[
                (GateKind::Cnot, &[0, 1]),
                (GateKind::Rz(2.0 * gamma * j), &[1]),
                (GateKind::Cnot, &[0, 1]),
            ],
        );
        let mut want = eye(4);
        want[(0, 0)] = phase(-gamma * j);
        want[(1, 1)] = phase(gamma * j);
        want[(2, 2)] = phase(gamma * j);
        want[(3, 3)] = phase(-gamma * j);
        assert!(max_diff(&built, &want) < 1e-12);
    }
}

#[test]
fn quarter_turn_gates_match_axis_rotations_exactly() {
    let pairs = [
        (GateKind::PlusX, rotation(Axis::X, -FRAC_PI_2)),
        (GateKind::MinusX, rotation(Axis::X, FRAC_PI_2)),
        (GateKind::PlusY, rotation(Axis::Y, -FRAC_PI_2)),
        (GateKind::MinusY, rotation(Axis::Y, FRAC_PI_2)),
    ];
    for (kind, want) in pairs {
        assert!(max_diff(&kind.matrix(), &want) < 1e-15);
    }
}
