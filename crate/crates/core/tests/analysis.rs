use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dcg_core::analysis::{
    compose_gate_errors, exact_error_action, first_order_magnus, nogo_case, nogo_witness, second_order_bound,
    verify_first_order_cancellation, ErrorAction, ErrorSubspace, OrderTag,
};
use dcg_core::group::{linear_decoupling_group, projection_superop, Role};
use dcg_core::operator::random::unit_hermitian;
use dcg_core::operator::{spectral_norm, DenseOperator, HermitianSpectrum, JointSpace, Matrix, Pauli, PauliString, PauliSum, SpectralCache};
use dcg_core::schedule::{generator_pulse, ControlSchedule};
use dcg_core::spinbath::{dcg_schedule_for, edd_schedule, primitive_schedule, DecouplingModel, GateSpec};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn free(n: usize, t: f64) -> ControlSchedule {
    let mut s = ControlSchedule::new("free", n, t).unwrap();
    s.push(Role::Free, "free", 1, 1.0, PauliSum::zero(n));
    s
}

fn expm_i(phi: &Matrix, sign: f64) -> Matrix {
    HermitianSpectrum::of(phi).unwrap().apply(|l| Complex64::from_polar(1.0, sign * l))
}

#[test]
fn zero_error_gives_zero_action() {
    let space = JointSpace::new(2, 2).unwrap();
    let sched = dcg_schedule_for(&GateSpec::sqrt_swap(0, 1), 2, 0.01).unwrap();
    let zero = DenseOperator::zeros(space);
    assert!(exact_error_action(&sched, &zero).unwrap().norm() < 1e-13);
    assert!(first_order_magnus(&sched, &zero).unwrap().norm() < 1e-15);
}

#[test]
fn free_evolution_action_is_time_times_error() {
    let space = JointSpace::new(1, 2).unwrap();
    let h = DenseOperator::new(space, unit_hermitian(&mut rng(1), 4)).unwrap();
    let sched = free(1, 0.3);
    let expected = h.scale_real(0.3);
    assert!(exact_error_action(&sched, &h).unwrap().phi.sub(&expected).operator_norm() < 1e-13);
    assert!(first_order_magnus(&sched, &h).unwrap().phi.sub(&expected).operator_norm() < 1e-14);
}

#[test]
fn exact_action_reproduces_two_segment_product() {
    let tau = 0.2;
    let space = JointSpace::new(1, 2).unwrap();
    let h_e = DenseOperator::from_parts(space, &Pauli::Z.matrix(), &unit_hermitian(&mut rng(2), 2)).unwrap();
    let mut sched = ControlSchedule::new("pulse-then-free", 1, tau).unwrap();
    sched.push(Role::Generator, "X", 1, 1.0, generator_pulse(&PauliString::single(1, 0, Pauli::X), tau));
    sched.push(Role::Free, "free", 1, 1.0, PauliSum::zero(1));
    let phi = exact_error_action(&sched, &h_e).unwrap();
    assert_eq!(phi.order, OrderTag::Total);

    let cache = SpectralCache::new();
    let lift = |m: &Matrix| m.kronecker(&Matrix::identity(2, 2));
    let pulse = generator_pulse(&PauliString::single(1, 0, Pauli::X), tau).matrix();
    let u = cache.propagator(h_e.matrix(), tau).unwrap() * cache.propagator(&(lift(&pulse) + h_e.matrix()), tau).unwrap();
    let ug = lift(&cache.propagator(&pulse, tau).unwrap());
    let w = ug.adjoint() * u;
    assert!(spectral_norm(&(expm_i(phi.phi.matrix(), -1.0) - w)) < 1e-11);
}

#[test]
fn edd_z_cancels_dephasing_at_first_order() {
    let space = JointSpace::new(1, 3).unwrap();
    let h_e = DenseOperator::from_parts(space, &Pauli::Z.matrix(), &unit_hermitian(&mut rng(3), 3)).unwrap();
    let sched = edd_schedule(DecouplingModel::Dephasing, 1, 0.05).unwrap();
    assert!(first_order_magnus(&sched, &h_e).unwrap().phi.mod_b_reduce().operator_norm() < 1e-11);
}

#[test]
fn second_order_residual_scales_quadratically() {
    let space = JointSpace::new(2, 2).unwrap();
    let h_e = DenseOperator::new(space, unit_hermitian(&mut rng(4), 8)).unwrap();
    let gate = GateSpec::sqrt_swap(0, 1);
    let residual = |tau: f64| {
        let s = dcg_schedule_for(&gate, 2, tau).unwrap();
        let total = exact_error_action(&s, &h_e).unwrap();
        let first = first_order_magnus(&s, &h_e).unwrap();
        ErrorAction::residual(&total, &first).norm()
    };
    let (a, b) = (residual(0.004), residual(0.002));
    let exponent = (a / b).log2();
    assert!((exponent - 2.0).abs() < 0.1, "exponent {exponent}");
}

#[test]
fn error_actions_are_hermitian() {
    let space = JointSpace::new(2, 2).unwrap();
    let h_e = DenseOperator::new(space, unit_hermitian(&mut rng(5), 8)).unwrap();
    let s = dcg_schedule_for(&GateSpec::Rotation { qubit: 1, axis: Pauli::Y, theta: 0.9 }, 2, 0.01).unwrap();
    assert!(exact_error_action(&s, &h_e).unwrap().phi.hermiticity_residual() < 1e-11);
    assert!(first_order_magnus(&s, &h_e).unwrap().phi.hermiticity_residual() < 1e-11);
}

#[test]
fn convergence_warning_is_flagged() {
    let space = JointSpace::new(1, 2).unwrap();
    let h_e = DenseOperator::new(space, unit_hermitian(&mut rng(6), 4)).unwrap();
    let long = free(1, 4.0);
    let action = first_order_magnus(&long, &h_e).unwrap();
    assert!(!action.warnings.is_empty());
    assert!(first_order_magnus(&free(1, 0.1), &h_e).unwrap().warnings.is_empty());
}

#[test]
fn compose_single_gate_is_unchanged() {
    let space = JointSpace::new(1, 2).unwrap();
    let phi = DenseOperator::new(space, unit_hermitian(&mut rng(7), 4)).unwrap().scale_real(0.01);
    let action = ErrorAction { phi: phi.clone(), order: OrderTag::FirstOrder, warnings: vec![] };
    let out = compose_gate_errors(&[(Pauli::X.matrix(), action)]).unwrap();
    assert!(out.phi.sub(&phi).operator_norm() < 1e-15);
}

#[test]
fn bang_bang_composition_is_group_projection() {
    let (tau, n) = (0.01, 2);
    let space = JointSpace::new(n, 2).unwrap();
    let (_, rep) = linear_decoupling_group(n).unwrap();
    let h_e = ErrorSubspace::linear(n).sample(space, &mut rng(8)).unwrap();
    let x = PauliString::uniform(n, Pauli::X).matrix();
    let y = PauliString::uniform(n, Pauli::Y).matrix();
    let step = ErrorAction { phi: h_e.scale_real(tau), order: OrderTag::FirstOrder, warnings: vec![] };
    let gates: Vec<(Matrix, ErrorAction)> = [&x, &y, &x, &y].iter().map(|g| ((*g).clone(), step.clone())).collect();
    let total = compose_gate_errors(&gates).unwrap();
    let expected = projection_superop(&rep, &h_e).unwrap().scale_real(tau);
    assert!(total.phi.sub(&expected).operator_norm() < 1e-14);
    assert!(total.phi.mod_b_reduce().operator_norm() < 1e-14);
}

#[test]
fn composition_matches_exact_product_for_commuting_errors() {
    let space = JointSpace::new(1, 2).unwrap();
    let zb = DenseOperator::from_parts(space, &Pauli::Z.matrix(), &unit_hermitian(&mut rng(9), 2)).unwrap();
    let (phi1, phi2) = (zb.scale_real(0.03), zb.scale_real(-0.07));
    let q1 = Pauli::X.matrix();
    let q2 = SpectralCache::new().propagator(&Pauli::Z.matrix(), 0.4).unwrap();
    let act = |p: &DenseOperator| ErrorAction { phi: p.clone(), order: OrderTag::FirstOrder, warnings: vec![] };
    let composed = compose_gate_errors(&[(q1.clone(), act(&phi1)), (q2.clone(), act(&phi2))]).unwrap();
    let lift = |m: &Matrix| m.kronecker(&Matrix::identity(2, 2));
    let actual = lift(&q2) * expm_i(phi2.matrix(), -1.0) * lift(&q1) * expm_i(phi1.matrix(), -1.0);
    let predicted = lift(&(&q2 * &q1)) * expm_i(composed.phi.matrix(), -1.0);
    assert!(spectral_norm(&(actual - predicted)) < 1e-14);
}

#[test]
fn sliced_composition_recovers_first_order_magnus() {
    let (tau, n, slices) = (0.05, 1, 64);
    let space = JointSpace::new(n, 2).unwrap();
    let h_e = DenseOperator::new(space, unit_hermitian(&mut rng(10), 4)).unwrap();
    let gate = GateSpec::Rotation { qubit: 0, axis: Pauli::X, theta: 0.8 };
    let whole = first_order_magnus(&primitive_schedule(&gate, n, tau).unwrap(), &h_e).unwrap();
    let h_c = gate.generator(n).unwrap().scaled(gate.theta() / tau);
    let dt = tau / slices as f64;
    let mut slice = ControlSchedule::new("slice", n, dt).unwrap();
    slice.push(Role::Q, "Q", 1, 1.0, h_c.clone());
    let q = SpectralCache::new().propagator(&h_c.matrix(), dt).unwrap();
    let step = first_order_magnus(&slice, &h_e).unwrap();
    let gates: Vec<(Matrix, ErrorAction)> = (0..slices).map(|_| (q.clone(), step.clone())).collect();
    let composed = compose_gate_errors(&gates).unwrap();
    assert!(composed.phi.sub(&whole.phi).operator_norm() < 1e-6 * h_e.operator_norm() * tau);
}

#[test]
fn second_order_bound_arithmetic() {
    assert_eq!(second_order_bound(0.0, 3.0, 1.0), 0.0);
    assert!((second_order_bound(0.1, 1.0, 0.5) - 0.013125).abs() < 1e-15);
}

#[test]
fn second_order_bound_holds_for_random_dcg_runs() {
    let gate = GateSpec::sqrt_swap(0, 1);
    let space = JointSpace::new(2, 2).unwrap();
    let mut r = rng(11);
    for _ in 0..20 {
        let h_sb = ErrorSubspace::linear(2).sample(space, &mut r).unwrap();
        let h_b = DenseOperator::lift_bath(space, &unit_hermitian(&mut r, 2)).unwrap().scale_real(0.5);
        let h_e = h_sb.add(&h_b);
        let tau = 0.5 / (16.0 * h_e.operator_norm());
        let s = dcg_schedule_for(&gate, 2, tau).unwrap();
        let gap = exact_error_action(&s, &h_e).unwrap().phi.sub(&first_order_magnus(&s, &h_e).unwrap().phi).operator_norm();
        assert!(gap <= second_order_bound(h_sb.operator_norm(), h_b.operator_norm(), s.duration()));
    }
}

#[test]
fn edd_path_satisfies_both_black_box_models() {
    let n = 2;
    let space = JointSpace::new(n, 2).unwrap();
    let gates = edd_schedule(DecouplingModel::Linear, n, 0.01).unwrap().interval_unitaries().unwrap();
    let report = nogo_witness(&gates, &ErrorSubspace::linear(n), space, 2, &mut rng(12)).unwrap();
    assert_eq!(report.cases.len(), 12);
    assert!(report.all_vanish && report.consistent);
    assert!(report.cases.iter().all(|c| c.action_residual < 1e-9));
}

#[test]
fn net_x_action_cannot_cancel_z_under_both_models() {
    let space = JointSpace::new(1, 2).unwrap();
    let zb = DenseOperator::from_parts(space, &Pauli::Z.matrix(), &unit_hermitian(&mut rng(13), 2)).unwrap();
    // three idle gates then X: three Z terms survive and one flips, leaving 2Z
    let gates = vec![Matrix::identity(2, 2), Matrix::identity(2, 2), Matrix::identity(2, 2), Pauli::X.matrix()];
    let case = nogo_case(&gates, &zb, "Z").unwrap();
    assert!((case.e2_residual - 2.0).abs() < 1e-12);
    assert!((case.action_residual - 2.0).abs() < 1e-12);
    assert!(case.consistent());

    let pure = DenseOperator::lift_bath(space, &unit_hermitian(&mut rng(14), 2)).unwrap();
    assert!(nogo_case(&gates, &pure, "bath").unwrap().both_vanish());
}

#[test]
fn verification_pass_and_fail() {
    let space = JointSpace::new(2, 4).unwrap();
    let dcg = dcg_schedule_for(&GateSpec::Rotation { qubit: 0, axis: Pauli::X, theta: PI / 4.0 }, 2, 0.01).unwrap();
    let report = verify_first_order_cancellation(&dcg, &ErrorSubspace::linear(2), space, 20, 1e-10, 1).unwrap();
    assert!(report.pass, "{}", report.worst_residual);
    let prim = primitive_schedule(&GateSpec::Rotation { qubit: 0, axis: Pauli::X, theta: PI / 4.0 }, 2, 0.01).unwrap();
    let report = verify_first_order_cancellation(&prim, &ErrorSubspace::linear(2), space, 20, 1e-10, 1).unwrap();
    assert!(!report.pass && report.worst_residual > 0.1);
    let edd = edd_schedule(DecouplingModel::Dephasing, 2, 0.01).unwrap();
    assert!(verify_first_order_cancellation(&edd, &ErrorSubspace::dephasing(2), space, 10, 1e-10, 1).unwrap().pass);
    assert!(verify_first_order_cancellation(&edd, &ErrorSubspace::linear(2), space, 0, 1e-10, 1).is_err());
}
