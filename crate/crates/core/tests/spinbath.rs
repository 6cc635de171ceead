use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dcg_core::analysis::{first_order_magnus, ErrorSubspace};
use dcg_core::group::{linear_decoupling_group, projection_superop, Role};
use dcg_core::operator::random::unit_hermitian;
use dcg_core::operator::{phase_insensitive_distance, spectral_norm, DenseOperator, JointSpace, Matrix, Pauli, PauliSum, SpectralCache};
use dcg_core::schedule::ControlSchedule;
use dcg_core::spinbath::{
    apply_control_error, build_internal_hamiltonian, dcg_schedule_for, default_input_state, fit_slope, gate_fidelity,
    improvement_ratio, primitive_schedule, rotating_frame_transform, run_point, run_sweep, sample_bath_model,
    time_average_over_period, to_csv, ControlErrorModel, FitWindowPolicy, GateSpec, SpinBathSimulator, SweepConfig,
};

const CAP: usize = 1024;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| (lo.ln() + i as f64 / (points - 1) as f64 * (hi / lo).ln()).exp()).collect()
}

#[test]
fn model_sampling_is_deterministic_and_respects_scales() {
    let a = sample_bath_model(2, 3, 1.0, 1.0, 7, CAP).unwrap();
    assert_eq!(a, sample_bath_model(2, 3, 1.0, 1.0, 7, CAP).unwrap());
    assert_ne!(a, sample_bath_model(2, 3, 1.0, 1.0, 8, CAP).unwrap());

    let quiet = sample_bath_model(2, 3, 0.0, 1.0, 7, CAP).unwrap();
    assert!(quiet.gamma_couplings.iter().flatten().all(|g| *g == 0.0));
    let (hb, _) = build_internal_hamiltonian(&quiet).unwrap();
    assert_eq!(hb.operator_norm(), 0.0);

    let decoupled = sample_bath_model(2, 3, 1.0, 0.0, 7, CAP).unwrap();
    let (_, hsb) = build_internal_hamiltonian(&decoupled).unwrap();
    assert_eq!(hsb.operator_norm(), 0.0);

    assert!(sample_bath_model(4, 7, 1.0, 1.0, 0, CAP).is_err());
    assert!(sample_bath_model(1, 1, -1.0, 1.0, 0, CAP).is_err());
}

#[test]
fn single_spin_hyperfine_matches_hand_matrix() {
    let model = sample_bath_model(1, 1, 1.0, 1.0, 3, CAP).unwrap();
    let a = model.hyperfine_couplings[0][0];
    let (_, hsb) = build_internal_hamiltonian(&model).unwrap();
    let rows = [[1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 2.0, 0.0], [0.0, 2.0, -1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let expected = Matrix::from_fn(4, 4, |i, j| c(a / 4.0 * rows[i][j]));
    assert!(spectral_norm(&(hsb.matrix() - expected)) < 1e-15);
}

#[test]
fn hyperfine_coupling_is_removed_by_linear_group() {
    let model = sample_bath_model(2, 2, 1.0, 1.0, 4, CAP).unwrap();
    let (_, hsb) = build_internal_hamiltonian(&model).unwrap();
    let (_, rep) = linear_decoupling_group(2).unwrap();
    assert!(projection_superop(&rep, &hsb).unwrap().mod_b_reduce().operator_norm() < 1e-13);
}

#[test]
fn dcg_segment_roles() {
    let s = dcg_schedule_for(&GateSpec::sqrt_swap(0, 1), 2, 0.01).unwrap();
    assert_eq!(s.segments.len(), 16);
    let tokens: Vec<&str> = s.segments.iter().map(|g| g.token.as_str()).collect();
    assert_eq!(
        tokens,
        ["X", "Q", "Q'", "Y", "Q", "Q'", "X", "Q", "Q'", "Y", "Y", "X", "Y", "X", "Q_half", "Q_half"]
    );
    assert!(s.segments[..14].iter().filter(|g| g.token.starts_with('Q')).all(|g| g.role == Role::IdentityArm));
    assert!(s.segments[14..].iter().all(|g| g.role == Role::QHalf));
    assert!((s.duration() - 0.16).abs() < 1e-15);
}

#[test]
fn dcg_implements_the_target_gate() {
    for gate in [
        GateSpec::sqrt_swap(0, 1),
        GateSpec::Rotation { qubit: 1, axis: Pauli::Y, theta: 1.1 },
        GateSpec::Rotation { qubit: 0, axis: Pauli::Z, theta: -0.4 },
    ] {
        let u = dcg_schedule_for(&gate, 2, 0.01).unwrap().gate_unitary().unwrap();
        assert!(phase_insensitive_distance(&u, &gate.target_unitary(2).unwrap()) < 1e-10, "{}", gate.label());
    }
    let idle = GateSpec::Rotation { qubit: 0, axis: Pauli::X, theta: 0.0 };
    let u = dcg_schedule_for(&idle, 2, 0.01).unwrap().gate_unitary().unwrap();
    assert!(phase_insensitive_distance(&u, &Matrix::identity(4, 4)) < 1e-10);
}

#[test]
fn control_error_models() {
    let gate = GateSpec::Rotation { qubit: 0, axis: Pauli::X, theta: PI / 4.0 };
    let s = primitive_schedule(&gate, 1, 0.1).unwrap();
    assert_eq!(apply_control_error(&s, &ControlErrorModel::FixedSystematic { epsilon: 0.0 }).unwrap(), s);
    assert_eq!(apply_control_error(&s, &ControlErrorModel::None).unwrap(), s);

    let over = apply_control_error(&s, &ControlErrorModel::FixedSystematic { epsilon: 0.01 }).unwrap();
    let expected = SpectralCache::new().propagator(&Pauli::X.matrix(), PI / 4.0 * 1.01).unwrap();
    assert!(spectral_norm(&(over.gate_unitary().unwrap() - expected)) < 1e-14);

    let dcg = dcg_schedule_for(&gate, 1, 0.1).unwrap();
    let fixed = apply_control_error(&dcg, &ControlErrorModel::FixedSystematic { epsilon: 0.02 }).unwrap();
    let random = apply_control_error(&dcg, &ControlErrorModel::RandomOverrotation { epsilon: 0.02, width: 0.0, seed: 9 }).unwrap();
    assert_eq!(fixed, random);

    let dev = PauliSum::parse(1, "1*Z").unwrap();
    let shifted = apply_control_error(&s, &ControlErrorModel::ScaledSystematic { epsilon: 0.5, h_dev: dev }).unwrap();
    assert_eq!(shifted.segments[0].hamiltonian, PauliSum::parse(1, "7.853981633974483*X + 0.5*Z").unwrap());
    assert!(apply_control_error(&s, &ControlErrorModel::FixedSystematic { epsilon: -0.1 }).is_err());
}

#[test]
fn uncoupled_bath_gives_perfect_gates() {
    let model = sample_bath_model(2, 2, 1.0, 0.0, 5, CAP).unwrap();
    let res = run_point(&model, &GateSpec::sqrt_swap(0, 1), 0.05, &ControlErrorModel::None).unwrap();
    assert!((res.f_prim - 1.0).abs() < 1e-12 && (res.f_dcg - 1.0).abs() < 1e-12);
    assert!(res.saturated);
}

#[test]
fn empty_schedule_leaves_state_unchanged() {
    let model = sample_bath_model(2, 2, 1.0, 1.0, 6, CAP).unwrap();
    let sim = SpinBathSimulator::new(&model).unwrap();
    let psi = default_input_state(2);
    let out = sim.evolve(&ControlSchedule::new("empty", 2, 0.1).unwrap()).unwrap();
    let expected = Matrix::from_fn(4, 4, |i, j| psi[i] * psi[j].conj());
    assert!(spectral_norm(&(out.rho_system - expected)) < 1e-14);
}

#[test]
fn single_spin_free_evolution_matches_closed_form() {
    // H = a/4 (2 SWAP − 1), so ρ_S(t) = cos²(at/2) ρ + sin²(at/2) I/2
    let model = sample_bath_model(1, 1, 0.0, 1.0, 11, CAP).unwrap();
    let a = model.hyperfine_couplings[0][0];
    let sim = SpinBathSimulator::new(&model).unwrap();
    for t in [0.01, 0.3, 2.0] {
        let mut free = ControlSchedule::new("free", 1, t).unwrap();
        free.push(Role::Free, "free", 1, 1.0, PauliSum::zero(1));
        let rho = sim.evolve(&free).unwrap().rho_system;
        let f = gate_fidelity(&rho, &Matrix::identity(2, 2), sim.input_state()).unwrap();
        let s2 = (a * t / 2.0).sin().powi(2);
        assert!((f - (1.0 - s2 / 2.0).sqrt()).abs() < 1e-12, "t={t}");
        if t < 0.1 {
            // leading order a²t²/16
            assert!(((1.0 - f) / (a * a * t * t / 16.0) - 1.0).abs() < 0.1);
        }
    }
}

#[test]
fn fidelity_examples() {
    let dephased = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5), c(0.5), c(0.0), c(0.0)]));
    let psi = default_input_state(2);
    let f = gate_fidelity(&dephased, &Matrix::identity(4, 4), &psi).unwrap();
    assert!((f - FRAC_1_SQRT_2).abs() < 1e-12);

    let target = GateSpec::sqrt_swap(0, 1).target_unitary(2).unwrap();
    let out = &target * nalgebra::DVector::from_column_slice(&psi);
    let rho = &out * out.adjoint();
    assert!((gate_fidelity(&rho, &target, &psi).unwrap() - 1.0).abs() < 1e-12);
    assert!(gate_fidelity(&rho, &Matrix::identity(2, 2), &psi).is_err());
}

#[test]
fn improvement_ratio_cases() {
    let r = improvement_ratio(0.99, 0.9999).unwrap();
    assert!((r.r - 100.0).abs() < 1e-8 && !r.saturated);
    assert_eq!(improvement_ratio(0.9, 0.9).unwrap().r, 1.0);
    assert!(improvement_ratio(0.9, 1.0).unwrap().saturated);
    assert!(improvement_ratio(1.2, 0.9).is_err());
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let mut cfg = SweepConfig::new(2, 2, GateSpec::sqrt_swap(0, 1), log_grid(0.005, 0.05, 4), vec![1, 2]);
    cfg.a = vec![1.0, 5.0];
    let serial = run_sweep(&cfg, 1).unwrap();
    let parallel = run_sweep(&cfg, 4).unwrap();
    assert_eq!(to_csv(&serial.rows), to_csv(&parallel.rows));
    assert_eq!(serial.summary, parallel.summary);
    assert_eq!(serial.summary.curves.len(), 4);
}

#[test]
fn single_point_grid_has_no_fit() {
    let cfg = SweepConfig::new(1, 2, GateSpec::Rotation { qubit: 0, axis: Pauli::X, theta: 0.5 }, vec![0.01], vec![3]);
    let out = run_sweep(&cfg, 1).unwrap();
    assert_eq!(out.rows.len(), 1);
    assert!(out.summary.slope.is_none());
    let mut empty = cfg.clone();
    empty.tau_grid.clear();
    assert!(run_sweep(&empty, 1).is_err());
}

#[test]
fn csv_refit_reproduces_reported_slope() {
    let mut cfg = SweepConfig::new(1, 2, GateSpec::Rotation { qubit: 0, axis: Pauli::X, theta: 0.5 }, log_grid(0.005, 0.05, 12), vec![4]);
    cfg.fit_window_policy = FitWindowPolicy::All;
    let out = run_sweep(&cfg, 2).unwrap();
    let csv = to_csv(&out.rows);
    let points: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse::<f64>().unwrap().ln(), f[7].parse::<f64>().unwrap().ln())
        })
        .collect();
    assert_eq!(points.len(), 12);
    let n = points.len() as f64;
    let (mx, my) = (points.iter().map(|p| p.0).sum::<f64>() / n, points.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let reported = out.summary.slope.unwrap();
    assert!((-sxy / sxx - reported).abs() < 1e-9, "{reported}");
}

#[test]
fn threshold_moves_to_shorter_tau_with_stronger_coupling() {
    let mut cfg = SweepConfig::new(2, 2, GateSpec::sqrt_swap(0, 1), log_grid(1e-4, 0.2, 20), vec![1]);
    cfg.a = vec![1.0, 10.0, 100.0];
    let out = run_sweep(&cfg, 4).unwrap();
    let stars: Vec<f64> = out.summary.curves.iter().map(|c| c.tau_star.unwrap()).collect();
    assert!(stars[0] > stars[1] && stars[1] > stars[2], "{stars:?}");
}

#[test]
fn static_bath_residual_is_second_order() {
    let gate = GateSpec::sqrt_swap(0, 1);
    let model = sample_bath_model(2, 2, 0.0, 1.0, 5, CAP).unwrap();
    let sim = SpinBathSimulator::new(&model).unwrap();
    let target = gate.target_unitary(2).unwrap();
    let points: Vec<(f64, f64)> = log_grid(0.005, 0.04, 5)
        .into_iter()
        .map(|tau| {
            let rho = sim.evolve(&dcg_schedule_for(&gate, 2, tau).unwrap()).unwrap().rho_system;
            (tau, (1.0 - gate_fidelity(&rho, &target, sim.input_state()).unwrap()).sqrt())
        })
        .collect();
    let exponent = -fit_slope(&points).unwrap().slope;
    assert!((exponent - 2.0).abs() < 0.2, "{exponent}");
}

#[test]
fn primitive_first_order_error_grows_linearly() {
    let gate = GateSpec::sqrt_swap(0, 1);
    let space = JointSpace::new(2, 2).unwrap();
    let h_e = ErrorSubspace::linear(2).sample(space, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
    let per_tau: Vec<f64> = [0.001, 0.003, 0.01]
        .iter()
        .map(|&tau| first_order_magnus(&primitive_schedule(&gate, 2, tau).unwrap(), &h_e).unwrap().phi.operator_norm() / tau)
        .collect();
    assert!(per_tau.iter().all(|v| (v / per_tau[0] - 1.0).abs() < 0.01), "{per_tau:?}");
}

#[test]
fn rotating_frame_examples() {
    let space = JointSpace::new(2, 2).unwrap();
    let b = unit_hermitian(&mut ChaCha8Rng::seed_from_u64(7), 2);
    let z = DenseOperator::from_parts(space, &Pauli::Z.matrix().kronecker(&Matrix::identity(2, 2)), &b).unwrap();
    assert!(rotating_frame_transform(&z, 3.0, 0.4).unwrap().sub(&z).operator_norm() < 1e-15);
    let x = DenseOperator::from_parts(space, &Pauli::X.matrix().kronecker(&Matrix::identity(2, 2)), &b).unwrap();
    assert!(time_average_over_period(&x, 3.0).unwrap().operator_norm() < 1e-15);
    assert!(rotating_frame_transform(&x, 3.0, 0.4).unwrap().sub(&x).operator_norm() > 0.1);
    assert!(rotating_frame_transform(&x, 3.0, 2.0 * PI / 3.0).unwrap().sub(&x).operator_norm() < 1e-13);
    assert!(time_average_over_period(&x, 0.0).is_err());
}

#[test]
fn period_average_matches_quadrature() {
    let (omega, samples) = (2.5, 64);
    let space = JointSpace::new(2, 2).unwrap();
    let h = DenseOperator::new(space, unit_hermitian(&mut ChaCha8Rng::seed_from_u64(8), 8)).unwrap();
    let period = 2.0 * PI / omega;
    let mut acc = DenseOperator::zeros(space);
    for k in 0..samples {
        acc = acc.add(&rotating_frame_transform(&h, omega, period * k as f64 / samples as f64).unwrap());
    }
    let avg = acc.scale_real(1.0 / samples as f64);
    assert!(avg.sub(&time_average_over_period(&h, omega).unwrap()).operator_norm() < 1e-13);
}
