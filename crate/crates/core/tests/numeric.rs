mod common;

use std::collections::BTreeMap;

use jetvar::frontend::Model;
use jetvar::numeric::{
    compile, finite_difference_jacobi, integrate, log_log_slope, max_distance,
    perturbation_residual, solve_jacobi, JacobiProblem, NumericError,
};

use common::{ode_case, ODE_CASES};

fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn problem(
    src: &str,
    init: &[(&str, f64)],
    jacobi: &[(&str, f64)],
    t1: f64,
    dt: f64,
) -> JacobiProblem {
    let system = Model::parse(src).unwrap().deviation().unwrap();
    JacobiProblem::new(system, map(init), map(jacobi), 0.0, t1, dt).unwrap()
}

#[test]
fn free_particle_jacobi_field_is_affine() {
    let prob = problem(
        "base t\nfibre y\nlagrangian 0.5*y_t^2",
        &[("y", 1.0), ("y_t", 2.0)],
        &[("v_y", 0.5), ("v_y_t", -1.0)],
        3.0,
        0.01,
    );
    let (s, psi) = solve_jacobi(&prob).unwrap();
    for (k, t) in s.times.iter().enumerate() {
        assert!((s.states[k][0] - (1.0 + 2.0 * t)).abs() < 1e-12);
        assert!((psi.states[k][0] - (0.5 - t)).abs() < 1e-12);
    }
}

#[test]
fn riccati_jacobi_field_matches_its_integral() {
    // y' = y^2 from y(0) = 1/2 gives y = 1/(2 - t); the Jacobi field with
    // v(0) = 1 is (dy/dy0) = 4/(2 - t)^2.
    let prob = problem(
        "base t\nfibre y\nequation y_t - y^2",
        &[("y", 0.5)],
        &[("v_y", 1.0)],
        1.0,
        1e-3,
    );
    let (s, psi) = solve_jacobi(&prob).unwrap();
    for (k, t) in s.times.iter().enumerate() {
        assert!((s.states[k][0] - 1.0 / (2.0 - t)).abs() < 1e-10);
        assert!((psi.states[k][0] - 4.0 / (2.0 - t).powi(2)).abs() < 1e-9);
    }
}

#[test]
fn hamiltonian_oscillator_field_rotates() {
    let prob = problem(
        "base t\nfibre y\nhamiltonian 0.5*(pt_y^2 + y^2)",
        &[("y", 0.0), ("pt_y", 1.0)],
        &[("v_y", 1.0), ("vpt_y", 0.0)],
        6.0,
        1e-3,
    );
    let (_, psi) = solve_jacobi(&prob).unwrap();
    let v = psi.column("v_y").unwrap();
    let w = psi.column("vpt_y").unwrap();
    for (k, t) in psi.times.iter().enumerate() {
        assert!((v[k] - t.cos()).abs() < 1e-10);
        assert!((w[k] + t.sin()).abs() < 1e-10);
    }
}

#[test]
fn rk4_error_falls_as_fourth_power() {
    let model = Model::parse("base t\nfibre y\nlagrangian 0.5*(y_t^2 - y^2)").unwrap();
    let nf = compile(&model.equations().unwrap()).unwrap();
    let error = |dt: f64| {
        let traj = integrate(&nf.system, &[1.0, 0.0], 0.0, 4.0, dt).unwrap();
        (traj.last().unwrap()[0] - 4f64.cos()).abs()
    };
    let points: Vec<(f64, f64)> = [0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| (dt, error(dt)))
        .collect();
    let slope = log_log_slope(&points).unwrap();
    assert!((3.8..=4.2).contains(&slope), "{slope}");
}

#[test]
fn finite_differences_converge_to_the_jacobi_field() {
    for case in ODE_CASES.iter().filter(|c| !c.linear) {
        let prob = case.problem(2e-3);
        let (_, psi) = solve_jacobi(&prob).unwrap();
        let points: Vec<(f64, f64)> = [1e-2, 1e-3]
            .iter()
            .map(|&eps| {
                (
                    eps,
                    max_distance(&psi, &finite_difference_jacobi(&prob, eps).unwrap()),
                )
            })
            .collect();
        let slope = log_log_slope(&points).unwrap();
        assert!((0.8..=1.2).contains(&slope), "{}: {slope}", case.name);
    }
}

#[test]
fn residual_is_quadratic_in_eps() {
    for name in ["duffing", "kepler", "ham_quartic"] {
        let table =
            perturbation_residual(&ode_case(name).problem(2e-3), &[1e-2, 5e-3, 2.5e-3]).unwrap();
        let p = table.exponent.unwrap();
        assert!((1.9..=2.1).contains(&p), "{name}: {p}");
        assert!(table.to_csv().starts_with("eps,residual\n"));
    }
}

#[test]
fn problems_reject_bad_input() {
    let system = Model::parse("base t\nfibre y\nequation y_t - y")
        .unwrap()
        .deviation()
        .unwrap();
    let attempt = |init: &[(&str, f64)], jacobi: &[(&str, f64)], t1: f64, dt: f64| {
        JacobiProblem::new(system.clone(), map(init), map(jacobi), 0.0, t1, dt).err()
    };
    assert!(matches!(
        attempt(&[], &[("v_y", 0.0)], 1.0, 0.1),
        Some(NumericError::InitialData(_))
    ));
    assert!(matches!(
        attempt(&[("y", 1.0)], &[("y", 0.0)], 1.0, 0.1),
        Some(NumericError::InitialData(_))
    ));
    assert!(matches!(
        attempt(&[("y", 1.0)], &[("v_y", 0.0)], 1.0, -0.1),
        Some(NumericError::InvalidGrid(_))
    ));
    assert!(attempt(&[("y", 1.0)], &[("v_y", 0.0)], 1.0, 0.1).is_none());

    let plain = Model::parse("base t\nfibre y\nequation y_t - y")
        .unwrap()
        .equations()
        .unwrap();
    assert!(matches!(
        JacobiProblem::new(
            plain,
            map(&[("y", 1.0)]),
            map(&[("v_y", 0.0)]),
            0.0,
            1.0,
            0.1
        ),
        Err(NumericError::NotDeviation)
    ));
}
