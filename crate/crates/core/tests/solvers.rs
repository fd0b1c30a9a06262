mod common;

use std::sync::Arc;

use common::*;
use graphwave::analysis::{convergence_study, formula_audit, propagation_experiment, uniqueness_check, Scenario};
use graphwave::spectral::{duhamel_coefficient, shifted_coefficient, FormulaVariant, ModalForcing, SpectralSolution};
use graphwave::{solve_rothe, Forcing, ForcingTerm, Measure, TimeProfile, WaveProblem};
use rand::Rng;

fn constant_forcing(n: usize, c: f64) -> Forcing {
    Forcing::new(vec![ForcingTerm {
        amplitude: vec![c; n],
        profile: TimeProfile::Constant(1.0),
    }])
}

#[test]
fn single_vertex_closed_form() {
    let p = WaveProblem::new(path_domain(1, Measure::Unit), vec![1.0], vec![0.0], Forcing::zero()).unwrap();
    let sol = SpectralSolution::new(&p, FormulaVariant::Duhamel).unwrap();
    for k in 0..=500 {
        let t = 0.01 * k as f64;
        let s = sol.state(t).unwrap();
        assert!((s.u[0] - (2f64.sqrt() * t).cos()).abs() <= 1e-12);
        assert!((s.du[0] + 2f64.sqrt() * (2f64.sqrt() * t).sin()).abs() <= 1e-12);
    }
}

#[test]
fn two_vertex_constant_forcing_matches_hand_solution() {
    // f ≡ c on both vertices of [[2,-1],[-1,2]]: only the symmetric mode
    // (λ = 1, φ = (1,1)/√2) is excited, with u = c(1 − cos t).
    let c = -1.0;
    let p = WaveProblem::new(
        path_domain(2, Measure::Unit),
        vec![0.0; 2],
        vec![0.0; 2],
        constant_forcing(2, c),
    )
    .unwrap();
    let sol = SpectralSolution::new(&p, FormulaVariant::Duhamel).unwrap();
    for t in [0.0, 0.4, 1.0, 2.5] {
        let u = sol.state(t).unwrap().u;
        let want = c * (1.0 - t.cos());
        assert!(u.iter().all(|v| (v - want).abs() < 1e-14), "{u:?} vs {want}");
    }
}

#[test]
fn rothe_tracks_the_modal_solution_on_a_forced_path() {
    let d = path_domain(6, Measure::Unit);
    let p = WaveProblem::new(d, vec![0.0; 6], vec![0.0; 6], constant_forcing(6, -1.0)).unwrap();
    let report = convergence_study(&p, 1.0, &[250, 500, 1000]).unwrap();
    assert!(report.strictly_decreasing(), "{:?}", report.errors);
    assert!(report.errors[2] < 1e-2);
}

#[test]
fn random_forced_problems_converge() {
    let mut r = rng(7);
    for _ in 0..4 {
        let d = Arc::new(random_instance(&mut r, 12, MeasureChoice::Random));
        let p = random_problem(&mut r, d, true);
        let report = convergence_study(&p, 1.0, &[100, 200, 400]).unwrap();
        assert!(report.strictly_decreasing(), "{:?}", report.errors);
        let u = uniqueness_check(&p, 1.0, 50).unwrap();
        assert!(u.passes(), "{u:?}");
    }
}

#[test]
fn shifted_and_duhamel_agree_when_forcing_starts_at_zero() {
    let profiles = [TimeProfile::Polynomial(vec![0.0, 0.7])];
    let b = ModalForcing {
        weights: &[1.3],
        profiles: &profiles,
    };
    for t in [0.0, 0.5, 2.0, 7.0] {
        let (d, p) = (
            duhamel_coefficient(2.0, 0.4, -0.2, b, t).unwrap(),
            shifted_coefficient(2.0, 0.4, -0.2, b, t).unwrap(),
        );
        assert!((d.a - p.a).abs() < 1e-10 && (d.da - p.da).abs() < 1e-10);
    }
}

#[test]
fn shifted_initial_velocity_is_minus_forcing() {
    let profiles = [TimeProfile::Constant(-1.0)];
    let b = ModalForcing {
        weights: &[1.0],
        profiles: &profiles,
    };
    let (d, p) = (
        duhamel_coefficient(2.0, 0.0, 0.0, b, 0.0).unwrap(),
        shifted_coefficient(2.0, 0.0, 0.0, b, 0.0).unwrap(),
    );
    assert_eq!(d.da, 0.0);
    assert_eq!(p.da, 1.0);
    // constant b = c: (1/√λ)∫ sin(√λ(t−s)) c ds = c(1 − cos √λ t)/λ
    let t = 1.3;
    let d = duhamel_coefficient(2.0, 0.0, 0.0, b, t).unwrap();
    assert!((d.a - -(1.0 - (2f64.sqrt() * t).cos()) / 2.0).abs() < 1e-15);
}

#[test]
fn audit_on_six_vertex_path() {
    let p = WaveProblem::new(
        path_domain(6, Measure::Unit),
        vec![0.0; 6],
        vec![0.0; 6],
        constant_forcing(6, -1.0),
    )
    .unwrap();
    let times: Vec<f64> = (0..=20).map(|k| 0.05 * k as f64).collect();
    let a = formula_audit(&p, &times).unwrap();
    assert!(a.duhamel.passes_suite);
    assert!(!a.shifted.passes_suite);
    assert!(a.duhamel.velocity_error <= 1e-12);
    assert!(a.shifted.shifted_velocity_error <= 1e-12);
    assert!(a.shifted.residual.passes(1e-9), "both variants solve the modal ODE");
    assert!(a.max_discrepancy > 0.1);
}

#[test]
fn point_source_reaches_every_vertex_on_short_paths() {
    let r = propagation_experiment(3, -1.0, &[0.1, 0.5, 1.0], FormulaVariant::Duhamel).unwrap();
    assert!(r.point_source_nonzero);
    for rec in r.records.iter().filter(|x| x.scenario == Scenario::PointSource) {
        assert!(!rec.below_floor);
        assert!(
            rec.u < 0.0,
            "a negative source pulls every vertex negative first: {rec:?}"
        );
    }
}

#[test]
fn rothe_final_value_is_close_to_cosine() {
    let p = WaveProblem::new(path_domain(1, Measure::Unit), vec![1.0], vec![0.0], Forcing::zero()).unwrap();
    let run = solve_rothe(&p, 1.0, 2000).unwrap();
    let worst = (0..=2000).fold(0.0_f64, |m, i| {
        m.max((run.level(i)[0] - (2f64.sqrt() * run.time(i)).cos()).abs())
    });
    assert!(worst <= 5e-3, "{worst}");
}

/// Dense −Δ_Ω built straight from the graph: m(x)/μ(x) on the diagonal and
/// −ω(x,y)/μ(x) for interior neighbours.
fn dense_laplacian(d: &graphwave::DirichletDomain) -> nalgebra::DMatrix<f64> {
    let g = d.graph();
    let interior = d.interior();
    let n = interior.len();
    let mut a = nalgebra::DMatrix::zeros(n, n);
    for (j, &x) in interior.iter().enumerate() {
        for &(y, w) in g.neighbors(x) {
            a[(j, j)] += w / g.mu(x);
            if let Some(k) = interior.iter().position(|&z| z == y) {
                a[(j, k)] -= w / g.mu(x);
            }
        }
    }
    a
}

#[test]
fn conjugate_gradient_matches_gaussian_elimination() {
    let mut r = rng(360);
    for _ in 0..50 {
        let d = random_instance(&mut r, 64, MeasureChoice::Random);
        let n = d.interior_len();
        let shift = r.gen_range(0.0..50.0);
        let rhs = random_vector(&mut r, n);
        let op = graphwave::assemble(&d);
        let got = graphwave::rothe::linear_solve_spd(&op.symmetric, shift, &rhs).unwrap();
        let a = dense_laplacian(&d) + nalgebra::DMatrix::identity(n, n) * shift;
        let want = a.lu().solve(&nalgebra::DVector::from_vec(rhs)).unwrap();
        let scale = want.amax().max(1.0);
        assert!(sup_diff(&got, want.as_slice()) <= 1e-11 * scale, "N={n} shift={shift}");
    }
}
