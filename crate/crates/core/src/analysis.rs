//! Experiments built on the two solvers: convergence of Rothe's method to
//! the modal solution, energy conservation, uniqueness, propagation speed,
//! PDE residuals and the audit of the two modal coefficient formulas.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{path_graph, DirichletDomain, Measure};
use crate::linalg::norm_inf;
use crate::operators::{assemble, OperatorMatrix};
use crate::problem::{Forcing, ForcingTerm, TimeProfile, WaveProblem};
use crate::rothe::{solve_rothe, solve_rothe_with, RotheRun};
use crate::spectral::{energy_of_state, FormulaVariant, SpectralSolution};

/// Residual tolerance for the modal solution, relative to the data scale.
pub const SPECTRAL_RESIDUAL_TOL: f64 = 1e-9;
/// Initial-condition tolerance in the sup norm.
pub const INITIAL_TOL: f64 = 1e-12;
/// Energy drift and spatial/modal agreement tolerance, relative.
pub const ENERGY_TOL: f64 = 1e-10;
/// Multiple of machine epsilon below which a probe value is not resolvable.
pub const FLOOR_FACTOR: f64 = 1e3;

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub horizon: f64,
    pub steps: Vec<usize>,
    /// Sup over grid times and interior vertices of |u⁽ⁿ⁾ − u_spectral|.
    pub errors: Vec<f64>,
    /// ln(eᵢ/eᵢ₊₁)/ln(nᵢ₊₁/nᵢ); `None` where either error is zero.
    pub orders: Vec<Option<f64>>,
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    /// Smallest defined pairwise order.
    pub fn min_order(&self) -> Option<f64> {
        self.orders.iter().flatten().copied().reduce(f64::min)
    }

    pub fn is_exact(&self) -> bool {
        self.errors.iter().all(|&e| e == 0.0)
    }
}

/// Runs Rothe's method for every n in `steps` (in parallel) and measures the
/// sup-norm distance to the Duhamel modal solution at the grid times.
pub fn convergence_study(problem: &WaveProblem, horizon: f64, steps: &[usize]) -> Result<ConvergenceReport> {
    if steps.is_empty() {
        return Err(Error::InvalidArgument("empty step list".into()));
    }
    if steps[0] == 0 || steps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "step counts must be positive and strictly increasing, got {steps:?}"
        )));
    }
    problem.check_horizon(horizon)?;
    let oracle = SpectralSolution::new(problem, FormulaVariant::Duhamel)?;
    let op = assemble(problem.domain());
    let errors = steps
        .par_iter()
        .map(|&n| {
            let run = solve_rothe_with(problem, &op, horizon, n)?;
            (0..=n).try_fold(0.0_f64, |e, i| {
                let exact = oracle.state(run.time(i))?;
                Ok(e.max(sup_diff(run.level(i), &exact.u)))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let orders = errors
        .windows(2)
        .zip(steps.windows(2))
        .map(|(e, n)| (e[0] > 0.0 && e[1] > 0.0).then(|| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln()))
        .collect();
    Ok(ConvergenceReport {
        horizon,
        steps: steps.to_vec(),
        errors,
        orders,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergySample {
    pub t: f64,
    pub spatial: f64,
    pub modal: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyDrift {
    pub e0: f64,
    /// max_t |e(t) − e(0)| using the spatial energy.
    pub max_drift: f64,
    /// max_drift / max(e(0), 1).
    pub relative_drift: f64,
    /// max_t |spatial − modal| / max(spatial, 1).
    pub max_spatial_modal_gap: f64,
    pub samples: Vec<EnergySample>,
}

impl EnergyDrift {
    pub fn passes(&self) -> bool {
        self.relative_drift <= ENERGY_TOL && self.max_spatial_modal_gap <= ENERGY_TOL
    }
}

/// Energy of the Duhamel solution at each time. Requires f ≡ 0.
pub fn energy_drift(problem: &WaveProblem, times: &[f64]) -> Result<EnergyDrift> {
    if !problem.forcing().is_zero() {
        return Err(Error::NonzeroForcing);
    }
    let sol = SpectralSolution::new(problem, FormulaVariant::Duhamel)?;
    let e0 = energy_of_state(problem, &sol, &sol.state(0.0)?).spatial;
    let mut report = EnergyDrift {
        e0,
        max_drift: 0.0,
        relative_drift: 0.0,
        max_spatial_modal_gap: 0.0,
        samples: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let e = energy_of_state(problem, &sol, &sol.state(t)?);
        report.max_drift = report.max_drift.max((e.spatial - e0).abs());
        report.max_spatial_modal_gap = report
            .max_spatial_modal_gap
            .max((e.spatial - e.modal).abs() / e.spatial.max(1.0));
        report.samples.push(EnergySample {
            t,
            spatial: e.spatial,
            modal: e.modal,
        });
    }
    report.relative_drift = report.max_drift / e0.max(1.0);
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub steps: usize,
    /// sup at the n-grid of |u⁽ⁿ⁾ − u⁽²ⁿ⁾|.
    pub diff_n_2n: f64,
    /// sup at the 2n-grid of |u⁽²ⁿ⁾ − u⁽⁴ⁿ⁾|.
    pub diff_2n_4n: f64,
    /// sup of the zero problem's solution through Rothe's method.
    pub zero_rothe: f64,
    /// sup of the zero problem's solution through the modal formula.
    pub zero_spectral: f64,
    /// Two independent modal evaluations agree bit for bit.
    pub deterministic: bool,
}

impl UniquenessReport {
    pub fn passes(&self) -> bool {
        let shrinking = self.diff_2n_4n < self.diff_n_2n || (self.diff_n_2n == 0.0 && self.diff_2n_4n == 0.0);
        shrinking && self.zero_rothe <= INITIAL_TOL && self.zero_spectral <= INITIAL_TOL && self.deterministic
    }
}

fn rothe_gap(coarse: &RotheRun, fine: &RotheRun) -> f64 {
    let ratio = fine.steps() / coarse.steps();
    (0..=coarse.steps()).fold(0.0, |m, i| m.max(sup_diff(coarse.level(i), fine.level(ratio * i))))
}

/// Solves with n, 2n and 4n steps and checks the successive differences
/// shrink; also runs the zero problem through both solvers.
pub fn uniqueness_check(problem: &WaveProblem, horizon: f64, steps: usize) -> Result<UniquenessReport> {
    let op = assemble(problem.domain());
    let runs = [steps, 2 * steps, 4 * steps]
        .par_iter()
        .map(|&n| solve_rothe_with(problem, &op, horizon, n))
        .collect::<Result<Vec<_>>>()?;

    let zero = problem.zeroed();
    let zero_run = solve_rothe_with(&zero, &op, horizon, steps)?;
    let zero_rothe = zero_run.levels().iter().map(|l| norm_inf(l)).fold(0.0, f64::max);
    let zero_sol = SpectralSolution::new(&zero, FormulaVariant::Duhamel)?;
    let mut zero_spectral: f64 = 0.0;
    for i in 0..=steps {
        zero_spectral = zero_spectral.max(norm_inf(&zero_sol.state(zero_run.time(i))?.u));
    }

    let (a, b) = (
        SpectralSolution::new(problem, FormulaVariant::Duhamel)?,
        SpectralSolution::new(problem, FormulaVariant::Duhamel)?,
    );
    let mut deterministic = true;
    for k in 0..=8 {
        let t = horizon * k as f64 / 8.0;
        let (sa, sb) = (a.state(t)?, b.state(t)?);
        deterministic &= sa.u.iter().zip(&sb.u).all(|(x, y)| x.to_bits() == y.to_bits());
    }

    Ok(UniquenessReport {
        steps,
        diff_n_2n: rothe_gap(&runs[0], &runs[1]),
        diff_2n_4n: rothe_gap(&runs[1], &runs[2]),
        zero_rothe,
        zero_spectral,
        deterministic,
    })
}

/// max |∂_t²u − Δ_Ω u − f| and the magnitude of the terms being balanced.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Residual {
    pub max_abs: f64,
    /// max_t (‖Lu‖∞ + ‖∂_t²u‖∞ + ‖f‖∞).
    pub scale: f64,
}

impl Residual {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs <= tol * self.scale
    }

    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.max_abs
        } else {
            self.max_abs / self.scale
        }
    }
}

/// A trajectory that can report u and ∂_t²u at its own sample times.
pub trait Trajectory {
    fn sample_times(&self) -> Vec<f64>;
    /// (u, ∂_t²u) at the i-th sample time, interior order.
    fn sample(&self, i: usize) -> Result<(Vec<f64>, Vec<f64>)>;
}

/// Rothe levels i = 1..=n, with δ²uⁱ standing in for ∂_t²u.
impl Trajectory for RotheRun {
    fn sample_times(&self) -> Vec<f64> {
        (1..=self.steps()).map(|i| self.time(i)).collect()
    }

    fn sample(&self, i: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((self.level(i + 1).to_vec(), self.acceleration(i + 1).to_vec()))
    }
}

/// A modal solution sampled at fixed times.
pub struct SampledSpectral<'a> {
    pub solution: &'a SpectralSolution,
    pub times: Vec<f64>,
}

impl Trajectory for SampledSpectral<'_> {
    fn sample_times(&self) -> Vec<f64> {
        self.times.clone()
    }

    fn sample(&self, i: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let s = self.solution.state(self.times[i])?;
        Ok((s.u, s.d2u))
    }
}

pub fn residual(problem: &WaveProblem, op: &OperatorMatrix, trajectory: &impl Trajectory) -> Result<Residual> {
    let mut r = Residual::default();
    for (i, t) in trajectory.sample_times().into_iter().enumerate() {
        let (u, d2u) = trajectory.sample(i)?;
        let lu = op.apply(&u);
        let f = problem.forcing_at(t)?;
        for ((l, a), fi) in lu.iter().zip(&d2u).zip(&f) {
            r.max_abs = r.max_abs.max((a + l - fi).abs());
        }
        r.scale = r.scale.max(norm_inf(&lu) + norm_inf(&d2u) + norm_inf(&f));
    }
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct VariantAudit {
    pub variant: FormulaVariant,
    /// ‖u(0) − g‖∞.
    pub displacement_error: f64,
    /// ‖∂_t u(0) − h‖∞.
    pub velocity_error: f64,
    /// ‖∂_t u(0) − (h − f(0))‖∞.
    pub shifted_velocity_error: f64,
    pub residual: Residual,
    /// Initial conditions and residual all within tolerance.
    pub passes_suite: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaAudit {
    pub times: Vec<f64>,
    pub duhamel: VariantAudit,
    pub shifted: VariantAudit,
    /// max over `times` of ‖u_shifted − u_duhamel‖∞.
    pub max_discrepancy: f64,
}

/// Compares the two modal coefficient formulas on one problem.
pub fn formula_audit(problem: &WaveProblem, times: &[f64]) -> Result<FormulaAudit> {
    let op = assemble(problem.domain());
    let f0 = problem.forcing_at(0.0)?;
    let shifted: Vec<f64> = problem.h().iter().zip(&f0).map(|(h, f)| h - f).collect();
    let audit = |sol: &SpectralSolution| -> Result<VariantAudit> {
        let s0 = sol.state(0.0)?;
        let residual = residual(
            problem,
            &op.matrix,
            &SampledSpectral {
                solution: sol,
                times: times.to_vec(),
            },
        )?;
        let displacement_error = sup_diff(&s0.u, problem.g());
        let velocity_error = sup_diff(&s0.du, problem.h());
        Ok(VariantAudit {
            variant: sol.variant(),
            displacement_error,
            velocity_error,
            shifted_velocity_error: sup_diff(&s0.du, &shifted),
            residual,
            passes_suite: displacement_error <= INITIAL_TOL
                && velocity_error <= INITIAL_TOL
                && residual.passes(SPECTRAL_RESIDUAL_TOL),
        })
    };
    let duhamel = SpectralSolution::new(problem, FormulaVariant::Duhamel)?;
    let shifted = SpectralSolution::with_spectrum(problem, duhamel.spectrum().clone(), FormulaVariant::Shifted)?;
    let mut max_discrepancy: f64 = 0.0;
    for &t in times {
        max_discrepancy = max_discrepancy.max(sup_diff(&duhamel.state(t)?.u, &shifted.state(t)?.u));
    }
    Ok(FormulaAudit {
        times: times.to_vec(),
        duhamel: audit(&duhamel)?,
        shifted: audit(&shifted)?,
        max_discrepancy,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scenario {
    /// Forcing of one sign on every interior vertex.
    Uniform,
    /// Forcing at the leftmost interior vertex only.
    PointSource,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRecord {
    pub scenario: Scenario,
    pub t: f64,
    pub vertex: String,
    /// Breadth-first distance from the source within Ω°.
    pub distance: usize,
    pub u: f64,
    pub du: f64,
    /// Leading Taylor term of the probe value for the point source (see
    /// [`propagation_experiment`]); zero for the uniform case.
    pub leading_term: f64,
    pub below_floor: bool,
    pub positive_u: bool,
    pub positive_du: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropagationReport {
    pub interior_len: usize,
    pub amplitude: f64,
    pub source: String,
    pub probe: String,
    pub probe_distance: usize,
    pub records: Vec<ProbeRecord>,
    pub variant: FormulaVariant,
    /// Uniform forcing: u(t,x) > 0 at every interior vertex for every t > 0.
    pub uniform_positive: bool,
    /// Uniform forcing: u(t,x) ≠ 0 at every interior vertex for every t > 0.
    pub uniform_nonzero: bool,
    /// Point source: the probe value is nonzero at every resolvable t > 0.
    pub point_source_nonzero: bool,
}

impl PropagationReport {
    pub fn probe_value(&self, t: f64) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.scenario == Scenario::PointSource && r.t == t)
            .map(|r| r.u)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, i| a * i as f64)
}

/// Path with `n_interior` interior vertices, one boundary vertex at each
/// end of Ω and one exterior vertex beyond each, under the normalized
/// measure μ = m.
pub fn propagation_domain(n_interior: usize) -> Result<Arc<DirichletDomain>> {
    if n_interior == 0 {
        return Err(Error::InvalidArgument(
            "propagation path needs an interior vertex".into(),
        ));
    }
    let graph = Arc::new(path_graph(n_interior + 4, Measure::Normalized)?);
    let omega: Vec<usize> = (1..n_interior + 3).collect();
    Ok(Arc::new(DirichletDomain::split(graph, &omega)?))
}

/// Runs the uniform and point-source scenarios with g = h = 0 and a
/// time-constant forcing of the given amplitude, evaluated with the chosen
/// modal formula.
///
/// From rest the source value grows like amplitude·t²/2 (Duhamel) or
/// −amplitude·t (shifted, whose initial velocity is −f(0)), and each edge of
/// the path costs one application of Δ. The probe at distance d therefore
/// starts as |amplitude|·κ·t^(2d+k)/(2d+k)! with k = 2 or 1 and
/// κ = Π ω(x_{j−1}, x_j)/μ(x_j) along the path. A probe whose leading term
/// is below 10³·ε·‖u‖∞ cannot be resolved and is flagged instead of checked.
pub fn propagation_experiment(
    n_interior: usize,
    amplitude: f64,
    times: &[f64],
    variant: FormulaVariant,
) -> Result<PropagationReport> {
    if amplitude == 0.0 {
        return Err(Error::InvalidArgument("source amplitude must be nonzero".into()));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidArgument(format!("probe time {t} is negative")));
    }
    let domain = propagation_domain(n_interior)?;
    let graph = domain.graph();
    let interior = domain.interior();
    let (source, probe) = (interior[0], interior[interior.len() - 1]);
    let mut member = vec![false; graph.len()];
    for &x in interior {
        member[x] = true;
    }
    let distances = graph.bfs_distances(source, &member);
    // Interior slots run along the path from source to probe.
    let coupling: f64 = interior
        .windows(2)
        .map(|w| {
            let (_, weight) = graph
                .neighbors(w[0])
                .iter()
                .find(|(y, _)| *y == w[1])
                .expect("path edge");
            weight / graph.mu(w[1])
        })
        .product();
    let order = match variant {
        FormulaVariant::Duhamel => 2,
        FormulaVariant::Shifted => 1,
    };
    let zero = vec![0.0; n_interior];

    let uniform = WaveProblem::new(
        domain.clone(),
        zero.clone(),
        zero.clone(),
        Forcing::new(vec![ForcingTerm {
            amplitude: vec![amplitude; n_interior],
            profile: TimeProfile::Constant(1.0),
        }]),
    )?;
    let mut point = zero.clone();
    point[0] = amplitude;
    let point_source = WaveProblem::new(
        domain.clone(),
        zero.clone(),
        zero,
        Forcing::new(vec![ForcingTerm {
            amplitude: point,
            profile: TimeProfile::Constant(1.0),
        }]),
    )?;
    let sol_a = SpectralSolution::new(&uniform, variant)?;
    let sol_b = SpectralSolution::with_spectrum(&point_source, sol_a.spectrum().clone(), variant)?;

    let mut records = Vec::new();
    let mut uniform_positive = true;
    let mut uniform_nonzero = true;
    let mut point_source_nonzero = true;
    for &t in times {
        let s = sol_a.state(t)?;
        for (slot, &x) in interior.iter().enumerate() {
            let (u, du) = (s.u[slot], s.du[slot]);
            let (positive_u, positive_du) = (u > 0.0, du > 0.0);
            if t > 0.0 {
                uniform_positive &= positive_u;
                uniform_nonzero &= u != 0.0;
            }
            records.push(ProbeRecord {
                scenario: Scenario::Uniform,
                t,
                vertex: graph.id(x).to_string(),
                distance: distances[x].unwrap_or(usize::MAX),
                u,
                du,
                leading_term: 0.0,
                below_floor: false,
                positive_u,
                positive_du,
            });
        }

        let s = sol_b.state(t)?;
        let slot = interior.len() - 1;
        let d = distances[probe].expect("path interior is connected");
        let leading_term = t.powi((2 * d + order) as i32) / factorial(2 * d + order) * amplitude.abs() * coupling;
        let below_floor = leading_term < FLOOR_FACTOR * f64::EPSILON * norm_inf(&s.u);
        let (u, du) = (s.u[slot], s.du[slot]);
        if t > 0.0 && !below_floor {
            point_source_nonzero &= u != 0.0;
        }
        records.push(ProbeRecord {
            scenario: Scenario::PointSource,
            t,
            vertex: graph.id(probe).to_string(),
            distance: d,
            u,
            du,
            leading_term,
            below_floor,
            positive_u: u > 0.0,
            positive_du: du > 0.0,
        });
    }

    Ok(PropagationReport {
        interior_len: n_interior,
        amplitude,
        source: graph.id(source).to_string(),
        probe: graph.id(probe).to_string(),
        probe_distance: distances[probe].expect("path interior is connected"),
        variant,
        records,
        uniform_positive,
        uniform_nonzero,
        point_source_nonzero,
    })
}

/// Sup-norm distance between a Rothe run and the Duhamel modal solution at
/// the run's grid times.
pub fn rothe_spectral_gap(problem: &WaveProblem, horizon: f64, steps: usize) -> Result<f64> {
    let run = solve_rothe(problem, horizon, steps)?;
    let sol = SpectralSolution::new(problem, FormulaVariant::Duhamel)?;
    (0..=steps).try_fold(0.0_f64, |m, i| {
        Ok(m.max(sup_diff(run.level(i), &sol.state(run.time(i))?.u)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_domain(n_interior: usize) -> Arc<DirichletDomain> {
        let g = Arc::new(path_graph(n_interior + 4, Measure::Unit).unwrap());
        let omega: Vec<usize> = (1..n_interior + 3).collect();
        Arc::new(DirichletDomain::split(g, &omega).unwrap())
    }

    fn constant_forcing(n: usize, c: f64) -> Forcing {
        Forcing::new(vec![ForcingTerm {
            amplitude: vec![c; n],
            profile: TimeProfile::Constant(1.0),
        }])
    }

    #[test]
    fn zero_problem_converges_exactly() {
        let p = WaveProblem::new(path_domain(2), vec![0.0; 2], vec![0.0; 2], Forcing::zero()).unwrap();
        let r = convergence_study(&p, 1.0, &[10, 20]).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.orders, vec![None]);
    }

    #[test]
    fn single_vertex_convergence_order() {
        let p = WaveProblem::new(path_domain(1), vec![1.0], vec![0.0], Forcing::zero()).unwrap();
        let r = convergence_study(&p, 1.0, &[125, 250, 500]).unwrap();
        assert!(r.strictly_decreasing());
        assert!(r.min_order().unwrap() >= 0.8);
    }

    #[test]
    fn forced_two_vertex_convergence() {
        let p = WaveProblem::new(path_domain(2), vec![0.0; 2], vec![0.0; 2], constant_forcing(2, -1.0)).unwrap();
        let r = convergence_study(&p, 1.0, &[50, 100, 200]).unwrap();
        assert!(r.strictly_decreasing());
    }

    #[test]
    fn rejects_unsorted_steps() {
        let p = WaveProblem::new(path_domain(1), vec![1.0], vec![0.0], Forcing::zero()).unwrap();
        assert!(convergence_study(&p, 1.0, &[20, 10]).is_err());
    }

    #[test]
    fn single_vertex_energy_is_two() {
        let p = WaveProblem::new(path_domain(1), vec![1.0], vec![0.0], Forcing::zero()).unwrap();
        let times: Vec<f64> = (0..100).map(|k| 0.1 * k as f64).collect();
        let d = energy_drift(&p, &times).unwrap();
        assert!((d.e0 - 2.0).abs() < 1e-14);
        assert!(d.passes());
    }

    #[test]
    fn energy_requires_zero_forcing() {
        let p = WaveProblem::new(path_domain(1), vec![1.0], vec![0.0], constant_forcing(1, 1.0)).unwrap();
        assert!(matches!(energy_drift(&p, &[1.0]), Err(Error::NonzeroForcing)));
    }

    #[test]
    fn zero_data_has_zero_energy() {
        let p = WaveProblem::new(path_domain(3), vec![0.0; 3], vec![0.0; 3], Forcing::zero()).unwrap();
        let d = energy_drift(&p, &[0.5, 3.0]).unwrap();
        assert!(d.samples.iter().all(|s| s.spatial == 0.0 && s.modal == 0.0));
    }

    #[test]
    fn uniqueness_on_forced_path() {
        let p = WaveProblem::new(
            path_domain(3),
            vec![0.1, 0.5, -0.2],
            vec![0.0; 3],
            constant_forcing(3, 1.0),
        )
        .unwrap();
        assert!(uniqueness_check(&p, 1.0, 50).unwrap().passes());
    }

    #[test]
    fn propagation_scenarios() {
        let times = [0.0, 0.05, 0.1, 0.2];
        let r = propagation_experiment(5, -1.0, &times, FormulaVariant::Duhamel).unwrap();
        // u ≈ f·t²/2 for small t: same sign as the forcing, nonzero everywhere
        assert!(r.uniform_nonzero && !r.uniform_positive);
        assert!(r
            .records
            .iter()
            .filter(|x| x.scenario == Scenario::Uniform && x.t > 0.0)
            .all(|x| x.u < 0.0));
        let p = propagation_experiment(5, -1.0, &times, FormulaVariant::Shifted).unwrap();
        assert!(p.uniform_positive);
        assert_eq!(r.probe_distance, 4);
        assert_eq!(r.source, "v3");
        assert_eq!(r.probe, "v7");
        assert!(r.records.iter().filter(|x| x.t == 0.0).all(|x| x.u == 0.0));
    }

    #[test]
    fn probe_follows_its_leading_term() {
        for variant in [FormulaVariant::Duhamel, FormulaVariant::Shifted] {
            let r = propagation_experiment(3, -1.0, &[0.02, 0.05], variant).unwrap();
            for x in r.records.iter().filter(|x| x.scenario == Scenario::PointSource) {
                assert!(!x.below_floor);
                let ratio = x.u.abs() / x.leading_term;
                assert!((ratio - 1.0).abs() < 0.01, "{variant:?} t={} ratio {ratio}", x.t);
            }
        }
    }

    #[test]
    fn spectral_residual_and_rothe_residual() {
        let p = WaveProblem::new(
            path_domain(3),
            vec![0.2, 0.0, 0.1],
            vec![0.0, 1.0, 0.0],
            constant_forcing(3, -1.0),
        )
        .unwrap();
        let op = assemble(p.domain());
        let sol = SpectralSolution::new(&p, FormulaVariant::Duhamel).unwrap();
        let traj = SampledSpectral {
            solution: &sol,
            times: vec![0.0, 0.3, 1.7],
        };
        assert!(residual(&p, &op.matrix, &traj).unwrap().passes(SPECTRAL_RESIDUAL_TOL));
        let run = solve_rothe(&p, 1.0, 30).unwrap();
        assert!(residual(&p, &op.matrix, &run).unwrap().passes(1e-10));
    }

    #[test]
    fn audit_separates_variants() {
        let p = WaveProblem::new(path_domain(2), vec![0.0; 2], vec![0.0; 2], constant_forcing(2, -1.0)).unwrap();
        let a = formula_audit(&p, &[0.0, 0.5, 1.0]).unwrap();
        assert!(a.duhamel.passes_suite);
        assert!(!a.shifted.passes_suite);
        assert!(a.shifted.shifted_velocity_error < 1e-12);
        assert!((a.shifted.velocity_error - 1.0).abs() < 1e-12);
    }
}
