//! Command-line front end.
//!
//! Without `--out` each command prints its JSON summary to stdout. With
//! `--out DIR` it writes the summary and its CSV artifacts into `DIR`.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    convergence_study, energy_drift, formula_audit, propagation_experiment, residual, uniqueness_check,
    SampledSpectral, Scenario, INITIAL_TOL, SPECTRAL_RESIDUAL_TOL,
};
use crate::error::{Error, Result};
use crate::graph::{Measure, VertexFunction};
use crate::io::{format_f64, load_problem, write_json, write_rothe_csv, write_solution_csv, write_spectrum_csv};
use crate::operators::{assemble, green_residual};
use crate::problem::WaveProblem;
use crate::rothe::{solve_rothe_with, verify_bounds, verify_interpolant_gaps, AprioriBounds, SCHEME_TOL};
use crate::spectral::{energy_of_state, FormulaVariant, SpectralSolution};

#[derive(Debug, Parser)]
#[command(
    name = "graphwave",
    version,
    about = "Wave equation on weighted graphs with a Dirichlet boundary"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: RunArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Eigenvalues and μ-orthonormal eigenfunctions of −Δ_Ω.
    Spectrum,
    /// Rothe time stepping with a-priori bound checks.
    SolveRothe,
    /// Exact modal solution at the requested times.
    SolveSpectral,
    /// Both solvers and both modal formulas side by side.
    Compare,
    /// Energy of the modal solution over time (requires f = 0).
    Energy,
    /// Uniform and point-source forcing on a path.
    Propagation,
    /// Rothe error against the modal solution for several step counts.
    Convergence,
    /// Invariant suite on one problem file or every `*.json` in a directory.
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Unit,
    Normalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Duhamel,
    Shifted,
}

impl From<VariantArg> for FormulaVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Duhamel => FormulaVariant::Duhamel,
            VariantArg::Shifted => FormulaVariant::Shifted,
        }
    }
}

#[derive(Clone, Debug, clap::Args)]
pub struct RunArgs {
    /// Problem file (a directory of problem files for `verify`).
    #[arg(long, global = true)]
    pub problem: Option<PathBuf>,
    /// Time horizon.
    #[arg(long = "T", global = true, default_value_t = 1.0)]
    pub horizon: f64,
    /// Number of time steps (interior path length for `propagation`).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Comma-separated step counts for `convergence`.
    #[arg(long = "n-list", global = true, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Comma-separated evaluation times.
    #[arg(long, global = true, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum, default_value = "duhamel")]
    pub variant: VariantArg,
    /// Replace the graph's measure.
    #[arg(long, global = true, value_enum)]
    pub measure: Option<MeasureArg>,
    /// Source amplitude for `propagation`.
    #[arg(long, global = true, default_value_t = -1.0, allow_negative_numbers = true)]
    pub amplitude: f64,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_STEPS: usize = 1000;
pub const DEFAULT_N_LIST: [usize; 5] = [125, 250, 500, 1000, 2000];
pub const DEFAULT_PROPAGATION_TIMES: [f64; 4] = [0.05, 0.1, 0.2, 0.25];
pub const VERIFY_STEPS: usize = 200;

/// Process exit status for a finished command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    AssertionFailed,
}

/// 0 on success, 1 on assertion or solver failure, 2 on input errors.
pub fn exit_code(result: &Result<Outcome>) -> u8 {
    match result {
        Ok(Outcome::Passed) => 0,
        Ok(Outcome::AssertionFailed) => 1,
        Err(e) if e.is_input_error() => 2,
        Err(_) => 1,
    }
}

impl RunArgs {
    fn measure(&self) -> Option<Measure> {
        self.measure.map(|m| match m {
            MeasureArg::Unit => Measure::Unit,
            MeasureArg::Normalized => Measure::Normalized,
        })
    }

    fn problem_path(&self) -> Result<&Path> {
        self.problem
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("--problem is required".into()))
    }

    fn load(&self) -> Result<WaveProblem> {
        load_problem(self.problem_path()?, self.measure())
    }

    fn horizon(&self) -> Result<f64> {
        if self.horizon > 0.0 && self.horizon.is_finite() {
            Ok(self.horizon)
        } else {
            Err(Error::InvalidArgument(format!(
                "--T must be positive, got {}",
                self.horizon
            )))
        }
    }

    fn steps(&self, default: usize) -> Result<usize> {
        match self.n {
            Some(0) => Err(Error::InvalidArgument("--n must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(default),
        }
    }

    /// `--times` if given, else n+1 evenly spaced times on [0, T].
    fn times(&self, default_samples: usize) -> Result<Vec<f64>> {
        match &self.times {
            Some(ts) => {
                if let Some(t) = ts.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
                    return Err(Error::InvalidArgument(format!(
                        "time {t} must be finite and non-negative"
                    )));
                }
                Ok(ts.clone())
            }
            None => {
                let (t, n) = (self.horizon()?, self.steps(default_samples)?);
                Ok((0..=n).map(|k| t * k as f64 / n as f64).collect())
            }
        }
    }
}

/// Collects named outputs, then writes them to `--out` or the summary to
/// stdout.
struct Artifacts {
    out: Option<PathBuf>,
}

impl Artifacts {
    fn new(out: Option<PathBuf>) -> Result<Self> {
        if let Some(dir) = &out {
            fs::create_dir_all(dir)?;
        }
        Ok(Artifacts { out })
    }

    fn csv(&self, name: &str, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let Some(dir) = &self.out else { return Ok(()) };
        let mut w = BufWriter::new(File::create(dir.join(name))?);
        write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn summary<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        match &self.out {
            Some(dir) => {
                let mut w = BufWriter::new(File::create(dir.join(name))?);
                write_json(&mut w, value)?;
                w.flush()?;
            }
            None => write_json(io::stdout().lock(), value)?,
        }
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let args = &cli.args;
    let out = Artifacts::new(args.out.clone())?;
    match cli.command {
        Command::Spectrum => spectrum(args, &out),
        Command::SolveRothe => solve_rothe_cmd(args, &out),
        Command::SolveSpectral => solve_spectral_cmd(args, &out),
        Command::Compare => compare(args, &out),
        Command::Energy => energy(args, &out),
        Command::Propagation => propagation(args, &out),
        Command::Convergence => convergence(args, &out),
        Command::Verify => verify(args, &out),
    }
}

#[derive(Serialize)]
struct SpectrumSummary<'a> {
    interior: Vec<&'a str>,
    eigenvalues: &'a [f64],
    lambda_min: f64,
}

fn spectrum(args: &RunArgs, out: &Artifacts) -> Result<Outcome> {
    let problem = args.load()?;
    let sol = SpectralSolution::new(&problem, FormulaVariant::Duhamel)?;
    let s = sol.spectrum();
    out.csv("spectrum.csv", |w| write_spectrum_csv(w, problem.domain(), s))?;
    out.summary(
        "spectrum.json",
        &SpectrumSummary {
            interior: problem.domain().interior_ids().collect(),
            eigenvalues: s.eigenvalues(),
            lambda_min: s.lambda_min(),
        },
    )?;
    Ok(Outcome::Passed)
}

#[derive(Serialize)]
struct RotheSummary {
    horizon: f64,
    steps: usize,
    step: f64,
    final_u: Vec<f64>,
    scheme_residual: f64,
    scheme_scale: f64,
    bounds: Option<AprioriBounds>,
    bound_violations: Option<usize>,
    max_bound_ratio: Option<f64>,
    gap_violations: Option<usize>,
}

fn solve_rothe_cmd(args: &RunArgs, out: &Artifacts) -> Result<Outcome> {
    let problem = args.load()?;
    let (horizon, n) = (args.horizon()?, args.steps(DEFAULT_STEPS)?);
    let op = assemble(problem.domain());
    let run = solve_rothe_with(&problem, &op, horizon, n)?;
    let res = run.scheme_residual(&op);
    let mut summary = RotheSummary {
        horizon,
        steps: n,
        step: run.step(),
        final_u: run.level(n).to_vec(),
        scheme_residual: res.max_abs,
        scheme_scale: res.scale,
        bounds: None,
        bound_violations: None,
        max_bound_ratio: None,
        gap_violations: None,
    };
    if run.step() <= 1.0 {
        let bounds = AprioriBounds::for_run(&problem, &run)?;
        let report = verify_bounds(&run, &bounds)?;
        let gaps = verify_interpolant_gaps(&run, &bounds)?;
        summary.bounds = Some(bounds);
        summary.bound_violations = Some(report.violations.len());
        summary.max_bound_ratio = Some(report.max_ratio());
        summary.gap_violations = Some(gaps.violations.len());
    }
    out.csv("rothe.csv", |w| write_rothe_csv(w, &run))?;
    out.summary("rothe.json", &summary)?;
    Ok(Outcome::Passed)
}

#[derive(Serialize)]
struct SolutionSummary<'a> {
    variant: FormulaVariant,
    interior: Vec<&'a str>,
    times: Vec<f64>,
    u: Vec<Vec<f64>>,
    du: Vec<Vec<f64>>,
}

fn solve_spectral_cmd(args: &RunArgs, out: &Artifacts) -> Result<Outcome> {
    let problem = args.load()?;
    let times = args.times(100)?;
    for &t in &times {
        problem.check_horizon(t.max(f64::MIN_POSITIVE))?;
    }
    let sol = SpectralSolution::new(&problem, args.variant.into())?;
    let states = times.iter().map(|&t| sol.state(t)).collect::<Result<Vec<_>>>()?;
    out.csv("solution.csv", |w| write_solution_csv(w, problem.domain(), &states))?;
    out.summary(
        "solution.json",
        &SolutionSummary {
            variant: sol.variant(),
            interior: problem.domain().interior_ids().collect(),
            times,
            u: states.iter().map(|s| s.u.clone()).collect(),
            du: states.iter().map(|s| s.du.clone()).collect(),
        },
    )?;
    Ok(Outcome::Passed)
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn compare(args: &RunArgs, out: &Artifacts) -> Result<Outcome> {
    let problem = args.load()?;
    let (horizon, n) = (args.horizon()?, args.steps(DEFAULT_STEPS)?);
    let op = assemble(problem.domain());
    let run = solve_rothe_with(&problem, &op, horizon, n)?;
    let duhamel = SpectralSolution::new(&problem, FormulaVariant::Duhamel)?;
    let shifted = SpectralSolution::with_spectrum(&problem, duhamel.spectrum().clone(), FormulaVariant::Shifted)?;
    let times = run.times();

    let mut rows = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let (d, p) = (duhamel.state(t)?, shifted.state(t)?);
        rows.push((t, sup_diff(run.level(i), &d.u), sup_diff(&p.u, &d.u)));
    }
    out.csv("compare.csv", |w| {
        writeln!(w, "t,rothe_vs_duhamel,shifted_vs_duhamel")?;
        for (t, a, b) in &rows {
            writeln!(w, "{},{},{}", format_f64(*t), format_f64(*a), format_f64(*b))?;
        }
        Ok(())
    })?;

    #[derive(Serialize)]
    struct CompareSummary {
        horizon: f64,
        steps: usize,
        max_rothe_vs_duhamel: f64,
        max_shifted_vs_duhamel: f64,
        audit: crate::analysis::FormulaAudit,
    }
    let audit = formula_audit(&problem, &times)?;
    let passed = audit.duhamel.passes_suite;
    out.summary(
        "compare.json",
        &CompareSummary {
            horizon,
            steps: n,
            max_rothe_vs_duhamel: rows.iter().map(|r| r.1).fold(0.0, f64::max),
            max_shifted_vs_duhamel: rows.iter().map(|r| r.2).fold(0.0, f64::max),
            audit,
        },
    )?;
    Ok(if passed {
        Outcome::Passed
    } else {
        Outcome::AssertionFailed
    })
}

fn energy(args: &RunArgs, out: &Artifacts) -> Result<Outcome> {
    let problem = args.load()?;
    let times = match &args.times {
        Some(_) => args.times(0)?,
        None => (0..100).map(|k| 10.0 * k as f64 / 99.0).collect(),
    };
    let drift = energy_drift(&problem, &times)?;
    out.csv("energy.csv", |w| {
        writeln!(w, "t,spatial,modal")?;
        for s in &drift.samples {
            writeln!(
                w,
                "{},{},{}",
                format_f64(s.t),
                format_f64(s.spatial),
                format_f64(s.modal)
            )?;
        }
        Ok(())
    })?;
    out.summary("energy.json", &drift)?;
    Ok(if drift.passes() {
        Outcome::Passed
    } else {
        Outcome::AssertionFailed
    })
}

fn propagation(args: &RunArgs, out: &Artifacts) -> Result<Outcome> {
    let n = args.steps(5)?;
    let times = match &args.times {
        Some(_) => args.times(0)?,
        None => DEFAULT_PROPAGATION_TIMES.to_vec(),
    };
    let report = propagation_experiment(n, args.amplitude, &times, args.variant.into())?;
    out.csv("propagation.csv", |w| {
        writeln!(w, "scenario,t,vertex,distance,u,du,leading_term,below_floor")?;
        for r in &report.records {
            let scenario = match r.scenario {
                Scenario::Uniform => "uniform",
                Scenario::PointSource => "point",
            };
            writeln!(
                w,
                "{scenario},{},{},{},{},{},{},{}",
                format_f64(r.t),
                r.vertex,
                r.distance,
                format_f64(r.u),
                format_f64(r.du),
                format_f64(r.leading_term),
                r.below_floor
            )?;
        }
        Ok(())
    })?;
    out.summary("propagation.json", &report)?;
    Ok(Outcome::Passed)
}

fn convergence(args: &RunArgs, out: &Artifacts) -> Result<Outcome> {
    let problem = args.load()?;
    let steps = args.n_list.clone().unwrap_or_else(|| DEFAULT_N_LIST.to_vec());
    let report = convergence_study(&problem, args.horizon()?, &steps)?;
    out.csv("convergence.csv", |w| {
        writeln!(w, "n,error,order")?;
        for (i, (n, e)) in report.steps.iter().zip(&report.errors).enumerate() {
            let order = match i.checked_sub(1).and_then(|j| report.orders[j]) {
                Some(o) => format_f64(o),
                None => String::new(),
            };
            writeln!(w, "{n},{},{order}", format_f64(*e))?;
        }
        Ok(())
    })?;
    out.summary("convergence.json", &report)?;
    Ok(Outcome::Passed)
}

/// One named assertion of the invariant suite.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, tolerance: f64) -> Self {
        Check {
            name,
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

/// Invariant suite for one problem: spectral structure, Green's identity on
/// the data, modal initial conditions and residual, the Rothe scheme
/// identity, a-priori bounds, interpolant gaps, uniqueness and, for f = 0,
/// energy conservation.
pub fn verify_problem(problem: &WaveProblem, horizon: f64, steps: usize) -> Result<Vec<Check>> {
    let domain = problem.domain();
    let op = assemble(domain);
    let sol = SpectralSolution::new(problem, FormulaVariant::Duhamel)?;
    let s = sol.spectrum();
    let mu = s.measure();
    let mut checks = Vec::new();

    let lambda_max = s.eigenvalues().last().copied().unwrap_or(1.0);
    let mut eig_res: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    for k in 0..s.len() {
        let phi = s.eigenfunction(k);
        let lphi = op.matrix.apply(phi);
        eig_res = eig_res.max(sup_diff(
            &lphi,
            &phi.iter().map(|p| s.eigenvalues()[k] * p).collect::<Vec<_>>(),
        ));
        for j in 0..s.len() {
            let ip: f64 = (0..phi.len()).map(|x| mu[x] * phi[x] * s.eigenfunction(j)[x]).sum();
            ortho = ortho.max((ip - if j == k { 1.0 } else { 0.0 }).abs());
        }
    }
    checks.push(Check::at_most("eigen_residual", eig_res / lambda_max, 1e-10));
    checks.push(Check::at_most("orthonormality", ortho, 1e-12));
    checks.push(Check {
        name: "positive_spectrum",
        value: s.lambda_min(),
        tolerance: 0.0,
        passed: s.lambda_min() > 0.0,
    });

    let (g, h) = (problem.g_function(), problem.h_function());
    let scale = |f: &VertexFunction| f.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let green_scale = (scale(&g) * scale(&h)).max(f64::MIN_POSITIVE) * domain.graph().d_mu()?;
    checks.push(Check::at_most(
        "green_identity",
        green_residual(domain, &g, &h).abs() / green_scale,
        1e-12,
    ));

    let s0 = sol.state(0.0)?;
    checks.push(Check::at_most(
        "initial_displacement",
        sup_diff(&s0.u, problem.g()),
        INITIAL_TOL,
    ));
    checks.push(Check::at_most(
        "initial_velocity",
        sup_diff(&s0.du, problem.h()),
        INITIAL_TOL,
    ));
    let sample_times: Vec<f64> = (0..=16).map(|k| horizon * k as f64 / 16.0).collect();
    let spec_res = residual(
        problem,
        &op.matrix,
        &SampledSpectral {
            solution: &sol,
            times: sample_times.clone(),
        },
    )?;
    checks.push(Check::at_most(
        "spectral_residual",
        spec_res.relative(),
        SPECTRAL_RESIDUAL_TOL,
    ));

    let run = solve_rothe_with(problem, &op, horizon, steps)?;
    checks.push(Check::at_most(
        "scheme_identity",
        run.scheme_residual(&op).relative(),
        SCHEME_TOL,
    ));
    if run.step() <= 1.0 {
        let bounds = AprioriBounds::for_run(problem, &run)?;
        let report = verify_bounds(&run, &bounds)?;
        checks.push(Check {
            name: "apriori_bounds",
            value: report.max_ratio(),
            tolerance: 1.0,
            passed: report.passed(),
        });
        let gaps = verify_interpolant_gaps(&run, &bounds)?;
        checks.push(Check {
            name: "interpolant_gaps",
            value: gaps.violations.len() as f64,
            tolerance: 0.0,
            passed: gaps.passed(),
        });
    }
    let uniq = uniqueness_check(problem, horizon, steps.min(VERIFY_STEPS))?;
    checks.push(Check {
        name: "uniqueness",
        value: uniq.diff_2n_4n,
        tolerance: uniq.diff_n_2n,
        passed: uniq.passes(),
    });

    if problem.forcing().is_zero() {
        let drift = energy_drift(problem, &sample_times)?;
        checks.push(Check::at_most("energy_drift", drift.relative_drift, 1e-10));
        checks.push(Check::at_most(
            "energy_modal_agreement",
            drift.max_spatial_modal_gap,
            1e-10,
        ));
        let e = energy_of_state(problem, &sol, &s0);
        checks.push(Check::at_most(
            "energy_initial",
            (e.spatial - e.modal).abs() / e.spatial.max(1.0),
            1e-10,
        ));
    }
    Ok(checks)
}

#[derive(Serialize)]
struct VerifyEntry {
    problem: String,
    passed: bool,
    checks: Vec<Check>,
}

/// Problem files under `path`: the file itself, or every `*.json` directly
/// inside the directory that has an `omega` field, sorted by name.
fn problem_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(path)? {
        let p = entry?.path();
        if p.extension().is_some_and(|e| e == "json") {
            let text = fs::read_to_string(&p)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            if value.get("omega").is_some() {
                files.push(p);
            }
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no problem files in {}",
            path.display()
        )));
    }
    Ok(files)
}

fn verify(args: &RunArgs, out: &Artifacts) -> Result<Outcome> {
    let (horizon, steps) = (args.horizon()?, args.steps(VERIFY_STEPS)?);
    let mut entries = Vec::new();
    for file in problem_files(args.problem_path()?)? {
        let problem = load_problem(&file, args.measure())?;
        let checks = verify_problem(&problem, horizon, steps)?;
        for c in checks.iter().filter(|c| !c.passed) {
            log::error!(
                "{}: {} = {:e} (tolerance {:e})",
                file.display(),
                c.name,
                c.value,
                c.tolerance
            );
        }
        entries.push(VerifyEntry {
            problem: file
                .file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
            passed: checks.iter().all(|c| c.passed),
            checks,
        });
    }
    let passed = entries.iter().all(|e| e.passed);
    out.summary("verify.json", &entries)?;
    Ok(if passed {
        Outcome::Passed
    } else {
        Outcome::AssertionFailed
    })
}
