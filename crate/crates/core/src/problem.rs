//! The initial-boundary-value problem: forcing, initial data and the
//! Hölder-in-time hypothesis on the forcing.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{DirichletDomain, VertexFunction};
use crate::operators::{check_len, interior_norm_sq};

/// Number of grid points used for the empirical sup of ‖f(t,·)‖².
pub const C_TILDE_GRID: usize = 1024;

/// Scalar function of time multiplying a spatial amplitude.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeProfile {
    Constant(f64),
    /// Coefficients in ascending powers of t.
    Polynomial(Vec<f64>),
    /// amplitude · sin(frequency · t + phase).
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Linear interpolation through `(times[i], values[i])`.
    Samples {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

impl TimeProfile {
    pub fn samples(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidProfile(format!(
                "{} sample times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidProfile("need at least two samples".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProfile("sample times must be strictly increasing".into()));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite sample".into()));
        }
        Ok(TimeProfile::Samples { times, values })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(match self {
            TimeProfile::Constant(c) => *c,
            TimeProfile::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &a| acc * t + a),
            TimeProfile::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).sin(),
            TimeProfile::Samples { times, values } => {
                let (start, end) = (times[0], times[times.len() - 1]);
                if !(t >= start && t <= end) {
                    return Err(Error::OutsideSamples { t, start, end });
                }
                let i = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1);
                let (t0, t1) = (times[i - 1], times[i]);
                let (v0, v1) = (values[i - 1], values[i]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        })
    }

    pub fn is_time_constant(&self) -> bool {
        match self {
            TimeProfile::Constant(_) => true,
            TimeProfile::Polynomial(c) => c.iter().skip(1).all(|&a| a == 0.0),
            TimeProfile::Sinusoid {
                amplitude, frequency, ..
            } => *amplitude == 0.0 || *frequency == 0.0,
            TimeProfile::Samples { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TimeProfile::Constant(c) => *c == 0.0,
            TimeProfile::Polynomial(c) => c.iter().all(|&a| a == 0.0),
            TimeProfile::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => *amplitude == 0.0 || (*frequency == 0.0 && phase.sin() == 0.0),
            TimeProfile::Samples { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// Upper bound on |p'(t)| for t ∈ [0, horizon].
    pub fn lipschitz_bound(&self, horizon: f64) -> f64 {
        match self {
            TimeProfile::Constant(_) => 0.0,
            TimeProfile::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| k as f64 * a.abs() * horizon.powi(k as i32 - 1))
                .sum(),
            TimeProfile::Sinusoid {
                amplitude, frequency, ..
            } => (amplitude * frequency).abs(),
            TimeProfile::Samples { times, values } => times
                .windows(2)
                .zip(values.windows(2))
                .map(|(t, v)| ((v[1] - v[0]) / (t[1] - t[0])).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Checks that the profile can be evaluated on all of [0, horizon].
    pub fn check_horizon(&self, horizon: f64) -> Result<()> {
        if let TimeProfile::Samples { times, .. } = self {
            let (start, end) = (times[0], times[times.len() - 1]);
            for t in [0.0, horizon] {
                if !(t >= start && t <= end) {
                    return Err(Error::OutsideSamples { t, start, end });
                }
            }
        }
        Ok(())
    }
}

/// One separable forcing term amplitude(x) · profile(t).
#[derive(Clone, Debug, PartialEq)]
pub struct ForcingTerm {
    /// Interior-ordered amplitude.
    pub amplitude: Vec<f64>,
    pub profile: TimeProfile,
}

/// f(t,x) = Σ_j amplitude_j(x) · profile_j(t) on Ω°.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Forcing {
    terms: Vec<ForcingTerm>,
}

impl Forcing {
    pub fn new(terms: Vec<ForcingTerm>) -> Self {
        Forcing { terms }
    }

    pub fn zero() -> Self {
        Forcing::default()
    }

    pub fn terms(&self) -> &[ForcingTerm] {
        &self.terms
    }

    /// Term list of `self` followed by that of `other`.
    pub fn concat(&self, other: &Forcing) -> Forcing {
        Forcing {
            terms: self.terms.iter().chain(&other.terms).cloned().collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.profile.is_zero() || t.amplitude.iter().all(|&a| a == 0.0))
    }

    pub fn is_time_constant(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.profile.is_time_constant() || t.amplitude.iter().all(|&a| a == 0.0))
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        out.iter_mut().for_each(|v| *v = 0.0);
        for term in &self.terms {
            let p = term.profile.eval(t)?;
            for (o, a) in out.iter_mut().zip(&term.amplitude) {
                *o += a * p;
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64, n: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; n];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }
}

/// The Hölder hypothesis ‖f(t)−f(s)‖ ≤ c|t−s|^α together with the bound
/// sup_{[0,T]} ‖f(t)‖² ≤ c̃(T).
#[derive(Clone, Debug, PartialEq)]
pub struct HolderCondition {
    pub alpha: f64,
    pub c: f64,
    pub c_tilde: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct WaveProblem {
    domain: Arc<DirichletDomain>,
    forcing: Forcing,
    g: Vec<f64>,
    h: Vec<f64>,
    holder: Option<HolderCondition>,
}

impl WaveProblem {
    /// `g`, `h` and every forcing amplitude are interior-ordered.
    pub fn new(domain: Arc<DirichletDomain>, g: Vec<f64>, h: Vec<f64>, forcing: Forcing) -> Result<Self> {
        check_len(&domain, &g)?;
        check_len(&domain, &h)?;
        for term in forcing.terms() {
            check_len(&domain, &term.amplitude)?;
        }
        Ok(WaveProblem {
            domain,
            forcing,
            g,
            h,
            holder: None,
        })
    }

    pub fn with_holder(mut self, holder: HolderCondition) -> Result<Self> {
        if !(holder.alpha > 0.0 && holder.c > 0.0) {
            return Err(Error::InvalidArgument(
                "Hölder exponent and constant must be positive".into(),
            ));
        }
        self.holder = Some(holder);
        Ok(self)
    }

    pub fn domain(&self) -> &DirichletDomain {
        &self.domain
    }

    pub fn domain_arc(&self) -> &Arc<DirichletDomain> {
        &self.domain
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn holder(&self) -> Option<&HolderCondition> {
        self.holder.as_ref()
    }

    pub fn n(&self) -> usize {
        self.domain.interior_len()
    }

    pub fn g_function(&self) -> VertexFunction {
        VertexFunction::on_interior(&self.domain, &self.g).expect("validated")
    }

    pub fn h_function(&self) -> VertexFunction {
        VertexFunction::on_interior(&self.domain, &self.h).expect("validated")
    }

    /// f(t, ·) in interior order.
    pub fn forcing_at(&self, t: f64) -> Result<Vec<f64>> {
        self.forcing.eval(t, self.n())
    }

    /// Rejects horizons over which a sampled profile cannot be evaluated.
    pub fn check_horizon(&self, horizon: f64) -> Result<()> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        self.forcing
            .terms()
            .iter()
            .try_for_each(|t| t.profile.check_horizon(horizon))
    }

    /// Same domain and forcing with every datum set to zero.
    pub fn zeroed(&self) -> WaveProblem {
        WaveProblem {
            domain: self.domain.clone(),
            forcing: Forcing::zero(),
            g: vec![0.0; self.n()],
            h: vec![0.0; self.n()],
            holder: None,
        }
    }

    /// Empirical sup of ‖f(t,·)‖²_{L²(Ω°)} over an evenly spaced grid on
    /// [0, horizon] plus any `extra` times.
    pub fn empirical_c_tilde(&self, horizon: f64, extra: &[f64]) -> Result<f64> {
        let mu = self.domain.interior_measure();
        let mut buf = vec![0.0; self.n()];
        let mut sup: f64 = 0.0;
        let grid = (0..C_TILDE_GRID).map(|k| horizon * k as f64 / (C_TILDE_GRID - 1) as f64);
        for t in grid.chain(extra.iter().copied()) {
            self.forcing.eval_into(t, &mut buf)?;
            sup = sup.max(interior_norm_sq(&mu, &buf));
        }
        Ok(sup)
    }

    /// c̃(T): the supplied value if any, otherwise the empirical sup.
    pub fn c_tilde(&self, horizon: f64, extra: &[f64]) -> Result<f64> {
        match self.holder.as_ref().and_then(|h| h.c_tilde) {
            Some(c) => Ok(c),
            None => self.empirical_c_tilde(horizon, extra),
        }
    }

    /// Explicit Lipschitz constant of t ↦ f(t,·) in L²(Ω°) on [0, horizon]:
    /// Σ_j sup|p_j'| · ‖amplitude_j‖.
    pub fn lipschitz_constant(&self, horizon: f64) -> f64 {
        let mu = self.domain.interior_measure();
        self.forcing
            .terms()
            .iter()
            .map(|t| t.profile.lipschitz_bound(horizon) * interior_norm_sq(&mu, &t.amplitude).sqrt())
            .sum()
    }
}

/// f(t, x) at vertex index `x`; zero off the interior.
pub fn eval_forcing(problem: &WaveProblem, t: f64, x: usize) -> Result<f64> {
    let domain = problem.domain();
    if x >= domain.graph().len() {
        return Err(Error::UnknownVertex(x.to_string()));
    }
    let Some(slot) = domain.interior_slot(x) else {
        return Ok(0.0);
    };
    problem
        .forcing
        .terms()
        .iter()
        .try_fold(0.0, |acc, term| Ok(acc + term.amplitude[slot] * term.profile.eval(t)?))
}

#[derive(Clone, Debug, PartialEq)]
pub enum HolderFit {
    /// f does not depend on t; the hypothesis holds for every α.
    TimeConstant,
    Fitted {
        alpha: f64,
        c: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderEstimate {
    pub fit: HolderFit,
    /// sup over the sample grid of ‖f(t,·)‖².
    pub c_tilde: f64,
}

/// Least-squares fit of log‖f(t)−f(s)‖ against log|t−s| over all pairs of
/// `samples` evenly spaced times in [0, horizon].
pub fn holder_estimate(problem: &WaveProblem, horizon: f64, samples: usize) -> Result<HolderEstimate> {
    if samples < 16 {
        return Err(Error::InvalidArgument(format!(
            "Hölder estimate needs at least 16 samples, got {samples}"
        )));
    }
    problem.check_horizon(horizon)?;
    let mu = problem.domain().interior_measure();
    let times: Vec<f64> = (0..samples)
        .map(|k| horizon * k as f64 / (samples - 1) as f64)
        .collect();
    let values = times
        .iter()
        .map(|&t| problem.forcing_at(t))
        .collect::<Result<Vec<_>>>()?;
    let c_tilde = values.iter().map(|v| interior_norm_sq(&mu, v)).fold(0.0, f64::max);
    let scale = c_tilde.sqrt();

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..samples {
        for j in i + 1..samples {
            let diff: Vec<f64> = values[i].iter().zip(&values[j]).map(|(a, b)| a - b).collect();
            let d = interior_norm_sq(&mu, &diff).sqrt();
            if d > 1e-14 * scale.max(f64::MIN_POSITIVE) {
                xs.push((times[j] - times[i]).ln());
                ys.push(d.ln());
            }
        }
    }
    if problem.forcing().is_time_constant() || xs.len() < 2 {
        return Ok(HolderEstimate {
            fit: HolderFit::TimeConstant,
            c_tilde,
        });
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let alpha = sxy / sxx;
    let c = (my - alpha * mx).exp();
    Ok(HolderEstimate {
        fit: HolderFit::Fitted { alpha, c },
        c_tilde,
    })
}
