//! Exact modal solution of the forced wave equation.
//!
//! With −Δ_Ω φ_k = λ_k φ_k and f = Σ b_k(t) φ_k, g = Σ g_k φ_k,
//! h = Σ h_k φ_k, the solution is u = Σ a_k(t) φ_k where each a_k solves
//! a'' + λ_k a = b_k. Two closed forms for a_k are provided:
//!
//! * [`FormulaVariant::Duhamel`]:
//!   a_k = g_k cos(ω t) + h_k sin(ω t)/ω + (1/ω)∫₀ᵗ sin(ω(t−s)) b_k(s) ds,
//!   with ω = √λ_k. It satisfies a_k(0) = g_k and a_k'(0) = h_k.
//! * [`FormulaVariant::Shifted`]: the same with h_k replaced by h_k − b_k(0)
//!   in the sine term. It still solves the modal ODE but its initial
//!   velocity is h_k − b_k(0); kept for the formula audit.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::convolution::convolve;
use crate::error::{Error, Result};
use crate::graph::DirichletDomain;
use crate::operators::{assemble, gradient_energy_interior, interior_inner, SymmetrizedOperator};
use crate::problem::{TimeProfile, WaveProblem};

/// Eigenvalues below this are treated as a missing boundary.
pub const MIN_EIGENVALUE: f64 = 1e-12;
/// Relative gap under which neighbouring eigenvalues are treated as tied.
const TIE_TOL: f64 = 1e-10;

/// Eigenpairs of −Δ_Ω, ascending, with μ-orthonormal eigenfunctions in
/// interior order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenfunctions: Vec<Vec<f64>>,
    mu: Vec<f64>,
}

pub fn eigendecompose(domain: &DirichletDomain) -> Result<Spectrum> {
    Spectrum::from_symmetrized(&assemble(domain).symmetric)
}

impl Spectrum {
    pub fn from_symmetrized(sym: &SymmetrizedOperator) -> Result<Self> {
        let n = sym.dim();
        let eig =
            SymmetricEigen::try_new(sym.to_dense(), f64::EPSILON, 10_000 * n.max(1)).ok_or(Error::EigenFailure)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

        let sqrt_mu = sym.sqrt_mu();
        let mu: Vec<f64> = sqrt_mu.iter().map(|s| s * s).collect();
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        if let Some(&l) = eigenvalues.first() {
            if !(l > MIN_EIGENVALUE) {
                return Err(Error::DegenerateSpectrum(l));
            }
        }
        let mut eigenfunctions: Vec<Vec<f64>> = order
            .iter()
            .map(|&k| {
                eig.eigenvectors
                    .column(k)
                    .iter()
                    .zip(sqrt_mu)
                    .map(|(w, s)| w / s)
                    .collect()
            })
            .collect();

        // re-orthonormalise within tied blocks, then fix signs
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && eigenvalues[end] - eigenvalues[end - 1] <= TIE_TOL * eigenvalues[end].abs().max(1.0) {
                end += 1;
            }
            for _ in 0..2 {
                for k in start..end {
                    for j in start..k {
                        let proj = interior_inner(&mu, &eigenfunctions[k], &eigenfunctions[j]);
                        let (head, tail) = eigenfunctions.split_at_mut(k);
                        for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                            *a -= proj * b;
                        }
                    }
                    let norm = interior_inner(&mu, &eigenfunctions[k], &eigenfunctions[k]).sqrt();
                    eigenfunctions[k].iter_mut().for_each(|v| *v /= norm);
                }
            }
            start = end;
        }
        for phi in &mut eigenfunctions {
            let peak = phi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if let Some(first) = phi.iter().find(|v| v.abs() > 1e-12 * peak) {
                if *first < 0.0 {
                    phi.iter_mut().for_each(|v| *v = -*v);
                }
            }
        }
        Ok(Spectrum {
            eigenvalues,
            eigenfunctions,
            mu,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenfunction(&self, k: usize) -> &[f64] {
        &self.eigenfunctions[k]
    }

    pub fn eigenfunctions(&self) -> &[Vec<f64>] {
        &self.eigenfunctions
    }

    /// λ₁, the smallest eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Interior measure used for the inner products.
    pub fn measure(&self) -> &[f64] {
        &self.mu
    }

    /// Coefficients (u, φ_k)_μ.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.eigenfunctions
            .iter()
            .map(|phi| interior_inner(&self.mu, u, phi))
            .collect()
    }

    /// Σ_k c_k φ_k.
    pub fn reconstruct(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.mu.len()];
        for (c, phi) in coeffs.iter().zip(&self.eigenfunctions) {
            for (o, p) in out.iter_mut().zip(phi) {
                *o += c * p;
            }
        }
        out
    }
}

/// Which closed form to use for the modal coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaVariant {
    #[default]
    Duhamel,
    Shifted,
}

/// a_k and its first two time derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModeState {
    pub a: f64,
    pub da: f64,
    pub d2a: f64,
}

/// b_k(t) = Σ_j weights[j] · profiles[j](t).
#[derive(Clone, Copy, Debug)]
pub struct ModalForcing<'a> {
    pub weights: &'a [f64],
    pub profiles: &'a [TimeProfile],
}

impl<'a> ModalForcing<'a> {
    pub fn none() -> ModalForcing<'static> {
        ModalForcing {
            weights: &[],
            profiles: &[],
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.weights
            .iter()
            .zip(self.profiles)
            .try_fold(0.0, |acc, (w, p)| Ok(acc + w * p.eval(t)?))
    }

    fn convolve(&self, omega: f64, t: f64) -> Result<(f64, f64)> {
        self.weights
            .iter()
            .zip(self.profiles)
            .try_fold((0.0, 0.0), |(s, c), (w, p)| {
                if *w == 0.0 {
                    return Ok((s, c));
                }
                let (ps, pc) = convolve(p, omega, t)?;
                Ok((s + w * ps, c + w * pc))
            })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "modal coefficient needs a positive eigenvalue, got {lambda}"
        )));
    }
    Ok(())
}

fn modal_state(lambda: f64, g_k: f64, v_k: f64, b: ModalForcing<'_>, t: f64) -> Result<ModeState> {
    check_lambda(lambda)?;
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let omega = lambda.sqrt();
    let (sin, cos) = (omega * t).sin_cos();
    let (conv_s, conv_c) = b.convolve(omega, t)?;
    let a = g_k * cos + v_k * sin / omega + conv_s / omega;
    let da = -g_k * omega * sin + v_k * cos + conv_c;
    let d2a = b.eval(t)? - lambda * a;
    Ok(ModeState { a, da, d2a })
}

/// Variation-of-constants solution of a'' + λa = b, a(0) = g_k, a'(0) = h_k.
pub fn duhamel_coefficient(lambda: f64, g_k: f64, h_k: f64, b: ModalForcing<'_>, t: f64) -> Result<ModeState> {
    modal_state(lambda, g_k, h_k, b, t)
}

/// The displayed closed form with (h_k − b_k(0)) in the sine term.
pub fn shifted_coefficient(lambda: f64, g_k: f64, h_k: f64, b: ModalForcing<'_>, t: f64) -> Result<ModeState> {
    let b0 = b.eval(0.0)?;
    modal_state(lambda, g_k, h_k - b0, b, t)
}

/// u, ∂_t u and ∂_t² u at one time, interior order.
#[derive(Clone, Debug)]
pub struct SpectralState {
    pub t: f64,
    pub modes: Vec<ModeState>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub d2u: Vec<f64>,
}

/// Modal data of a problem ready for evaluation at any t ≥ 0.
#[derive(Clone, Debug)]
pub struct SpectralSolution {
    spectrum: Spectrum,
    g_coeffs: Vec<f64>,
    h_coeffs: Vec<f64>,
    /// `forcing_weights[k][j]` = (amplitude_j, φ_k)_μ.
    forcing_weights: Vec<Vec<f64>>,
    profiles: Vec<TimeProfile>,
    variant: FormulaVariant,
}

impl SpectralSolution {
    pub fn new(problem: &WaveProblem, variant: FormulaVariant) -> Result<Self> {
        let spectrum = eigendecompose(problem.domain())?;
        Self::with_spectrum(problem, spectrum, variant)
    }

    pub fn with_spectrum(problem: &WaveProblem, spectrum: Spectrum, variant: FormulaVariant) -> Result<Self> {
        if spectrum.len() != problem.n() {
            return Err(Error::DimensionMismatch {
                expected: problem.n(),
                got: spectrum.len(),
            });
        }
        let terms = problem.forcing().terms();
        let amplitude_coeffs: Vec<Vec<f64>> = terms.iter().map(|t| spectrum.project(&t.amplitude)).collect();
        let forcing_weights = (0..spectrum.len())
            .map(|k| amplitude_coeffs.iter().map(|c| c[k]).collect())
            .collect();
        Ok(SpectralSolution {
            g_coeffs: spectrum.project(problem.g()),
            h_coeffs: spectrum.project(problem.h()),
            forcing_weights,
            profiles: terms.iter().map(|t| t.profile.clone()).collect(),
            spectrum,
            variant,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn variant(&self) -> FormulaVariant {
        self.variant
    }

    pub fn g_coeffs(&self) -> &[f64] {
        &self.g_coeffs
    }

    pub fn h_coeffs(&self) -> &[f64] {
        &self.h_coeffs
    }

    pub fn modal_forcing(&self, k: usize) -> ModalForcing<'_> {
        ModalForcing {
            weights: &self.forcing_weights[k],
            profiles: &self.profiles,
        }
    }

    pub fn mode(&self, k: usize, t: f64) -> Result<ModeState> {
        let lambda = self.spectrum.eigenvalues[k];
        let b = self.modal_forcing(k);
        match self.variant {
            FormulaVariant::Duhamel => duhamel_coefficient(lambda, self.g_coeffs[k], self.h_coeffs[k], b, t),
            FormulaVariant::Shifted => shifted_coefficient(lambda, self.g_coeffs[k], self.h_coeffs[k], b, t),
        }
    }

    pub fn state(&self, t: f64) -> Result<SpectralState> {
        let modes = (0..self.spectrum.len())
            .map(|k| self.mode(k, t))
            .collect::<Result<Vec<_>>>()?;
        let pick = |f: fn(&ModeState) -> f64| {
            let c: Vec<f64> = modes.iter().map(f).collect();
            self.spectrum.reconstruct(&c)
        };
        Ok(SpectralState {
            t,
            u: pick(|m| m.a),
            du: pick(|m| m.da),
            d2u: pick(|m| m.d2a),
            modes,
        })
    }
}

/// Evaluates the modal solution at each requested time.
pub fn solve_spectral(problem: &WaveProblem, times: &[f64], variant: FormulaVariant) -> Result<Vec<SpectralState>> {
    let sol = SpectralSolution::new(problem, variant)?;
    times.iter().map(|&t| sol.state(t)).collect()
}

/// e(t) computed two ways: spatially as ∫_Ω |∇u|² + ∫_{Ω°} |∂_t u|², and
/// modally as Σ λ_k a_k² + Σ a_k'².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub spatial: f64,
    pub modal: f64,
}

pub fn energy(problem: &WaveProblem, solution: &SpectralSolution, t: f64) -> Result<EnergyReport> {
    let state = solution.state(t)?;
    Ok(energy_of_state(problem, solution, &state))
}

pub fn energy_of_state(problem: &WaveProblem, solution: &SpectralSolution, state: &SpectralState) -> EnergyReport {
    let domain = problem.domain();
    let mu = solution.spectrum.measure();
    let spatial = gradient_energy_interior(domain, &state.u) + interior_inner(mu, &state.du, &state.du);
    let modal = state
        .modes
        .iter()
        .zip(&solution.spectrum.eigenvalues)
        .map(|(m, l)| l * m.a * m.a + m.da * m.da)
        .sum();
    EnergyReport { spatial, modal }
}
