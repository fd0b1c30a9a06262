//! Sine and cosine convolutions of a time profile,
//!
//! ```text
//! S(t) = ∫₀ᵗ sin(ω(t−s)) p(s) ds,   C(t) = ∫₀ᵗ cos(ω(t−s)) p(s) ds,
//! ```
//!
//! in closed form for constant, polynomial and sinusoidal profiles and by
//! composite Simpson quadrature for sampled ones.

use crate::error::Result;
use crate::problem::TimeProfile;

/// Target change between successive Simpson refinements.
pub const QUADRATURE_TOL: f64 = 1e-11;
/// Upper limit on the total number of Simpson panels.
pub const MAX_PANELS: usize = 1 << 20;

/// `(S(t), C(t))` for the given profile and angular frequency ω > 0.
pub fn convolve(profile: &TimeProfile, omega: f64, t: f64) -> Result<(f64, f64)> {
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok(match profile {
        TimeProfile::Constant(c) => {
            let (s, c0) = monomial(0, omega, t);
            (c * s, c * c0)
        }
        TimeProfile::Polynomial(coeffs) => coeffs.iter().enumerate().fold((0.0, 0.0), |(sa, ca), (m, &a)| {
            if a == 0.0 {
                return (sa, ca);
            }
            let (s, c) = monomial(m, omega, t);
            (sa + a * s, ca + a * c)
        }),
        TimeProfile::Sinusoid {
            amplitude,
            frequency,
            phase,
        } => {
            let (s, c) = sinusoid(omega, *frequency, *phase, t);
            (amplitude * s, amplitude * c)
        }
        TimeProfile::Samples { .. } => {
            profile.check_horizon(t)?;
            sampled(profile, omega, t)?
        }
    })
}

/// sin(x)/x, accurate near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// ∫₀ᵗ cos(α + βs) ds.
fn int_cos(alpha: f64, beta: f64, t: f64) -> f64 {
    t * (alpha + 0.5 * beta * t).cos() * sinc(0.5 * beta * t)
}

/// ∫₀ᵗ sin(α + βs) ds.
fn int_sin(alpha: f64, beta: f64, t: f64) -> f64 {
    t * (alpha + 0.5 * beta * t).sin() * sinc(0.5 * beta * t)
}

/// Profile sin(νs + φ). Resonance ν = ω is handled by the sinc form.
fn sinusoid(omega: f64, nu: f64, phi: f64, t: f64) -> (f64, f64) {
    let s = 0.5 * (int_cos(omega * t - phi, -(omega + nu), t) - int_cos(omega * t + phi, nu - omega, t));
    let c = 0.5 * (int_sin(omega * t + phi, nu - omega, t) - int_sin(omega * t - phi, -(omega + nu), t));
    (s, c)
}

/// Profile s^m.
///
/// For small ωt the power series
/// `S_m = m! t^{m+1} Σ_j (−1)^j x^{2j+1}/(2j+m+2)!`,
/// `C_m = m! t^{m+1} Σ_j (−1)^j x^{2j}/(2j+m+1)!` with x = ωt avoids the
/// cancellation in the integration-by-parts recurrence used otherwise.
fn monomial(m: usize, omega: f64, t: f64) -> (f64, f64) {
    let x = omega * t;
    if x <= 2.0_f64.max(m as f64) {
        let tm1 = t.powi(m as i32 + 1);
        let mf = m as f64;
        let x2 = x * x;
        let mut cs = 1.0 / (mf + 1.0);
        let mut c_sum = cs;
        let mut ss = x / ((mf + 1.0) * (mf + 2.0));
        let mut s_sum = ss;
        for j in 0.. {
            let jf = j as f64;
            cs *= -x2 / ((2.0 * jf + mf + 2.0) * (2.0 * jf + mf + 3.0));
            ss *= -x2 / ((2.0 * jf + mf + 3.0) * (2.0 * jf + mf + 4.0));
            c_sum += cs;
            s_sum += ss;
            if cs.abs() <= 1e-18 * c_sum.abs() && ss.abs() <= 1e-18 * s_sum.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            if j > 200 {
                break;
            }
        }
        return (tm1 * s_sum, tm1 * c_sum);
    }
    let half = 0.5 * x;
    let mut s = 2.0 * half.sin().powi(2) / omega;
    let mut c = x.sin() / omega;
    for k in 1..=m {
        let kf = k as f64;
        let s_next = t.powi(k as i32) / omega - kf / omega * c;
        let c_next = kf / omega * s;
        s = s_next;
        c = c_next;
    }
    (s, c)
}

/// Composite Simpson on each sample interval, refined by panel doubling.
fn sampled(profile: &TimeProfile, omega: f64, t: f64) -> Result<(f64, f64)> {
    let TimeProfile::Samples { times, .. } = profile else {
        unreachable!("sampled() called on a closed-form profile")
    };
    let mut nodes = vec![0.0];
    nodes.extend(times.iter().copied().filter(|&s| s > 0.0 && s < t));
    nodes.push(t);
    let segments = nodes.len() - 1;

    let simpson = |panels: usize| -> Result<(f64, f64)> {
        let (mut s_acc, mut c_acc) = (0.0, 0.0);
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let h = (b - a) / (2 * panels) as f64;
            let (mut ss, mut cs) = (0.0, 0.0);
            for k in 0..=2 * panels {
                let s = if k == 2 * panels { b } else { a + k as f64 * h };
                let weight = if k == 0 || k == 2 * panels {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let p = profile.eval(s)?;
                let arg = omega * (t - s);
                ss += weight * arg.sin() * p;
                cs += weight * arg.cos() * p;
            }
            s_acc += ss * h / 3.0;
            c_acc += cs * h / 3.0;
        }
        Ok((s_acc, c_acc))
    };

    let mut panels = 2;
    let mut prev = simpson(panels)?;
    loop {
        if 2 * panels * segments > MAX_PANELS {
            log::warn!("Simpson refinement cap reached at {} panels", panels * segments);
            return Ok(prev);
        }
        panels *= 2;
        let next = simpson(panels)?;
        let change = (next.0 - prev.0).abs().max((next.1 - prev.1).abs());
        let scale = next.0.abs().max(next.1.abs()).max(1.0);
        if change <= QUADRATURE_TOL * scale {
            return Ok(next);
        }
        prev = next;
    }
}
