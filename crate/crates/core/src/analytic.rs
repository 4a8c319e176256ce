//! Closed-form outcome statistics, Fisher information and generator moments.
//!
//! Every closed form here assumes the Gaussian is contained in `[-T, T]`
//! (see [`ProcedureParams::is_contained`]) so that position integrals extend
//! to infinity. With `E = erf²(2PΔ)`, `G = erf²(2rΔ)` and `b = (E - G)/2`:
//!
//! ```text
//! p(x0|φ) = ½(E + G) + ½(E - G)cos 2φ = G + b(1 + cos 2φ)
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::function::PiecewiseBinaryFunction;
use crate::params::ProcedureParams;
use crate::special::{erf, phase_terms};

/// Two-outcome distribution `{p(x0), p(x̄0)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDistribution {
    p_x0: f64,
}

impl MeasurementDistribution {
    /// Clamps into `[0, 1]`.
    pub fn from_p_x0(p_x0: f64) -> Self {
        Self {
            p_x0: p_x0.clamp(0.0, 1.0),
        }
    }

    pub fn p_x0(&self) -> f64 {
        self.p_x0
    }

    pub fn p_not_x0(&self) -> f64 {
        1.0 - self.p_x0
    }
}

/// A Fisher information value, flagged when it is the limit at a removable
/// `0/0` point (`p ∈ {0, 1}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherValue {
    pub value: f64,
    pub removable_limit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherReport {
    pub fisher: f64,
    pub removable_limit: bool,
    /// `16 (ΔH)²` with `H = f(x̂)`.
    pub variance_bound: f64,
    /// `4⟨H⟩²` with `H = f(x̂)`. Diagnostic only.
    pub mean_bound_f: f64,
    /// `4⟨H⟩²` with `H = 2f(x̂)`. Diagnostic only.
    pub mean_bound_2f: f64,
    /// Present only for the balanced step (`r = 0`) away from `sin 2φ = 0`.
    pub delta_phi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorMoments {
    pub mean: f64,
    pub variance: f64,
}

/// `(E, G, b)` for step point `r`.
fn step_terms(p: &ProcedureParams, r: f64) -> (f64, f64, f64) {
    let e = p.flatness();
    let er = erf(2.0 * r * p.delta);
    let g = er * er;
    (e, g, 0.5 * (e - g))
}

fn check_r(p: &ProcedureParams, r: f64) -> Result<()> {
    if !(r.abs() <= p.big_p) {
        return Err(Error::OutOfRange(format!("r = {r} outside [-{0}, {0}]", p.big_p)));
    }
    Ok(())
}

fn check_function(p: &ProcedureParams, f: &PiecewiseBinaryFunction) -> Result<()> {
    if f.big_p() != p.big_p {
        return Err(Error::InvalidFunction(format!(
            "function domain P = {} does not match parameters P = {}",
            f.big_p(),
            p.big_p
        )));
    }
    Ok(())
}

/// Closed-form `p(x0|φ)` for the step function with change point `r`.
/// Negative `r` gives the same value as `|r|`.
pub fn prob_x0(p: &ProcedureParams, r: f64, phi: f64) -> Result<MeasurementDistribution> {
    p.check_contained()?;
    check_r(p, r)?;
    let (_, g, b) = step_terms(p, r);
    let (plus, _) = phase_terms(phi);
    Ok(MeasurementDistribution::from_p_x0(g + b * plus))
}

/// `p(x0|φ) = (4Δ²/π)|∫ e^{-4Δ²z²} e^{2iφf(z)} dz|²` for any piecewise-binary
/// `f`, each segment integrated exactly as an `erf` difference.
pub fn prob_x0_factorized(
    p: &ProcedureParams,
    f: &PiecewiseBinaryFunction,
    phi: f64,
) -> Result<MeasurementDistribution> {
    p.check_contained()?;
    check_function(p, f)?;
    // The integral is W0 + W1·e^{2iφ} up to √π/(4Δ), where W0/W1 collect the
    // erf weight of the zero/one segments.
    let (mut w0, mut w1) = (0.0, 0.0);
    let scale = 2.0 * p.delta;
    for (lo, hi, v) in f.segments() {
        let w = erf(scale * hi) - erf(scale * lo);
        if v {
            w1 += w;
        } else {
            w0 += w;
        }
    }
    let (plus, _) = phase_terms(phi);
    let d = w0 - w1;
    Ok(MeasurementDistribution::from_p_x0(
        0.25 * (d * d + 2.0 * w0 * w1 * plus),
    ))
}

/// `F(φ) = Σ_x (∂_φ p)²/p` for the step with change point `r`.
///
/// Written as a product of two factors so the removable singularities at
/// `p = 0` (balanced, `cos 2φ = -1`) and `p = 1` (`E = 1`, `cos 2φ = 1`) resolve
/// to their finite limits.
pub fn fisher_phi(p: &ProcedureParams, r: f64, phi: f64) -> Result<FisherReport> {
    p.check_contained()?;
    check_r(p, r)?;
    let (e, g, b) = step_terms(p, r);
    let (plus, minus) = phase_terms(phi);
    let one_minus_e = 1.0 - e;

    let mut removable_limit = false;
    let fisher = if b <= 0.0 {
        0.0
    } else {
        // p = G + b·plus, 1 - p = (1 - E) + b·minus
        let lower = if g == 0.0 {
            removable_limit |= plus == 0.0;
            2.0
        } else {
            2.0 * b * plus / (g + b * plus)
        };
        let upper = if one_minus_e == 0.0 {
            removable_limit |= minus == 0.0;
            2.0
        } else {
            2.0 * b * minus / (one_minus_e + b * minus)
        };
        lower * upper
    };

    let moments = generator_moments(p, r)?;
    let delta_phi = if r == 0.0 { delta_phi(p, phi).ok() } else { None };
    Ok(FisherReport {
        fisher,
        removable_limit,
        variance_bound: 16.0 * moments.variance,
        mean_bound_f: 4.0 * moments.mean * moments.mean,
        mean_bound_2f: 16.0 * moments.mean * moments.mean,
        delta_phi,
    })
}

/// `dG/dr` for `G(r) = erf²(2rΔ)`.
fn g_prime(delta: f64, r: f64) -> f64 {
    let x = 2.0 * r * delta;
    8.0 * delta / PI.sqrt() * erf(x) * (-x * x).exp()
}

/// Fisher information about `r` at fixed `φ`.
pub fn fisher_r(p: &ProcedureParams, r: f64, phi: f64) -> Result<FisherValue> {
    p.check_contained()?;
    check_r(p, r)?;
    let (e, g, b) = step_terms(p, r);
    let (plus, minus) = phase_terms(phi);
    let dp = 0.5 * g_prime(p.delta, r) * minus;
    let prob = g + b * plus;
    let complement = (1.0 - e) + b * minus;
    if prob == 0.0 {
        // r → 0⁺ with cos 2φ = -1: G'²/G → 64Δ²/π.
        let h = 0.5 * minus;
        return Ok(FisherValue {
            value: 64.0 * p.delta * p.delta / PI * h * h,
            removable_limit: true,
        });
    }
    if complement == 0.0 {
        return Ok(FisherValue {
            value: 0.0,
            removable_limit: true,
        });
    }
    Ok(FisherValue {
        value: dp * dp / (prob * complement),
        removable_limit: false,
    })
}

/// Mean and variance of `H = f(x̂)` for the step at `r` in the Fourier-
/// transformed input state.
pub fn generator_moments(p: &ProcedureParams, r: f64) -> Result<GeneratorMoments> {
    p.check()?;
    check_r(p, r)?;
    let mean = 0.5 * (erf(2.0 * p.p_delta()) - erf(2.0 * r * p.delta));
    Ok(GeneratorMoments {
        mean,
        variance: mean * (1.0 - mean),
    })
}

/// Generator moments for an arbitrary piecewise-binary `f`.
pub fn generator_moments_of(p: &ProcedureParams, f: &PiecewiseBinaryFunction) -> Result<GeneratorMoments> {
    p.check()?;
    check_function(p, f)?;
    let scale = 2.0 * p.delta;
    let mean = 0.5
        * f.segments()
            .filter(|s| s.2)
            .map(|(lo, hi, _)| erf(scale * hi) - erf(scale * lo))
            .sum::<f64>();
    Ok(GeneratorMoments {
        mean,
        variance: mean * (1.0 - mean),
    })
}

/// `δφ = ΔX / |d⟨X⟩/dφ|` for the balanced step, with `X = P_{x0}` so that
/// `⟨X²⟩ = ⟨X⟩ = ½E(1 + cos 2φ)`.
pub fn delta_phi(p: &ProcedureParams, phi: f64) -> Result<f64> {
    p.check_contained()?;
    let e = p.flatness();
    let (plus, minus) = phase_terms(phi);
    if plus == 0.0 || minus == 0.0 {
        return Err(Error::SingularDerivative { phi });
    }
    let mean = 0.5 * e * plus;
    // |sin 2φ| = √(plus·minus)
    Ok((mean * (1.0 - mean)).sqrt() / (e * (plus * minus).sqrt()))
}

/// Error-propagation `δφ` for the step at any `r`; equals [`delta_phi`] at `r = 0`.
pub fn error_propagation_delta_phi(p: &ProcedureParams, r: f64, phi: f64) -> Result<f64> {
    let prob = prob_x0(p, r, phi)?.p_x0();
    let (e, g, _) = step_terms(p, r);
    let (plus, minus) = phase_terms(phi);
    let slope = (e - g) * (plus * minus).sqrt();
    if slope == 0.0 {
        return Err(Error::SingularDerivative { phi });
    }
    Ok((prob * (1.0 - prob)).sqrt() / slope)
}

/// Deutsch-Jozsa mode, `φ = π/2`: `p(x0) = erf²(2rΔ)`.
pub fn dj_statistics(p: &ProcedureParams, r: f64) -> Result<MeasurementDistribution> {
    p.check()?;
    check_r(p, r)?;
    let er = erf(2.0 * r * p.delta);
    Ok(MeasurementDistribution::from_p_x0(er * er))
}
