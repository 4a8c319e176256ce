//! Adaptive Gauss-Kronrod evaluation of the outcome probability, independent
//! of the `erf` closed forms.
//!
//! The double integral over `(z, y)` separates into `|I|²` with
//! `I = ∫_{-P}^{P} e^{-4Δ²z²} e^{2iφf(z)} dz`. `I` is integrated piecewise
//! between the breakpoints of `f`, where the integrand is analytic.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::PiecewiseBinaryFunction;
use crate::params::ProcedureParams;

// 15-point Kronrod abscissae and weights, and the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerance and refinement cap for [`prob_x0_quadrature`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    abs_tol: f64,
    max_subdivisions: usize,
}

impl QuadratureSpec {
    /// `abs_tol ∈ (0, 1e-6]`, `max_subdivisions ≥ 64`.
    pub fn new(abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol <= 1e-6) {
            return Err(Error::OutOfRange(format!(
                "abs_tol must lie in (0, 1e-6], got {abs_tol}"
            )));
        }
        if max_subdivisions < 64 {
            return Err(Error::OutOfRange(format!(
                "max_subdivisions must be at least 64, got {max_subdivisions}"
            )));
        }
        Ok(Self {
            abs_tol,
            max_subdivisions,
        })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_subdivisions(&self) -> usize {
        self.max_subdivisions
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_subdivisions: 1024,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// One Gauss-Kronrod 15/7 pass: `(Kronrod estimate, |K - G|)`.
pub fn gauss_kronrod_15<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(centre - dx) + f(centre + dx);
        kronrod += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm())
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

/// Bisects the worst piece until the summed error estimate is within `budget`.
/// Returns `(integral, error estimate, pieces used, converged)`.
fn integrate_adaptive<F>(f: &F, first: Piece, budget: f64, max_pieces: usize) -> (Complex64, f64, usize, bool)
where
    F: Fn(f64) -> Complex64,
{
    let mut pieces = vec![first];
    loop {
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if error <= budget {
            break;
        }
        if pieces.len() >= max_pieces {
            let value = pieces.iter().map(|p| p.value).sum();
            return (value, error, pieces.len(), false);
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one piece");
        let Piece { a, b, .. } = pieces.swap_remove(worst);
        let mid = 0.5 * (a + b);
        for (lo, hi) in [(a, mid), (mid, b)] {
            let (value, error) = gauss_kronrod_15(f, lo, hi);
            pieces.push(Piece {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
    // sum in position order so the result does not depend on refinement history
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = pieces.iter().map(|p| p.value).sum();
    let error = pieces.iter().map(|p| p.error).sum();
    (value, error, pieces.len(), true)
}

/// `p(x0|φ)` from the overlap integral, with an error estimate `≤ abs_tol`.
pub fn prob_x0_quadrature(
    p: &ProcedureParams,
    f: &PiecewiseBinaryFunction,
    phi: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    p.check_contained()?;
    if f.big_p() != p.big_p {
        return Err(Error::InvalidFunction(format!(
            "function domain P = {} does not match parameters P = {}",
            f.big_p(),
            p.big_p
        )));
    }
    let width = 4.0 * p.delta * p.delta;
    let integrand = |z: f64| {
        let phase = if f.value_at(z) { 2.0 * phi } else { 0.0 };
        Complex64::from_polar((-width * z * z).exp(), phase)
    };
    let prefactor = width / PI;

    let first: Vec<Piece> = f
        .segments()
        .map(|(a, b, _)| {
            let (value, error) = gauss_kronrod_15(&integrand, a, b);
            Piece { a, b, value, error }
        })
        .collect();
    let coarse: Complex64 = first.iter().map(|s| s.value).sum();

    // c(2|I|δ + δ²) ≤ c·δ(2|I| + 1) ≤ abs_tol for δ ≤ 1
    let integral_budget = spec.abs_tol / (prefactor * (2.0 * coarse.norm() + 1.0));

    // share the budget by Gaussian mass, with a floor so empty tails still get some
    let masses: Vec<f64> = first.iter().map(|s| s.value.norm()).collect();
    let total_mass: f64 = masses.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let floor = 1.0 / (16.0 * first.len() as f64);
    let shares: Vec<f64> = masses.iter().map(|m| (m / total_mass).max(floor)).collect();
    let share_sum: f64 = shares.iter().sum();

    let mut integral = Complex64::new(0.0, 0.0);
    let mut integral_error = 0.0;
    let mut used = 0;
    let mut converged = true;
    for (piece, share) in first.into_iter().zip(&shares) {
        let budget = integral_budget * share / share_sum;
        let remaining = spec.max_subdivisions.saturating_sub(used).max(1);
        let (value, error, pieces, ok) = integrate_adaptive(&integrand, piece, budget, remaining);
        integral += value;
        integral_error += error;
        used += pieces;
        converged &= ok;
    }

    let value = prefactor * integral.norm_sqr();
    let error_estimate = prefactor * (2.0 * integral.norm() * integral_error + integral_error * integral_error);
    if !converged || error_estimate > spec.abs_tol {
        return Err(Error::QuadratureNotConverged { value, error_estimate });
    }
    Ok(QuadratureResult { value, error_estimate })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepHatGap {
    /// `|p_step - p_hat|`.
    pub gap: f64,
    /// `p_hat - p_step`.
    pub signed_gap: f64,
    /// `|1 - cos 2φ|·(8/π)(PΔ)⁶·|1 - 3(PΔ)²|`.
    pub leading_order_prediction: f64,
    /// `gap / prediction`; NaN when the prediction is zero.
    pub ratio: f64,
}

/// Largest `PΔ` for which the two-term series is meaningful.
pub const SERIES_REGIME_MAX: f64 = 0.5;

/// Difference between the balanced step at `0` and the balanced hat on
/// `(-P/2, P/2]`, both by quadrature, next to the small-`PΔ` series.
pub fn step_hat_gap(p: &ProcedureParams, phi: f64, spec: &QuadratureSpec) -> Result<StepHatGap> {
    let pd = p.p_delta();
    if !(pd <= SERIES_REGIME_MAX) {
        return Err(Error::OutOfRange(format!(
            "PΔ = {pd} outside the series regime PΔ ≤ {SERIES_REGIME_MAX}"
        )));
    }
    let step = PiecewiseBinaryFunction::step(p.big_p, 0.0)?;
    let hat = PiecewiseBinaryFunction::hat(p.big_p, -p.big_p / 2.0, p.big_p / 2.0)?;
    let p_step = prob_x0_quadrature(p, &step, phi, spec)?.value;
    let p_hat = prob_x0_quadrature(p, &hat, phi, spec)?.value;
    let signed_gap = p_hat - p_step;
    let leading_order_prediction = step_hat_series(pd, phi);
    Ok(StepHatGap {
        gap: signed_gap.abs(),
        signed_gap,
        leading_order_prediction,
        ratio: if leading_order_prediction == 0.0 {
            f64::NAN
        } else {
            signed_gap.abs() / leading_order_prediction
        },
    })
}

/// First two terms of the step/hat error series.
pub fn step_hat_series(p_delta: f64, phi: f64) -> f64 {
    let x2 = p_delta * p_delta;
    (1.0 - (2.0 * phi).cos()).abs() * 8.0 / PI * x2 * x2 * x2 * (1.0 - 3.0 * x2).abs()
}
