//! The circuit `F⁻¹ U_f(φ) F` on a discretized register, followed by the
//! two-outcome Gaussian POVM.
//!
//! Position samples sit at `x_j = -T + jΔx` with `Δx = 2T/N`; momentum samples
//! at cell centres `y_k = -NΔy/2 + (k + ½)Δy` with `Δy = π/(NΔx)`. The Fourier
//! matrix is `U_kj = √(ΔxΔy/π)·e^{2i x_j y_k}`, unitary for this pairing and
//! evaluated with one FFT plus phase ramps. Because momentum cell edges sit at
//! integer multiples of `Δy`, a breakpoint of `f` at such a multiple is resolved
//! to midpoint-rule accuracy.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::analytic::MeasurementDistribution;
use crate::error::{Error, Result};
use crate::function::PiecewiseBinaryFunction;
use crate::params::ProcedureParams;

pub const MIN_GRID_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Position,
    Momentum,
}

/// Discretized wavefunction. Amplitudes are continuum-normalized:
/// `Σ|a_j|²·grid_step = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    amplitudes: Vec<Complex64>,
    grid_start: f64,
    grid_step: f64,
    space: Space,
}

fn check_size(n: usize) -> Result<()> {
    if n < MIN_GRID_POINTS || !n.is_power_of_two() {
        return Err(Error::Grid(format!(
            "grid size must be a power of two ≥ {MIN_GRID_POINTS}, got {n}"
        )));
    }
    Ok(())
}

impl GridState {
    pub fn new(amplitudes: Vec<Complex64>, grid_start: f64, grid_step: f64, space: Space) -> Result<Self> {
        check_size(amplitudes.len())?;
        if !(grid_step > 0.0 && grid_start.is_finite()) {
            return Err(Error::Grid(format!("bad grid start {grid_start} / step {grid_step}")));
        }
        Ok(Self {
            amplitudes,
            grid_start,
            grid_step,
            space,
        })
    }

    /// Position-space state on `[-T, T)` with amplitudes `g(x_j)`.
    pub fn sample_position(big_t: f64, n: usize, g: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_size(n)?;
        let step = 2.0 * big_t / n as f64;
        let start = -big_t;
        let amplitudes = (0..n).map(|j| g(start + j as f64 * step)).collect();
        Self::new(amplitudes, start, step, Space::Position)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn grid_start(&self) -> f64 {
        self.grid_start
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn point(&self, j: usize) -> f64 {
        self.grid_start + j as f64 * self.grid_step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.point(j))
    }

    /// `Σ|a_j|²·grid_step`.
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid_step
    }

    pub fn normalize(&mut self) {
        let scale = self.norm_sq().sqrt().recip();
        self.amplitudes.iter_mut().for_each(|a| *a *= scale);
    }

    /// `∫ conj(self)·other`, same grid required.
    pub fn inner(&self, other: &GridState) -> Result<Complex64> {
        if self.len() != other.len() || self.space != other.space || self.grid_step != other.grid_step {
            return Err(Error::Grid("inner product of states on different grids".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid_step)
    }

    /// Mean and variance of `|a|²` over the grid points.
    pub fn moments(&self) -> (f64, f64) {
        let weights: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr() * self.grid_step).collect();
        let total: f64 = weights.iter().sum();
        let mean = self.points().zip(&weights).map(|(x, w)| x * w).sum::<f64>() / total;
        let var = self
            .points()
            .zip(&weights)
            .map(|(x, w)| (x - mean).powi(2) * w)
            .sum::<f64>()
            / total;
        (mean, var)
    }

    /// Largest `|y|` the grid reaches, `NΔ/2`.
    pub fn half_extent(&self) -> f64 {
        0.5 * self.len() as f64 * self.grid_step
    }
}

/// Semi-Gaussian register `|G(x0)⟩` sampled on `[-T, T)` and renormalized.
pub fn prepare_gaussian(p: &ProcedureParams, n: usize) -> Result<GridState> {
    p.check_contained()?;
    gaussian_state(p.big_t, n, p.x0, p.delta)
}

fn gaussian_state(big_t: f64, n: usize, centre: f64, width: f64) -> Result<GridState> {
    let two_w2 = 2.0 * width * width;
    let mut s = GridState::sample_position(big_t, n, |x| {
        Complex64::new((-(x - centre).powi(2) / two_w2).exp(), 0.0)
    })?;
    s.normalize();
    Ok(s)
}

/// `e^{iπ(N-1)/2}`, the constant part of the kernel phase.
fn kernel_constant(n: usize) -> Complex64 {
    Complex64::from_polar(1.0, PI * ((n - 1) % 4) as f64 / 2.0)
}

/// `(-1)^j e^{iπj/N}`, the position-index part of the kernel phase.
fn position_ramp(j: usize, n: usize) -> Complex64 {
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::from_polar(sign, PI * j as f64 / n as f64)
}

fn momentum_sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Momentum grid `(start, step)` paired with a position grid of step `dx`.
pub fn momentum_grid(n: usize, dx: f64) -> (f64, f64) {
    let dy = PI / (n as f64 * dx);
    (-0.5 * n as f64 * dy + 0.5 * dy, dy)
}

fn grid_matches(actual: f64, expected: f64, scale: f64) -> bool {
    (actual - expected).abs() <= 1e-9 * scale
}

/// Position → momentum.
pub fn fourier(s: &GridState) -> Result<GridState> {
    if s.space != Space::Position {
        return Err(Error::Grid("fourier expects a position-space state".into()));
    }
    let n = s.len();
    let dx = s.grid_step;
    if !grid_matches(s.grid_start, -0.5 * n as f64 * dx, s.half_extent()) {
        return Err(Error::Grid(format!(
            "position grid must span [-T, T); start {} does not match step {dx}",
            s.grid_start
        )));
    }
    let (y0, dy) = momentum_grid(n, dx);

    let mut buf: Vec<Complex64> = s
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, a)| a * position_ramp(j, n))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);

    let scale = kernel_constant(n) * ((dx / dy).sqrt() / (n as f64).sqrt());
    for (k, b) in buf.iter_mut().enumerate() {
        *b *= scale * momentum_sign(k);
    }
    GridState::new(buf, y0, dy, Space::Momentum)
}

/// Momentum → position, the adjoint of [`fourier`].
pub fn inverse_fourier(s: &GridState) -> Result<GridState> {
    if s.space != Space::Momentum {
        return Err(Error::Grid("inverse_fourier expects a momentum-space state".into()));
    }
    let n = s.len();
    let dy = s.grid_step;
    if !grid_matches(s.grid_start, -0.5 * n as f64 * dy + 0.5 * dy, s.half_extent()) {
        return Err(Error::Grid(format!(
            "momentum grid must be cell-centred; start {} does not match step {dy}",
            s.grid_start
        )));
    }
    let dx = PI / (n as f64 * dy);

    let pre = kernel_constant(n).conj();
    let mut buf: Vec<Complex64> = s
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, b)| b * pre * momentum_sign(k))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let scale = (dy / dx).sqrt() / (n as f64).sqrt();
    for (j, a) in buf.iter_mut().enumerate() {
        *a *= position_ramp(j, n).conj() * scale;
    }
    GridState::new(buf, -0.5 * n as f64 * dx, dx, Space::Position)
}

/// `U_f(φ) = exp(-2iφ f(ŷ))`, with `f = 0` outside `[-P, P]`.
pub fn apply_blackbox(mut s: GridState, f: &PiecewiseBinaryFunction, phi: f64) -> Result<GridState> {
    if s.space != Space::Momentum {
        return Err(Error::Grid("black box acts on a momentum-space state".into()));
    }
    if s.half_extent() < f.big_p() {
        return Err(Error::Grid(format!(
            "momentum grid reaches ±{} but f lives on ±{}; increase N or decrease T",
            s.half_extent(),
            f.big_p()
        )));
    }
    let kick = Complex64::from_polar(1.0, -2.0 * phi);
    let (start, step) = (s.grid_start, s.grid_step);
    for (k, a) in s.amplitudes.iter_mut().enumerate() {
        if f.eval_or_zero(start + k as f64 * step) {
            *a *= kick;
        }
    }
    Ok(s)
}

/// Projects onto the width-`ε` Gaussian at `x0`, the rank-one element of the
/// POVM, sampled on the same grid.
pub fn measure_povm(s: &GridState, p: &ProcedureParams) -> Result<MeasurementDistribution> {
    if s.space != Space::Position {
        return Err(Error::Grid("measurement acts on a position-space state".into()));
    }
    let big_t = s.half_extent();
    let pointer = gaussian_state(big_t, s.len(), p.x0, p.epsilon)?;
    let overlap = pointer.inner(s)?;
    Ok(MeasurementDistribution::from_p_x0(overlap.norm_sqr()))
}

/// Outcome of one circuit run plus the norm after each stage
/// (prepare, F, U_f, F⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitTrace {
    pub distribution: MeasurementDistribution,
    pub stage_norms: [f64; 4],
}

pub fn run_circuit_traced(
    p: &ProcedureParams,
    f: &PiecewiseBinaryFunction,
    phi: f64,
    n: usize,
) -> Result<CircuitTrace> {
    let prepared = prepare_gaussian(p, n)?;
    let transformed = fourier(&prepared)?;
    let transformed_norm = transformed.norm_sq();
    let kicked = apply_blackbox(transformed, f, phi)?;
    let kicked_norm = kicked.norm_sq();
    let back = inverse_fourier(&kicked)?;
    Ok(CircuitTrace {
        distribution: measure_povm(&back, p)?,
        stage_norms: [prepared.norm_sq(), transformed_norm, kicked_norm, back.norm_sq()],
    })
}

/// prepare → F → U_f(φ) → F⁻¹ → POVM.
pub fn run_circuit(
    p: &ProcedureParams,
    f: &PiecewiseBinaryFunction,
    phi: f64,
    n: usize,
) -> Result<MeasurementDistribution> {
    run_circuit_traced(p, f, phi, n).map(|t| t.distribution)
}

/// Periodic target register for the two-register kickback check: `n` cells
/// of width `step` on `[-L/2, L/2)`, `L = n·step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetGrid {
    step: f64,
    n: usize,
    cells_per_unit: usize,
}

impl TargetGrid {
    /// `1/step` must be an integer (a unit shift is a whole number of cells)
    /// and `L` an even integer (the plane wave `e^{iπy}` is periodic on it).
    pub fn new(step: f64, n: usize) -> Result<Self> {
        let per_unit = 1.0 / step;
        let cells_per_unit = per_unit.round();
        if !(step > 0.0) || cells_per_unit < 1.0 || (per_unit - cells_per_unit).abs() > 1e-9 * per_unit {
            return Err(Error::Grid(format!("1/step = {per_unit} is not an integer")));
        }
        let cells_per_unit = cells_per_unit as usize;
        if n == 0 || n % (2 * cells_per_unit) != 0 {
            return Err(Error::Grid(format!(
                "target length {n}·{step} is not an even integer; the shift would not wrap cleanly"
            )));
        }
        Ok(Self {
            step,
            n,
            cells_per_unit,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickbackDeviation {
    /// `|arg⟨t|U_f|t⟩ - (-π f(x))|`, wrapped into `[0, π]`.
    pub phase: f64,
    /// `1 - |⟨t|U_f|t⟩|`.
    pub magnitude: f64,
}

/// For register basis point `x`, applies `|y⟩ → |y + f(x)⟩` to the discretized
/// target `F|π/2⟩ ∝ e^{iπy}` and compares the overlap with `e^{-iπ f(x)}`.
pub fn two_register_kickback_check(
    x: f64,
    f: &PiecewiseBinaryFunction,
    target: &TargetGrid,
) -> Result<KickbackDeviation> {
    kickback_check_repeated(x, f, target, 1)
}

/// As [`two_register_kickback_check`] with the black box applied `applications` times.
pub fn kickback_check_repeated(
    x: f64,
    f: &PiecewiseBinaryFunction,
    target: &TargetGrid,
    applications: usize,
) -> Result<KickbackDeviation> {
    let fx = usize::from(f.eval(x)?);
    let n = target.n;
    let start = -0.5 * n as f64 * target.step;
    let norm = (n as f64).sqrt().recip();
    let wave: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(norm, PI * (start + m as f64 * target.step)))
        .collect();

    let shift = (fx * applications * target.cells_per_unit) % n;
    let mut shifted = wave.clone();
    shifted.rotate_right(shift);

    let overlap: Complex64 = wave.iter().zip(&shifted).map(|(a, b)| a.conj() * b).sum();
    let self_overlap: f64 = wave.iter().map(|a| a.norm_sqr()).sum();
    let expected = Complex64::from_polar(1.0, -PI * (fx * applications) as f64);
    Ok(KickbackDeviation {
        phase: (overlap * expected.conj()).arg().abs(),
        magnitude: 1.0 - overlap.norm() / self_overlap,
    })
}
