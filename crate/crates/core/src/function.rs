//! Piecewise-constant binary functions on `[-P, P]`.

use std::fmt;

use crate::error::{Error, Result};

/// A black-box function `f: [-P, P] → {0, 1}`.
///
/// `breakpoints` split the domain into `breakpoints.len() + 1` segments; segment
/// `i` covers `(b[i-1], b[i]]` (the first starts at `-P`, the last ends at `P`)
/// and takes `values[i]`. Equal neighbouring values are kept, so a spurious
/// breakpoint stays visible to integrators that split on it.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseBinaryFunction {
    big_p: f64,
    breakpoints: Vec<f64>,
    values: Vec<bool>,
}

impl PiecewiseBinaryFunction {
    pub fn new(big_p: f64, breakpoints: Vec<f64>, values: Vec<bool>) -> Result<Self> {
        if !(big_p.is_finite() && big_p > 0.0) {
            return Err(Error::InvalidFunction(format!(
                "domain half-width must be > 0, got {big_p}"
            )));
        }
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if let Some(b) = breakpoints.iter().find(|b| !(b.abs() <= big_p)) {
            return Err(Error::InvalidFunction(format!(
                "breakpoint {b} outside [-{big_p}, {big_p}]"
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("breakpoints must be strictly ascending".into()));
        }
        Ok(Self {
            big_p,
            breakpoints,
            values,
        })
    }

    /// `f(y) = 1` for `y > r`, `0` for `y ≤ r`.
    ///
    /// `r = P` is the constant-0 function and `r = -P` the constant-1 function;
    /// `r = 0` is balanced.
    pub fn step(big_p: f64, r: f64) -> Result<Self> {
        if r == -big_p {
            return Self::constant(big_p, true);
        }
        Self::new(big_p, vec![r], vec![false, true])
    }

    /// `1` on `(r1, r2]`, `0` elsewhere.
    pub fn hat(big_p: f64, r1: f64, r2: f64) -> Result<Self> {
        Self::new(big_p, vec![r1, r2], vec![false, true, false])
    }

    pub fn constant(big_p: f64, value: bool) -> Result<Self> {
        Self::new(big_p, Vec::new(), vec![value])
    }

    pub fn big_p(&self) -> f64 {
        self.big_p
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Value at `y`; points outside `[-P, P]` are a contract violation.
    pub fn eval(&self, y: f64) -> Result<bool> {
        if !(y.abs() <= self.big_p) {
            return Err(Error::OutOfDomain { y, big_p: self.big_p });
        }
        Ok(self.value_at(y))
    }

    /// Value at `y` with `f` extended by zero outside `[-P, P]`.
    pub fn eval_or_zero(&self, y: f64) -> bool {
        y.abs() <= self.big_p && self.value_at(y)
    }

    #[inline]
    pub(crate) fn value_at(&self, y: f64) -> bool {
        self.values[self.breakpoints.partition_point(|&b| b < y)]
    }

    /// Segments `(lo, hi, value)` in ascending order. Empty segments (a
    /// breakpoint sitting on `±P`) are skipped.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, bool)> + '_ {
        let p = self.big_p;
        let n = self.values.len();
        (0..n).filter_map(move |i| {
            let lo = if i == 0 { -p } else { self.breakpoints[i - 1] };
            let hi = if i + 1 == n { p } else { self.breakpoints[i] };
            (hi > lo).then_some((lo, hi, self.values[i]))
        })
    }

    /// `1 - f`.
    pub fn complement(&self) -> Self {
        Self {
            big_p: self.big_p,
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| !v).collect(),
        }
    }

    /// `y ↦ f(-y)`, up to the value on breakpoints themselves.
    pub fn mirrored(&self) -> Self {
        Self {
            big_p: self.big_p,
            breakpoints: self.breakpoints.iter().rev().map(|b| -b).collect(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// Same function with an extra breakpoint at `y` that does not change any value.
    pub fn with_spurious_breakpoint(&self, y: f64) -> Result<Self> {
        if !(y.abs() < self.big_p) {
            return Err(Error::OutOfDomain { y, big_p: self.big_p });
        }
        let idx = self.breakpoints.partition_point(|&b| b < y);
        if self.breakpoints.get(idx) == Some(&y) {
            return Ok(self.clone());
        }
        let mut breakpoints = self.breakpoints.clone();
        let mut values = self.values.clone();
        breakpoints.insert(idx, y);
        values.insert(idx, values[idx]);
        Self::new(self.big_p, breakpoints, values)
    }

    /// Lebesgue measure of `{f = 1}`.
    pub fn measure_of_ones(&self) -> f64 {
        self.segments().filter(|s| s.2).map(|(lo, hi, _)| hi - lo).sum()
    }

    pub fn is_constant(&self) -> bool {
        let ones = self.measure_of_ones();
        ones == 0.0 || ones == 2.0 * self.big_p
    }

    pub fn is_balanced(&self) -> bool {
        (self.measure_of_ones() - self.big_p).abs() <= 1e-12 * self.big_p
    }
}

impl fmt::Display for PiecewiseBinaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self.values.iter().map(|&v| if v { '1' } else { '0' }).collect();
        write!(f, "pw[{bits}]@{:?}", self.breakpoints)
    }
}
