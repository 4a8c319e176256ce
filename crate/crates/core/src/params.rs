//! Physical configuration of one protocol instance.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::special::erf;

/// Minimum `(T - |x0|)/Δ` for the Gaussian to count as contained in `[-T, T]`.
///
/// `1 - erf(4.2) ≈ 3e-9`, so the truncated tail sits below every tolerance
/// used downstream.
pub const CONTAINMENT_THRESHOLD: f64 = 4.2;

/// Below this `PΔ` the factor `erf²(2PΔ)` is visibly smaller than one.
pub const FLAT_SPECTRUM_THRESHOLD: f64 = 1.5;

/// Physical parameters: register centre `x0`, Gaussian width `Δ`, position
/// half-domain `T`, momentum half-domain `P` (also the domain of `f`), and
/// measurement precision `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcedureParams {
    pub x0: f64,
    pub delta: f64,
    pub big_t: f64,
    pub big_p: f64,
    pub epsilon: f64,
}

impl ProcedureParams {
    /// Unchecked constructor with `ε = Δ`, the optimal measurement.
    pub fn new(x0: f64, delta: f64, big_t: f64, big_p: f64) -> Self {
        Self {
            x0,
            delta,
            big_t,
            big_p,
            epsilon: delta,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// `Δ = 1/√2`, `P = 3/(2Δ)`, `x0 = 0`, with `T` chosen so that the grid
    /// simulator's momentum cells line up with `P/8`.
    pub fn reference() -> Self {
        let delta = std::f64::consts::FRAC_1_SQRT_2;
        let big_p = 1.5 / delta;
        Self::new(0.0, delta, commensurate_half_domain(big_p, 8, 64), big_p)
    }

    /// Same as [`reference`](Self::reference) but with `P = pΔ/Δ`.
    pub fn reference_with_p_delta(p_delta: f64) -> Self {
        let mut p = Self::reference();
        p.big_p = p_delta / p.delta;
        p.big_t = commensurate_half_domain(p.big_p, 8, 64);
        p
    }

    pub fn p_delta(&self) -> f64 {
        self.big_p * self.delta
    }

    /// `(T - |x0|)/Δ`.
    pub fn containment_ratio(&self) -> f64 {
        (self.big_t - self.x0.abs()) / self.delta
    }

    pub fn is_contained(&self) -> bool {
        self.containment_ratio() >= CONTAINMENT_THRESHOLD
    }

    /// `E = erf²(2PΔ)`.
    pub fn flatness(&self) -> f64 {
        let e = erf(2.0 * self.p_delta());
        e * e
    }

    pub fn validate(&self) -> ValidationReport {
        validate_params(self)
    }

    /// Fails on any hard error from [`validate_params`].
    pub fn check(&self) -> Result<()> {
        let report = self.validate();
        let first = report.errors().next().map(|issue| issue.message.clone());
        match first {
            Some(message) => Err(Error::InvalidParams(message)),
            None => Ok(()),
        }
    }

    /// [`check`](Self::check) plus the `Δ ≪ T` regime the closed forms rely on.
    pub fn check_contained(&self) -> Result<()> {
        self.check()?;
        if !self.is_contained() {
            return Err(Error::NotContained {
                ratio: self.containment_ratio(),
                threshold: CONTAINMENT_THRESHOLD,
            });
        }
        Ok(())
    }

    pub fn normalization(&self) -> NormalizationConstants {
        NormalizationConstants {
            nx_sq: norm_x_sq(self),
            np_sq: norm_p_sq(self),
        }
    }
}

/// Position half-domain `T` for which `P/divisions` spans exactly
/// `cells` momentum cells of width `π/(2T)`.
pub fn commensurate_half_domain(big_p: f64, divisions: u32, cells: u32) -> f64 {
    f64::from(divisions) * f64::from(cells) * PI / (2.0 * big_p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    pub fn has(&self, code: &str) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    fn push(&mut self, severity: Severity, code: &'static str, message: String) {
        self.issues.push(Issue {
            severity,
            code,
            message,
        });
    }
}

/// Structured check of a parameter set. Never fails; severity lives in the report.
pub fn validate_params(p: &ProcedureParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let fields = [
        ("delta", p.delta),
        ("big_t", p.big_t),
        ("big_p", p.big_p),
        ("epsilon", p.epsilon),
    ];
    for (name, value) in fields {
        if !(value.is_finite() && value > 0.0) {
            report.push(
                Severity::Error,
                "nonpositive",
                format!("{name} must be finite and > 0, got {value}"),
            );
        }
    }
    if !p.x0.is_finite() {
        report.push(Severity::Error, "nonfinite", format!("x0 must be finite, got {}", p.x0));
    }
    if !report.is_valid() {
        return report;
    }

    let ratio = p.containment_ratio();
    if ratio < CONTAINMENT_THRESHOLD {
        report.push(
            Severity::Warning,
            "containment",
            format!("containment ratio (T - |x0|)/Δ = {ratio:.4} < {CONTAINMENT_THRESHOLD}"),
        );
    }
    let pd = p.p_delta();
    if pd < FLAT_SPECTRUM_THRESHOLD {
        report.push(
            Severity::Warning,
            "flatness",
            format!(
                "PΔ = {pd:.4} < {FLAT_SPECTRUM_THRESHOLD}: erf²(2PΔ) = {:.6} is noticeably below 1",
                p.flatness()
            ),
        );
    }
    // P = 1/(2T) is not enforced; record how far off it is.
    report.push(
        Severity::Info,
        "domain_ratio",
        format!("2PT = {:.6} (1 would mean P = 1/(2T))", 2.0 * p.big_p * p.big_t),
    );
    report
}

/// `N_x² = √(πΔ²)/2 · [erf((T+x0)/Δ) + erf((T-x0)/Δ)]`.
pub fn norm_x_sq(p: &ProcedureParams) -> f64 {
    semi_gaussian_norm_sq(p.delta, p.big_t, p.x0)
}

/// `N_p² = √(π/4Δ²)/2 · [erf(2(P+p0)Δ) + erf(2(P-p0)Δ)]` with `p0 = 0`.
pub fn norm_p_sq(p: &ProcedureParams) -> f64 {
    let a = 2.0 * p.big_p * p.delta;
    (PI / (4.0 * p.delta * p.delta)).sqrt() / 2.0 * (erf(a) + erf(a))
}

/// Squared norm of `exp(-(x-c)²/2w²)` restricted to `[-half, half]`.
pub(crate) fn semi_gaussian_norm_sq(width: f64, half: f64, centre: f64) -> f64 {
    (PI * width * width).sqrt() / 2.0 * (erf((half + centre) / width) + erf((half - centre) / width))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationConstants {
    pub nx_sq: f64,
    pub np_sq: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn fig_params() -> ProcedureParams {
        let delta = FRAC_1_SQRT_2;
        ProcedureParams::new(0.0, delta, 6.0, 1.5 / delta)
    }

    #[test]
    fn reference_configuration_is_clean() {
        let report = fig_params().validate();
        assert!(report.is_valid());
        assert_eq!(report.warnings().count(), 0, "{report:?}");
        assert!(report.has("domain_ratio"));
        assert!(ProcedureParams::reference().validate().warnings().next().is_none());
    }

    #[test]
    fn zero_width_is_hard_error() {
        let mut p = fig_params();
        p.delta = 0.0;
        p.epsilon = 0.1;
        let report = p.validate();
        assert!(!report.is_valid());
        assert!(matches!(p.check(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn nan_and_negative_rejected() {
        for bad in [f64::NAN, -1.0, f64::INFINITY] {
            let mut p = fig_params();
            p.big_p = bad;
            assert!(!p.validate().is_valid());
        }
    }

    #[test]
    fn tail_truncation_warns() {
        let p = ProcedureParams::new(5.0, 1.0, 6.0, 1.5);
        let report = p.validate();
        assert!(report.is_valid());
        assert!(report.has("containment"));
        assert!((p.containment_ratio() - 1.0).abs() < 1e-15);
        assert!(matches!(p.check_contained(), Err(Error::NotContained { .. })));
    }

    #[test]
    fn containment_boundary() {
        let p = ProcedureParams::new(0.0, 1.0, 4.2, 1.5);
        assert!(p.is_contained());
        let p = ProcedureParams::new(0.0, 1.0, 4.19, 1.5);
        assert!(!p.is_contained());
    }

    #[test]
    fn small_p_delta_warns() {
        let p = ProcedureParams::new(0.0, 1.0, 10.0, 0.5);
        assert!(p.validate().has("flatness"));
    }

    #[test]
    fn norm_x_limits() {
        let p = ProcedureParams::new(0.0, 1.0, 1.0, 1.0);
        assert!((norm_x_sq(&p) - 1.493_648_265_624_854).abs() < 1e-14);

        let p = ProcedureParams::new(0.0, 1.0, 0.0, 1.0);
        assert_eq!(norm_x_sq(&p), 0.0);

        let p = ProcedureParams::new(0.0, 0.3, 50.0, 1.0);
        assert!((norm_x_sq(&p) - (PI * 0.09).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn norm_p_limit() {
        let p = ProcedureParams::new(0.0, 0.5, 10.0, 40.0);
        assert!((norm_p_sq(&p) - (PI / (4.0 * 0.25)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn norms_monotone_in_domain() {
        let mut last = (0.0, 0.0);
        for k in 1..50 {
            let h = k as f64 * 0.1;
            let p = ProcedureParams::new(0.3, 0.7, h, h);
            let n = p.normalization();
            assert!(n.nx_sq >= last.0 && n.np_sq >= last.1);
            last = (n.nx_sq, n.np_sq);
        }
    }

    #[test]
    fn norm_x_symmetric_in_x0() {
        for x0 in [0.1, 0.7, 2.5] {
            let a = ProcedureParams::new(x0, 0.8, 3.0, 1.0);
            let b = ProcedureParams::new(-x0, 0.8, 3.0, 1.0);
            assert_eq!(norm_x_sq(&a), norm_x_sq(&b));
        }
    }
}
