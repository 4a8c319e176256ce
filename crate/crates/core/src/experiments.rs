//! Seeded Monte-Carlo runs of both operating modes: single-shot
//! Deutsch-Jozsa classification at `φ = π/2`, and estimation of `φ` by
//! inverting the outcome frequency.
//!
//! # Random streams
//!
//! Every stream is xoshiro256++ whose four state words are the first four
//! outputs of SplitMix64 started at the seed (the reference seeding of the
//! xoshiro authors). A uniform draw is `(next_u64() >> 11) · 2⁻⁵³`, and a trial
//! yields `X0` iff that draw is `< p(x0)`. Replica `i` of a run with master seed
//! `s` uses seed `s + i·0x9E3779B97F4A7C15` (wrapping). Ports that follow these
//! three rules reproduce every sequence bit for bit.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::analytic::{self, prob_x0_factorized};
use crate::error::{Error, Result};
use crate::function::PiecewiseBinaryFunction;
use crate::params::ProcedureParams;
use crate::special::phase_terms;

const REPLICA_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn stream(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn replica_seed(master: u64, index: u64) -> u64 {
    master.wrapping_add(index.wrapping_mul(REPLICA_STRIDE))
}

#[inline]
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    X0,
    NotX0,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub outcome: Outcome,
    pub true_phi: f64,
    pub f_descriptor: Arc<PiecewiseBinaryFunction>,
    pub seed: u64,
}

/// `n` independent trials of the circuit with outcome probability from the
/// exact piecewise evaluation.
pub fn sample_outcomes(
    p: &ProcedureParams,
    f: &PiecewiseBinaryFunction,
    phi: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    if n == 0 {
        return Err(Error::OutOfRange("at least one trial is required".into()));
    }
    let p_x0 = prob_x0_factorized(p, f, phi)?.p_x0();
    let f = Arc::new(f.clone());
    let mut rng = stream(seed);
    Ok((0..n)
        .map(|_| TrialRecord {
            outcome: if uniform(&mut rng) < p_x0 {
                Outcome::X0
            } else {
                Outcome::NotX0
            },
            true_phi: phi,
            f_descriptor: Arc::clone(&f),
            seed,
        })
        .collect())
}

/// Number of `X0` outcomes in `n` draws; same stream as [`sample_outcomes`].
pub fn count_x0(p_x0: f64, n: usize, seed: u64) -> usize {
    let mut rng = stream(seed);
    (0..n).filter(|_| uniform(&mut rng) < p_x0).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DjVerdict {
    Constant,
    Balanced,
}

/// Register unchanged means constant; anything else means balanced.
pub fn dj_classify(rec: &TrialRecord) -> DjVerdict {
    match rec.outcome {
        Outcome::X0 => DjVerdict::Constant,
        Outcome::NotX0 => DjVerdict::Balanced,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DjSummary {
    pub p_x0: f64,
    pub trials: usize,
    pub classified_constant: usize,
    pub classified_balanced: usize,
    /// `None` for functions that are neither constant nor balanced.
    pub truth: Option<DjVerdict>,
    pub misclassified: Option<usize>,
}

impl DjSummary {
    pub fn error_rate(&self) -> Option<f64> {
        self.misclassified.map(|m| m as f64 / self.trials as f64)
    }
}

/// Runs `trials` single-shot decisions at `φ = π/2`.
pub fn run_dj(p: &ProcedureParams, f: &PiecewiseBinaryFunction, trials: usize, seed: u64) -> Result<DjSummary> {
    let records = sample_outcomes(p, f, FRAC_PI_2, trials, seed)?;
    let classified_constant = records.iter().filter(|r| dj_classify(r) == DjVerdict::Constant).count();
    let classified_balanced = trials - classified_constant;
    let truth = if f.is_constant() {
        Some(DjVerdict::Constant)
    } else if f.is_balanced() {
        Some(DjVerdict::Balanced)
    } else {
        None
    };
    let misclassified = truth.map(|t| match t {
        DjVerdict::Constant => classified_balanced,
        DjVerdict::Balanced => classified_constant,
    });
    Ok(DjSummary {
        p_x0: prob_x0_factorized(p, f, FRAC_PI_2)?.p_x0(),
        trials,
        classified_constant,
        classified_balanced,
        truth,
        misclassified,
    })
}

/// Probability that a constant function is reported balanced, `1 - erf²(2PΔ)`.
pub fn constant_misclassification_rate(p: &ProcedureParams) -> f64 {
    1.0 - p.flatness()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationReport {
    pub phi_hat: f64,
    pub n_shots: usize,
    /// `(φ̂ - φ_true)²` for a single record set; the replica mean in summaries.
    pub empirical_mse: f64,
    /// `1/(n·F(φ_true))`.
    pub crb: f64,
}

/// `(a, b)` of `p(x0|φ) = a + b·cos 2φ` for the step at `r`.
fn cosine_family(p: &ProcedureParams, r: f64) -> (f64, f64) {
    let e = p.flatness();
    let er = crate::special::erf(2.0 * r * p.delta);
    let g = er * er;
    (0.5 * (e + g), 0.5 * (e - g))
}

/// Principal-branch inversion `φ̂ = ½ arccos(clamp((k/n - a)/b))` in `[0, π/2]`.
pub fn phi_from_frequency(frequency: f64, a: f64, b: f64) -> f64 {
    0.5 * ((frequency - a) / b).clamp(-1.0, 1.0).acos()
}

const IDENTIFIABILITY_FLOOR: f64 = 1e-9;

pub fn cramer_rao_bound(p: &ProcedureParams, r: f64, phi: f64, shots: usize) -> Result<f64> {
    let fisher = analytic::fisher_phi(p, r, phi)?.fisher;
    Ok(1.0 / (shots as f64 * fisher))
}

/// Estimates `φ` from a record set generated with the step at `r`.
pub fn mle_phi(records: &[TrialRecord], p: &ProcedureParams, r: f64) -> Result<EstimationReport> {
    let first = records
        .first()
        .ok_or_else(|| Error::OutOfRange("no records to estimate from".into()))?;
    let (a, b) = cosine_family(p, r);
    if b <= IDENTIFIABILITY_FLOOR {
        return Err(Error::Unidentifiable { b });
    }
    let n = records.len();
    let k = records.iter().filter(|r| r.outcome == Outcome::X0).count();
    let phi_hat = phi_from_frequency(k as f64 / n as f64, a, b);
    Ok(EstimationReport {
        phi_hat,
        n_shots: n,
        empirical_mse: (phi_hat - first.true_phi).powi(2),
        crb: cramer_rao_bound(p, r, first.true_phi, n)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationSummary {
    pub phi_true: f64,
    pub shots: usize,
    pub replicas: usize,
    pub mean_phi_hat: f64,
    pub empirical_mse: f64,
    pub crb: f64,
    pub fisher: f64,
}

impl EstimationSummary {
    pub fn efficiency_ratio(&self) -> f64 {
        self.empirical_mse / self.crb
    }
}

/// `replicas` independent estimates of `φ_true`, each from `shots` trials.
pub fn run_estimation(
    p: &ProcedureParams,
    r: f64,
    phi_true: f64,
    shots: usize,
    replicas: usize,
    seed: u64,
) -> Result<EstimationSummary> {
    if shots == 0 || replicas == 0 {
        return Err(Error::OutOfRange("shots and replicas must be positive".into()));
    }
    let (a, b) = cosine_family(p, r);
    if b <= IDENTIFIABILITY_FLOOR {
        return Err(Error::Unidentifiable { b });
    }
    let p_x0 = analytic::prob_x0(p, r, phi_true)?.p_x0();
    let fisher = analytic::fisher_phi(p, r, phi_true)?.fisher;
    let estimates: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let k = count_x0(p_x0, shots, replica_seed(seed, i));
            phi_from_frequency(k as f64 / shots as f64, a, b)
        })
        .collect();
    let n = replicas as f64;
    Ok(EstimationSummary {
        phi_true,
        shots,
        replicas,
        mean_phi_hat: estimates.iter().sum::<f64>() / n,
        empirical_mse: estimates.iter().map(|e| (e - phi_true).powi(2)).sum::<f64>() / n,
        crb: 1.0 / (shots as f64 * fisher),
        fisher,
    })
}

/// Mean-squared error of the estimator by summing over every possible count.
pub fn exact_estimator_mse(p: &ProcedureParams, r: f64, phi_true: f64, shots: usize) -> Result<f64> {
    let (a, b) = cosine_family(p, r);
    if b <= IDENTIFIABILITY_FLOOR {
        return Err(Error::Unidentifiable { b });
    }
    let q = analytic::prob_x0(p, r, phi_true)?.p_x0();
    let n = shots;
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let mut mse = 0.0;
    for k in 0..=n {
        let weight = if q == 0.0 {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        } else if q == 1.0 {
            if k == n {
                1.0
            } else {
                0.0
            }
        } else {
            (ln_fact[n] - ln_fact[k] - ln_fact[n - k] + k as f64 * q.ln() + (n - k) as f64 * (1.0 - q).ln()).exp()
        };
        let est = phi_from_frequency(k as f64 / n as f64, a, b);
        mse += weight * (est - phi_true).powi(2);
    }
    Ok(mse)
}

/// Tolerance on `δφ·√F = 1` for a point to count as optimal.
pub const OPTIMALITY_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub phi: f64,
    pub fisher: f64,
    pub variance_bound: f64,
    pub mean_bound_f: f64,
    pub mean_bound_2f: f64,
    pub delta_phi: Option<f64>,
    /// `δφ·√F`.
    pub product: Option<f64>,
    pub optimal: bool,
}

/// Tabulates `F(φ)`, both Fisher bounds and `δφ·√F` across `phis`.
pub fn heisenberg_audit(p: &ProcedureParams, r: f64, phis: &[f64]) -> Result<Vec<AuditRow>> {
    phis.iter()
        .map(|&phi| {
            let rep = analytic::fisher_phi(p, r, phi)?;
            let (plus, minus) = phase_terms(phi);
            let delta_phi = if plus == 0.0 || minus == 0.0 || rep.fisher == 0.0 {
                None
            } else {
                analytic::error_propagation_delta_phi(p, r, phi).ok()
            };
            let product = delta_phi.map(|d| d * rep.fisher.sqrt());
            Ok(AuditRow {
                phi,
                fisher: rep.fisher,
                variance_bound: rep.variance_bound,
                mean_bound_f: rep.mean_bound_f,
                mean_bound_2f: rep.mean_bound_2f,
                delta_phi,
                product,
                optimal: product.is_some_and(|x| (x - 1.0).abs() <= OPTIMALITY_TOLERANCE),
            })
        })
        .collect()
}
