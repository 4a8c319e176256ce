//! Parameter sweeps behind the `cvdj` subcommands.
//!
//! Every sweep evaluates its rows in parallel and returns them in grid order
//! (outer axis first), so output is identical regardless of thread count.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;

use crate::analytic;
use crate::error::{Error, Result};
use crate::experiments;
use crate::function::PiecewiseBinaryFunction;
use crate::grid;
use crate::params::{commensurate_half_domain, ProcedureParams};
use crate::quadrature::{self, QuadratureSpec};
use crate::table::{Cell, Table};

/// Grid size used when none is requested.
pub const DEFAULT_GRID_N: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    Quadrature,
    Grid,
    All,
}

impl Engine {
    fn uses(self, e: Engine) -> bool {
        self == e || self == Engine::All
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "quadrature" => Ok(Engine::Quadrature),
            "grid" => Ok(Engine::Grid),
            "all" => Ok(Engine::All),
            _ => Err(Error::OutOfRange(format!(
                "unknown engine '{s}' (expected analytic, quadrature, grid or all)"
            ))),
        }
    }
}

/// One scalar: a number, optionally scaled by `pi` or `P`, optionally over
/// an integer, e.g. `0.25`, `3pi/8`, `-P`, `P/4`, `0.5P`.
pub fn parse_scalar(token: &str, big_p: f64) -> Result<f64> {
    let bad = || Error::OutOfRange(format!("cannot parse '{token}' as a number"));
    let t = token.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t, 1.0),
    };
    let (coef, unit) = if let Some(c) = num.strip_suffix("pi") {
        (c, PI)
    } else if let Some(c) = num.strip_suffix('P') {
        (c, big_p)
    } else {
        (num, 1.0)
    };
    let coef = match coef.trim().trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let value = coef * unit / den;
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// `start:stop:count` (inclusive, `count ≥ 2`) or a comma-separated list.
pub fn parse_axis(spec: &str, big_p: f64) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::OutOfRange(format!("bad point count in '{spec}'")))?;
            linspace(parse_scalar(start, big_p)?, parse_scalar(stop, big_p)?, count)
        }
        [_] => spec
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_scalar(s, big_p))
            .collect::<Result<Vec<_>>>()
            .and_then(|v| {
                if v.is_empty() {
                    Err(Error::OutOfRange("empty axis".into()))
                } else {
                    Ok(v)
                }
            }),
        _ => Err(Error::OutOfRange(format!("cannot parse axis '{spec}'"))),
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::OutOfRange(format!("axis needs at least 2 points, got {count}")));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| if k == count - 1 { stop } else { start + k as f64 * step })
        .collect())
}

/// `count` interior points of `(0, P)`.
pub fn open_r_axis(big_p: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| big_p * k as f64 / (count + 1) as f64).collect()
}

/// `{0, P/8, P/4, P/2, P}`.
pub fn fig4_r_values(big_p: f64) -> Vec<f64> {
    vec![0.0, big_p / 8.0, big_p / 4.0, big_p / 2.0, big_p]
}

/// `{π/2, 5π/12, π/3, π/4, π/8}`.
pub fn fig5_phi_values() -> Vec<f64> {
    vec![FRAC_PI_2, 5.0 * PI / 12.0, PI / 3.0, FRAC_PI_4, PI / 8.0]
}

/// `{kπ/16 : k = 0..16}`.
pub fn crosscheck_phi_values() -> Vec<f64> {
    (0..=16).map(|k| k as f64 * PI / 16.0).collect()
}

/// Parameters for a given `Δ` and `P` with the default `T`.
pub fn default_params(delta: f64, big_p: f64) -> ProcedureParams {
    ProcedureParams::new(0.0, delta, commensurate_half_domain(big_p, 8, 64), big_p)
}

/// Evaluation settings shared by all sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepContext {
    pub params: ProcedureParams,
    pub engine: Engine,
    pub grid_n: usize,
    pub quadrature: QuadratureSpec,
}

impl SweepContext {
    pub fn new(params: ProcedureParams, engine: Engine) -> Self {
        Self {
            params,
            engine,
            grid_n: DEFAULT_GRID_N,
            quadrature: QuadratureSpec::default(),
        }
    }

    fn step(&self, r: f64) -> Result<PiecewiseBinaryFunction> {
        PiecewiseBinaryFunction::step(self.params.big_p, r)
    }

    fn prob(&self, engine: Engine, r: f64, phi: f64) -> Result<f64> {
        match engine {
            Engine::Analytic => Ok(analytic::prob_x0(&self.params, r, phi)?.p_x0()),
            Engine::Quadrature => {
                Ok(quadrature::prob_x0_quadrature(&self.params, &self.step(r)?, phi, &self.quadrature)?.value)
            }
            Engine::Grid => Ok(grid::run_circuit(&self.params, &self.step(r)?, phi, self.grid_n)?.p_x0()),
            Engine::All => unreachable!("a single engine is required"),
        }
    }

    /// `F(φ)` from a central difference of `p(φ)`.
    fn fisher_phi_fd(&self, engine: Engine, r: f64, phi: f64) -> Result<f64> {
        let p0 = self.prob(engine, r, phi)?;
        let dp = (self.prob(engine, r, phi + FD_STEP)? - self.prob(engine, r, phi - FD_STEP)?) / (2.0 * FD_STEP);
        Ok(two_outcome_fisher(dp, p0))
    }

    /// `F(r)` from a difference of `p(r)`, one-sided at the domain edge.
    fn fisher_r_fd(&self, engine: Engine, r: f64, phi: f64) -> Result<f64> {
        let big_p = self.params.big_p;
        let h = FD_STEP * big_p;
        let p0 = self.prob(engine, r, phi)?;
        let dp = if r + h > big_p {
            (p0 - self.prob(engine, r - h, phi)?) / h
        } else if r - h < -big_p {
            (self.prob(engine, r + h, phi)? - p0) / h
        } else {
            (self.prob(engine, r + h, phi)? - self.prob(engine, r - h, phi)?) / (2.0 * h)
        };
        Ok(two_outcome_fisher(dp, p0))
    }
}

const FD_STEP: f64 = 1e-4;

/// `p'²/(p(1-p))`; NaN where the denominator vanishes.
fn two_outcome_fisher(dp: f64, p: f64) -> f64 {
    let denom = p * (1.0 - p);
    if denom > 0.0 {
        dp * dp / denom
    } else {
        f64::NAN
    }
}

fn max_abs_dev(values: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

fn build_table(columns: &[&str], rows: Vec<Result<Vec<Cell>>>) -> Result<Table> {
    let mut t = Table::new(columns.iter().copied());
    for row in rows {
        t.push(row?)?;
    }
    Ok(t)
}

fn outer_product(outer: &[f64], inner: &[f64]) -> Vec<(f64, f64)> {
    outer.iter().flat_map(|&a| inner.iter().map(move |&b| (a, b))).collect()
}

/// Rows `(r, φ)` with the analytic `F(φ)` and its bounds; other engines add
/// finite-difference columns and the largest pairwise deviation.
pub fn fisher_phi_sweep(ctx: &SweepContext, rs: &[f64], phis: &[f64]) -> Result<Table> {
    ctx.params.check_contained()?;
    let engines: Vec<Engine> = [Engine::Quadrature, Engine::Grid]
        .into_iter()
        .filter(|&e| ctx.engine.uses(e))
        .collect();
    let mut columns = vec![
        "r",
        "phi",
        "fisher_analytic",
        "removable_limit",
        "variance_bound",
        "mean_bound_f",
        "mean_bound_2f",
    ];
    for e in &engines {
        columns.push(match e {
            Engine::Quadrature => "fisher_quadrature_fd",
            _ => "fisher_grid_fd",
        });
    }
    if !engines.is_empty() {
        columns.push("max_deviation");
    }
    let rows = outer_product(rs, phis)
        .into_par_iter()
        .map(|(r, phi)| {
            let rep = analytic::fisher_phi(&ctx.params, r, phi)?;
            let mut row: Vec<Cell> = vec![
                r.into(),
                phi.into(),
                rep.fisher.into(),
                rep.removable_limit.into(),
                rep.variance_bound.into(),
                rep.mean_bound_f.into(),
                rep.mean_bound_2f.into(),
            ];
            let mut values = vec![rep.fisher];
            for &e in &engines {
                let v = ctx.fisher_phi_fd(e, r, phi)?;
                values.push(v);
                row.push(v.into());
            }
            if !engines.is_empty() {
                row.push(max_abs_dev(&values).into());
            }
            Ok(row)
        })
        .collect();
    build_table(&columns, rows)
}

/// Rows `(φ, r)` with the analytic `F(r)`. The grid engine is rejected: its
/// output is piecewise constant in `r` between momentum cells.
pub fn fisher_r_sweep(ctx: &SweepContext, phis: &[f64], rs: &[f64]) -> Result<Table> {
    ctx.params.check_contained()?;
    if ctx.engine == Engine::Grid {
        return Err(Error::OutOfRange(
            "fisher-r supports the analytic and quadrature engines only".into(),
        ));
    }
    let with_quad = ctx.engine.uses(Engine::Quadrature);
    let mut columns = vec!["phi", "r", "fisher_r_analytic", "removable_limit"];
    if with_quad {
        columns.extend(["fisher_r_quadrature_fd", "max_deviation"]);
    }
    let rows = outer_product(phis, rs)
        .into_par_iter()
        .map(|(phi, r)| {
            let v = analytic::fisher_r(&ctx.params, r, phi)?;
            let mut row: Vec<Cell> = vec![phi.into(), r.into(), v.value.into(), v.removable_limit.into()];
            if with_quad {
                let q = ctx.fisher_r_fd(Engine::Quadrature, r, phi)?;
                row.push(q.into());
                row.push(max_abs_dev(&[v.value, q]).into());
            }
            Ok(row)
        })
        .collect();
    build_table(&columns, rows)
}

/// Rows `(r, φ)` with `p(x0|φ)` from the selected engines.
pub fn prob_sweep(ctx: &SweepContext, rs: &[f64], phis: &[f64]) -> Result<Table> {
    ctx.params.check_contained()?;
    let engines: Vec<Engine> = [Engine::Analytic, Engine::Quadrature, Engine::Grid]
        .into_iter()
        .filter(|&e| ctx.engine.uses(e))
        .collect();
    let mut columns = vec!["r", "phi"];
    for e in &engines {
        columns.push(match e {
            Engine::Analytic => "p_analytic",
            Engine::Quadrature => "p_quadrature",
            _ => "p_grid",
        });
    }
    if engines.len() > 1 {
        columns.push("max_deviation");
    }
    let rows = outer_product(rs, phis)
        .into_par_iter()
        .map(|(r, phi)| {
            let values = engines
                .iter()
                .map(|&e| ctx.prob(e, r, phi))
                .collect::<Result<Vec<f64>>>()?;
            let mut row: Vec<Cell> = vec![r.into(), phi.into()];
            row.extend(values.iter().map(|&v| Cell::from(v)));
            if engines.len() > 1 {
                row.push(max_abs_dev(&values).into());
            }
            Ok(row)
        })
        .collect();
    build_table(&columns, rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crosscheck {
    pub table: Table,
    pub max_deviation: f64,
    pub passed: bool,
}

/// All three engines on every `(r, φ)`, with pairwise deviations against `tol`.
pub fn crosscheck(ctx: &SweepContext, rs: &[f64], phis: &[f64], tol: f64) -> Result<Crosscheck> {
    ctx.params.check_contained()?;
    let columns = [
        "r",
        "phi",
        "p_analytic",
        "p_quadrature",
        "p_grid",
        "dev_analytic_quadrature",
        "dev_analytic_grid",
        "dev_quadrature_grid",
        "max_deviation",
        "within_tol",
    ];
    let results: Vec<Result<(Vec<Cell>, f64)>> = outer_product(rs, phis)
        .into_par_iter()
        .map(|(r, phi)| {
            let a = ctx.prob(Engine::Analytic, r, phi)?;
            let q = ctx.prob(Engine::Quadrature, r, phi)?;
            let g = ctx.prob(Engine::Grid, r, phi)?;
            let dev = max_abs_dev(&[a, q, g]);
            Ok((
                vec![
                    r.into(),
                    phi.into(),
                    a.into(),
                    q.into(),
                    g.into(),
                    (a - q).abs().into(),
                    (a - g).abs().into(),
                    (q - g).abs().into(),
                    dev.into(),
                    (dev <= tol).into(),
                ],
                dev,
            ))
        })
        .collect();
    let mut table = Table::new(columns);
    let mut max_deviation = 0.0f64;
    for res in results {
        let (row, dev) = res?;
        max_deviation = max_deviation.max(dev);
        table.push(row)?;
    }
    Ok(Crosscheck {
        table,
        max_deviation,
        passed: max_deviation <= tol,
    })
}

/// One Deutsch-Jozsa case: parameters, step point and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DjCase {
    pub params: ProcedureParams,
    pub r: f64,
}

/// Balanced and constant at the given parameters, plus a constant with
/// `PΔ = 0.01` where the decision carries almost no information.
pub fn default_dj_cases(p: &ProcedureParams) -> Vec<DjCase> {
    let flat = default_params(p.delta, 0.01 / p.delta);
    vec![
        DjCase { params: *p, r: 0.0 },
        DjCase { params: *p, r: p.big_p },
        DjCase {
            params: flat,
            r: flat.big_p,
        },
    ]
}

/// Single-shot classification statistics; case `i` uses the `i`-th replica seed.
pub fn dj_table(cases: &[DjCase], trials: usize, seed: u64) -> Result<Table> {
    let columns = [
        "p_delta",
        "r",
        "truth",
        "p_x0",
        "trials",
        "seed",
        "classified_constant",
        "classified_balanced",
        "misclassified",
        "empirical_error_rate",
        "analytic_error_rate",
    ];
    let rows = cases
        .par_iter()
        .enumerate()
        .map(|(i, case)| {
            let s = experiments::replica_seed(seed, i as u64);
            let f = PiecewiseBinaryFunction::step(case.params.big_p, case.r)?;
            let summary = experiments::run_dj(&case.params, &f, trials, s)?;
            let (truth, analytic_rate) = match summary.truth {
                Some(experiments::DjVerdict::Constant) => ("constant", Some(1.0 - summary.p_x0)),
                Some(experiments::DjVerdict::Balanced) => ("balanced", Some(summary.p_x0)),
                None => ("neither", None),
            };
            Ok(vec![
                case.params.p_delta().into(),
                case.r.into(),
                truth.into(),
                summary.p_x0.into(),
                trials.into(),
                s.to_string().into(),
                summary.classified_constant.into(),
                summary.classified_balanced.into(),
                summary.misclassified.map_or(Cell::Null, Cell::from),
                summary.error_rate().into(),
                analytic_rate.into(),
            ])
        })
        .collect();
    build_table(&columns, rows)
}

/// Error-propagation `δφ` next to `1/√F` for the step at `r`.
pub fn delta_phi_sweep(p: &ProcedureParams, r: f64, phis: &[f64]) -> Result<Table> {
    let rows = audit_rows(p, r, phis)?
        .into_iter()
        .map(|row| {
            Ok(vec![
                row.phi.into(),
                r.into(),
                row.delta_phi.into(),
                row.fisher.into(),
                (row.fisher > 0.0).then(|| 1.0 / row.fisher.sqrt()).into(),
                row.product.into(),
            ])
        })
        .collect();
    build_table(
        &[
            "phi",
            "r",
            "delta_phi",
            "fisher",
            "inverse_sqrt_fisher",
            "delta_phi_sqrt_fisher",
        ],
        rows,
    )
}

fn audit_rows(p: &ProcedureParams, r: f64, phis: &[f64]) -> Result<Vec<experiments::AuditRow>> {
    phis.par_iter()
        .map(|&phi| experiments::heisenberg_audit(p, r, &[phi]).map(|mut v| v.remove(0)))
        .collect()
}

pub fn audit_table(p: &ProcedureParams, r: f64, phis: &[f64]) -> Result<Table> {
    let rows = audit_rows(p, r, phis)?
        .into_iter()
        .map(|row| {
            Ok(vec![
                row.phi.into(),
                r.into(),
                row.fisher.into(),
                row.variance_bound.into(),
                row.mean_bound_f.into(),
                row.mean_bound_2f.into(),
                row.delta_phi.into(),
                row.product.into(),
                row.optimal.into(),
            ])
        })
        .collect();
    build_table(
        &[
            "phi",
            "r",
            "fisher",
            "variance_bound",
            "mean_bound_f",
            "mean_bound_2f",
            "delta_phi",
            "delta_phi_sqrt_fisher",
            "optimal",
        ],
        rows,
    )
}

/// Step/hat gap by quadrature for each `PΔ` (with `Δ` from `base`).
pub fn gap_table(base: &ProcedureParams, p_deltas: &[f64], phis: &[f64], spec: &QuadratureSpec) -> Result<Table> {
    let rows = outer_product(p_deltas, phis)
        .into_par_iter()
        .map(|(pd, phi)| {
            let p = default_params(base.delta, pd / base.delta);
            let g = quadrature::step_hat_gap(&p, phi, spec)?;
            let rel = (g.gap - g.leading_order_prediction).abs() / g.leading_order_prediction;
            Ok(vec![
                pd.into(),
                phi.into(),
                g.gap.into(),
                g.signed_gap.into(),
                g.leading_order_prediction.into(),
                g.ratio.into(),
                (rel <= 0.1).into(),
            ])
        })
        .collect();
    build_table(
        &[
            "p_delta",
            "phi",
            "gap",
            "signed_gap",
            "series_prediction",
            "ratio",
            "within_10_percent",
        ],
        rows,
    )
}

/// Replicated estimation of `φ_true`, with the exact finite-sample MSE.
pub fn estimate_table(
    p: &ProcedureParams,
    r: f64,
    phi_true: f64,
    shots: usize,
    replicas: usize,
    seed: u64,
) -> Result<Table> {
    let s = experiments::run_estimation(p, r, phi_true, shots, replicas, seed)?;
    let exact = experiments::exact_estimator_mse(p, r, phi_true, shots)?;
    let mut t = Table::new([
        "phi_true",
        "r",
        "n_shots",
        "replicas",
        "seed",
        "mean_phi_hat",
        "empirical_mse",
        "crb",
        "fisher",
        "mse_over_crb",
        "exact_mse",
        "exact_mse_over_crb",
    ]);
    t.push(vec![
        phi_true.into(),
        r.into(),
        shots.into(),
        replicas.into(),
        seed.to_string().into(),
        s.mean_phi_hat.into(),
        s.empirical_mse.into(),
        s.crb.into(),
        s.fisher.into(),
        s.efficiency_ratio().into(),
        exact.into(),
        (exact / s.crb).into(),
    ])?;
    Ok(t)
}

/// Validation issues followed by the derived quantities.
pub fn validate_table(p: &ProcedureParams) -> Table {
    let report = p.validate();
    let mut t = Table::new(["severity", "code", "message"]);
    for issue in &report.issues {
        let sev = format!("{:?}", issue.severity).to_lowercase();
        t.push(vec![sev.into(), issue.code.into(), issue.message.clone().into()])
            .expect("three columns");
    }
    let derived = [
        ("p_delta", p.p_delta()),
        ("flatness", p.flatness()),
        ("containment_ratio", p.containment_ratio()),
    ];
    for (code, v) in derived {
        t.push(vec!["value".into(), code.into(), crate::table::format_real(v).into()])
            .expect("three columns");
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(engine: Engine) -> SweepContext {
        SweepContext::new(ProcedureParams::reference(), engine)
    }

    #[test]
    fn scalars() {
        let p = 2.0;
        assert_eq!(parse_scalar("0.25", p).unwrap(), 0.25);
        assert_eq!(parse_scalar("pi", p).unwrap(), PI);
        assert_eq!(parse_scalar("3pi/8", p).unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_scalar("-P", p).unwrap(), -2.0);
        assert_eq!(parse_scalar("P/4", p).unwrap(), 0.5);
        assert_eq!(parse_scalar("0.5P", p).unwrap(), 1.0);
        assert!(parse_scalar("x", p).is_err());
        assert!(parse_scalar("1/0", p).is_err());
    }

    #[test]
    fn axes() {
        assert_eq!(parse_axis("0:1:3", 1.0).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_axis("0:pi:17", 1.0).unwrap()[16], PI);
        assert_eq!(parse_axis("0,P/2,P", 4.0).unwrap(), vec![0.0, 2.0, 4.0]);
        assert!(parse_axis("0:1:1", 1.0).is_err());
        assert!(parse_axis("0:1", 1.0).is_err());
        assert!(parse_axis("", 1.0).is_err());
    }

    #[test]
    fn open_axis_excludes_ends() {
        let v = open_r_axis(3.0, 5);
        assert_eq!(v.len(), 5);
        assert!(v[0] > 0.0 && v[4] < 3.0);
    }

    #[test]
    fn engine_names() {
        assert_eq!("all".parse::<Engine>().unwrap(), Engine::All);
        assert!("fft".parse::<Engine>().is_err());
    }

    #[test]
    fn prob_sweep_all_engines_agree() {
        let c = ctx(Engine::All);
        let p = c.params.big_p;
        let t = prob_sweep(&c, &[0.0, p / 4.0], &[0.0, 0.7, FRAC_PI_2]).unwrap();
        assert_eq!(t.rows().len(), 6);
        let dev = t.column("max_deviation").unwrap();
        assert!(dev.iter().all(|d| d.unwrap() <= 1e-4));
    }

    #[test]
    fn fisher_phi_rows_in_grid_order() {
        let c = ctx(Engine::Analytic);
        let t = fisher_phi_sweep(&c, &[0.0, 1.0], &[0.1, 0.2, 0.3]).unwrap();
        let r = t.column("r").unwrap();
        let phi = t.column("phi").unwrap();
        assert_eq!(
            r,
            vec![Some(0.0), Some(0.0), Some(0.0), Some(1.0), Some(1.0), Some(1.0)]
        );
        assert_eq!(phi[3], Some(0.1));
    }

    #[test]
    fn fisher_phi_quadrature_fd_matches() {
        let c = ctx(Engine::Quadrature);
        let t = fisher_phi_sweep(&c, &[0.3], &[0.4, 1.0, 2.0]).unwrap();
        assert!(t.column("max_deviation").unwrap().iter().all(|d| d.unwrap() < 1e-6));
    }

    #[test]
    fn fisher_r_quadrature_fd_matches() {
        let c = ctx(Engine::All);
        let p = c.params.big_p;
        let t = fisher_r_sweep(&c, &[FRAC_PI_4], &[0.2 * p, 0.6 * p]).unwrap();
        assert!(t.column("max_deviation").unwrap().iter().all(|d| d.unwrap() < 1e-5));
        assert!(fisher_r_sweep(&ctx(Engine::Grid), &[FRAC_PI_4], &[0.2 * p]).is_err());
    }

    #[test]
    fn crosscheck_single_point() {
        let c = ctx(Engine::All);
        let out = crosscheck(&c, &[0.0], &[0.0], 1e-4).unwrap();
        let e = c.params.flatness();
        for col in ["p_analytic", "p_quadrature", "p_grid"] {
            assert!((out.table.column(col).unwrap()[0].unwrap() - e).abs() < 1e-4);
        }
        assert!(out.passed);
        let tight = crosscheck(&c, &[0.0], &[0.0], 0.0).unwrap();
        assert!(!tight.passed);
    }

    #[test]
    fn dj_default_rows() {
        let p = ProcedureParams::reference();
        let t = dj_table(&default_dj_cases(&p), 20_000, 7).unwrap();
        assert_eq!(t.rows().len(), 3);
        let mis = t.column("misclassified").unwrap();
        assert_eq!(mis[0], Some(0.0));
        let rate = t.column("analytic_error_rate").unwrap();
        assert!(rate[2].unwrap() > 0.999);
    }

    #[test]
    fn estimate_crb_column() {
        let p = ProcedureParams::reference();
        let t = estimate_table(&p, 0.0, FRAC_PI_4, 100, 50, 1).unwrap();
        let crb = t.column("crb").unwrap()[0].unwrap();
        let f = analytic::fisher_phi(&p, 0.0, FRAC_PI_4).unwrap().fisher;
        assert!((crb - 1.0 / (100.0 * f)).abs() < 1e-15);
    }

    #[test]
    fn gap_rows() {
        let p = ProcedureParams::reference();
        let t = gap_table(&p, &[0.05, 0.1], &[FRAC_PI_2], &QuadratureSpec::default()).unwrap();
        assert_eq!(t.rows().len(), 2);
    }

    #[test]
    fn validate_lists_derived_values() {
        let t = validate_table(&ProcedureParams::reference());
        let codes: Vec<_> = t.rows().iter().map(|r| r[1].clone()).collect();
        assert!(codes.contains(&Cell::Text("flatness".into())));
    }
}
