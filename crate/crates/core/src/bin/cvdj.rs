//! `cvdj`: sweeps, cross-checks and Monte-Carlo runs as CSV or JSON tables.
//!
//! Exit status: 0 success, 2 usage or parameter error, 3 crosscheck tolerance
//! exceeded, 1 anything else.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cvdj::params::commensurate_half_domain;
use cvdj::sweep::{self, Engine, SweepContext};
use cvdj::table::{Format, Table};
use cvdj::{Error, ProcedureParams};

const COMMON_COLUMNS: &str = "Reals use 17 significant digits. JSON output is an array of objects with the CSV column names as keys; non-finite reals are null.";

#[derive(Parser)]
#[command(
    name = "cvdj",
    version,
    about = "Continuous-variable phase estimation and Deutsch-Jozsa tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fisher information about φ over (r, φ)
    #[command(
        after_long_help = "Columns: r, phi, fisher_analytic, removable_limit, variance_bound (16 Var f), \
mean_bound_f (4<f>^2), mean_bound_2f (16<f>^2), then fisher_quadrature_fd / fisher_grid_fd and \
max_deviation for non-analytic engines. Default r = {0, P/8, P/4, P/2, P}, phi = 0:pi:129."
    )]
    FisherPhi(Opts),
    /// Fisher information about r over (φ, r)
    #[command(after_long_help = "Columns: phi, r, fisher_r_analytic, removable_limit, and with \
--engine quadrature|all also fisher_r_quadrature_fd, max_deviation. The grid engine is rejected. \
Default phi = {pi/2, 5pi/12, pi/3, pi/4, pi/8}, r = 200 interior points of (0, P).")]
    FisherR(Opts),
    /// Outcome probability p(x0|φ) over (r, φ)
    #[command(after_long_help = "Columns: r, phi, p_analytic | p_quadrature | p_grid per engine, \
max_deviation when more than one engine. Default r = {0, P/8, P/4, P/2, P}, phi = {k pi/16}.")]
    Prob(Opts),
    /// Single-shot Deutsch-Jozsa classification at φ = π/2
    #[command(
        after_long_help = "Columns: p_delta, r, truth, p_x0, trials, seed, classified_constant, \
classified_balanced, misclassified, empirical_error_rate, analytic_error_rate. Without --r the rows are \
balanced, constant, and constant at P*delta = 0.01. Default trials 100000."
    )]
    Dj(Opts),
    /// Error-propagation δφ next to 1/√F
    #[command(after_long_help = "Columns: phi, r, delta_phi, fisher, inverse_sqrt_fisher, \
delta_phi_sqrt_fisher. Default r = 0, phi = 0:pi:17.")]
    DeltaPhi(Opts),
    /// Heisenberg-limit audit: F, both generator bounds, δφ·√F
    #[command(
        after_long_help = "Columns: phi, r, fisher, variance_bound, mean_bound_f, mean_bound_2f, \
delta_phi, delta_phi_sqrt_fisher, optimal (|delta_phi sqrt F - 1| <= 1e-3). Default r = 0, phi = 0:pi:17."
    )]
    Audit(Opts),
    /// Step/hat probability gap against its small-PΔ series
    #[command(
        after_long_help = "Columns: p_delta, phi, gap, signed_gap, series_prediction, ratio, \
within_10_percent. Default p-delta = {0.05, 0.1}, phi = pi/2."
    )]
    Gap(Opts),
    /// Replicated estimation of φ compared with the Cramér-Rao bound
    #[command(
        after_long_help = "Columns: phi_true, r, n_shots, replicas, seed, mean_phi_hat, empirical_mse, \
crb, fisher, mse_over_crb, exact_mse, exact_mse_over_crb. Default phi = pi/4, r = 0, shots 100, \
replicas 2000."
    )]
    Estimate(Opts),
    /// Three-engine agreement on p(x0|φ); exit 3 when above --tol
    #[command(
        after_long_help = "Columns: r, phi, p_analytic, p_quadrature, p_grid, dev_analytic_quadrature, \
dev_analytic_grid, dev_quadrature_grid, max_deviation, within_tol. Default r = {0, P/8, P/4, P/2, P}, \
phi = {k pi/16}, tol 1e-4."
    )]
    Crosscheck(Opts),
    /// Parameter diagnostics; exit 2 on hard errors
    #[command(after_long_help = "Columns: severity, code, message.")]
    Validate(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Analytic,
    Quadrature,
    Grid,
    All,
}

#[derive(Args)]
#[command(after_help = COMMON_COLUMNS)]
struct Opts {
    /// Gaussian width Δ [default: 1/√2]
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Register centre x0
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x0: f64,
    /// Position half-domain T [default: aligned with P for the grid engine]
    #[arg(long, allow_hyphen_values = true)]
    big_t: Option<f64>,
    /// Momentum half-domain P [default: 3/(2Δ)]
    #[arg(long, allow_hyphen_values = true)]
    big_p: Option<f64>,
    /// Measurement precision ε [default: Δ]
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Step points: list `a,b,c` or `start:stop:count`; accepts `P` and `pi` multiples
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Phases, same syntax as --r
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// PΔ values for `gap`
    #[arg(long)]
    p_delta: Option<String>,
    /// Grid points for the grid engine
    #[arg(long, default_value_t = sweep::DEFAULT_GRID_N)]
    grid_n: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 2000)]
    replicas: usize,
    #[arg(long, default_value_t = 100)]
    shots: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EngineArg::Analytic)]
    engine: EngineArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Crosscheck tolerance on the largest pairwise deviation
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Preset for the F(φ) curves: Δ = 1/√2, P = 3/(2Δ), r ∈ {0, P/8, P/4, P/2, P}
    #[arg(long, conflicts_with_all = ["delta", "big_p", "big_t", "r", "fig5"])]
    fig4: bool,
    /// Preset for the F(r) curves: Δ = 1/√2, P = 3/(2Δ), φ ∈ {π/2, 5π/12, π/3, π/4, π/8}
    #[arg(long, conflicts_with_all = ["delta", "big_p", "big_t", "phi"])]
    fig5: bool,
}

enum Failure {
    Usage(String),
    Tolerance(f64, f64),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::QuadratureNotConverged { .. } | Error::Grid(_) | Error::SingularDerivative { .. } => {
                Failure::Other(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl Opts {
    fn params(&self) -> ProcedureParams {
        if self.fig4 || self.fig5 {
            return ProcedureParams::reference();
        }
        let delta = self.delta.unwrap_or(FRAC_1_SQRT_2);
        let big_p = self.big_p.unwrap_or(1.5 / delta);
        let big_t = self.big_t.unwrap_or_else(|| commensurate_half_domain(big_p, 8, 64));
        ProcedureParams::new(self.x0, delta, big_t, big_p).with_epsilon(self.epsilon.unwrap_or(delta))
    }

    fn engine(&self) -> Engine {
        match self.engine {
            EngineArg::Analytic => Engine::Analytic,
            EngineArg::Quadrature => Engine::Quadrature,
            EngineArg::Grid => Engine::Grid,
            EngineArg::All => Engine::All,
        }
    }

    fn context(&self) -> SweepContext {
        let mut ctx = SweepContext::new(self.params(), self.engine());
        ctx.grid_n = self.grid_n;
        ctx
    }

    fn axis(
        &self,
        given: &Option<String>,
        big_p: f64,
        default: impl FnOnce() -> Vec<f64>,
    ) -> Result<Vec<f64>, Failure> {
        match given {
            Some(s) => Ok(sweep::parse_axis(s, big_p)?),
            None => Ok(default()),
        }
    }

    fn r_axis(&self, big_p: f64, default: impl FnOnce() -> Vec<f64>) -> Result<Vec<f64>, Failure> {
        if self.fig4 {
            return Ok(sweep::fig4_r_values(big_p));
        }
        self.axis(&self.r, big_p, default)
    }

    fn phi_axis(&self, big_p: f64, default: impl FnOnce() -> Vec<f64>) -> Result<Vec<f64>, Failure> {
        if self.fig5 {
            return Ok(sweep::fig5_phi_values());
        }
        self.axis(&self.phi, big_p, default)
    }

    fn single(&self, given: &Option<String>, big_p: f64, default: f64, name: &str) -> Result<f64, Failure> {
        let v = self.axis(given, big_p, || vec![default])?;
        match v.as_slice() {
            [x] => Ok(*x),
            _ => Err(Failure::Usage(format!("--{name} takes a single value here"))),
        }
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }

    fn emit(&self, table: &Table) -> Result<(), Failure> {
        let write = |w: &mut dyn Write| -> Result<(), Failure> {
            table
                .write(self.format(), &mut *w)
                .map_err(|e| Failure::Other(e.to_string()))?;
            Ok(w.flush()?)
        };
        match &self.out {
            Some(path) => write(&mut BufWriter::new(File::create(path)?)),
            None => write(&mut BufWriter::new(io::stdout().lock())),
        }
    }
}

fn phi_full(count: usize) -> impl FnOnce() -> Vec<f64> {
    move || sweep::linspace(0.0, std::f64::consts::PI, count).expect("count ≥ 2")
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::FisherPhi(o) => {
            let ctx = o.context();
            let rs = o.r_axis(ctx.params.big_p, || sweep::fig4_r_values(ctx.params.big_p))?;
            let phis = o.phi_axis(ctx.params.big_p, phi_full(129))?;
            o.emit(&sweep::fisher_phi_sweep(&ctx, &rs, &phis)?)
        }
        Command::FisherR(o) => {
            let ctx = o.context();
            let phis = o.phi_axis(ctx.params.big_p, sweep::fig5_phi_values)?;
            let rs = o.r_axis(ctx.params.big_p, || sweep::open_r_axis(ctx.params.big_p, 200))?;
            o.emit(&sweep::fisher_r_sweep(&ctx, &phis, &rs)?)
        }
        Command::Prob(o) => {
            let ctx = o.context();
            let rs = o.r_axis(ctx.params.big_p, || sweep::fig4_r_values(ctx.params.big_p))?;
            let phis = o.phi_axis(ctx.params.big_p, sweep::crosscheck_phi_values)?;
            o.emit(&sweep::prob_sweep(&ctx, &rs, &phis)?)
        }
        Command::Dj(o) => {
            let p = o.params();
            let cases = match (&o.r, o.fig4) {
                (None, false) => sweep::default_dj_cases(&p),
                _ => o
                    .r_axis(p.big_p, Vec::new)?
                    .into_iter()
                    .map(|r| sweep::DjCase { params: p, r })
                    .collect(),
            };
            o.emit(&sweep::dj_table(&cases, o.trials, o.seed)?)
        }
        Command::DeltaPhi(o) => {
            let p = o.params();
            let r = o.single(&o.r, p.big_p, 0.0, "r")?;
            let phis = o.phi_axis(p.big_p, phi_full(17))?;
            o.emit(&sweep::delta_phi_sweep(&p, r, &phis)?)
        }
        Command::Audit(o) => {
            let p = o.params();
            let r = o.single(&o.r, p.big_p, 0.0, "r")?;
            let phis = o.phi_axis(p.big_p, phi_full(17))?;
            o.emit(&sweep::audit_table(&p, r, &phis)?)
        }
        Command::Gap(o) => {
            let p = o.params();
            let pds = o.axis(&o.p_delta, p.big_p, || vec![0.05, 0.1])?;
            let phis = o.phi_axis(p.big_p, || vec![FRAC_PI_2])?;
            o.emit(&sweep::gap_table(&p, &pds, &phis, &Default::default())?)
        }
        Command::Estimate(o) => {
            let p = o.params();
            let r = o.single(&o.r, p.big_p, 0.0, "r")?;
            let phi = o.single(&o.phi, p.big_p, FRAC_PI_4, "phi")?;
            o.emit(&sweep::estimate_table(&p, r, phi, o.shots, o.replicas, o.seed)?)
        }
        Command::Crosscheck(o) => {
            let mut ctx = o.context();
            ctx.engine = Engine::All;
            let rs = o.r_axis(ctx.params.big_p, || sweep::fig4_r_values(ctx.params.big_p))?;
            let phis = o.phi_axis(ctx.params.big_p, sweep::crosscheck_phi_values)?;
            let out = sweep::crosscheck(&ctx, &rs, &phis, o.tol)?;
            o.emit(&out.table)?;
            if out.passed {
                Ok(())
            } else {
                Err(Failure::Tolerance(out.max_deviation, o.tol))
            }
        }
        Command::Validate(o) => {
            let p = o.params();
            o.emit(&sweep::validate_table(&p))?;
            p.check().map_err(Failure::from)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("cvdj: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Tolerance(dev, tol)) => {
            eprintln!("cvdj: largest deviation {dev:e} exceeds tolerance {tol:e}");
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("cvdj: {msg}");
            ExitCode::from(1)
        }
    }
}
