//! Command implementations behind the `affine-halfline` binary.
//!
//! Each command returns a [`CommandOutput`]: a table for the output file,
//! human-readable summary lines, and the list of tolerance failures that
//! decide the exit code.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytic::{free_eigenfunction, AnalyticEigenstate, Branch};
use crate::eigensolve::{build_hamiltonian, model_grid, solve_spectrum, sweep_b, SpectrumResult};
use crate::error::{Error, Result};
use crate::model::{
    commutator_defect, standard_test_function, HalfLineGrid, PhysicalParams, SpikedPotential,
};
use crate::output::{Cell, Header, OutputFormat, Table, TOOL_NAME, TOOL_VERSION};
use crate::specfun::{bessel_j1_zero, build_quadrature, QuadratureKind};
use crate::verify::{
    closure_bump, closure_check, commutator_report, constants_report, identity_deviation,
    lemma_report, orthonormality_matrix, residual_report, ResidualStates, CLOSURE_BUMP_ID,
    CLOSURE_K_LADDER, CLOSURE_WINDOW,
};

#[derive(Debug, Parser)]
#[command(
    name = "affine-halfline",
    version,
    about = "Affine quantization on the half-line"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues, compared with closed forms where they exist.
    Spectrum(SpectrumArgs),
    /// Sampled analytic and numeric eigenfunction n.
    Eigenfunc(EigenfuncArgs),
    /// Spectra of the shifted oscillator over a range of b.
    SweepB(SweepArgs),
    /// Cross-checks between closed forms and numerics.
    Verify(VerifyArgs),
}

impl Command {
    pub fn run_config(&self) -> &RunConfig {
        match self {
            Command::Spectrum(a) => &a.run,
            Command::Eigenfunc(a) => &a.run,
            Command::SweepB(a) => &a.run,
            Command::Verify(a) => &a.run,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Free affine particle, (3/4)/x² on (0, xmax).
    Free,
    /// Half harmonic oscillator, (3/4)/x² + λ²x².
    HalfHo,
    /// Shifted oscillator, (3/4)/(x+b)² + λ²x² on (−b, xmax).
    Shifted,
}

/// Flags shared by every command. Runs are fully deterministic.
#[derive(Clone, Debug, Args, Serialize)]
pub struct RunConfig {
    #[arg(long, value_enum, default_value_t = ModelKind::HalfHo)]
    pub model: ModelKind,
    /// Endpoint shift for the shifted model.
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Right Dirichlet end of the physical interval.
    #[arg(long, default_value_t = 12.0)]
    pub xmax: f64,
    /// Interior grid points.
    #[arg(long, default_value_t = 8000)]
    pub npoints: usize,
    /// Number of eigenvalues.
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    /// Relative (spectrum) or absolute (eigenfunc) tolerance against closed forms.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub output: OutputFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report ε = 2mE/ħ² instead of physical energies.
    #[arg(long)]
    pub dimensionless: bool,
}

impl RunConfig {
    pub fn params(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.mass, self.omega, self.hbar)
    }

    /// Rejects flag combinations that cannot describe a valid run.
    pub fn validate(&self) -> Result<()> {
        let params = self.params()?;
        if self.model != ModelKind::Free && !(params.lambda() > 0.0) {
            return Err(Error::InvalidParameter(
                "oscillator models need omega > 0".into(),
            ));
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::Domain {
                what: "b",
                value: self.b,
            });
        }
        if self.model != ModelKind::Shifted && self.b != 0.0 {
            return Err(Error::InvalidParameter(
                "--b is only meaningful with --model shifted".into(),
            ));
        }
        HalfLineGrid::new(self.xmax, self.npoints)?;
        if self.count == 0 || self.count > self.npoints {
            return Err(Error::InvalidParameter(format!(
                "count must be in 1..={}",
                self.npoints
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain {
                what: "tol",
                value: self.tol,
            });
        }
        Ok(())
    }

    fn potential(&self, params: &PhysicalParams) -> SpikedPotential {
        match self.model {
            ModelKind::Free => SpikedPotential::free_affine(),
            ModelKind::HalfHo => SpikedPotential::half_oscillator(params),
            ModelKind::Shifted => SpikedPotential::shifted_oscillator(params, self.b),
        }
    }

    fn has_closed_form(&self) -> bool {
        self.model != ModelKind::Shifted || self.b == 0.0
    }

    fn energy(&self, params: &PhysicalParams, eps: f64) -> f64 {
        if self.dimensionless {
            eps
        } else {
            params.to_physical_energy(eps)
        }
    }

    fn units(&self) -> String {
        format!(
            "hbar={} mass={} omega={} energies={} x=physical length",
            self.hbar,
            self.mass,
            self.omega,
            if self.dimensionless {
                "dimensionless eps=2mE/hbar^2"
            } else {
                "physical E"
            }
        )
    }

    fn header<C: Serialize>(&self, command: &str, config: C) -> Header<C> {
        Header {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: command.to_string(),
            config,
            units: self.units(),
            grid: format!(
                "model={} b={} xmax={} npoints={} uniform interior nodes, Dirichlet ends",
                self.model
                    .to_possible_value()
                    .map_or_else(String::new, |v| v.get_name().to_string()),
                self.b,
                self.xmax,
                self.npoints
            ),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Args, Serialize)]
pub struct EigenfuncArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    /// State index.
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    /// Approximate number of sampled rows.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    #[arg(long, default_value_t = 0.0)]
    pub bfrom: f64,
    #[arg(long, default_value_t = 10.0)]
    pub bto: f64,
    /// Number of equally spaced b values, endpoints included.
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    /// Explicit comma-separated b values; overrides bfrom/bto/steps.
    #[arg(long, value_delimiter = ',')]
    pub bvalues: Option<Vec<f64>>,
}

impl SweepArgs {
    pub fn b_values(&self) -> Result<Vec<f64>> {
        if let Some(list) = &self.bvalues {
            if list.is_empty() {
                return Err(Error::InvalidParameter("empty --bvalues".into()));
            }
            return Ok(list.clone());
        }
        if !(self.bfrom >= 0.0 && self.bto > self.bfrom) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= bfrom < bto, got {} and {}",
                self.bfrom, self.bto
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidParameter("--steps must be at least 2".into()));
        }
        let span = self.bto - self.bfrom;
        let last = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|i| self.bfrom + span * i as f64 / last)
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyWhich {
    Lemma,
    Closure,
    Commutator,
    Residuals,
    All,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    #[arg(value_enum, default_value_t = VerifyWhich::All)]
    pub which: VerifyWhich,
}

/// Table plus diagnostics produced by one command.
#[derive(Debug)]
pub struct CommandOutput {
    pub header: Header<serde_json::Value>,
    pub table: Table,
    pub summary: Vec<String>,
    pub failures: Vec<String>,
}

impl CommandOutput {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Validates the shared flags, then runs the command.
pub fn execute(command: &Command) -> Result<CommandOutput> {
    match command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Eigenfunc(a) => cmd_eigenfunc(a),
        Command::SweepB(a) => cmd_sweep_b(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn solve_model(
    run: &RunConfig,
    params: &PhysicalParams,
    count: usize,
    vectors: bool,
) -> Result<SpectrumResult> {
    let pot = run.potential(params);
    let grid = model_grid(&pot, run.xmax, run.npoints)?;
    solve_spectrum(&build_hamiltonian(&pot, &grid)?, count, vectors)
}

/// Closed-form dimensionless eigenvalue ε_n, when the model has one.
fn analytic_eps(run: &RunConfig, params: &PhysicalParams, n: usize) -> Result<Option<f64>> {
    if !run.has_closed_form() {
        return Ok(None);
    }
    Ok(Some(match run.model {
        ModelKind::Free => {
            let k = bessel_j1_zero(n as u32 + 1)? / run.xmax;
            k * k
        }
        _ => {
            let s = AnalyticEigenstate::new(n as u32, Branch::FirstCondition, params)?;
            params.to_dimensionless_energy(s.energy())
        }
    }))
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<CommandOutput> {
    let run = &args.run;
    run.validate()?;
    let params = run.params()?;
    let spec = solve_model(run, &params, run.count, false)?;
    let prefix = if run.dimensionless { "eps" } else { "E" };
    let mut table = Table::new([
        "n".to_string(),
        format!("{prefix}_numeric"),
        format!("{prefix}_analytic"),
        "abs_err".to_string(),
        "rel_err".to_string(),
    ]);
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for (n, &eps) in spec.eigenvalues.iter().enumerate() {
        let numeric = run.energy(&params, eps);
        let analytic = analytic_eps(run, &params, n)?.map(|e| run.energy(&params, e));
        let (abs_err, rel_err) = match analytic {
            Some(a) => ((numeric - a).abs(), Some((numeric - a).abs() / a.abs())),
            None => (f64::NAN, None),
        };
        if let Some(r) = rel_err {
            if r > run.tol {
                failures.push(format!("n = {n}: rel_err {r:e} exceeds tol {:e}", run.tol));
            }
        }
        summary.push(match analytic {
            Some(a) => format!(
                "n={n} {prefix}={numeric:.10} analytic={a:.10} rel_err={:.3e}",
                rel_err.unwrap_or(0.0)
            ),
            None => format!("n={n} {prefix}={numeric:.10}"),
        });
        table.push(vec![
            n.into(),
            numeric.into(),
            analytic.into(),
            analytic.map(|_| abs_err).into(),
            rel_err.into(),
        ]);
    }
    Ok(CommandOutput {
        header: run.header("spectrum", serde_json::to_value(args)?),
        table,
        summary,
        failures,
    })
}

pub fn cmd_eigenfunc(args: &EigenfuncArgs) -> Result<CommandOutput> {
    let run = &args.run;
    run.validate()?;
    if args.samples == 0 {
        return Err(Error::InvalidParameter("--samples must be positive".into()));
    }
    if args.n >= run.npoints {
        return Err(Error::InvalidParameter(format!(
            "state index {} needs more than {} grid points",
            args.n, run.npoints
        )));
    }
    let params = run.params()?;
    let spec = solve_model(run, &params, args.n + 1, true)?;
    let pot = run.potential(&params);
    let grid = model_grid(&pot, run.xmax, run.npoints)?;
    let numeric = spec
        .eigenvectors
        .as_ref()
        .and_then(|v| v.get(args.n))
        .ok_or_else(|| Error::Solver("eigenvector missing".into()))?;

    let analytic: Option<Box<dyn Fn(f64) -> Result<f64>>> = if !run.has_closed_form() {
        None
    } else if run.model == ModelKind::Free {
        let k = bessel_j1_zero(args.n as u32 + 1)? / run.xmax;
        // normalize φ_k on the truncated interval by composite Gauss–Legendre
        let panels = 64;
        let width = run.xmax / panels as f64;
        let mut norm_sq = 0.0;
        for p in 0..panels {
            let lo = width * p as f64;
            let rule = build_quadrature(
                QuadratureKind::GaussLegendreMappedHalfline,
                32,
                (lo, lo + width),
            )?;
            norm_sq += rule.integrate(|x| free_eigenfunction(k, x).powi(2));
        }
        let scale = 1.0 / norm_sq.sqrt();
        Some(Box::new(move |x| Ok(scale * free_eigenfunction(k, x))))
    } else {
        let s = AnalyticEigenstate::new(args.n as u32, Branch::FirstCondition, &params)?;
        Some(Box::new(move |x| s.eval(x)))
    };

    let mut max_diff = 0.0_f64;
    let mut analytic_values = Vec::with_capacity(grid.npoints());
    for (i, u) in grid.nodes().enumerate() {
        let a = match &analytic {
            Some(f) => {
                let v = f(u)?;
                max_diff = max_diff.max((v - numeric.values()[i]).abs());
                Some(v)
            }
            None => None,
        };
        analytic_values.push(a);
    }

    let stride = (grid.npoints() / args.samples).max(1);
    let mut table = Table::new(["x", "phi_analytic", "phi_numeric", "diff"]);
    for i in (0..grid.npoints()).step_by(stride) {
        let x = grid.node(i) - pot.b;
        let num = numeric.values()[i];
        let a = analytic_values[i];
        table.push(vec![
            x.into(),
            a.into(),
            num.into(),
            a.map(|v| num - v).into(),
        ]);
    }

    let numeric_nodes = numeric.sign_changes(1e-8);
    let mut summary = vec![format!(
        "state n={} numeric sign changes={numeric_nodes}",
        args.n
    )];
    let mut failures = Vec::new();
    if analytic.is_some() {
        let analytic_only: Vec<f64> = analytic_values.iter().map(|v| v.unwrap_or(0.0)).collect();
        let analytic_nodes = crate::model::count_sign_changes(&analytic_only, 1e-8);
        summary.push(format!(
            "max |phi_numeric - phi_analytic| = {max_diff:.3e}, analytic sign changes={analytic_nodes}"
        ));
        if max_diff > run.tol {
            failures.push(format!("max |diff| {max_diff:e} exceeds tol {:e}", run.tol));
        }
    }
    Ok(CommandOutput {
        header: run.header("eigenfunc", serde_json::to_value(args)?),
        table,
        summary,
        failures,
    })
}

pub fn cmd_sweep_b(args: &SweepArgs) -> Result<CommandOutput> {
    let run = &args.run;
    run.validate()?;
    let params = run.params()?;
    if !(params.lambda() > 0.0) {
        return Err(Error::InvalidParameter("sweep-b needs omega > 0".into()));
    }
    let bvalues = args.b_values()?;
    let rows = sweep_b(&bvalues, run.count, &params, run.xmax, run.npoints)?;

    let prefix = if run.dimensionless { "eps" } else { "E" };
    let mut columns = vec!["b".to_string()];
    columns.extend((0..run.count).map(|n| format!("{prefix}_{n}")));
    let mut table = Table::new(columns);
    for r in &rows {
        let mut cells = vec![Cell::Real(r.b)];
        cells.extend(
            r.eigenvalues
                .iter()
                .map(|&e| Cell::Real(run.energy(&params, e))),
        );
        table.push(cells);
    }
    // reference rows: full-line oscillator (n+½)ħω and half oscillator 2(n+1)ħω
    let reference = |label: &str, per_level: &dyn Fn(usize) -> f64| -> Vec<Cell> {
        let mut cells = vec![Cell::Text(label.to_string())];
        cells.extend((0..run.count).map(|n| {
            let e = per_level(n) * params.energy_scale();
            Cell::Real(if run.dimensionless {
                params.to_dimensionless_energy(e)
            } else {
                e
            })
        }));
        cells
    };
    table.push(reference("ref:b=inf", &|n| n as f64 + 0.5));
    table.push(reference("ref:b=0", &|n| 2.0 * (n as f64 + 1.0)));

    let e0: Vec<f64> = rows.iter().map(|r| r.eigenvalues[0]).collect();
    let monotone = e0.windows(2).all(|w| w[1] <= w[0]);
    let mut summary: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "b={} {prefix}_0={:.10}",
                r.b,
                run.energy(&params, r.eigenvalues[0])
            )
        })
        .collect();
    summary.push(format!(
        "{prefix}_0 monotone non-increasing in b: {monotone}"
    ));
    Ok(CommandOutput {
        header: run.header("sweep-b", serde_json::to_value(args)?),
        table,
        summary,
        failures: Vec::new(),
    })
}

/// One verification outcome. Negative controls pass when the observed
/// value is above the threshold.
struct Check {
    name: String,
    observed: f64,
    threshold: f64,
    passed: bool,
}

impl Check {
    fn at_most(name: &str, observed: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            threshold,
            passed: observed <= threshold,
        }
    }

    fn at_least(name: &str, observed: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            threshold,
            passed: observed >= threshold,
        }
    }
}

/// Tolerances used by `verify`.
pub mod thresholds {
    pub const LEMMA_ABS: f64 = 1e-10;
    pub const LEMMA_NMAX: u32 = 10;
    pub const LEMMA_QUAD_POINTS: usize = 128;
    pub const CONSTANTS_REL: f64 = 1e-12;
    pub const BRANCH_ABS: f64 = 1e-14;
    pub const GRAM_MAX: f64 = 1e-8;
    pub const CLOSURE_IMPROVEMENT: f64 = 10.0;
    /// Allowed relative growth between consecutive closure errors.
    pub const CLOSURE_MONOTONE_SLACK: f64 = 1e-2;
    pub const COMMUTATOR_ORDER: f64 = 2.0;
    pub const COMMUTATOR_ORDER_TOL: f64 = 0.3;
    pub const COMMUTATOR_LADDER: [usize; 3] = [1000, 2000, 4000];
    pub const RESIDUAL_ORDER_TOL: f64 = 0.2;
    pub const MATRIX_RESIDUAL: f64 = 1e-8;
    pub const NEGATIVE_CONTROL_SHIFT: f64 = 0.1;
    pub const NEGATIVE_CONTROL_FLOOR: f64 = 0.05;
}

fn lemma_checks(params: &PhysicalParams) -> Result<Vec<Check>> {
    use thresholds::*;
    let report = lemma_report(LEMMA_NMAX, 2.0, 1.0, LEMMA_QUAD_POINTS)?;
    let wrong_rate = report
        .entries
        .iter()
        .filter(|e| e.n == e.m)
        .map(|e| Ok((crate::analytic::landau_integral(e.n, e.m, 2.0, 1.05)? - e.quadrature).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let constants = constants_report(LEMMA_NMAX, params)?
        .iter()
        .map(|c| c.max_rel_diff())
        .fold(0.0, f64::max);
    let gram = identity_deviation(&orthonormality_matrix(LEMMA_NMAX, params)?);

    let xmax = crate::verify::DEFAULT_XMAX / params.lambda().sqrt();
    let mut branch = 0.0_f64;
    for n in 0..=LEMMA_NMAX {
        let first = AnalyticEigenstate::new(n, Branch::FirstCondition, params)?;
        let second = AnalyticEigenstate::new(n, Branch::SecondCondition, params)?;
        for i in 1..=1000 {
            let x = xmax * i as f64 / 1000.0;
            branch = branch.max((first.eval(x)? - second.eval(x)?).abs());
        }
    }
    Ok(vec![
        Check::at_most("lemma_vs_quadrature", report.max_abs_diff, LEMMA_ABS),
        Check::at_least("lemma_negative_control_rate", wrong_rate, LEMMA_ABS),
        Check::at_most("normalization_constants_rel", constants, CONSTANTS_REL),
        Check::at_most("branch_equivalence", branch, BRANCH_ABS),
        Check::at_most("gram_minus_identity", gram, GRAM_MAX),
    ])
}

fn closure_checks(run: &RunConfig) -> Result<Vec<Check>> {
    use thresholds::*;
    let report = closure_check(
        closure_bump,
        CLOSURE_BUMP_ID,
        &CLOSURE_K_LADDER,
        run.xmax,
        CLOSURE_WINDOW,
    )?;
    let worst_growth = report
        .error_curve
        .windows(2)
        .map(|w| w[1].1 / w[0].1)
        .fold(0.0, f64::max);
    let early = closure_check(
        closure_bump,
        CLOSURE_BUMP_ID,
        &[1.0],
        run.xmax,
        CLOSURE_WINDOW,
    )?;
    let mut checks = vec![
        Check::at_least(
            "closure_improvement_K10_to_K40",
            report.improvement(),
            CLOSURE_IMPROVEMENT,
        ),
        Check::at_most(
            "closure_error_growth_ratio",
            worst_growth,
            1.0 + CLOSURE_MONOTONE_SLACK,
        ),
        Check::at_least(
            "closure_negative_control_K1",
            early.reconstruction_error,
            1e-2,
        ),
    ];
    for (k, e) in &report.error_curve {
        checks.push(Check::at_least(&format!("closure_error_K{k}"), *e, 0.0));
    }
    Ok(checks)
}

fn commutator_checks(run: &RunConfig, params: &PhysicalParams) -> Result<Vec<Check>> {
    use thresholds::*;
    let report = commutator_report(&COMMUTATOR_LADDER, run.xmax, params)?;
    let mut checks: Vec<Check> = report
        .orders
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Check::at_most(
                &format!(
                    "commutator_order_{}_{}",
                    COMMUTATOR_LADDER[i],
                    COMMUTATOR_LADDER[i + 1]
                ),
                (p - COMMUTATOR_ORDER).abs(),
                COMMUTATOR_ORDER_TOL,
            )
        })
        .collect();
    // with the wrong coefficient the defect must not vanish under refinement
    let fine = HalfLineGrid::new(run.xmax, *COMMUTATOR_LADDER.last().unwrap())?;
    let wrong = commutator_defect(&standard_test_function(fine), params, 2.0);
    checks.push(Check::at_least("commutator_negative_control", wrong, 1e-2));
    Ok(checks)
}

fn residual_checks(run: &RunConfig, params: &PhysicalParams) -> Result<Vec<Check>> {
    use thresholds::*;
    let grid = HalfLineGrid::new(run.xmax, run.npoints)?;
    let states = ResidualStates::HalfOscillator {
        params: *params,
        count: 5,
    };
    let analytic = residual_report(&states, grid, 0.0)?;
    let order_dev = analytic
        .iter()
        .filter_map(|e| e.order)
        .map(|p| (p - 2.0).abs())
        .fold(0.0, f64::max);
    let shifted = residual_report(&states, grid, NEGATIVE_CONTROL_SHIFT)?
        .iter()
        .map(|e| e.residual)
        .fold(f64::INFINITY, f64::min);
    let numeric_states = ResidualStates::Numeric {
        pot: SpikedPotential::half_oscillator(params),
        count: 5,
    };
    let numeric = residual_report(&numeric_states, grid, 0.0)?
        .iter()
        .map(|e| e.residual)
        .fold(0.0, f64::max);
    Ok(vec![
        Check::at_most(
            "analytic_residual_order_deviation",
            order_dev,
            RESIDUAL_ORDER_TOL,
        ),
        Check::at_most("numeric_matrix_residual", numeric, MATRIX_RESIDUAL),
        Check::at_least("residual_negative_control", shifted, NEGATIVE_CONTROL_FLOOR),
    ])
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<CommandOutput> {
    let run = &args.run;
    let params = run.params()?;
    if !(params.lambda() > 0.0) {
        return Err(Error::InvalidParameter("verify needs omega > 0".into()));
    }
    HalfLineGrid::new(run.xmax, run.npoints)?;
    let which = args.which;
    let wants = |w: VerifyWhich| which == VerifyWhich::All || which == w;
    let mut checks = Vec::new();
    if wants(VerifyWhich::Lemma) {
        checks.extend(lemma_checks(&params)?);
    }
    if wants(VerifyWhich::Closure) {
        checks.extend(closure_checks(run)?);
    }
    if wants(VerifyWhich::Commutator) {
        checks.extend(commutator_checks(run, &params)?);
    }
    if wants(VerifyWhich::Residuals) {
        checks.extend(residual_checks(run, &params)?);
    }

    let mut table = Table::new(["check", "observed", "threshold", "status"]);
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for c in &checks {
        let status = if c.passed { "pass" } else { "fail" };
        table.push(vec![
            c.name.as_str().into(),
            c.observed.into(),
            c.threshold.into(),
            status.into(),
        ]);
        summary.push(format!(
            "[{status}] {} observed={:.3e} threshold={:.3e}",
            c.name, c.observed, c.threshold
        ));
        if !c.passed {
            failures.push(format!(
                "{}: observed {:e} vs threshold {:e}",
                c.name, c.observed, c.threshold
            ));
        }
    }
    Ok(CommandOutput {
        header: run.header("verify", serde_json::to_value(args)?),
        table,
        summary,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Command {
        let mut full = vec!["affine-halfline"];
        full.extend_from_slice(args);
        Cli::try_parse_from(full).unwrap().command
    }

    #[test]
    fn defaults_match_reference_runs() {
        let cmd = parse(&["spectrum"]);
        let run = cmd.run_config();
        assert_eq!(run.model, ModelKind::HalfHo);
        assert_eq!((run.xmax, run.npoints, run.count), (12.0, 8000, 8));
        assert_eq!((run.hbar, run.mass, run.omega), (1.0, 1.0, 1.0));
        assert_eq!(run.output, OutputFormat::Csv);
    }

    #[test]
    fn bad_flags_are_usage_errors() {
        assert!(Cli::try_parse_from(["affine-halfline", "spectrum", "--model", "nope"]).is_err());
        assert!(Cli::try_parse_from(["affine-halfline", "frobnicate"]).is_err());
        let cmd = parse(&["spectrum", "--mass=-1"]);
        assert!(cmd.run_config().validate().is_err());
        let cmd = parse(&["spectrum", "--model", "half-ho", "--b", "2"]);
        assert!(cmd.run_config().validate().is_err());
        let cmd = parse(&["spectrum", "--npoints", "8"]);
        assert!(cmd.run_config().validate().is_err());
    }

    #[test]
    fn sweep_b_values() {
        let Command::SweepB(a) = parse(&["sweep-b", "--bfrom", "0", "--bto", "2", "--steps", "5"])
        else {
            unreachable!()
        };
        assert_eq!(a.b_values().unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let Command::SweepB(a) = parse(&["sweep-b", "--bvalues", "0,0.5,1"]) else {
            unreachable!()
        };
        assert_eq!(a.b_values().unwrap(), vec![0.0, 0.5, 1.0]);
        let Command::SweepB(a) = parse(&["sweep-b", "--bfrom", "3", "--bto", "1"]) else {
            unreachable!()
        };
        assert!(a.b_values().is_err());
    }

    #[test]
    fn small_spectrum_run() {
        let out = execute(&parse(&["spectrum", "--npoints", "3000", "--count", "3"])).unwrap();
        assert!(out.passed(), "{:?}", out.failures);
        assert_eq!(out.table.rows.len(), 3);
        assert_eq!(out.table.rows[1][2], Cell::Real(4.0));
    }

    #[test]
    fn spectrum_tolerance_breach_is_reported() {
        let out = execute(&parse(&[
            "spectrum",
            "--npoints",
            "200",
            "--count",
            "3",
            "--tol",
            "1e-9",
        ]))
        .unwrap();
        assert!(!out.passed());
    }

    #[test]
    fn shifted_spectrum_has_no_closed_form() {
        let out = execute(&parse(&[
            "spectrum",
            "--model",
            "shifted",
            "--b",
            "1",
            "--npoints",
            "500",
            "--count",
            "2",
        ]))
        .unwrap();
        assert!(out.passed());
        assert_eq!(out.table.rows[0][2], Cell::Empty);
    }

    #[test]
    fn dimensionless_energies_double() {
        let out = execute(&parse(&[
            "spectrum",
            "--npoints",
            "500",
            "--count",
            "1",
            "--dimensionless",
            "--tol",
            "1",
        ]))
        .unwrap();
        assert_eq!(out.table.columns[1], "eps_numeric");
        assert_eq!(out.table.rows[0][2], Cell::Real(4.0));
    }
}
