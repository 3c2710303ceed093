//! `stein-discrete`: sampling, estimation, simulation studies, the
//! logarithmic efficiency curve and Stein identity checks.
//!
//! Exit codes: 0 success, 1 the estimate is not eligible, 2 usage or parse
//! error, 3 numerical failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stein_discrete::baselines::{BaselineKind, BaselineMethod, MdReading};
use stein_discrete::harness::{
    efficiency_curve, format_efficiency, format_report, read_config, run_experiment, run_experiment_with_threads,
    FULL_SCALE_REPS,
};
use stein_discrete::io::{format_observations, parse_grid, read_observations, ModelDescription};
use stein_discrete::models::{sample, ModelSpec, Setting};
use stein_discrete::stein::{
    check_stein_identity, sandwich_covariance, stein_estimate, CovarianceMode, LinearSteinForm,
};
use stein_discrete::truncation::{estimate_domain, estimated_setting};
use stein_discrete::{EstimateResult, Error, NeReason, Sample, TestFunction};

const THREADS_VAR: &str = "STEIN_DISCRETE_THREADS";

#[derive(Parser)]
#[command(name = "stein-discrete", version, about = "Stein's method of moments for discrete distributions")]
#[command(after_help = "Exit codes: 0 success, 1 estimate not eligible, 2 usage or parse error, 3 numerical failure.\n\
    STEIN_DISCRETE_THREADS caps the number of simulation workers.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ModelArgs {
    /// Family: poisson, binomial, yulesimon, bnb, logarithmic, truncpoisson,
    /// truncbinomial, nm, tnm, dnm
    #[arg(long)]
    model: String,
    /// Parameters, e.g. `lambda=2` or `p=0.2,0.3`
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// Known quantities: m, r, alpha0, and box bounds a, b (`b=inf` for an
    /// open truncated Poisson), e.g. `r=5,a=1,1,b=9,9`
    #[arg(long, allow_hyphen_values = true)]
    fixed: Option<String>,
}

impl ModelArgs {
    fn description(&self) -> Result<ModelDescription, Error> {
        ModelDescription::from_flags(&self.model, self.params.as_deref(), self.fixed.as_deref())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Stein,
    Mle,
    Moment,
    ScoreMatching,
    MinimumDistance,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Known,
    Estimate,
}

#[derive(Clone, Copy, ValueEnum)]
enum MdReadingArg {
    InclusiveTail,
    AsPrinted,
    SquareInside,
}

#[derive(Subcommand)]
enum Command {
    /// Draw observations, one per line, components separated by spaces
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of observations
        #[arg(long)]
        n: usize,
        /// Random seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (standard output when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the parameters of a data file
    Estimate {
        /// Family name, as for `sample`
        #[arg(long)]
        model: String,
        /// Known quantities, as for `sample`
        #[arg(long, allow_hyphen_values = true)]
        fixed: Option<String>,
        /// Estimator
        #[arg(long, value_enum, default_value = "stein")]
        method: MethodArg,
        /// Observation file: one row per line, `#` comments
        #[arg(long)]
        data: PathBuf,
        /// Use the box from `--fixed` or estimate it from the data
        #[arg(long, value_enum, default_value = "known")]
        domain: DomainArg,
        /// Stein test function (`default`, `one`, `identity`, `log`,
        /// `k_minus_1`, `masked_identity`, `inv_sum_interior`,
        /// `sum_interior`; BNB pairs as `identity+one`)
        #[arg(long, default_value = "default")]
        test_fn: String,
        /// Minimum-distance objective variant
        #[arg(long, value_enum, default_value = "inclusive-tail")]
        md_reading: MdReadingArg,
        /// Output file (standard output when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the simulation studies of a config file and write a CSV report
    Simulate {
        /// JSON config: one study or an array of studies
        #[arg(long)]
        config: PathBuf,
        /// Override the repetition count of every study
        #[arg(long, conflicts_with = "full_scale")]
        reps: Option<usize>,
        /// Use the full-scale repetition count (10000)
        #[arg(long)]
        full_scale: bool,
        /// Record per-method wall time in the report
        #[arg(long)]
        timing: bool,
        /// Output CSV (standard output when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative efficiency of the Stein and ML estimators of the logarithmic p
    Efficiency {
        /// Grid `lo:hi:step` inside (0, 1)
        #[arg(long, default_value = "0.01:0.99:0.01")]
        grid: String,
        /// Output CSV (standard output when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate E[A f(X)] by exact summation; fails if any residual reaches the tolerance
    CheckIdentity {
        #[command(flatten)]
        model: ModelArgs,
        /// Test function, as for `estimate`
        #[arg(long, default_value = "default")]
        test_fn: String,
        /// Largest accepted residual
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn threads() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Usage(format!("{THREADS_VAR} must be a positive integer, got `{v}`")).into()),
        },
        Err(_) => Ok(None),
    }
}

fn cmd_sample(model: &ModelArgs, n: usize, seed: u64, out: Option<&PathBuf>) -> Result<u8, Failure> {
    let spec = model.description()?.build()?;
    let data = sample(&spec, n, seed)?;
    emit(out, &format_observations(&data))?;
    Ok(0)
}

/// Standard errors `sqrt(diag(Σ̂) / n)` from the empirical sandwich.
fn stein_standard_errors(setting: &Setting, fs: Vec<TestFunction>, data: &Sample, theta: &[f64]) -> Option<Vec<f64>> {
    let model = ModelSpec::new(setting.clone(), theta.to_vec()).ok()?;
    let form = LinearSteinForm::new(setting, fs).ok()?;
    let sigma = sandwich_covariance(&model, &form, CovarianceMode::Empirical(data)).ok()?;
    let n = data.len() as f64;
    Some((0..theta.len()).map(|i| (sigma[(i, i)] / n).sqrt()).collect())
}

#[allow(clippy::too_many_arguments)]
fn cmd_estimate(
    model: &str,
    fixed: Option<&str>,
    method: MethodArg,
    data: &PathBuf,
    domain: DomainArg,
    test_fn: &str,
    md_reading: MdReadingArg,
    out: Option<&PathBuf>,
) -> Result<u8, Failure> {
    let desc = ModelDescription::from_flags(model, None, fixed)?;
    let data = read_observations(data, None)?;
    let mut setting = desc.setting(Some(data.dim()))?;
    let mut text = format!("family: {}\nn: {}\n", setting.family(), data.len());
    if let DomainArg::Estimate = domain {
        if !setting.family().is_truncated() {
            return Err(Error::Usage(format!("`{}` has no truncation box to estimate", setting.family())).into());
        }
        let est = estimate_domain(&data)?;
        let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        let upper = if setting.support().upper_finite(0).is_none() {
            "inf".to_string()
        } else {
            join(&est.per_axis_max)
        };
        text.push_str(&format!("domain: estimated a={} b={}\n", join(&est.per_axis_min), upper));
    } else {
        text.push_str(&format!("domain: {}\n", setting.support()));
    }

    let mut fs_used = None;
    let local = match domain {
        DomainArg::Known => Some(setting.clone()),
        DomainArg::Estimate => estimated_setting(&setting, &data)?,
    };
    let result = match (&local, method) {
        // a single-point axis leaves nothing to estimate from
        (None, _) => EstimateResult::not_eligible(NeReason::SingularSystem),
        (Some(local), MethodArg::Stein) => {
            let fs = TestFunction::from_name(test_fn, local)?;
            let r = stein_estimate(local, &data, &fs)?;
            fs_used = Some(fs);
            r
        }
        (Some(local), other) => {
            let kind = match other {
                MethodArg::Mle => BaselineKind::Mle,
                MethodArg::Moment => BaselineKind::Moment,
                MethodArg::ScoreMatching => BaselineKind::ScoreMatching,
                _ => BaselineKind::MinimumDistance,
            };
            let mut b = BaselineMethod::new(kind);
            b.options.md_reading = match md_reading {
                MdReadingArg::InclusiveTail => MdReading::InclusiveTail,
                MdReadingArg::AsPrinted => MdReading::AsPrinted,
                MdReadingArg::SquareInside => MdReading::SquareInside,
            };
            b.estimate(local, &data)?
        }
    };
    if let Some(local) = local {
        setting = local;
    }

    let names = setting.param_names();
    match result.value() {
        Some(theta) => {
            for (name, v) in names.iter().zip(theta) {
                text.push_str(&format!("{name} = {v}\n"));
            }
            if let Some(fs) = fs_used {
                match stein_standard_errors(&setting, fs, &data, theta) {
                    Some(se) => {
                        for (name, s) in names.iter().zip(se) {
                            text.push_str(&format!("se({name}) = {s}\n"));
                        }
                    }
                    None => text.push_str("se: unavailable\n"),
                }
            }
            text.push_str("ne: none\n");
            emit(out, &text)?;
            Ok(0)
        }
        None => {
            text.push_str(&format!("ne: {}\n", result.ne_reason()));
            emit(out, &text)?;
            Ok(1)
        }
    }
}

fn cmd_simulate(
    config: &PathBuf,
    reps: Option<usize>,
    full_scale: bool,
    timing: bool,
    out: Option<&PathBuf>,
) -> Result<u8, Failure> {
    let mut configs = read_config(config)?;
    let workers = threads()?;
    let mut rows = Vec::new();
    for c in &mut configs {
        if let Some(r) = reps {
            c.reps = r;
        }
        if full_scale {
            c.reps = FULL_SCALE_REPS;
        }
        c.timing |= timing;
        let part = match workers {
            Some(t) => run_experiment_with_threads(c, t)?,
            None => run_experiment(c)?,
        };
        rows.extend(part);
    }
    emit(out, &format_report(&rows)?)?;
    Ok(0)
}

fn cmd_efficiency(grid: &str, out: Option<&PathBuf>) -> Result<u8, Failure> {
    let rows = efficiency_curve(&parse_grid(grid)?)?;
    emit(out, &format_efficiency(&rows))?;
    Ok(0)
}

fn cmd_check_identity(model: &ModelArgs, test_fn: &str, tolerance: f64) -> Result<u8, Failure> {
    let spec = model.description()?.build()?;
    let fs = TestFunction::from_name(test_fn, spec.setting())?;
    let mut worst: f64 = 0.0;
    let mut text = String::new();
    for f in &fs {
        let residuals = check_stein_identity(&spec, f)?;
        let list: Vec<String> = residuals.iter().map(|r| format!("{r:e}")).collect();
        text.push_str(&format!("{}: {}\n", f.name(), list.join(" ")));
        worst = residuals.iter().fold(worst, |m, r| m.max(r.abs()));
    }
    emit(None, &text)?;
    if worst.is_nan() || worst >= tolerance {
        return Err(Failure {
            code: 3,
            message: format!("largest residual {worst:e} is not below {tolerance:e}"),
        });
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Sample { model, n, seed, out } => cmd_sample(model, *n, *seed, out.as_ref()),
        Command::Estimate {
            model,
            fixed,
            method,
            data,
            domain,
            test_fn,
            md_reading,
            out,
        } => cmd_estimate(
            model,
            fixed.as_deref(),
            *method,
            data,
            *domain,
            test_fn,
            *md_reading,
            out.as_ref(),
        ),
        Command::Simulate {
            config,
            reps,
            full_scale,
            timing,
            out,
        } => cmd_simulate(config, *reps, *full_scale, *timing, out.as_ref()),
        Command::Efficiency { grid, out } => cmd_efficiency(grid, out.as_ref()),
        Command::CheckIdentity {
            model,
            test_fn,
            tolerance,
        } => cmd_check_identity(model, test_fn, *tolerance),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
