//! Monte Carlo experiments: repeated sampling, estimation by each method and
//! bias / MSE / NE summaries.

mod efficiency;
mod report;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineKind, BaselineMethod, BaselineOptions};
use crate::error::{Error, Result};
use crate::io::ModelDescription;
use crate::lattice::Sample;
use crate::models::{Family, ModelSpec, Sampler, Setting};
use crate::rng::stream_rng;
use crate::stein::{stein_estimate, EstimateResult, NeReason, TestFunction};
use crate::truncation::{estimated_setting, plugin_stein_estimate};

pub use efficiency::{efficiency_curve, format_efficiency, write_efficiency, EfficiencyRow};
pub use report::{format_report, parse_report, read_report, write_report, ReportRow, REPORT_HEADER};

/// Desk-scale repetition count.
pub const DEFAULT_REPS: usize = 2000;
/// Repetition count of the full-scale tables.
pub const FULL_SCALE_REPS: usize = 10_000;

/// An estimator as named in configs and reports: `stein` (the family's
/// default test function), `stein:<test function>`, `mle`, `moment`,
/// `score_matching` or `minimum_distance`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    Stein(Option<String>),
    Baseline(BaselineKind),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Stein(None) => f.write_str("stein"),
            Method::Stein(Some(name)) => write!(f, "stein:{name}"),
            Method::Baseline(BaselineKind::Mle) => f.write_str("mle"),
            Method::Baseline(BaselineKind::Moment) => f.write_str("moment"),
            Method::Baseline(BaselineKind::ScoreMatching) => f.write_str("score_matching"),
            Method::Baseline(BaselineKind::MinimumDistance) => f.write_str("minimum_distance"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(name) = s.strip_prefix("stein:") {
            if name.is_empty() || name.contains(',') {
                return Err(Error::Usage(format!("bad test function name in `{s}`")));
            }
            return Ok(Method::Stein(Some(name.to_string())));
        }
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "stein" | "st" => Method::Stein(None),
            "mle" | "ml" => Method::Baseline(BaselineKind::Mle),
            "moment" | "mo" => Method::Baseline(BaselineKind::Moment),
            "score_matching" | "sm" => Method::Baseline(BaselineKind::ScoreMatching),
            "minimum_distance" | "md" => Method::Baseline(BaselineKind::MinimumDistance),
            _ => return Err(Error::Usage(format!("unknown method `{s}`"))),
        })
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.to_string()
    }
}

impl Method {
    /// Checks that the method is defined for `setting`.
    pub fn validate(&self, setting: &Setting) -> Result<()> {
        let family = setting.family();
        match self {
            Method::Stein(name) => {
                if let Some(name) = name {
                    let fs = TestFunction::from_name(name, setting)?;
                    let needed = if family == Family::BetaNegBinomial { 2 } else { 1 };
                    if fs.len() != needed {
                        return Err(Error::Config(format!(
                            "`{family}` needs {needed} test function(s), `{name}` gives {}",
                            fs.len()
                        )));
                    }
                }
                Ok(())
            }
            Method::Baseline(BaselineKind::Moment) if family != Family::DirichletNegMultinomial => Err(
                Error::Config(format!("the moment estimator is defined for `dnm`, not `{family}`")),
            ),
            Method::Baseline(BaselineKind::ScoreMatching | BaselineKind::MinimumDistance)
                if family != Family::YuleSimon =>
            {
                Err(Error::Config(format!("`{self}` is defined for `yulesimon`, not `{family}`")))
            }
            Method::Baseline(_) => Ok(()),
        }
    }
}

/// Whether estimators see the true box or one estimated from the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainMode {
    #[default]
    Known,
    Estimated,
}

/// Rules that discard repetitions from the bias/MSE summaries, on top of the
/// parameter-range check every estimate goes through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NePolicy {
    /// BNB only: estimates with `|α̂ − α| > t` or `|β̂ − β| > t` are NE.
    pub bnb_outlier_threshold: Option<f64>,
    /// Estimation calls running longer than this many seconds are NE.
    pub runtime_seconds: Option<f64>,
}

impl Default for NePolicy {
    fn default() -> Self {
        Self {
            bnb_outlier_threshold: Some(10.0),
            runtime_seconds: Some(10.0),
        }
    }
}

/// One simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelDescription,
    pub n: usize,
    #[serde(default = "default_reps")]
    pub reps: usize,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub domain_mode: DomainMode,
    #[serde(default)]
    pub ne_policy: NePolicy,
    pub seed: u64,
    /// Optimizer settings for the baselines; the runtime budget comes from
    /// `ne_policy`.
    #[serde(default)]
    pub baseline: BaselineOptions,
    /// Report per-method wall time. Off by default so that reports are
    /// byte-identical across runs.
    #[serde(default)]
    pub timing: bool,
}

fn default_reps() -> usize {
    DEFAULT_REPS
}

impl ExperimentConfig {
    pub fn new(model: &ModelSpec, n: usize, reps: usize, methods: Vec<Method>, seed: u64) -> Self {
        Self {
            model: ModelDescription::of(model),
            n,
            reps,
            methods,
            domain_mode: DomainMode::Known,
            ne_policy: NePolicy::default(),
            seed,
            baseline: BaselineOptions::default(),
            timing: false,
        }
    }

    /// Builds the model and checks every method against it.
    pub fn validate(&self) -> Result<ModelSpec> {
        if self.n == 0 || self.reps == 0 {
            return Err(Error::Config("n and reps must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods listed".into()));
        }
        let model = self.model.build().map_err(|e| Error::Config(e.to_string()))?;
        for m in &self.methods {
            m.validate(model.setting()).map_err(|e| match e {
                Error::Config(_) => e,
                other => Error::Config(other.to_string()),
            })?;
        }
        if self.domain_mode == DomainMode::Estimated && !model.family().is_truncated() {
            return Err(Error::Config(format!(
                "an estimated domain needs a truncated family, not `{}`",
                model.family()
            )));
        }
        for (what, v) in [
            ("bnb_outlier_threshold", self.ne_policy.bnb_outlier_threshold),
            ("runtime_seconds", self.ne_policy.runtime_seconds),
        ] {
            if v.is_some_and(|v| !(v > 0.0)) {
                return Err(Error::Config(format!("`{what}` must be positive")));
            }
        }
        Ok(model)
    }
}

/// Reads one config or a JSON array of configs.
pub fn parse_configs(text: &str) -> Result<Vec<ExperimentConfig>> {
    let trimmed = text.trim_start();
    let parsed = if trimmed.starts_with('[') {
        serde_json::from_str::<Vec<ExperimentConfig>>(text)
    } else {
        serde_json::from_str::<ExperimentConfig>(text).map(|c| vec![c])
    };
    let configs = parsed.map_err(|e| Error::parse(e.line(), None, e.to_string()))?;
    if configs.is_empty() {
        return Err(Error::parse(1, None, "empty config list"));
    }
    Ok(configs)
}

pub fn read_config(path: &Path) -> Result<Vec<ExperimentConfig>> {
    parse_configs(&std::fs::read_to_string(path)?)
}

/// Writes a single config as an object and several as an array.
pub fn format_configs(configs: &[ExperimentConfig]) -> String {
    let text = match configs {
        [one] => serde_json::to_string_pretty(one),
        many => serde_json::to_string_pretty(many),
    };
    text.expect("configs serialize") + "\n"
}

pub fn write_config(configs: &[ExperimentConfig], path: &Path) -> Result<()> {
    std::fs::write(path, format_configs(configs))?;
    Ok(())
}

/// Outcome of one method on one repetition.
#[derive(Debug, Clone)]
struct Outcome {
    result: EstimateResult,
    seconds: f64,
}

struct Runner<'a> {
    model: &'a ModelSpec,
    config: &'a ExperimentConfig,
    stein_fs: Vec<Option<Vec<TestFunction>>>,
    baselines: Vec<Option<BaselineMethod>>,
}

impl<'a> Runner<'a> {
    fn new(model: &'a ModelSpec, config: &'a ExperimentConfig) -> Result<Self> {
        let setting = model.setting();
        let mut stein_fs = Vec::new();
        let mut baselines = Vec::new();
        for m in &config.methods {
            match m {
                Method::Stein(name) => {
                    let name = name.as_deref().unwrap_or("default");
                    stein_fs.push(Some(TestFunction::from_name(name, setting)?));
                    baselines.push(None);
                }
                Method::Baseline(kind) => {
                    let mut b = BaselineMethod::new(*kind);
                    b.options = config.baseline.clone();
                    b.options.budget.max_seconds = config.ne_policy.runtime_seconds.unwrap_or(f64::INFINITY);
                    stein_fs.push(None);
                    baselines.push(Some(b));
                }
            }
        }
        Ok(Self {
            model,
            config,
            stein_fs,
            baselines,
        })
    }

    fn estimate(&self, method: usize, data: &Sample) -> Result<EstimateResult> {
        let setting = self.model.setting();
        let estimated = self.config.domain_mode == DomainMode::Estimated;
        match (&self.stein_fs[method], &self.baselines[method]) {
            (Some(_), _) if estimated && matches!(self.config.methods[method], Method::Stein(None)) => {
                plugin_stein_estimate(setting, data)
            }
            (Some(fs), _) if !estimated => stein_estimate(setting, data, fs),
            (Some(_), _) => {
                // a named test function on the estimated box
                let Some(local) = estimated_setting(setting, data)? else {
                    return Ok(EstimateResult::not_eligible(NeReason::SingularSystem));
                };
                let Method::Stein(Some(name)) = &self.config.methods[method] else {
                    unreachable!("stein methods carry test functions")
                };
                stein_estimate(&local, data, &TestFunction::from_name(name, &local)?)
            }
            (None, Some(b)) if estimated => match estimated_setting(setting, data)? {
                Some(local) => b.estimate(&local, data),
                None => Ok(EstimateResult::not_eligible(NeReason::SingularSystem)),
            },
            (None, Some(b)) => b.estimate(setting, data),
            (None, None) => unreachable!("every method is stein or a baseline"),
        }
    }

    fn classify(&self, result: EstimateResult, seconds: f64) -> EstimateResult {
        let policy = &self.config.ne_policy;
        if policy.runtime_seconds.is_some_and(|limit| seconds > limit) {
            return EstimateResult::not_eligible(NeReason::RuntimeExceeded);
        }
        if let (Some(t), Some(v)) = (policy.bnb_outlier_threshold, result.value()) {
            if self.model.family() == Family::BetaNegBinomial
                && v.iter().zip(self.model.theta()).any(|(a, b)| (a - b).abs() > t)
            {
                return EstimateResult::not_eligible(NeReason::OutlierTruncated);
            }
        }
        result
    }

    fn repetition(&self, sampler: &Sampler, rep: usize) -> Result<Vec<Outcome>> {
        let data = sampler.sample(self.config.n, &mut stream_rng(self.config.seed, rep as u64));
        (0..self.config.methods.len())
            .map(|m| {
                let clock = Instant::now();
                let result = self.estimate(m, &data)?;
                let seconds = clock.elapsed().as_secs_f64();
                Ok(Outcome {
                    result: self.classify(result, seconds),
                    seconds,
                })
            })
            .collect()
    }
}

/// Per-repetition outcomes, collected in repetition order so that the
/// summaries do not depend on which worker ran which repetition.
fn run_outcomes(config: &ExperimentConfig) -> Result<(ModelSpec, Vec<Vec<Outcome>>)> {
    let model = config.validate()?;
    let runner = Runner::new(&model, config)?;
    let sampler = Sampler::new(&model)?;
    let outcomes = (0..config.reps)
        .into_par_iter()
        .map(|rep| runner.repetition(&sampler, rep))
        .collect::<Result<_>>()?;
    Ok((model, outcomes))
}

/// Runs `config` on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let (model, outcomes) = run_outcomes(config)?;
    Ok(summarize(&model, config, &outcomes))
}

/// Runs `config` on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(config: &ExperimentConfig, threads: usize) -> Result<Vec<ReportRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {threads} workers: {e}")))?;
    pool.install(|| run_experiment(config))
}

fn summarize(model: &ModelSpec, config: &ExperimentConfig, outcomes: &[Vec<Outcome>]) -> Vec<ReportRow> {
    let names = model.setting().param_names();
    let reps = config.reps;
    let mut rows = Vec::new();
    for (m, method) in config.methods.iter().enumerate() {
        let eligible: Vec<&[f64]> = outcomes.iter().filter_map(|o| o[m].result.value()).collect();
        let used = eligible.len();
        let seconds: f64 = if config.timing {
            outcomes.iter().map(|o| o[m].seconds).sum()
        } else {
            0.0
        };
        for (j, name) in names.iter().enumerate() {
            let truth = model.theta()[j];
            let (bias, mse) = if used == 0 {
                (f64::NAN, f64::NAN)
            } else {
                let err: Vec<f64> = eligible.iter().map(|v| v[j] - truth).collect();
                (
                    err.iter().sum::<f64>() / used as f64,
                    err.iter().map(|e| e * e).sum::<f64>() / used as f64,
                )
            };
            rows.push(ReportRow {
                family: model.family().tag().to_string(),
                param: name.clone(),
                true_value: truth,
                method: method.to_string(),
                bias,
                mse,
                ne_percent: 100.0 * (reps - used) as f64 / reps as f64,
                reps_used: used,
                wall_seconds: seconds,
            });
        }
    }
    rows
}

/// NE reasons per method, for diagnostics: `(method, reason, count)`.
pub fn ne_breakdown(config: &ExperimentConfig) -> Result<Vec<(String, NeReason, usize)>> {
    let (_, outcomes) = run_outcomes(config)?;
    let mut out = Vec::new();
    for (m, method) in config.methods.iter().enumerate() {
        let mut counts: Vec<(NeReason, usize)> = Vec::new();
        for o in &outcomes {
            let r = o[m].result.ne_reason();
            if r == NeReason::Eligible {
                continue;
            }
            match counts.iter_mut().find(|c| c.0 == r) {
                Some(c) => c.1 += 1,
                None => counts.push((r, 1)),
            }
        }
        out.extend(counts.into_iter().map(|(r, c)| (method.to_string(), r, c)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
