//! Driver behind the `opsq` binary: builds a [`RunConfig`] from flags, an
//! optional config document and the environment, dispatches to the core
//! library and writes a [`RunReport`].

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use opsq_core::falsify::{
    falsify, reproduce_fixtures, Direction, ReproductionReport, SearchConfig, Witness,
};
use opsq_core::funclass::{
    classify, ClaimedClass, ClassVerdict, SamplingConfig, ScalarFunctionSpec,
};
use opsq_core::jensen::{run_campaign, CampaignConfig, Inequality, InequalityId, TrialRecord};
use opsq_core::{fmt17, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable that, when set, replaces the seed from flags or config.
pub const SEED_ENV: &str = "OPSQ_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] opsq_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// Usage problems exit with 2, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(opsq_core::Error::UnknownFunction(_))
            | CliError::Core(opsq_core::Error::UnsupportedCombination(_))
            | CliError::Core(opsq_core::Error::InvalidParameter(_)) => 2,
            _ => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    Verify,
    Falsify,
    Reproduce,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Classify => "classify",
            Command::Verify => "verify",
            Command::Falsify => "falsify",
            Command::Reproduce => "reproduce",
        })
    }
}

/// A fully resolved run. Every field has a flag of the same name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub function_id: String,
    pub inequality_id: Option<String>,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(with = "fmt17")]
    pub tolerance: f64,
    pub output_path: Option<PathBuf>,
    /// Worker threads; the rayon default when absent.
    pub threads: Option<usize>,
    /// Falsifier restarts and hill-climbing steps per restart.
    pub restarts: usize,
    pub steps: usize,
    /// Falsifier direction; `classify` picks its own from the campaign verdict.
    pub direction: Direction,
}

impl RunConfig {
    pub fn new(command: Command, function_id: impl Into<String>) -> Self {
        let search = SearchConfig::default();
        Self {
            command,
            function_id: function_id.into(),
            inequality_id: None,
            dims: (1..=6).collect(),
            trials: 2000,
            seed: 0,
            tolerance: DEFAULT_TOL,
            output_path: None,
            threads: None,
            restarts: search.restarts,
            steps: search.steps_per_restart,
            direction: Direction::Superquadratic,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(usage(format!(
                "--tol must be a positive number, got {}",
                self.tolerance
            )));
        }
        if self.trials == 0 {
            return Err(usage("--trials must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(usage("--restarts must be at least 1"));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(usage("--dims must list positive sizes, e.g. 1-6 or 2,3,5"));
        }
        if self.threads == Some(0) {
            return Err(usage("--threads must be at least 1"));
        }
        if self.command != Command::Reproduce {
            ScalarFunctionSpec::builtin(&self.function_id).map_err(|_| {
                usage(format!(
                    "unknown function `{}`; built-ins are square, cube, recip, tlogt, power:<r>, affine:<a>:<b>, each optionally prefixed with neg:",
                    self.function_id
                ))
            })?;
        }
        if let Some(id) = &self.inequality_id {
            parse_inequality(id)?;
        } else if self.command == Command::Verify {
            return Err(usage("verify needs --inequality"));
        }
        Ok(())
    }

    fn inequality(&self) -> Result<Inequality, CliError> {
        match &self.inequality_id {
            Some(id) => parse_inequality(id),
            None => Ok(Inequality::superquadratic(InequalityId::TwoPoint)),
        }
    }

    fn search(&self, direction: Direction) -> SearchConfig {
        SearchConfig {
            dims: self.dims.clone(),
            restarts: self.restarts,
            steps_per_restart: self.steps,
            seed: self.seed,
            objective_tol: self.tolerance,
            direction,
            ..SearchConfig::default()
        }
    }
}

fn parse_inequality(id: &str) -> Result<Inequality, CliError> {
    Inequality::from_str(id).map_err(|_| {
        let ids: Vec<&str> = InequalityId::ALL.iter().map(|i| i.as_str()).collect();
        usage(format!(
            "unknown inequality `{id}`; expected one of {}, optionally prefixed with convex:",
            ids.join(", ")
        ))
    })
}

/// Parses `1-6`, `2,4,8` or a mix such as `1-3,8`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a dimension"))
        };
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range `{part}`"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err("no dimensions given".into());
    }
    Ok(out)
}

/// Optional overrides, one per [`RunConfig`] field; flags and config
/// documents both land here.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub function_id: Option<String>,
    pub inequality_id: Option<String>,
    pub dims: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
    pub restarts: Option<usize>,
    pub steps: Option<usize>,
    pub direction: Option<Direction>,
}

impl Overrides {
    /// Fields set in `self` win over `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            command: self.command.or(base.command),
            function_id: self.function_id.or(base.function_id),
            inequality_id: self.inequality_id.or(base.inequality_id),
            dims: self.dims.or(base.dims),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            tolerance: self.tolerance.or(base.tolerance),
            output_path: self.output_path.or(base.output_path),
            threads: self.threads.or(base.threads),
            restarts: self.restarts.or(base.restarts),
            steps: self.steps.or(base.steps),
            direction: self.direction.or(base.direction),
        }
    }

    pub fn load(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }

    /// `seed_env` is the raw value of [`SEED_ENV`], if set.
    pub fn resolve(self, seed_env: Option<&str>) -> Result<RunConfig, CliError> {
        let command = self.command.ok_or_else(|| usage("no command given"))?;
        let function_id = match (self.function_id, command) {
            (Some(f), _) => f,
            (None, Command::Reproduce) => String::new(),
            (None, _) => return Err(usage(format!("{command} needs --function"))),
        };
        let mut cfg = RunConfig::new(command, function_id);
        cfg.inequality_id = self.inequality_id;
        if let Some(d) = self.dims {
            cfg.dims = d;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(raw) = seed_env {
            cfg.seed = raw
                .trim()
                .parse()
                .map_err(|_| usage(format!("{SEED_ENV}=`{raw}` is not an unsigned integer")))?;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        cfg.output_path = self.output_path;
        cfg.threads = self.threads;
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(s) = self.steps {
            cfg.steps = s;
        }
        if let Some(d) = self.direction {
            cfg.direction = d;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Records per relation name; sums to `trials_run`.
    pub counts: BTreeMap<String, usize>,
    pub trials_run: usize,
    pub rejected_draws: u64,
    pub skipped_trials: u64,
    /// Record with the smallest deficit eigenvalue.
    pub worst_case: Option<TrialRecord>,
    #[serde(with = "fmt17")]
    pub wall_time_seconds: f64,
}

impl Summary {
    fn of(records: &[TrialRecord], rejected_draws: u64, skipped_trials: u64) -> Self {
        let mut counts = BTreeMap::new();
        for r in records {
            *counts
                .entry(format!("{:?}", r.verdict.relation))
                .or_insert(0) += 1;
        }
        let worst_case = records
            .iter()
            .fold(None::<&TrialRecord>, |best, r| match best {
                Some(b) if b.verdict.lambda_min <= r.verdict.lambda_min => Some(b),
                _ => Some(r),
            })
            .cloned();
        Self {
            counts,
            trials_run: records.len(),
            rejected_draws,
            skipped_trials,
            worst_case,
            wall_time_seconds: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Classification {
        verdict: ClassVerdict,
        claimed: ClaimedClass,
        as_claimed: bool,
        /// Falsifier results for each searched direction.
        witnesses: Vec<Witness>,
        searched: Vec<Direction>,
    },
    Verification {
        inequality: Inequality,
        holds: bool,
    },
    Falsification {
        inequality: Inequality,
        witness: Option<Box<Witness>>,
    },
    Reproduction(ReproductionReport),
}

impl Outcome {
    /// 0 when everything holds or matches its claimed class, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let ok = match self {
            Outcome::Classification {
                as_claimed,
                witnesses,
                ..
            } => *as_claimed && witnesses.is_empty(),
            Outcome::Verification { holds, .. } => *holds,
            Outcome::Falsification { witness, .. } => witness.is_none(),
            Outcome::Reproduction(r) => r.all_passed,
        };
        if ok {
            0
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub config: RunConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
    pub outcome: Outcome,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }
}

fn matches_claim(verdict: &ClassVerdict, claimed: ClaimedClass) -> bool {
    match claimed {
        ClaimedClass::OperatorSuperquadratic => {
            matches!(verdict, ClassVerdict::SupportedSuperquadratic)
        }
        ClaimedClass::OperatorSubquadratic => {
            matches!(verdict, ClassVerdict::SupportedSubquadratic)
        }
        ClaimedClass::OperatorQuadratic => matches!(verdict, ClassVerdict::SupportedQuadratic),
        ClaimedClass::Neither => matches!(verdict, ClassVerdict::Refuted { .. }),
        ClaimedClass::Unknown => !matches!(
            verdict,
            ClassVerdict::Refuted { .. } | ClassVerdict::Inconclusive
        ),
    }
}

/// Directions the falsifier should attack after a campaign verdict.
fn directions_for(verdict: &ClassVerdict) -> Vec<Direction> {
    match verdict {
        ClassVerdict::SupportedSuperquadratic => vec![Direction::Superquadratic],
        ClassVerdict::SupportedSubquadratic => vec![Direction::Subquadratic],
        ClassVerdict::SupportedQuadratic | ClassVerdict::Inconclusive => {
            vec![Direction::Superquadratic, Direction::Subquadratic]
        }
        ClassVerdict::Refuted {
            superquadratic_witness,
            subquadratic_witness,
        } => {
            let mut d = Vec::new();
            if superquadratic_witness.is_some() {
                d.push(Direction::Superquadratic);
            }
            if subquadratic_witness.is_some() {
                d.push(Direction::Subquadratic);
            }
            d
        }
    }
}

fn execute(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let (records, rejected, skipped, outcome) = match cfg.command {
        Command::Classify => {
            let f = ScalarFunctionSpec::builtin(&cfg.function_id)?;
            let sampling = SamplingConfig {
                dims: cfg.dims.clone(),
                trials: cfg.trials,
                seed: cfg.seed,
                tol: cfg.tolerance,
                ..SamplingConfig::default()
            };
            let mut result = classify(&f, &sampling)?;
            let ineq = Inequality::superquadratic(InequalityId::TwoPoint);
            let searched = directions_for(&result.verdict);
            let mut witnesses = Vec::new();
            for &d in &searched {
                if let Some(w) = falsify(&f, ineq, &cfg.search(d))? {
                    witnesses.push(w);
                }
            }
            let records = std::mem::take(&mut result.records);
            let as_claimed = matches_claim(&result.verdict, f.claimed_class());
            let outcome = Outcome::Classification {
                verdict: result.verdict,
                claimed: f.claimed_class(),
                as_claimed,
                witnesses,
                searched,
            };
            (records, result.rejected_draws, 0, outcome)
        }
        Command::Verify => {
            let f = ScalarFunctionSpec::builtin(&cfg.function_id)?;
            let inequality = cfg.inequality()?;
            let mut campaign =
                CampaignConfig::new(inequality, cfg.dims.clone(), cfg.trials, cfg.seed);
            campaign.tol = cfg.tolerance;
            let r = run_campaign(&f, &campaign)?;
            let holds = !r.records.is_empty() && r.records.iter().all(|t| t.verdict.holds_psd());
            (
                r.records,
                r.rejected_draws,
                r.skipped_trials,
                Outcome::Verification { inequality, holds },
            )
        }
        Command::Falsify => {
            let f = ScalarFunctionSpec::builtin(&cfg.function_id)?;
            let inequality = cfg.inequality()?;
            let witness = falsify(&f, inequality, &cfg.search(cfg.direction))?.map(Box::new);
            (
                Vec::new(),
                0,
                0,
                Outcome::Falsification {
                    inequality,
                    witness,
                },
            )
        }
        Command::Reproduce => {
            let report = reproduce_fixtures()?;
            (Vec::new(), 0, 0, Outcome::Reproduction(report))
        }
    };
    let summary = Summary::of(&records, rejected, skipped);
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        artifact_version: ARTIFACT_VERSION.to_string(),
        config: cfg.clone(),
        records,
        summary,
        outcome,
    })
}

/// Runs `cfg` on a pool of `cfg.threads` workers and stamps the wall time.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut report = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| usage(format!("cannot start {n} threads: {e}")))?
            .install(|| execute(cfg))?,
        None => execute(cfg)?,
    };
    report.summary.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Writes `report` to `path` via a temporary file in the same directory,
/// so readers never see a partial document.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes the report where the config says: a file, or standard output.
pub fn emit(report: &RunReport) -> Result<(), CliError> {
    let text = report.to_json();
    match &report.config.output_path {
        Some(p) => write_atomic(p, &text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
