use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Inequality, InequalityId, JensenInstance, Operands, SampleOptions, Shape};
use crate::funclass::{fixtures, InstanceDigest, ScalarFunctionSpec};
use crate::linalg::LoewnerVerdict;
use crate::rng::{derive_seed, seeded};
use crate::{Error, Result, DEFAULT_TOL};

/// Mixing weights used on even-numbered two-operator trials.
pub const ALPHA_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub inequality: Inequality,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Run the fixed counterexample pairs first when they are admissible.
    pub inject_fixtures: bool,
    /// Redraws allowed per trial after domain rejections.
    pub max_attempts: u32,
    pub options: SampleOptions,
}

impl CampaignConfig {
    pub fn new(inequality: Inequality, dims: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            inequality,
            dims,
            trials,
            seed,
            tol: DEFAULT_TOL,
            inject_fixtures: true,
            max_attempts: 64,
            options: SampleOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidParameter(
                "dims must be a non-empty list of positive sizes".into(),
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance {} must be positive",
                self.tol
            )));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidParameter(
                "max_attempts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub digest: InstanceDigest,
    pub verdict: LoewnerVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub records: Vec<TrialRecord>,
    /// Draws discarded because a spectrum left the domain of `f`.
    pub rejected_draws: u64,
    /// Trials that exhausted their attempts without an admissible draw.
    pub skipped_trials: u64,
}

/// Fixed pairs as instances of `inequality`, for the forms that take a pair.
pub fn fixture_instance(inequality: Inequality, name: &str) -> Option<JensenInstance> {
    let p = fixtures::by_name(name)?;
    let operands = match inequality.id {
        InequalityId::TwoPoint => Operands::TwoPoint {
            a: p.a,
            b: p.b,
            alpha: p.alpha,
        },
        InequalityId::Weighted => Operands::Weighted {
            a: vec![p.a, p.b],
            weights: vec![p.alpha, 1.0 - p.alpha],
        },
        _ => return None,
    };
    Some(JensenInstance::new(operands, inequality.mode))
}

/// Fixtures whose instance evaluates for `f` (all spectra inside the domain).
pub fn admissible_fixtures(
    f: &ScalarFunctionSpec,
    inequality: Inequality,
) -> Vec<(String, JensenInstance)> {
    fixtures::all()
        .into_iter()
        .filter_map(|p| {
            let inst = fixture_instance(inequality, p.name)?;
            inst.evaluate(f).ok().map(|_| (p.name.to_string(), inst))
        })
        .collect()
}

/// Grid weight for even two-operator trials. The endpoints put `f(0)` into
/// the remainder, so they are skipped when `f` is undefined at 0.
fn alpha_for(f: &ScalarFunctionSpec, inequality: Inequality, trial: u64) -> Option<f64> {
    let grid: &[f64] = if f.domain().contains_zero() {
        &ALPHA_GRID
    } else {
        &ALPHA_GRID[1..ALPHA_GRID.len() - 1]
    };
    (inequality.id == InequalityId::TwoPoint && trial.is_multiple_of(2))
        .then(|| grid[(trial / 2) as usize % grid.len()])
}

fn draw(
    f: &ScalarFunctionSpec,
    cfg: &CampaignConfig,
    trial: u64,
    trial_seed: u64,
    attempt: u32,
) -> Result<(JensenInstance, usize)> {
    let mut rng = seeded(derive_seed(trial_seed, attempt as u64));
    let dim = cfg.dims[rng.random_range(0..cfg.dims.len())];
    let shape = Shape::draw(
        cfg.inequality,
        dim,
        alpha_for(f, cfg.inequality, trial),
        &cfg.options,
        &mut rng,
    );
    let inst = shape.build(cfg.options.range_for(f), cfg.options.psd, &mut rng)?;
    Ok((inst, dim))
}

fn instance_alpha(inst: &JensenInstance) -> Option<f64> {
    match inst.operands {
        Operands::TwoPoint { alpha, .. } => Some(alpha),
        _ => None,
    }
}

enum Outcome {
    Record(TrialRecord, u64),
    Skipped(u64),
}

fn run_trial(f: &ScalarFunctionSpec, cfg: &CampaignConfig, trial: u64) -> Result<Outcome> {
    let trial_seed = derive_seed(cfg.seed, trial);
    let mut rejected = 0;
    for attempt in 0..cfg.max_attempts {
        let (inst, dim) = draw(f, cfg, trial, trial_seed, attempt)?;
        match inst.evaluate(f) {
            Ok(report) => {
                let digest = InstanceDigest {
                    seed: trial_seed,
                    trial,
                    attempt,
                    dim,
                    alpha: instance_alpha(&inst),
                    fixture: None,
                };
                let verdict = report.verdict.with_tolerance(cfg.tol);
                return Ok(Outcome::Record(TrialRecord { digest, verdict }, rejected));
            }
            Err(Error::DomainViolation { .. }) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome::Skipped(rejected))
}

/// Runs `cfg.trials` instances of `cfg.inequality` for `f` in parallel.
///
/// Trial `t` draws from the seed `derive_seed(cfg.seed, t)`, and its `k`-th
/// redraw from `derive_seed(trial_seed, k)`, so results do not depend on the
/// thread count. Admissible fixtures occupy the first trials.
pub fn run_campaign(f: &ScalarFunctionSpec, cfg: &CampaignConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    cfg.inequality.check_supported(f)?;
    let fixtures: Vec<(String, JensenInstance)> = if cfg.inject_fixtures {
        admissible_fixtures(f, cfg.inequality)
    } else {
        Vec::new()
    };
    let mut records = Vec::with_capacity(cfg.trials);
    for (t, (name, inst)) in fixtures.iter().enumerate().take(cfg.trials) {
        let report = inst.evaluate(f)?;
        records.push(TrialRecord {
            digest: InstanceDigest {
                seed: cfg.seed,
                trial: t as u64,
                attempt: 0,
                dim: inst.operands.dim(),
                alpha: instance_alpha(inst),
                fixture: Some(name.clone()),
            },
            verdict: report.verdict.with_tolerance(cfg.tol),
        });
    }
    let start = records.len() as u64;
    let outcomes: Vec<Outcome> = (start..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(f, cfg, t))
        .collect::<Result<_>>()?;
    let mut rejected_draws = 0;
    let mut skipped_trials = 0;
    for o in outcomes {
        match o {
            Outcome::Record(r, rej) => {
                rejected_draws += rej;
                records.push(r);
            }
            Outcome::Skipped(rej) => {
                rejected_draws += rej;
                skipped_trials += 1;
            }
        }
    }
    Ok(CampaignResult {
        records,
        rejected_draws,
        skipped_trials,
    })
}

/// Rebuilds the instance behind a campaign record.
pub fn regenerate(
    f: &ScalarFunctionSpec,
    cfg: &CampaignConfig,
    digest: &InstanceDigest,
) -> Result<JensenInstance> {
    if let Some(name) = &digest.fixture {
        return fixture_instance(cfg.inequality, name).ok_or_else(|| {
            Error::InvalidParameter(format!("no fixture `{name}` for `{}`", cfg.inequality))
        });
    }
    let (inst, _) = draw(f, cfg, digest.trial, digest.seed, digest.attempt)?;
    Ok(inst)
}
