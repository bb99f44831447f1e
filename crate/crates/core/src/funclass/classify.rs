use serde::{Deserialize, Serialize};

use super::{DeficitReport, ScalarFunctionSpec};
use crate::jensen::{
    regenerate, run_campaign, CampaignConfig, CampaignResult, Inequality, InequalityId, TrialRecord,
};
use crate::{fmt17, Relation, Result, DEFAULT_TOL};

/// Randomized campaign settings for classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub inject_fixtures: bool,
    /// Operand spectrum range; the function's sampling range when `None`.
    pub spectrum: Option<(f64, f64)>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            dims: (1..=6).collect(),
            trials: 2000,
            seed: 0,
            tol: DEFAULT_TOL,
            inject_fixtures: true,
            spectrum: None,
        }
    }
}

impl SamplingConfig {
    pub fn campaign(&self, inequality: Inequality) -> CampaignConfig {
        let mut c = CampaignConfig::new(inequality, self.dims.clone(), self.trials, self.seed);
        c.tol = self.tol;
        c.inject_fixtures = self.inject_fixtures;
        c.options.spectrum = self.spectrum;
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ClassVerdict {
    SupportedSuperquadratic,
    SupportedSubquadratic,
    /// Every deficit was zero within tolerance: equality in the defining inequality.
    SupportedQuadratic,
    /// Worst witnesses against each direction; at least one is present.
    Refuted {
        superquadratic_witness: Option<Box<DeficitReport>>,
        subquadratic_witness: Option<Box<DeficitReport>>,
    },
    Inconclusive,
}

impl ClassVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            ClassVerdict::SupportedSuperquadratic => "supported-superquadratic",
            ClassVerdict::SupportedSubquadratic => "supported-subquadratic",
            ClassVerdict::SupportedQuadratic => "supported-quadratic",
            ClassVerdict::Refuted { .. } => "refuted",
            ClassVerdict::Inconclusive => "inconclusive",
        }
    }

    /// Superquadratic evidence, counting the quadratic (equality) case.
    pub fn supports_superquadratic(&self) -> bool {
        matches!(
            self,
            ClassVerdict::SupportedSuperquadratic | ClassVerdict::SupportedQuadratic
        )
    }

    pub fn supports_subquadratic(&self) -> bool {
        matches!(
            self,
            ClassVerdict::SupportedSubquadratic | ClassVerdict::SupportedQuadratic
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub verdict: ClassVerdict,
    pub trials_run: usize,
    #[serde(with = "fmt17")]
    pub worst_min_eigenvalue: f64,
    #[serde(with = "fmt17")]
    pub worst_max_eigenvalue: f64,
    pub rejected_draws: u64,
    pub records: Vec<TrialRecord>,
}

fn witness(
    f: &ScalarFunctionSpec,
    cfg: &CampaignConfig,
    record: Option<&TrialRecord>,
) -> Result<Option<DeficitReport>> {
    let Some(r) = record else { return Ok(None) };
    let inst = regenerate(f, cfg, &r.digest)?;
    Ok(Some(
        inst.evaluate(f)?
            .with_tolerance(cfg.tol)
            .with_digest(r.digest.clone()),
    ))
}

fn summarize(
    f: &ScalarFunctionSpec,
    cfg: &CampaignConfig,
    result: CampaignResult,
) -> Result<ClassificationResult> {
    let records = result.records;
    let worst_min = records
        .iter()
        .map(|r| r.verdict.lambda_min)
        .fold(f64::INFINITY, f64::min);
    let worst_max = records
        .iter()
        .map(|r| r.verdict.lambda_max)
        .fold(f64::NEG_INFINITY, f64::max);
    let verdict = if records.is_empty() {
        ClassVerdict::Inconclusive
    } else if records.iter().all(|r| r.verdict.relation == Relation::Zero) {
        ClassVerdict::SupportedQuadratic
    } else if records.iter().all(|r| r.verdict.holds_psd()) {
        ClassVerdict::SupportedSuperquadratic
    } else if records.iter().all(|r| r.verdict.holds_nsd()) {
        ClassVerdict::SupportedSubquadratic
    } else {
        // ties go to the earliest trial
        let worst_super = records.iter().filter(|r| !r.verdict.holds_psd()).fold(
            None::<&TrialRecord>,
            |best, r| match best {
                Some(b) if b.verdict.lambda_min <= r.verdict.lambda_min => Some(b),
                _ => Some(r),
            },
        );
        let worst_sub = records.iter().filter(|r| !r.verdict.holds_nsd()).fold(
            None::<&TrialRecord>,
            |best, r| match best {
                Some(b) if b.verdict.lambda_max >= r.verdict.lambda_max => Some(b),
                _ => Some(r),
            },
        );
        ClassVerdict::Refuted {
            superquadratic_witness: witness(f, cfg, worst_super)?.map(Box::new),
            subquadratic_witness: witness(f, cfg, worst_sub)?.map(Box::new),
        }
    };
    Ok(ClassificationResult {
        verdict,
        trials_run: records.len(),
        worst_min_eigenvalue: worst_min,
        worst_max_eigenvalue: worst_max,
        rejected_draws: result.rejected_draws,
        records,
    })
}

/// Classifies `f` against the two-operator superquadratic inequality over a
/// randomized campaign. `Supported*` verdicts are evidence only; `Refuted`
/// carries regenerable witnesses.
pub fn classify(f: &ScalarFunctionSpec, cfg: &SamplingConfig) -> Result<ClassificationResult> {
    let campaign = cfg.campaign(Inequality::superquadratic(InequalityId::TwoPoint));
    let result = run_campaign(f, &campaign)?;
    summarize(f, &campaign, result)
}

/// One implication between convexity, sign and superquadratic behaviour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropositionCheck {
    pub name: String,
    pub hypothesis: String,
    pub conclusion: String,
    /// Whether the hypothesis was observed; the conclusion is only tested then.
    pub applies: bool,
    /// `None` when the hypothesis does not apply.
    pub holds: Option<bool>,
    pub witness: Option<DeficitReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub function_id: String,
    pub nonnegative_on_grid: bool,
    pub nonpositive_on_grid: bool,
    #[serde(with = "fmt17::option")]
    pub value_at_zero: Option<f64>,
    pub superquadratic: ClassVerdict,
    pub convex_supported: bool,
    pub concave_supported: bool,
    pub checks: Vec<PropositionCheck>,
}

impl PropositionReport {
    /// No applicable implication failed.
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| c.holds != Some(false))
    }
}

/// Evaluates, on randomized evidence, three implications:
///
/// * superquadratic ⇒ `f(0) ≤ 0`; if also `f ≥ 0`, then `f` is operator
///   convex and `f(0) = 0`;
/// * operator convex and `f ≤ 0` ⇒ superquadratic;
/// * operator concave and `f ≥ 0` ⇒ subquadratic.
///
/// Sign information comes from a 1000-point grid over the sampling range.
pub fn check_propositions(
    f: &ScalarFunctionSpec,
    cfg: &SamplingConfig,
) -> Result<PropositionReport> {
    let tol = cfg.tol;
    let (lo, hi) = cfg.spectrum.unwrap_or_else(|| f.sampling_range());
    let grid: Vec<f64> = (0..1000)
        .map(|k| f.eval(f.domain().clamp(lo + (hi - lo) * k as f64 / 999.0)))
        .collect();
    let nonneg = grid.iter().all(|v| *v >= -tol);
    let nonpos = grid.iter().all(|v| *v <= tol);
    let f0 = f.domain().contains_zero().then(|| f.eval(0.0));

    let sup = classify(f, cfg)?;
    let convex_cfg = cfg.campaign(Inequality::convex(InequalityId::TwoPoint));
    let convex = run_campaign(f, &convex_cfg)?;
    let convex_ok =
        !convex.records.is_empty() && convex.records.iter().all(|r| r.verdict.holds_psd());
    let concave_ok =
        !convex.records.is_empty() && convex.records.iter().all(|r| r.verdict.holds_nsd());
    let convex_witness = witness(
        f,
        &convex_cfg,
        convex.records.iter().find(|r| !r.verdict.holds_psd()),
    )?;

    let sup_witness = match &sup.verdict {
        ClassVerdict::Refuted {
            superquadratic_witness,
            ..
        } => superquadratic_witness.as_deref().cloned(),
        _ => None,
    };
    let sub_witness = match &sup.verdict {
        ClassVerdict::Refuted {
            subquadratic_witness,
            ..
        } => subquadratic_witness.as_deref().cloned(),
        _ => None,
    };

    let mut checks = Vec::new();
    let p1_applies = sup.verdict.supports_superquadratic();
    let zero_ok = f0.is_none_or(|v| v <= tol);
    let strong_ok = !nonneg || (convex_ok && f0.is_none_or(|v| v.abs() <= tol));
    checks.push(PropositionCheck {
        name: "superquadratic-sign".into(),
        hypothesis: "superquadratic".into(),
        conclusion: "f(0) <= 0; if also f >= 0 then operator convex with f(0) = 0".into(),
        applies: p1_applies,
        holds: p1_applies.then_some(zero_ok && strong_ok),
        witness: if p1_applies && !strong_ok {
            convex_witness.clone()
        } else {
            None
        },
    });
    let p2_applies = convex_ok && nonpos;
    checks.push(PropositionCheck {
        name: "convex-nonpositive".into(),
        hypothesis: "operator convex and f <= 0".into(),
        conclusion: "superquadratic".into(),
        applies: p2_applies,
        holds: p2_applies.then(|| sup.verdict.supports_superquadratic()),
        witness: if p2_applies { sup_witness } else { None },
    });
    let p3_applies = concave_ok && nonneg;
    checks.push(PropositionCheck {
        name: "concave-nonnegative".into(),
        hypothesis: "operator concave and f >= 0".into(),
        conclusion: "subquadratic".into(),
        applies: p3_applies,
        holds: p3_applies.then(|| sup.verdict.supports_subquadratic()),
        witness: if p3_applies { sub_witness } else { None },
    });

    Ok(PropositionReport {
        function_id: f.id().to_string(),
        nonnegative_on_grid: nonneg,
        nonpositive_on_grid: nonpos,
        value_at_zero: f0,
        superquadratic: sup.verdict,
        convex_supported: convex_ok,
        concave_supported: concave_ok,
        checks,
    })
}
