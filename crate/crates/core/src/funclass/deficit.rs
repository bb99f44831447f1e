use serde::{Deserialize, Serialize};

use super::ScalarFunctionSpec;
use crate::linalg::{apply_function, operator_abs, HermitianMatrix, LoewnerVerdict};
use crate::{fmt17, Error, Result, DEFAULT_TOL};

/// Everything needed to regenerate a randomized instance, given the campaign
/// configuration it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDigest {
    /// Seed of the trial (already derived from the campaign seed).
    pub seed: u64,
    pub trial: u64,
    /// Index of the accepted draw after domain rejections.
    pub attempt: u32,
    pub dim: usize,
    #[serde(with = "fmt17::option", default)]
    pub alpha: Option<f64>,
    /// Name of an injected fixed instance, when the trial is not random.
    #[serde(default)]
    pub fixture: Option<String>,
}

/// Right side minus left side of one inequality instance, with its verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub inequality_id: String,
    pub deficit: HermitianMatrix,
    pub verdict: LoewnerVerdict,
    #[serde(default)]
    pub digest: Option<InstanceDigest>,
}

impl DeficitReport {
    pub fn new(
        inequality_id: impl Into<String>,
        deficit: HermitianMatrix,
        tol: f64,
    ) -> Result<Self> {
        let verdict = LoewnerVerdict::of(&deficit, tol)?;
        Ok(Self {
            inequality_id: inequality_id.into(),
            deficit,
            verdict,
            digest: None,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.verdict = self.verdict.with_tolerance(tol);
        self
    }

    pub fn with_digest(mut self, digest: InstanceDigest) -> Self {
        self.digest = Some(digest);
        self
    }

    /// Recomputes the verdict from the stored deficit at the stored base tolerance.
    pub fn recompute_verdict(&self) -> Result<LoewnerVerdict> {
        let norm = self
            .verdict
            .lambda_min
            .abs()
            .max(self.verdict.lambda_max.abs())
            .max(1.0);
        LoewnerVerdict::of(&self.deficit, self.verdict.tolerance_used / norm)
    }
}

/// The three pieces of a Jensen-type inequality `lhs ⪯ main - remainder`.
#[derive(Clone, Debug)]
pub struct Sides {
    pub lhs: HermitianMatrix,
    pub main: HermitianMatrix,
    /// Absent when only the convex form (no remainder) was requested.
    pub remainder: Option<HermitianMatrix>,
}

impl Sides {
    /// `main - remainder - lhs`.
    pub fn superquadratic_deficit(&self) -> HermitianMatrix {
        let r = self.remainder.as_ref().expect("remainder was computed");
        self.main.sub(r).sub(&self.lhs)
    }

    /// `main - lhs`.
    pub fn convex_deficit(&self) -> HermitianMatrix {
        self.main.sub(&self.lhs)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside [0, 1]"
        )))
    }
}

/// Pieces of the two-operator inequality for `f`, `A`, `B`, `α`:
/// `lhs = f(αA + (1-α)B)`, `main = αf(A) + (1-α)f(B)` and
/// `remainder = αf((1-α)|A-B|) + (1-α)f(α|A-B|)`.
pub fn two_point_sides(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    alpha: f64,
    with_remainder: bool,
) -> Result<Sides> {
    if a.dim() != b.dim() {
        return Err(Error::dims(a.dim(), b.dim()));
    }
    check_alpha(alpha)?;
    let fa = apply_function(f, a)?;
    let fb = apply_function(f, b)?;
    let mean = a.scale(alpha).add(&b.scale(1.0 - alpha));
    let lhs = apply_function(f, &mean)?;
    let main = fa.scale(alpha).add(&fb.scale(1.0 - alpha));
    let remainder = if with_remainder {
        let gap = operator_abs(&a.sub(b))?;
        let r1 = apply_function(f, &gap.scale(1.0 - alpha))?;
        let r2 = apply_function(f, &gap.scale(alpha))?;
        Some(r1.scale(alpha).add(&r2.scale(1.0 - alpha)))
    } else {
        None
    };
    Ok(Sides {
        lhs,
        main,
        remainder,
    })
}

pub const TWO_POINT_ID: &str = "two-point";

/// `α[f(A) - f((1-α)|A-B|)] + (1-α)[f(B) - f(α|A-B|)] - f(αA + (1-α)B)`.
///
/// A positive semidefinite verdict certifies this instance of the defining
/// operator superquadratic inequality.
pub fn operator_superquadratic_deficit(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    alpha: f64,
) -> Result<DeficitReport> {
    let sides = two_point_sides(f, a, b, alpha, true)?;
    DeficitReport::new(TWO_POINT_ID, sides.superquadratic_deficit(), DEFAULT_TOL)
}

/// `αf(A) + (1-α)f(B) - f(αA + (1-α)B)`.
pub fn operator_convex_deficit(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    alpha: f64,
) -> Result<DeficitReport> {
    let sides = two_point_sides(f, a, b, alpha, false)?;
    DeficitReport::new(
        format!("convex:{TWO_POINT_ID}"),
        sides.convex_deficit(),
        DEFAULT_TOL,
    )
}

/// `f(t) - f(x) - C_x (t - x) - f(|t - x|)` with `C_x = f'(x)`.
pub fn scalar_superquadratic_deficit(f: &ScalarFunctionSpec, x: f64, t: f64) -> Result<f64> {
    let gap = (t - x).abs();
    let offending: Vec<f64> = [x, t, gap]
        .into_iter()
        .filter(|v| !f.domain().contains(*v))
        .collect();
    if !offending.is_empty() {
        return Err(Error::DomainViolation {
            function: f.name().to_string(),
            domain: f.domain().to_string(),
            offending,
        });
    }
    let d = f.domain();
    let cx = f
        .derivative(d.clamp(x))
        .ok_or_else(|| Error::MissingDerivative {
            function: f.name().to_string(),
        })?;
    Ok(f.eval(d.clamp(t)) - f.eval(d.clamp(x)) - cx * (t - x) - f.eval(d.clamp(gap)))
}
