use serde::{Deserialize, Serialize};

use super::{hermitian_eig, HermitianMatrix};
use crate::{fmt17, Error, Result};

/// Sign class of a Hermitian matrix under a relative tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    PositiveSemidefinite,
    NegativeSemidefinite,
    Zero,
    Indefinite,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::PositiveSemidefinite => "PositiveSemidefinite",
            Relation::NegativeSemidefinite => "NegativeSemidefinite",
            Relation::Zero => "Zero",
            Relation::Indefinite => "Indefinite",
        }
    }

    /// Swapping the two compared operands.
    pub fn reversed(self) -> Self {
        match self {
            Relation::PositiveSemidefinite => Relation::NegativeSemidefinite,
            Relation::NegativeSemidefinite => Relation::PositiveSemidefinite,
            r => r,
        }
    }
}

/// Outcome of classifying `D = B - A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoewnerVerdict {
    pub relation: Relation,
    #[serde(with = "fmt17")]
    pub lambda_min: f64,
    #[serde(with = "fmt17")]
    pub lambda_max: f64,
    #[serde(with = "fmt17")]
    pub tolerance_used: f64,
}

impl LoewnerVerdict {
    /// Classifies `d` with `tol_eff = tol * max(1, ||d||_2)`. The bounds are
    /// inclusive, so `λ_min == -tol_eff` still counts as positive semidefinite.
    pub fn of(d: &HermitianMatrix, tol: f64) -> Result<Self> {
        let eig = hermitian_eig(d)?;
        Ok(Self::from_extremes(eig.lambda_min(), eig.lambda_max(), tol))
    }

    pub fn from_extremes(lambda_min: f64, lambda_max: f64, tol: f64) -> Self {
        let norm = lambda_min.abs().max(lambda_max.abs());
        let tol_eff = tol * norm.max(1.0);
        let psd = lambda_min >= -tol_eff;
        let nsd = lambda_max <= tol_eff;
        let relation = match (psd, nsd) {
            (true, true) => Relation::Zero,
            (true, false) => Relation::PositiveSemidefinite,
            (false, true) => Relation::NegativeSemidefinite,
            (false, false) => Relation::Indefinite,
        };
        Self {
            relation,
            lambda_min,
            lambda_max,
            tolerance_used: tol_eff,
        }
    }

    /// Re-evaluates the relation under a different base tolerance.
    pub fn with_tolerance(&self, tol: f64) -> Self {
        Self::from_extremes(self.lambda_min, self.lambda_max, tol)
    }

    /// `D ⪰ 0` within tolerance (includes `Zero`).
    pub fn holds_psd(&self) -> bool {
        matches!(
            self.relation,
            Relation::PositiveSemidefinite | Relation::Zero
        )
    }

    /// `D ⪯ 0` within tolerance (includes `Zero`).
    pub fn holds_nsd(&self) -> bool {
        matches!(
            self.relation,
            Relation::NegativeSemidefinite | Relation::Zero
        )
    }
}

/// Classifies `B - A` (Hermitized) in the Loewner order.
pub fn loewner_compare(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: f64,
) -> Result<LoewnerVerdict> {
    if a.dim() != b.dim() {
        return Err(Error::dims(a.dim(), b.dim()));
    }
    LoewnerVerdict::of(&b.sub(a), tol)
}
