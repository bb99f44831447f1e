//! Jensen-type operator inequalities for superquadratic functions, each
//! computed as a deficit (right side minus left side).
//!
//! Every multi-term inequality has the shape
//!
//! ```text
//! f(S) ⪯ Σ T_k(f(A_k)) - Σ T_k(f(|A_k - S|)),    S = Σ T_k(A_k)
//! ```
//!
//! for positive linear "transfers" `T_k` summing to a unital map: weights,
//! contraction congruences, projection compressions or positive maps. The
//! convex mode drops the remainder sum.

mod campaign;
mod sample;

pub use campaign::{
    admissible_fixtures, fixture_instance, regenerate, run_campaign, CampaignConfig,
    CampaignResult, TrialRecord, ALPHA_GRID,
};
pub use sample::{ProjectionKind, PsdParam, SampleOptions, Shape};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::funclass::{two_point_sides, DeficitReport, ScalarFunctionSpec};
use crate::linalg::{
    apply_function, isometry_defect, operator_abs, ComplexMatrix, HermitianMatrix, C64,
};
use crate::maps::{build_dilation_blocks, PositiveUnitalMap, ProjectionFamily, MAP_TOL};
use crate::{fmt17, Error, Result, DEFAULT_TOL};

/// Which inequality family an instance belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    TwoPoint,
    Weighted,
    Contraction,
    Projection,
    Isometry,
    Map,
    #[serde(rename = "multimap")]
    MultiMap,
    VectorState,
    Kadison,
}

impl InequalityId {
    pub const ALL: [InequalityId; 9] = [
        InequalityId::TwoPoint,
        InequalityId::Weighted,
        InequalityId::Contraction,
        InequalityId::Projection,
        InequalityId::Isometry,
        InequalityId::Map,
        InequalityId::MultiMap,
        InequalityId::VectorState,
        InequalityId::Kadison,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::TwoPoint => "two-point",
            InequalityId::Weighted => "weighted",
            InequalityId::Contraction => "contraction",
            InequalityId::Projection => "projection",
            InequalityId::Isometry => "isometry",
            InequalityId::Map => "map",
            InequalityId::MultiMap => "multimap",
            InequalityId::VectorState => "vector-state",
            InequalityId::Kadison => "kadison",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// With remainder (`Superquadratic`) or without (`Convex`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Superquadratic,
    Convex,
}

/// An inequality id together with its mode, written `id` or `convex:id`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub id: InequalityId,
    pub mode: Mode,
}

impl Inequality {
    pub fn new(id: InequalityId, mode: Mode) -> Self {
        Self { id, mode }
    }

    pub fn superquadratic(id: InequalityId) -> Self {
        Self::new(id, Mode::Superquadratic)
    }

    pub fn convex(id: InequalityId) -> Self {
        Self::new(id, Mode::Convex)
    }

    /// Refuses remainder-bearing forms when `f` is undefined at 0: `|A_k - S|`
    /// is generically singular, so such instances cannot be sampled. The
    /// two-point form is exempt because its remainder `f(α|A-B|)` is regular
    /// for generic pairs and the fixed counterexample pair lives there.
    pub fn check_supported(&self, f: &ScalarFunctionSpec) -> Result<()> {
        if self.mode == Mode::Superquadratic
            && self.id != InequalityId::TwoPoint
            && !f.domain().contains_zero()
        {
            return Err(Error::UnsupportedCombination(format!(
                "{} with `{self}`: the remainder argument |A - S| is generically singular and {} excludes 0",
                f.name(),
                f.domain()
            )));
        }
        if self.id == InequalityId::Kadison && f.id() != "square" {
            return Err(Error::UnsupportedCombination(format!(
                "`{self}` is the expanded form for t^2 only, not {}",
                f.name()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Mode::Superquadratic => write!(f, "{}", self.id),
            Mode::Convex => write!(f, "convex:{}", self.id),
        }
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mode, rest) = match s.strip_prefix("convex:") {
            Some(rest) => (Mode::Convex, rest),
            None => (Mode::Superquadratic, s),
        };
        let id = InequalityId::ALL
            .into_iter()
            .find(|id| id.as_str() == rest)
            .ok_or_else(|| Error::UnknownInequality(s.to_string()))?;
        Ok(Self { id, mode })
    }
}

impl Serialize for Inequality {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Inequality {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Operands of one instance, one variant per inequality id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum Operands {
    TwoPoint {
        a: HermitianMatrix,
        b: HermitianMatrix,
        #[serde(with = "fmt17")]
        alpha: f64,
    },
    Weighted {
        a: Vec<HermitianMatrix>,
        #[serde(with = "fmt17::vec")]
        weights: Vec<f64>,
    },
    Contraction {
        a: Vec<HermitianMatrix>,
        c: Vec<ComplexMatrix>,
    },
    Projection {
        a: Vec<HermitianMatrix>,
        family: ProjectionFamily,
    },
    Isometry {
        a: HermitianMatrix,
        c: ComplexMatrix,
    },
    Map {
        a: HermitianMatrix,
        map: PositiveUnitalMap,
    },
    #[serde(rename = "multimap")]
    MultiMap {
        a: Vec<HermitianMatrix>,
        #[serde(with = "fmt17::vec")]
        weights: Vec<f64>,
        maps: Vec<PositiveUnitalMap>,
    },
    VectorState {
        a: HermitianMatrix,
        map: PositiveUnitalMap,
        #[serde(with = "fmt17::pairs")]
        x: Vec<[f64; 2]>,
    },
    Kadison {
        a: HermitianMatrix,
        map: PositiveUnitalMap,
    },
}

impl Operands {
    pub fn id(&self) -> InequalityId {
        match self {
            Operands::TwoPoint { .. } => InequalityId::TwoPoint,
            Operands::Weighted { .. } => InequalityId::Weighted,
            Operands::Contraction { .. } => InequalityId::Contraction,
            Operands::Projection { .. } => InequalityId::Projection,
            Operands::Isometry { .. } => InequalityId::Isometry,
            Operands::Map { .. } => InequalityId::Map,
            Operands::MultiMap { .. } => InequalityId::MultiMap,
            Operands::VectorState { .. } => InequalityId::VectorState,
            Operands::Kadison { .. } => InequalityId::Kadison,
        }
    }

    /// Dimension of the operator arguments `A_k`.
    pub fn dim(&self) -> usize {
        match self {
            Operands::TwoPoint { a, .. }
            | Operands::Isometry { a, .. }
            | Operands::Map { a, .. }
            | Operands::VectorState { a, .. }
            | Operands::Kadison { a, .. } => a.dim(),
            Operands::Weighted { a, .. }
            | Operands::Contraction { a, .. }
            | Operands::Projection { a, .. }
            | Operands::MultiMap { a, .. } => a.first().map_or(0, HermitianMatrix::dim),
        }
    }
}

/// A fully specified inequality instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenInstance {
    pub operands: Operands,
    #[serde(default)]
    pub mode: Mode,
}

impl JensenInstance {
    pub fn new(operands: Operands, mode: Mode) -> Self {
        Self { operands, mode }
    }

    pub fn inequality(&self) -> Inequality {
        Inequality::new(self.operands.id(), self.mode)
    }

    /// Deficit report at [`DEFAULT_TOL`]. Vector-state instances report their
    /// scalar deficit as a 1×1 matrix.
    pub fn evaluate(&self, f: &ScalarFunctionSpec) -> Result<DeficitReport> {
        let with_remainder = self.mode == Mode::Superquadratic;
        let id = self.inequality().to_string();
        let deficit = match &self.operands {
            Operands::TwoPoint { a, b, alpha } => {
                let s = two_point_sides(f, a, b, *alpha, with_remainder)?;
                if with_remainder {
                    s.superquadratic_deficit()
                } else {
                    s.convex_deficit()
                }
            }
            Operands::Weighted { a, weights } => weighted_deficit(f, a, weights, with_remainder)?,
            Operands::Contraction { a, c } => contraction_deficit(f, a, c, with_remainder)?,
            Operands::Projection { a, family } => projection_deficit(f, a, family, with_remainder)?,
            Operands::Isometry { a, c } => isometry_deficit(f, a, c, with_remainder)?,
            Operands::Map { a, map } => map_deficit(f, a, map, with_remainder)?,
            Operands::MultiMap { a, weights, maps } => {
                multi_map_deficit(f, a, weights, maps, with_remainder)?
            }
            Operands::VectorState { a, map, x } => {
                let x: Vec<C64> = x.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                HermitianMatrix::scalar(1, vector_state_deficit(f, a, map, &x, with_remainder)?)
            }
            Operands::Kadison { a, map } => kadison_deficit(a, map, with_remainder)?,
        };
        DeficitReport::new(id, deficit, DEFAULT_TOL)
    }
}

/// A positive linear map `X ↦ T(X)` contributing one term of a Jensen sum.
type Transfer<'a> = Box<dyn Fn(&HermitianMatrix) -> Result<HermitianMatrix> + 'a>;

/// `Σ T_k(f(A_k)) - [Σ T_k(f(|A_k - S|))] - f(S)` with `S = Σ T_k(A_k)`.
fn transfer_deficit(
    f: &ScalarFunctionSpec,
    a: &[HermitianMatrix],
    transfers: &[Transfer<'_>],
    with_remainder: bool,
) -> Result<HermitianMatrix> {
    debug_assert_eq!(a.len(), transfers.len());
    let mut s: Option<HermitianMatrix> = None;
    for (ak, t) in a.iter().zip(transfers) {
        let term = t(ak)?;
        s = Some(match s {
            None => term,
            Some(acc) => acc.add(&term),
        });
    }
    let s = s.ok_or_else(|| Error::InvalidParameter("no operands".into()))?;
    let mut rhs = HermitianMatrix::zeros(s.dim());
    for (ak, t) in a.iter().zip(transfers) {
        rhs = rhs.add(&t(&apply_function(f, ak)?)?);
        if with_remainder {
            if ak.dim() != s.dim() {
                return Err(Error::dims(s.dim(), ak.dim()));
            }
            let gap = operator_abs(&ak.sub(&s))?;
            rhs = rhs.sub(&t(&apply_function(f, &gap)?)?);
        }
    }
    Ok(rhs.sub(&apply_function(f, &s)?))
}

fn same_dims(a: &[HermitianMatrix]) -> Result<usize> {
    let d = a
        .first()
        .ok_or_else(|| Error::InvalidParameter("no operands".into()))?
        .dim();
    if let Some(bad) = a.iter().find(|x| x.dim() != d) {
        return Err(Error::dims(d, bad.dim()));
    }
    Ok(d)
}

fn weighted_deficit(
    f: &ScalarFunctionSpec,
    a: &[HermitianMatrix],
    w: &[f64],
    rem: bool,
) -> Result<HermitianMatrix> {
    same_dims(a)?;
    if w.len() != a.len() {
        return Err(Error::dims(format!("{} weights", a.len()), w.len()));
    }
    if let Some(bad) = w.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "weight {bad} is not positive"
        )));
    }
    let total: f64 = w.iter().sum();
    let transfers: Vec<Transfer> = w
        .iter()
        .map(|&wk| Box::new(move |x: &HermitianMatrix| Ok(x.scale(wk / total))) as Transfer)
        .collect();
    transfer_deficit(f, a, &transfers, rem)
}

fn contraction_deficit(
    f: &ScalarFunctionSpec,
    a: &[HermitianMatrix],
    c: &[ComplexMatrix],
    rem: bool,
) -> Result<HermitianMatrix> {
    let d = same_dims(a)?;
    if c.len() != a.len() {
        return Err(Error::dims(format!("{} coefficients", a.len()), c.len()));
    }
    if let Some(bad) = c.iter().find(|ck| ck.rows() != d || ck.cols() != d) {
        return Err(Error::dims(
            format!("{d}x{d}"),
            format!("{}x{}", bad.rows(), bad.cols()),
        ));
    }
    let mut gram = ComplexMatrix::zeros(d, d);
    for ck in c {
        gram = gram.add(&ck.adjoint().matmul(ck));
    }
    let gram = HermitianMatrix::from_matrix(&gram);
    let defect = HermitianMatrix::identity(d).sub(&gram);
    if rem {
        let dev = defect.norm2();
        if dev > MAP_TOL {
            return Err(Error::NotUnital { deviation: dev });
        }
    } else {
        // the convex form only needs Σ C_k* C_k ⪯ I
        let lmin = crate::linalg::hermitian_eig(&defect)?.lambda_min();
        if lmin < -MAP_TOL {
            return Err(Error::NotUnital { deviation: -lmin });
        }
    }
    let transfers: Vec<Transfer> = c
        .iter()
        .map(|ck| Box::new(move |x: &HermitianMatrix| Ok(x.congruence(ck))) as Transfer)
        .collect();
    transfer_deficit(f, a, &transfers, rem)
}

fn projection_deficit(
    f: &ScalarFunctionSpec,
    a: &[HermitianMatrix],
    family: &ProjectionFamily,
    rem: bool,
) -> Result<HermitianMatrix> {
    let d = same_dims(a)?;
    if family.len() != a.len() || family.dim() != d {
        return Err(Error::dims(
            format!("{} projections on C^{d}", a.len()),
            format!("{} projections on C^{}", family.len(), family.dim()),
        ));
    }
    let transfers: Vec<Transfer> = family
        .projections()
        .iter()
        .map(|p| Box::new(move |x: &HermitianMatrix| Ok(x.congruence(p.as_matrix()))) as Transfer)
        .collect();
    transfer_deficit(f, a, &transfers, rem)
}

fn isometry_deficit(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    c: &ComplexMatrix,
    rem: bool,
) -> Result<HermitianMatrix> {
    if c.rows() != a.dim() {
        return Err(Error::dims(a.dim(), c.rows()));
    }
    if rem && !c.is_square() {
        // |A - C*AC| compares operators on different spaces
        return Err(Error::dims(
            format!("{0}x{0}", c.rows()),
            format!("{}x{}", c.rows(), c.cols()),
        ));
    }
    if c.rows() < c.cols() {
        return Err(Error::NotIsometry {
            deviation: f64::INFINITY,
        });
    }
    let dev = isometry_defect(c);
    if dev > MAP_TOL {
        return Err(Error::NotIsometry { deviation: dev });
    }
    let transfers: Vec<Transfer> = vec![Box::new(move |x: &HermitianMatrix| Ok(x.congruence(c)))];
    transfer_deficit(f, std::slice::from_ref(a), &transfers, rem)
}

fn map_deficit(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    map: &PositiveUnitalMap,
    rem: bool,
) -> Result<HermitianMatrix> {
    if map.input_dim() != map.output_dim() {
        return Err(Error::dims(
            format!("map on M_{}", map.input_dim()),
            format!("M_{} -> M_{}", map.input_dim(), map.output_dim()),
        ));
    }
    if a.dim() != map.input_dim() {
        return Err(Error::dims(map.input_dim(), a.dim()));
    }
    let transfers: Vec<Transfer> = vec![Box::new(move |x: &HermitianMatrix| map.apply(x))];
    transfer_deficit(f, std::slice::from_ref(a), &transfers, rem)
}

fn multi_map_deficit(
    f: &ScalarFunctionSpec,
    a: &[HermitianMatrix],
    weights: &[f64],
    maps: &[PositiveUnitalMap],
    rem: bool,
) -> Result<HermitianMatrix> {
    let d = same_dims(a)?;
    if weights.len() != a.len() || maps.len() != a.len() {
        return Err(Error::NotNormalized {
            reason: format!(
                "{} operands, {} weights, {} maps",
                a.len(),
                weights.len(),
                maps.len()
            ),
        });
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) || (total - 1.0).abs() > MAP_TOL {
        return Err(Error::NotNormalized {
            reason: format!("weights must be non-negative with sum 1 (sum {total})"),
        });
    }
    if let Some(m) = maps
        .iter()
        .find(|m| m.input_dim() != d || m.output_dim() != d)
    {
        return Err(Error::dims(
            format!("maps on M_{d}"),
            format!("M_{} -> M_{}", m.input_dim(), m.output_dim()),
        ));
    }
    let transfers: Vec<Transfer> = weights
        .iter()
        .zip(maps)
        .map(|(&w, m)| Box::new(move |x: &HermitianMatrix| Ok(m.apply(x)?.scale(w))) as Transfer)
        .collect();
    transfer_deficit(f, a, &transfers, rem)
}

fn state(map: &PositiveUnitalMap, x: &[C64], h: &HermitianMatrix) -> Result<f64> {
    let y = map.apply(h)?;
    let xv = ComplexMatrix::column_vector(x);
    Ok(y.as_matrix().congruence(&xv).get(0, 0).re)
}

fn vector_state_deficit(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    map: &PositiveUnitalMap,
    x: &[C64],
    rem: bool,
) -> Result<f64> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > MAP_TOL {
        return Err(Error::NotUnitVector { norm });
    }
    if x.len() != map.output_dim() {
        return Err(Error::dims(map.output_dim(), x.len()));
    }
    if a.dim() != map.input_dim() {
        return Err(Error::dims(map.input_dim(), a.dim()));
    }
    let m = state(map, x, a)?;
    let fm = HermitianMatrix::scalar(1, m);
    let f_of_mean = apply_function(f, &fm)?.get(0, 0).re;
    let mut value = state(map, x, &apply_function(f, a)?)? - f_of_mean;
    if rem {
        let gap = operator_abs(&a.sub(&HermitianMatrix::scalar(a.dim(), m)))?;
        value -= state(map, x, &apply_function(f, &gap)?)?;
    }
    Ok(value)
}

fn kadison_deficit(
    a: &HermitianMatrix,
    map: &PositiveUnitalMap,
    rem: bool,
) -> Result<HermitianMatrix> {
    if map.input_dim() != map.output_dim() || a.dim() != map.input_dim() {
        return Err(Error::dims(map.input_dim(), a.dim()));
    }
    let am = a.as_matrix();
    let phi_a = map.apply(a)?;
    let a2 = HermitianMatrix::from_matrix(&am.matmul(am));
    let mut out = map.apply(&a2)?.sub(&HermitianMatrix::from_matrix(
        &phi_a.as_matrix().matmul(phi_a.as_matrix()),
    ));
    if rem {
        let gap = a.sub(&phi_a);
        let g2 = HermitianMatrix::from_matrix(&gap.as_matrix().matmul(gap.as_matrix()));
        out = out.sub(&map.apply(&g2)?);
    }
    Ok(out)
}

fn report(id: InequalityId, deficit: HermitianMatrix) -> Result<DeficitReport> {
    DeficitReport::new(id.as_str(), deficit, DEFAULT_TOL)
}

/// `Σ ŵ_k f(A_k) - Σ ŵ_k f(|A_k - Ā|) - f(Ā)` with `ŵ_k = w_k / Σ w` and
/// `Ā = Σ ŵ_k A_k`.
pub fn weighted_jensen_deficit(
    f: &ScalarFunctionSpec,
    a: &[HermitianMatrix],
    w: &[f64],
) -> Result<DeficitReport> {
    report(InequalityId::Weighted, weighted_deficit(f, a, w, true)?)
}

/// `Σ C_k* f(A_k) C_k - Σ C_k* f(|A_k - S|) C_k - f(S)` with
/// `S = Σ C_k* A_k C_k` and `Σ C_k* C_k = I`.
pub fn contraction_jensen_deficit(
    f: &ScalarFunctionSpec,
    a: &[HermitianMatrix],
    c: &[ComplexMatrix],
) -> Result<DeficitReport> {
    report(
        InequalityId::Contraction,
        contraction_deficit(f, a, c, true)?,
    )
}

/// `Σ P_k f(A_k) P_k - Σ P_k f(|A_k - S|) P_k - f(S)` with `S = Σ P_k A_k P_k`.
pub fn projection_jensen_deficit(
    f: &ScalarFunctionSpec,
    a: &[HermitianMatrix],
    family: &ProjectionFamily,
) -> Result<DeficitReport> {
    report(
        InequalityId::Projection,
        projection_deficit(f, a, family, true)?,
    )
}

/// `C* f(A) C - C* f(|A - C*AC|) C - f(C*AC)`.
///
/// `C` must be a square isometry (unitary): for a tall `C` the operators
/// `A` and `C*AC` act on spaces of different dimension.
pub fn isometry_jensen_deficit(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    c: &ComplexMatrix,
) -> Result<DeficitReport> {
    report(InequalityId::Isometry, isometry_deficit(f, a, c, true)?)
}

/// `Φ(f(A)) - Φ(f(|A - Φ(A)|)) - f(Φ(A))` for a unital `Φ` on `M_n`.
pub fn map_jensen_deficit(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    map: &PositiveUnitalMap,
) -> Result<DeficitReport> {
    report(InequalityId::Map, map_deficit(f, a, map, true)?)
}

/// `Σ Φ_k(f(A_k)) - Σ Φ_k(f(|A_k - S|)) - f(S)` with `Φ_k = w_k Φ̃_k`,
/// `Φ̃_k` unital, `Σ w_k = 1` and `S = Σ Φ_k(A_k)`.
pub fn multi_map_jensen_deficit(
    f: &ScalarFunctionSpec,
    a: &[HermitianMatrix],
    weights: &[f64],
    maps: &[PositiveUnitalMap],
) -> Result<DeficitReport> {
    report(
        InequalityId::MultiMap,
        multi_map_deficit(f, a, weights, maps, true)?,
    )
}

/// `⟨Φ(f(A))x,x⟩ - f(⟨Φ(A)x,x⟩) - ⟨Φ(f(|A - ⟨Φ(A)x,x⟩ I|))x,x⟩` for a unit
/// vector `x` in the output space of `Φ`.
pub fn vector_state_jensen_deficit(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    map: &PositiveUnitalMap,
    x: &[C64],
) -> Result<f64> {
    vector_state_deficit(f, a, map, x, true)
}

/// `Φ(A²) - Φ(|A - Φ(A)|²) - Φ(A)²` by direct matrix products, without the
/// spectral calculus.
pub fn kadison_refinement_deficit(
    a: &HermitianMatrix,
    map: &PositiveUnitalMap,
) -> Result<DeficitReport> {
    report(InequalityId::Kadison, kadison_deficit(a, map, true)?)
}

/// The convex form (no remainder) of the inequality selected by `operands`,
/// e.g. `V* f(A) V - f(V*AV)`. Contraction columns only need `Σ C_k* C_k ⪯ I`.
pub fn convex_jensen_deficit(f: &ScalarFunctionSpec, operands: &Operands) -> Result<DeficitReport> {
    JensenInstance::new(operands.clone(), Mode::Convex).evaluate(f)
}

/// Projection-form deficit on `ℂ^d ⊕ ℂ^d` for the block construction
/// `A_1 = C*XC`, `A_2 = D*XD` with the family `{P, Q}`, restricted to the
/// top-left `d×d` block. It coincides with the two-operator deficit of
/// `(A, B, λ)`.
pub fn dilation_readout(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    lambda: f64,
) -> Result<HermitianMatrix> {
    let blocks = build_dilation_blocks(a, b, lambda)?;
    let a1 = blocks.x.congruence(&blocks.c);
    let a2 = blocks.x.congruence(&blocks.d);
    let family = ProjectionFamily::new(vec![blocks.p.clone(), blocks.q.clone()])?;
    let full = projection_deficit(f, &[a1, a2], &family, true)?;
    let d = a.dim();
    Ok(HermitianMatrix::from_matrix(
        &full.as_matrix().block(0, 0, d, d),
    ))
}
