//! Positive unital maps and the unitary/projection constructions behind the
//! operator Jensen inequalities: the diagonal unitary `E_n`, pinchings,
//! rank-one projection resolutions, unitary completion of isometric block
//! columns and the 2×2 block rotations used to recover the two-operator
//! inequality from the projection form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::linalg::{
    gaussian_matrix, haar_unitary, hermitian_eig, isometry_defect, orthonormalize_columns,
    psd_sqrt, ComplexMatrix, HermitianMatrix, C64,
};
use crate::rng::{seeded, Source};
use crate::{fmt17, Error, Result};

/// Unitality and structural tolerance for maps and families.
pub const MAP_TOL: f64 = 1e-10;
/// Agreement required between the averaged pinching and diagonal extraction.
pub const PINCH_TOL: f64 = 1e-12;
const POSITIVITY_SAMPLES: usize = 100;
const POSITIVITY_SEED: u64 = 0x005e_ed0f_0001;
const COMPLETION_SEED: u64 = 0x005e_ed0f_0002;

fn root_of_unity_power(n: usize, k: usize) -> C64 {
    let m = k % n;
    let theta = 2.0 * PI * m as f64 / n as f64;
    C64::new(theta.cos(), theta.sin())
}

/// Exponent of `ξ` on the `i`-th diagonal entry of `E_n`: `1, 2, …, n-1, 0`.
fn en_exponent(n: usize, i: usize) -> usize {
    (i + 1) % n
}

/// `E_n = diag(ξ, ξ², …, ξ^{n-1}, 1)` with `ξ = exp(2πi/n)`.
pub fn build_en(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("E_n needs n >= 1".into()));
    }
    Ok(en_power(n, 1))
}

/// `E_n^k` for `k >= 0`, computed from exactly reduced exponents.
fn en_power(n: usize, k: usize) -> ComplexMatrix {
    let d: Vec<C64> = (0..n)
        .map(|i| root_of_unity_power(n, en_exponent(n, i) * k))
        .collect();
    ComplexMatrix::diag(&d)
}

/// `(1/n) Σ_{k=1}^{n} E^{-k} A E^{k}` evaluated by explicit products.
pub fn pinch_average(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::dims(
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    let mut acc = ComplexMatrix::zeros(n, n);
    for k in 1..=n {
        let ek = en_power(n, k);
        // E^{-k} = (E^k)* for a unitary diagonal
        acc = acc.add(&ek.adjoint().matmul(a).matmul(&ek));
    }
    Ok(acc.scale(1.0 / n as f64))
}

pub fn diagonal_part(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows().min(a.cols());
    let d: Vec<C64> = (0..n).map(|i| a.get(i, i)).collect();
    ComplexMatrix::diag(&d)
}

/// Pinching onto the diagonal. The `E_n` average is computed and checked
/// against direct extraction of the diagonal before the latter is returned.
pub fn pinch(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let avg = pinch_average(a)?;
    let diag = diagonal_part(a);
    let err = avg.max_abs_diff(&diag);
    if err > PINCH_TOL * a.max_abs().max(1.0) {
        return Err(Error::VerificationFailed(format!(
            "E_n average differs from the diagonal by {err:e}"
        )));
    }
    Ok(diag)
}

/// Block pinching of an `(n·d)×(n·d)` matrix onto its `n` diagonal `d×d`
/// blocks, via the average over `E_n ⊗ I_d`.
pub fn block_pinch(a: &ComplexMatrix, n: usize, d: usize) -> Result<ComplexMatrix> {
    if !a.is_square() || a.rows() != n * d || n == 0 {
        return Err(Error::dims(
            format!("{0}x{0}", n * d),
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let id = ComplexMatrix::identity(d);
    let mut acc = ComplexMatrix::zeros(n * d, n * d);
    for k in 1..=n {
        let ek = en_power(n, k).kron(&id);
        acc = acc.add(&ek.adjoint().matmul(a).matmul(&ek));
    }
    let avg = acc.scale(1.0 / n as f64);
    let blocks: Vec<ComplexMatrix> = (0..n).map(|b| a.block(b * d, b * d, d, d)).collect();
    let direct = ComplexMatrix::direct_sum(&blocks);
    let err = avg.max_abs_diff(&direct);
    if err > PINCH_TOL * a.max_abs().max(1.0) {
        return Err(Error::VerificationFailed(format!(
            "E_n ⊗ I average differs from the block diagonal by {err:e}"
        )));
    }
    Ok(direct)
}

/// Orthogonal projections `P_1, …, P_m` on `ℂ^dim` with `Σ P_k = I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct ProjectionFamily {
    projections: Vec<HermitianMatrix>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    projections: Vec<HermitianMatrix>,
}

impl TryFrom<FamilyRepr> for ProjectionFamily {
    type Error = Error;
    fn try_from(r: FamilyRepr) -> Result<Self> {
        ProjectionFamily::new(r.projections)
    }
}

impl From<ProjectionFamily> for FamilyRepr {
    fn from(f: ProjectionFamily) -> Self {
        FamilyRepr {
            projections: f.projections,
        }
    }
}

impl ProjectionFamily {
    /// Validates idempotence, self-adjointness, pairwise orthogonality and
    /// completeness to `1e-10`.
    pub fn new(projections: Vec<HermitianMatrix>) -> Result<Self> {
        let bad = |reason: String| Err(Error::NotAResolution { reason });
        let Some(first) = projections.first() else {
            return bad("empty family".into());
        };
        let dim = first.dim();
        if projections.iter().any(|p| p.dim() != dim) {
            return bad("projections of different dimensions".into());
        }
        for (k, p) in projections.iter().enumerate() {
            let pm = p.as_matrix();
            let e = pm.matmul(pm).sub(pm).norm2();
            if e > MAP_TOL {
                return bad(format!("P_{} is not idempotent ({e:e})", k + 1));
            }
        }
        for j in 0..projections.len() {
            for k in (j + 1)..projections.len() {
                let e = projections[j]
                    .as_matrix()
                    .matmul(projections[k].as_matrix())
                    .norm2();
                if e > MAP_TOL {
                    return bad(format!("P_{} P_{} = {e:e} != 0", j + 1, k + 1));
                }
            }
        }
        let total = HermitianMatrix::weighted_sum(&projections, &vec![1.0; projections.len()]);
        let e = total.sub(&HermitianMatrix::identity(dim)).norm2();
        if e > MAP_TOL {
            return bad(format!("sum differs from identity by {e:e}"));
        }
        Ok(Self { projections, dim })
    }

    /// Diagonal projections onto the index groups `assignment[i] = group of basis vector i`.
    pub fn basis_partition(assignment: &[usize], groups: usize) -> Result<Self> {
        if assignment.iter().any(|&g| g >= groups) {
            return Err(Error::InvalidParameter("group index out of range".into()));
        }
        let projs = (0..groups)
            .map(|g| {
                let d: Vec<f64> = assignment
                    .iter()
                    .map(|&a| if a == g { 1.0 } else { 0.0 })
                    .collect();
                HermitianMatrix::diag(&d)
            })
            .collect();
        Self::new(projs)
    }

    /// `U* P_k U` for every member.
    pub fn rotated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim || !u.is_square() {
            return Err(Error::dims(self.dim, u.rows()));
        }
        Self::new(self.projections.iter().map(|p| p.congruence(u)).collect())
    }

    pub fn projections(&self) -> &[HermitianMatrix] {
        &self.projections
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }
}

/// Rank-one resolution of the identity: `P` with all entries `1/n` and
/// `P_k = E^{-k} P E^k` for `k = 1..n`.
pub fn build_projection_family(n: usize) -> Result<ProjectionFamily> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "projection family needs n >= 1".into(),
        ));
    }
    let p = ComplexMatrix::from_fn(n, n, |_, _| C64::new(1.0 / n as f64, 0.0));
    let projs = (1..=n)
        .map(|k| {
            let ek = en_power(n, k);
            HermitianMatrix::from_matrix(&ek.adjoint().matmul(&p).matmul(&ek))
        })
        .collect();
    ProjectionFamily::new(projs)
}

/// Completes the block column `(C_1, …, C_n)` (each `d×d`) to a unitary whose
/// last block column is that column.
///
/// When `Σ C_k* C_k` is a strict contraction the column is first extended by
/// the defect block `(I - Σ C_k* C_k)^{1/2}`, so the result is
/// `(n+1)d × (n+1)d`. Any other column fails with [`Error::NotUnital`].
pub fn complete_column_to_unitary(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let Some(first) = blocks.first() else {
        return Err(Error::InvalidParameter("empty block column".into()));
    };
    let d = first.cols();
    if blocks.iter().any(|c| c.rows() != d || c.cols() != d) {
        return Err(Error::dims(
            format!("{d}x{d} blocks"),
            "blocks of mixed shape",
        ));
    }
    let v = ComplexMatrix::vstack(blocks);
    let defect_norm = isometry_defect(&v);
    let v = if defect_norm <= MAP_TOL {
        v
    } else {
        let gram = HermitianMatrix::from_matrix(&v.adjoint().matmul(&v));
        let defect = HermitianMatrix::identity(d).sub(&gram);
        let eig = hermitian_eig(&defect)?;
        if eig.lambda_min() < -MAP_TOL {
            return Err(Error::NotUnital {
                deviation: defect_norm,
            });
        }
        let mut extended = blocks.to_vec();
        extended.push(psd_sqrt(&defect)?.into_matrix());
        ComplexMatrix::vstack(&extended)
    };
    let total = v.rows();
    let mut rng = seeded(COMPLETION_SEED);
    let complement = loop {
        let trial = gaussian_matrix(total, total - d, &mut rng);
        let mut joined = ComplexMatrix::zeros(total, total);
        joined.set_block(0, 0, &v);
        joined.set_block(0, d, &trial);
        // Orthonormalizing [V | G] keeps V (already orthonormal) and makes
        // the Gaussian columns an orthonormal basis of V's complement.
        if let Some(q) = orthonormalize_columns(&joined) {
            break q.block(0, d, total, total - d);
        }
    };
    let mut u = ComplexMatrix::zeros(total, total);
    u.set_block(0, 0, &complement);
    u.set_block(0, total - d, &v);
    let err = isometry_defect(&u);
    if err > MAP_TOL {
        return Err(Error::VerificationFailed(format!(
            "completion is not unitary ({err:e})"
        )));
    }
    Ok(u)
}

/// Block operators on `H ⊕ H` built from `A`, `B` and `λ`:
/// `X = A ⊕ B`, `P = I ⊕ 0`, `Q = I - P`, and the unitaries
/// `C = [[√λ, -√(1-λ)], [√(1-λ), √λ]] ⊗ I` and `D = [[√(1-λ), -√λ], [√λ, √(1-λ)]] ⊗ I`.
#[derive(Clone, Debug)]
pub struct DilationBlocks {
    pub x: HermitianMatrix,
    pub p: HermitianMatrix,
    pub q: HermitianMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
    pub lambda: f64,
}

/// Builds the block operators and checks the identities that hold for them:
/// `C`, `D` unitary; the diagonal blocks of `C*XC` are `λA + (1-λ)B` and
/// `(1-λ)A + λB`; those of `D*XD` are `(1-λ)A + λB` and `λA + (1-λ)B`;
/// `P C*XC P = (λA + (1-λ)B) ⊕ 0` and `Q D*XD Q = 0 ⊕ (λA + (1-λ)B)`.
///
/// The off-diagonal blocks of `C*XC` and `D*XD` equal `±√(λ(1-λ))(B - A)`
/// and are generally non-zero.
pub fn build_dilation_blocks(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    lambda: f64,
) -> Result<DilationBlocks> {
    if a.dim() != b.dim() {
        return Err(Error::dims(a.dim(), b.dim()));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} outside [0, 1]"
        )));
    }
    let n = a.dim();
    let id = ComplexMatrix::identity(n);
    let zero = ComplexMatrix::zeros(n, n);
    let (s, c) = (lambda.sqrt(), (1.0 - lambda).sqrt());
    let rot = |a11: f64, a12: f64, a21: f64, a22: f64| {
        ComplexMatrix::from_real_rows(&[&[a11, a12], &[a21, a22]]).kron(&id)
    };
    let cm = rot(s, -c, c, s);
    let dm = rot(c, -s, s, c);
    let x = HermitianMatrix::from_matrix(&ComplexMatrix::direct_sum(&[
        a.as_matrix().clone(),
        b.as_matrix().clone(),
    ]));
    let p = HermitianMatrix::from_matrix(&ComplexMatrix::direct_sum(&[id.clone(), zero.clone()]));
    let q = HermitianMatrix::identity(2 * n).sub(&p);

    let tol = MAP_TOL
        * a.as_matrix()
            .max_abs()
            .max(b.as_matrix().max_abs())
            .max(1.0);
    let check = |what: &str, err: f64, tol: f64| {
        if err > tol {
            Err(Error::VerificationFailed(format!(
                "{what}: residual {err:e}"
            )))
        } else {
            Ok(())
        }
    };
    check("C unitary", isometry_defect(&cm), MAP_TOL)?;
    check("D unitary", isometry_defect(&dm), MAP_TOL)?;

    let mix = a.scale(lambda).add(&b.scale(1.0 - lambda));
    let swap = a.scale(1.0 - lambda).add(&b.scale(lambda));
    let cxc = x.congruence(&cm);
    let dxd = x.congruence(&dm);
    let blk = |h: &HermitianMatrix, r: usize, c: usize| h.as_matrix().block(r * n, c * n, n, n);
    check(
        "(C*XC)_11",
        blk(&cxc, 0, 0).max_abs_diff(mix.as_matrix()),
        tol,
    )?;
    check(
        "(C*XC)_22",
        blk(&cxc, 1, 1).max_abs_diff(swap.as_matrix()),
        tol,
    )?;
    check(
        "(D*XD)_11",
        blk(&dxd, 0, 0).max_abs_diff(swap.as_matrix()),
        tol,
    )?;
    check(
        "(D*XD)_22",
        blk(&dxd, 1, 1).max_abs_diff(mix.as_matrix()),
        tol,
    )?;

    let pcxcp = cxc.congruence(p.as_matrix());
    let expected_p = ComplexMatrix::direct_sum(&[mix.as_matrix().clone(), zero.clone()]);
    check("P C*XC P", pcxcp.as_matrix().max_abs_diff(&expected_p), tol)?;
    let qdxdq = dxd.congruence(q.as_matrix());
    let expected_q = ComplexMatrix::direct_sum(&[zero, mix.as_matrix().clone()]);
    check("Q D*XD Q", qdxdq.as_matrix().max_abs_diff(&expected_q), tol)?;

    Ok(DilationBlocks {
        x,
        p,
        q,
        c: cm,
        d: dm,
        lambda,
    })
}

/// Concrete representation of a positive unital linear map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum MapVariant {
    /// Pinching onto `n` diagonal blocks of size `block`.
    Pinching { n: usize, block: usize },
    /// `A ↦ V*AV` for an isometry `V` (input_dim × output_dim).
    Isometry { v: ComplexMatrix },
    /// `A ↦ Σ K_i* A K_i` with `Σ K_i* K_i = I`.
    Kraus { ops: Vec<ComplexMatrix> },
    /// `A ↦ Σ w_i U_i* A U_i`.
    MixedUnitary {
        #[serde(with = "fmt17::vec")]
        weights: Vec<f64>,
        unitaries: Vec<ComplexMatrix>,
    },
    /// `A ↦ [⟨Ax, x⟩]`.
    VectorState {
        #[serde(with = "fmt17::pairs")]
        x: Vec<[f64; 2]>,
    },
}

/// A validated positive unital map `B(ℂ^input_dim) → B(ℂ^output_dim)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapVariant", into = "MapVariant")]
pub struct PositiveUnitalMap {
    variant: MapVariant,
    input_dim: usize,
    output_dim: usize,
}

impl TryFrom<MapVariant> for PositiveUnitalMap {
    type Error = Error;
    fn try_from(v: MapVariant) -> Result<Self> {
        PositiveUnitalMap::new(v)
    }
}

impl From<PositiveUnitalMap> for MapVariant {
    fn from(m: PositiveUnitalMap) -> Self {
        m.variant
    }
}

impl PositiveUnitalMap {
    /// Validates the variant's structure, unitality `Φ(I) = I` and a
    /// 100-sample positivity spot check on `Φ(G*G)`.
    pub fn new(variant: MapVariant) -> Result<Self> {
        let (input_dim, output_dim) = match &variant {
            MapVariant::Pinching { n, block } => {
                if *n == 0 || *block == 0 {
                    return Err(Error::InvalidParameter(
                        "pinching needs n, block >= 1".into(),
                    ));
                }
                (n * block, n * block)
            }
            MapVariant::Isometry { v } => {
                if v.rows() < v.cols() {
                    return Err(Error::dims(
                        "tall isometry",
                        format!("{}x{}", v.rows(), v.cols()),
                    ));
                }
                (v.rows(), v.cols())
            }
            MapVariant::Kraus { ops } => {
                let Some(k) = ops.first() else {
                    return Err(Error::InvalidParameter("no Kraus operators".into()));
                };
                if ops
                    .iter()
                    .any(|o| o.rows() != k.rows() || o.cols() != k.cols())
                {
                    return Err(Error::dims(
                        format!("{}x{}", k.rows(), k.cols()),
                        "Kraus operators of mixed shape",
                    ));
                }
                (k.rows(), k.cols())
            }
            MapVariant::MixedUnitary { weights, unitaries } => {
                if weights.len() != unitaries.len() || unitaries.is_empty() {
                    return Err(Error::NotNormalized {
                        reason: "one weight per unitary required".into(),
                    });
                }
                let sum: f64 = weights.iter().sum();
                if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) || (sum - 1.0).abs() > MAP_TOL
                {
                    return Err(Error::NotNormalized {
                        reason: format!("weights must be non-negative and sum to 1 (sum {sum})"),
                    });
                }
                let n = unitaries[0].rows();
                for u in unitaries {
                    if !u.is_square() || u.rows() != n {
                        return Err(Error::dims(
                            format!("{n}x{n}"),
                            format!("{}x{}", u.rows(), u.cols()),
                        ));
                    }
                    let e = isometry_defect(u);
                    if e > MAP_TOL {
                        return Err(Error::NotIsometry { deviation: e });
                    }
                }
                (n, n)
            }
            MapVariant::VectorState { x } => {
                if x.is_empty() {
                    return Err(Error::InvalidParameter("empty state vector".into()));
                }
                (x.len(), 1)
            }
        };
        let map = Self {
            variant,
            input_dim,
            output_dim,
        };
        let unit = map.apply_raw(&ComplexMatrix::identity(input_dim));
        let dev = unit.sub(&ComplexMatrix::identity(output_dim)).norm2();
        if dev > MAP_TOL {
            return Err(Error::NotUnital { deviation: dev });
        }
        map.spot_check_positivity()?;
        Ok(map)
    }

    pub fn pinching(n: usize) -> Result<Self> {
        Self::new(MapVariant::Pinching { n, block: 1 })
    }

    pub fn block_pinching(n: usize, block: usize) -> Result<Self> {
        Self::new(MapVariant::Pinching { n, block })
    }

    pub fn isometry(v: ComplexMatrix) -> Result<Self> {
        Self::new(MapVariant::Isometry { v })
    }

    pub fn kraus(ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(MapVariant::Kraus { ops })
    }

    pub fn mixed_unitary(weights: Vec<f64>, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(MapVariant::MixedUnitary { weights, unitaries })
    }

    pub fn vector_state(x: &[C64]) -> Result<Self> {
        Self::new(MapVariant::VectorState {
            x: x.iter().map(|z| [z.re, z.im]).collect(),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::isometry(ComplexMatrix::identity(n))
    }

    pub fn variant(&self) -> &MapVariant {
        &self.variant
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn kind(&self) -> &'static str {
        match self.variant {
            MapVariant::Pinching { .. } => "pinching",
            MapVariant::Isometry { .. } => "isometry",
            MapVariant::Kraus { .. } => "kraus",
            MapVariant::MixedUnitary { .. } => "mixed-unitary",
            MapVariant::VectorState { .. } => "vector-state",
        }
    }

    fn apply_raw(&self, a: &ComplexMatrix) -> ComplexMatrix {
        match &self.variant {
            MapVariant::Pinching { n, block } => {
                let blocks: Vec<ComplexMatrix> = (0..*n)
                    .map(|b| a.block(b * block, b * block, *block, *block))
                    .collect();
                ComplexMatrix::direct_sum(&blocks)
            }
            MapVariant::Isometry { v } => a.congruence(v),
            MapVariant::Kraus { ops } => {
                let mut acc = ComplexMatrix::zeros(self.output_dim, self.output_dim);
                for k in ops {
                    acc = acc.add(&a.congruence(k));
                }
                acc
            }
            MapVariant::MixedUnitary { weights, unitaries } => {
                let mut acc = ComplexMatrix::zeros(self.output_dim, self.output_dim);
                for (w, u) in weights.iter().zip(unitaries) {
                    acc = acc.add(&a.congruence(u).scale(*w));
                }
                acc
            }
            MapVariant::VectorState { x } => {
                let xv: Vec<C64> = x.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                a.congruence(&ComplexMatrix::column_vector(&xv))
            }
        }
    }

    fn spot_check_positivity(&self) -> Result<()> {
        let mut rng = seeded(POSITIVITY_SEED);
        for _ in 0..POSITIVITY_SAMPLES {
            let g = gaussian_matrix(self.input_dim, self.input_dim, &mut rng);
            let psd = g.adjoint().matmul(&g);
            let out = HermitianMatrix::from_matrix(&self.apply_raw(&psd));
            if !psd_within(&out, MAP_TOL) {
                let lambda_min = hermitian_eig(&out)
                    .map(|e| e.lambda_min())
                    .unwrap_or(f64::NAN);
                return Err(Error::NotPositive { lambda_min });
            }
        }
        Ok(())
    }

    /// `Φ(A)`; the result is re-symmetrized.
    pub fn apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        if a.dim() != self.input_dim {
            return Err(Error::dims(self.input_dim, a.dim()));
        }
        if let MapVariant::Pinching { n, block } = self.variant {
            let out = if block == 1 {
                pinch(a.as_matrix())?
            } else {
                block_pinch(a.as_matrix(), n, block)?
            };
            return Ok(HermitianMatrix::from_matrix(&out));
        }
        Ok(HermitianMatrix::from_matrix(&self.apply_raw(a.as_matrix())))
    }
}

/// Applies `Φ` to `A`.
pub fn apply_map(map: &PositiveUnitalMap, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    map.apply(a)
}

/// Cholesky test of `H + shift·I ≻ 0`, i.e. `λ_min(H) >= -shift` up to rounding.
fn psd_within(h: &HermitianMatrix, shift: f64) -> bool {
    let n = h.dim();
    let m = h.as_matrix();
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = m.get(j, j).re + shift;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if d <= 0.0 {
            return false;
        }
        let djj = d.sqrt();
        l[j * n + j] = C64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / djj;
        }
    }
    true
}

/// Kind of map a descriptor or sampler produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Pinching,
    BlockPinching,
    Isometry,
    Kraus,
    MixedUnitary,
    VectorState,
}

impl MapKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "pinching" => MapKind::Pinching,
            "block-pinching" => MapKind::BlockPinching,
            "isometry" => MapKind::Isometry,
            "kraus" => MapKind::Kraus,
            "mixed-unitary" => MapKind::MixedUnitary,
            "vector-state" => MapKind::VectorState,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown map variant `{other}`"
                )))
            }
        })
    }
}

/// Random map generator shared by descriptors and instance samplers.
///
/// * `Isometry` with `output_dim == input_dim` is a unitary conjugation.
/// * `Kraus` draws `terms` Gaussian `input×output` operators `G_i` and
///   normalizes them as `K_i = G_i T^{-1/2}` with `T = Σ G_i* G_i`.
/// * `MixedUnitary` draws `terms` Haar unitaries and weights from the
///   uniforms, normalized to sum to one.
/// * `BlockPinching` needs `block` to divide `input_dim`.
pub fn random_map(
    kind: MapKind,
    input_dim: usize,
    output_dim: usize,
    terms: usize,
    block: usize,
    src: &mut impl Source,
) -> Result<PositiveUnitalMap> {
    let square = || {
        if input_dim != output_dim {
            Err(Error::dims(input_dim, output_dim))
        } else {
            Ok(())
        }
    };
    match kind {
        MapKind::Pinching => {
            square()?;
            PositiveUnitalMap::pinching(input_dim)
        }
        MapKind::BlockPinching => {
            square()?;
            if block == 0 || !input_dim.is_multiple_of(block) {
                return Err(Error::InvalidParameter(format!(
                    "block {block} does not divide {input_dim}"
                )));
            }
            PositiveUnitalMap::block_pinching(input_dim / block, block)
        }
        MapKind::Isometry => {
            if output_dim > input_dim {
                return Err(Error::dims(format!("output <= {input_dim}"), output_dim));
            }
            let u = haar_unitary(input_dim, src);
            PositiveUnitalMap::isometry(u.block(0, 0, input_dim, output_dim))
        }
        MapKind::Kraus => {
            let gs: Vec<ComplexMatrix> = (0..terms.max(1))
                .map(|_| gaussian_matrix(input_dim, output_dim, src))
                .collect();
            let mut t = ComplexMatrix::zeros(output_dim, output_dim);
            for g in &gs {
                t = t.add(&g.adjoint().matmul(g));
            }
            let t = HermitianMatrix::from_matrix(&t);
            let eig = hermitian_eig(&t)?;
            if eig.lambda_min() <= 1e-8 * eig.lambda_max().max(1.0) {
                return Err(Error::InvalidParameter(
                    "Kraus normalization is singular".into(),
                ));
            }
            let inv_sqrt: Vec<f64> = eig.eigenvalues.iter().map(|l| 1.0 / l.sqrt()).collect();
            let t_inv_sqrt = eig.recompose(&inv_sqrt);
            let ops = gs
                .iter()
                .map(|g| g.matmul(t_inv_sqrt.as_matrix()))
                .collect();
            PositiveUnitalMap::kraus(ops)
        }
        MapKind::MixedUnitary => {
            square()?;
            let m = terms.max(1);
            let raw: Vec<f64> = (0..m).map(|_| 0.05 + src.uniform()).collect();
            let total: f64 = raw.iter().sum();
            let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            // make the weights sum to one exactly in floating point
            let head: f64 = weights[..m - 1].iter().sum();
            weights[m - 1] = 1.0 - head;
            let unitaries = (0..m).map(|_| haar_unitary(input_dim, src)).collect();
            PositiveUnitalMap::mixed_unitary(weights, unitaries)
        }
        MapKind::VectorState => {
            let raw: Vec<C64> = gaussian_matrix(input_dim, 1, src).column(0);
            let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let x: Vec<C64> = raw.iter().map(|z| z / norm).collect();
            PositiveUnitalMap::vector_state(&x)
        }
    }
}

/// Map descriptor as it appears in run configuration documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDescriptor {
    pub variant: MapKind,
    pub dim: usize,
    #[serde(default)]
    pub output_dim: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub terms: usize,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub block: usize,
}

fn one() -> usize {
    1
}

impl MapDescriptor {
    pub fn build(&self) -> Result<PositiveUnitalMap> {
        let mut rng = seeded(self.seed);
        let out = self.output_dim.unwrap_or(match self.variant {
            MapKind::VectorState => 1,
            _ => self.dim,
        });
        match (&self.variant, &self.weights) {
            (MapKind::MixedUnitary, Some(w)) => {
                let unitaries = w.iter().map(|_| haar_unitary(self.dim, &mut rng)).collect();
                PositiveUnitalMap::mixed_unitary(w.clone(), unitaries)
            }
            _ => random_map(
                self.variant,
                self.dim,
                out,
                self.terms,
                self.block,
                &mut rng,
            ),
        }
    }
}

#[cfg(test)]
mod tests;
