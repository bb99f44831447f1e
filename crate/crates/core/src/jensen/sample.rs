use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Inequality, InequalityId, JensenInstance, Operands};
use crate::funclass::ScalarFunctionSpec;
use crate::linalg::{
    gaussian_matrix, haar_unitary, map_spectrum, random_psd_from, HermitianMatrix, C64,
};
use crate::maps::{build_projection_family, random_map, MapKind, ProjectionFamily};
use crate::rng::Source;
use crate::Result;

/// How random positive semidefinite operands are parameterized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PsdParam {
    /// `U diag(λ) U*` with Haar `U` and uniform eigenvalues in the range.
    #[default]
    Spectral,
    /// `G*G` for complex Gaussian `G`, squashed spectrally into the range
    /// by `x ↦ lo + (hi - lo) x / (1 + x)` (or `lo + x` for an unbounded range).
    Factor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionKind {
    /// The rank-one family `E^{-k} P E^k`; forces `terms = dim`.
    Fourier,
    /// Diagonal projections onto a random partition of the basis.
    BasisPartition,
    /// A basis partition conjugated by a Haar unitary.
    Rotated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOptions {
    pub max_terms: usize,
    /// Spectrum range for operands; `None` uses the function's sampling range.
    pub spectrum: Option<(f64, f64)>,
    pub psd: PsdParam,
    pub map_kinds: Vec<MapKind>,
    pub projection_kinds: Vec<ProjectionKind>,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            max_terms: 3,
            spectrum: None,
            psd: PsdParam::Spectral,
            map_kinds: vec![
                MapKind::Pinching,
                MapKind::BlockPinching,
                MapKind::Isometry,
                MapKind::Kraus,
                MapKind::MixedUnitary,
            ],
            projection_kinds: vec![
                ProjectionKind::Fourier,
                ProjectionKind::BasisPartition,
                ProjectionKind::Rotated,
            ],
        }
    }
}

impl SampleOptions {
    pub fn range_for(&self, f: &ScalarFunctionSpec) -> (f64, f64) {
        self.spectrum.unwrap_or_else(|| f.sampling_range())
    }
}

/// The discrete part of a random instance: everything except the continuous
/// parameters, which are drawn from a [`Source`] by [`Shape::build`].
#[derive(Clone, Debug, PartialEq)]
pub struct Shape {
    pub inequality: Inequality,
    pub dim: usize,
    pub terms: usize,
    /// Fixed mixing weight for the two-operator form; drawn when `None`.
    pub alpha: Option<f64>,
    pub map_kinds: Vec<MapKind>,
    pub block: usize,
    pub projection: ProjectionKind,
    pub assignment: Vec<usize>,
}

impl Shape {
    pub fn draw(
        inequality: Inequality,
        dim: usize,
        alpha: Option<f64>,
        opts: &SampleOptions,
        rng: &mut impl Rng,
    ) -> Self {
        let max_terms = opts.max_terms.max(1);
        let mut terms = rng.random_range(1..=max_terms);
        let map_kinds: Vec<MapKind> = (0..terms)
            .map(|_| match opts.map_kinds.len() {
                0 => MapKind::Pinching,
                k => opts.map_kinds[rng.random_range(0..k)],
            })
            .collect();
        let divisors: Vec<usize> = (1..=dim).filter(|&b| dim.is_multiple_of(b)).collect();
        let block = divisors[rng.random_range(0..divisors.len())];
        let projection = if opts.projection_kinds.is_empty() {
            ProjectionKind::Fourier
        } else {
            opts.projection_kinds[rng.random_range(0..opts.projection_kinds.len())]
        };
        let mut assignment = Vec::new();
        if inequality.id == InequalityId::Projection {
            match projection {
                ProjectionKind::Fourier => terms = dim,
                _ => {
                    terms = terms.min(dim);
                    // the first `terms` basis vectors seed distinct groups
                    assignment = (0..dim)
                        .map(|i| {
                            if i < terms {
                                i
                            } else {
                                rng.random_range(0..terms)
                            }
                        })
                        .collect();
                }
            }
        }
        Self {
            inequality,
            dim,
            terms,
            alpha,
            map_kinds,
            block,
            projection,
            assignment,
        }
    }

    /// Draws the continuous parameters and assembles the instance.
    pub fn build(
        &self,
        range: (f64, f64),
        psd: PsdParam,
        src: &mut impl Source,
    ) -> Result<JensenInstance> {
        let d = self.dim;
        let n = self.terms;
        let operands = match self.inequality.id {
            InequalityId::TwoPoint => {
                let a = sample_psd(d, range, psd, src)?;
                let b = sample_psd(d, range, psd, src)?;
                let alpha = self.alpha.unwrap_or_else(|| src.uniform());
                Operands::TwoPoint { a, b, alpha }
            }
            InequalityId::Weighted => {
                let a = (0..n)
                    .map(|_| sample_psd(d, range, psd, src))
                    .collect::<Result<_>>()?;
                let weights = (0..n).map(|_| 0.05 + src.uniform()).collect();
                Operands::Weighted { a, weights }
            }
            InequalityId::Contraction => {
                let a = (0..n)
                    .map(|_| sample_psd(d, range, psd, src))
                    .collect::<Result<_>>()?;
                let u = haar_unitary(n * d, src);
                let c = (0..n).map(|k| u.block(k * d, (n - 1) * d, d, d)).collect();
                Operands::Contraction { a, c }
            }
            InequalityId::Projection => {
                let a = (0..n)
                    .map(|_| sample_psd(d, range, psd, src))
                    .collect::<Result<_>>()?;
                let family = match self.projection {
                    ProjectionKind::Fourier => build_projection_family(d)?,
                    ProjectionKind::BasisPartition => {
                        ProjectionFamily::basis_partition(&self.assignment, n)?
                    }
                    ProjectionKind::Rotated => {
                        let u = haar_unitary(d, src);
                        ProjectionFamily::basis_partition(&self.assignment, n)?.rotated(&u)?
                    }
                };
                Operands::Projection { a, family }
            }
            InequalityId::Isometry => {
                let a = sample_psd(d, range, psd, src)?;
                Operands::Isometry {
                    a,
                    c: haar_unitary(d, src),
                }
            }
            InequalityId::Map | InequalityId::Kadison => {
                let a = sample_psd(d, range, psd, src)?;
                let map = random_map(self.map_kinds[0], d, d, n.max(2), self.block, src)?;
                if self.inequality.id == InequalityId::Map {
                    Operands::Map { a, map }
                } else {
                    Operands::Kadison { a, map }
                }
            }
            InequalityId::MultiMap => {
                let a = (0..n)
                    .map(|_| sample_psd(d, range, psd, src))
                    .collect::<Result<_>>()?;
                let raw: Vec<f64> = (0..n).map(|_| 0.05 + src.uniform()).collect();
                let total: f64 = raw.iter().sum();
                let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
                let head: f64 = weights[..n - 1].iter().sum();
                weights[n - 1] = 1.0 - head;
                let maps = self
                    .map_kinds
                    .iter()
                    .map(|&k| random_map(k, d, d, 2, self.block, src))
                    .collect::<Result<_>>()?;
                Operands::MultiMap { a, weights, maps }
            }
            InequalityId::VectorState => {
                let a = sample_psd(d, range, psd, src)?;
                let map = random_map(self.map_kinds[0], d, d, n.max(2), self.block, src)?;
                let raw: Vec<C64> = gaussian_matrix(d, 1, src).column(0);
                let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let x = raw.iter().map(|z| [z.re / norm, z.im / norm]).collect();
                Operands::VectorState { a, map, x }
            }
        };
        Ok(JensenInstance::new(operands, self.inequality.mode))
    }
}

fn sample_psd(
    d: usize,
    (lo, hi): (f64, f64),
    psd: PsdParam,
    src: &mut impl Source,
) -> Result<HermitianMatrix> {
    match psd {
        PsdParam::Spectral => random_psd_from(d, (lo, hi), src),
        PsdParam::Factor => {
            let g = gaussian_matrix(d, d, src);
            let h = HermitianMatrix::from_matrix(&g.adjoint().matmul(&g));
            map_spectrum(&h, |x| {
                let x = x.max(0.0);
                if hi.is_finite() {
                    lo + (hi - lo) * x / (1.0 + x)
                } else {
                    lo + x
                }
            })
        }
    }
}
