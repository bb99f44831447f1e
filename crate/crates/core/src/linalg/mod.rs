//! Complex Hermitian linear algebra: dense matrices, eigendecomposition,
//! the spectral functional calculus, Loewner-order comparison and random
//! instance generation.

mod eig;
mod loewner;
mod matrix;
mod random;

pub use eig::{hermitian_eig, SpectralDecomposition};
pub use loewner::{loewner_compare, LoewnerVerdict, Relation};
pub use matrix::{ComplexMatrix, HermitianMatrix, C64};
pub use random::{
    gaussian_matrix, haar_unitary, orthonormalize_columns, random_psd, random_psd_from,
    random_unitary,
};

use crate::funclass::ScalarFunctionSpec;
use crate::{Error, Result};

/// Tolerance on reconstruction and unitarity residuals of an eigendecomposition.
pub const EIG_RTOL: f64 = 1e-10;

/// `U diag(f(λ)) U*` for the eigendecomposition `H = U diag(λ) U*`.
///
/// Every eigenvalue must lie in the domain of `f` under the boundary rule of
/// [`crate::funclass::Interval::contains`]; eigenvalues within the closed
/// boundary slack are clamped onto the interval before evaluation.
pub fn apply_function(f: &ScalarFunctionSpec, h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = hermitian_eig(h)?;
    let offending: Vec<f64> = eig
        .eigenvalues
        .iter()
        .copied()
        .filter(|&l| !f.domain().contains(l))
        .collect();
    if !offending.is_empty() {
        return Err(Error::DomainViolation {
            function: f.name().to_string(),
            domain: f.domain().to_string(),
            offending,
        });
    }
    let mut values = Vec::with_capacity(eig.eigenvalues.len());
    for &l in &eig.eigenvalues {
        let v = f.eval(f.domain().clamp(l));
        if !v.is_finite() {
            return Err(Error::DomainViolation {
                function: f.name().to_string(),
                domain: f.domain().to_string(),
                offending: vec![l],
            });
        }
        values.push(v);
    }
    Ok(eig.recompose(&values))
}

/// Applies a plain closure through the spectral calculus, without domain checks.
pub fn map_spectrum(h: &HermitianMatrix, g: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let eig = hermitian_eig(h)?;
    let values: Vec<f64> = eig.eigenvalues.iter().map(|&l| g(l)).collect();
    Ok(eig.recompose(&values))
}

/// Operator absolute value `|A| = U diag(|λ|) U*`.
pub fn operator_abs(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    map_spectrum(a, f64::abs)
}

/// Positive semidefinite square root; negative rounding-level eigenvalues are treated as zero.
pub fn psd_sqrt(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    map_spectrum(a, |l| l.max(0.0).sqrt())
}

/// Whether `C*C <= I` in the Loewner order.
pub fn is_contraction(c: &ComplexMatrix, tol: f64) -> bool {
    let gram = HermitianMatrix::from_matrix(&c.adjoint().matmul(c));
    let id = HermitianMatrix::identity(c.cols());
    loewner_compare(&gram, &id, tol)
        .map(|v| v.holds_psd())
        .unwrap_or(false)
}

/// Whether `C*C = I`; `C` must have at least as many rows as columns.
pub fn is_isometry(c: &ComplexMatrix, tol: f64) -> Result<bool> {
    if c.rows() < c.cols() {
        return Err(Error::dims(
            format!("tall matrix (rows >= {})", c.cols()),
            format!("{}x{}", c.rows(), c.cols()),
        ));
    }
    Ok(isometry_defect(c) <= tol)
}

/// `||C*C - I||_2`.
pub fn isometry_defect(c: &ComplexMatrix) -> f64 {
    let gram = c.adjoint().matmul(c);
    gram.sub(&ComplexMatrix::identity(c.cols())).norm2()
}

/// Whether `P² = P = P*`.
pub fn is_projection(p: &ComplexMatrix, tol: f64) -> Result<bool> {
    if !p.is_square() {
        return Err(Error::dims(
            "square matrix",
            format!("{}x{}", p.rows(), p.cols()),
        ));
    }
    let idempotent = p.matmul(p).sub(p).norm2();
    let selfadjoint = p.sub(&p.adjoint()).norm2();
    Ok(idempotent <= tol && selfadjoint <= tol)
}

#[cfg(test)]
mod tests;
