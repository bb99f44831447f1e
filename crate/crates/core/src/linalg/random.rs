use super::{ComplexMatrix, HermitianMatrix, C64};
use crate::rng::{seeded, Source};
use crate::{Error, Result};

/// Complex Ginibre matrix, entries `(x + iy)/√2` with `x, y ~ N(0,1)`.
pub fn gaussian_matrix(rows: usize, cols: usize, src: &mut impl Source) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(src.gaussian() * s, src.gaussian() * s)
    })
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
///
/// Returns `None` when a column loses more than `1 - 1e-8` of its norm to the
/// span of the previous ones.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = m.column(j);
        let start = norm(&v);
        if start == 0.0 {
            return None;
        }
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let nv = norm(&v);
        if nv <= 1e-8 * start {
            return None;
        }
        for x in &mut v {
            *x /= nv;
        }
        q.push(v);
    }
    Some(ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i]))
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Haar-distributed unitary from the Q factor of a Ginibre matrix. Gram–Schmidt
/// yields a positive real diagonal in R, which is what makes Q Haar.
pub fn haar_unitary(n: usize, src: &mut impl Source) -> ComplexMatrix {
    loop {
        if let Some(q) = orthonormalize_columns(&gaussian_matrix(n, n, src)) {
            return q;
        }
    }
}

pub fn random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::dims("positive dimension", 0));
    }
    Ok(haar_unitary(dim, &mut seeded(seed)))
}

/// `U diag(λ) U*` with `λᵢ ~ U[lo, hi]` and Haar `U`.
pub fn random_psd(dim: usize, spectrum: (f64, f64), seed: u64) -> Result<HermitianMatrix> {
    random_psd_from(dim, spectrum, &mut seeded(seed))
}

pub fn random_psd_from(
    dim: usize,
    (lo, hi): (f64, f64),
    src: &mut impl Source,
) -> Result<HermitianMatrix> {
    if dim == 0 {
        return Err(Error::dims("positive dimension", 0));
    }
    if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "spectrum range [{lo}, {hi}]"
        )));
    }
    let lambdas: Vec<f64> = (0..dim).map(|_| lo + (hi - lo) * src.uniform()).collect();
    let u = haar_unitary(dim, src);
    let scaled = ComplexMatrix::from_fn(dim, dim, |i, j| u.get(i, j) * lambdas[j]);
    Ok(HermitianMatrix::from_matrix(&scaled.matmul(&u.adjoint())))
}
