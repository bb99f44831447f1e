use super::{ComplexMatrix, HermitianMatrix, C64, EIG_RTOL};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `H = U diag(λ) U*` with ascending eigenvalues and orthonormal columns in `U`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// `U diag(values) U*`.
    pub fn recompose(&self, values: &[f64]) -> HermitianMatrix {
        let u = &self.eigenvectors;
        let n = u.rows();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| u.get(i, j) * values[j]);
        HermitianMatrix::from_matrix(&scaled.matmul(&u.adjoint()))
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `||U*U - I||_F`, an upper bound on the spectral-norm defect.
    pub fn unitarity_residual(&self) -> f64 {
        let u = &self.eigenvectors;
        u.adjoint()
            .matmul(u)
            .sub(&ComplexMatrix::identity(u.cols()))
            .frobenius()
    }

    /// `||U diag(λ) U* - H||_F`.
    pub fn reconstruction_residual(&self, h: &HermitianMatrix) -> f64 {
        self.recompose(&self.eigenvalues)
            .as_matrix()
            .sub(h.as_matrix())
            .frobenius()
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies
/// the real symmetric Jacobi rotation that annihilates it. Sweeps continue
/// until the off-diagonal mass is negligible against the Frobenius norm.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let mut a = h.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius();

    let mut sweeps = 0;
    if scale > 0.0 {
        loop {
            let off = off_diagonal_norm(&a);
            if off <= 1e-15 * scale {
                break;
            }
            if sweeps == MAX_SWEEPS {
                return Err(Error::ConvergenceFailure {
                    sweeps,
                    residual: off / scale,
                });
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));

    let dec = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };
    let norm = dec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let recon = dec.reconstruction_residual(h);
    let unit = dec.unitarity_residual();
    if recon > EIG_RTOL * norm.max(1.0) || unit > EIG_RTOL {
        return Err(Error::ConvergenceFailure {
            sweeps,
            residual: recon.max(unit),
        });
    }
    Ok(dec)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let alpha = a.get(p, p).re;
    let beta = a.get(q, q).re;
    // Skip pivots below the rounding level of the diagonal.
    if g <= f64::EPSILON * 1e-2 * (alpha.abs() + beta.abs()) {
        a.set(p, q, C64::new(0.0, 0.0));
        a.set(q, p, C64::new(0.0, 0.0));
        return;
    }
    let phase = apq / g; // e^{iφ}
    let theta = (beta - alpha) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = phase.conj() * (-s);
    let j_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * j_pp + akq * j_qp);
        a.set(k, q, akp * j_pq + akq * j_qq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, j_pp.conj() * apk + j_qp.conj() * aqk);
        a.set(q, k, j_pq.conj() * apk + j_qq.conj() * aqk);
    }
    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
    a.set(p, p, C64::new(a.get(p, p).re, 0.0));
    a.set(q, q, C64::new(a.get(q, q).re, 0.0));

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * j_pp + vkq * j_qp);
        v.set(k, q, vkp * j_pq + vkq * j_qq);
    }
}
