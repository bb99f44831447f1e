//! Fixed matrix pairs that separate the operator notions from the scalar ones.

use crate::linalg::HermitianMatrix;

/// A named pair `(A, B)` with mixing weight `α`.
#[derive(Clone, Debug)]
pub struct PairFixture {
    pub name: &'static str,
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub alpha: f64,
}

/// `A = [[2,1],[1,1]]`, `B = diag(1,0)`, `α = 1/2`: refutes `t³`.
pub fn cube_pair() -> PairFixture {
    PairFixture {
        name: "cube-pair",
        a: HermitianMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]),
        b: HermitianMatrix::diag(&[1.0, 0.0]),
        alpha: 0.5,
    }
}

/// `A = diag(3,1)`, `B = diag(1,2)`, `α = 1/2`: refutes `t⁻¹`.
pub fn recip_pair() -> PairFixture {
    PairFixture {
        name: "recip-pair",
        a: HermitianMatrix::diag(&[3.0, 1.0]),
        b: HermitianMatrix::diag(&[1.0, 2.0]),
        alpha: 0.5,
    }
}

pub fn all() -> Vec<PairFixture> {
    vec![cube_pair(), recip_pair()]
}

pub fn by_name(name: &str) -> Option<PairFixture> {
    all().into_iter().find(|p| p.name == name)
}
