//! Random states and operators for property tests and examples.

use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{inner, norm, CMatrix, C64};
use super::state::{DensityOp, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    ginibre(n, rng).hermitian_part()
}

/// Full-rank random density operator `G G^dagger / tr`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityOp {
    let g = ginibre(n, rng);
    let m = g.matmul(&g.adjoint()).hermitian_part();
    let tr = m.trace().re;
    DensityOp::from_trusted(m.scale_real(1.0 / tr))
}

/// Haar-ish random pure state.
pub fn random_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    let v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    PureState::normalized(v).expect("gaussian vector is nonzero")
}

/// Random unitary from Gram-Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        for c in &cols {
            let proj = inner(c, &v);
            v.iter_mut().zip(c).for_each(|(x, y)| *x -= proj * y);
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            cols.push(v);
        }
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}
