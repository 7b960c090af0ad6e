//! Complete sets of `d + 1` mutually unbiased bases for prime `d`.
//!
//! Basis 0 is computational, basis `d` is Fourier and bases `r = 1..d-1`
//! carry quadratic phases `exp(2 pi i r (a + n)^2 / d)`. The quadratic
//! construction degenerates at `d = 2`, where the Pauli eigenbases are used
//! in the order (z, y, x).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{inner, CMatrix, PrimeDim, C64};
use crate::tolerances::TOL_BASIS;

/// `d + 1` orthonormal bases; basis `v` is stored as a unitary whose column
/// `a` is `|phi^v_a>`.
#[derive(Debug, Clone)]
pub struct MubFamily {
    d: PrimeDim,
    bases: Vec<CMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnbiasednessReport {
    pub max_orthonormality_error: f64,
    pub max_unbiasedness_error: f64,
}

impl UnbiasednessReport {
    pub fn passes(&self) -> bool {
        self.max_orthonormality_error < TOL_BASIS && self.max_unbiasedness_error < TOL_BASIS
    }
}

impl MubFamily {
    /// Wraps arbitrary bases without checking them.
    pub fn from_bases(d: PrimeDim, bases: Vec<CMatrix>) -> Result<Self> {
        let n = d.get();
        for b in &bases {
            if b.rows() != n || b.cols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: b.rows().max(b.cols()) });
            }
        }
        Ok(Self { d, bases })
    }

    pub fn d(&self) -> PrimeDim {
        self.d
    }

    pub fn num_bases(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[CMatrix] {
        &self.bases
    }

    pub fn basis(&self, v: usize) -> Result<&CMatrix> {
        self.bases
            .get(v)
            .ok_or(Error::IndexOutOfRange { what: "setting", index: v, len: self.bases.len() })
    }

    pub fn vector(&self, v: usize, a: usize) -> Result<Vec<C64>> {
        let basis = self.basis(v)?;
        if a >= basis.cols() {
            return Err(Error::IndexOutOfRange { what: "outcome", index: a, len: basis.cols() });
        }
        Ok(basis.column(a))
    }

    /// Reorders the bases: new basis `k` is old basis `perm[k]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let bases = perm
            .iter()
            .map(|&v| self.basis(v).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d: self.d, bases })
    }

    /// Reorders the vectors inside every basis: new vector `a` of basis `v` is
    /// old vector `perms[v][a]`.
    pub fn with_vector_order(&self, perms: &[Vec<usize>]) -> Result<Self> {
        let n = self.d.get();
        let bases = self
            .bases
            .iter()
            .zip(perms)
            .map(|(b, p)| CMatrix::from_fn(n, n, |i, a| b[(i, p[a])]))
            .collect();
        Ok(Self { d: self.d, bases })
    }
}

fn make_phase_canonical(v: &mut [C64]) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-14).copied() {
        let phase = first.conj() / first.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

fn basis_from_vectors(vectors: Vec<Vec<C64>>) -> CMatrix {
    let n = vectors.len();
    CMatrix::from_fn(n, n, |i, a| vectors[a][i])
}

fn qubit_bases() -> Vec<CMatrix> {
    let s = 1.0 / 2f64.sqrt();
    let z = vec![
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ];
    let y = vec![vec![C64::new(s, 0.0), C64::new(0.0, s)], vec![C64::new(s, 0.0), C64::new(0.0, -s)]];
    let x = vec![vec![C64::new(s, 0.0), C64::new(s, 0.0)], vec![C64::new(s, 0.0), C64::new(-s, 0.0)]];
    [z, y, x].into_iter().map(basis_from_vectors).collect()
}

fn prime_bases(d: usize) -> Vec<CMatrix> {
    let amp = 1.0 / (d as f64).sqrt();
    let phase = |k: usize| C64::from_polar(amp, 2.0 * PI * (k % d) as f64 / d as f64);
    let mut bases = Vec::with_capacity(d + 1);
    bases.push(CMatrix::identity(d));
    for r in 1..d {
        let vectors = (0..d)
            .map(|a| {
                let mut v: Vec<C64> = (0..d).map(|n| phase(r * ((a + n) % d) * ((a + n) % d))).collect();
                make_phase_canonical(&mut v);
                v
            })
            .collect();
        bases.push(basis_from_vectors(vectors));
    }
    let fourier = (0..d)
        .map(|a| {
            let mut v: Vec<C64> = (0..d).map(|n| phase(a * n)).collect();
            make_phase_canonical(&mut v);
            v
        })
        .collect();
    bases.push(basis_from_vectors(fourier));
    bases
}

/// Builds and validates the full MUB family.
pub fn build_mub(d: PrimeDim) -> Result<MubFamily> {
    let bases = if d.get() == 2 { qubit_bases() } else { prime_bases(d.get()) };
    let family = MubFamily { d, bases };
    let report = verify_unbiased(&family);
    if !report.passes() {
        return Err(Error::Inconsistent(format!("MUB construction failed its own check: {report:?}")));
    }
    Ok(family)
}

/// Largest deviations from orthonormality and from `|<u|v>|^2 = 1/d`.
pub fn verify_unbiased(m: &MubFamily) -> UnbiasednessReport {
    let n = m.d.get();
    let target = 1.0 / n as f64;
    let columns: Vec<Vec<Vec<C64>>> =
        m.bases.iter().map(|b| (0..n).map(|a| b.column(a)).collect()).collect();
    let mut ortho: f64 = 0.0;
    let mut unbiased: f64 = 0.0;
    for (u, bu) in columns.iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                let ip = inner(&bu[a], &bu[b]);
                let want = if a == b { 1.0 } else { 0.0 };
                ortho = ortho.max((ip - C64::new(want, 0.0)).norm());
            }
        }
        for bv in columns.iter().skip(u + 1) {
            for x in bu {
                for y in bv {
                    unbiased = unbiased.max((inner(x, y).norm_sqr() - target).abs());
                }
            }
        }
    }
    UnbiasednessReport { max_orthonormality_error: ortho, max_unbiasedness_error: unbiased }
}

/// Rank-one projectors `|phi^v_a><phi^v_a|` of basis `v`.
pub fn projectors(m: &MubFamily, v: usize) -> Result<Vec<CMatrix>> {
    let basis = m.basis(v)?;
    Ok((0..basis.cols()).map(|a| {
        let col = basis.column(a);
        CMatrix::outer(&col, &col)
    }).collect())
}
