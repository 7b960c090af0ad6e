//! Operations acting on subsystem A of a `d x d` bipartite operator.
//!
//! Row/column index of the bipartite matrix is `a * d + b`. Every routine
//! here costs O(d^5) instead of the O(d^6) of forming `X (x) I` explicitly.

use super::matrix::{CMatrix, ZERO};

/// `(L (x) I) rho (R (x) I)`.
pub fn sandwich_a(rho: &CMatrix, d: usize, left: &CMatrix, right: &CMatrix) -> CMatrix {
    let n = d * d;
    debug_assert_eq!(rho.rows(), n);
    let mut w = CMatrix::zeros(n, n);
    {
        let src = rho.as_slice();
        let dst = w.as_mut_slice();
        for r in 0..n {
            let src_row = &src[r * n..(r + 1) * n];
            let dst_row = &mut dst[r * n..(r + 1) * n];
            for l in 0..d {
                let src_block = &src_row[l * d..(l + 1) * d];
                for m in 0..d {
                    let coef = right[(l, m)];
                    if coef == ZERO {
                        continue;
                    }
                    let dst_block = &mut dst_row[m * d..(m + 1) * d];
                    for (o, &x) in dst_block.iter_mut().zip(src_block) {
                        *o += coef * x;
                    }
                }
            }
        }
    }
    let mut out = CMatrix::zeros(n, n);
    {
        let src = w.as_slice();
        let dst = out.as_mut_slice();
        for j in 0..d {
            for k in 0..d {
                let coef = left[(j, k)];
                if coef == ZERO {
                    continue;
                }
                for b in 0..d {
                    let src_row = &src[(k * d + b) * n..(k * d + b + 1) * n];
                    let dst_row = &mut dst[(j * d + b) * n..(j * d + b + 1) * n];
                    for (o, &x) in dst_row.iter_mut().zip(src_row) {
                        *o += coef * x;
                    }
                }
            }
        }
    }
    out
}

/// Moves A into the frame of the basis whose vectors are the columns of `u`:
/// `(U^dagger (x) I) rho (U (x) I)`.
pub fn rotate_into(rho: &CMatrix, d: usize, u: &CMatrix) -> CMatrix {
    sandwich_a(rho, d, &u.adjoint(), u)
}

/// Inverse of [`rotate_into`].
pub fn rotate_out(rho: &CMatrix, d: usize, u: &CMatrix) -> CMatrix {
    sandwich_a(rho, d, u, &u.adjoint())
}

/// Multiplies the (m, n) A-block by `coeff[m * d + n]`.
pub fn scale_blocks(m: &mut CMatrix, d: usize, coeff: &[f64]) {
    let n = d * d;
    debug_assert_eq!(coeff.len(), d * d);
    let data = m.as_mut_slice();
    for row in 0..n {
        let a = row / d;
        for bcol in 0..d {
            let c = coeff[a * d + bcol];
            for x in &mut data[row * n + bcol * d..row * n + (bcol + 1) * d] {
                *x *= c;
            }
        }
    }
}

/// The unnormalized B operators `tr_A[(|u_m><u_m| (x) I) rho]` for every
/// column `u_m` of `u`.
pub fn projected_b_operators(rho: &CMatrix, d: usize, u: &CMatrix) -> Vec<CMatrix> {
    let n = d * d;
    // w[(k, b), (m, b')] = sum_l rho[(k, b), (l, b')] u[l, m]
    let mut w = CMatrix::zeros(n, n);
    {
        let src = rho.as_slice();
        let dst = w.as_mut_slice();
        for r in 0..n {
            for l in 0..d {
                let src_block = &src[r * n + l * d..r * n + (l + 1) * d];
                for m in 0..d {
                    let coef = u[(l, m)];
                    if coef == ZERO {
                        continue;
                    }
                    let dst_block = &mut dst[r * n + m * d..r * n + (m + 1) * d];
                    for (o, &x) in dst_block.iter_mut().zip(src_block) {
                        *o += coef * x;
                    }
                }
            }
        }
    }
    (0..d)
        .map(|m| {
            let mut tau = CMatrix::zeros(d, d);
            for k in 0..d {
                let coef = u[(k, m)].conj();
                if coef == ZERO {
                    continue;
                }
                for b in 0..d {
                    let src = &w.row(k * d + b)[m * d..(m + 1) * d];
                    for (bp, &x) in src.iter().enumerate() {
                        tau[(b, bp)] += coef * x;
                    }
                }
            }
            tau
        })
        .collect()
}

/// `sum_m weights[m] * ops[m]`.
pub fn weighted_sum(ops: &[CMatrix], weights: &[f64]) -> CMatrix {
    let mut out = CMatrix::zeros(ops[0].rows(), ops[0].cols());
    for (op, &w) in ops.iter().zip(weights) {
        if w != 0.0 {
            out.add_scaled(op, w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::kron;
    use crate::qcore::random::{random_density, random_unitary};
    use crate::qcore::state::{partial_trace_matrix, Subsystem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sandwich_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2, 3] {
            let rho = random_density(d * d, &mut rng);
            let l = random_unitary(d, &mut rng);
            let r = random_unitary(d, &mut rng);
            let id = CMatrix::identity(d);
            let want = kron(&l, &id).matmul(rho.matrix()).matmul(&kron(&r, &id));
            let got = sandwich_a(rho.matrix(), d, &l, &r);
            assert!(got.max_abs_diff(&want) < 1e-13);
            let back = rotate_out(&rotate_into(rho.matrix(), d, &l), d, &l);
            assert!(back.max_abs_diff(rho.matrix()) < 1e-13);
        }
    }

    #[test]
    fn projected_operators_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 3;
        let rho = random_density(d * d, &mut rng);
        let u = random_unitary(d, &mut rng);
        let taus = projected_b_operators(rho.matrix(), d, &u);
        for (m, tau) in taus.iter().enumerate() {
            let col = u.column(m);
            let proj = CMatrix::outer(&col, &col);
            let full = kron(&proj, &CMatrix::identity(d)).matmul(rho.matrix());
            let want = partial_trace_matrix(&full, Subsystem::A).unwrap();
            assert!(tau.max_abs_diff(&want) < 1e-13);
        }
    }

    #[test]
    fn scale_blocks_uniform_is_scalar_multiple() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_density(4, &mut rng).into_matrix();
        let mut m = rho.clone();
        scale_blocks(&mut m, 2, &[0.5; 4]);
        assert!(m.max_abs_diff(&rho.scale_real(0.5)) < 1e-15);
    }
}
