use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{luders_nonselective, make_unsharp, Sharpness};
use crate::mub::build_mub;
use crate::qcore::{eigenvalues_hermitian, kron, max_entangled_state, CMatrix, DensityOp, PrimeDim, C64};

fn paulis() -> [CMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMatrix::from_vec(2, 2, vec![z, o, o, z]).unwrap(),
        CMatrix::from_vec(2, 2, vec![z, -i, i, z]).unwrap(),
        CMatrix::from_vec(2, 2, vec![o, z, z, -o]).unwrap(),
    ]
}

/// `T_ij = tr(rho sigma_i (x) sigma_j)` for a two-qubit state.
pub fn correlation_matrix_2q(rho: &DensityOp) -> Result<[[f64; 3]; 3]> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    let s = paulis();
    let mut t = [[0.0; 3]; 3];
    for (i, si) in s.iter().enumerate() {
        for (j, sj) in s.iter().enumerate() {
            t[i][j] = rho.matrix().matmul(&kron(si, sj)).trace().re;
        }
    }
    Ok(t)
}

/// Maximal CHSH value `2 sqrt(t1^2 + t2^2)` from the two largest singular
/// values of the correlation matrix.
pub fn horodecki_chsh(rho: &DensityOp) -> Result<f64> {
    let t = correlation_matrix_2q(rho)?;
    let tt = CMatrix::from_fn(3, 3, |i, j| C64::new((0..3).map(|k| t[k][i] * t[k][j]).sum(), 0.0));
    let ev = eigenvalues_hermitian(&tt)?;
    Ok(2.0 * (ev[0].max(0.0) + ev[1].max(0.0)).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct ChshReport {
    pub lambda1: f64,
    pub chsh: f64,
    pub violation_percent: f64,
    /// CHSH value of the state left by each of Alice1's settings.
    pub per_setting: Vec<f64>,
}

/// CHSH value available to Alice2 and Bob after Alice1's nonselective qubit
/// measurement with sharpness `lambda1`.
pub fn chsh_residual_d2(lambda1: f64) -> Result<ChshReport> {
    let l = Sharpness::new(lambda1)?;
    let d = PrimeDim::new(2)?;
    let mub = build_mub(d)?;
    let psi = max_entangled_state(d);
    let per_setting = (0..3)
        .map(|v| horodecki_chsh(&luders_nonselective(&psi, &make_unsharp(&mub, v, l)?)?))
        .collect::<Result<Vec<_>>>()?;
    let lo = per_setting.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = per_setting.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > 1e-10 {
        return Err(Error::Inconsistent(format!("CHSH differs across settings: {per_setting:?}")));
    }
    let chsh = per_setting[0];
    Ok(ChshReport { lambda1, chsh, violation_percent: (chsh / 2.0 - 1.0) * 100.0, per_setting })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_state_reaches_tsirelson() {
        let psi = max_entangled_state(PrimeDim::new(2).unwrap());
        assert!((horodecki_chsh(&psi).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let t = correlation_matrix_2q(&psi).unwrap();
        assert!((t[0][0] - 1.0).abs() < 1e-15 && (t[1][1] + 1.0).abs() < 1e-15 && (t[2][2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn residual_values() {
        let r = chsh_residual_d2(5.0 / 6.0).unwrap();
        let l0 = 11f64.sqrt() / 6.0;
        assert!((r.chsh - 2.0 * (1.0 + l0 * l0).sqrt()).abs() < 1e-12);
        assert!((r.violation_percent - 14.26).abs() < 0.05);
        assert!((chsh_residual_d2(1.0).unwrap().chsh - 2.0).abs() < 1e-12);
        assert!((chsh_residual_d2(1e-9).unwrap().chsh - 2.0 * 2f64.sqrt()).abs() < 1e-8);
    }
}
