//! Unsharp MUB measurements, Lüders updates and unbiased pointer measurements.
//!
//! Every instrument here is diagonal in one MUB basis. In the frame of that
//! basis a branch acts on subsystem A by scaling the (m, n) block of the
//! two-qudit operator by a fixed coefficient, which is how all maps below
//! are evaluated.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mub::{projectors, MubFamily};
use crate::qcore::local::{rotate_into, rotate_out, sandwich_a, scale_blocks};
use crate::qcore::{CMatrix, DensityOp, PrimeDim, C64};

/// Sharpness parameter in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sharpness(f64);

impl Sharpness {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::SharpnessOutOfRange(lambda));
        }
        Ok(Self(lambda))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Quality factor of the nonselective unsharp map with sharpness `lambda`.
pub fn lambda0(d: usize, lambda: f64) -> f64 {
    let df = d as f64;
    let d1 = df - 1.0;
    let disc = (1.0 + (df - 2.0) * lambda - d1 * lambda * lambda).max(0.0);
    ((df - 2.0) * (1.0 - lambda) + 2.0 * disc.sqrt()) / df
}

/// A measurement on subsystem A that is diagonal in one MUB basis.
pub trait Instrument: Sync {
    fn dim(&self) -> usize;
    fn setting(&self) -> usize;
    /// Unitary whose columns are the basis vectors.
    fn basis(&self) -> &CMatrix;
    /// Row-major `d x d` block coefficients of branch `a` in the frame of
    /// [`Instrument::basis`].
    fn branch_coefficients(&self, a: usize) -> Vec<f64>;
    /// Quality factor F of the nonselective map.
    fn quality_factor(&self) -> f64;

    fn nonselective_coefficients(&self) -> Vec<f64> {
        let d = self.dim();
        let mut total = vec![0.0; d * d];
        for a in 0..d {
            for (t, c) in total.iter_mut().zip(self.branch_coefficients(a)) {
                *t += c;
            }
        }
        total
    }

    /// Diagonal of the branch-`a` effect in the instrument basis.
    fn effect_weights(&self, a: usize) -> Vec<f64> {
        let d = self.dim();
        let c = self.branch_coefficients(a);
        (0..d).map(|m| c[m * d + m]).collect()
    }
}

/// Unsharp measurement `E_a = lambda Pi_a + (1 - lambda) I / d` of one setting.
#[derive(Debug, Clone)]
pub struct UnsharpSetting {
    d: PrimeDim,
    v: usize,
    lambda: Sharpness,
    basis: CMatrix,
    effects: Vec<CMatrix>,
    roots: Vec<CMatrix>,
}

impl UnsharpSetting {
    pub fn d(&self) -> PrimeDim {
        self.d
    }

    pub fn lambda(&self) -> Sharpness {
        self.lambda
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn roots(&self) -> &[CMatrix] {
        &self.roots
    }

    /// Eigenvalues of each effect: on its own projector and on the complement.
    pub fn effect_eigenvalues(&self) -> (f64, f64) {
        let df = self.d.get() as f64;
        let l = self.lambda.get();
        ((1.0 + (df - 1.0) * l) / df, (1.0 - l) / df)
    }
}

impl Instrument for UnsharpSetting {
    fn dim(&self) -> usize {
        self.d.get()
    }

    fn setting(&self) -> usize {
        self.v
    }

    fn basis(&self) -> &CMatrix {
        &self.basis
    }

    fn branch_coefficients(&self, a: usize) -> Vec<f64> {
        let d = self.d.get();
        let (hi, lo) = self.effect_eigenvalues();
        let r = |m: usize| if m == a { hi.sqrt() } else { lo.sqrt() };
        let mut c = vec![0.0; d * d];
        for m in 0..d {
            for n in 0..d {
                c[m * d + n] = r(m) * r(n);
            }
        }
        c
    }

    fn quality_factor(&self) -> f64 {
        lambda0(self.d.get(), self.lambda.get())
    }

    fn nonselective_coefficients(&self) -> Vec<f64> {
        let d = self.d.get();
        let l0 = self.quality_factor();
        let mut c = vec![l0; d * d];
        for m in 0..d {
            c[m * d + m] = 1.0;
        }
        c
    }
}

pub fn make_unsharp(mub: &MubFamily, v: usize, lambda: Sharpness) -> Result<UnsharpSetting> {
    let d = mub.d();
    let n = d.get();
    let df = n as f64;
    let l = lambda.get();
    let pis = projectors(mub, v)?;
    let id = CMatrix::identity(n);
    let lo = ((1.0 - l) / df).max(0.0).sqrt();
    let hi = ((1.0 + (df - 1.0) * l) / df).sqrt();
    let mut effects = Vec::with_capacity(n);
    let mut roots = Vec::with_capacity(n);
    for p in &pis {
        let mut e = p.scale_real(l);
        e.add_scaled(&id, (1.0 - l) / df);
        effects.push(e);
        let mut r = p.scale_real(hi - lo);
        r.add_scaled(&id, lo);
        roots.push(r);
    }
    Ok(UnsharpSetting { d, v, lambda, basis: mub.basis(v)?.clone(), effects, roots })
}

/// All `d + 1` settings with one sharpness.
pub fn unsharp_family(mub: &MubFamily, lambda: Sharpness) -> Result<Vec<UnsharpSetting>> {
    (0..mub.num_bases()).map(|v| make_unsharp(mub, v, lambda)).collect()
}

fn check_outcome(d: usize, a: usize) -> Result<()> {
    if a >= d {
        return Err(Error::IndexOutOfRange { what: "outcome", index: a, len: d });
    }
    Ok(())
}

fn check_bipartite(rho: &DensityOp, d: usize) -> Result<()> {
    if rho.dim() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: rho.dim() });
    }
    Ok(())
}

/// Selective Lüders update `(sqrt(E_a) (x) I) rho (sqrt(E_a) (x) I) / p`.
pub fn luders_selective(rho_ab: &DensityOp, s: &UnsharpSetting, a: usize) -> Result<(f64, DensityOp)> {
    let d = s.dim();
    check_outcome(d, a)?;
    check_bipartite(rho_ab, d)?;
    let root = &s.roots[a];
    let post = sandwich_a(rho_ab.matrix(), d, root, root);
    DensityOp::from_unnormalized(post.hermitian_part())
}

/// Nonselective Lüders update, evaluated as `lambda0 rho + (1 - lambda0) sum_a Pi_a rho Pi_a`.
pub fn luders_nonselective(rho_ab: &DensityOp, s: &UnsharpSetting) -> Result<DensityOp> {
    apply_nonselective(rho_ab, s)
}

/// Branch `a` of any instrument: probability and normalized post-state.
pub fn apply_branch<I: Instrument + ?Sized>(rho_ab: &DensityOp, inst: &I, a: usize) -> Result<(f64, DensityOp)> {
    let d = inst.dim();
    check_outcome(d, a)?;
    check_bipartite(rho_ab, d)?;
    let mut m = rotate_into(rho_ab.matrix(), d, inst.basis());
    scale_blocks(&mut m, d, &inst.branch_coefficients(a));
    let post = rotate_out(&m, d, inst.basis());
    DensityOp::from_unnormalized(post.hermitian_part())
}

/// Sum over all branches without renormalization.
pub fn apply_nonselective<I: Instrument + ?Sized>(rho_ab: &DensityOp, inst: &I) -> Result<DensityOp> {
    let d = inst.dim();
    check_bipartite(rho_ab, d)?;
    let mut m = rotate_into(rho_ab.matrix(), d, inst.basis());
    scale_blocks(&mut m, d, &inst.nonselective_coefficients());
    let post = rotate_out(&m, d, inst.basis());
    Ok(DensityOp::from_trusted(post.hermitian_part()))
}

/// Nonselective map on a single qudit operator.
pub fn apply_nonselective_local<I: Instrument + ?Sized>(x: &CMatrix, inst: &I) -> CMatrix {
    let d = inst.dim();
    let u = inst.basis();
    let c = inst.nonselective_coefficients();
    let mut y = x.conjugate_by(u);
    for m in 0..d {
        for n in 0..d {
            y[(m, n)] *= c[m * d + n];
        }
    }
    y.conjugate_by(&u.adjoint())
}

/// Point on the information-disturbance plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffPoint {
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

pub fn quality_precision(d: PrimeDim, lambda: Sharpness) -> TradeoffPoint {
    TradeoffPoint { g: lambda.get(), f: lambda0(d.get(), lambda.get()) }
}

/// Unsharp trade-off curve on `points` uniform sharpness values in [0, 1].
pub fn tradeoff_curve(d: PrimeDim, points: usize) -> Vec<TradeoffPoint> {
    let points = points.max(2);
    (0..points)
        .map(|k| {
            let l = k as f64 / (points - 1) as f64;
            TradeoffPoint { g: l, f: lambda0(d.get(), l) }
        })
        .collect()
}

pub const TRADEOFF_POINTS: usize = 1001;

/// Unbiased pointer measurement with precision `G` in one MUB basis.
#[derive(Debug, Clone)]
pub struct PointerSetting {
    d: PrimeDim,
    v: usize,
    g: f64,
    basis: CMatrix,
}

impl PointerSetting {
    pub fn new(mub: &MubFamily, v: usize, g: f64) -> Result<Self> {
        if !(g > 0.0 && g <= 1.0) {
            return Err(Error::PrecisionOutOfRange(g));
        }
        Ok(Self { d: mub.d(), v, g, basis: mub.basis(v)?.clone() })
    }

    pub fn precision(&self) -> f64 {
        self.g
    }

    /// `sqrt((1 + d1 G)(1 - G))`.
    pub fn script_f(&self) -> f64 {
        let d1 = (self.d.get() - 1) as f64;
        ((1.0 + d1 * self.g) * (1.0 - self.g)).max(0.0).sqrt()
    }
}

impl Instrument for PointerSetting {
    fn dim(&self) -> usize {
        self.d.get()
    }

    fn setting(&self) -> usize {
        self.v
    }

    fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Sum of the three terms of the unbiased pointer update for outcome `i`:
    /// `F/d rho`, `(1 + d1 G - F)/d Pi_i rho Pi_i` and
    /// `(1 - G - F)/d (sum_{j != i} Pi_j rho Pi_j + sum_{m != n; m, n != i} Pi_m rho Pi_n)`.
    fn branch_coefficients(&self, i: usize) -> Vec<f64> {
        let d = self.d.get();
        let df = d as f64;
        let g = self.g;
        let sf = self.script_f();
        let mut c = vec![sf / df; d * d];
        c[i * d + i] += (1.0 + (df - 1.0) * g - sf) / df;
        for m in (0..d).filter(|&m| m != i) {
            for n in (0..d).filter(|&n| n != i) {
                c[m * d + n] += (1.0 - g - sf) / df;
            }
        }
        c
    }

    fn quality_factor(&self) -> f64 {
        empirical_quality_factor(self).map(|(f, _)| f).unwrap_or(f64::NAN)
    }
}

/// All branches `(p_i, rho_i / p_i)` of a pointer measurement on subsystem A.
pub fn pointer_update(rho_ab: &DensityOp, p: &PointerSetting) -> Result<Vec<(f64, DensityOp)>> {
    (0..p.dim()).map(|i| apply_branch(rho_ab, p, i)).collect()
}

/// Fits the nonselective map of `inst` to `F rho + (1 - F) sum_a Pi_a rho Pi_a`
/// over the matrix-unit operator basis. Returns `(F, max residual)`.
pub fn empirical_quality_factor<I: Instrument + ?Sized>(inst: &I) -> Result<(f64, f64)> {
    let d = inst.dim();
    let u = inst.basis();
    let dephase = |x: &CMatrix| {
        let mut y = x.conjugate_by(u);
        for m in 0..d {
            for n in 0..d {
                if m != n {
                    y[(m, n)] = C64::new(0.0, 0.0);
                }
            }
        }
        y.conjugate_by(&u.adjoint())
    };
    let mut samples = Vec::with_capacity(d * d);
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            let mut x = CMatrix::zeros(d, d);
            x[(j, k)] = C64::new(1.0, 0.0);
            let dx = dephase(&x);
            let phi = apply_nonselective_local(&x, inst);
            let coh = &x - &dx;
            let out = &phi - &dx;
            num += coh.as_slice().iter().zip(out.as_slice()).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
            den += coh.frobenius_norm().powi(2);
            samples.push((x, dx, phi));
        }
    }
    let f = if den > 0.0 { num / den } else { 1.0 };
    let residual = samples
        .iter()
        .map(|(x, dx, phi)| {
            let mut model = x.scale_real(f);
            model.add_scaled(dx, 1.0 - f);
            phi.max_abs_diff(&model)
        })
        .fold(0.0, f64::max);
    if residual > 1e-6 {
        return Err(Error::ModelMismatch { residual });
    }
    Ok((f, residual))
}

/// Either kind of setting, so mixed chains can hold one list.
#[derive(Debug, Clone)]
pub enum Setting {
    Unsharp(UnsharpSetting),
    Pointer(PointerSetting),
}

impl Instrument for Setting {
    fn dim(&self) -> usize {
        match self {
            Setting::Unsharp(s) => s.dim(),
            Setting::Pointer(p) => p.dim(),
        }
    }

    fn setting(&self) -> usize {
        match self {
            Setting::Unsharp(s) => s.setting(),
            Setting::Pointer(p) => p.setting(),
        }
    }

    fn basis(&self) -> &CMatrix {
        match self {
            Setting::Unsharp(s) => s.basis(),
            Setting::Pointer(p) => p.basis(),
        }
    }

    fn branch_coefficients(&self, a: usize) -> Vec<f64> {
        match self {
            Setting::Unsharp(s) => s.branch_coefficients(a),
            Setting::Pointer(p) => p.branch_coefficients(a),
        }
    }

    fn quality_factor(&self) -> f64 {
        match self {
            Setting::Unsharp(s) => s.quality_factor(),
            Setting::Pointer(p) => p.quality_factor(),
        }
    }

    fn nonselective_coefficients(&self) -> Vec<f64> {
        match self {
            Setting::Unsharp(s) => s.nonselective_coefficients(),
            Setting::Pointer(p) => p.nonselective_coefficients(),
        }
    }
}
