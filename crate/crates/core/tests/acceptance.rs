//! Acceptance gate. Every criterion prints one PASS/FAIL line; tolerances and
//! runtime budgets are pinned below.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use naqc::coherence::CoherenceMetric;
use naqc::measurement::{luders_nonselective, make_unsharp, tradeoff_curve, unsharp_family, Sharpness, TRADEOFF_POINTS};
use naqc::mub::{build_mub, verify_unbiased};
use naqc::naqc::assignment::{brute_force_assignment, max_assignment};
use naqc::naqc::optimizer::OptimizerOptions;
use naqc::naqc::{
    closed_form_l1_critical, cost_matrix, critical_sharpness, critical_value, default_threshold, steered_ensembles,
};
use naqc::qcore::random::random_density;
use naqc::qcore::{binary_entropy, eigenvalues_hermitian, primes_up_to, CMatrix, PrimeDim};
use naqc::sequential::{
    alice1_asc_closed, alice2_asc_closed, chsh_residual_d2, fig3_data, region_scan, simulate_chain,
    unequal_sharpness_d2, AliceSharpness, Fig3Mode, InputBias,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_LAMBDA_C: f64 = 1e-8;
const TOL_CRITICAL_VALUE: f64 = 1e-6;
const TOL_CLOSED_VS_SIM: f64 = 1e-8;
const TOL_FIG3_QUBIT: f64 = 1e-3;
const FIG3_QUBIT_L1: f64 = -0.2948;
// Pointer and unsharp deltas agree analytically; this absorbs round-off only.
const TOL_POINTER_VS_UNSHARP: f64 = 1e-9;
const TOL_LAMBDA_T: f64 = 1e-3;
const LAMBDA_T_QUBIT: f64 = 0.6891;
const TOL_TRADEOFF: f64 = 1e-12;
const CHSH_TARGET: f64 = 2.2853;
const TOL_CHSH: f64 = 1e-3;
const VIOLATION_TARGET: f64 = 14.26;
const TOL_VIOLATION: f64 = 0.05;
const TOL_UNEQUAL: f64 = 1e-8;
const TOL_MUB: f64 = 1e-10;
const TOL_BRANCH_UNIFORM: f64 = 1e-9;
const TOL_BIAS: f64 = 1e-9;

// Criteria run one at a time so their runtimes are not inflated by each other.
static SERIAL: Mutex<()> = Mutex::new(());

fn pd(d: usize) -> PrimeDim {
    PrimeDim::new(d).unwrap()
}

fn verdict(n: u32, ok: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let timely = elapsed <= budget;
    let status = if ok && timely { "PASS" } else { "FAIL" };
    println!(
        "criterion {n}: {status} ({:.2}s of {:.0}s budget{}) {detail}",
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
        if timely { "" } else { ", over budget" }
    );
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(timely, "criterion {n} exceeded its runtime budget");
}

#[test]
fn criterion_1_l1_critical_sharpness() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let opts = OptimizerOptions::default();
    let mut worst = 0.0f64;
    let mut series = Vec::new();
    for d in primes_up_to(29) {
        let t = critical_sharpness(pd(d), CoherenceMetric::L1, &opts).unwrap();
        worst = worst.max((t.lambda_crit - (d as f64 / (d + 1) as f64).sqrt()).abs());
        series.push(t.lambda_crit);
    }
    let monotone = series.windows(2).all(|w| w[1] > w[0]);
    verdict(
        1,
        worst < TOL_LAMBDA_C && monotone,
        start.elapsed(),
        Duration::from_secs(5),
        &format!("max |lambda_c - sqrt(d/(d+1))| = {worst:.2e}, monotone = {monotone}"),
    );
}

#[test]
fn criterion_2_critical_value_cross_check() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let opts = OptimizerOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2, 3, 5, 7] {
        let found = critical_value(pd(d), CoherenceMetric::L1, &opts).unwrap().value;
        let want = closed_form_l1_critical(d);
        let err = (found - want).abs();
        ok &= err < TOL_CRITICAL_VALUE;
        parts.push(format!("d={d}: optimizer {found:.10} vs {want:.10} (err {err:.2e})"));
    }
    let re = critical_value(pd(2), CoherenceMetric::Re, &opts).unwrap().value;
    let want = 3.0 * binary_entropy((1.0 + 1.0 / 3f64.sqrt()) / 2.0);
    let err = (re - want).abs();
    ok &= err < TOL_CRITICAL_VALUE;
    parts.push(format!("re d=2: {re:.10} vs {want:.10} (err {err:.2e})"));
    verdict(2, ok, start.elapsed(), Duration::from_secs(60), &parts.join("; "));
}

#[test]
fn criterion_3_closed_forms_vs_simulation() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for d in [2, 3, 5] {
        for _ in 0..20 {
            let l1: f64 = rng.random_range(0.0..1.0);
            let l2: f64 = rng.random_range(0.0..1.0);
            let (l1, l2) = (1.0 - l1, 1.0 - l2);
            for metric in CoherenceMetric::ALL {
                let one = simulate_chain(pd(d), &[AliceSharpness::Uniform { lambda: l1 }], &InputBias::uniform(pd(d)), metric, 0.0)
                    .unwrap();
                let prof = [AliceSharpness::Uniform { lambda: l1 }, AliceSharpness::Uniform { lambda: l2 }];
                let two = simulate_chain(pd(d), &prof, &InputBias::uniform(pd(d)), metric, 0.0).unwrap();
                worst = worst.max((one.alices[0].asc.value - alice1_asc_closed(d, l1, metric)).abs());
                worst = worst.max((two.alices[1].asc.value - alice2_asc_closed(d, l1, l2, metric)).abs());
            }
        }
    }
    verdict(
        3,
        worst < TOL_CLOSED_VS_SIM,
        start.elapsed(),
        Duration::from_secs(120),
        &format!("max |closed - simulated| = {worst:.2e} over 120 samples x 2 Alices"),
    );
}

#[test]
fn criterion_4_second_alice_never_steers_at_threshold() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let opts = OptimizerOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for metric in CoherenceMetric::ALL {
        let unsharp = fig3_data(29, metric, Fig3Mode::Unsharp, &opts).unwrap();
        let pointer = fig3_data(29, metric, Fig3Mode::Pointer, &opts).unwrap();
        let max_delta = unsharp.iter().chain(&pointer).map(|r| r.delta).fold(f64::NEG_INFINITY, f64::max);
        ok &= max_delta < 0.0;
        let mut gap = f64::NEG_INFINITY;
        for (u, p) in unsharp.iter().zip(&pointer).filter(|(u, _)| u.d >= 3) {
            gap = gap.max(u.delta - p.delta);
        }
        ok &= gap <= TOL_POINTER_VS_UNSHARP;
        parts.push(format!("{metric}: max delta {max_delta:.4}, max(unsharp - pointer) {gap:.2e}"));
        if metric == CoherenceMetric::L1 {
            let q = unsharp[0].delta;
            ok &= (q - FIG3_QUBIT_L1).abs() < TOL_FIG3_QUBIT;
            parts.push(format!("l1 d=2 delta {q:.5}"));
        }
    }
    verdict(4, ok, start.elapsed(), Duration::from_secs(600), &parts.join("; "));
}

#[test]
fn criterion_5_exclusive_violation_regions() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for metric in CoherenceMetric::ALL {
        let s2 = region_scan(pd(2), 201, metric, default_threshold(pd(2), metric).unwrap()).unwrap();
        let s3 = region_scan(pd(3), 201, metric, default_threshold(pd(3), metric).unwrap()).unwrap();
        ok &= s2.both_violate == 0 && s3.both_violate == 0;
        ok &= s3.alice2_fraction < s2.alice2_fraction;
        parts.push(format!(
            "{metric}: both-violating cells {}+{}, Alice2 area d=2 {:.4} d=3 {:.4}",
            s2.both_violate, s3.both_violate, s2.alice2_fraction, s3.alice2_fraction
        ));
        if metric == CoherenceMetric::L1 {
            ok &= (s2.lambda_1t - LAMBDA_T_QUBIT).abs() < TOL_LAMBDA_T;
            parts.push(format!("lambda_1t(2) = {:.5}", s2.lambda_1t));
        }
    }
    verdict(5, ok, start.elapsed(), Duration::from_secs(600), &parts.join("; "));
}

#[test]
fn criterion_6_tradeoff_curves() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let primes = primes_up_to(29);
    let curves: Vec<_> = primes.iter().map(|&d| tradeoff_curve(pd(d), TRADEOFF_POINTS)).collect();
    let mut circle = 0.0f64;
    let mut inside = true;
    let mut above_square = true;
    for (&d, curve) in primes.iter().zip(&curves) {
        for p in curve {
            let s = p.f * p.f + p.g * p.g;
            if d == 2 {
                circle = circle.max((s - 1.0).abs());
            } else if p.g > 0.0 && p.g < 1.0 {
                inside &= s < 1.0;
            }
            above_square &= p.f + p.g >= 1.0 - TOL_TRADEOFF;
        }
    }
    let mut ordered = true;
    for k in 1..TRADEOFF_POINTS - 1 {
        ordered &= curves.windows(2).all(|w| w[1][k].f < w[0][k].f);
    }
    verdict(
        6,
        circle < TOL_TRADEOFF && inside && above_square && ordered,
        start.elapsed(),
        Duration::from_secs(5),
        &format!(
            "qubit |F^2+G^2-1| = {circle:.1e}, inside unit circle d>=3: {inside}, F+G>=1: {above_square}, decreasing in d: {ordered}"
        ),
    );
}

#[test]
fn criterion_7_chsh_residual() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let r = chsh_residual_d2(5.0 / 6.0).unwrap();
    verdict(
        7,
        (r.chsh - CHSH_TARGET).abs() < TOL_CHSH && (r.violation_percent - VIOLATION_TARGET).abs() < TOL_VIOLATION,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("CHSH {:.5}, violation {:.3}%", r.chsh, r.violation_percent),
    );
}

#[test]
fn criterion_8_unequal_sharpness() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let d = pd(2);
    let sharp = unequal_sharpness_d2(d, &[1.0, 1.0, 1.0]).unwrap();
    let mut ok = sharp == (3.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let lambdas: Vec<f64> = (0..3).map(|_| 1.0 - rng.random_range(0.0..1.0)).collect();
        let (a1, a2) = unequal_sharpness_d2(d, &lambdas).unwrap();
        let prof = [AliceSharpness::PerSetting { lambdas }, AliceSharpness::Uniform { lambda: 1.0 }];
        let rep = simulate_chain(d, &prof, &InputBias::uniform(d), CoherenceMetric::L1, 0.0).unwrap();
        worst = worst.max((rep.alices[0].asc.value - a1).abs());
        worst = worst.max((rep.alices[1].asc.value - a2).abs());
    }
    ok &= worst < TOL_UNEQUAL;
    verdict(
        8,
        ok,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("(1,1,1) -> {sharp:?}, max |closed - simulated| = {worst:.2e}"),
    );
}

#[test]
fn criterion_9_property_suites() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures: Vec<String> = Vec::new();

    for d in primes_up_to(29) {
        let r = verify_unbiased(&build_mub(pd(d)).unwrap());
        if r.max_orthonormality_error >= TOL_MUB || r.max_unbiasedness_error >= TOL_MUB {
            failures.push(format!("MUB d={d}"));
        }
    }

    for d in [2, 3, 5, 7] {
        let mub = build_mub(pd(d)).unwrap();
        for v in 0..=d {
            for l in [0.1, 0.5, 0.9, 1.0] {
                let s = make_unsharp(&mub, v, Sharpness::new(l).unwrap()).unwrap();
                let mut sum = CMatrix::zeros(d, d);
                let mut min_ev = f64::INFINITY;
                for e in s.effects() {
                    sum = &sum + e;
                    min_ev = min_ev.min(*eigenvalues_hermitian(e).unwrap().last().unwrap());
                }
                if sum.max_abs_diff(&CMatrix::identity(d)) > 1e-12 || min_ev < -1e-12 {
                    failures.push(format!("POVM d={d} v={v} l={l}"));
                }
            }
        }
    }

    for d in [2, 3, 5] {
        let mub = build_mub(pd(d)).unwrap();
        for k in 0..30 {
            let rho = random_density(d * d, &mut rng);
            let s = make_unsharp(&mub, k % (d + 1), Sharpness::new(rng.random_range(0.01..1.0)).unwrap()).unwrap();
            let out = luders_nonselective(&rho, &s).unwrap();
            if out.validate().is_err() || (out.matrix().trace().re - 1.0).abs() > 1e-12 {
                failures.push(format!("Luders d={d} sample {k}"));
            }
        }
    }

    for d in [2, 3, 5] {
        let mub = build_mub(pd(d)).unwrap();
        let fam = unsharp_family(&mub, Sharpness::new(0.8).unwrap()).unwrap();
        for k in 0..20 {
            let ens = steered_ensembles(&random_density(d * d, &mut rng), &fam).unwrap();
            for metric in CoherenceMetric::ALL {
                let cost = cost_matrix(&ens, &mub, metric).unwrap();
                let h = max_assignment(&cost);
                let b = brute_force_assignment(&cost);
                if (h.value - b.value).abs() > 1e-12 || h.beta != b.beta {
                    failures.push(format!("assignment d={d} sample {k} {metric}"));
                }
            }
        }
    }

    for d in [2, 3, 5] {
        for metric in CoherenceMetric::ALL {
            let prof = [AliceSharpness::Uniform { lambda: 0.63 }, AliceSharpness::Uniform { lambda: 0.9 }];
            let rep = simulate_chain(pd(d), &prof, &InputBias::uniform(pd(d)), metric, 0.0).unwrap();
            let a2 = &rep.alices[1];
            if a2.branch_max - a2.branch_min > TOL_BRANCH_UNIFORM {
                failures.push(format!("branch uniformity d={d} {metric}"));
            }
            for _ in 0..5 {
                let mut w: Vec<f64> = (0..=d).map(|_| rng.random_range(0.0..1.0)).collect();
                w[0] = 0.0;
                let t: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= t);
                let biased = simulate_chain(pd(d), &prof, &InputBias::new(pd(d), w).unwrap(), metric, 0.0).unwrap();
                if (biased.alices[1].asc.value - a2.asc.value).abs() > TOL_BIAS {
                    failures.push(format!("bias invariance d={d} {metric}"));
                }
            }
        }
    }

    for d in primes_up_to(29) {
        for metric in CoherenceMetric::ALL {
            let a1: Vec<f64> = (1..=100).map(|k| alice1_asc_closed(d, k as f64 / 100.0, metric)).collect();
            let a2: Vec<f64> = (1..=50).map(|k| alice2_asc_closed(d, k as f64 / 50.0, 1.0, metric)).collect();
            if !a1.windows(2).all(|w| w[1] > w[0]) || !a2.windows(2).all(|w| w[1] < w[0]) {
                failures.push(format!("monotonic opposition d={d} {metric}"));
            }
        }
    }

    verdict(
        9,
        failures.is_empty(),
        start.elapsed(),
        Duration::from_secs(120),
        &if failures.is_empty() { "all property suites hold".to_string() } else { format!("failures: {failures:?}") },
    );
}
