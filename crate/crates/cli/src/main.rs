mod format;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use format::{fmt_float, open_output, to_json, Cell, Table};
use naqc::coherence::CoherenceMetric;
use naqc::measurement::{tradeoff_curve, unsharp_family, Sharpness, TRADEOFF_POINTS};
use naqc::mub::{build_mub, verify_unbiased};
use naqc::naqc::optimizer::{OptimizerOptions, DEFAULT_SEED};
use naqc::naqc::{asc_averaged, asc_permuted, critical_sharpness, critical_value, steered_ensembles, threshold, ThresholdReport};
use naqc::qcore::{max_entangled_state, primes_up_to, PrimeDim};
use naqc::sequential::{chsh_residual_d2, fig3_data, region_scan, simulate_chain, AliceSharpness, Fig3Mode, InputBias};

const THREADS_ENV: &str = "NAQC_THREADS";

#[derive(Parser, Debug)]
#[command(name = "naqc", version, about = "Sequential unsharp measurements and nonlocal advantage of quantum coherence")]
struct Cli {
    /// Machine-readable JSON instead of the human-readable default.
    #[arg(long, global = true)]
    json: bool,
    /// Write the main output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the multi-start threshold optimizer.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Metric {
    L1,
    Re,
}

impl From<Metric> for CoherenceMetric {
    fn from(m: Metric) -> Self {
        match m {
            Metric::L1 => CoherenceMetric::L1,
            Metric::Re => CoherenceMetric::Re,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FrameworkArg {
    Averaged,
    Permuted,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Unsharp,
    Pointer,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mutually unbiased bases as CSV (v, a, n, re, im).
    Mub {
        #[arg(long)]
        d: usize,
        /// Print the orthonormality/unbiasedness report instead of the bases.
        #[arg(long)]
        check: bool,
    },
    /// Quality factor vs precision curves for every prime up to dmax.
    Tradeoff {
        #[arg(long, default_value_t = 29)]
        dmax: usize,
        #[arg(long, default_value_t = TRADEOFF_POINTS)]
        points: usize,
    },
    /// Critical value N_c and Alice1's critical sharpness.
    Critical {
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum)]
        metric: Metric,
    },
    /// Alice1's steered coherence on the maximally entangled state.
    Asc {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum)]
        metric: Metric,
        #[arg(long, value_enum, default_value = "permuted")]
        framework: FrameworkArg,
    },
    /// Sequential chain of Alices sharing one qudit.
    Chain {
        #[arg(long)]
        d: usize,
        /// One sharpness per Alice; with --per-setting, d+1 values per Alice.
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
        /// Setting probabilities w0..wd shared by every Alice.
        #[arg(long, value_delimiter = ',')]
        bias: Option<Vec<f64>>,
        #[arg(long)]
        per_setting: bool,
        #[arg(long, value_enum)]
        metric: Metric,
    },
    /// Violation regions of Alice1 and Alice2 on a (lambda1, lambda2) grid.
    Scan {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 201)]
        res: usize,
        #[arg(long, value_enum)]
        metric: Metric,
    },
    /// Alice2's margin below N_c when Alice1 sits at her threshold.
    Fig3 {
        #[arg(long, default_value_t = 29)]
        dmax: usize,
        #[arg(long, value_enum)]
        metric: Metric,
        #[arg(long, value_enum, default_value = "unsharp")]
        mode: ModeArg,
    },
    /// CHSH value left to Alice2 and Bob after a qubit Alice1.
    Chsh {
        #[arg(long)]
        lambda1: f64,
    },
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<naqc::Error> for Failure {
    fn from(e: naqc::Error) -> Self {
        match e {
            naqc::Error::NotPrime(_)
            | naqc::Error::DimensionTooLarge { .. }
            | naqc::Error::DimensionMismatch { .. }
            | naqc::Error::TooManyBranches { .. }
            | naqc::Error::Unsupported(_)
            | naqc::Error::SharpnessOutOfRange(_)
            | naqc::Error::PrecisionOutOfRange(_)
            | naqc::Error::InvalidBias(_)
            | naqc::Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Compute(format!("json: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Compute(format!("csv: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn report_error(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report_error("usage", e.render().to_string().trim());
            return ExitCode::from(2);
        }
    };
    if let Err(msg) = configure_threads() {
        report_error("usage", &msg);
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            report_error("usage", &m);
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            report_error("computation", &m);
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn prime(d: usize) -> std::result::Result<PrimeDim, Failure> {
    Ok(PrimeDim::new(d)?)
}

fn options(cli: &Cli) -> OptimizerOptions {
    OptimizerOptions { seed: cli.seed.unwrap_or(DEFAULT_SEED), ..OptimizerOptions::default() }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Mub { d, check } => mub(cli, *d, *check),
        Command::Tradeoff { dmax, points } => tradeoff(cli, *dmax, *points),
        Command::Critical { d, metric } => critical(cli, *d, (*metric).into()),
        Command::Asc { d, lambda, metric, framework } => asc(cli, *d, *lambda, (*metric).into(), *framework),
        Command::Chain { d, lambdas, bias, per_setting, metric } => {
            chain(cli, *d, lambdas, bias.as_deref(), *per_setting, (*metric).into())
        }
        Command::Scan { d, res, metric } => scan(cli, *d, *res, (*metric).into()),
        Command::Fig3 { dmax, metric, mode } => fig3(cli, *dmax, (*metric).into(), *mode),
        Command::Chsh { lambda1 } => chsh(cli, *lambda1),
    }
}

/// Report-style output: JSON with --json, otherwise `human`.
fn emit_report<T: Serialize>(cli: &Cli, value: &T, human: impl FnOnce() -> String) -> Outcome {
    let text = if cli.json { to_json(value)? } else { human() };
    let mut w = open_output(cli.out.as_deref())?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

/// Table-style output: CSV to --out (or stdout), JSON records with --json.
/// When CSV goes to a file, `summary` is printed to stdout.
fn emit_table(cli: &Cli, table: &Table, summary: impl FnOnce() -> String) -> Outcome {
    if cli.json {
        let mut w = open_output(cli.out.as_deref())?;
        writeln!(w, "{}", table.to_json()?)?;
        w.flush()?;
        return Ok(());
    }
    table.write_csv(open_output(cli.out.as_deref())?)?;
    if let Some(p) = &cli.out {
        println!("{}", summary());
        println!("wrote {} rows to {}", table.rows.len(), display(p));
    }
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn mub(cli: &Cli, d: usize, check: bool) -> Outcome {
    let m = build_mub(prime(d)?)?;
    if check {
        let r = verify_unbiased(&m);
        return emit_report(cli, &r, || {
            format!(
                "d = {d}: {} bases\nmax orthonormality error {:e}\nmax unbiasedness error {:e}\n{}",
                m.num_bases(),
                r.max_orthonormality_error,
                r.max_unbiasedness_error,
                if r.passes() { "pass" } else { "FAIL" }
            )
        });
    }
    let mut rows = Vec::new();
    for v in 0..m.num_bases() {
        for a in 0..d {
            for (n, x) in m.vector(v, a)?.iter().enumerate() {
                rows.push(vec![Cell::Int(v), Cell::Int(a), Cell::Int(n), Cell::Float(x.re), Cell::Float(x.im)]);
            }
        }
    }
    let table = Table { header: vec!["v", "a", "n", "re", "im"], rows };
    emit_table(cli, &table, || format!("{} bases of dimension {d}", m.num_bases()))
}

fn tradeoff(cli: &Cli, dmax: usize, points: usize) -> Outcome {
    let primes = primes_up_to(dmax);
    if primes.is_empty() {
        return Err(Failure::Usage(format!("no primes up to {dmax}")));
    }
    if points < 2 {
        return Err(Failure::Usage("need at least 2 points per curve".into()));
    }
    let mut rows = Vec::new();
    for &p in &primes {
        for t in tradeoff_curve(prime(p)?, points) {
            rows.push(vec![Cell::Int(p), Cell::Float(t.g), Cell::Float(t.f), Cell::Float(t.g)]);
        }
    }
    let grid: Vec<f64> = (0..points).map(|k| k as f64 / (points - 1) as f64).collect();
    for (name, f) in [("square", (|g: f64| 1.0 - g) as fn(f64) -> f64), ("optimal", |g: f64| (1.0 - g * g).sqrt())] {
        for &g in &grid {
            rows.push(vec![Cell::Text(name.into()), Cell::Empty, Cell::Float(f(g)), Cell::Float(g)]);
        }
    }
    let table = Table { header: vec!["d", "lambda", "F", "G"], rows };
    emit_table(cli, &table, || format!("{} unsharp curves plus square and optimal reference lines", primes.len()))
}

#[derive(Serialize)]
struct CriticalOutput {
    #[serde(flatten)]
    report: ThresholdReport,
    /// Numerical maximum of the summed coherence, reported next to the
    /// closed form used for l1.
    #[serde(skip_serializing_if = "Option::is_none")]
    optimizer_max: Option<f64>,
}

fn critical(cli: &Cli, d: usize, metric: CoherenceMetric) -> Outcome {
    let pd = prime(d)?;
    let opts = options(cli);
    let report = critical_sharpness(pd, metric, &opts)?;
    let optimizer_max = match metric {
        CoherenceMetric::L1 => Some(critical_value(pd, metric, &opts)?.value),
        CoherenceMetric::Re => None,
    };
    let out = CriticalOutput { report, optimizer_max };
    emit_report(cli, &out, || {
        let r = &out.report;
        let mut s = format!(
            "d = {d}, metric {metric}\nN_c = {} ({:?})\nlambda_crit = {}",
            fmt_float(r.n_c),
            r.n_c_source,
            fmt_float(r.lambda_crit)
        );
        if let Some(m) = out.optimizer_max {
            s.push_str(&format!("\noptimizer max = {}", fmt_float(m)));
        }
        s
    })
}

fn asc(cli: &Cli, d: usize, lambda: f64, metric: CoherenceMetric, framework: FrameworkArg) -> Outcome {
    let pd = prime(d)?;
    let l = Sharpness::new(lambda)?;
    let m = build_mub(pd)?;
    let (n_c, _) = threshold(pd, metric, &options(cli))?;
    let ens = steered_ensembles(&max_entangled_state(pd), &unsharp_family(&m, l)?)?;
    let report = match framework {
        FrameworkArg::Averaged => asc_averaged(&ens, &m, metric, n_c)?,
        FrameworkArg::Permuted => asc_permuted(&ens, &m, metric, n_c)?,
    };
    emit_report(cli, &report, || {
        let mut s = format!(
            "d = {d}, lambda = {lambda}, metric {metric}, {:?}\nASC = {}\nN_c = {}\n{}",
            report.framework,
            fmt_float(report.value),
            fmt_float(report.critical),
            if report.violates { "violates" } else { "no violation" }
        );
        if let Some(beta) = &report.permutation {
            s.push_str(&format!("\nbeta = {beta:?}"));
        }
        s
    })
}

fn chain(
    cli: &Cli,
    d: usize,
    lambdas: &[f64],
    bias: Option<&[f64]>,
    per_setting: bool,
    metric: CoherenceMetric,
) -> Outcome {
    let pd = prime(d)?;
    let profile: Vec<AliceSharpness> = if per_setting {
        if !lambdas.len().is_multiple_of(d + 1) {
            return Err(Failure::Usage(format!(
                "--per-setting needs a multiple of {} sharpness values, got {}",
                d + 1,
                lambdas.len()
            )));
        }
        lambdas.chunks(d + 1).map(|c| AliceSharpness::PerSetting { lambdas: c.to_vec() }).collect()
    } else {
        lambdas.iter().map(|&l| AliceSharpness::Uniform { lambda: l }).collect()
    };
    let bias = match bias {
        Some(w) => InputBias::new(pd, w.to_vec())?,
        None => InputBias::uniform(pd),
    };
    let (n_c, _) = threshold(pd, metric, &options(cli))?;
    let report = simulate_chain(pd, &profile, &bias, metric, n_c)?;
    emit_report(cli, &report, || {
        let mut s = format!("d = {d}, metric {metric}, N_c = {}", fmt_float(n_c));
        for a in &report.alices {
            s.push_str(&format!(
                "\nAlice{}: ASC = {} over {} branch(es){}",
                a.index,
                fmt_float(a.asc.value),
                a.branches,
                if a.asc.violates { ", violates" } else { "" }
            ));
        }
        s
    })
}

fn scan(cli: &Cli, d: usize, res: usize, metric: CoherenceMetric) -> Outcome {
    let pd = prime(d)?;
    let (n_c, _) = threshold(pd, metric, &options(cli))?;
    let s = region_scan(pd, res, metric, n_c)?;
    if cli.json {
        return emit_report(cli, &s, String::new);
    }
    let flag = |b: bool| Cell::Int(b as usize);
    let rows = s
        .cells
        .iter()
        .map(|c| {
            vec![
                Cell::Float(c.lambda1),
                Cell::Float(c.lambda2),
                Cell::Float(c.asc1),
                Cell::Float(c.asc2),
                flag(c.v1),
                flag(c.v2),
            ]
        })
        .collect();
    let table = Table { header: vec!["lambda1", "lambda2", "asc1", "asc2", "v1", "v2"], rows };
    emit_table(cli, &table, || {
        format!(
            "d = {d}, metric {metric}: lambda_1c = {}, lambda_1t = {}, Alice1 area {}, Alice2 area {}, both {}",
            fmt_float(s.lambda_1c),
            fmt_float(s.lambda_1t),
            fmt_float(s.alice1_fraction),
            fmt_float(s.alice2_fraction),
            s.both_violate
        )
    })
}

fn fig3(cli: &Cli, dmax: usize, metric: CoherenceMetric, mode: ModeArg) -> Outcome {
    if primes_up_to(dmax).is_empty() {
        return Err(Failure::Usage(format!("no primes up to {dmax}")));
    }
    let mode = match mode {
        ModeArg::Unsharp => Fig3Mode::Unsharp,
        ModeArg::Pointer => Fig3Mode::Pointer,
    };
    let data = fig3_data(dmax, metric, mode, &options(cli))?;
    let rows = data
        .iter()
        .map(|r| vec![Cell::Int(r.d), Cell::Float(r.lambda1), Cell::Float(r.asc2), Cell::Float(r.n_c), Cell::Float(r.delta)])
        .collect();
    let table = Table { header: vec!["d", "lambda1", "asc2", "N_c", "delta"], rows };
    emit_table(cli, &table, || {
        let worst = data.iter().map(|r| r.delta).fold(f64::NEG_INFINITY, f64::max);
        format!("{} primes, largest delta {}", data.len(), fmt_float(worst))
    })
}

fn chsh(cli: &Cli, lambda1: f64) -> Outcome {
    let r = chsh_residual_d2(lambda1)?;
    emit_report(cli, &r, || {
        format!("lambda1 = {lambda1}\nCHSH = {}\nviolation = {}%", fmt_float(r.chsh), fmt_float(r.violation_percent))
    })
}
