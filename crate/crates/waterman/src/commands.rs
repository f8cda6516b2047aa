//! The subcommands. Each writes its results and a manifest into `--out`.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use waterman_core::counterexample::{
    build, certify_stage, check_order, membership_bound, swing_bound, verify_stage, zero_aligned_grid,
    BuildConfig, StageReport, CERTIFICATE_TOL, DEFAULT_CAP,
};
use waterman_core::function::SeparableSum;
use waterman_core::kernels::{dirichlet, estimate_b, kernel_integral_refined, BGrid, CesaroKernel};
use waterman_core::summation::{cesaro_mean_multi, fstar, FourierData, MeanSource};
use waterman_core::variation::{variation_1d, SearchBudget, VariationResult};
use waterman_core::{CesaroOrder, LambdaSeq};

use crate::manifest::Manifest;
use crate::real::{fmt17, reals, Real};
use crate::registry::{lookup, Params, Registered};
use crate::specfile::{CheckFile, SpecFile};

/// Failure with its exit code: 2 for usage and domain errors, 3 for
/// numerical failures (tolerance, cap, failed certificate).
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Numeric(m) => ("numeric", m),
        };
        // one line, whatever the message holds
        write!(f, "error[{kind}]: {}", msg.replace('\n', " "))
    }
}

impl std::error::Error for CliError {}

impl From<waterman_core::Error> for CliError {
    fn from(e: waterman_core::Error) -> Self {
        match e {
            waterman_core::Error::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Usage(format!("csv: {e}"))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn prepare(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    Ok(())
}

fn finish(out: &Path, mut manifest: Manifest, outputs: &[&str]) -> Result<(), CliError> {
    manifest.outputs = outputs.iter().map(|s| s.to_string()).collect();
    manifest.write(out)
}

#[derive(Args, Debug, Clone)]
pub struct FunctionParams {
    /// `N` of `stage_f`.
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    /// `α_1` of `stage_f`.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha1: Option<f64>,
    /// Left end of `indicator`.
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    /// Right end of `indicator`.
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
}

impl FunctionParams {
    fn params(&self) -> Params {
        Params {
            n: self.big_n,
            alpha1: self.alpha1,
            lo: self.lo,
            hi: self.hi,
        }
    }
}

// ---------------------------------------------------------------------------
// kernel

#[derive(Args, Debug, Clone)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Rows of the table: `t_i = π i / points`, `i = 1..=points`.
    #[arg(long, default_value_t = 1024)]
    pub points: usize,
    #[arg(long, default_value = "waterman-out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct KernelSummary {
    n: usize,
    alpha: Real,
    points: usize,
    normalization: Real,
    /// `max |R| n (2 sin(t/2))^2 / (2|α|)` over rows with `t ≥ 1/(4n)`; absent for `α = 0`.
    max_remainder_ratio: Option<Real>,
    remainder_bound_holds: bool,
}

pub fn kernel(args: &KernelArgs, argv: &[String]) -> Result<i32, CliError> {
    if args.points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let k = CesaroKernel::new(args.n, args.alpha)?;
    prepare(&args.out)?;
    let nf = args.n as f64;
    let rows: Vec<(f64, f64, Option<f64>, Option<f64>, f64)> = (1..=args.points)
        .into_par_iter()
        .map(|i| {
            let t = PI * i as f64 / args.points as f64;
            let e = k.evaluate(t);
            (t, e.value, e.main_term, e.remainder, dirichlet(args.n, t))
        })
        .collect();
    let ratio = (args.alpha != 0.0).then(|| {
        rows.iter()
            .filter(|r| r.0 >= 1.0 / (4.0 * nf))
            .filter_map(|r| r.3.map(|rem| (r.0, rem)))
            .map(|(t, rem)| {
                let s = 2.0 * (0.5 * t).sin();
                rem.abs() * nf * s * s / (2.0 * args.alpha.abs())
            })
            .fold(0.0, f64::max)
    });
    let normalization = kernel_integral_refined(&k, -PI, PI, 1e-10)?.value;
    let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt17(r.0), fmt17(r.1), opt(r.2), opt(r.3), fmt17(r.4)])
        .collect();
    let header: Vec<String> = ["t", "value", "main_term", "remainder", "dirichlet"].map(String::from).to_vec();
    write_csv(&args.out.join("kernel.csv"), &header, &table)?;
    let holds = ratio.is_none_or(|r| r <= 1.0);
    let summary = KernelSummary {
        n: args.n,
        alpha: Real(args.alpha),
        points: args.points,
        normalization: Real(normalization),
        max_remainder_ratio: ratio.map(Real),
        remainder_bound_holds: holds,
    };
    write_json(&args.out.join("summary.json"), &summary)?;
    finish(&args.out, Manifest::new("kernel", argv, 0), &["kernel.csv", "summary.json"])?;
    println!("normalization {}", fmt17(normalization));
    if let Some(r) = ratio {
        println!("max remainder ratio {}", fmt17(r));
    }
    if !holds {
        return Err(CliError::Numeric("remainder bound exceeded".into()));
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// variation

#[derive(Args, Debug, Clone)]
pub struct VariationArgs {
    /// Registry name: zero, constant, linear, jump, skew_jump, indicator, trig, stage_f.
    #[arg(long = "fn")]
    pub function: String,
    /// `harmonic`, `power:<β>` or `explicit:<λ_1>,<λ_2>,…`; harmonic by
    /// default, `power:<α_1 + 1>` for stage_f.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Number of uniform grid points, or `zeros` (stage_f only).
    #[arg(long)]
    pub grid: Option<String>,
    /// Base interval `lo,hi`; `[0,1]` by default, `[0,π]` for stage_f.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub base: Option<Vec<f64>>,
    #[command(flatten)]
    pub params: FunctionParams,
    #[arg(long)]
    pub max_intervals: Option<usize>,
    #[arg(long)]
    pub max_span: Option<usize>,
    #[arg(long)]
    pub max_work: Option<usize>,
    /// Echoed in the manifest; the search itself is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "waterman-out")]
    pub out: PathBuf,
}

pub fn parse_lambda(s: &str) -> Result<LambdaSeq, CliError> {
    if s == "harmonic" {
        return Ok(LambdaSeq::harmonic());
    }
    if let Some(b) = s.strip_prefix("power:") {
        let beta: f64 = b.parse().map_err(|_| CliError::Usage(format!("bad exponent {b:?}")))?;
        return Ok(LambdaSeq::power(beta)?);
    }
    if let Some(v) = s.strip_prefix("explicit:") {
        let vals = v
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage(format!("bad explicit sequence {v:?}")))?;
        return Ok(LambdaSeq::explicit(vals)?);
    }
    Err(CliError::Usage(format!("unknown lambda {s:?}")))
}

#[derive(Serialize)]
struct WitnessRow {
    k: usize,
    a: Real,
    b: Real,
    contribution: Real,
}

#[derive(Serialize)]
struct StageBounds {
    /// `A_N^{α_1} Σ_{l=1}^{⌊2N/π⌋} l^{-β_1}`.
    membership: Real,
    within_membership: bool,
    /// `2 A_N^{α_1} Σ_{l=1}^{⌊2N/π⌋+1} l^{-β_1}`.
    swing: Real,
    within_swing: bool,
}

#[derive(Serialize)]
struct VariationOut {
    function: String,
    lambda: String,
    base: [Real; 2],
    grid_points: usize,
    value: Real,
    exact: bool,
    witness: Vec<WitnessRow>,
    bounds: Option<StageBounds>,
}

pub fn variation(args: &VariationArgs, argv: &[String]) -> Result<i32, CliError> {
    let f = lookup(&args.function, &args.params.params())?;
    let is_stage = matches!(f, Registered::Stage(_));
    let lambda = match (&args.lambda, &f) {
        (Some(l), _) => l.clone(),
        (None, Registered::Stage(_)) => format!("power:{}", args.params.alpha1.unwrap_or(0.0) + 1.0),
        (None, _) => "harmonic".to_string(),
    };
    let seq = parse_lambda(&lambda)?;
    let base = match &args.base {
        Some(b) if b.len() == 2 => (b[0], b[1]),
        Some(_) => return Err(CliError::Usage("--base takes lo,hi".into())),
        None if is_stage => (0.0, PI),
        None => (0.0, 1.0),
    };
    let grid_spec = args.grid.clone().unwrap_or_else(|| if is_stage { "zeros" } else { "17" }.to_string());
    let (grid, mut budget) = if grid_spec == "zeros" {
        let Registered::Stage(w) = &f else {
            return Err(CliError::Usage("--grid zeros needs --fn stage_f".into()));
        };
        if base != (0.0, PI) {
            return Err(CliError::Usage("--grid zeros uses the base [0, pi]".into()));
        }
        let g = zero_aligned_grid(w);
        let budget = SearchBudget {
            max_intervals: g.len(),
            max_span: Some(2),
            max_work: 50_000_000,
            max_rounds: 1,
        };
        (g, budget)
    } else {
        let count: usize = grid_spec
            .parse()
            .map_err(|_| CliError::Usage(format!("--grid takes a count or `zeros`, got {grid_spec:?}")))?;
        if count < 2 {
            return Err(CliError::Usage("--grid needs at least 2 points".into()));
        }
        let g = (0..count)
            .map(|i| base.0 + (base.1 - base.0) * i as f64 / (count - 1) as f64)
            .collect();
        (g, SearchBudget::default())
    };
    if let Some(k) = args.max_intervals {
        budget.max_intervals = k;
    }
    if args.max_span.is_some() {
        budget.max_span = args.max_span;
    }
    if let Some(w) = args.max_work {
        budget.max_work = w;
    }
    let mut result: VariationResult = variation_1d(f.function(), &seq, base, &grid, &budget)?;
    result.value += 0.0; // no negative zero in the output
    prepare(&args.out)?;
    let intervals = result.witness.first().map(|s| s.intervals.clone()).unwrap_or_default();
    let contributions = result.contributions.first().cloned().unwrap_or_default();
    let witness: Vec<WitnessRow> = intervals
        .iter()
        .zip(&contributions)
        .enumerate()
        .map(|(k, (&(a, b), &c))| WitnessRow {
            k: k + 1,
            a: Real(a),
            b: Real(b),
            contribution: Real(c),
        })
        .collect();
    let bounds = match (&f, args.params.big_n, args.params.alpha1) {
        (Registered::Stage(_), Some(n), Some(a1)) => {
            let (mb, sb) = (membership_bound(n, a1), swing_bound(n, a1));
            Some(StageBounds {
                membership: Real(mb),
                within_membership: result.value <= mb,
                swing: Real(sb),
                within_swing: result.value <= sb,
            })
        }
        _ => None,
    };
    let rows: Vec<Vec<String>> = witness
        .iter()
        .map(|w| vec!["1".into(), w.k.to_string(), fmt17(w.a.0), fmt17(w.b.0), fmt17(w.contribution.0)])
        .collect();
    let header: Vec<String> = ["axis", "k", "a", "b", "contribution"].map(String::from).to_vec();
    write_csv(&args.out.join("witness.csv"), &header, &rows)?;
    let out = VariationOut {
        function: args.function.clone(),
        lambda,
        base: [Real(base.0), Real(base.1)],
        grid_points: grid.len(),
        value: Real(result.value),
        exact: result.exact,
        witness,
        bounds,
    };
    write_json(&args.out.join("variation.json"), &out)?;
    finish(&args.out, Manifest::new("variation", argv, args.seed), &["variation.json", "witness.csv"])?;
    println!("value {} exact {}", fmt17(result.value), result.exact);
    if let Some(b) = &out.bounds {
        println!(
            "membership bound {} holds {}; swing bound {} holds {}",
            fmt17(b.membership.0),
            b.within_membership,
            fmt17(b.swing.0),
            b.within_swing
        );
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// converge

#[derive(Args, Debug, Clone)]
pub struct ConvergeArgs {
    #[arg(long = "fn")]
    pub function: String,
    /// One order per axis, or a single order for all axes.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-0.5")]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Evaluation point; the origin by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// Smallest exponent `e` of `n = 2^e`.
    #[arg(long, default_value_t = 3)]
    pub from: u32,
    #[arg(long, default_value_t = 9)]
    pub to: u32,
    /// `diagonal`: `n_j = 2^e`; `anisotropic`: `n_j = 2^{e+j-1}`.
    #[arg(long, default_value = "diagonal")]
    pub schedule: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub params: FunctionParams,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "waterman-out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct ConvergeSummary {
    function: String,
    point: Vec<Real>,
    f_star: Real,
    rows: usize,
    first_error: Real,
    last_error: Real,
    /// `max - min` of the means over the second half of the schedule.
    tail_oscillation: Real,
}

pub fn converge(args: &ConvergeArgs, argv: &[String]) -> Result<i32, CliError> {
    let m = args.m;
    if m == 0 || m > 4 {
        return Err(CliError::Usage("--m must be between 1 and 4".into()));
    }
    let alphas = match args.alpha.len() {
        1 => vec![args.alpha[0]; m],
        l if l == m => args.alpha.clone(),
        _ => return Err(CliError::Usage("--alpha needs one value or one per axis".into())),
    };
    let order = CesaroOrder::new(alphas)?;
    let x = args.x.clone().unwrap_or_else(|| vec![0.0; m]);
    if x.len() != m {
        return Err(CliError::Usage("--x needs one coordinate per axis".into()));
    }
    if args.from > args.to || args.to > 20 {
        return Err(CliError::Usage("need --from <= --to <= 20".into()));
    }
    let schedule: Vec<Vec<usize>> = (args.from..=args.to)
        .map(|e| match args.schedule.as_str() {
            "diagonal" => Ok(vec![1usize << e; m]),
            "anisotropic" => Ok((0..m).map(|j| 1usize << (e as usize + j)).collect()),
            s => Err(CliError::Usage(format!("unknown schedule {s:?}"))),
        })
        .collect::<Result<_, _>>()?;

    let p = args.params.params();
    let factors: Vec<Registered> = (0..m).map(|_| lookup(&args.function, &p)).collect::<Result<_, _>>()?;
    // f* from the one-sided limits of the product, one per orthant
    let sides: Vec<(f64, f64)> = factors.iter().zip(&x).map(|(f, &xj)| f.limits(xj)).collect();
    let limits: Vec<f64> = (0..1usize << m)
        .map(|mask| {
            sides
                .iter()
                .enumerate()
                .map(|(j, &(l, r))| if mask & (1 << j) != 0 { r } else { l })
                .product()
        })
        .collect();
    let f_star = fstar(&limits, m)?;

    let fourier = if let Registered::Trig(t) = &factors[0] {
        let one = FourierData::from_trig_polynomial(t);
        Some(if m == 1 { one } else { FourierData::tensor(&vec![one; m])? })
    } else {
        None
    };
    let mut sum = SeparableSum::new(m);
    sum.push(1.0, factors.into_iter().map(Registered::boxed).collect())?;
    let means: Vec<f64> = schedule
        .par_iter()
        .map(|nvec| {
            let source = match &fourier {
                Some(fd) => MeanSource::Fourier(fd),
                None => MeanSource::Separable(&sum),
            };
            cesaro_mean_multi(&source, nvec, &order, &x, args.tol)
        })
        .collect::<Result<_, _>>()?;

    prepare(&args.out)?;
    let mut header: Vec<String> = (1..=m).map(|j| format!("n{j}")).collect();
    header.extend(["mean".to_string(), "abs_error".to_string()]);
    let rows: Vec<Vec<String>> = schedule
        .iter()
        .zip(&means)
        .map(|(nvec, &v)| {
            let mut r: Vec<String> = nvec.iter().map(|n| n.to_string()).collect();
            r.push(fmt17(v));
            r.push(fmt17((v - f_star).abs()));
            r
        })
        .collect();
    write_csv(&args.out.join("converge.csv"), &header, &rows)?;
    let tail = &means[means.len() / 2..];
    let osc = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let summary = ConvergeSummary {
        function: args.function.clone(),
        point: reals(&x),
        f_star: Real(f_star),
        rows: means.len(),
        first_error: Real((means[0] - f_star).abs()),
        last_error: Real((means[means.len() - 1] - f_star).abs()),
        tail_oscillation: Real(osc),
    };
    write_json(&args.out.join("summary.json"), &summary)?;
    finish(&args.out, Manifest::new("converge", argv, args.seed), &["converge.csv", "summary.json"])?;
    println!(
        "f* {} first error {} last error {}",
        fmt17(f_star),
        fmt17(summary.first_error.0),
        fmt17(summary.last_error.0)
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// counterexample

#[derive(Subcommand, Debug, Clone)]
pub enum CounterexampleCommand {
    /// Build stages 1..=depth and write spec.json.
    Build(BuildArgs),
    /// Reload a spec, recompute every certificate and the per-stage verdict.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct BuildArgs {
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// `α_1,…,α_m`; `-0.3` on every axis by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, default_value_t = CERTIFICATE_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "waterman-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = CERTIFICATE_TOL)]
    pub tol: f64,
    /// Largest accepted gap between stored and recomputed certificates.
    #[arg(long, default_value_t = 1e-6)]
    pub agreement: f64,
    #[arg(long, default_value = "waterman-out")]
    pub out: PathBuf,
}

pub fn counterexample(cmd: &CounterexampleCommand, argv: &[String]) -> Result<i32, CliError> {
    match cmd {
        CounterexampleCommand::Build(a) => counterexample_build(a, argv),
        CounterexampleCommand::Verify(a) => counterexample_verify(a, argv),
    }
}

fn counterexample_build(args: &BuildArgs, argv: &[String]) -> Result<i32, CliError> {
    let alphas = args.alphas.clone().unwrap_or_else(|| vec![-0.3; args.m]);
    if alphas.len() != args.m {
        return Err(CliError::Usage(format!("--alphas has {} entries, --m is {}", alphas.len(), args.m)));
    }
    let order = CesaroOrder::new(alphas)?;
    check_order(&order)?;
    let b = estimate_b(order.alphas()[0], &BGrid::default())?;
    let config = BuildConfig {
        cap: args.cap,
        tol: args.tol,
        ..BuildConfig::new(order, args.depth, b.b_hat)
    };
    let spec = build(&config)?;
    prepare(&args.out)?;
    write_json(&args.out.join("spec.json"), &SpecFile::from(&spec))?;
    finish(&args.out, Manifest::new("counterexample build", argv, args.seed), &["spec.json"])?;
    println!("rho {} B {}", fmt17(spec.rho), fmt17(spec.b_hat));
    for st in &spec.stages {
        let required = st.certificates.iter().filter(|c| c.required).count();
        println!(
            "stage {}: N = {}, window [{}, {}], tents {:?}..{:?}, {} certificates hold",
            st.k,
            st.n,
            fmt17(st.a),
            fmt17(st.b),
            st.c.iter().map(|&v| fmt17(v)).collect::<Vec<_>>(),
            st.d.iter().map(|&v| fmt17(v)).collect::<Vec<_>>(),
            required
        );
    }
    Ok(0)
}

#[derive(Serialize)]
struct StageVerdict {
    s: usize,
    n: usize,
    total: Real,
    /// `ρ/2 - allowance`.
    threshold: Real,
    allowance: Real,
    closes: bool,
    first_failure: Option<String>,
    checks: Vec<CheckFile>,
}

#[derive(Serialize)]
struct VerifyOut {
    rho: Real,
    depth: usize,
    /// Largest gap between stored and recomputed build certificates.
    recertification_gap: Real,
    stages: Vec<StageVerdict>,
    /// Smallest stage at which the whole chain closes (not claimed minimal).
    first_closing_stage: Option<usize>,
}

fn verdict(r: &StageReport) -> StageVerdict {
    StageVerdict {
        s: r.s,
        n: r.n,
        total: Real(r.total.value),
        threshold: Real(r.total.threshold),
        allowance: Real(r.allowance),
        closes: r.closes(),
        first_failure: r.first_failure().map(|c| c.name.clone()),
        checks: r.checks().into_iter().map(CheckFile::from).collect(),
    }
}

fn counterexample_verify(args: &VerifyArgs, argv: &[String]) -> Result<i32, CliError> {
    let text = fs::read_to_string(&args.spec)?;
    let file: SpecFile = serde_json::from_str(&text)?;
    let spec = file.to_spec()?;
    spec.check_invariants()?;
    let alphas = spec.order.alphas().to_vec();
    let gaps: Vec<f64> = spec
        .stages
        .par_iter()
        .map(|st| {
            let fresh = certify_stage(st, &alphas, args.tol)?;
            if fresh.len() != st.certificates.len() {
                return Err(CliError::Numeric(format!("stage {}: certificate count differs", st.k)));
            }
            Ok(fresh
                .iter()
                .zip(&st.certificates)
                .map(|(a, b)| if a.holds == b.holds { (a.value - b.value).abs() } else { f64::INFINITY })
                .fold(0.0, f64::max))
        })
        .collect::<Result<_, CliError>>()?;
    let gap = gaps.iter().cloned().fold(0.0, f64::max);
    let reports: Vec<StageReport> = (1..=spec.stages.len())
        .into_par_iter()
        .map(|s| verify_stage(&spec, s, args.tol).map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    let out = VerifyOut {
        rho: Real(spec.rho),
        depth: spec.stages.len(),
        recertification_gap: Real(gap),
        first_closing_stage: reports.iter().find(|r| r.closes()).map(|r| r.s),
        stages: reports.iter().map(verdict).collect(),
    };
    prepare(&args.out)?;
    write_json(&args.out.join("verify.json"), &out)?;
    finish(&args.out, Manifest::new("counterexample verify", argv, 0), &["verify.json"])?;
    for r in &reports {
        println!(
            "stage {} (N = {}): |sigma(f, 0)| = {} >= rho/2 - allowance = {}: {}",
            r.s,
            r.n,
            fmt17(r.total.value),
            fmt17(r.total.threshold),
            if r.closes() { "closes" } else { "open" }
        );
    }
    println!("recertification gap {}", fmt17(gap));
    if !(gap <= args.agreement) {
        return Err(CliError::Numeric(format!(
            "recomputed certificates differ from the stored ones by {gap}"
        )));
    }
    if let Some(r) = reports.iter().find(|r| !r.closes()) {
        let name = r.first_failure().map(|c| c.name.clone()).unwrap_or_default();
        return Err(CliError::Numeric(format!("stage {} does not close: {name}", r.s)));
    }
    Ok(0)
}
