//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails. Random samples come from a fixed-seed ChaCha stream.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use waterman_core::counterexample::{
    assemble, build, max_abs_on_cube, membership_bound, rho, rho_by_quadrature, stage_variation, swing_bound,
    verify_stage, BuildConfig, CERTIFICATE_TOL,
};
use waterman_core::function::{FnHandle, OddJump, RealFunction, SkewJump, TrigPolynomial};
use waterman_core::kernels::{estimate_b, kernel_integral, BGrid, CesaroKernel};
use waterman_core::summation::{cesaro_mean_1d, finint_bound_check, mean_by_kernel, FinintInput, FourierData};
use waterman_core::variation::{system_sum_1d, variation_1d, SearchBudget};
use waterman_core::{CesaroOrder, LambdaSeq};

const SEED: u64 = 0x5745_5254;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// `A_k^γ` for `k = 0..=n` by `A_k = A_{k-1} (k + γ)/k`.
fn binomials(gamma: f64, n: usize) -> Vec<f64> {
    let mut a = vec![1.0; n + 1];
    for k in 1..=n {
        a[k] = a[k - 1] * (k as f64 + gamma) / k as f64;
    }
    a
}

fn c1_normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [16, 64, 256] {
        for alpha in [-0.9, -0.5, -0.1] {
            let v = kernel_integral(n, alpha, -PI, PI, 1e-10).unwrap();
            worst = worst.max((v - 1.0).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max |(1/pi) int K - 1| = {worst:.3e} (tol 1e-6)"))
}

fn c2_kernel_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut pointwise = 0usize;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_at = (0usize, 0.0f64, 0.0f64);
    let mut rem_checked = 0usize;
    let mut rem_violations = 0usize;
    let mut rem_worst: f64 = 0.0;
    for _ in 0..100_000 {
        let n = (2048f64.powf(rng.gen::<f64>())).floor().max(1.0) as usize;
        let alpha = -rng.gen::<f64>();
        let t = PI * (1.0 - rng.gen::<f64>());
        let k = CesaroKernel::new(n, alpha).unwrap();
        let v = k.eval(t);
        let ratio = v.abs() / (n as f64 + 1.0);
        if ratio > 1.0 {
            pointwise += 1;
        }
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_at = (n, alpha, t);
        }
        if t >= 1.0 / (4.0 * n as f64) {
            // remainder against the direct sum, not the expansion
            let direct = k.eval_direct(t);
            let r = direct - k.main_term(t).unwrap();
            let s = 2.0 * (0.5 * t).sin();
            let bound = 2.0 * alpha.abs() / (n as f64 * s * s);
            rem_checked += 1;
            // rounding of the direct sum
            if r.abs() > bound + 1e-12 * direct.abs().max(1.0) {
                rem_violations += 1;
            }
            if bound > 0.0 {
                rem_worst = rem_worst.max(r.abs() / bound);
            }
        }
    }
    outcome(
        pointwise == 0 && rem_violations == 0,
        format!(
            "pointwise |K| <= n+1: {pointwise} violations of 100000 (worst |K|/(n+1) = {worst_ratio:.3} at n = {}, alpha = {:.4}, t = {:.3e}); \
             remainder: {rem_violations} violations of {rem_checked} (worst |R|/bound = {rem_worst:.3})",
            worst_at.0, worst_at.1, worst_at.2
        ),
    )
}

fn c3_pathways() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for _ in 0..50 {
        let d = rng.gen_range(0..=32usize);
        let cos: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sin: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = TrigPolynomial::new(cos.clone(), sin.clone());
        let data = FourierData::from_trig_polynomial(&p);
        let n = rng.gen_range(1..=256usize);
        let x = rng.gen_range(-PI..PI);
        for alpha in [-0.9, -0.5, -0.1, 0.0] {
            let via_sums = cesaro_mean_1d(&data, n, alpha, x).unwrap();
            let kernel = CesaroKernel::new(n, alpha).unwrap();
            let via_kernel = mean_by_kernel(&p, &kernel, x, 1e-10).unwrap().value;
            worst = worst.max((via_sums - via_kernel).abs());
            // σ = Σ_k A_{n-k}^{α-1} S_k(x) / A_n^α from scratch
            let lower = binomials(alpha - 1.0, n);
            let upper = binomials(alpha, n);
            let mut s = 0.5 * cos[0];
            let mut sigma = lower[n] * s;
            for k in 1..=n {
                if k <= d {
                    s += cos[k] * (k as f64 * x).cos() + sin[k - 1] * (k as f64 * x).sin();
                }
                sigma += lower[n - k] * s;
            }
            worst_oracle = worst_oracle.max((sigma / upper[n] - via_sums).abs());
        }
    }
    outcome(
        worst <= 1e-6 && worst_oracle <= 1e-6,
        format!("partial sums vs kernel quadrature max diff {worst:.3e}, vs direct weighted sum {worst_oracle:.3e} (tol 1e-6)"),
    )
}

/// Best sorted-pairing sum over all systems of at most `k` grid intervals.
fn brute(vals: &[f64], lambdas: &[f64], k: usize) -> f64 {
    fn go(vals: &[f64], lambdas: &[f64], k: usize, from: usize, chosen: &mut Vec<f64>, best: &mut f64) {
        let mut ds = chosen.clone();
        ds.sort_by(|a, b| b.total_cmp(a));
        let v: f64 = ds.iter().zip(lambdas).map(|(d, l)| d / l).sum();
        if v > *best {
            *best = v;
        }
        if chosen.len() == k {
            return;
        }
        // next interval starts at or after `from`
        for i in from..vals.len() {
            for j in i + 1..vals.len() {
                let d = (vals[j] - vals[i]).abs();
                chosen.push(if d < 1e-14 { 0.0 } else { d });
                go(vals, lambdas, k, j, chosen, best);
                chosen.pop();
            }
        }
    }
    let mut best = 0.0;
    go(vals, lambdas, k, 0, &mut Vec::new(), &mut best);
    best
}

fn c4_variation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut mismatches = 0;
    let mut inexact = 0;
    for case in 0..100 {
        let knots: Vec<(f64, f64)> = {
            let mut xs: Vec<f64> = (0..rng.gen_range(2..=6)).map(|_| rng.gen::<f64>()).collect();
            xs.push(0.0);
            xs.push(1.0);
            xs.sort_by(f64::total_cmp);
            xs.into_iter().map(|x| (x, rng.gen_range(-2.0..2.0))).collect()
        };
        let f = FnHandle::new(move |x: f64| {
            let i = knots.windows(2).position(|w| x <= w[1].0).unwrap_or(knots.len() - 2);
            let (a, b) = (knots[i], knots[i + 1]);
            a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
        });
        let points = rng.gen_range(2..=10usize);
        let grid: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
        let seq = if case % 2 == 0 { LambdaSeq::harmonic() } else { LambdaSeq::power(0.7).unwrap() };
        let budget = SearchBudget {
            max_intervals: 3,
            ..SearchBudget::default()
        };
        let r = variation_1d(&f, &seq, (0.0, 1.0), &grid, &budget).unwrap();
        let vals: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
        let lambdas: Vec<f64> = (1..=3).map(|k| seq.value(k)).collect();
        if r.value.to_bits() != brute(&vals, &lambdas, 3).to_bits() {
            mismatches += 1;
        }
        if !r.exact {
            inexact += 1;
        }
    }
    outcome(
        mismatches == 0 && inexact == 0,
        format!("{mismatches} bitwise mismatches, {inexact} non-exact searches in 100 cases"),
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn c5_rearrangement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let perms: Vec<Vec<Vec<usize>>> = (0..=5).map(permutations).collect();
    let mut violations = 0;
    let mut compared = 0usize;
    let f = FnHandle::new(|x: f64| (3.0 * x).sin() + 0.5 * x * x);
    for case in 0..1000 {
        let k = rng.gen_range(1..=5usize);
        let mut cuts: Vec<f64> = (0..2 * k).map(|_| rng.gen_range(-PI..PI)).collect();
        cuts.sort_by(f64::total_cmp);
        let intervals: Vec<(f64, f64)> = cuts.chunks(2).map(|c| (c[0], c[1])).collect();
        let seq = match case % 3 {
            0 => LambdaSeq::harmonic(),
            1 => LambdaSeq::power(rng.gen_range(0.1..1.0)).unwrap(),
            _ => LambdaSeq::explicit((1..=5).map(|i| (i as f64).sqrt() + i as f64).collect()).unwrap(),
        };
        let mut sorted = intervals.clone();
        sorted.sort_by(|a, b| (f.eval(b.1) - f.eval(b.0)).abs().total_cmp(&(f.eval(a.1) - f.eval(a.0)).abs()));
        let best = system_sum_1d(&f, &seq, &sorted);
        for p in &perms[k] {
            let order: Vec<(f64, f64)> = p.iter().map(|&i| intervals[i]).collect();
            compared += 1;
            // a few ulps of summation-order rounding
            if system_sum_1d(&f, &seq, &order) > best * (1.0 + 8.0 * f64::EPSILON) {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations over {compared} permutation pairings"))
}

fn c6_regular_point() -> Outcome {
    let order = -0.5;
    let mean = |f: &dyn RealFunction, n: usize| {
        let k = CesaroKernel::new(n, order).unwrap();
        mean_by_kernel(f, &k, 0.0, 1e-11).unwrap().value
    };
    let f = SkewJump;
    let (m8, m512) = (mean(&f, 8).abs(), mean(&f, 512).abs());
    let early = (8..=16).map(|n| mean(&f, n).abs()).fold(0.0, f64::max);
    let late = (256..=512).map(|n| mean(&f, n).abs()).fold(0.0, f64::max);
    // the odd jump has identically vanishing means at 0, so no decrease can show
    let odd = [8, 512].map(|n| mean(&OddJump, n).abs());
    outcome(
        m512 < m8 && late * 2.0 <= early,
        format!(
            "skew jump: |sigma_8| = {m8:.3e}, |sigma_512| = {m512:.3e}, max 8..16 = {early:.3e}, max 256..512 = {late:.3e} \
             (ratio {:.2}); odd jump |sigma_8|, |sigma_512| = {:.1e}, {:.1e}",
            early / late,
            odd[0],
            odd[1]
        ),
    )
}

struct Built {
    spec: waterman_core::counterexample::DiagonalSpec,
}

fn c7_counterexample() -> (Outcome, Option<Built>) {
    let order = CesaroOrder::uniform(-0.3, 3).unwrap();
    let closed = (3f64.powf(0.3) - 1.0) / (0.3 * 2.0 * PI * 64.0);
    let rho_q = rho_by_quadrature(0.7, 3).unwrap();
    let rho_ok = (rho_q - closed).abs() <= 1e-10 && (rho(0.7, 3) - closed).abs() <= 1e-10;
    let b = estimate_b(-0.3, &BGrid::default()).unwrap();
    let config = BuildConfig {
        cap: 1 << 20,
        ..BuildConfig::new(order, 2, b.b_hat)
    };
    let spec = match build(&config) {
        Ok(s) => s,
        Err(e) => return (outcome(false, format!("build failed: {e}")), None),
    };
    let r = verify_stage(&spec, 2, CERTIFICATE_TOL).unwrap();
    let rho = spec.rho;
    let f2 = r.own.f.value > 32.0 * rho;
    let tents = r.own.tents.iter().all(|t| t.value > 0.25);
    let built_tents = spec.stages[1].certificates.iter().all(|c| c.holds);
    let psi = r.psi.value > rho;
    let g = r.g.value < rho / 4.0;
    let f = assemble(&spec, 2).unwrap();
    let cube = max_abs_on_cube(&f, 17);
    // Σ_{k>2} (ρ/8)(1/2)^{2(k-3)} = ρ/6
    let allowance_ok = (r.allowance - rho / 6.0).abs() <= 1e-15;
    let total = r.total.value >= rho / 2.0 - rho / 6.0;
    let spread = r.checks().iter().map(|c| c.spread()).fold(0.0, f64::max);
    let pass = rho_ok && f2 && tents && built_tents && psi && g && cube == 0.0 && allowance_ok && total && spread <= 1e-6;
    let detail = format!(
        "N_2 = {}; rho = {rho:.10e} (quadrature diff {:.1e}); sigma(f_2) = {:.6e} > 32 rho = {:.6e}: {f2}; \
         tents {:.6}, {:.6} > 1/4: {tents}; |sigma(psi_2)| = {:.6e} > rho: {psi}; |sigma(g_2)| = {:.3e} < rho/4: {g}; \
         max |f| on 17^3 cube = {cube}; |sigma(f)| = {:.6e} >= rho/2 - rho/6 = {:.6e}: {total}; \
         max quadrature/spectral spread {spread:.1e}",
        spec.stages[1].n,
        (rho_q - closed).abs(),
        r.own.f.value,
        32.0 * rho,
        r.own.tents[0].value,
        r.own.tents[1].value,
        r.psi.value,
        r.g.value,
        r.total.value,
        rho / 2.0 - rho / 6.0,
    );
    (outcome(pass, detail), Some(Built { spec }))
}

fn c8_membership(built: Option<&Built>) -> Outcome {
    let Some(built) = built else {
        return outcome(false, "no built stages".into());
    };
    let alpha1 = built.spec.order.alphas()[0];
    let mut all = true;
    let mut parts = Vec::new();
    let mut sup: f64 = 0.0;
    for k in 1..=built.spec.stages.len() {
        let (f, _) = built.spec.pieces(k).unwrap();
        let n = built.spec.stages[k - 1].n;
        let v = stage_variation(&f, alpha1).unwrap().value;
        let bound = membership_bound(n, alpha1);
        let swing = swing_bound(n, alpha1);
        sup = sup.max(bound);
        all &= v <= bound;
        parts.push(format!(
            "k={k} N={n}: V = {v:.6} vs bound {bound:.6} (ratio {:.3}), within 2A-swing bound {swing:.6}: {}",
            v / bound,
            v <= swing
        ));
    }
    // the bound along N = 2^j stays bounded as well
    let far = (4..=20).map(|j| membership_bound(1 << j, alpha1)).fold(0.0, f64::max);
    parts.push(format!("sup over built stages {sup:.6}; max over N = 2^4..2^20 {far:.6}"));
    outcome(all, parts.join("; "))
}

fn c9_finint() -> Outcome {
    let f = FnHandle::new(|t: f64| t);
    let s = FnHandle::new(f64::sin);
    let seq = LambdaSeq::harmonic();
    let grid: Vec<f64> = (0..=8).map(|i| PI * i as f64 / 8.0).collect();
    let v = variation_1d(&f, &seq, (0.0, PI), &grid, &SearchBudget::default()).unwrap().value;
    let mut rows = Vec::new();
    for j in 2..=8 {
        let big_a = (1u32 << j) as f64;
        let r = finint_bound_check(&FinintInput {
            f: &f,
            seq: &seq,
            a: 0.0,
            b: PI,
            s: &s,
            big_a,
            variation: v,
            sup: PI,
            c_test: 1.0,
        })
        .unwrap();
        rows.push((big_a, r.normalized));
    }
    let low = rows.iter().filter(|r| r.0 <= 16.0).map(|r| r.1).fold(0.0, f64::max);
    let high = rows.iter().filter(|r| r.0 >= 64.0).map(|r| r.1).fold(0.0, f64::max);
    let max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let list: Vec<String> = rows.iter().map(|(a, q)| format!("A={a}: {q:.4}")).collect();
    outcome(
        high <= 2.0 * low,
        format!("V = {v:.6}; {}; max {max:.4}; max(A>=64) = {high:.4} <= 2 max(A<=16) = {:.4}", list.join(", "), 2.0 * low),
    )
}

fn report(id: &str, title: &str, o: &Outcome, secs: f64) -> bool {
    println!("{} {id} {title} [{secs:.1}s]: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    o.pass
}

fn main() -> ExitCode {
    let mut ok = true;
    let timed = |f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        (o, t.elapsed().as_secs_f64())
    };
    let (o, t) = timed(&c1_normalization);
    ok &= report("1", "kernel normalization", &o, t);
    let (o, t) = timed(&c2_kernel_bounds);
    ok &= report("2", "kernel bounds", &o, t);
    let (o, t) = timed(&c3_pathways);
    ok &= report("3", "pathway agreement", &o, t);
    let (o, t) = timed(&c4_variation_oracle);
    ok &= report("4", "variation oracle equivalence", &o, t);
    let (o, t) = timed(&c5_rearrangement);
    ok &= report("5", "rearrangement property", &o, t);
    let (o, t) = timed(&c6_regular_point);
    ok &= report("6", "regular-point desk check", &o, t);
    let start = Instant::now();
    let (o, built) = c7_counterexample();
    ok &= report("7", "counterexample build", &o, start.elapsed().as_secs_f64());
    let start = Instant::now();
    let o = c8_membership(built.as_ref());
    ok &= report("8", "membership evidence", &o, start.elapsed().as_secs_f64());
    let (o, t) = timed(&c9_finint);
    ok &= report("9", "oscillatory integral sweep", &o, t);
    if ok {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria FAIL");
        ExitCode::FAILURE
    }
}
