//! The staged "diagonal" function whose cubic Cesàro means at the origin
//! stay away from zero although the function vanishes near the origin.
//!
//! Stage `k` contributes `ψ_k(x) = f_k(x^1) Π_{j≥2} h_k^j(x^j)`, where `f_k`
//! is a sinusoid of frequency `ν_{1,k} = N_k + β_1/2` cut to its zeros in
//! `[1, 3]` and the `h_k^j` are tents squeezed toward the origin. Every
//! threshold of the construction is certified numerically; the
//! certificates are computed by kernel quadrature and cross-checked
//! against closed-form cosine moments.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math wins when a dependency links std
use num_traits::Float;

use crate::function::{wrap, MultiFunction, RealFunction};
use crate::kernels::{kernel_integral_refined, kernel_integral_spectral, CesaroKernel};
use crate::quadrature::{integrate_refined, Refined};
use crate::sequences::{cesaro_number, cesaro_numbers, check_ladiv, CesaroOrder, LambdaSeq};
use crate::summation::mean_by_kernel;
use crate::variation::{variation_1d, SearchBudget, VariationResult};
use crate::{Error, Result};

pub const FIRST_N: usize = 10;
pub const DEFAULT_CAP: usize = 1 << 20;
pub const CERTIFICATE_TOL: f64 = 1e-8;
pub const TENT_RETRIES: usize = 20;
/// `(1/π) ∫_0^δ K_n` must exceed this for all `n > M_{s,j}`.
pub const KERNEL_MASS: f64 = 5.0 / 12.0;
/// `(1/π) ∫_c^d K_{N_s}` must exceed this.
pub const WINDOW_MASS: f64 = 1.0 / 3.0;
/// Tent means at `N_s` must exceed this.
pub const TENT_MEAN: f64 = 0.25;

/// `ρ = (1/(2π 4^m)) ∫_1^3 t^{-β_1} dt`.
pub fn rho(beta1: f64, m: usize) -> f64 {
    let integral = if (beta1 - 1.0).abs() < 1e-15 {
        3f64.ln()
    } else {
        (3f64.powf(1.0 - beta1) - 1.0) / (1.0 - beta1)
    };
    integral / (2.0 * PI * 4f64.powi(m as i32))
}

/// `∫ h(t) cos(lt) dt` in closed form.
pub trait CosineMoments {
    fn cos_moment(&self, l: usize) -> f64;
}

/// `amplitude · sin(ν t - phase)` on `[a, b]`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowedSine {
    pub nu: f64,
    pub phase: f64,
    pub amplitude: f64,
    pub a: f64,
    pub b: f64,
}

impl WindowedSine {
    /// Zeros and extrema of the sinusoid inside the window, in order.
    pub fn zeros_and_extrema(&self) -> Vec<f64> {
        let j0 = (2.0 * (self.nu * self.a - self.phase) / PI).round() as i64;
        let j1 = (2.0 * (self.nu * self.b - self.phase) / PI).round() as i64;
        (j0..=j1)
            .map(|j| (j as f64 * PI / 2.0 + self.phase) / self.nu)
            .collect()
    }
}

impl RealFunction for WindowedSine {
    fn eval(&self, x: f64) -> f64 {
        let x = wrap(x);
        if x < self.a || x > self.b {
            0.0
        } else {
            self.amplitude * (self.nu * x - self.phase).sin()
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.a, self.b]
    }
    fn support(&self) -> Option<(f64, f64)> {
        Some((self.a, self.b))
    }
    fn max_frequency(&self) -> Option<f64> {
        Some(self.nu)
    }
}

/// `∫_a^b sin(u t - φ) dt` in the cancellation-free product form.
fn sine_window_integral(u: f64, phase: f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    if u.abs() < 1e-300 {
        return (b - a) * (-phase).sin();
    }
    2.0 * (u * mid - phase).sin() * (u * half).sin() / u
}

impl CosineMoments for WindowedSine {
    fn cos_moment(&self, l: usize) -> f64 {
        let l = l as f64;
        0.5 * self.amplitude
            * (sine_window_integral(self.nu + l, self.phase, self.a, self.b)
                + sine_window_integral(self.nu - l, self.phase, self.a, self.b))
    }
}

/// Symmetric tent: 0 outside `(c, d)`, 1 at the midpoint, linear between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tent {
    pub c: f64,
    pub d: f64,
}

pub fn tent(c: f64, d: f64) -> Result<Tent> {
    if !(c > 0.0 && c < d) {
        return Err(Error::domain("tent needs 0 < c < d"));
    }
    Ok(Tent { c, d })
}

impl RealFunction for Tent {
    fn eval(&self, x: f64) -> f64 {
        let x = wrap(x);
        let mid = 0.5 * (self.c + self.d);
        let half = 0.5 * (self.d - self.c);
        if x <= self.c || x >= self.d {
            0.0
        } else if x <= mid {
            (x - self.c) / half
        } else {
            (self.d - x) / half
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.c, 0.5 * (self.c + self.d), self.d]
    }
    fn support(&self) -> Option<(f64, f64)> {
        Some((self.c, self.d))
    }
}

impl CosineMoments for Tent {
    fn cos_moment(&self, l: usize) -> f64 {
        let w = 0.5 * (self.d - self.c);
        if l == 0 {
            return w;
        }
        let l = l as f64;
        let s = (0.5 * l * w).sin();
        4.0 * (l * 0.5 * (self.c + self.d)).cos() * s * s / (l * l * w)
    }
}

/// `σ_n^α(h, 0) = Σ_l ε_l (A_{n-l}^α / A_n^α) (1/π) ∫ h cos(lt)`, with
/// `ε_0 = 1/2` and `ε_l = 1` otherwise.
pub fn spectral_mean_at_origin(h: &dyn CosineMoments, n: usize, alpha: f64) -> f64 {
    let a = cesaro_numbers(alpha, n);
    let a_n = a[n];
    let mut sum = 0.0;
    let mut comp = 0.0;
    for l in 0..=n {
        let weight = if l == 0 { 0.5 } else { a[n - l] / a_n };
        let term = weight * h.cos_moment(l);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    (sum + comp) / PI
}

/// Smallest and largest zeros of `sin(ν t - πα_1/2)` in `[1, 3]`.
pub fn stage_window(n: usize, alpha1: f64) -> Result<(f64, f64)> {
    if n < FIRST_N {
        return Err(Error::domain("stage windows need N >= 10"));
    }
    let nu = n as f64 + 0.5 * (1.0 + alpha1);
    let phase = 0.5 * PI * alpha1;
    let l_min = ((nu - phase) / PI).ceil();
    let l_max = ((3.0 * nu - phase) / PI).floor();
    Ok(((l_min * PI + phase) / nu, (l_max * PI + phase) / nu))
}

/// `f_k(t) = χ_{[a,b]}(t) sin(ν t - πα_1/2) A_N^{α_1}`.
pub fn stage_f(n: usize, alpha1: f64) -> Result<WindowedSine> {
    let (a, b) = stage_window(n, alpha1)?;
    Ok(WindowedSine {
        nu: n as f64 + 0.5 * (1.0 + alpha1),
        phase: 0.5 * PI * alpha1,
        amplitude: cesaro_number(alpha1, n),
        a,
        b,
    })
}

/// `{0} ∪ zeros and extrema of f_k ∪ {π}`.
pub fn zero_aligned_grid(f: &WindowedSine) -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend(f.zeros_and_extrema());
    g.push(PI);
    g
}

/// `A_N^{α_1} Σ_{l=1}^{⌊2N/π⌋} l^{-β_1}`.
pub fn membership_bound(n: usize, alpha1: f64) -> f64 {
    let terms = (2.0 * n as f64 / PI).floor() as usize;
    cesaro_number(alpha1, n) * (1..=terms).map(|l| (l as f64).powf(-(alpha1 + 1.0))).sum::<f64>()
}

/// `2 A_N^{α_1} Σ_{l=1}^{⌊2N/π⌋+1} l^{-β_1}`: every swing between
/// neighbouring extrema has height `2A`, and there are at most
/// `⌊2N/π⌋ + 1` monotone pieces in the window.
pub fn swing_bound(n: usize, alpha1: f64) -> f64 {
    let terms = (2.0 * n as f64 / PI).floor() as usize + 1;
    2.0 * cesaro_number(alpha1, n) * (1..=terms).map(|l| (l as f64).powf(-(alpha1 + 1.0))).sum::<f64>()
}

/// `V_{{n^{β_1}}}(f_k; [0, π])` on the zero-aligned grid.
pub fn stage_variation(f: &WindowedSine, alpha1: f64) -> Result<VariationResult> {
    let grid = zero_aligned_grid(f);
    let budget = SearchBudget {
        max_intervals: grid.len(),
        max_span: Some(2),
        max_work: 50_000_000,
        max_rounds: 1,
    };
    variation_1d(f, &LambdaSeq::power(alpha1 + 1.0)?, (0.0, PI), &grid, &budget)
}

// ---------------------------------------------------------------------------
// certificates

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Greater,
    Less,
    AtMost,
    AtLeast,
}

impl Relation {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::Greater => value > threshold,
            Relation::Less => value < threshold,
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Greater => ">",
            Relation::Less => "<",
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

/// A measured quantity compared with its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Quadrature value on the finest panels used.
    pub value: f64,
    /// Same quadrature one halving coarser.
    pub coarse: f64,
    /// Closed-form cross-check, when available.
    pub spectral: Option<f64>,
    pub threshold: f64,
    pub relation: Relation,
    pub holds: bool,
    /// `false` for checks reported but not demanded (the fixed first stage).
    pub required: bool,
}

impl Check {
    fn new(name: String, r: Refined, spectral: Option<f64>, relation: Relation, threshold: f64) -> Self {
        Check {
            holds: relation.holds(r.value, threshold),
            name,
            value: r.value,
            coarse: r.coarse,
            spectral,
            threshold,
            relation,
            required: true,
        }
    }

    fn exact(name: String, value: f64, relation: Relation, threshold: f64) -> Self {
        Check {
            holds: relation.holds(value, threshold),
            name,
            value,
            coarse: value,
            spectral: None,
            threshold,
            relation,
            required: true,
        }
    }

    fn optional(mut self, required: bool) -> Self {
        self.required = required;
        self
    }

    /// Largest disagreement between the routes that computed `value`.
    pub fn spread(&self) -> f64 {
        let d = (self.value - self.coarse).abs();
        self.spectral.map_or(d, |s| d.max((self.value - s).abs()))
    }
}

/// `M_{s,j}`: every sampled `n` in `(M, 4M]` passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    /// 0 for the localization threshold of `g_s`, `j` for the kernel mass on axis `j`.
    pub axis: usize,
    pub m: usize,
    pub samples: usize,
    /// The sampled value closest to failing.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageParams {
    pub k: usize,
    pub n: usize,
    /// `ν_{j,k}` for every axis.
    pub nu: Vec<f64>,
    pub a: f64,
    pub b: f64,
    /// Tent edges and caps for axes `2..=m`.
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub delta: Vec<f64>,
    pub thresholds: Vec<Threshold>,
    /// `(N_k / N_{k-1})^{α_1}` and `min{1/(8B), 1/2}`; absent for stage 1.
    pub growth: Option<(f64, f64)>,
    pub tent_retries: usize,
    /// Build-time certificates: kernel mass on `(0, δ)`, window mass on
    /// `(c, d)` and tent means, per axis `2..=m`.
    pub certificates: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSpec {
    pub order: CesaroOrder,
    pub rho: f64,
    pub b_hat: f64,
    pub cap: usize,
    pub stages: Vec<StageParams>,
}

impl DiagonalSpec {
    pub fn m(&self) -> usize {
        self.order.dim()
    }

    /// `f_k` and the tents of stage `k` (1-based).
    pub fn pieces(&self, k: usize) -> Result<(WindowedSine, Vec<Tent>)> {
        let st = &self.stages[k - 1];
        let f = stage_f(st.n, self.order.alphas()[0])?;
        let tents = st
            .c
            .iter()
            .zip(&st.d)
            .map(|(&c, &d)| tent(c, d))
            .collect::<Result<Vec<_>>>()?;
        Ok((f, tents))
    }

    /// Structural invariants: windows, δ-chain, growth, disjoint supports.
    pub fn check_invariants(&self) -> Result<()> {
        let m = self.m();
        let alpha1 = self.order.alphas()[0];
        for (idx, st) in self.stages.iter().enumerate() {
            let k = idx + 1;
            if st.k != k {
                return Err(Error::Construction(format!("stage {k} is labelled {}", st.k)));
            }
            let f = stage_f(st.n, alpha1)?;
            if (f.a - st.a).abs() > 1e-12 || (f.b - st.b).abs() > 1e-12 {
                return Err(Error::Construction(format!("stage {k}: window differs from the zeros")));
            }
            if !(st.a >= 1.0 && st.b <= 3.0) {
                return Err(Error::Construction(format!("stage {k}: window leaves [1, 3]")));
            }
            for t in [st.a, st.b] {
                // the phase ν t carries rounding of order ε ν t
                if (st.nu[0] * t - f.phase).sin().abs() > 1e-13 * (st.nu[0] * t).max(1.0) {
                    return Err(Error::Construction(format!("stage {k}: window edge is not a zero")));
                }
            }
            if st.c.len() != m - 1 || st.d.len() != m - 1 || st.delta.len() != m - 1 {
                return Err(Error::Construction(format!("stage {k}: wrong number of tents")));
            }
            for j in 0..m - 1 {
                let (c, d, delta) = (st.c[j], st.d[j], st.delta[j]);
                // stage 1 is fixed with d = δ; later tents sit strictly inside (0, δ)
                let inside = if k == 1 { d <= delta } else { d < delta };
                if !(c > 0.0 && c < d && inside) {
                    return Err(Error::Construction(format!("stage {k}: tent {} leaves (0, delta)", j + 2)));
                }
                if k > 1 {
                    let prev = &self.stages[idx - 1];
                    let want = (0.5 * prev.delta[j]).min(prev.c[j]).min(1.0 / (4.0 * prev.n as f64));
                    if delta != want {
                        return Err(Error::Construction(format!("stage {k}: delta recursion broken")));
                    }
                }
            }
            if k > 1 {
                let prev = &self.stages[idx - 1];
                if st.n <= prev.n {
                    return Err(Error::Construction(format!("stage {k}: N does not increase")));
                }
                let ratio = (st.n as f64 / prev.n as f64).powf(alpha1);
                if !(ratio < growth_limit(self.b_hat)) {
                    return Err(Error::Construction(format!("stage {k}: growth condition fails")));
                }
            }
        }
        for (x, s) in self.stages.iter().enumerate() {
            for t in &self.stages[x + 1..] {
                if !boxes_disjoint(s, t) {
                    return Err(Error::Construction(format!("supports of stages {} and {} meet", s.k, t.k)));
                }
            }
        }
        Ok(())
    }
}

fn boxes_disjoint(s: &StageParams, t: &StageParams) -> bool {
    let disjoint = |a0: f64, a1: f64, b0: f64, b1: f64| a1 < b0 || b1 < a0;
    disjoint(s.a, s.b, t.a, t.b) || (0..s.c.len()).any(|j| disjoint(s.c[j], s.d[j], t.c[j], t.d[j]))
}

fn growth_limit(b_hat: f64) -> f64 {
    (1.0 / (8.0 * b_hat)).min(0.5)
}

// ---------------------------------------------------------------------------
// building

#[derive(Debug, Clone, PartialEq)]
pub struct BuildConfig {
    pub order: CesaroOrder,
    pub depth: usize,
    pub cap: usize,
    /// Empirical `B(α_1)` (with safety factor).
    pub b_hat: f64,
    pub tol: f64,
}

impl BuildConfig {
    pub fn new(order: CesaroOrder, depth: usize, b_hat: f64) -> Self {
        BuildConfig {
            order,
            depth,
            cap: DEFAULT_CAP,
            b_hat,
            tol: CERTIFICATE_TOL,
        }
    }
}

/// Checks the admissibility of `order` for the construction.
pub fn check_order(order: &CesaroOrder) -> Result<()> {
    if order.dim() < 2 {
        return Err(Error::domain("the construction needs m >= 2"));
    }
    if order.alphas().iter().any(|&a| !(a > -1.0 && a < 0.0)) {
        return Err(Error::domain("the construction needs every alpha_j in (-1, 0)"));
    }
    let margin = order.big_beta_margin(0);
    if !(margin > 0.0) {
        // rounded so that 0.4 does not print as 0.39999999999999991
        let shown = ((margin + 1.0) * 1e12).round() / 1e12;
        return Err(Error::domain(format!("sum of beta_j minus beta_1 = {shown} <= 1")));
    }
    Ok(())
}

/// Builds stages `1..=depth`.
pub fn build(config: &BuildConfig) -> Result<DiagonalSpec> {
    check_order(&config.order)?;
    if config.depth == 0 {
        return Err(Error::domain("depth must be at least 1"));
    }
    if !(config.b_hat > 0.0) {
        return Err(Error::domain("B estimate must be positive"));
    }
    let m = config.order.dim();
    let alphas = config.order.alphas();
    let mut spec = DiagonalSpec {
        order: config.order.clone(),
        rho: rho(config.order.betas()[0], m),
        b_hat: config.b_hat,
        cap: config.cap,
        stages: Vec::new(),
    };
    // stage 1 is fixed
    let (a, b) = stage_window(FIRST_N, alphas[0])?;
    let mut first = StageParams {
        k: 1,
        n: FIRST_N,
        nu: alphas.iter().map(|&al| FIRST_N as f64 + 0.5 * (1.0 + al)).collect(),
        a,
        b,
        c: vec![0.25; m - 1],
        d: vec![0.5; m - 1],
        delta: vec![0.5; m - 1],
        thresholds: Vec::new(),
        growth: None,
        tent_retries: 0,
        certificates: Vec::new(),
    };
    first.certificates = certify_stage(&first, alphas, config.tol)?;
    spec.stages.push(first);

    for s in 2..=config.depth {
        let stage = find_thresholds(s, &spec, config)?;
        spec.stages.push(stage);
    }
    spec.check_invariants()?;
    Ok(spec)
}

/// `|σ_n^{ααα}(g_s, 0)|` from the closed-form moments of stages `< s`.
fn g_mean_spectral(spec: &DiagonalSpec, s: usize, n: usize) -> Result<f64> {
    let alphas = spec.order.alphas();
    let mut total = 0.0;
    for k in 1..s {
        let (f, tents) = spec.pieces(k)?;
        let mut prod = spectral_mean_at_origin(&f, n, alphas[0]);
        for (j, t) in tents.iter().enumerate() {
            prod *= spectral_mean_at_origin(t, n, alphas[j + 1]);
        }
        total += prod;
    }
    Ok(total.abs())
}

/// Sample points of `(M, 4M]`: the 16 integers after `M` and 9
/// geometrically spaced points up to `4M`.
fn sample_window(m: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (m + 1..=m + 16).collect();
    for i in 0..=8 {
        let n = ((m as f64) * 4f64.powf(i as f64 / 8.0)).round() as usize;
        if n > m {
            out.push(n);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// First `M` on the schedule `M ← ⌈M 2^{1/4}⌉` whose sample window passes;
/// a sample passes when `margin(value) > 0`.
fn scan_threshold<F>(cap: usize, mut value: F, margin: impl Fn(f64) -> f64) -> Result<Option<(usize, usize, f64)>>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut m = FIRST_N;
    while m <= cap {
        let samples = sample_window(m);
        let mut worst = f64::NAN;
        let mut ok = true;
        for &n in &samples {
            let v = value(n)?;
            if !(margin(v) > 0.0) {
                ok = false;
                break;
            }
            if worst.is_nan() || margin(v) < margin(worst) {
                worst = v;
            }
        }
        if ok {
            return Ok(Some((m, samples.len(), worst)));
        }
        m = (m + 1).max(((m as f64) * 2f64.powf(0.25)).ceil() as usize);
    }
    Ok(None)
}

/// Stage `s ≥ 2`: δ caps, thresholds `M_{s,j}`, `N_s`, and tents.
pub fn find_thresholds(s: usize, prev: &DiagonalSpec, config: &BuildConfig) -> Result<StageParams> {
    if s < 2 || prev.stages.len() != s - 1 {
        return Err(Error::domain("stages must be built in order"));
    }
    let m = prev.m();
    let alphas = prev.order.alphas();
    let last = &prev.stages[s - 2];
    let delta: Vec<f64> = (0..m - 1)
        .map(|j| (0.5 * last.delta[j]).min(last.c[j]).min(1.0 / (4.0 * last.n as f64)))
        .collect();

    // growth: (N_s/N_{s-1})^{α_1} < min{1/(8B), 1/2}
    let limit = growth_limit(config.b_hat);
    let mut n_growth = ((last.n as f64) * limit.powf(1.0 / alphas[0])).floor() as usize + 1;
    while !((n_growth as f64 / last.n as f64).powf(alphas[0]) < limit) {
        n_growth += 1;
    }
    if n_growth > config.cap {
        return Err(Error::threshold(
            "ngrowth",
            format!("stage {s}: growth alone needs N_s = {n_growth}, above the cap {}", config.cap),
        ));
    }

    let mut thresholds = Vec::new();
    let rho = prev.rho;
    let g = scan_threshold(config.cap, |n| g_mean_spectral(prev, s, n), |v| rho / 4.0 - v)?;
    let (m1, samples, worst) = g.ok_or_else(|| {
        Error::threshold("M_s1", format!("stage {s}: |sigma(g_s, 0)| < rho/4 not reached below the cap"))
    })?;
    thresholds.push(Threshold { axis: 0, m: m1, samples, worst });
    for j in 0..m - 1 {
        let alpha = alphas[j + 1];
        let dj = delta[j];
        let r = scan_threshold(
            config.cap,
            |n| Ok(kernel_integral_spectral(&CesaroKernel::new(n, alpha)?, 0.0, dj)),
            |v| v - KERNEL_MASS,
        )?;
        let (mj, samples, worst) = r.ok_or_else(|| {
            Error::threshold(
                format!("M_s{}", j + 2),
                format!("stage {s}: kernel mass on (0, {dj}) stays below 5/12 up to the cap"),
            )
        })?;
        thresholds.push(Threshold { axis: j + 1, m: mj, samples, worst });
    }

    let n_thr = thresholds.iter().map(|t| t.m + 1).max().unwrap_or(0);
    let n = n_growth.max(n_thr).max(last.n + 1);
    if n > config.cap {
        return Err(Error::threshold(
            "M_sj",
            format!("stage {s}: N_s = {n} exceeds the cap {}", config.cap),
        ));
    }
    let (a, b) = stage_window(n, alphas[0])?;

    // tents: shrink from (δ/4, δ/2) toward (d*/64, d*), d* the first kernel zero
    let mut c = Vec::with_capacity(m - 1);
    let mut d = Vec::with_capacity(m - 1);
    let mut retries = 0;
    for j in 0..m - 1 {
        let kernel = CesaroKernel::new(n, alphas[j + 1])?;
        let target_d = first_kernel_zero(&kernel);
        let target_c = target_d / 64.0;
        let (c0, d0) = (0.25 * delta[j], 0.5 * delta[j]);
        let mut accepted = None;
        for r in 0..=TENT_RETRIES {
            let th = r as f64 / TENT_RETRIES as f64;
            let cj = c0.powf(1.0 - th) * target_c.powf(th);
            let dj = d0.powf(1.0 - th) * target_d.powf(th);
            if !(cj > 0.0 && cj < dj && dj < delta[j]) {
                continue;
            }
            // closed forms here; the accepted tent is certified by quadrature below
            let mass = kernel_integral_spectral(&kernel, cj, dj);
            let mean = spectral_mean_at_origin(&tent(cj, dj)?, n, alphas[j + 1]);
            if mass > WINDOW_MASS && mean > TENT_MEAN {
                accepted = Some((cj, dj, r));
                break;
            }
        }
        let (cj, dj, r) = accepted.ok_or_else(|| {
            Error::threshold(
                "bigh",
                format!("stage {s}, axis {}: no tent reached mean > 1/4 in {TENT_RETRIES} retries", j + 2),
            )
        })?;
        retries = retries.max(r);
        c.push(cj);
        d.push(dj);
    }

    let mut stage = StageParams {
        k: s,
        n,
        nu: alphas.iter().map(|&al| n as f64 + 0.5 * (1.0 + al)).collect(),
        a,
        b,
        c,
        d,
        delta,
        thresholds,
        growth: Some(((n as f64 / last.n as f64).powf(alphas[0]), limit)),
        tent_retries: retries,
        certificates: Vec::new(),
    };
    stage.certificates = certify_stage(&stage, alphas, config.tol)?;
    if let Some(bad) = stage.certificates.iter().find(|c| c.required && !c.holds) {
        return Err(Error::threshold(bad.name.clone(), format!("value {}", bad.value)));
    }
    Ok(stage)
}

/// First positive zero of the kernel, located on a fine scan and bisected.
fn first_kernel_zero(kernel: &CesaroKernel) -> f64 {
    let n = kernel.n() as f64;
    let step = 0.05 / n;
    let mut lo = step;
    let mut flo = kernel.eval(lo);
    let mut i = 2;
    while (i as f64) * step < PI.min(40.0 / n) {
        let t = i as f64 * step;
        let ft = kernel.eval(t);
        if ft.signum() != flo.signum() {
            let mut hi = t;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if kernel.eval(mid).signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        lo = t;
        flo = ft;
        i += 1;
    }
    2.0 / n
}

/// Kernel mass on `(0, δ)`, window mass on `(c, d)` and tent mean, per axis.
pub fn certify_stage(st: &StageParams, alphas: &[f64], tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for j in 0..st.c.len() {
        let kernel = CesaroKernel::new(st.n, alphas[j + 1])?;
        let ax = j + 2;
        let mass = kernel_integral_refined(&kernel, 0.0, st.delta[j], tol)?;
        out.push(Check::new(
            format!("stage {} axis {ax}: (1/pi) int_0^delta K_N", st.k),
            mass,
            Some(kernel_integral_spectral(&kernel, 0.0, st.delta[j])),
            Relation::Greater,
            KERNEL_MASS,
        ));
        let window = kernel_integral_refined(&kernel, st.c[j], st.d[j], tol)?;
        out.push(Check::new(
            format!("stage {} axis {ax}: (1/pi) int_c^d K_N", st.k),
            window,
            Some(kernel_integral_spectral(&kernel, st.c[j], st.d[j])),
            Relation::Greater,
            WINDOW_MASS,
        )
        .optional(st.k > 1));
        let h = tent(st.c[j], st.d[j])?;
        let mean = mean_by_kernel(&h, &kernel, 0.0, tol)?;
        out.push(Check::new(
            format!("stage {} axis {ax}: sigma_N(h, 0)", st.k),
            mean,
            Some(spectral_mean_at_origin(&h, st.n, alphas[j + 1])),
            Relation::Greater,
            TENT_MEAN,
        )
        .optional(st.k > 1));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// assembly and verification

/// `Σ_k f_k(x^1) Π_j h_k^j(x^j)` over the built stages.
#[derive(Debug, Clone)]
pub struct Diagonal {
    m: usize,
    pieces: Vec<(WindowedSine, Vec<Tent>)>,
}

impl Diagonal {
    pub fn pieces(&self) -> &[(WindowedSine, Vec<Tent>)] {
        &self.pieces
    }
}

impl MultiFunction for Diagonal {
    fn dim(&self) -> usize {
        self.m
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|(f, tents)| {
                let mut v = f.eval(x[0]);
                for (j, t) in tents.iter().enumerate() {
                    if v == 0.0 {
                        break;
                    }
                    v *= t.eval(x[j + 1]);
                }
                v
            })
            .sum()
    }
}

/// The partial sum `Σ_{k ≤ depth} ψ_k`.
pub fn assemble(spec: &DiagonalSpec, depth: usize) -> Result<Diagonal> {
    if depth == 0 || depth > spec.stages.len() {
        return Err(Error::domain("depth exceeds the built stages"));
    }
    let seqs = spec.order.betas()[1..]
        .iter()
        .map(|&b| LambdaSeq::power(b))
        .collect::<Result<Vec<_>>>()?;
    if !check_ladiv(&seqs).convergent {
        return Err(Error::domain("the weight sequences of axes 2..m violate the summability condition"));
    }
    spec.check_invariants()?;
    let pieces = (1..=depth).map(|k| spec.pieces(k)).collect::<Result<Vec<_>>>()?;
    Ok(Diagonal { m: spec.m(), pieces })
}

/// `max |f|` over a uniform `points^m` grid of `[-1, 1]^m`.
pub fn max_abs_on_cube(f: &dyn MultiFunction, points: usize) -> f64 {
    let m = f.dim();
    let total = points.pow(m as u32);
    let mut x = vec![0.0; m];
    let mut worst: f64 = 0.0;
    for flat in 0..total {
        let mut r = flat;
        for xj in x.iter_mut() {
            *xj = -1.0 + 2.0 * (r % points) as f64 / (points - 1) as f64;
            r /= points;
        }
        worst = worst.max(f.eval(&x).abs());
    }
    worst
}

/// Certified means of stage `k`'s pieces at `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceMeans {
    pub k: usize,
    pub f: Check,
    pub tents: Vec<Check>,
    /// `σ(f_k) Π σ(h_k^j)`.
    pub psi: f64,
    pub psi_spectral: f64,
}

/// Tent checks of stage 1 are informational: its tents are fixed, not searched.
fn piece_means(spec: &DiagonalSpec, k: usize, n: usize, tol: f64) -> Result<PieceMeans> {
    let alphas = spec.order.alphas();
    let (f, tents) = spec.pieces(k)?;
    let k1 = CesaroKernel::new(n, alphas[0])?;
    let fm = mean_by_kernel(&f, &k1, 0.0, tol)?;
    let fs = spectral_mean_at_origin(&f, n, alphas[0]);
    let fcheck = Check::new(
        format!("sigma_{n}(f_{k}, 0)"),
        fm,
        Some(fs),
        Relation::Greater,
        4f64.powi(spec.m() as i32) * spec.rho / 2.0,
    );
    let mut psi = fm.value;
    let mut psi_spectral = fs;
    let mut tchecks = Vec::new();
    for (j, t) in tents.iter().enumerate() {
        let kj = CesaroKernel::new(n, alphas[j + 1])?;
        let tm = mean_by_kernel(t, &kj, 0.0, tol)?;
        let ts = spectral_mean_at_origin(t, n, alphas[j + 1]);
        psi *= tm.value;
        psi_spectral *= ts;
        tchecks.push(Check::new(
            format!("sigma_{n}(h_{k}^{}, 0)", j + 2),
            tm,
            Some(ts),
            Relation::Greater,
            TENT_MEAN,
        )
        .optional(k > 1));
    }
    Ok(PieceMeans {
        k,
        f: fcheck,
        tents: tchecks,
        psi,
        psi_spectral,
    })
}

/// Everything the final chain of inequalities needs at `N_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub s: usize,
    pub n: usize,
    pub depth: usize,
    pub rho: f64,
    /// Stage `s` itself: `σ(f_s) > 4^m ρ/2` and tents `> 1/4`.
    pub own: PieceMeans,
    /// `|σ(ψ_s, 0)| > ρ`.
    pub psi: Check,
    /// Earlier stages and `|σ(g_s, 0)| < ρ/4`.
    pub earlier: Vec<PieceMeans>,
    pub g: Check,
    /// Later built stages: `|σ(ψ_k, 0)| ≤ (ρ/8)(1/2)^{(m-1)(k-s-1)}` and
    /// the far-tent bound `|σ(h_k^j, 0)| ≤ (2/π) N_s δ_k^j`.
    pub later: Vec<PieceMeans>,
    pub tail_checks: Vec<Check>,
    /// `Σ_{k > depth} (ρ/8)(1/2)^{(m-1)(k-s-1)}`.
    pub allowance: f64,
    /// `|σ_{N_s}(Σ_{k ≤ depth} ψ_k, 0)| ≥ ρ/2 - allowance`.
    pub total: Check,
}

impl StageReport {
    pub fn checks(&self) -> Vec<&Check> {
        let mut v: Vec<&Check> = vec![&self.own.f];
        v.extend(self.own.tents.iter());
        v.push(&self.psi);
        v.push(&self.g);
        v.extend(self.tail_checks.iter());
        v.push(&self.total);
        v
    }

    /// Whether the whole chain closes at this stage.
    pub fn closes(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks().into_iter().find(|c| c.required && !c.holds)
    }
}

fn product_check(name: String, parts: &[&PieceMeans], relation: Relation, threshold: f64) -> Check {
    let value: f64 = parts.iter().map(|p| p.psi).sum();
    let spectral: f64 = parts.iter().map(|p| p.psi_spectral).sum();
    // the coarse value of a product of refined factors
    let coarse: f64 = parts
        .iter()
        .map(|p| p.f.coarse * p.tents.iter().map(|t| t.coarse).product::<f64>())
        .sum();
    Check {
        holds: relation.holds(value.abs(), threshold),
        name,
        value: value.abs(),
        coarse: coarse.abs(),
        spectral: Some(spectral.abs()),
        threshold,
        relation,
        required: true,
    }
}

/// Recomputes the chain at `N_s` using all built stages.
pub fn verify_stage(spec: &DiagonalSpec, s: usize, tol: f64) -> Result<StageReport> {
    let depth = spec.stages.len();
    if s == 0 || s > depth {
        return Err(Error::domain("stage index out of range"));
    }
    let m = spec.m();
    let rho = spec.rho;
    let n = spec.stages[s - 1].n;
    let own = piece_means(spec, s, n, tol)?;
    let psi = product_check(format!("|sigma_{n}(psi_{s}, 0)|"), &[&own], Relation::Greater, rho);
    let earlier = (1..s).map(|k| piece_means(spec, k, n, tol)).collect::<Result<Vec<_>>>()?;
    let g = product_check(
        format!("|sigma_{n}(g_{s}, 0)|"),
        &earlier.iter().collect::<Vec<_>>(),
        Relation::Less,
        rho / 4.0,
    );
    let later = (s + 1..=depth).map(|k| piece_means(spec, k, n, tol)).collect::<Result<Vec<_>>>()?;
    let ratio = 0.5f64.powi(m as i32 - 1);
    let mut tail_checks = Vec::new();
    for p in &later {
        let k = p.k;
        tail_checks.push(product_check(
            format!("|sigma_{n}(psi_{k}, 0)|"),
            &[p],
            Relation::AtMost,
            rho / 8.0 * ratio.powi((k - s - 1) as i32),
        ));
        for (j, t) in p.tents.iter().enumerate() {
            let bound = 2.0 / PI * n as f64 * spec.stages[k - 1].delta[j];
            tail_checks.push(Check::exact(
                format!("|sigma_{n}(h_{k}^{}, 0)|", j + 2),
                t.value.abs(),
                Relation::AtMost,
                bound,
            ));
        }
    }
    let allowance = rho / 8.0 * ratio.powi((depth - s) as i32) / (1.0 - ratio);
    let all: Vec<&PieceMeans> = earlier.iter().chain(core::iter::once(&own)).chain(later.iter()).collect();
    let total = product_check(
        format!("|sigma_{n}(f, 0)|"),
        &all,
        Relation::AtLeast,
        rho / 2.0 - allowance,
    );
    Ok(StageReport {
        s,
        n,
        depth,
        rho,
        own,
        psi,
        earlier,
        g,
        later,
        tail_checks,
        allowance,
        total,
    })
}

/// `ρ` recomputed by quadrature of `t^{-β_1}` on `[1, 3]`.
pub fn rho_by_quadrature(beta1: f64, m: usize) -> Result<f64> {
    let breaks: Vec<f64> = (0..=16).map(|i| 1.0 + i as f64 / 8.0).collect();
    let r = integrate_refined(|t| t.powf(-beta1), &breaks, 1e-14, 3)?;
    Ok(r.value / (2.0 * PI * 4f64.powi(m as i32)))
}
