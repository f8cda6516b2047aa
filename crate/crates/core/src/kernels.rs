//! Dirichlet and Cesàro kernels.
//!
//! `K_n^α(t) = (1/A_n^α) Σ_{k=0}^n A_{n-k}^{α-1} D_k(t)` is a cosine
//! polynomial of degree `n`. For `t ∈ (0, π]` it splits as
//!
//! ```text
//! K_n^α(t) = sin((n + 1/2 + α/2) t - πα/2) / (A_n^α (2 sin(t/2))^{α+1}) + R_n^α(t)
//! ```
//!
//! and the remainder is the imaginary part of a tail of the binomial series
//! of `(1 - e^{-it})^{-α}`. Repeated summation by parts turns that tail into
//! a rapidly convergent expansion in powers of `1 / (n · 2 sin(t/2))`, which
//! gives an O(1) evaluator away from the origin. Near the origin the kernel
//! is summed directly.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math wins when a dependency links std
use num_traits::Float;

use crate::quadrature::{graded_breaks, integrate_refined, Refined};
use crate::sequences::{cesaro_number, cesaro_numbers};
use crate::{Error, Result};

const TAYLOR_CUTOFF: f64 = 1e-12;
const MAX_TAIL_TERMS: usize = 12;
const TAIL_TOLERANCE: f64 = 1e-13;

/// Dirichlet kernel `D_k(t) = sin((k + 1/2) t) / (2 sin(t/2))`, `D_k(0) = k + 1/2`.
pub fn dirichlet(k: usize, t: f64) -> f64 {
    let kf = k as f64;
    if t.abs() < TAYLOR_CUTOFF {
        // D_k(t) = 1/2 + Σ_{j≤k} cos(jt) expanded to fourth order.
        let s2 = kf * (kf + 1.0) * (2.0 * kf + 1.0) / 6.0;
        let s4 = s2 * (3.0 * kf * kf + 3.0 * kf - 1.0) / 5.0;
        let t2 = t * t;
        return kf + 0.5 - 0.5 * t2 * s2 + t2 * t2 * s4 / 24.0;
    }
    ((kf + 0.5) * t).sin() / (2.0 * (0.5 * t).sin())
}

/// One evaluation of a Cesàro kernel with its main-term split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub n: usize,
    pub alpha: f64,
    pub t: f64,
    pub value: f64,
    /// `K_n^{α,*}(t)`; absent at `t = 0` where it is singular.
    pub main_term: Option<f64>,
    pub remainder: Option<f64>,
}

/// Precomputed tables for evaluating `K_n^α` at many points.
#[derive(Debug, Clone)]
pub struct CesaroKernel {
    n: usize,
    alpha: f64,
    a_n: f64,
    /// `A_j^{α-1}`, `j = 0..=n`.
    lower: Vec<f64>,
    /// `A_{n+1+i}^{α-1-i}`: coefficients of the summation-by-parts expansion.
    tail: [f64; MAX_TAIL_TERMS],
    /// Bound factors for truncating that expansion after `p` terms.
    tail_bound: [f64; MAX_TAIL_TERMS + 1],
}

impl CesaroKernel {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("kernel degree must be at least 1"));
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::domain("Cesaro order must exceed -1"));
        }
        let lower = cesaro_numbers(alpha - 1.0, n);
        let a_n = cesaro_number(alpha, n);
        let gamma = alpha - 1.0;
        let mut tail = [0.0; MAX_TAIL_TERMS];
        let mut tail_bound = [0.0; MAX_TAIL_TERMS + 1];
        for (i, c) in tail.iter_mut().enumerate() {
            *c = cesaro_number(gamma - i as f64, n + 1 + i);
        }
        for (p, b) in tail_bound.iter_mut().enumerate() {
            let m = n + p + 1;
            // Σ_{j≥m} |A_j^{γ-p}| ≈ m |A_m^{γ-p}| / (p - α), coefficients ~ j^{α-1-p}
            let decay = p as f64 - alpha;
            *b = if decay < 0.25 {
                f64::INFINITY
            } else {
                1.5 * cesaro_number(gamma - p as f64, m).abs() * m as f64 / decay
            };
        }
        Ok(CesaroKernel {
            n,
            alpha,
            a_n,
            lower,
            tail,
            tail_bound,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `A_n^α`.
    pub fn normalizer(&self) -> f64 {
        self.a_n
    }

    /// Direct ascending-`k` summation of the defining formula.
    pub fn eval_direct(&self, t: f64) -> f64 {
        let t = t.abs();
        let n = self.n;
        if t < TAYLOR_CUTOFF {
            let mut s = 0.0;
            for k in 0..=n {
                s += self.lower[n - k] * dirichlet(k, t);
            }
            return s / self.a_n;
        }
        // rotate (cos, sin) of (k + 1/2)t by t, re-seeding every block
        const BLOCK: usize = 256;
        let (st, ct) = t.sin_cos();
        let mut s = 0.0;
        let mut k = 0;
        while k <= n {
            let (mut sk, mut ck) = ((k as f64 + 0.5) * t).sin_cos();
            for kk in k..(k + BLOCK).min(n + 1) {
                s += self.lower[n - kk] * sk;
                let next = sk * ct + ck * st;
                ck = ck * ct - sk * st;
                sk = next;
            }
            k += BLOCK;
        }
        s / (self.a_n * 2.0 * (0.5 * t).sin())
    }

    /// Main term `K_n^{α,*}(t)` for `t ≠ 0`.
    pub fn main_term(&self, t: f64) -> Option<f64> {
        let t = t.abs();
        if t < TAYLOR_CUTOFF {
            return None;
        }
        let s = 2.0 * (0.5 * t).sin();
        let phase = (self.n as f64 + 0.5 + 0.5 * self.alpha) * t - 0.5 * PI * self.alpha;
        Some(phase.sin() / (self.a_n * s.powf(self.alpha + 1.0)))
    }

    /// Remainder `R_n^α(t)` from the expansion of the binomial tail, when
    /// the expansion is accurate to about `1e-13 / A_n^α` at `t`.
    pub fn remainder_expansion(&self, t: f64) -> Option<f64> {
        let t = t.abs();
        if t < TAYLOR_CUTOFF {
            return None;
        }
        let s = 2.0 * (0.5 * t).sin();
        let scale = 1.0 / (s * self.a_n);
        let mut inv_pow = 1.0;
        let mut sum = 0.0;
        for p in 0..=MAX_TAIL_TERMS {
            // inv_pow = s^{-p}; truncating after p terms
            if self.tail_bound[p] * inv_pow * scale < TAIL_TOLERANCE * (1.0 + 1.0 / self.a_n) {
                return Some(-scale * sum);
            }
            if p == MAX_TAIL_TERMS {
                break;
            }
            inv_pow /= s;
            let i = p as f64;
            let phase = -(i + 0.5) * t - (i + 1.0) * 0.5 * (PI - t);
            sum += self.tail[p] * phase.sin() * inv_pow;
        }
        None
    }

    /// `K_n^α(t)`: expansion route where it is accurate, direct sum otherwise.
    pub fn eval(&self, t: f64) -> f64 {
        match (self.main_term(t), self.remainder_expansion(t)) {
            (Some(m), Some(r)) => m + r,
            _ => self.eval_direct(t),
        }
    }

    pub fn evaluate(&self, t: f64) -> KernelEval {
        let value = self.eval(t);
        let main_term = self.main_term(t);
        KernelEval {
            n: self.n,
            alpha: self.alpha,
            t,
            value,
            main_term,
            remainder: main_term.map(|m| value - m),
        }
    }

    /// Coefficients `c_l` of `K_n^α(t) = Σ_l c_l cos(lt)`: `c_0 = 1/2`,
    /// `c_l = A_{n-l}^α / A_n^α`.
    pub fn cosine_coefficients(&self) -> Vec<f64> {
        let upper = cesaro_numbers(self.alpha, self.n);
        let mut c: Vec<f64> = (0..=self.n).map(|l| upper[self.n - l] / self.a_n).collect();
        c[0] = 0.5;
        c
    }
}

pub fn cesaro_kernel(n: usize, alpha: f64, t: f64) -> Result<KernelEval> {
    Ok(CesaroKernel::new(n, alpha)?.evaluate(t))
}

/// Sample grid for estimating `B(α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BGrid {
    pub ns: Vec<usize>,
    /// Log-spaced samples of `t` in `[1/(4n), π]` for each `n`.
    pub t_samples: usize,
}

impl Default for BGrid {
    /// `n = 16 · 2^{i/2}` up to 1024, 2048 samples of `t` each.
    fn default() -> Self {
        let ns = (0..=12)
            .map(|i| (16.0 * 2f64.powf(i as f64 / 2.0)).round() as usize)
            .collect();
        BGrid {
            ns,
            t_samples: 2048,
        }
    }
}

/// Empirical constant in `|K_n^α(t)| ≤ B(α) n^{-α} |t|^{-(α+1)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalB {
    pub alpha: f64,
    pub b_hat: f64,
    /// Largest sampled `|K_n^α(t)| n^α |t|^{α+1}`.
    pub sampled_max: f64,
    pub safety_factor: f64,
    pub argmax: (usize, f64),
    pub grid: BGrid,
}

pub const B_SAFETY_FACTOR: f64 = 2.0;

pub fn estimate_b(alpha: f64, grid: &BGrid) -> Result<EmpiricalB> {
    if !(alpha > -1.0 && alpha <= 0.0) {
        return Err(Error::domain("B(alpha) is estimated for alpha in (-1, 0]"));
    }
    if grid.ns.is_empty() || grid.t_samples == 0 {
        return Err(Error::domain("empty sample grid"));
    }
    if grid.ns.iter().any(|&n| n < 10) {
        return Err(Error::domain("B(alpha) sampling needs n >= 10"));
    }
    let mut best = (0.0, (grid.ns[0], PI));
    for &n in &grid.ns {
        let kernel = CesaroKernel::new(n, alpha)?;
        let t0 = 1.0 / (4.0 * n as f64);
        let ratio = (PI / t0).ln();
        let count = grid.t_samples;
        for i in 0..count {
            let t = if count == 1 {
                t0
            } else {
                t0 * (ratio * i as f64 / (count - 1) as f64).exp()
            };
            let q = kernel.eval(t).abs() * (n as f64).powf(alpha) * t.powf(alpha + 1.0);
            if q > best.0 {
                best = (q, (n, t));
            }
        }
    }
    Ok(EmpiricalB {
        alpha,
        b_hat: B_SAFETY_FACTOR * best.0,
        sampled_max: best.0,
        safety_factor: B_SAFETY_FACTOR,
        argmax: best.1,
        grid: grid.clone(),
    })
}

fn check_integral_args(a: f64, b: f64, tol: f64) -> Result<()> {
    if !(a >= -PI && a < b && b <= PI) {
        return Err(Error::domain("kernel integral needs -pi <= a < b <= pi"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    Ok(())
}

/// `(1/π) ∫_a^b K_n^α(t) dt` by graded Gauss–Legendre panels, with the
/// coarse (original step) value kept for consistency checks.
pub fn kernel_integral_refined(kernel: &CesaroKernel, a: f64, b: f64, tol: f64) -> Result<Refined> {
    check_integral_args(a, b, tol)?;
    let n = kernel.n() as f64;
    let breaks = graded_breaks(a, b, 1.0 / (8.0 * n), 1.0 / (n + 1.0), &[]);
    let r = integrate_refined(|t| kernel.eval(t) / PI, &breaks, tol, 3)?;
    Ok(r)
}

pub fn kernel_integral(n: usize, alpha: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let kernel = CesaroKernel::new(n, alpha)?;
    Ok(kernel_integral_refined(&kernel, a, b, tol)?.value)
}

/// Closed form of `(1/π) ∫_a^b K_n^α(t) dt` from the cosine coefficients.
pub fn kernel_integral_spectral(kernel: &CesaroKernel, a: f64, b: f64) -> f64 {
    let c = kernel.cosine_coefficients();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.5 * (b - a);
    for (l, cl) in c.iter().enumerate().skip(1) {
        let lf = l as f64;
        s += cl * 2.0 * (lf * mid).cos() * (lf * half).sin() / lf;
    }
    s / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet(3, 0.0), 3.5);
        assert!((dirichlet(0, PI / 2.0) - 0.5).abs() < 1e-15);
        let cosine_sum = 0.5 + 1f64.cos() + 2f64.cos();
        assert!((dirichlet(2, 1.0) - cosine_sum).abs() < 1e-14);
        assert!((dirichlet(2, 1.0) - 2.5f64.sin() / (2.0 * 0.5f64.sin())).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_taylor_branch_matches_sum() {
        let t = 5e-13;
        let direct: f64 = 0.5 + (1..=40).map(|j| (j as f64 * t).cos()).sum::<f64>();
        assert!((dirichlet(40, t) - direct).abs() < 1e-12);
        assert!((dirichlet(40, t) - dirichlet(40, 1.1e-12)).abs() < 1e-9);
    }

    #[test]
    fn order_zero_kernel_is_dirichlet() {
        let k = CesaroKernel::new(8, 0.0).unwrap();
        for &t in &[0.0, 0.7, -1.3, 3.0] {
            assert!((k.eval_direct(t) - dirichlet(8, t)).abs() < 1e-13);
            assert!((k.eval(t) - dirichlet(8, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_is_even() {
        for &alpha in &[-0.9, -0.3, 0.0, 1.0] {
            let k = CesaroKernel::new(37, alpha).unwrap();
            for &t in &[1e-3, 0.4, 2.9] {
                assert_eq!(k.eval(t), k.eval(-t));
                assert_eq!(k.eval_direct(t), k.eval_direct(-t));
            }
        }
    }

    #[test]
    fn remainder_example_bound() {
        let e = cesaro_kernel(16, -0.5, 0.3).unwrap();
        let bound = 2.0 * 0.5 / (16.0 * (2.0 * 0.15f64.sin()).powi(2));
        assert!(e.remainder.unwrap().abs() <= bound);
        let direct = CesaroKernel::new(16, -0.5).unwrap().eval_direct(0.3);
        assert!((e.value - direct).abs() < 1e-12);
    }

    #[test]
    fn expansion_agrees_with_direct_sum() {
        for &alpha in &[-0.9, -0.5, -0.3, -0.1, 0.0, 0.5, 1.0] {
            for &n in &[10usize, 64, 333, 2048] {
                let k = CesaroKernel::new(n, alpha).unwrap();
                let mut used = 0;
                for i in 1..=400 {
                    let t = PI * i as f64 / 400.0;
                    if let (Some(m), Some(r)) = (k.main_term(t), k.remainder_expansion(t)) {
                        used += 1;
                        let d = k.eval_direct(t);
                        assert!(
                            // direct summation loses about n·ε/A_n
                            (m + r - d).abs() < 1e-11 + 1e-14 * n as f64 / k.normalizer(),
                            "n={n} α={alpha} t={t}: {} vs {d}",
                            m + r
                        );
                    }
                }
                if n >= 64 {
                    assert!(used > 300, "expansion rarely usable: n={n} α={alpha}");
                }
            }
        }
    }

    #[test]
    fn value_at_origin_is_sum_of_cosine_coefficients() {
        // K_n^α(0) = n/(α+1) + 1/2, which exceeds n + 1 once α < 0.
        for &alpha in &[-0.9, -0.5, -0.1, 0.0, 1.0] {
            for &n in &[1usize, 5, 50, 400] {
                let k = CesaroKernel::new(n, alpha).unwrap();
                let expected = n as f64 / (alpha + 1.0) + 0.5;
                assert!((k.eval(0.0) - expected).abs() < 1e-9 * expected);
            }
        }
    }

    #[test]
    fn kernel_peaks_at_origin() {
        for &alpha in &[-0.9, -0.5, -0.1, 0.0] {
            for &n in &[1usize, 5, 50] {
                let k = CesaroKernel::new(n, alpha).unwrap();
                let peak = k.eval(0.0);
                for i in 1..=200 {
                    let t = PI * i as f64 / 200.0;
                    assert!(k.eval(t).abs() <= peak + 1e-12);
                }
                if alpha == 0.0 {
                    assert!(peak <= n as f64 + 1.0);
                }
            }
        }
    }

    #[test]
    fn fejer_kernel_nonnegative() {
        for &n in &[1usize, 7, 64] {
            let k = CesaroKernel::new(n, 1.0).unwrap();
            for i in 0..=500 {
                assert!(k.eval(PI * i as f64 / 500.0) >= -1e-12);
            }
        }
    }

    #[test]
    fn cosine_form_matches_dirichlet_form() {
        let k = CesaroKernel::new(20, -0.4).unwrap();
        let c = k.cosine_coefficients();
        for &t in &[0.0, 0.2, 1.7] {
            let s: f64 = c.iter().enumerate().map(|(l, cl)| cl * (l as f64 * t).cos()).sum();
            assert!((s - k.eval_direct(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn normalization_examples() {
        let full = kernel_integral(64, -0.5, -PI, PI, 1e-8).unwrap();
        assert!((full - 1.0).abs() < 1e-6);
        let half = kernel_integral(64, -0.5, 0.0, PI, 1e-8).unwrap();
        assert!((half - 0.5).abs() < 1e-6);
        assert!((kernel_integral(10, 0.0, -PI, PI, 1e-10).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_integral_matches_quadrature() {
        let k = CesaroKernel::new(300, -0.3).unwrap();
        for &(a, b) in &[(0.0, 0.025), (0.001, 0.01), (0.25, 0.5), (-PI, PI)] {
            let q = kernel_integral_refined(&k, a, b, 1e-10).unwrap().value;
            assert!((q - kernel_integral_spectral(&k, a, b)).abs() < 1e-9, "({a},{b})");
        }
    }

    #[test]
    fn kernel_integral_rejects_bad_ranges() {
        assert!(kernel_integral(8, -0.5, 1.0, 0.5, 1e-8).is_err());
        assert!(kernel_integral(8, -0.5, -4.0, 0.5, 1e-8).is_err());
        assert!(kernel_integral(8, -0.5, 0.0, 0.5, 0.0).is_err());
        assert!(kernel_integral(8, -1.5, 0.0, 0.5, 1e-8).is_err());
    }

    #[test]
    fn b_estimate_is_finite_and_bounds_samples() {
        let grid = BGrid {
            ns: alloc::vec![16, 32, 64],
            t_samples: 256,
        };
        let est = estimate_b(-0.5, &grid).unwrap();
        assert!(est.b_hat.is_finite() && est.b_hat > 0.0);
        assert_eq!(est.b_hat, 2.0 * est.sampled_max);
        let zero = estimate_b(0.0, &grid).unwrap();
        assert!(zero.b_hat.is_finite());
        let denser = BGrid {
            ns: grid.ns.clone(),
            t_samples: 511,
        };
        // Every 2nd point of 511 log-spaced samples is one of the 256.
        assert!(estimate_b(-0.5, &denser).unwrap().sampled_max >= est.sampled_max * (1.0 - 1e-12));
        assert!(estimate_b(-0.5, &BGrid { ns: alloc::vec![], t_samples: 4 }).is_err());
        assert!(estimate_b(-0.5, &BGrid { ns: alloc::vec![4], t_samples: 4 }).is_err());
    }
}
