//! Cesàro means of one- and multidimensional Fourier series.
//!
//! Two independent routes compute the same numbers:
//!
//! * weighted partial sums, `σ_n^α = Σ_k (A_{n-k}^{α-1} / A_n^α) S_k`, from
//!   Fourier coefficients ([`cesaro_mean_1d`], [`cesaro_mean_multi`]);
//! * kernel quadrature, `σ_n^α(f, x) = (1/π) ∫ f(x+t) K_n^α(t) dt`
//!   ([`mean_by_kernel`]).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math wins when a dependency links std
use num_traits::Float;

use crate::function::{wrap, MultiFunction, RealFunction, SeparableSum, TrigPolynomial};
use crate::kernels::CesaroKernel;
use crate::quadrature::{gl10_rule, graded_breaks, halve, integrate_panels, integrate_refined, Refined};
use crate::sequences::{cesaro_number, cesaro_numbers, CesaroOrder, LambdaSeq};
use crate::{Error, Result};

/// `σ_n^α = Σ_{k=0}^n (A_{n-k}^α / A_n^α) u_k`.
pub fn cesaro_mean_series(u: &[f64], n: usize, alpha: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::domain("Cesaro order must exceed -1"));
    }
    if u.len() <= n {
        return Err(Error::domain("series has fewer than n + 1 terms"));
    }
    let a = cesaro_numbers(alpha, n);
    Ok((0..=n).map(|k| a[n - k] / a[n] * u[k]).sum())
}

/// Partial-sum weights `A_{n-k}^{α-1} / A_n^α`, `k = 0..=n`.
pub fn partial_sum_weights(n: usize, alpha: f64) -> Vec<f64> {
    let lower = cesaro_numbers(alpha - 1.0, n);
    let a_n = cesaro_number(alpha, n);
    (0..=n).map(|k| lower[n - k] / a_n).collect()
}

/// Complex Fourier coefficients `c_l`, `|l_j| ≤ n_max[j]`, of a function on `T^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierData {
    n_max: Vec<usize>,
    coeffs: Vec<Complex64>,
    /// Coefficients outside the box are known to vanish.
    complete: bool,
}

/// How coefficients of a one-variable handle were obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientReport {
    /// Difference from the same rule at half resolution.
    pub error_estimate: f64,
    pub nodes: usize,
}

const TRAPEZOID_POINTS: usize = 1 << 13;

impl FourierData {
    pub fn new(n_max: Vec<usize>, coeffs: Vec<Complex64>) -> Result<Self> {
        let len: usize = n_max.iter().map(|n| 2 * n + 1).product();
        if n_max.is_empty() || coeffs.len() != len {
            return Err(Error::domain("coefficient array does not match its index box"));
        }
        Ok(FourierData {
            n_max,
            coeffs,
            complete: false,
        })
    }

    /// Declares every coefficient outside the stored box zero, so partial
    /// sums of any order are available.
    pub fn complete(mut self) -> Self {
        self.complete = true;
        self
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn dim(&self) -> usize {
        self.n_max.len()
    }

    pub fn n_max(&self) -> &[usize] {
        &self.n_max
    }

    fn offset(&self, l: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for (lj, &nj) in l.iter().zip(&self.n_max) {
            if lj.unsigned_abs() as usize > nj {
                return None;
            }
            idx = idx * (2 * nj + 1) + (lj + nj as i64) as usize;
        }
        Some(idx)
    }

    /// `c_l`; zero outside the stored box.
    pub fn coeff(&self, l: &[i64]) -> Complex64 {
        self.offset(l).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Exact coefficients of a trigonometric polynomial.
    pub fn from_trig_polynomial(p: &TrigPolynomial) -> Self {
        let d = p.degree();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * d + 1];
        for l in 0..=d {
            let a = p.cos.get(l).copied().unwrap_or(0.0);
            let b = if l == 0 {
                0.0
            } else {
                p.sin.get(l - 1).copied().unwrap_or(0.0)
            };
            let c = if l == 0 {
                Complex64::new(0.5 * a, 0.0)
            } else {
                Complex64::new(0.5 * a, -0.5 * b)
            };
            coeffs[d + l] = c;
            coeffs[d - l] = c.conj();
        }
        FourierData {
            n_max: vec![d],
            coeffs,
            complete: true,
        }
    }

    /// Real series `a_0/2 + Σ (a_l cos lx + b_l sin lx)`.
    pub fn from_real_series(cos: &[f64], sin: &[f64]) -> Self {
        Self::from_trig_polynomial(&TrigPolynomial::new(cos.to_vec(), sin.to_vec()))
    }

    /// Coefficients up to `n_max` of a handle on `T`: per-piece
    /// Gauss–Legendre panels when breakpoints are declared, otherwise the
    /// trapezoidal rule on 2^13 points. Both are checked against the same
    /// rule at half resolution.
    pub fn from_function(f: &dyn RealFunction, n_max: usize) -> Result<(Self, CoefficientReport)> {
        let breaks = f.breakpoints();
        let (fine, coarse, nodes) = if breaks.is_empty() {
            let fine = trapezoid_coefficients(f, n_max, TRAPEZOID_POINTS);
            let coarse = trapezoid_coefficients(f, n_max, TRAPEZOID_POINTS / 2);
            (fine, coarse, TRAPEZOID_POINTS)
        } else {
            let mut pts: Vec<f64> = breaks.iter().map(|&b| wrap(b)).collect();
            pts.push(-PI);
            pts.push(PI);
            pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
            pts.dedup();
            let width = 1.0 / (n_max as f64 + 1.0);
            let mut panels = Vec::new();
            for w in pts.windows(2) {
                let pieces = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
                for i in 0..pieces {
                    panels.push(w[0] + (w[1] - w[0]) * i as f64 / pieces as f64);
                }
            }
            panels.push(PI);
            let coarse = panel_coefficients(f, n_max, &panels);
            let finer = halve(&panels);
            let fine = panel_coefficients(f, n_max, &finer);
            (fine, coarse, 10 * (finer.len() - 1))
        };
        let error_estimate = fine
            .iter()
            .zip(&coarse)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        for (l, c) in fine.into_iter().enumerate() {
            coeffs[n_max + l] = c;
            coeffs[n_max - l] = c.conj();
        }
        Ok((
            FourierData {
                n_max: vec![n_max],
                coeffs,
                complete: false,
            },
            CoefficientReport {
                error_estimate,
                nodes,
            },
        ))
    }

    /// Coefficients of a function on `T^m` by the tensor trapezoidal rule
    /// with `points` nodes per axis.
    pub fn from_multi_function(f: &dyn MultiFunction, n_max: &[usize], points: usize) -> Result<Self> {
        let m = f.dim();
        if n_max.len() != m {
            return Err(Error::domain("one degree per axis is required"));
        }
        if n_max.iter().any(|&n| 2 * n + 1 > points) {
            return Err(Error::domain("too few trapezoid points for the requested degree"));
        }
        let nodes: Vec<f64> = (0..points)
            .map(|j| -PI + 2.0 * PI * j as f64 / points as f64)
            .collect();
        // samples on the tensor grid
        let total = points.pow(m as u32);
        let mut values: Vec<Complex64> = Vec::with_capacity(total);
        let mut x = vec![0.0; m];
        for flat in 0..total {
            let mut r = flat;
            for j in (0..m).rev() {
                x[j] = nodes[r % points];
                r /= points;
            }
            values.push(Complex64::new(f.eval(&x), 0.0));
        }
        // one axis at a time: DFT restricted to |l| ≤ n_max[j]
        let mut shape: Vec<usize> = vec![points; m];
        for j in 0..m {
            let nj = n_max[j];
            let width = 2 * nj + 1;
            let inner: usize = shape[j + 1..].iter().product();
            let outer: usize = shape[..j].iter().product();
            let mut next = vec![Complex64::new(0.0, 0.0); outer * width * inner];
            let twiddle: Vec<Vec<Complex64>> = (0..width)
                .map(|li| {
                    let l = li as f64 - nj as f64;
                    nodes
                        .iter()
                        .map(|&xn| Complex64::from_polar(1.0 / points as f64, -l * xn))
                        .collect()
                })
                .collect();
            for o in 0..outer {
                for i in 0..inner {
                    for li in 0..width {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (p, tw) in twiddle[li].iter().enumerate() {
                            acc += values[(o * points + p) * inner + i] * tw;
                        }
                        next[(o * width + li) * inner + i] = acc;
                    }
                }
            }
            values = next;
            shape[j] = width;
        }
        Ok(FourierData {
            n_max: n_max.to_vec(),
            coeffs: values,
            complete: false,
        })
    }

    /// Coefficients of `Π_j f_j(x^j)` from the one-variable factors.
    pub fn tensor(factors: &[FourierData]) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|f| f.dim() != 1) {
            return Err(Error::domain("tensor product needs one-variable factors"));
        }
        let n_max: Vec<usize> = factors.iter().map(|f| f.n_max[0]).collect();
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for f in factors {
            let mut next = Vec::with_capacity(coeffs.len() * f.coeffs.len());
            for c in &coeffs {
                for d in &f.coeffs {
                    next.push(c * d);
                }
            }
            coeffs = next;
        }
        Ok(FourierData {
            n_max,
            coeffs,
            complete: factors.iter().all(|f| f.complete),
        })
    }

    /// `max_l |c_{-l} - conj(c_l)|`, zero for real functions.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let len = self.coeffs.len();
        // index of -l is the mirror image in every axis, i.e. len - 1 - i
        (0..len)
            .map(|i| (self.coeffs[len - 1 - i] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// All rectangular partial sums `S_k(x)`, `k ≤ nvec`, as a flat
    /// row-major array over `Π (n_j + 1)`.
    pub fn rectangular_partial_sums(&self, nvec: &[usize], x: &[f64]) -> Result<Vec<f64>> {
        let m = self.dim();
        if nvec.len() != m || x.len() != m {
            return Err(Error::domain("dimension mismatch"));
        }
        if !self.complete && nvec.iter().zip(&self.n_max).any(|(n, nm)| n > nm) {
            return Err(Error::domain("coefficients are not available to the requested order"));
        }
        let shape: Vec<usize> = nvec.iter().map(|n| n + 1).collect();
        let total: usize = shape.iter().product();
        // e^{i l_j x_j} for l_j in -n_j..=n_j
        let phases: Vec<Vec<Complex64>> = (0..m)
            .map(|j| {
                (0..=2 * nvec[j])
                    .map(|li| Complex64::from_polar(1.0, (li as f64 - nvec[j] as f64) * x[j]))
                    .collect()
            })
            .collect();
        // fold ±l into |l|
        let mut folded = vec![0.0; total];
        let mut k = vec![0usize; m];
        let mut l = vec![0i64; m];
        let mut ph = vec![0usize; m];
        for flat in 0..total {
            let mut r = flat;
            for j in (0..m).rev() {
                k[j] = r % shape[j];
                r /= shape[j];
            }
            let mut acc = Complex64::new(0.0, 0.0);
            let signs = 1usize << m;
            for mask in 0..signs {
                // skip duplicate sign patterns on zero indices
                if (0..m).any(|j| k[j] == 0 && mask & (1 << j) != 0) {
                    continue;
                }
                let mut phase = Complex64::new(1.0, 0.0);
                for j in 0..m {
                    l[j] = if mask & (1 << j) != 0 { -(k[j] as i64) } else { k[j] as i64 };
                    ph[j] = (l[j] + nvec[j] as i64) as usize;
                    phase *= phases[j][ph[j]];
                }
                acc += self.coeff(&l) * phase;
            }
            folded[flat] = acc.re;
        }
        // prefix sums along every axis
        let mut stride = 1;
        for j in (0..m).rev() {
            let len = shape[j];
            for flat in 0..total {
                if (flat / stride) % len != 0 {
                    folded[flat] += folded[flat - stride];
                }
            }
            stride *= len;
        }
        Ok(folded)
    }
}

fn trapezoid_coefficients(f: &dyn RealFunction, n_max: usize, points: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for j in 0..points {
        let x = -PI + 2.0 * PI * j as f64 / points as f64;
        let fx = f.eval(x) / points as f64;
        let step = Complex64::from_polar(1.0, -x);
        let mut e = Complex64::new(1.0, 0.0);
        for cl in c.iter_mut() {
            *cl += e * fx;
            e *= step;
        }
    }
    c
}

fn panel_coefficients(f: &dyn RealFunction, n_max: usize, breaks: &[f64]) -> Vec<Complex64> {
    (0..=n_max)
        .map(|l| {
            let lf = l as f64;
            let re = integrate_panels(|t| f.eval(t) * (lf * t).cos(), breaks);
            let im = integrate_panels(|t| f.eval(t) * (lf * t).sin(), breaks);
            Complex64::new(re, -im) / (2.0 * PI)
        })
        .collect()
}

/// `(C, α)` mean at `x` of a one-variable series from its partial sums.
pub fn cesaro_mean_1d(f: &FourierData, n: usize, alpha: f64, x: f64) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::domain("one-variable coefficients expected"));
    }
    let order = CesaroOrder::new(vec![alpha])?;
    cesaro_mean_fourier(f, &[n], &order, &[x])
}

fn cesaro_mean_fourier(f: &FourierData, nvec: &[usize], order: &CesaroOrder, x: &[f64]) -> Result<f64> {
    if order.dim() != f.dim() {
        return Err(Error::domain("order and data dimensions differ"));
    }
    let sums = f.rectangular_partial_sums(nvec, x)?;
    let weights: Vec<Vec<f64>> = nvec
        .iter()
        .zip(order.alphas())
        .map(|(&n, &a)| partial_sum_weights(n, a))
        .collect();
    let shape: Vec<usize> = nvec.iter().map(|n| n + 1).collect();
    let m = nvec.len();
    let mut total = 0.0;
    for (flat, s) in sums.iter().enumerate() {
        let mut r = flat;
        let mut w = 1.0;
        for j in (0..m).rev() {
            w *= weights[j][r % shape[j]];
            r /= shape[j];
        }
        total += w * s;
    }
    Ok(total)
}

/// `(1/π) ∫_{-π}^{π} f(x+t) K(t) dt` on panels graded toward `t = 0` and
/// split at the (shifted) breakpoints of `f`. The integration range shrinks
/// to the declared support when it does not wrap around.
pub fn mean_by_kernel(f: &dyn RealFunction, kernel: &CesaroKernel, x: f64, tol: f64) -> Result<Refined> {
    let n = kernel.n() as f64;
    let (lo, hi) = match f.support() {
        Some((a, b)) if a - x >= -PI && b - x <= PI => (a - x, b - x),
        _ => (-PI, PI),
    };
    let mut extra: Vec<f64> = f.breakpoints().iter().map(|&b| wrap(b - x)).collect();
    extra.push(wrap(PI - x));
    let width = f
        .max_frequency()
        .map_or(1.0 / (n + 1.0), |nu| (1.0 / (nu + 1.0)).min(1.0 / (n + 1.0)));
    let breaks = graded_breaks(lo, hi, (1.0 / (8.0 * n)).min(width), width, &extra);
    integrate_refined(|t| f.eval(wrap(x + t)) * kernel.eval(t) / PI, &breaks, tol, 3)
}

/// Source of a multidimensional mean.
pub enum MeanSource<'a> {
    Fourier(&'a FourierData),
    /// Sum of products; means factor into one-variable kernel quadratures.
    Separable(&'a SeparableSum),
    /// Tensor-product kernel quadrature; practical for `m ≤ 2` at small `n`.
    Function(&'a dyn MultiFunction),
}

const TENSOR_NODE_LIMIT: usize = 50_000_000;

/// Rectangular `(C, α)` mean `σ_n^α(f, x)`.
pub fn cesaro_mean_multi(source: &MeanSource<'_>, nvec: &[usize], order: &CesaroOrder, x: &[f64], tol: f64) -> Result<f64> {
    let m = order.dim();
    if nvec.len() != m || x.len() != m {
        return Err(Error::domain("dimension mismatch"));
    }
    if nvec.iter().any(|&n| n < 1) {
        return Err(Error::domain("every n_j must be at least 1"));
    }
    match source {
        MeanSource::Fourier(data) => cesaro_mean_fourier(data, nvec, order, x),
        MeanSource::Separable(sum) => {
            if sum.dim() != m {
                return Err(Error::domain("dimension mismatch"));
            }
            let kernels = nvec
                .iter()
                .zip(order.alphas())
                .map(|(&n, &a)| CesaroKernel::new(n, a))
                .collect::<Result<Vec<_>>>()?;
            let mut total = 0.0;
            for term in sum.terms() {
                let mut prod = term.coeff;
                for (j, factor) in term.factors.iter().enumerate() {
                    prod *= mean_by_kernel(factor.as_ref(), &kernels[j], x[j], tol)?.value;
                }
                total += prod;
            }
            Ok(total)
        }
        MeanSource::Function(f) => tensor_kernel_mean(*f, nvec, order, x, tol),
    }
}

fn tensor_kernel_mean(f: &dyn MultiFunction, nvec: &[usize], order: &CesaroOrder, x: &[f64], tol: f64) -> Result<f64> {
    let m = nvec.len();
    let kernels = nvec
        .iter()
        .zip(order.alphas())
        .map(|(&n, &a)| CesaroKernel::new(n, a))
        .collect::<Result<Vec<_>>>()?;
    let rule = |breaks: &[Vec<f64>]| -> Result<f64> {
        // tensor Gauss nodes with kernel weights folded in
        let axes: Vec<Vec<(f64, f64)>> = breaks
            .iter()
            .zip(&kernels)
            .map(|(br, k)| tensor_axis_nodes(br, k))
            .collect();
        let count: usize = axes.iter().map(Vec::len).product();
        if count > TENSOR_NODE_LIMIT {
            return Err(Error::domain("tensor quadrature exceeds the node budget"));
        }
        let mut idx = vec![0usize; m];
        let mut point = vec![0.0; m];
        let mut total = 0.0;
        'outer: loop {
            let mut w = 1.0;
            for j in 0..m {
                let (t, wt) = axes[j][idx[j]];
                point[j] = wrap(x[j] + t);
                w *= wt;
            }
            total += w * f.eval(&point);
            for j in (0..m).rev() {
                idx[j] += 1;
                if idx[j] < axes[j].len() {
                    continue 'outer;
                }
                idx[j] = 0;
            }
            break;
        }
        Ok(total)
    };
    let coarse: Vec<Vec<f64>> = nvec
        .iter()
        .map(|&n| graded_breaks(-PI, PI, 1.0 / (8.0 * n as f64), 1.0 / (n as f64 + 1.0), &[]))
        .collect();
    let fine: Vec<Vec<f64>> = coarse.iter().map(|b| halve(b)).collect();
    let v0 = rule(&coarse)?;
    let v1 = rule(&fine)?;
    if (v1 - v0).abs() > tol {
        return Err(Error::Quadrature {
            requested: tol,
            achieved: (v1 - v0).abs(),
        });
    }
    Ok(v1)
}

fn tensor_axis_nodes(breaks: &[f64], kernel: &CesaroKernel) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(10 * breaks.len());
    for w in breaks.windows(2) {
        for (t, wt) in gl10_rule(w[0], w[1]) {
            out.push((t, wt * kernel.eval(t) / PI));
        }
    }
    out
}

/// Means along a schedule of multi-indices and their spread over the tail half.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub rows: Vec<(Vec<usize>, f64)>,
    /// `max - min` of the means over the second half of the schedule.
    pub tail_oscillation: f64,
}

pub fn pringsheim_probe(
    source: &MeanSource<'_>,
    order: &CesaroOrder,
    x: &[f64],
    schedule: &[Vec<usize>],
    tol: f64,
) -> Result<ProbeReport> {
    let mut rows = Vec::with_capacity(schedule.len());
    for nvec in schedule {
        rows.push((nvec.clone(), cesaro_mean_multi(source, nvec, order, x, tol)?));
    }
    let tail = &rows[rows.len() / 2..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| (lo.min(*v), hi.max(*v)));
    Ok(ProbeReport {
        tail_oscillation: if tail.is_empty() { 0.0 } else { hi - lo },
        rows,
    })
}

/// The value `f*(x_0)` at a regular point from its `2^m` one-sided limits.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularPointValue {
    pub point: Vec<f64>,
    pub limits: Vec<f64>,
    pub f_star: f64,
}

impl RegularPointValue {
    pub fn new(point: Vec<f64>, limits: Vec<f64>) -> Result<Self> {
        let f_star = fstar(&limits, point.len())?;
        Ok(RegularPointValue {
            point,
            limits,
            f_star,
        })
    }
}

/// Average of the `2^m` one-sided limits.
pub fn fstar(limits: &[f64], m: usize) -> Result<f64> {
    if m == 0 || m >= usize::BITS as usize || limits.len() != 1usize << m {
        return Err(Error::domain("f* needs exactly 2^m one-sided limits"));
    }
    Ok(limits.iter().sum::<f64>() / limits.len() as f64)
}

/// Inputs of the oscillatory-integral estimate on `[a, b]`.
pub struct FinintInput<'a> {
    pub f: &'a dyn RealFunction,
    pub seq: &'a LambdaSeq,
    pub a: f64,
    pub b: f64,
    /// Continuous, `|s| ≤ 1`, `s(t + π) = -s(t)`.
    pub s: &'a dyn RealFunction,
    pub big_a: f64,
    /// `V_Λ(f; [a, b])`.
    pub variation: f64,
    /// `sup_{[a,b]} |f|`.
    pub sup: f64,
    pub c_test: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinintCheck {
    /// `|∫_a^b f(t) s(At) dt|`.
    pub lhs: f64,
    /// `C_test (V / Λ(⌊κA⌋ - 1) + sup / A)`.
    pub rhs: f64,
    /// `lhs / (V / Λ(⌊κA⌋ - 1) + sup / A)`.
    pub normalized: f64,
    pub ok: bool,
}

pub fn finint_bound_check(input: &FinintInput<'_>) -> Result<FinintCheck> {
    let FinintInput { f, seq, a, b, s, big_a, variation, sup, c_test } = *input;
    if !(a < b) {
        return Err(Error::domain("finint needs a < b"));
    }
    for i in 0..64 {
        let t = 2.0 * PI * i as f64 / 64.0 + 0.1;
        let (u, v) = (s.eval(t), s.eval(t + PI));
        if (u + v).abs() > 1e-12 || u.abs() > 1.0 + 1e-12 {
            return Err(Error::domain("s must satisfy |s| <= 1 and s(t + pi) = -s(t)"));
        }
    }
    let kappa = (b - a) / PI;
    if big_a < 2.0 / kappa {
        return Err(Error::domain("finint needs A >= 2/kappa"));
    }
    let idx = (kappa * big_a).floor() as usize - 1;
    let width = (PI / (2.0 * big_a)).min((b - a) / 8.0);
    let pieces = ((b - a) / width).ceil() as usize;
    let breaks: Vec<f64> = (0..=pieces).map(|i| a + (b - a) * i as f64 / pieces as f64).collect();
    let lhs = integrate_refined(|t| f.eval(t) * s.eval(big_a * t), &breaks, 1e-12, 3)?
        .value
        .abs();
    let scale = variation / seq.partial_sum(idx) + sup / big_a;
    let rhs = c_test * scale;
    Ok(FinintCheck {
        lhs,
        rhs,
        normalized: lhs / scale,
        ok: lhs <= rhs,
    })
}
