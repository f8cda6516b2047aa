//! Λ-sequences and Cesàro numbers.
//!
//! A [`LambdaSeq`] is a nondecreasing sequence of positive weights
//! `λ_1 ≤ λ_2 ≤ …` whose reciprocals have a divergent sum. The Cesàro
//! numbers `A_n^α` are the Taylor coefficients of `(1 - x)^{-α-1}`.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math wins when a dependency links std
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaKind {
    /// `λ_n = n`.
    Harmonic,
    /// `λ_n = n^β` with `β ∈ (0, 1]`.
    Power(f64),
    /// Explicit values `λ_1, …, λ_L`; indices past `L` repeat `λ_L`.
    Explicit(Vec<f64>),
}

/// A weight sequence, optionally shifted: the tail `Λ_n` has
/// `k`-th term `λ_{k+n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSeq {
    kind: LambdaKind,
    shift: usize,
}

impl LambdaSeq {
    pub fn harmonic() -> Self {
        LambdaSeq {
            kind: LambdaKind::Harmonic,
            shift: 0,
        }
    }

    pub fn power(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain("power sequence needs beta in (0, 1]"));
        }
        Ok(LambdaSeq {
            kind: LambdaKind::Power(beta),
            shift: 0,
        })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("explicit sequence is empty"));
        }
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::domain("explicit sequence must be positive and finite"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("explicit sequence must be nondecreasing"));
        }
        Ok(LambdaSeq {
            kind: LambdaKind::Explicit(values),
            shift: 0,
        })
    }

    pub fn kind(&self) -> &LambdaKind {
        &self.kind
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    /// The tail sequence `{λ_k}_{k > n}` of this sequence.
    pub fn tail(&self, n: usize) -> Self {
        LambdaSeq {
            kind: self.kind.clone(),
            shift: self.shift + n,
        }
    }

    /// `λ_n` for `n ≥ 1` (shift applied).
    pub fn value(&self, n: usize) -> f64 {
        debug_assert!(n >= 1, "Λ-sequences are indexed from 1");
        let idx = n + self.shift;
        match &self.kind {
            LambdaKind::Harmonic => idx as f64,
            LambdaKind::Power(beta) => (idx as f64).powf(*beta),
            LambdaKind::Explicit(values) => values[(idx - 1).min(values.len() - 1)],
        }
    }

    /// The exponent `β` when the sequence is `{n^β}`.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.kind {
            LambdaKind::Harmonic => Some(1.0),
            LambdaKind::Power(beta) => Some(beta),
            LambdaKind::Explicit(_) => None,
        }
    }

    /// `Λ(N) = Σ_{k=1}^N 1/λ_k`; `Λ(0) = 0`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        (1..=n).map(|k| 1.0 / self.value(k)).sum()
    }

    /// Analytic divergence of `Σ 1/λ_n`: known for the closed-form kinds,
    /// undecidable from finitely many explicit values.
    pub fn diverges_analytic(&self) -> Option<bool> {
        match self.kind {
            LambdaKind::Harmonic | LambdaKind::Power(_) => Some(true),
            LambdaKind::Explicit(_) => None,
        }
    }
}

pub fn lambda_partial_sum(seq: &LambdaSeq, n: usize) -> f64 {
    seq.partial_sum(n)
}

/// `A_n^α` for `α > -1`.
pub fn cesaro_coeff(n: usize, alpha: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::domain("Cesaro order must exceed -1"));
    }
    let mut a = 1.0;
    for k in 1..=n {
        a *= (k as f64 + alpha) / k as f64;
    }
    Ok(a)
}

/// The table `A_0^α, …, A_n^α` for any real `α` (orders `≤ -1` appear as
/// `α - 1` in kernel weights).
pub fn cesaro_numbers(alpha: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut a = 1.0;
    out.push(a);
    for k in 1..=n {
        a *= (k as f64 + alpha) / k as f64;
        out.push(a);
    }
    out
}

/// `A_n^α` for any real `α`, without domain checks.
pub(crate) fn cesaro_number(alpha: f64, n: usize) -> f64 {
    let mut a = 1.0;
    for k in 1..=n {
        a *= (k as f64 + alpha) / k as f64;
    }
    a
}

/// Orders `α = (α_1, …, α_m)` of a multiple Cesàro method.
#[derive(Debug, Clone, PartialEq)]
pub struct CesaroOrder {
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl CesaroOrder {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::domain("Cesaro order needs at least one axis"));
        }
        if alphas.iter().any(|&a| !(a > -1.0) || !a.is_finite()) {
            return Err(Error::domain("every Cesaro order must exceed -1"));
        }
        let betas = alphas.iter().map(|a| a + 1.0).collect();
        Ok(CesaroOrder { alphas, betas })
    }

    pub fn uniform(alpha: f64, m: usize) -> Result<Self> {
        Self::new(alloc::vec![alpha; m])
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// `(Σ_j β_j) - β_q > 1`, the growth condition that admits the
    /// diagonal counterexample with the distinguished axis `q` (0-based).
    pub fn big_beta_margin(&self, q: usize) -> f64 {
        self.betas.iter().sum::<f64>() - self.betas[q] - 1.0
    }
}

/// Outcome of testing `Σ_k 1/(λ^2_k ⋯ λ^m_k) < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadivReport {
    pub convergent: bool,
    /// `true` when the verdict follows from the p-series rule.
    pub rigorous: bool,
    /// Partial sums of the product-reciprocal series at dyadic indices.
    pub trace: Vec<(usize, f64)>,
}

const LADIV_HORIZON: usize = 1 << 20;

pub fn check_ladiv(seqs: &[LambdaSeq]) -> LadivReport {
    let exponents: Option<Vec<f64>> = seqs
        .iter()
        .map(|s| s.power_exponent())
        .collect();
    let horizon = seqs
        .iter()
        .filter_map(|s| match s.kind() {
            LambdaKind::Explicit(v) => Some(v.len().saturating_sub(s.shift())),
            _ => None,
        })
        .min()
        .unwrap_or(LADIV_HORIZON)
        .max(1);

    let mut trace = Vec::new();
    let mut sum = 0.0;
    let mut next = 1usize;
    for k in 1..=horizon {
        sum += 1.0 / seqs.iter().map(|s| s.value(k)).product::<f64>();
        if k == next || k == horizon {
            trace.push((k, sum));
            next *= 2;
        }
    }

    match exponents {
        Some(exps) => LadivReport {
            convergent: exps.iter().sum::<f64>() > 1.0,
            rigorous: true,
            trace,
        },
        None => {
            // Dyadic blocks of a convergent p-series shrink geometrically.
            let blocks: Vec<f64> = trace.windows(2).map(|w| w[1].1 - w[0].1).collect();
            let convergent = match blocks.as_slice() {
                [.., prev, last] if *prev > 0.0 => last / prev < 0.9,
                _ => false,
            };
            LadivReport {
                convergent,
                rigorous: false,
                trace,
            }
        }
    }
}
