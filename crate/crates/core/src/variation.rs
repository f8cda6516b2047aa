//! Λ-variation of functions of one and several variables.
//!
//! The supremum over all finite systems of disjoint intervals is not
//! computable; everything here searches systems whose endpoints lie on
//! user grids and reports the best sum found, a lower bound for the true
//! variation. `exact` means only that the search over the grid was
//! exhaustive.
//!
//! Intervals are open, so two intervals sharing an endpoint are disjoint.
//! Inside a system the `k`-th largest `|f(I)|` is paired with `λ_k`, which
//! is optimal for a fixed system by the rearrangement inequality.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::function::{MultiFunction, RealFunction};
use crate::sequences::LambdaSeq;
use crate::{Error, Result};

/// `|f(I)|` below this is treated as zero.
const NEGLIGIBLE: f64 = 1e-14;
const DOMAIN_SLACK: f64 = 1e-12;
/// Grids up to this size with at most [`EXHAUSTIVE_INTERVALS`] intervals are searched exhaustively.
pub const EXHAUSTIVE_GRID: usize = 14;
pub const EXHAUSTIVE_INTERVALS: usize = 4;
/// Per-axis systems up to this size have all their orderings tried.
pub const EXHAUSTIVE_ORDERINGS: usize = 6;
const TABLE_LIMIT: usize = 1 << 22;

/// An open box `Π (a^j, b^j)` inside `[-π, π]^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxInterval {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxInterval {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::domain("box needs one (a, b) pair per axis"));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a < b) {
                return Err(Error::domain("box edges must satisfy a < b"));
            }
            if *a < -PI - DOMAIN_SLACK || *b > PI + DOMAIN_SLACK {
                return Err(Error::domain("box must lie inside [-pi, pi]^m"));
            }
        }
        Ok(BoxInterval { lo, hi })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn edge(&self, axis: usize) -> (f64, f64) {
        (self.lo[axis], self.hi[axis])
    }
}

/// Pairwise disjoint open intervals on one axis; the `k`-th interval
/// carries the weight `1/λ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSystem {
    pub axis: usize,
    pub intervals: Vec<(f64, f64)>,
}

impl IntervalSystem {
    pub fn new(axis: usize, intervals: Vec<(f64, f64)>, base: (f64, f64)) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a < b) {
                return Err(Error::domain("intervals must have positive length"));
            }
            if a < base.0 || b > base.1 {
                return Err(Error::domain("interval closure leaves the base interval"));
            }
        }
        let mut sorted = intervals.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        if sorted.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::domain("intervals overlap"));
        }
        Ok(IntervalSystem { axis, intervals })
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationResult {
    pub value: f64,
    /// One system per varied axis, intervals in weight order.
    pub witness: Vec<IntervalSystem>,
    /// Per axis and interval `k`: `g(I_k)/λ_k`, where `g` is the
    /// interval's share of the sum with the other axes held fixed. Each
    /// row sums to `value`.
    pub contributions: Vec<Vec<f64>>,
    pub exact: bool,
    /// Values of the fixed coordinates at which `value` was attained.
    pub section: Vec<f64>,
}

/// Limits of the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    /// Per-axis cap on the number of intervals.
    pub max_intervals: usize,
    /// Longest candidate interval, in grid steps, for non-exhaustive search.
    pub max_span: Option<usize>,
    /// Work units (interval-sum evaluations weighted by their length)
    /// for exhaustive multi-axis search and for local search.
    pub max_work: usize,
    /// Sweeps of coordinate ascent over the axes.
    pub max_rounds: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_intervals: EXHAUSTIVE_INTERVALS,
            max_span: None,
            max_work: 20_000_000,
            max_rounds: 8,
        }
    }
}

/// The mixed difference of `f` over `bx`: `Σ ±f(corner)`, the all-upper
/// corner positive and each lower coordinate flipping the sign.
pub fn symmetric_difference(f: &dyn MultiFunction, bx: &BoxInterval) -> f64 {
    let m = bx.dim();
    let axes: Vec<usize> = (0..m).collect();
    let mut point = vec![0.0; m];
    mixed_difference(f, &axes, bx.lo(), bx.hi(), &mut point)
}

/// Mixed difference over `axes`, other coordinates taken from `point`.
fn mixed_difference(f: &dyn MultiFunction, axes: &[usize], lo: &[f64], hi: &[f64], point: &mut [f64]) -> f64 {
    let mut total = 0.0;
    for mask in 0..1usize << axes.len() {
        for (bit, &ax) in axes.iter().enumerate() {
            point[ax] = if mask & (1 << bit) != 0 { lo[bit] } else { hi[bit] };
        }
        let v = f.eval(point);
        if mask.count_ones() % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    total
}

/// `Σ_k |f(I_k)| / λ_k` for a system in its given order.
pub fn system_sum_1d(f: &dyn RealFunction, seq: &LambdaSeq, intervals: &[(f64, f64)]) -> f64 {
    intervals
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| negligible_to_zero((f.eval(b) - f.eval(a)).abs()) / seq.value(k + 1))
        .sum()
}

/// `Σ |f(I^1_{k_1} × … , x^ξ)| / Π λ^j_{k_j}` for systems in their given
/// order; `point` supplies the fixed coordinates.
pub fn system_sum(f: &dyn MultiFunction, seqs: &[LambdaSeq], witness: &[IntervalSystem], point: &[f64]) -> f64 {
    let axes: Vec<usize> = witness.iter().map(|s| s.axis).collect();
    if witness.iter().any(IntervalSystem::is_empty) {
        return 0.0;
    }
    let mut p = point.to_vec();
    let mut k = vec![0usize; witness.len()];
    let mut lo = vec![0.0; witness.len()];
    let mut hi = vec![0.0; witness.len()];
    let mut total = 0.0;
    'outer: loop {
        let mut w = 1.0;
        for (j, s) in witness.iter().enumerate() {
            let (a, b) = s.intervals[k[j]];
            lo[j] = a;
            hi[j] = b;
            w *= seqs[j].value(k[j] + 1);
        }
        total += negligible_to_zero(mixed_difference(f, &axes, &lo, &hi, &mut p).abs()) / w;
        for j in (0..k.len()).rev() {
            k[j] += 1;
            if k[j] < witness[j].len() {
                continue 'outer;
            }
            k[j] = 0;
        }
        break;
    }
    total
}

// ---------------------------------------------------------------------------
// one-axis search over a score table

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cand {
    i: usize,
    j: usize,
    d: f64,
}

fn negligible_to_zero(d: f64) -> f64 {
    if d < NEGLIGIBLE {
        0.0
    } else {
        d
    }
}

fn by_weight_order(a: &Cand, b: &Cand) -> Ordering {
    b.d.total_cmp(&a.d).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j))
}

/// Sorted-pairing sum of the scores `ds`.
fn sorted_sum(ds: &mut [f64], lambdas: &[f64]) -> f64 {
    ds.sort_by(|a, b| b.total_cmp(a));
    ds.iter().zip(lambdas).map(|(d, l)| d / l).sum()
}

fn set_value(set: &[Cand], lambdas: &[f64]) -> f64 {
    let mut ds: Vec<f64> = set.iter().map(|c| c.d).collect();
    sorted_sum(&mut ds, lambdas)
}

struct Axis1d<'a> {
    n: usize,
    score: &'a dyn Fn(usize, usize) -> f64,
    lambdas: &'a [f64],
    budget: SearchBudget,
}

struct Found {
    value: f64,
    /// Weight order.
    set: Vec<Cand>,
    exact: bool,
}

impl Axis1d<'_> {
    fn candidates(&self, span: Option<usize>) -> Vec<Cand> {
        let mut out = Vec::new();
        for i in 0..self.n {
            let last = span.map_or(self.n - 1, |s| (i + s).min(self.n - 1));
            for j in i + 1..=last {
                let d = (self.score)(i, j);
                if d >= NEGLIGIBLE {
                    out.push(Cand { i, j, d });
                }
            }
        }
        out
    }

    fn solve(&self) -> Found {
        let k = self.budget.max_intervals.min(self.lambdas.len());
        if self.n < 2 || k == 0 {
            return Found {
                value: 0.0,
                set: Vec::new(),
                exact: true,
            };
        }
        let mut found = if self.n <= EXHAUSTIVE_GRID && k <= EXHAUSTIVE_INTERVALS {
            self.exhaustive(k)
        } else {
            let mut set = self.greedy(k);
            self.local_search(&mut set, k);
            Found {
                value: set_value(&set, self.lambdas),
                set,
                exact: false,
            }
        };
        found.set.sort_by(by_weight_order);
        found
    }

    fn exhaustive(&self, k: usize) -> Found {
        let mut by_left: Vec<Vec<Cand>> = vec![Vec::new(); self.n];
        for c in self.candidates(None) {
            by_left[c.i].push(c);
        }
        let mut best = (0.0, Vec::new());
        let mut chosen = Vec::with_capacity(k);
        let mut scratch = Vec::with_capacity(k);
        self.dfs(0, k, &by_left, &mut chosen, &mut scratch, &mut best);
        Found {
            value: best.0,
            set: best.1,
            exact: true,
        }
    }

    fn dfs(
        &self,
        from: usize,
        k: usize,
        by_left: &[Vec<Cand>],
        chosen: &mut Vec<Cand>,
        scratch: &mut Vec<f64>,
        best: &mut (f64, Vec<Cand>),
    ) {
        if !chosen.is_empty() {
            scratch.clear();
            scratch.extend(chosen.iter().map(|c| c.d));
            let v = sorted_sum(scratch, self.lambdas);
            if v > best.0 {
                *best = (v, chosen.clone());
            }
        }
        if chosen.len() == k {
            return;
        }
        for left in by_left.iter().skip(from) {
            for &c in left {
                chosen.push(c);
                self.dfs(c.j, k, by_left, chosen, scratch, best);
                chosen.pop();
            }
        }
    }

    fn greedy(&self, k: usize) -> Vec<Cand> {
        let mut cands = self.candidates(self.budget.max_span);
        cands.sort_by(by_weight_order);
        let mut occupied = vec![false; self.n - 1];
        let mut set = Vec::new();
        for c in cands {
            if occupied[c.i..c.j].iter().any(|&o| o) {
                continue;
            }
            occupied[c.i..c.j].iter_mut().for_each(|o| *o = true);
            set.push(c);
            if set.len() == k {
                break;
            }
        }
        set
    }

    fn fits(&self, set: &[Cand], skip: &[usize], i: usize, j: usize) -> bool {
        i < j
            && j < self.n
            && self.budget.max_span.map_or(true, |s| j - i <= s)
            && set
                .iter()
                .enumerate()
                .all(|(idx, c)| skip.contains(&idx) || c.j <= i || c.i >= j)
    }

    /// Endpoint moves, splits, merges of neighbours and gap filling, first
    /// improvement.
    fn local_search(&self, set: &mut Vec<Cand>, k: usize) {
        let mut work = 0usize;
        let mut current = set_value(set, self.lambdas);
        let mut trial: Vec<f64> = Vec::with_capacity(set.len() + 1);
        loop {
            let mut improved = false;
            let mut idx = 0;
            while idx < set.len() {
                if work > self.budget.max_work {
                    return;
                }
                let c = set[idx];
                // endpoint moves
                let moves = [
                    (c.i.wrapping_sub(1), c.j),
                    (c.i + 1, c.j),
                    (c.i, c.j.wrapping_sub(1)),
                    (c.i, c.j + 1),
                ];
                for (i, j) in moves {
                    if i >= self.n || !self.fits(set, &[idx], i, j) {
                        continue;
                    }
                    let d = (self.score)(i, j);
                    trial.clear();
                    trial.extend(set.iter().map(|x| x.d));
                    trial[idx] = d;
                    work += trial.len();
                    let v = sorted_sum(&mut trial, self.lambdas);
                    if v > current {
                        set[idx] = Cand { i, j, d };
                        current = v;
                        improved = true;
                        break;
                    }
                }
                // split at an interior grid point
                let c = set[idx];
                if set.len() < k && self.lambdas.len() > set.len() {
                    for s in c.i + 1..c.j {
                        let (d1, d2) = ((self.score)(c.i, s), (self.score)(s, c.j));
                        trial.clear();
                        trial.extend(set.iter().map(|x| x.d));
                        trial[idx] = d1;
                        trial.push(d2);
                        work += trial.len();
                        let v = sorted_sum(&mut trial, self.lambdas);
                        if v > current {
                            set[idx] = Cand { i: c.i, j: s, d: d1 };
                            set.push(Cand { i: s, j: c.j, d: d2 });
                            current = v;
                            improved = true;
                            break;
                        }
                    }
                }
                // merge with a neighbour sharing the right endpoint
                let c = set[idx];
                if let Some(nb) = set.iter().position(|x| x.i == c.j) {
                    if self.fits(set, &[idx, nb], c.i, set[nb].j) {
                        let j = set[nb].j;
                        let d = (self.score)(c.i, j);
                        trial.clear();
                        trial.extend(set.iter().enumerate().filter(|(t, _)| *t != nb).map(|(_, x)| x.d));
                        let pos = if nb < idx { idx - 1 } else { idx };
                        trial[pos] = d;
                        work += trial.len();
                        let v = sorted_sum(&mut trial, self.lambdas);
                        if v > current {
                            set[idx] = Cand { i: c.i, j, d };
                            set.remove(nb);
                            current = v;
                            improved = true;
                        }
                    }
                }
                idx += 1;
            }
            // fill a free gap with its best interval
            if set.len() < k && work <= self.budget.max_work {
                let mut occupied = vec![false; self.n - 1];
                for c in set.iter() {
                    occupied[c.i..c.j].iter_mut().for_each(|o| *o = true);
                }
                let mut best: Option<Cand> = None;
                for i in 0..self.n - 1 {
                    let last = self.budget.max_span.map_or(self.n - 1, |s| (i + s).min(self.n - 1));
                    for j in i + 1..=last {
                        if occupied[j - 1] {
                            break;
                        }
                        let d = (self.score)(i, j);
                        work += 1;
                        if d >= NEGLIGIBLE && best.map_or(true, |b| d > b.d) {
                            best = Some(Cand { i, j, d });
                        }
                    }
                }
                if let Some(c) = best {
                    set.push(c);
                    current = set_value(set, self.lambdas);
                    improved = true;
                }
            }
            if !improved {
                return;
            }
        }
    }
}

fn check_grid(grid: &[f64], base: (f64, f64)) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("grid must be strictly increasing"));
    }
    if grid[0] < base.0 || grid[grid.len() - 1] > base.1 {
        return Err(Error::domain("grid leaves the base interval"));
    }
    Ok(())
}

fn lambdas_for(seq: &LambdaSeq, k: usize) -> Vec<f64> {
    (1..=k).map(|i| seq.value(i)).collect()
}

/// Λ-variation of `f` on `base` over systems with endpoints on `grid`.
pub fn variation_1d(
    f: &dyn RealFunction,
    seq: &LambdaSeq,
    base: (f64, f64),
    grid: &[f64],
    budget: &SearchBudget,
) -> Result<VariationResult> {
    if budget.max_intervals == 0 {
        return Err(Error::domain("max_intervals must be at least 1"));
    }
    check_grid(grid, base)?;
    let values: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    let score = |i: usize, j: usize| (values[j] - values[i]).abs();
    let lambdas = lambdas_for(seq, budget.max_intervals.min(grid.len()));
    let found = Axis1d {
        n: grid.len(),
        score: &score,
        lambdas: &lambdas,
        budget: *budget,
    }
    .solve();
    let intervals: Vec<(f64, f64)> = found.set.iter().map(|c| (grid[c.i], grid[c.j])).collect();
    let contributions = found.set.iter().zip(&lambdas).map(|(c, l)| c.d / l).collect();
    Ok(VariationResult {
        value: found.value,
        witness: vec![IntervalSystem::new(0, intervals, base)?],
        contributions: vec![contributions],
        exact: found.exact,
        section: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// several axes

/// Values of `f` on the product of the varied-axis grids at one section.
struct Table {
    dims: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<f64>,
}

impl Table {
    fn build(f: &dyn MultiFunction, axes: &[usize], grids: &[Vec<f64>], point: &[f64]) -> Result<Self> {
        let dims: Vec<usize> = grids.iter().map(Vec::len).collect();
        let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        let total = match total {
            Some(t) if t <= TABLE_LIMIT => t,
            _ => return Err(Error::domain("grid product too large for the value table")),
        };
        let mut strides = vec![1usize; dims.len()];
        for j in (0..dims.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * dims[j + 1];
        }
        let mut p = point.to_vec();
        let mut values = Vec::with_capacity(total);
        for flat in 0..total {
            for (j, &ax) in axes.iter().enumerate() {
                p[ax] = grids[j][(flat / strides[j]) % dims[j]];
            }
            values.push(f.eval(&p));
        }
        Ok(Table { dims, strides, values })
    }

    /// `|f(box)|` for index intervals `(i_j, k_j)` per axis.
    fn diff(&self, bx: &[(usize, usize)]) -> f64 {
        let mut total = 0.0;
        for mask in 0..1usize << bx.len() {
            let mut off = 0;
            for (j, &(lo, hi)) in bx.iter().enumerate() {
                off += self.strides[j] * if mask & (1 << j) != 0 { lo } else { hi };
            }
            if mask.count_ones() % 2 == 0 {
                total += self.values[off];
            } else {
                total -= self.values[off];
            }
        }
        negligible_to_zero(total.abs())
    }
}

type Systems = Vec<Vec<(usize, usize)>>;

struct MultiSearch<'a> {
    table: &'a Table,
    lambdas: Vec<Vec<f64>>,
    budget: SearchBudget,
}

impl MultiSearch<'_> {
    fn value(&self, systems: &Systems) -> f64 {
        if systems.iter().any(Vec::is_empty) {
            return 0.0;
        }
        let p = systems.len();
        let mut k = vec![0usize; p];
        let mut bx = vec![(0, 0); p];
        let mut total = 0.0;
        'outer: loop {
            let mut w = 1.0;
            for j in 0..p {
                bx[j] = systems[j][k[j]];
                w *= self.lambdas[j][k[j]];
            }
            total += self.table.diff(&bx) / w;
            for j in (0..p).rev() {
                k[j] += 1;
                if k[j] < systems[j].len() {
                    continue 'outer;
                }
                k[j] = 0;
            }
            break;
        }
        total
    }

    /// Share of interval `iv` on `axis` with the other systems fixed.
    fn score(&self, systems: &Systems, axis: usize, iv: (usize, usize)) -> f64 {
        let p = systems.len();
        if (0..p).any(|j| j != axis && systems[j].is_empty()) {
            return 0.0;
        }
        let mut k = vec![0usize; p];
        let mut bx = vec![(0, 0); p];
        bx[axis] = iv;
        let mut total = 0.0;
        'outer: loop {
            let mut w = 1.0;
            for j in (0..p).filter(|&j| j != axis) {
                bx[j] = systems[j][k[j]];
                w *= self.lambdas[j][k[j]];
            }
            total += self.table.diff(&bx) / w;
            for j in (0..p).rev().filter(|&j| j != axis) {
                k[j] += 1;
                if k[j] < systems[j].len() {
                    continue 'outer;
                }
                k[j] = 0;
            }
            break;
        }
        total
    }

    fn contributions(&self, systems: &Systems) -> Vec<Vec<f64>> {
        (0..systems.len())
            .map(|a| {
                systems[a]
                    .iter()
                    .enumerate()
                    .map(|(k, &iv)| self.score(systems, a, iv) / self.lambdas[a][k])
                    .collect()
            })
            .collect()
    }

    /// Orders the intervals of `axis` by decreasing share.
    fn sort_axis(&self, systems: &mut Systems, axis: usize) {
        let mut scored: Vec<(f64, (usize, usize))> =
            systems[axis].iter().map(|&iv| (self.score(systems, axis, iv), iv)).collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        systems[axis] = scored.into_iter().map(|s| s.1).collect();
    }

    fn all_systems(&self, n: usize, k: usize) -> Vec<Vec<(usize, usize)>> {
        fn rec(n: usize, k: usize, from: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            if cur.len() == k {
                return;
            }
            for i in from..n {
                for j in i + 1..n {
                    cur.push((i, j));
                    rec(n, k, j, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(n, k, 0, &mut Vec::new(), &mut out);
        out
    }

    /// Exhaustive over systems on every axis and orderings on all axes but
    /// the last, whose order is then optimal by sorting. `None` if the
    /// estimated work exceeds the budget.
    fn exhaustive(&self) -> Option<(f64, Systems)> {
        let p = self.table.dims.len();
        let k = self.budget.max_intervals;
        if k > EXHAUSTIVE_ORDERINGS {
            return None;
        }
        let per_axis: Vec<Vec<Vec<(usize, usize)>>> = (0..p)
            .map(|j| self.all_systems(self.table.dims[j], k.min(self.lambdas[j].len())))
            .collect();
        // estimated work: combinations × terms per evaluation
        let mut work: f64 = (k.pow(p as u32) << p) as f64;
        for (j, systems) in per_axis.iter().enumerate() {
            let count: f64 = if j + 1 < p {
                systems.iter().map(|s| factorial(s.len()) as f64).sum()
            } else {
                systems.len() as f64
            };
            work *= count;
            if work > self.budget.max_work as f64 {
                return None;
            }
        }
        let mut best = (0.0, vec![Vec::new(); p]);
        let mut cur: Systems = vec![Vec::new(); p];
        self.exhaustive_rec(0, &per_axis, &mut cur, &mut best);
        Some(best)
    }

    fn exhaustive_rec(&self, axis: usize, per_axis: &[Vec<Vec<(usize, usize)>>], cur: &mut Systems, best: &mut (f64, Systems)) {
        let p = per_axis.len();
        for system in &per_axis[axis] {
            if axis + 1 == p {
                cur[axis] = system.clone();
                self.sort_axis(cur, axis);
                let v = self.value(cur);
                if v > best.0 {
                    *best = (v, cur.clone());
                }
            } else {
                for perm in permutations(system) {
                    cur[axis] = perm;
                    self.exhaustive_rec(axis + 1, per_axis, cur, best);
                }
            }
        }
        cur[axis] = Vec::new();
    }

    /// Best system on `axis` with the others fixed.
    fn axis_step(&self, systems: &Systems, axis: usize) -> Vec<(usize, usize)> {
        let score = |i: usize, j: usize| self.score(systems, axis, (i, j));
        let found = Axis1d {
            n: self.table.dims[axis],
            score: &score,
            lambdas: &self.lambdas[axis],
            budget: self.budget,
        }
        .solve();
        found.set.iter().map(|c| (c.i, c.j)).collect()
    }

    /// Coordinate ascent from two starts: every other axis spanned by one
    /// interval, and every axis cut into `max_intervals` consecutive blocks.
    fn coordinate_ascent(&self) -> (f64, Systems) {
        let p = self.table.dims.len();
        let whole: Systems = (0..p).map(|j| vec![(0, self.table.dims[j] - 1)]).collect();
        let blocks: Systems = (0..p)
            .map(|j| {
                let n = self.table.dims[j];
                let k = self.lambdas[j].len().clamp(1, n - 1);
                (0..k).map(|b| (b * (n - 1) / k, (b + 1) * (n - 1) / k)).collect()
            })
            .collect();
        let a = self.ascend(whole);
        let b = self.ascend(blocks);
        if b.0 > a.0 {
            b
        } else {
            a
        }
    }

    fn ascend(&self, mut systems: Systems) -> (f64, Systems) {
        let p = systems.len();
        let mut value = f64::NEG_INFINITY;
        for _ in 0..self.budget.max_rounds.max(1) {
            let mut improved = false;
            for a in 0..p {
                let mut trial = systems.clone();
                trial[a] = self.axis_step(&systems, a);
                let v = self.value(&trial);
                if v > value {
                    value = v;
                    systems = trial;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        (value.max(0.0), systems)
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// The `γ`-variation of `f` on `bx`: `gamma` lists the varied axes,
/// `seqs` and `grids` follow `gamma`, and `sections` holds, for each
/// remaining axis in increasing order, the values over which the maximum
/// is taken (a single value fixes the coordinate).
pub fn variation_multi(
    f: &dyn MultiFunction,
    gamma: &[usize],
    seqs: &[LambdaSeq],
    bx: &BoxInterval,
    grids: &[Vec<f64>],
    sections: &[Vec<f64>],
    budget: &SearchBudget,
) -> Result<VariationResult> {
    let m = bx.dim();
    if gamma.is_empty() {
        return Err(Error::domain("the set of varied axes is empty"));
    }
    if f.dim() != m {
        return Err(Error::domain("function and box dimensions differ"));
    }
    if gamma.windows(2).any(|w| w[0] >= w[1]) || gamma[gamma.len() - 1] >= m {
        return Err(Error::domain("varied axes must be increasing and inside the box"));
    }
    if seqs.len() != gamma.len() || grids.len() != gamma.len() {
        return Err(Error::domain("one sequence and one grid per varied axis"));
    }
    if budget.max_intervals == 0 {
        return Err(Error::domain("max_intervals must be at least 1"));
    }
    let xi: Vec<usize> = (0..m).filter(|j| !gamma.contains(j)).collect();
    if sections.len() != xi.len() || sections.iter().any(Vec::is_empty) {
        return Err(Error::domain("one nonempty section list per fixed axis"));
    }
    for (g, &ax) in grids.iter().zip(gamma) {
        check_grid(g, bx.edge(ax))?;
    }
    let lambdas: Vec<Vec<f64>> = seqs
        .iter()
        .zip(grids)
        .map(|(s, g)| lambdas_for(s, budget.max_intervals.min(g.len())))
        .collect();

    let mut best: Option<VariationResult> = None;
    let section_count: usize = sections.iter().map(Vec::len).product();
    let mut point = vec![0.0; m];
    for flat in 0..section_count {
        let mut r = flat;
        for (s, &ax) in sections.iter().zip(&xi).rev() {
            point[ax] = s[r % s.len()];
            r /= s.len();
        }
        let table = Table::build(f, gamma, grids, &point)?;
        let search = MultiSearch {
            table: &table,
            lambdas: lambdas.clone(),
            budget: *budget,
        };
        let (value, systems, exact) = match search.exhaustive() {
            Some((v, s)) => (v, s, true),
            None => {
                let (v, s) = search.coordinate_ascent();
                (v, s, false)
            }
        };
        if best.as_ref().map_or(true, |b| value > b.value) {
            let witness = systems
                .iter()
                .zip(gamma)
                .zip(grids)
                .map(|((sys, &ax), g)| {
                    IntervalSystem::new(ax, sys.iter().map(|&(i, j)| (g[i], g[j])).collect(), bx.edge(ax))
                })
                .collect::<Result<Vec<_>>>()?;
            best = Some(VariationResult {
                value,
                witness,
                contributions: search.contributions(&systems),
                exact,
                section: xi.iter().map(|&ax| point[ax]).collect(),
            });
        } else if let Some(b) = best.as_mut() {
            b.exact &= exact;
        }
    }
    Ok(best.expect("at least one section"))
}

/// Variations over every nonempty subset of axes.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalVariation {
    /// `(γ, result)` in order of the subset bitmask.
    pub entries: Vec<(Vec<usize>, VariationResult)>,
    pub total: f64,
}

/// Sum of the `γ`-variations over all `γ ≠ ∅`; fixed coordinates range
/// over their axis grids.
pub fn total_variation(
    f: &dyn MultiFunction,
    seqs: &[LambdaSeq],
    bx: &BoxInterval,
    grids: &[Vec<f64>],
    budget: &SearchBudget,
) -> Result<TotalVariation> {
    let m = bx.dim();
    if seqs.len() != m || grids.len() != m {
        return Err(Error::domain("one sequence and one grid per axis"));
    }
    let mut entries = Vec::new();
    let mut total = 0.0;
    for mask in 1usize..1 << m {
        let gamma: Vec<usize> = (0..m).filter(|j| mask & (1 << j) != 0).collect();
        let r = subset_variation(f, &gamma, seqs, bx, grids, budget)?;
        total += r.value;
        entries.push((gamma, r));
    }
    Ok(TotalVariation { entries, total })
}

fn subset_variation(
    f: &dyn MultiFunction,
    gamma: &[usize],
    seqs: &[LambdaSeq],
    bx: &BoxInterval,
    grids: &[Vec<f64>],
    budget: &SearchBudget,
) -> Result<VariationResult> {
    let m = bx.dim();
    let sub_seqs: Vec<LambdaSeq> = gamma.iter().map(|&j| seqs[j].clone()).collect();
    let sub_grids: Vec<Vec<f64>> = gamma.iter().map(|&j| grids[j].clone()).collect();
    let sections: Vec<Vec<f64>> = (0..m).filter(|j| !gamma.contains(j)).map(|j| grids[j].clone()).collect();
    variation_multi(f, gamma, &sub_seqs, bx, &sub_grids, &sections, budget)
}

/// The `γ`-variation with the weights of axis `q` replaced by the tails
/// `Λ^q_n`, for each `n` in `n_list`.
#[allow(clippy::too_many_arguments)]
pub fn tail_variation_probe(
    f: &dyn MultiFunction,
    seqs: &[LambdaSeq],
    bx: &BoxInterval,
    grids: &[Vec<f64>],
    gamma: &[usize],
    q: usize,
    n_list: &[usize],
    budget: &SearchBudget,
) -> Result<Vec<(usize, f64)>> {
    if !gamma.contains(&q) {
        return Err(Error::domain("the shifted axis must be varied"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("n_list must be increasing"));
    }
    n_list
        .iter()
        .map(|&n| {
            let mut shifted = seqs.to_vec();
            shifted[q] = seqs[q].tail(n);
            subset_variation(f, gamma, &shifted, bx, grids, budget).map(|r| (n, r.value))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{FnHandle, FnMulti, Indicator, OneDim};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    /// Brute force: every set of ≤ k pairwise disjoint grid intervals.
    fn brute_1d(vals: &[f64], lambdas: &[f64], k: usize) -> f64 {
        let n = vals.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut best = 0.0;
        let mut stack: Vec<usize> = Vec::new();
        // subsets of pair indices in increasing order
        fn go(
            pairs: &[(usize, usize)],
            start: usize,
            k: usize,
            stack: &mut Vec<usize>,
            vals: &[f64],
            lambdas: &[f64],
            best: &mut f64,
        ) {
            let disjoint = stack.iter().enumerate().all(|(x, &p)| {
                stack[x + 1..].iter().all(|&q| pairs[p].1 <= pairs[q].0 || pairs[q].1 <= pairs[p].0)
            });
            if !disjoint {
                return;
            }
            let mut ds: Vec<f64> = stack
                .iter()
                .map(|&p| (vals[pairs[p].1] - vals[pairs[p].0]).abs())
                .map(|d| if d < NEGLIGIBLE { 0.0 } else { d })
                .collect();
            ds.sort_by(|a, b| b.total_cmp(a));
            let v: f64 = ds.iter().zip(lambdas).map(|(d, l)| d / l).sum();
            if v > *best {
                *best = v;
            }
            if stack.len() == k {
                return;
            }
            for p in start..pairs.len() {
                stack.push(p);
                go(pairs, p + 1, k, stack, vals, lambdas, best);
                stack.pop();
            }
        }
        go(&pairs, 0, k, &mut stack, vals, lambdas, &mut best);
        best
    }

    #[test]
    fn symmetric_difference_examples() {
        let x = FnMulti::new(1, |p: &[f64]| p[0]);
        assert_eq!(symmetric_difference(&x, &BoxInterval::interval(0.0, 1.0).unwrap()), 1.0);
        let xy = FnMulti::new(2, |p: &[f64]| p[0] * p[1]);
        let bx = BoxInterval::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(symmetric_difference(&xy, &bx), 2.0);
        let g = FnMulti::new(2, |p: &[f64]| p[0].sin());
        assert_eq!(symmetric_difference(&g, &bx), 0.0);
    }

    #[test]
    fn box_validation() {
        assert!(BoxInterval::new(vec![1.0], vec![1.0]).is_err());
        assert!(BoxInterval::new(vec![0.0], vec![4.0]).is_err());
        assert!(IntervalSystem::new(0, vec![(0.0, 0.5), (0.4, 0.8)], (0.0, 1.0)).is_err());
        assert!(IntervalSystem::new(0, vec![(0.0, 0.5), (0.5, 0.8)], (0.0, 1.0)).is_ok());
        assert!(IntervalSystem::new(0, vec![(0.0, 1.5)], (0.0, 1.0)).is_err());
    }

    #[test]
    fn variation_1d_examples() {
        let h = LambdaSeq::harmonic();
        let b = SearchBudget::default();
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let r = variation_1d(&FnHandle::new(|x| x), &h, (0.0, 1.0), &grid, &b).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.exact);
        assert_eq!(r.witness[0].intervals, vec![(0.0, 1.0)]);

        let r = variation_1d(&FnHandle::new(|_| 0.0), &h, (0.0, 1.0), &grid, &b).unwrap();
        assert_eq!(r.value, 0.0);

        let ind = Indicator { lo: 0.4, hi: 0.6 };
        let r = variation_1d(&ind, &h, (0.0, 1.0), &[0.0, 0.2, 0.5, 0.8, 1.0], &b).unwrap();
        assert_eq!(r.value, 1.5);
        // (0.2, 0.5) ties with the lexicographically smaller (0, 0.5)
        assert_eq!(r.witness[0].intervals, vec![(0.0, 0.5), (0.5, 0.8)]);
        assert!((system_sum_1d(&ind, &h, &r.witness[0].intervals) - r.value).abs() < 1e-12);

        assert!(variation_1d(&ind, &h, (0.0, 1.0), &[], &b).is_err());
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let seq = LambdaSeq::power(0.6).unwrap();
        for _ in 0..40 {
            let n = rng.gen_range(2..=9);
            let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let grid = uniform_grid(0.0, 1.0, n);
            let v2 = vals.clone();
            let g2 = grid.clone();
            let f = FnHandle::new(move |x: f64| {
                let i = g2.iter().position(|&g| g == x).unwrap();
                v2[i]
            });
            let b = SearchBudget { max_intervals: 3, ..SearchBudget::default() };
            let r = variation_1d(&f, &seq, (0.0, 1.0), &grid, &b).unwrap();
            let lambdas = lambdas_for(&seq, 3);
            assert_eq!(r.value, brute_1d(&vals, &lambdas, 3));
            assert!(r.exact);
        }
    }

    #[test]
    fn greedy_and_local_search_on_large_grid() {
        // sine with 8 half-waves: extremum-to-extremum intervals are optimal
        let f = FnHandle::new(|x: f64| (8.0 * x).sin());
        // zeros and extrema
        let grid: Vec<f64> = (0..=16).map(|i| i as f64 * PI / 16.0).collect();
        let h = LambdaSeq::harmonic();
        let b = SearchBudget { max_intervals: 20, max_span: Some(2), ..SearchBudget::default() };
        let r = variation_1d(&f, &h, (0.0, PI), &grid, &b).unwrap();
        assert!(!r.exact);
        let c: f64 = r.contributions[0].iter().sum();
        assert!((c - r.value).abs() < 1e-12);
        assert!((system_sum_1d(&f, &h, &r.witness[0].intervals) - r.value).abs() < 1e-12);
        // 7 swings of height 2 and two edge pieces of height 1
        let best: f64 = (1..=7).map(|k| 2.0 / k as f64).sum::<f64>() + 1.0 / 8.0 + 1.0 / 9.0;
        assert!((r.value - best).abs() < 1e-9, "{} vs {}", r.value, best);
    }

    #[test]
    fn local_search_improves_greedy() {
        // one interval over a peak; splitting at the peak does better
        let vals: [f64; 3] = [0.0, 2.0, 1.0];
        let score = |i: usize, j: usize| (vals[j] - vals[i]).abs();
        let lambdas = [1.0, 1.0, 1.0];
        let s = Axis1d {
            n: 3,
            score: &score,
            lambdas: &lambdas,
            budget: SearchBudget { max_intervals: 3, max_span: Some(3), ..SearchBudget::default() },
        };
        let mut set = vec![Cand { i: 0, j: 2, d: 1.0 }];
        s.local_search(&mut set, 3);
        assert_eq!(set_value(&set, &lambdas), 3.0);
    }

    #[test]
    fn product_function_factorizes() {
        let u = |x: f64| (2.0 * x).sin() + 0.3 * x;
        let v = |y: f64| y * y - y;
        let f = FnMulti::new(2, move |p: &[f64]| u(p[0]) * v(p[1]));
        let h = LambdaSeq::harmonic();
        let gx = uniform_grid(0.0, 1.5, 5);
        let gy = uniform_grid(-1.0, 1.0, 5);
        let b = SearchBudget { max_intervals: 2, ..SearchBudget::default() };
        let bx = BoxInterval::new(vec![0.0, -1.0], vec![1.5, 1.0]).unwrap();
        let r = variation_multi(&f, &[0, 1], &[h.clone(), h.clone()], &bx, &[gx.clone(), gy.clone()], &[], &b).unwrap();
        assert!(r.exact);
        let ru = variation_1d(&FnHandle::new(u), &h, (0.0, 1.5), &gx, &b).unwrap();
        let rv = variation_1d(&FnHandle::new(v), &h, (-1.0, 1.0), &gy, &b).unwrap();
        assert!((r.value - ru.value * rv.value).abs() < 1e-12, "{} vs {}", r.value, ru.value * rv.value);
        assert!((system_sum(&f, &[h.clone(), h], &r.witness, &[0.0, 0.0]) - r.value).abs() < 1e-12);
        for row in &r.contributions {
            assert!((row.iter().sum::<f64>() - r.value).abs() < 1e-12);
        }
    }

    #[test]
    fn coordinate_ascent_on_product() {
        let f = FnMulti::new(2, |p: &[f64]| (3.0 * p[0]).sin() * (2.0 * p[1]).cos());
        let h = LambdaSeq::harmonic();
        let g = uniform_grid(-1.0, 1.0, 9);
        let bx = BoxInterval::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let tight = SearchBudget { max_intervals: 3, max_work: 10, ..SearchBudget::default() };
        let r = variation_multi(&f, &[0, 1], &[h.clone(), h.clone()], &bx, &[g.clone(), g.clone()], &[], &tight).unwrap();
        assert!(!r.exact);
        let b = SearchBudget { max_intervals: 3, ..SearchBudget::default() };
        let ru = variation_1d(&FnHandle::new(|x: f64| (3.0 * x).sin()), &h, (-1.0, 1.0), &g, &b).unwrap();
        let rv = variation_1d(&FnHandle::new(|y: f64| (2.0 * y).cos()), &h, (-1.0, 1.0), &g, &b).unwrap();
        assert!((r.value - ru.value * rv.value).abs() < 1e-12);
    }

    #[test]
    fn sections_and_constants() {
        let f = FnMulti::new(2, |p: &[f64]| p[0] + p[1]);
        let h = LambdaSeq::harmonic();
        let bx = BoxInterval::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let g = uniform_grid(0.0, 1.0, 5);
        let b = SearchBudget::default();
        let r = variation_multi(&f, &[0], &[h.clone()], &bx, &[g.clone()], &[vec![0.0, 0.3, 0.9]], &b).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.section, vec![0.0]);

        let c = FnMulti::new(2, |_: &[f64]| 2.0);
        let t = total_variation(&c, &[h.clone(), h.clone()], &bx, &[g.clone(), g.clone()], &b).unwrap();
        assert_eq!(t.total, 0.0);
        assert!(variation_multi(&c, &[], &[], &bx, &[], &[], &b).is_err());
    }

    #[test]
    fn total_variation_examples() {
        let h = LambdaSeq::harmonic();
        let bx = BoxInterval::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let g = uniform_grid(0.0, 1.0, 4);
        let b = SearchBudget { max_intervals: 2, ..SearchBudget::default() };

        let prod = FnMulti::new(2, |p: &[f64]| (p[0] + 0.5) * (1.0 + p[1] * p[1]));
        let t = total_variation(&prod, &[h.clone(), h.clone()], &bx, &[g.clone(), g.clone()], &b).unwrap();
        assert_eq!(t.entries.len(), 3);
        assert!(t.entries.iter().all(|(_, r)| r.value > 0.0));
        let sum: f64 = t.entries.iter().map(|(_, r)| r.value).sum();
        assert_eq!(sum, t.total);

        let only_x = FnMulti::new(2, |p: &[f64]| p[0] * p[0]);
        let t = total_variation(&only_x, &[h.clone(), h.clone()], &bx, &[g.clone(), g.clone()], &b).unwrap();
        for (gamma, r) in &t.entries {
            if gamma.contains(&1) {
                assert_eq!(r.value, 0.0);
            }
        }
        let v = variation_1d(&FnHandle::new(|x: f64| x * x), &h, (0.0, 1.0), &g, &b).unwrap();
        assert!((t.total - v.value).abs() < 1e-15);
    }

    #[test]
    fn tail_probe_decreases() {
        let f = OneDim(FnHandle::new(|x: f64| x));
        let h = LambdaSeq::harmonic();
        let bx = BoxInterval::interval(0.0, 1.0).unwrap();
        let g = uniform_grid(0.0, 1.0, 5);
        let b = SearchBudget::default();
        let rows = tail_variation_probe(&f, &[h], &bx, &[g], &[0], 0, &[0, 1, 4, 9], &b).unwrap();
        for (n, v) in &rows {
            assert!((v - 1.0 / (1 + n) as f64).abs() < 1e-15);
        }
        assert!(rows.windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn grid_refinement_never_decreases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = LambdaSeq::harmonic();
        let b = SearchBudget { max_intervals: 3, ..SearchBudget::default() };
        for _ in 0..20 {
            let c: [f64; 3] = [rng.gen_range(1.0..6.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..3.0)];
            let f = FnHandle::new(move |x: f64| (c[0] * x + c[2]).sin() + c[1] * x);
            let coarse = uniform_grid(0.0, 1.0, 7);
            let fine = uniform_grid(0.0, 1.0, 13);
            let a = variation_1d(&f, &h, (0.0, 1.0), &coarse, &b).unwrap();
            let z = variation_1d(&f, &h, (0.0, 1.0), &fine, &b).unwrap();
            assert!(z.value >= a.value);
        }
    }
}
