//! Function handles: deterministic evaluators on `T = [-π, π]` and `T^m`.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math wins when a dependency links std
use num_traits::Float;

use crate::{Error, Result};

/// A real function of one variable on `T`, 2π-periodic after continuation.
pub trait RealFunction {
    fn eval(&self, x: f64) -> f64;

    /// Points of `[-π, π]` where the function or its derivative jumps.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// A closed interval outside of which the function vanishes on `T`.
    fn support(&self) -> Option<(f64, f64)> {
        None
    }

    /// `(f(x - 0), f(x + 0))` when known in closed form.
    fn one_sided_limits(&self, _x: f64) -> Option<(f64, f64)> {
        None
    }

    /// Highest angular frequency present, for sizing quadrature panels.
    fn max_frequency(&self) -> Option<f64> {
        None
    }
}

impl<T: RealFunction + ?Sized> RealFunction for &T {
    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
    fn support(&self) -> Option<(f64, f64)> {
        (**self).support()
    }
    fn one_sided_limits(&self, x: f64) -> Option<(f64, f64)> {
        (**self).one_sided_limits(x)
    }
    fn max_frequency(&self) -> Option<f64> {
        (**self).max_frequency()
    }
}

impl<T: RealFunction + ?Sized> RealFunction for Box<T> {
    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
    fn support(&self) -> Option<(f64, f64)> {
        (**self).support()
    }
    fn one_sided_limits(&self, x: f64) -> Option<(f64, f64)> {
        (**self).one_sided_limits(x)
    }
    fn max_frequency(&self) -> Option<f64> {
        (**self).max_frequency()
    }
}

/// A closure with optional breakpoint and support declarations.
#[derive(Clone)]
pub struct FnHandle<F> {
    f: F,
    breakpoints: Vec<f64>,
    support: Option<(f64, f64)>,
}

impl<F: Fn(f64) -> f64> FnHandle<F> {
    pub fn new(f: F) -> Self {
        FnHandle {
            f,
            breakpoints: Vec::new(),
            support: None,
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }
}

impl<F: Fn(f64) -> f64> RealFunction for FnHandle<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
    fn support(&self) -> Option<(f64, f64)> {
        self.support
    }
}

/// Maps `x` to its representative in `[-π, π)`.
pub fn wrap(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let two_pi = 2.0 * PI;
    let y = x + PI;
    let r = y - two_pi * (y / two_pi).floor() - PI;
    if r >= PI {
        r - two_pi
    } else {
        r
    }
}

/// A real function on `T^m`.
pub trait MultiFunction {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
}

impl<T: MultiFunction + ?Sized> MultiFunction for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
}

/// A closure of `m` variables.
pub struct FnMulti<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnMulti<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnMulti { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64> MultiFunction for FnMulti<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// A one-variable function seen as a function on `T^1`.
pub struct OneDim<T>(pub T);

impl<T: RealFunction> MultiFunction for OneDim<T> {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(x[0])
    }
}

pub type BoxedFunction = Box<dyn RealFunction + Send + Sync>;

/// `coeff · Π_j factors[j](x^j)`.
pub struct SeparableTerm {
    pub coeff: f64,
    pub factors: Vec<BoxedFunction>,
}

/// A finite sum of separable terms on `T^m`.
pub struct SeparableSum {
    dim: usize,
    terms: Vec<SeparableTerm>,
}

impl SeparableSum {
    pub fn new(dim: usize) -> Self {
        SeparableSum {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, coeff: f64, factors: Vec<BoxedFunction>) -> Result<()> {
        if factors.len() != self.dim {
            return Err(Error::domain("separable term has the wrong number of factors"));
        }
        self.terms.push(SeparableTerm { coeff, factors });
        Ok(())
    }

    pub fn terms(&self) -> &[SeparableTerm] {
        &self.terms
    }
}

impl MultiFunction for SeparableSum {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff
                    * t.factors
                        .iter()
                        .zip(x)
                        .map(|(f, &xj)| f.eval(xj))
                        .product::<f64>()
            })
            .sum()
    }
}

/// `a_0/2 + Σ_{k≥1} (a_k cos kx + b_k sin kx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPolynomial {
    /// `cos` holds `a_0 … a_d`, `sin` holds `b_1 … b_d`.
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        TrigPolynomial { cos, sin }
    }

    pub fn degree(&self) -> usize {
        self.cos.len().saturating_sub(1).max(self.sin.len())
    }
}

impl RealFunction for TrigPolynomial {
    fn eval(&self, x: f64) -> f64 {
        let mut s = self.cos.first().map_or(0.0, |a0| 0.5 * a0);
        for (k, a) in self.cos.iter().enumerate().skip(1) {
            s += a * (k as f64 * x).cos();
        }
        for (k, b) in self.sin.iter().enumerate() {
            s += b * ((k + 1) as f64 * x).sin();
        }
        s
    }
    fn max_frequency(&self) -> Option<f64> {
        Some(self.degree() as f64)
    }
}

/// `sign(x)(1 - |x|/π)`: odd, with a unit jump each side at 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct OddJump;

impl RealFunction for OddJump {
    fn eval(&self, x: f64) -> f64 {
        let x = wrap(x);
        if x == 0.0 {
            0.0
        } else {
            x.signum() * (1.0 - x.abs() / PI)
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        alloc::vec![0.0]
    }
    fn one_sided_limits(&self, x: f64) -> Option<(f64, f64)> {
        (wrap(x) == 0.0).then_some((-1.0, 1.0))
    }
}

/// `1 - x/π` on `(0, π]`, `-(1 + x/π)^2` on `[-π, 0)`: one-sided limits
/// `∓1` at the origin, continuous at `±π`, not odd.
#[derive(Debug, Clone, Copy, Default)]
pub struct SkewJump;

impl RealFunction for SkewJump {
    fn eval(&self, x: f64) -> f64 {
        let x = wrap(x);
        if x > 0.0 {
            1.0 - x / PI
        } else if x < 0.0 {
            let u = 1.0 + x / PI;
            -u * u
        } else {
            0.0
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        alloc::vec![0.0]
    }
    fn one_sided_limits(&self, x: f64) -> Option<(f64, f64)> {
        (wrap(x) == 0.0).then_some((-1.0, 1.0))
    }
}

/// Indicator of the open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy)]
pub struct Indicator {
    pub lo: f64,
    pub hi: f64,
}

impl RealFunction for Indicator {
    fn eval(&self, x: f64) -> f64 {
        if x > self.lo && x < self.hi {
            1.0
        } else {
            0.0
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        alloc::vec![self.lo, self.hi]
    }
    fn support(&self) -> Option<(f64, f64)> {
        Some((self.lo, self.hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn wrap_into_fundamental_domain() {
        assert_eq!(wrap(0.5), 0.5);
        assert!((wrap(PI + 0.25) - (-PI + 0.25)).abs() < 1e-15);
        assert!((wrap(-PI - 0.25) - (PI - 0.25)).abs() < 1e-15);
        assert_eq!(wrap(-PI), -PI);
        assert!((wrap(PI) + PI).abs() < 1e-15);
    }

    #[test]
    fn jumps_have_zero_average_limits() {
        for lim in [OddJump.one_sided_limits(0.0), SkewJump.one_sided_limits(0.0)] {
            let (l, r) = lim.unwrap();
            assert_eq!(l + r, 0.0);
        }
        assert!((SkewJump.eval(1e-12) - 1.0).abs() < 1e-12);
        assert!((SkewJump.eval(-1e-12) + 1.0).abs() < 1e-12);
        assert!(SkewJump.eval(PI).abs() < 1e-15 && SkewJump.eval(-PI).abs() < 1e-15);
        assert_eq!(OddJump.eval(-0.7), -OddJump.eval(0.7));
    }

    #[test]
    fn separable_sum_evaluates_products() {
        let mut s = SeparableSum::new(2);
        s.push(2.0, vec![Box::new(FnHandle::new(|x| x)), Box::new(FnHandle::new(|y| y * y))])
            .unwrap();
        assert_eq!(s.eval(&[3.0, 2.0]), 24.0);
        assert!(s.push(1.0, vec![Box::new(OddJump)]).is_err());
    }

    #[test]
    fn trig_polynomial_evaluation() {
        let p = TrigPolynomial::new(vec![2.0, 0.0, 1.0], vec![0.5]);
        let x = 0.3_f64;
        assert!((p.eval(x) - (1.0 + (2.0 * x).cos() + 0.5 * x.sin())).abs() < 1e-15);
        assert_eq!(p.degree(), 2);
    }
}
