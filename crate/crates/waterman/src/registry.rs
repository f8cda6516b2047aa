//! The closed set of functions the command line can name.

use std::f64::consts::PI;

use waterman_core::counterexample::{stage_f, WindowedSine};
use waterman_core::function::{BoxedFunction, FnHandle, Indicator, OddJump, RealFunction, SkewJump, TrigPolynomial};

use crate::commands::CliError;

pub const NAMES: &[&str] = &["zero", "constant", "linear", "jump", "skew_jump", "indicator", "trig", "stage_f"];

/// Parameters some registry entries need.
#[derive(Debug, Clone, Copy, Default)]
pub struct Params {
    /// `N` of `stage_f`.
    pub n: Option<usize>,
    /// `α_1` of `stage_f`.
    pub alpha1: Option<f64>,
    /// Interval of `indicator`.
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

pub enum Registered {
    /// Kept concrete so means can use exact Fourier coefficients.
    Trig(TrigPolynomial),
    Stage(WindowedSine),
    Other(BoxedFunction),
}

impl Registered {
    pub fn function(&self) -> &(dyn RealFunction + Send + Sync) {
        match self {
            Registered::Trig(p) => p,
            Registered::Stage(f) => f,
            Registered::Other(f) => f.as_ref(),
        }
    }

    pub fn boxed(self) -> BoxedFunction {
        match self {
            Registered::Trig(p) => Box::new(p),
            Registered::Stage(f) => Box::new(f),
            Registered::Other(f) => f,
        }
    }

    /// `(f(x-0), f(x+0))`, equal sides where no jump is declared.
    pub fn limits(&self, x: f64) -> (f64, f64) {
        let f = self.function();
        f.one_sided_limits(x).unwrap_or_else(|| {
            let v = f.eval(x);
            (v, v)
        })
    }
}

/// `0.5 + cos x - 0.25 sin 2x + 0.3 sin 3x + 0.1 cos 4x`.
pub fn sample_trig() -> TrigPolynomial {
    TrigPolynomial::new(vec![1.0, 1.0, 0.0, 0.0, 0.1], vec![0.0, -0.25, 0.3])
}

pub fn lookup(name: &str, p: &Params) -> Result<Registered, CliError> {
    let f = match name {
        "zero" => Registered::Other(Box::new(FnHandle::new(|_| 0.0))),
        "constant" => Registered::Other(Box::new(FnHandle::new(|_| 1.0))),
        "linear" => Registered::Other(Box::new(FnHandle::new(|x| x).with_breakpoints(vec![PI]))),
        "jump" => Registered::Other(Box::new(OddJump)),
        "skew_jump" => Registered::Other(Box::new(SkewJump)),
        "indicator" => {
            let (lo, hi) = (p.lo.unwrap_or(0.0), p.hi.unwrap_or(1.0));
            if !(lo < hi) {
                return Err(CliError::Usage("indicator needs lo < hi".into()));
            }
            Registered::Other(Box::new(Indicator { lo, hi }))
        }
        "trig" => Registered::Trig(sample_trig()),
        "stage_f" => {
            let n = p.n.ok_or_else(|| CliError::Usage("stage_f needs --N".into()))?;
            let alpha1 = p.alpha1.ok_or_else(|| CliError::Usage("stage_f needs --alpha1".into()))?;
            Registered::Stage(stage_f(n, alpha1)?)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown function {other:?}; expected one of {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        let p = Params {
            n: Some(10),
            alpha1: Some(-0.3),
            ..Params::default()
        };
        for name in NAMES {
            assert!(lookup(name, &p).is_ok(), "{name}");
        }
        assert!(matches!(lookup("nope", &p), Err(CliError::Usage(_))));
        assert!(matches!(lookup("stage_f", &Params::default()), Err(CliError::Usage(_))));
    }

    #[test]
    fn jump_limits() {
        let f = lookup("skew_jump", &Params::default()).unwrap();
        assert_eq!(f.limits(0.0), (-1.0, 1.0));
        let g = lookup("linear", &Params::default()).unwrap();
        assert_eq!(g.limits(0.5), (0.5, 0.5));
    }

    #[test]
    fn sample_trig_values() {
        let p = sample_trig();
        let x = 0.7f64;
        let want = 0.5 + x.cos() - 0.25 * (2.0 * x).sin() + 0.3 * (3.0 * x).sin() + 0.1 * (4.0 * x).cos();
        assert!((p.eval(x) - want).abs() < 1e-15);
        assert_eq!(p.degree(), 4);
    }
}
