//! Reals as decimal strings with 17 significant digits.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// 17 significant digits: enough for every `f64` to reload bit-for-bit.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    s.trim().parse().ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Real(pub f64);

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt17(self.0))
    }
}

struct RealVisitor;

impl Visitor<'_> for RealVisitor {
    type Value = Real;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a real number as a decimal string")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
        parse_real(v).map(Real).ok_or_else(|| E::custom(format!("bad real {v:?}")))
    }

    // plain JSON numbers are accepted on input
    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
        Ok(Real(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
        Ok(Real(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
        Ok(Real(v as f64))
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(RealVisitor)
    }
}

pub fn reals(xs: &[f64]) -> Vec<Real> {
    xs.iter().copied().map(Real).collect()
}

pub fn unreal(xs: &[Real]) -> Vec<f64> {
    xs.iter().map(|r| r.0).collect()
}
