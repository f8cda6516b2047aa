//! JSON form of a [`DiagonalSpec`]; reals are 17-digit decimal strings.

use serde::{Deserialize, Serialize};
use waterman_core::counterexample::{Check, DiagonalSpec, Relation, StageParams, Threshold};
use waterman_core::CesaroOrder;

use crate::commands::CliError;
use crate::real::{reals, unreal, Real};

pub const FORMAT: &str = "waterman-diagonal-spec/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub format: String,
    pub alphas: Vec<Real>,
    pub rho: Real,
    pub b_hat: Real,
    pub cap: usize,
    pub stages: Vec<StageFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageFile {
    pub k: usize,
    pub n: usize,
    pub nu: Vec<Real>,
    pub a: Real,
    pub b: Real,
    pub c: Vec<Real>,
    pub d: Vec<Real>,
    pub delta: Vec<Real>,
    pub thresholds: Vec<ThresholdFile>,
    pub growth: Option<[Real; 2]>,
    pub tent_retries: usize,
    pub certificates: Vec<CheckFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdFile {
    pub axis: usize,
    pub m: usize,
    pub samples: usize,
    pub worst: Real,
    /// Thresholds are verified on samples of `(M, 4M]` only.
    pub sampled: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckFile {
    pub name: String,
    pub value: Real,
    pub coarse: Real,
    pub spectral: Option<Real>,
    pub relation: String,
    pub threshold: Real,
    pub holds: bool,
    pub required: bool,
}

impl From<&Check> for CheckFile {
    fn from(c: &Check) -> Self {
        CheckFile {
            name: c.name.clone(),
            value: Real(c.value),
            coarse: Real(c.coarse),
            spectral: c.spectral.map(Real),
            relation: c.relation.symbol().to_string(),
            threshold: Real(c.threshold),
            holds: c.holds,
            required: c.required,
        }
    }
}

fn relation(s: &str) -> Result<Relation, CliError> {
    Ok(match s {
        ">" => Relation::Greater,
        "<" => Relation::Less,
        "<=" => Relation::AtMost,
        ">=" => Relation::AtLeast,
        _ => return Err(CliError::Usage(format!("unknown relation {s:?}"))),
    })
}

impl CheckFile {
    pub fn to_check(&self) -> Result<Check, CliError> {
        Ok(Check {
            name: self.name.clone(),
            value: self.value.0,
            coarse: self.coarse.0,
            spectral: self.spectral.map(|r| r.0),
            threshold: self.threshold.0,
            relation: relation(&self.relation)?,
            holds: self.holds,
            required: self.required,
        })
    }
}

impl From<&DiagonalSpec> for SpecFile {
    fn from(spec: &DiagonalSpec) -> Self {
        SpecFile {
            format: FORMAT.to_string(),
            alphas: reals(spec.order.alphas()),
            rho: Real(spec.rho),
            b_hat: Real(spec.b_hat),
            cap: spec.cap,
            stages: spec
                .stages
                .iter()
                .map(|st| StageFile {
                    k: st.k,
                    n: st.n,
                    nu: reals(&st.nu),
                    a: Real(st.a),
                    b: Real(st.b),
                    c: reals(&st.c),
                    d: reals(&st.d),
                    delta: reals(&st.delta),
                    thresholds: st
                        .thresholds
                        .iter()
                        .map(|t| ThresholdFile {
                            axis: t.axis,
                            m: t.m,
                            samples: t.samples,
                            worst: Real(t.worst),
                            sampled: true,
                        })
                        .collect(),
                    growth: st.growth.map(|(r, l)| [Real(r), Real(l)]),
                    tent_retries: st.tent_retries,
                    certificates: st.certificates.iter().map(CheckFile::from).collect(),
                })
                .collect(),
        }
    }
}

impl SpecFile {
    pub fn to_spec(&self) -> Result<DiagonalSpec, CliError> {
        if self.format != FORMAT {
            return Err(CliError::Usage(format!("unsupported spec format {:?}", self.format)));
        }
        let order = CesaroOrder::new(unreal(&self.alphas))?;
        let stages = self
            .stages
            .iter()
            .map(|st| {
                Ok(StageParams {
                    k: st.k,
                    n: st.n,
                    nu: unreal(&st.nu),
                    a: st.a.0,
                    b: st.b.0,
                    c: unreal(&st.c),
                    d: unreal(&st.d),
                    delta: unreal(&st.delta),
                    thresholds: st
                        .thresholds
                        .iter()
                        .map(|t| Threshold {
                            axis: t.axis,
                            m: t.m,
                            samples: t.samples,
                            worst: t.worst.0,
                        })
                        .collect(),
                    growth: st.growth.map(|[r, l]| (r.0, l.0)),
                    tent_retries: st.tent_retries,
                    certificates: st.certificates.iter().map(CheckFile::to_check).collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(DiagonalSpec {
            order,
            rho: self.rho.0,
            b_hat: self.b_hat.0,
            cap: self.cap,
            stages,
        })
    }
}
