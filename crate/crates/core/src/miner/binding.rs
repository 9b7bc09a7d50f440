//! Concrete series behind the variables `u` and `v` of a relation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bigreal::BigReal;
use crate::error::{Error, Result};
use crate::numeric::{self, EvalPoint};
use crate::series::{a_series, eta5_series, modulus_series, parse_rat, PuiseuxSeries, Rat, ThetaSpec};

/// `u = A(a,p; q^nome)^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UBinding {
    pub spec: ThetaSpec,
    pub power: u32,
    pub nome: u32,
}

impl UBinding {
    pub fn new(spec: ThetaSpec, power: u32) -> Self {
        UBinding { spec, power, nome: 1 }
    }

    pub fn with_nome(mut self, nome: u32) -> Self {
        self.nome = nome;
        self
    }

    /// `u` known below `q^order`.
    pub fn series(&self, order: Rat) -> Result<PuiseuxSeries> {
        if self.power == 0 || self.nome == 0 {
            return Err(Error::domain("u binding needs a positive power and nome scale"));
        }
        let n = Rat::from_integer(self.nome as i64);
        let e = self.power as i64;
        let lead = self.spec.leading_exponent();
        let pad = (-lead * (e - 1)).max(Rat::from_integer(0));
        let base = a_series(&self.spec, order / n + pad + Rat::from_integer(1))?;
        Ok(base.rescale(n).pow(e)?.truncate(order))
    }

    pub fn eval(&self, pt: &EvalPoint) -> Result<BigReal> {
        let q = pt.q.powi(self.nome as i64);
        Ok(numeric::eval_a(&self.spec, &q, pt.digits())?.powi(self.power as i64))
    }
}

impl fmt::Display for UBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = if self.nome == 1 {
            "q".to_string()
        } else {
            format!("q^{}", self.nome)
        };
        write!(f, "A({},{};{})^{}", self.spec.a(), self.spec.p(), q, self.power)
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct UBindingJson {
    a: String,
    p: String,
    power: u32,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    nome: u32,
}

fn one() -> u32 {
    1
}

fn is_one(n: &u32) -> bool {
    *n == 1
}

impl From<&UBinding> for UBindingJson {
    fn from(b: &UBinding) -> Self {
        UBindingJson {
            a: b.spec.a().to_string(),
            p: b.spec.p().to_string(),
            power: b.power,
            nome: b.nome,
        }
    }
}

impl TryFrom<UBindingJson> for UBinding {
    type Error = Error;
    fn try_from(j: UBindingJson) -> Result<Self> {
        let spec = ThetaSpec::new(parse_rat(&j.a)?, parse_rat(&j.p)?)?;
        Ok(UBinding {
            spec,
            power: j.power,
            nome: j.nome,
        })
    }
}

/// The modulus-family variable a relation is taken against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VBinding {
    /// `m(q) = k²`
    #[serde(rename = "m")]
    M,
    /// `k = √m(q)`
    #[serde(rename = "k", alias = "sqrt_m")]
    SqrtM,
    /// `m(q²)²`
    #[serde(rename = "m2sq", alias = "m_q2_squared")]
    MQ2Squared,
    /// `eta5(q⁴)⁵`
    #[serde(rename = "eta5q4p5", alias = "eta5_q4_pow5")]
    Eta5Q4Pow5,
    /// `eta5(q²)⁵`
    #[serde(rename = "eta5q2p5", alias = "eta5_q2_pow5")]
    Eta5Q2Pow5,
}

impl VBinding {
    pub fn name(&self) -> &'static str {
        match self {
            VBinding::M => "m",
            VBinding::SqrtM => "k",
            VBinding::MQ2Squared => "m2sq",
            VBinding::Eta5Q4Pow5 => "eta5q4p5",
            VBinding::Eta5Q2Pow5 => "eta5q2p5",
        }
    }

    /// Accepts the short names and the spelled-out aliases
    /// `sqrt_m`, `m_q2_squared`, `eta5_q4_pow5`, `eta5_q2_pow5`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = match s {
            "sqrt_m" => "k",
            "m_q2_squared" => "m2sq",
            "eta5_q4_pow5" => "eta5q4p5",
            "eta5_q2_pow5" => "eta5q2p5",
            other => other,
        };
        [
            VBinding::M,
            VBinding::SqrtM,
            VBinding::MQ2Squared,
            VBinding::Eta5Q4Pow5,
            VBinding::Eta5Q2Pow5,
        ]
        .into_iter()
        .find(|b| b.name() == s)
        .ok_or_else(|| {
            Error::Parse(format!(
                "unknown v binding `{s}` (expected m, k, m2sq, eta5q4p5 or eta5q2p5)"
            ))
        })
    }

    /// `v` known below `q^order`.
    pub fn series(&self, order: Rat) -> Result<PuiseuxSeries> {
        let one = Rat::from_integer(1);
        let s = match self {
            VBinding::M => modulus_series(order),
            VBinding::SqrtM => modulus_series(order + one).sqrt_series()?,
            VBinding::MQ2Squared => modulus_series(order / 2 + one)
                .rescale(Rat::from_integer(2))
                .pow(2)?,
            VBinding::Eta5Q4Pow5 => eta5_power(order, 4)?,
            VBinding::Eta5Q2Pow5 => eta5_power(order, 2)?,
        };
        Ok(s.truncate(order))
    }

    pub fn eval(&self, pt: &EvalPoint) -> Result<BigReal> {
        let d = pt.digits();
        Ok(match self {
            VBinding::M => pt.m(),
            VBinding::SqrtM => pt.k.clone(),
            VBinding::MQ2Squared => {
                let (k2, _) = numeric::modulus_from_nome(&pt.q.powi(2))?;
                k2.powi(4)
            }
            VBinding::Eta5Q4Pow5 => numeric::eval_eta5(&pt.q.powi(4), d)?.powi(5),
            VBinding::Eta5Q2Pow5 => numeric::eval_eta5(&pt.q.powi(2), d)?.powi(5),
        })
    }
}

fn eta5_power(order: Rat, scale: i64) -> Result<PuiseuxSeries> {
    let s = Rat::from_integer(scale);
    eta5_series(order / s + Rat::from_integer(1)).rescale(s).pow(5)
}

impl fmt::Display for VBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            VBinding::M => "m(q)",
            VBinding::SqrtM => "k = m(q)^(1/2)",
            VBinding::MQ2Squared => "m(q^2)^2",
            VBinding::Eta5Q4Pow5 => "eta5(q^4)^5",
            VBinding::Eta5Q2Pow5 => "eta5(q^2)^5",
        };
        f.write_str(text)
    }
}
