use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

use super::parse_rational;

/// A real series coefficient.
#[derive(Clone, Debug, PartialEq)]
pub enum Coef {
    Rational(BigRational),
    /// `coef · radicand^{1/index}`, using the real (sign-preserving) root.
    Radical {
        coef: BigRational,
        radicand: BigRational,
        index: u32,
    },
    /// A root known only numerically.
    Approx(f64),
}

/// Real `n`-th root, sign-preserving for odd `n`.
pub fn real_root(x: f64, n: u32) -> f64 {
    if n % 2 == 1 {
        x.signum() * x.abs().powf(1.0 / n as f64)
    } else {
        x.powf(1.0 / n as f64)
    }
}

impl Coef {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coef::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Coef::Radical {
                coef,
                radicand,
                index,
            } => coef.to_f64().unwrap() * real_root(radicand.to_f64().unwrap(), *index),
            Coef::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coef::Rational(r) => r.is_zero(),
            Coef::Radical { coef, radicand, .. } => coef.is_zero() || radicand.is_zero(),
            Coef::Approx(x) => *x == 0.0,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coef::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Coef::Approx(_))
    }

    /// Parses the output of `Display`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().replace('−', "-");
        if let Some(open) = t.find("(") {
            // [coef*](radicand)^(1/index)
            let (head, rest) = t.split_at(open);
            let coef = match head.trim_end_matches('*').trim() {
                "" => BigRational::one(),
                "-" => -BigRational::one(),
                h => parse_rational(h)?,
            };
            let close = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced radical `{text}`")))?;
            let radicand = parse_rational(&rest[1..close])?;
            let idx = rest[close + 1..]
                .trim()
                .strip_prefix("^(1/")
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad radical `{text}`")))?;
            let index: u32 = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad radical index in `{text}`")))?;
            return Ok(Coef::Radical {
                coef,
                radicand,
                index,
            });
        }
        if t.contains('.') || t.contains('e') {
            return t
                .parse::<f64>()
                .map(Coef::Approx)
                .map_err(|_| Error::Parse(format!("bad coefficient `{text}`")));
        }
        Ok(Coef::Rational(parse_rational(&t)?))
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Rational(r) => write!(f, "{r}"),
            Coef::Radical {
                coef,
                radicand,
                index,
            } => {
                if coef.is_one() {
                    write!(f, "({radicand})^(1/{index})")
                } else if (-coef.clone()).is_one() {
                    write!(f, "-({radicand})^(1/{index})")
                } else {
                    write!(f, "{coef}*({radicand})^(1/{index})")
                }
            }
            Coef::Approx(x) => {
                if x.fract() == 0.0 && x.abs() < 1e15 {
                    write!(f, "{x:.1}")
                } else {
                    write!(f, "{x:e}")
                }
            }
        }
    }
}
