//! Puiseux expansions in the dimension `d` for families of critical points.
//!
//! A family is sought as `ξ_i(d) = A_i d^{τ_i} + (lower powers)`. The exponent
//! vectors `τ` come from the requirement that in every equation the largest
//! term exponent is attained at least twice ([`leading_exponents`]); the leading
//! coefficients solve the resulting initial system ([`leading_coefficients`]);
//! and further terms come from Newton iteration over truncated Laurent series
//! in `s = d^{-1/q}` ([`extend_series`]).

mod coef;
mod initial;
mod laurent;
mod series;
mod tropical;
mod univariate;

pub use coef::Coef;
pub use initial::{initial_system, leading_coefficients};
pub use series::{
    extend_series, jacobian_nonsingular_check, reduce_invariant_subsystem, residual_exponent,
    seed_to_numeric, Extension, JacobianCheck, ReducedSystem,
};
pub use tropical::{
    attains_twice, leading_exponents, ExponentCandidate, ExponentSearch, TieContinuum,
    MAX_DENOMINATOR,
};

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// `Σ coef · d^exp`, exponents strictly decreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries {
    terms: Vec<(BigRational, Coef)>,
}

impl PuiseuxSeries {
    pub fn new(terms: Vec<(BigRational, Coef)>) -> Result<Self> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(Error::InvalidArgument(format!(
                    "exponents must be strictly decreasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if terms.iter().any(|(_, c)| c.is_zero()) {
            return Err(Error::InvalidArgument("zero coefficient stored".into()));
        }
        Ok(Self { terms })
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// A single rational term `c · d^e`.
    pub fn monomial(exp: BigRational, coef: BigRational) -> Self {
        if coef.is_zero() {
            return Self::zero();
        }
        Self {
            terms: vec![(exp, Coef::Rational(coef))],
        }
    }

    /// Builds a rational series from `(exponent, coefficient)` integer-ratio pairs.
    pub fn from_rationals(terms: &[(BigRational, BigRational)]) -> Result<Self> {
        Self::new(
            terms
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e.clone(), Coef::Rational(c.clone())))
                .collect(),
        )
    }

    pub fn terms(&self) -> &[(BigRational, Coef)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(BigRational, Coef)> {
        self.terms.first()
    }

    /// Coefficient of `d^exp` (zero if absent).
    pub fn coeff(&self, exp: &BigRational) -> Coef {
        self.terms
            .iter()
            .find(|(e, _)| e == exp)
            .map(|(_, c)| c.clone())
            .unwrap_or(Coef::Rational(BigRational::zero()))
    }

    pub fn is_rational(&self) -> bool {
        self.terms
            .iter()
            .all(|(_, c)| matches!(c, Coef::Rational(_)))
    }

    /// Keeps only terms with exponent `>= min_exp`.
    pub fn truncated(&self, min_exp: &BigRational) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e >= min_exp)
                .cloned()
                .collect(),
        }
    }

    /// Partial sum at a numeric `d`.
    pub fn eval(&self, d: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64() * d.powf(e.to_f64().unwrap()))
            .sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| json!({"exp": e.to_string(), "coef": c.to_string()}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("series must be a JSON array".into()))?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            let e = t
                .get("exp")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse("term without `exp`".into()))?;
            let c = t
                .get("coef")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse("term without `coef`".into()))?;
            terms.push((parse_rational(e)?, Coef::parse(c)?));
        }
        Self::new(terms)
    }
}

impl std::fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*d^({e})")?;
            }
        }
        Ok(())
    }
}

/// Parses `a`, `-a/b` (ASCII or Unicode minus).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim().replace('−', "-");
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, t.clone()),
    };
    let v: BigRational = if let Some((n, dn)) = body.split_once('/') {
        let n: num_bigint::BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational `{text}`")))?;
        let dn: num_bigint::BigInt = dn
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational `{text}`")))?;
        if dn.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{text}`")));
        }
        BigRational::new(n, dn)
    } else {
        let n: num_bigint::BigInt = body
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational `{text}`")))?;
        BigRational::from_integer(n)
    };
    Ok(if neg { -v } else { v })
}

/// Evaluates each series at `d`.
pub fn eval_series(series: &[PuiseuxSeries], d: f64) -> Vec<f64> {
    series.iter().map(|s| s.eval(d)).collect()
}

/// `true` if `x` has denominator at most `max_den`.
pub(crate) fn small_denominator(x: &BigRational, max_den: i64) -> bool {
    *x.denom() <= num_bigint::BigInt::from(max_den)
}
