//! Truncated Laurent series in `s` with exact rational coefficients.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Precision of an exact series.
pub(crate) const EXACT: i64 = i64::MAX / 4;

/// `Σ c_k s^k + O(s^prec)`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Laurent {
    pub coeffs: BTreeMap<i64, BigRational>,
    pub prec: i64,
}

impl Laurent {
    pub fn zero() -> Self {
        Self {
            coeffs: BTreeMap::new(),
            prec: EXACT,
        }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(k: i64, c: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        Self {
            coeffs,
            prec: EXACT,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// Lowest exponent with a known nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Valuation, or the precision when the known part vanishes.
    pub fn val_or_prec(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn truncate(mut self, prec: i64) -> Self {
        if prec < self.prec {
            self.prec = prec;
            self.coeffs.retain(|&k, _| k < prec);
        }
        self
    }

    pub fn coeff(&self, k: i64) -> BigRational {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn cleaned(mut self) -> Self {
        let p = self.prec;
        self.coeffs.retain(|&k, c| k < p && !c.is_zero());
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *coeffs.entry(*k).or_insert_with(BigRational::zero) += c;
        }
        Self {
            coeffs,
            prec: self.prec.min(other.prec),
        }
        .cleaned()
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product, truncated at `cap`.
    pub fn mul(&self, other: &Self, cap: i64) -> Self {
        let (va, vb) = (self.val_or_prec(), other.val_or_prec());
        let pa = if self.is_exact() {
            EXACT
        } else {
            self.prec + vb
        };
        let pb = if other.is_exact() {
            EXACT
        } else {
            other.prec + va
        };
        let prec = if self.coeffs.is_empty() && self.is_exact()
            || other.coeffs.is_empty() && other.is_exact()
        {
            EXACT
        } else {
            pa.min(pb).min(cap)
        };
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if i + j >= prec {
                    break;
                }
                *coeffs.entry(i + j).or_insert_with(BigRational::zero) += a * b;
            }
        }
        Self { coeffs, prec }.cleaned()
    }

    /// Multiplicative inverse, truncated at `cap`; `None` if the known part vanishes.
    pub fn inv(&self, cap: i64) -> Option<Self> {
        let v = self.valuation()?;
        let lead = self.coeffs[&v].clone();
        let prec = if self.is_exact() {
            cap
        } else {
            (self.prec - 2 * v).min(cap)
        };
        let mut out: BTreeMap<i64, BigRational> = BTreeMap::new();
        let inv_lead = BigRational::one() / &lead;
        for k in -v..prec {
            // Coefficient of s^k in the inverse, from Σ_j a_{v+j} b_{k-j} = [k == -v].
            let mut acc = if k == -v {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            for (e, a) in self.coeffs.range(v + 1..) {
                let j = e - v;
                if let Some(b) = out.get(&(k - j)) {
                    acc -= a * b;
                }
            }
            let b = acc * &inv_lead;
            if !b.is_zero() {
                out.insert(k, b);
            }
        }
        Some(Self { coeffs: out, prec })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::poly::q;

    #[test]
    fn inverse_round_trip() {
        // (s^-1 + 2 + s^3)
        let mut a = Laurent::monomial(-1, q(1));
        a = a
            .add(&Laurent::constant(q(2)))
            .add(&Laurent::monomial(3, q(1)));
        let b = a.inv(12).unwrap();
        let p = a.mul(&b, 12);
        assert_eq!(p.coeff(0), q(1));
        for k in 1..p.prec {
            assert_eq!(p.coeff(k), q(0), "s^{k}");
        }
        assert!(p.prec >= 10);
    }

    #[test]
    fn precision_propagates() {
        let a = Laurent::monomial(0, q(1))
            .add(&Laurent::monomial(1, q(1)))
            .truncate(4);
        let b = Laurent::monomial(-2, q(1));
        let p = a.mul(&b, 100);
        assert_eq!(p.prec, 2);
    }
}
