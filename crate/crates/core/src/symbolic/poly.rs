//! Sparse multivariate polynomials over `Q` in `ξ_1..ξ_N` and the symbol `d`.
//!
//! Exponent vectors have length `N + 1`; the last slot is the exponent of `d`.
//! Terms are kept in a map ordered by graded lexicographic order and zero
//! coefficients are never stored.
//!
//! The text format is a signed sum of products such as
//! `3*x2^5*d^3 - 15/2*x1*x2^4 + 1`, with variables `x1..xN` and `d`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    nxi: usize,
    terms: BTreeMap<Mono, BigRational>,
}

impl MPoly {
    pub fn zero(nxi: usize) -> Self {
        Self {
            nxi,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nxi: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nxi);
        p.add_term(vec![0; nxi + 1], c);
        p
    }

    pub fn int(nxi: usize, c: i64) -> Self {
        Self::constant(nxi, q(c))
    }

    pub fn one(nxi: usize) -> Self {
        Self::int(nxi, 1)
    }

    /// The variable `ξ_{a+1}` (zero-based `a`).
    pub fn xi(nxi: usize, a: usize) -> Self {
        assert!(
            a < nxi,
            "variable index {a} out of range for {nxi} unknowns"
        );
        let mut e = vec![0; nxi + 1];
        e[a] = 1;
        Self::monomial(e, BigRational::one())
    }

    /// The dimension symbol `d`.
    pub fn d(nxi: usize) -> Self {
        let mut e = vec![0; nxi + 1];
        e[nxi] = 1;
        Self::monomial(e, BigRational::one())
    }

    /// `c + m·d` as a polynomial.
    pub fn linear_in_d(nxi: usize, m: i64, c: i64) -> Self {
        &Self::d(nxi).scale(&q(m)) + &Self::int(nxi, c)
    }

    pub fn monomial(exps: Vec<u32>, coef: BigRational) -> Self {
        assert!(!exps.is_empty());
        let mut p = Self::zero(exps.len() - 1);
        p.add_term(exps, coef);
        p
    }

    pub fn from_terms(
        nxi: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>,
    ) -> Self {
        let mut p = Self::zero(nxi);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Number of `ξ` unknowns.
    pub fn nxi(&self) -> usize {
        self.nxi
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().rev().map(|(m, c)| (m.0.as_slice(), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(&Mono(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        assert_eq!(exps.len(), self.nxi + 1, "exponent vector length");
        if c.is_zero() {
            return;
        }
        let key = Mono(exps);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn check_compat(&self, other: &Self) {
        assert_eq!(
            self.nxi, other.nxi,
            "polynomials over different variable sets"
        );
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nxi);
        }
        Self {
            nxi: self.nxi,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.nxi);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative; `var == nxi` differentiates in `d`.
    pub fn diff(&self, var: usize) -> Self {
        assert!(var <= self.nxi);
        let mut out = Self::zero(self.nxi);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.0.clone();
            m2[var] -= 1;
            out.add_term(m2, c * q(e as i64));
        }
        out
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// True iff no `ξ` appears.
    pub fn is_d_only(&self) -> bool {
        self.terms
            .keys()
            .all(|m| m.0[..self.nxi].iter().all(|&e| e == 0))
    }

    pub fn eval_f64(&self, xi: &[f64], d: f64) -> f64 {
        assert_eq!(xi.len(), self.nxi);
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (a, &e) in m.0[..self.nxi].iter().enumerate() {
                if e > 0 {
                    t *= xi[a].powi(e as i32);
                }
            }
            let ed = m.0[self.nxi];
            if ed > 0 {
                t *= d.powi(ed as i32);
            }
            total += t;
        }
        total
    }

    pub fn eval_q(&self, xi: &[BigRational], d: &BigRational) -> BigRational {
        assert_eq!(xi.len(), self.nxi);
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (a, &e) in m.0[..self.nxi].iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(xi[a].clone(), e as usize);
                }
            }
            let ed = m.0[self.nxi] as usize;
            if ed > 0 {
                t *= num_traits::pow(d.clone(), ed);
            }
            total += t;
        }
        total
    }

    /// Substitutes a rational value for `d`.
    pub fn subst_d(&self, d: &BigRational) -> Self {
        let mut out = Self::zero(self.nxi);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let ed = e[self.nxi] as usize;
            e[self.nxi] = 0;
            out.add_term(e, c * num_traits::pow(d.clone(), ed));
        }
        out
    }

    /// Groups terms by their `ξ` part, giving the coefficients in `d` (ascending).
    pub fn by_xi_part(&self) -> BTreeMap<Vec<u32>, Vec<BigRational>> {
        let mut out: BTreeMap<Vec<u32>, Vec<BigRational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = m.0[..self.nxi].to_vec();
            let ed = m.0[self.nxi] as usize;
            let v = out.entry(key).or_default();
            if v.len() <= ed {
                v.resize(ed + 1, BigRational::zero());
            }
            v[ed] = c.clone();
        }
        out
    }

    /// Exact quotient by a polynomial in `d` alone; errors if it does not divide.
    pub fn div_exact_by_d_poly(&self, divisor: &MPoly) -> Result<MPoly> {
        self.check_compat(divisor);
        if !divisor.is_d_only() || divisor.is_zero() {
            return Err(Error::InvalidArgument(
                "divisor must be a nonzero polynomial in d".into(),
            ));
        }
        let dv = divisor
            .by_xi_part()
            .remove(&vec![0; self.nxi])
            .expect("d-only divisor");
        let lead = dv.last().unwrap().clone();
        let dd = dv.len() - 1;
        let mut out = Self::zero(self.nxi);
        for (xpart, mut num) in self.by_xi_part() {
            if num.len() < dv.len() {
                if dd == 0 {
                    for (ed, c) in num.iter().enumerate() {
                        let mut e = xpart.clone();
                        e.push(ed as u32);
                        out.add_term(e, c / &lead);
                    }
                    continue;
                }
                return Err(Error::InvalidArgument(format!(
                    "{} does not divide the polynomial exactly",
                    divisor
                )));
            }
            let qlen = num.len() - dd;
            let mut quot = vec![BigRational::zero(); qlen];
            for i in (0..qlen).rev() {
                let c = &num[i + dd] / &lead;
                if !c.is_zero() {
                    for (j, dj) in dv.iter().enumerate() {
                        num[i + j] -= &c * dj;
                    }
                }
                quot[i] = c;
            }
            if num[..dd].iter().any(|c| !c.is_zero()) {
                return Err(Error::InvalidArgument(format!(
                    "{} does not divide the polynomial exactly",
                    divisor
                )));
            }
            for (ed, c) in quot.into_iter().enumerate() {
                let mut e = xpart.clone();
                e.push(ed as u32);
                out.add_term(e, c);
            }
        }
        Ok(out)
    }

    /// Multiplies by `d^k`.
    pub fn shift_d(&self, k: u32) -> Self {
        Self {
            nxi: self.nxi,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e[self.nxi] += k;
                    (Mono(e), c.clone())
                })
                .collect(),
        }
    }

    /// Parses the text format with a fixed number of unknowns.
    pub fn parse_with(text: &str, nxi: usize) -> Result<Self> {
        parse_poly(text, Some(nxi))
    }

    /// Parses the text format, taking `N` as the largest variable index seen.
    pub fn parse(text: &str) -> Result<Self> {
        parse_poly(text, None)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (a, &k) in e[..self.nxi].iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(format!("x{}", a + 1)),
                    _ => factors.push(format!("x{}^{}", a + 1, k)),
                }
            }
            match e[self.nxi] {
                0 => {}
                1 => factors.push("d".into()),
                k => factors.push(format!("d^{k}")),
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly[{}]({})", self.nxi, self)
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.check_compat(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.0.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.check_compat(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.0.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.check_compat(rhs);
        let mut acc: BTreeMap<Mono, BigRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                *acc.entry(Mono(e)).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MPoly {
            nxi: self.nxi,
            terms: acc,
        }
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&q(-1))
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: &MPoly) -> MPoly {
                (&self).$m(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    D,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            'd' => {
                out.push(Tok::D);
                i += 1
            }
            'x' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let idx: usize =
                    chars[start..j]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| {
                            Error::Parse(format!("expected a variable index at offset {i}"))
                        })?;
                if idx == 0 {
                    return Err(Error::Parse("variables are numbered from x1".into()));
                }
                out.push(Tok::Var(idx - 1));
                i = j;
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                out.push(Tok::Num(s.parse().expect("digits")));
                i = j;
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character `{other}` at offset {i}"
                )))
            }
        }
    }
    Ok(out)
}

fn parse_poly(text: &str, nxi: Option<usize>) -> Result<MPoly> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // Each term: (coefficient, variable exponents by index, d exponent).
    let mut terms: Vec<(BigRational, BTreeMap<usize, u32>, u32)> = Vec::new();
    let mut pos = 0;
    let mut first = true;
    while pos < toks.len() {
        let mut sign = BigRational::one();
        match toks[pos] {
            Tok::Plus if !first => pos += 1,
            Tok::Minus => {
                sign = -sign;
                pos += 1
            }
            _ if first => {}
            _ => return Err(Error::Parse(format!("expected `+` or `-` at token {pos}"))),
        }
        first = false;
        let mut coef = sign;
        let mut vars: BTreeMap<usize, u32> = BTreeMap::new();
        let mut dexp = 0u32;
        let mut need_factor = true;
        loop {
            if need_factor {
                match toks.get(pos) {
                    Some(Tok::Num(n)) => {
                        pos += 1;
                        let mut val = BigRational::from_integer(n.clone());
                        if toks.get(pos) == Some(&Tok::Slash) {
                            match toks.get(pos + 1) {
                                Some(Tok::Num(den)) if !den.is_zero() => {
                                    val = BigRational::new(n.clone(), den.clone());
                                    pos += 2;
                                }
                                _ => return Err(Error::Parse("bad denominator".into())),
                            }
                        }
                        coef *= val;
                    }
                    Some(Tok::Var(_)) | Some(Tok::D) => {
                        let is_d = toks[pos] == Tok::D;
                        let idx = if let Tok::Var(a) = toks[pos] { a } else { 0 };
                        pos += 1;
                        let mut e = 1u32;
                        if toks.get(pos) == Some(&Tok::Caret) {
                            match toks.get(pos + 1) {
                                Some(Tok::Num(n)) => {
                                    e = n
                                        .to_u32()
                                        .ok_or_else(|| Error::Parse("exponent too large".into()))?;
                                    pos += 2;
                                }
                                _ => {
                                    return Err(Error::Parse(
                                        "expected an exponent after `^`".into(),
                                    ))
                                }
                            }
                        }
                        if is_d {
                            dexp += e;
                        } else {
                            *vars.entry(idx).or_default() += e;
                        }
                    }
                    _ => return Err(Error::Parse(format!("expected a factor at token {pos}"))),
                }
                need_factor = false;
            } else if toks.get(pos) == Some(&Tok::Star) {
                pos += 1;
                need_factor = true;
            } else {
                break;
            }
        }
        terms.push((coef, vars, dexp));
    }
    let seen = terms
        .iter()
        .flat_map(|(_, v, _)| v.keys().copied())
        .max()
        .map(|m| m + 1)
        .unwrap_or(0);
    let n = match nxi {
        Some(n) if seen > n => {
            return Err(Error::Parse(format!(
                "variable x{seen} exceeds the declared {n} unknowns"
            )))
        }
        Some(n) => n,
        None => seen,
    };
    let mut p = MPoly::zero(n);
    for (c, vars, de) in terms {
        let mut e = vec![0u32; n + 1];
        for (a, k) in vars {
            e[a] += k;
        }
        e[n] = de;
        p.add_term(e, c);
    }
    Ok(p)
}
