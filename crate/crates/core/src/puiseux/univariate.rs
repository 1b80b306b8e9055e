//! Dense univariate polynomials over `Q` (ascending coefficients): Sturm-based
//! real-root isolation, recognition of rational and pure-radical roots, and
//! Sylvester resultants with polynomial entries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::coef::Coef;
use crate::symbolic::poly::q;

pub(crate) type UPoly = Vec<BigRational>;

pub(crate) fn trim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub(crate) fn is_zero(p: &UPoly) -> bool {
    p.iter().all(|c| c.is_zero())
}

pub(crate) fn degree(p: &UPoly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn eval(p: &UPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn deriv(p: &UPoly) -> UPoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * q(i as i64))
            .collect(),
    )
}

pub(crate) fn mul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub(crate) fn sub(a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_else(BigRational::zero)
                    - b.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect(),
    )
}

/// Quotient and remainder; panics on a zero divisor.
pub(crate) fn divrem(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    let b = trim(b.clone());
    let db = degree(&b).expect("division by zero polynomial");
    let mut r = trim(a.clone());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut quot = vec![BigRational::zero(); r.len() - db];
    let lead = b[db].clone();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &c * bj;
        }
        quot[dr - db] = c;
        r = trim(r);
    }
    (trim(quot), r)
}

fn monic(p: UPoly) -> UPoly {
    match degree(&p) {
        Some(d) => {
            let l = p[d].clone();
            trim(p.into_iter().map(|c| c / &l).collect())
        }
        None => p,
    }
}

pub(crate) fn gcd(a: &UPoly, b: &UPoly) -> UPoly {
    let (mut x, mut y) = (trim(a.clone()), trim(b.clone()));
    while !is_zero(&y) {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

/// `p / gcd(p, p')`.
pub(crate) fn squarefree(p: &UPoly) -> UPoly {
    let p = trim(p.clone());
    if degree(&p).unwrap_or(0) == 0 {
        return p;
    }
    let g = gcd(&p, &deriv(&p));
    monic(divrem(&p, &g).0)
}

/// Removes the factor `x^k` of largest `k`.
pub(crate) fn strip_x(p: &UPoly) -> UPoly {
    let p = trim(p.clone());
    let k = p.iter().position(|c| !c.is_zero()).unwrap_or(0);
    p[k..].to_vec()
}

fn sturm(p: &UPoly) -> Vec<UPoly> {
    let mut seq = vec![trim(p.clone()), deriv(p)];
    loop {
        let n = seq.len();
        if is_zero(&seq[n - 1]) {
            seq.pop();
            break;
        }
        let (_, r) = divrem(&seq[n - 2], &seq[n - 1]);
        if is_zero(&r) {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[UPoly], x: &BigRational) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| {
            let v = eval(p, x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn cauchy_bound(p: &UPoly) -> BigRational {
    let d = degree(p).unwrap();
    let lead = p[d].abs();
    let m = p[..d]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    m + BigRational::one()
}

/// Disjoint intervals `(a, b]`, each holding exactly one real root of the squarefree `p`.
pub(crate) fn isolate(p: &UPoly) -> Vec<(BigRational, BigRational)> {
    let p = trim(p.clone());
    if degree(&p).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let seq = sturm(&p);
    let bound = cauchy_bound(&p);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        let n = sign_changes(&seq, &a) - sign_changes(&seq, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push((a, b));
            continue;
        }
        let mid = (&a + &b) / q(2);
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Bisects `(a, b]` (one simple root) until its width is below `width`.
pub(crate) fn refine(
    p: &UPoly,
    mut a: BigRational,
    mut b: BigRational,
    width: &BigRational,
) -> (BigRational, BigRational) {
    if eval(p, &b).is_zero() {
        return (b.clone(), b);
    }
    let sb = eval(p, &b).is_positive();
    while &(&b - &a) > width {
        let mid = (&a + &b) / q(2);
        let v = eval(p, &mid);
        if v.is_zero() {
            return (mid.clone(), mid);
        }
        if v.is_positive() == sb {
            b = mid;
        } else {
            a = mid;
        }
    }
    (a, b)
}

/// The rational of smallest denominator in `[lo, hi]`.
pub(crate) fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    if lo > hi {
        return simplest_between(hi, lo);
    }
    if lo.is_positive() {
        return simplest_pos(lo, hi);
    }
    if hi.is_negative() {
        return -simplest_pos(&-hi.clone(), &-lo.clone());
    }
    BigRational::zero()
}

fn simplest_pos(lo: &BigRational, hi: &BigRational) -> BigRational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if &(&fl + BigRational::one()) <= hi {
        return fl + BigRational::one();
    }
    // Both in (fl, fl+1): recurse on reciprocals of fractional parts.
    let inner = simplest_pos(
        &(BigRational::one() / (hi - &fl)),
        &(BigRational::one() / (lo - &fl)),
    );
    fl + BigRational::one() / inner
}

fn pow_q(x: &BigRational, n: u32) -> BigRational {
    num_traits::pow(x.clone(), n as usize)
}

fn interval_pow(a: &BigRational, b: &BigRational, n: u32) -> (BigRational, BigRational) {
    let (x, y) = (pow_q(a, n), pow_q(b, n));
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// `x^n − c` as a dense polynomial.
fn binomial(n: u32, c: &BigRational) -> UPoly {
    let mut p = vec![BigRational::zero(); n as usize + 1];
    p[0] = -c.clone();
    p[n as usize] = BigRational::one();
    p
}

/// Nonzero real roots of `p`, each classified as rational, a pure radical
/// `±c^{1/n}` (n ≤ 6), or a numeric value.
pub(crate) fn real_roots(p: &UPoly) -> Vec<Coef> {
    let sf = squarefree(&strip_x(p));
    if degree(&sf).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let tiny = BigRational::new(BigInt::one(), BigInt::one() << 80usize);
    let mut out = Vec::new();
    for (a, b) in isolate(&sf) {
        let (a, b) = refine(&sf, a, b, &tiny);
        let r = simplest_between(&a, &b);
        if eval(&sf, &r).is_zero() && !r.is_zero() {
            out.push(Coef::Rational(r));
            continue;
        }
        let mut found = None;
        for n in 2..=6u32 {
            let (lo, hi) = interval_pow(&a, &b, n);
            let c = simplest_between(&lo, &hi);
            if c.is_zero() || c.denom() > &BigInt::from(1_000_000) {
                continue;
            }
            if n % 2 == 0 && c.is_negative() {
                continue;
            }
            if is_zero(&divrem(&sf, &binomial(n, &c)).1) {
                let sign = if (&a + &b).is_negative() && n % 2 == 0 {
                    -1
                } else {
                    1
                };
                found = Some(Coef::Radical {
                    coef: q(sign),
                    radicand: c,
                    index: n,
                });
                break;
            }
        }
        out.push(found.unwrap_or_else(|| Coef::Approx(((&a + &b) / q(2)).to_f64().unwrap())));
    }
    out
}

/// Exact division in `Q[y]`; `None` if the remainder is nonzero.
fn div_exact(a: &UPoly, b: &UPoly) -> Option<UPoly> {
    let (qt, r) = divrem(a, b);
    if is_zero(&r) {
        Some(qt)
    } else {
        None
    }
}

/// `Res_x(f, g)` for `f, g ∈ Q[y][x]` given as coefficient lists in `x`.
pub(crate) fn resultant(f: &[UPoly], g: &[UPoly]) -> UPoly {
    let df = f.iter().rposition(|c| !is_zero(c));
    let dg = g.iter().rposition(|c| !is_zero(c));
    let (Some(m), Some(n)) = (df, dg) else {
        return Vec::new();
    };
    if m == 0 && n == 0 {
        return vec![BigRational::one()];
    }
    let size = m + n;
    let mut mat: Vec<Vec<UPoly>> = vec![vec![Vec::new(); size]; size];
    for i in 0..n {
        for (j, c) in f[..=m].iter().rev().enumerate() {
            mat[i][i + j] = trim(c.clone());
        }
    }
    for i in 0..m {
        for (j, c) in g[..=n].iter().rev().enumerate() {
            mat[n + i][i + j] = trim(c.clone());
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut m: Vec<Vec<UPoly>>) -> UPoly {
    let n = m.len();
    let mut sign = 1i64;
    let mut prev: UPoly = vec![BigRational::one()];
    for k in 0..n.saturating_sub(1) {
        if is_zero(&m[k][k]) {
            match (k + 1..n).find(|&r| !is_zero(&m[r][k])) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Vec::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = sub(&mul(&m[i][j], &m[k][k]), &mul(&m[i][k], &m[k][j]));
                m[i][j] = div_exact(&num, &prev).expect("Bareiss division is exact");
            }
            m[i][k] = Vec::new();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        det.into_iter().map(|c| -c).collect()
    } else {
        det
    }
}
