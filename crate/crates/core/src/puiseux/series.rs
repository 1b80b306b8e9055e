//! Series extension by Newton iteration over truncated Laurent series in
//! `s = d^{-1/q}`, plus the Jacobian nonsingularity check on trimmed series.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::coef::Coef;
use super::laurent::{Laurent, EXACT};
use super::PuiseuxSeries;
use crate::error::{Error, Result};
use crate::symbolic::poly::q;
use crate::symbolic::MPoly;

const MAX_NEWTON_STEPS: usize = 40;

/// A system with the variables that stay identically zero removed.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub system: Vec<MPoly>,
    /// Original indices of the remaining variables.
    pub kept: Vec<usize>,
    /// Original indices of the variables fixed at zero.
    pub zeroed: Vec<usize>,
}

/// Output of [`extend_series`].
#[derive(Clone, Debug)]
pub struct Extension {
    pub series: Vec<PuiseuxSeries>,
    /// Every term with a larger exponent of `d` is exact.
    pub certified_order: BigRational,
    /// Leading exponent of `d` in the residual before each Newton step
    /// (`None` once the residual vanishes identically).
    pub residual_history: Vec<Option<BigRational>>,
}

#[derive(Clone, Debug)]
pub struct JacobianCheck {
    pub nonsingular: bool,
    /// Whether the cancelled system vanishes at the initial conditions.
    pub initial_conditions_hold: bool,
    pub singular_values: Vec<f64>,
}

fn check_square(system: &[MPoly], n: usize) -> Result<()> {
    if system.len() != n || system.iter().any(|e| e.nxi() != n) {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} equations in {n} unknowns, got {}",
            system.len()
        )));
    }
    Ok(())
}

/// Sets the variables in `zero` to 0 and drops them from the variable list.
fn restrict(p: &MPoly, zero: &[usize]) -> MPoly {
    let n = p.nxi();
    let keep: Vec<usize> = (0..=n).filter(|i| !zero.contains(i)).collect();
    MPoly::from_terms(
        n - zero.len(),
        p.terms()
            .filter(|(e, _)| zero.iter().all(|&z| e[z] == 0))
            .map(|(e, c)| (keep.iter().map(|&k| e[k]).collect(), c.clone())),
    )
}

/// Removes the seed's zero components whose equations vanish identically once
/// those components are zero, so the remaining system is square in the rest.
pub fn reduce_invariant_subsystem(
    system: &[MPoly],
    seed: &[PuiseuxSeries],
) -> Result<ReducedSystem> {
    let n = seed.len();
    check_square(system, n)?;
    let mut zero: Vec<usize> = (0..n).filter(|&i| seed[i].is_zero()).collect();
    loop {
        let bad: Vec<usize> = zero
            .iter()
            .copied()
            .filter(|&z| !restrict(&system[z], &zero).is_zero())
            .collect();
        if bad.is_empty() {
            break;
        }
        zero.retain(|z| !bad.contains(z));
    }
    let kept: Vec<usize> = (0..n).filter(|i| !zero.contains(i)).collect();
    Ok(ReducedSystem {
        system: kept.iter().map(|&i| restrict(&system[i], &zero)).collect(),
        kept,
        zeroed: zero,
    })
}

fn exponent_lcm(series: &[PuiseuxSeries]) -> i64 {
    series
        .iter()
        .flat_map(|s| s.terms().iter())
        .fold(BigInt::one(), |acc, (e, _)| acc.lcm(e.denom()))
        .to_i64()
        .unwrap_or(1)
}

fn to_laurent(s: &PuiseuxSeries, qd: i64) -> Result<Laurent> {
    let mut out = Laurent::zero();
    for (e, c) in s.terms() {
        let c = c
            .as_rational()
            .ok_or_else(|| Error::Unsupported(format!("irrational coefficient {c}")))?;
        let k = -(e * q(qd));
        out = out.add(&Laurent::monomial(
            k.to_integer().to_i64().unwrap(),
            c.clone(),
        ));
    }
    Ok(out)
}

fn from_laurent(l: &Laurent, qd: i64, min_d_exp: &BigRational) -> PuiseuxSeries {
    let terms = l
        .coeffs
        .iter()
        .map(|(k, c)| {
            (
                BigRational::new(BigInt::from(-k), BigInt::from(qd)),
                c.clone(),
            )
        })
        .filter(|(e, _)| e >= min_d_exp)
        .map(|(e, c)| (e, Coef::Rational(c)))
        .collect();
    PuiseuxSeries::new(terms).expect("strictly decreasing by construction")
}

/// Evaluates `p` at `ξ(s)` with `d = s^{-qd}`.
fn eval_laurent(p: &MPoly, xi: &[Laurent], qd: i64, cap: i64) -> Laurent {
    let n = p.nxi();
    let maxdeg: Vec<u32> = (0..n).map(|i| p.degree_in(i)).collect();
    let powers: Vec<Vec<Laurent>> = (0..n)
        .map(|i| {
            let mut v = vec![Laurent::constant(BigRational::one())];
            for k in 1..=maxdeg[i] as usize {
                let next = v[k - 1].mul(&xi[i], cap);
                v.push(next);
            }
            v
        })
        .collect();
    let mut acc = Laurent::zero();
    for (e, c) in p.terms() {
        let mut t = Laurent::monomial(-qd * e[n] as i64, c.clone());
        for i in 0..n {
            if e[i] > 0 {
                t = t.mul(&powers[i][e[i] as usize], cap);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// Solves `a x = b` by Gauss–Jordan elimination with minimal-valuation pivots.
fn solve(mut a: Vec<Vec<Laurent>>, mut b: Vec<Laurent>, cap: i64) -> Result<Vec<Laurent>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n)
            .filter(|&r| a[r][k].valuation().is_some())
            .min_by_key(|&r| a[r][k].valuation().unwrap())
            .ok_or_else(|| Error::Stalled("Jacobian is singular to working precision".into()))?;
        a.swap(k, piv);
        b.swap(k, piv);
        let inv = a[k][k].inv(cap).expect("pivot has a known leading term");
        for i in 0..n {
            if i == k || a[i][k].coeffs.is_empty() && a[i][k].is_exact() {
                continue;
            }
            let f = a[i][k].mul(&inv, cap);
            for j in k..n {
                let t = f.mul(&a[k][j], cap);
                a[i][j] = a[i][j].sub(&t).truncate(cap);
            }
            let t = f.mul(&b[k], cap);
            b[i] = b[i].sub(&t).truncate(cap);
        }
    }
    Ok((0..n)
        .map(|k| b[k].mul(&a[k][k].inv(cap).unwrap(), cap))
        .collect())
}

fn d_exponent_of(v: i64, qd: i64) -> BigRational {
    BigRational::new(BigInt::from(-v), BigInt::from(qd))
}

/// Leading exponent of `d` across the residuals (`None` if all vanish).
fn residual_lead(f: &[Laurent], qd: i64) -> Option<BigRational> {
    f.iter()
        .filter_map(Laurent::valuation)
        .min()
        .map(|v| d_exponent_of(v, qd))
}

/// Newton steps on the reduced system; returns the final iterate, the precision
/// of the last correction, and the residual history.
fn newton(
    sys: &[MPoly],
    jac: &[Vec<MPoly>],
    mut xi: Vec<Laurent>,
    qd: i64,
    cap: i64,
) -> Result<(Vec<Laurent>, i64, Vec<Option<BigRational>>)> {
    let m = xi.len();
    let mut history = Vec::new();
    for _ in 0..MAX_NEWTON_STEPS {
        let f: Vec<Laurent> = sys
            .iter()
            .map(|p| eval_laurent(p, &xi, qd, EXACT))
            .collect();
        history.push(residual_lead(&f, qd));
        if f.iter().all(|x| x.coeffs.is_empty()) {
            return Ok((xi, EXACT, history));
        }
        let j: Vec<Vec<Laurent>> = (0..m)
            .map(|r| {
                (0..m)
                    .map(|c| eval_laurent(&jac[r][c], &xi, qd, EXACT))
                    .collect()
            })
            .collect();
        let delta = solve(j, f, cap)?;
        let prec = delta.iter().map(|x| x.prec).min().unwrap();
        if delta.iter().all(|x| x.coeffs.is_empty()) {
            return Ok((xi, prec, history));
        }
        xi = xi
            .iter()
            .zip(&delta)
            .map(|(x, dx)| {
                let mut known = dx.clone();
                known.prec = EXACT;
                let mut next = x.sub(&known);
                next.coeffs.retain(|&k, _| k < prec);
                next
            })
            .collect();
    }
    Err(Error::Stalled(format!(
        "no convergence after {MAX_NEWTON_STEPS} Newton steps"
    )))
}

/// Extends a rational seed through all terms with exponent of `d` at least `−depth`.
pub fn extend_series(system: &[MPoly], seed: &[PuiseuxSeries], depth: u32) -> Result<Extension> {
    let n = seed.len();
    let red = reduce_invariant_subsystem(system, seed)?;
    let qd = exponent_lcm(seed);
    let target = qd * depth as i64;
    let min_exp = BigRational::from_integer(BigInt::from(-(depth as i64)));
    let jac = crate::symbolic::jacobian(&red.system);
    let xi0: Vec<Laurent> = red
        .kept
        .iter()
        .map(|&i| to_laurent(&seed[i], qd))
        .collect::<Result<_>>()?;
    let mut extra = 4 * qd + 8;
    for _ in 0..6 {
        let cap = target + 1 + extra;
        let (xi, prec, history) = newton(&red.system, &jac, xi0.clone(), qd, cap)?;
        if prec > target {
            let mut series = vec![PuiseuxSeries::zero(); n];
            for (s, &i) in xi.iter().zip(&red.kept) {
                series[i] = from_laurent(s, qd, &min_exp);
            }
            let certified_order = if prec >= EXACT {
                BigRational::from_integer(BigInt::from(-(i64::MAX / 8)))
            } else {
                d_exponent_of(prec, qd)
            };
            return Ok(Extension {
                series,
                certified_order,
                residual_history: history,
            });
        }
        extra *= 2;
    }
    Err(Error::Stalled(format!(
        "could not certify the series through d^-{depth}"
    )))
}

/// Leading exponent of `d` in the system evaluated at the partial sums
/// (`None` when the residual vanishes identically).
pub fn residual_exponent(
    system: &[MPoly],
    series: &[PuiseuxSeries],
) -> Result<Option<BigRational>> {
    check_square(system, series.len())?;
    let qd = exponent_lcm(series);
    let xi: Vec<Laurent> = series
        .iter()
        .map(|s| to_laurent(s, qd))
        .collect::<Result<_>>()?;
    let f: Vec<Laurent> = system
        .iter()
        .map(|p| eval_laurent(p, &xi, qd, EXACT))
        .collect();
    Ok(residual_lead(&f, qd))
}

/// Evaluates the partial sums at `d`.
pub fn seed_to_numeric(series: &[PuiseuxSeries], d: usize) -> Vec<f64> {
    super::eval_series(series, d as f64)
}

/// Substitutes `ξ_i = P_i(s) + s^{n_i+1} x_i` with `P_i` the series trimmed to
/// powers `s^0..s^{n_i}` and `d = s^{-q}`, cancels the lowest power of `s` from
/// each equation and tests the Jacobian in `x` at `s = 0` and `x_i` equal to the
/// next coefficients.
pub fn jacobian_nonsingular_check(
    system: &[MPoly],
    series: &[PuiseuxSeries],
    truncation: &[usize],
) -> Result<JacobianCheck> {
    let n = series.len();
    check_square(system, n)?;
    if truncation.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} truncation orders for {n} series",
            truncation.len()
        )));
    }
    let qd = exponent_lcm(series);
    let mut subs = Vec::with_capacity(n);
    let mut x0 = vec![0.0; n];
    for i in 0..n {
        let l = to_laurent(&series[i], qd)?;
        if l.valuation().is_some_and(|v| v < 0) {
            return Err(Error::Unsupported(
                "series with positive powers of d".into(),
            ));
        }
        let cut = truncation[i] as i64;
        let mut p = MPoly::monomial(unit(n, i, cut as u32 + 1), BigRational::one());
        for (&k, c) in l.coeffs.range(..=cut) {
            p = p + MPoly::monomial(unit_s(n, k as u32), c.clone());
        }
        x0[i] = l.coeff(cut + 1).to_f64().unwrap();
        subs.push(p);
    }
    let mut cancelled = Vec::with_capacity(n);
    for eq in system {
        let top = eq.degree_in(n);
        let mut acc = MPoly::zero(n);
        for (e, c) in eq.terms() {
            let mut t = MPoly::monomial(unit_s(n, qd as u32 * (top - e[n])), c.clone());
            for i in 0..n {
                if e[i] > 0 {
                    t = &t * &subs[i].pow(e[i]);
                }
            }
            acc = acc + t;
        }
        let low = acc.terms().map(|(e, _)| e[n]).min().unwrap_or(0);
        cancelled.push(MPoly::from_terms(
            n,
            acc.terms().filter(|(e, _)| e[n] == low).map(|(e, c)| {
                let mut e = e.to_vec();
                e[n] = 0;
                (e, c.clone())
            }),
        ));
    }
    let initial_conditions_hold = cancelled.iter().all(|p| {
        let scale = p
            .terms()
            .map(|(_, c)| c.abs().to_f64().unwrap())
            .fold(1.0, f64::max);
        p.eval_f64(&x0, 0.0).abs()
            <= 1e-9 * scale * (1.0 + x0.iter().map(|v| v.abs()).fold(0.0, f64::max)).powi(6)
    });
    let jm = faer::Mat::<f64>::from_fn(n, n, |r, c| cancelled[r].diff(c).eval_f64(&x0, 0.0));
    let mut sv: Vec<f64> = jm
        .singular_values()
        .map_err(|e| Error::Unsupported(format!("SVD failed: {e:?}")))?;
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let nonsingular = sv.first().is_some_and(|&m| m > 0.0) && sv.last().unwrap() > &(1e-8 * sv[0]);
    Ok(JacobianCheck {
        nonsingular,
        initial_conditions_hold,
        singular_values: sv,
    })
}

fn unit(n: usize, i: usize, s_exp: u32) -> Vec<u32> {
    let mut e = vec![0; n + 1];
    e[i] = 1;
    e[n] = s_exp;
    e
}

fn unit_s(n: usize, s_exp: u32) -> Vec<u32> {
    let mut e = vec![0; n + 1];
    e[n] = s_exp;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_branch_has_zero_residual() {
        let eq = MPoly::parse_with("x1^5*d^3 - x1^2", 1).unwrap();
        let seed = vec![PuiseuxSeries::monomial(q(-1), q(1))];
        let ext = extend_series(&[eq.clone()], &seed, 4).unwrap();
        assert_eq!(ext.series, seed);
        assert_eq!(ext.residual_history, vec![None]);
        assert_eq!(residual_exponent(&[eq.clone()], &seed).unwrap(), None);
        let chk = jacobian_nonsingular_check(&[eq], &seed, &[1]).unwrap();
        assert!(chk.nonsingular && chk.initial_conditions_hold);
    }

    #[test]
    fn newton_recovers_algebraic_expansion() {
        // ξ = 1/d + 1/d^2 exactly.
        let eq = MPoly::parse_with("x1*d^2 - d - 1", 1).unwrap();
        let seed = vec![PuiseuxSeries::monomial(q(-1), q(1))];
        let ext = extend_series(&[eq], &seed, 5).unwrap();
        assert_eq!(ext.series[0].coeff(&q(-2)), Coef::Rational(q(1)));
        assert_eq!(ext.series[0].terms().len(), 2);
    }
}
