//! Initial (leading-term) systems and their real solutions with all
//! coordinates nonzero.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::coef::Coef;
use super::tropical::ExponentCandidate;
use super::univariate::{self as uni, UPoly};
use crate::error::{Error, Result};
use crate::symbolic::poly::q;
use crate::symbolic::MPoly;

/// Terms of maximal exponent at `tau` in each equation, with `d` removed and
/// the common monomial factor divided out.
pub fn initial_system(system: &[MPoly], tau: &[BigRational]) -> Vec<MPoly> {
    system
        .iter()
        .filter(|e| !e.is_zero())
        .map(|eq| {
            let n = eq.nxi();
            let val = |e: &[u32]| -> BigRational {
                e[..n]
                    .iter()
                    .zip(tau)
                    .fold(q(e[n] as i64), |acc, (&a, t)| acc + t * q(a as i64))
            };
            let max = eq.terms().map(|(e, _)| val(e)).max().unwrap();
            let top: Vec<(Vec<u32>, BigRational)> = eq
                .terms()
                .filter(|(e, _)| val(e) == max)
                .map(|(e, c)| {
                    let mut e = e.to_vec();
                    e[n] = 0;
                    (e, c.clone())
                })
                .collect();
            let mut g = top[0].0.clone();
            for (e, _) in &top {
                for (gi, ei) in g.iter_mut().zip(e) {
                    *gi = (*gi).min(*ei);
                }
            }
            MPoly::from_terms(
                n,
                top.into_iter()
                    .map(|(e, c)| (e.iter().zip(&g).map(|(a, b)| a - b).collect(), c)),
            )
        })
        .collect()
}

/// Polynomial in the ξ variables only.
type Poly = BTreeMap<Vec<u32>, BigRational>;

fn to_poly(p: &MPoly) -> Poly {
    let n = p.nxi();
    let mut out = Poly::new();
    for (e, c) in p.terms() {
        *out.entry(e[..n].to_vec()).or_insert_with(BigRational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn substitute(p: &Poly, var: usize, x: &BigRational) -> Poly {
    let mut out = Poly::new();
    for (e, c) in p {
        let mut e2 = e.clone();
        let k = e2[var];
        e2[var] = 0;
        *out.entry(e2).or_insert_with(BigRational::zero) +=
            c * num_traits::pow(x.clone(), k as usize);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn vars_of(p: &Poly) -> Vec<usize> {
    let n = p.keys().next().map_or(0, |e| e.len());
    (0..n).filter(|&i| p.keys().any(|e| e[i] > 0)).collect()
}

fn univariate(p: &Poly, var: usize) -> UPoly {
    let deg = p.keys().map(|e| e[var] as usize).max().unwrap_or(0);
    let mut out = vec![BigRational::zero(); deg + 1];
    for (e, c) in p {
        out[e[var] as usize] += c;
    }
    uni::trim(out)
}

/// Coefficients in `x` with entries in `Q[y]`, for a polynomial in `x, y` only.
fn bivariate(p: &Poly, x: usize, y: usize) -> Vec<UPoly> {
    let dx = p.keys().map(|e| e[x] as usize).max().unwrap_or(0);
    let dy = p.keys().map(|e| e[y] as usize).max().unwrap_or(0);
    let mut out = vec![vec![BigRational::zero(); dy + 1]; dx + 1];
    for (e, c) in p {
        out[e[x] as usize][e[y] as usize] += c;
    }
    out.into_iter().map(uni::trim).collect()
}

fn eval_f64(p: &Poly, x: &[f64]) -> f64 {
    p.iter()
        .map(|(e, c)| {
            c.to_f64().unwrap()
                * e.iter()
                    .zip(x)
                    .map(|(&k, v)| v.powi(k as i32))
                    .product::<f64>()
        })
        .sum()
}

fn scale_of(p: &Poly, x: &[f64]) -> f64 {
    p.iter()
        .map(|(e, c)| {
            (c.to_f64().unwrap()
                * e.iter()
                    .zip(x)
                    .map(|(&k, v)| v.powi(k as i32))
                    .product::<f64>())
            .abs()
        })
        .fold(1.0, f64::max)
}

struct Solver {
    n: usize,
    out: Vec<Vec<Coef>>,
}

impl Solver {
    fn solve(&mut self, eqs: Vec<Poly>, assigned: Vec<Option<Coef>>) -> Result<()> {
        let eqs: Vec<Poly> = eqs.into_iter().filter(|p| !p.is_empty()).collect();
        if eqs.iter().any(|p| vars_of(p).is_empty()) {
            return Ok(());
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| assigned[i].is_none()).collect();
        if free.is_empty() {
            self.out
                .push(assigned.into_iter().map(Option::unwrap).collect());
            return Ok(());
        }
        if eqs.is_empty() {
            return Err(Error::Unsupported(format!(
                "initial system leaves variables {free:?} undetermined"
            )));
        }
        // A univariate equation fixes one variable.
        if let Some((var, g)) = self.univariate_gcd(&eqs) {
            let roots = uni::real_roots(&g);
            if free.len() == 2 && roots.iter().any(|r| !matches!(r, Coef::Rational(_))) {
                let other = if free[0] == var { free[1] } else { free[0] };
                return self.two_variables(&eqs, other, var, assigned);
            }
            for r in roots {
                match &r {
                    Coef::Rational(x) => {
                        let next = eqs.iter().map(|p| substitute(p, var, x)).collect();
                        let mut a = assigned.clone();
                        a[var] = Some(r.clone());
                        self.solve(next, a)?;
                    }
                    _ if free.len() == 1 => {
                        let mut a = assigned.clone();
                        a[var] = Some(r);
                        self.out.push(a.into_iter().map(Option::unwrap).collect());
                    }
                    _ => {
                        return Err(Error::Unsupported(
                            "irrational root with further unknowns".into(),
                        ))
                    }
                }
            }
            return Ok(());
        }
        if free.len() == 2 {
            return self.two_variables(&eqs, free[0], free[1], assigned);
        }
        Err(Error::Unsupported(format!(
            "initial system in {} unknowns without a univariate equation",
            free.len()
        )))
    }

    /// Variable and gcd of all equations that involve only it.
    fn univariate_gcd(&self, eqs: &[Poly]) -> Option<(usize, UPoly)> {
        let var = eqs.iter().find_map(|p| match vars_of(p)[..] {
            [v] => Some(v),
            _ => None,
        })?;
        let mut g: Option<UPoly> = None;
        for p in eqs.iter().filter(|p| vars_of(p) == [var]) {
            let u = univariate(p, var);
            g = Some(match g {
                None => u,
                Some(h) => uni::gcd(&h, &u),
            });
        }
        g.map(|g| (var, g))
    }

    fn two_variables(
        &mut self,
        eqs: &[Poly],
        x: usize,
        y: usize,
        assigned: Vec<Option<Coef>>,
    ) -> Result<()> {
        let mut pair = None;
        'search: for i in 0..eqs.len() {
            for j in i + 1..eqs.len() {
                let rx = uni::resultant(&bivariate(&eqs[i], y, x), &bivariate(&eqs[j], y, x));
                if !uni::is_zero(&rx) {
                    pair = Some((i, j, rx));
                    break 'search;
                }
            }
        }
        let Some((i, j, rx)) = pair else {
            return Err(Error::Unsupported(
                "positive-dimensional initial system".into(),
            ));
        };
        let xs = uni::real_roots(&rx);
        let mut ys: Option<Vec<Coef>> = None;
        for xr in xs {
            if let Coef::Rational(xv) = &xr {
                let next = eqs.iter().map(|p| substitute(p, x, xv)).collect();
                let mut a = assigned.clone();
                a[x] = Some(xr.clone());
                self.solve(next, a)?;
                continue;
            }
            let ys = ys.get_or_insert_with(|| {
                uni::real_roots(&uni::resultant(
                    &bivariate(&eqs[i], x, y),
                    &bivariate(&eqs[j], x, y),
                ))
            });
            for yr in ys.iter() {
                let mut pt = vec![0.0; self.n];
                pt[x] = xr.to_f64();
                pt[y] = yr.to_f64();
                let ok = eqs
                    .iter()
                    .all(|p| eval_f64(p, &pt).abs() <= 1e-9 * scale_of(p, &pt));
                if ok {
                    let mut a = assigned.clone();
                    a[x] = Some(xr.clone());
                    a[y] = Some(yr.clone());
                    if a.iter().all(Option::is_some) {
                        self.out.push(a.into_iter().map(Option::unwrap).collect());
                    } else {
                        return Err(Error::Unsupported(
                            "irrational pair with further unknowns".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// All real solutions `A` with every `A_i ≠ 0` of the initial system at `cand`.
pub fn leading_coefficients(system: &[MPoly], cand: &ExponentCandidate) -> Result<Vec<Vec<Coef>>> {
    let n = cand.tau.len();
    if system.iter().any(|e| e.nxi() != n) {
        return Err(Error::DimensionMismatch(format!(
            "system is not in {n} variables"
        )));
    }
    let init = initial_system(system, &cand.tau);
    let mut solver = Solver { n, out: Vec::new() };
    solver.solve(init.iter().map(to_poly).collect(), vec![None; n])?;
    let mut sols: Vec<Vec<Coef>> = solver
        .out
        .into_iter()
        .filter(|a| a.iter().all(|c| !c.is_zero()))
        .collect();
    sols.sort_by(|a, b| {
        let fa: Vec<f64> = a.iter().map(Coef::to_f64).collect();
        let fb: Vec<f64> = b.iter().map(Coef::to_f64).collect();
        fa.partial_cmp(&fb).unwrap()
    });
    sols.dedup();
    if sols.is_empty() {
        let tau: Vec<String> = cand.tau.iter().map(|t| t.to_string()).collect();
        return Err(Error::NoRealSolution(format!(
            "initial system at τ = ({}) has no real solution with nonzero coordinates",
            tau.join(", ")
        )));
    }
    Ok(sols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_radical() {
        let eq = MPoly::parse_with("45*x1^5*d^3 - 27*x1^2*d - 18*x1^2", 1).unwrap();
        let cand = ExponentCandidate {
            tau: vec![crate::symbolic::poly::qf(-2, 3)],
        };
        let sols = leading_coefficients(&[eq], &cand).unwrap();
        assert_eq!(
            sols,
            vec![vec![Coef::Radical {
                coef: q(1),
                radicand: crate::symbolic::poly::qf(3, 5),
                index: 3
            }]]
        );
    }

    #[test]
    fn two_by_two() {
        // x*y - 1 = 0, x - y = 0 → (±1, ±1)
        let a = MPoly::parse_with("x1*x2 - 1", 2).unwrap();
        let b = MPoly::parse_with("x1 - x2", 2).unwrap();
        let cand = ExponentCandidate {
            tau: vec![q(0), q(0)],
        };
        let sols = leading_coefficients(&[a, b], &cand).unwrap();
        assert_eq!(sols.len(), 2);
        assert_eq!(sols[0], vec![Coef::Rational(q(-1)), Coef::Rational(q(-1))]);
    }

    #[test]
    fn complex_only() {
        let a = MPoly::parse_with("x1^2 + 1", 1).unwrap();
        let cand = ExponentCandidate { tau: vec![q(0)] };
        assert!(matches!(
            leading_coefficients(&[a], &cand),
            Err(Error::NoRealSolution(_))
        ));
    }
}
