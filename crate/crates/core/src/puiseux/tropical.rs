//! Leading-exponent enumeration from pairwise ties of the linearized term
//! exponents `a_ξ·τ + a_d`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::small_denominator;
use crate::error::{Error, Result};
use crate::symbolic::poly::q;
use crate::symbolic::MPoly;

/// Largest exponent denominator reported as a regular candidate.
pub const MAX_DENOMINATOR: i64 = 12;

const MAX_COMBINATIONS: u128 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExponentCandidate {
    pub tau: Vec<BigRational>,
}

/// Result of [`leading_exponents`].
#[derive(Clone, Debug, Default)]
pub struct ExponentSearch {
    pub candidates: Vec<ExponentCandidate>,
    /// Vertices satisfying the tie condition whose denominators exceed [`MAX_DENOMINATOR`].
    pub outside_lattice: Vec<ExponentCandidate>,
    /// One-dimensional pieces of the tie set.
    pub continua: Vec<TieContinuum>,
}

/// A segment or ray on which the tie condition holds throughout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieContinuum {
    pub start: Vec<BigRational>,
    /// `None` for a ray in `direction`.
    pub end: Option<Vec<BigRational>>,
    pub direction: Vec<BigRational>,
}

/// A linear form `a·τ + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Form {
    a: Vec<i64>,
    c: i64,
}

impl Form {
    fn at(&self, tau: &[BigRational]) -> BigRational {
        self.a
            .iter()
            .zip(tau)
            .fold(q(self.c), |acc, (&ai, t)| acc + t * q(ai))
    }
}

/// One form per distinct ξ-monomial, with its top power of `d`.
fn forms(eq: &MPoly) -> Vec<Form> {
    let n = eq.nxi();
    let mut best: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for (e, _) in eq.terms() {
        let a: Vec<i64> = e[..n].iter().map(|&x| x as i64).collect();
        let c = e[n] as i64;
        best.entry(a).and_modify(|v| *v = (*v).max(c)).or_insert(c);
    }
    best.into_iter().map(|(a, c)| Form { a, c }).collect()
}

/// `true` if the maximum of the term exponents of every equation at `tau` is
/// attained by at least two distinct ξ-monomials.
pub fn attains_twice(system: &[MPoly], tau: &[BigRational]) -> bool {
    system.iter().filter(|e| !e.is_zero()).all(|eq| {
        let vals: Vec<BigRational> = forms(eq).iter().map(|f| f.at(tau)).collect();
        let max = vals.iter().max().cloned();
        match max {
            Some(m) => vals.iter().filter(|v| **v == m).count() >= 2,
            None => true,
        }
    })
}

/// Reduced row echelon form of `[m | r]`; `None` if inconsistent.
/// Returns pivot columns and reduced rows.
fn rref(mut rows: Vec<Vec<BigRational>>, n: usize) -> Option<(Vec<usize>, Vec<Vec<BigRational>>)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / &rows[r][col];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..=n {
                    let v = &rows[r][j] * &f;
                    rows[i][j] -= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    rows.truncate(r);
    Some((pivots, rows))
}

/// Particular solution plus null-space basis of a consistent system in RREF.
fn affine_solution(
    pivots: &[usize],
    rows: &[Vec<BigRational>],
    n: usize,
) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
    let mut x0 = vec![BigRational::zero(); n];
    for (row, &p) in rows.iter().zip(pivots) {
        x0[p] = row[n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (row, &p) in rows.iter().zip(pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect();
    (x0, basis)
}

struct Search<'a> {
    system: &'a [MPoly],
    eq_forms: Vec<Vec<Form>>,
    n: usize,
    found: Vec<Vec<BigRational>>,
    continua: Vec<TieContinuum>,
}

impl Search<'_> {
    fn push(&mut self, tau: Vec<BigRational>) {
        if !self.found.contains(&tau) && attains_twice(self.system, &tau) && self.transverse(&tau) {
            self.found.push(tau);
        }
    }

    /// Whether one maximal tie per equation can be chosen with independent normals.
    fn transverse(&self, tau: &[BigRational]) -> bool {
        let ties: Vec<Vec<Vec<BigRational>>> = self
            .eq_forms
            .iter()
            .map(|fs| {
                let vals: Vec<BigRational> = fs.iter().map(|f| f.at(tau)).collect();
                let max = vals.iter().max().unwrap();
                let top: Vec<&Form> = fs
                    .iter()
                    .zip(&vals)
                    .filter(|(_, v)| *v == max)
                    .map(|(f, _)| f)
                    .collect();
                let mut rows = Vec::new();
                for i in 0..top.len() {
                    for j in i + 1..top.len() {
                        let mut row: Vec<BigRational> =
                            (0..self.n).map(|k| q(top[i].a[k] - top[j].a[k])).collect();
                        row.push(BigRational::zero());
                        rows.push(row);
                    }
                }
                rows
            })
            .collect();
        let mut chosen = Vec::new();
        self.choose(&ties, 0, &mut chosen)
    }

    fn choose(
        &self,
        ties: &[Vec<Vec<BigRational>>],
        e: usize,
        chosen: &mut Vec<Vec<BigRational>>,
    ) -> bool {
        if e == ties.len() {
            return rref(chosen.clone(), self.n).is_some_and(|(p, _)| p.len() == self.n);
        }
        for row in &ties[e] {
            chosen.push(row.clone());
            if self.choose(ties, e + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// Explores the solution flat of `rows`; only full-rank ties yield candidates.
    fn flat(&mut self, rows: &[Vec<BigRational>], top: bool) -> Result<()> {
        let Some((pivots, red)) = rref(rows.to_vec(), self.n) else {
            return Ok(());
        };
        let (x0, basis) = affine_solution(&pivots, &red, self.n);
        match basis.len() {
            0 => {
                if top {
                    self.push(x0);
                }
                Ok(())
            }
            1 => self.line(&x0, &basis[0]),
            _ => {
                // Cut the flat with every tie hyperplane not containing it.
                let hyper = self.hyperplanes();
                for h in hyper {
                    let mut next = red.clone();
                    next.push(h);
                    let Some((p2, _)) = rref(next.clone(), self.n) else {
                        continue;
                    };
                    if p2.len() > pivots.len() {
                        self.flat(&next, false)?;
                    }
                }
                Ok(())
            }
        }
    }

    fn hyperplanes(&self) -> Vec<Vec<BigRational>> {
        let mut out = Vec::new();
        for fs in &self.eq_forms {
            for i in 0..fs.len() {
                for j in i + 1..fs.len() {
                    let mut row: Vec<BigRational> =
                        (0..self.n).map(|k| q(fs[i].a[k] - fs[j].a[k])).collect();
                    row.push(q(fs[j].c - fs[i].c));
                    if !out.contains(&row) {
                        out.push(row);
                    }
                }
            }
        }
        out
    }

    /// Records the pieces of the line `x0 + λ v` on which the tie condition holds.
    fn line(&mut self, x0: &[BigRational], v: &[BigRational]) -> Result<()> {
        let mut crit: Vec<BigRational> = Vec::new();
        for fs in &self.eq_forms {
            let lin: Vec<(BigRational, BigRational)> =
                fs.iter().map(|f| (f.at(x0), slope(f, v))).collect();
            for i in 0..lin.len() {
                for j in i + 1..lin.len() {
                    let db = &lin[i].1 - &lin[j].1;
                    if !db.is_zero() {
                        crit.push((&lin[j].0 - &lin[i].0) / db);
                    }
                }
            }
        }
        crit.sort();
        crit.dedup();
        let at = |l: &BigRational| -> Vec<BigRational> {
            x0.iter().zip(v).map(|(a, b)| a + b * l).collect()
        };
        let (Some(lo), Some(hi)) = (crit.first(), crit.last()) else {
            let tau = x0.to_vec();
            if attains_twice(self.system, &tau) {
                return Err(Error::UnboundedCandidates(format!(
                    "the tie condition holds on a whole line through {}",
                    fmt_tau(&tau)
                )));
            }
            return Ok(());
        };
        let neg: Vec<BigRational> = v.iter().map(|x| -x.clone()).collect();
        let mut pieces = Vec::new();
        if attains_twice(self.system, &at(&(lo - BigRational::one()))) {
            pieces.push(TieContinuum {
                start: at(lo),
                end: None,
                direction: neg,
            });
        }
        if attains_twice(self.system, &at(&(hi + BigRational::one()))) {
            pieces.push(TieContinuum {
                start: at(hi),
                end: None,
                direction: v.to_vec(),
            });
        }
        for w in crit.windows(2) {
            if attains_twice(self.system, &at(&((&w[0] + &w[1]) / q(2)))) {
                pieces.push(TieContinuum {
                    start: at(&w[0]),
                    end: Some(at(&w[1])),
                    direction: v.to_vec(),
                });
            }
        }
        for p in pieces {
            if !self.continua.contains(&p) {
                self.continua.push(p);
            }
        }
        Ok(())
    }
}

fn slope(f: &Form, v: &[BigRational]) -> BigRational {
    f.a.iter()
        .zip(v)
        .fold(BigRational::zero(), |acc, (&a, x)| acc + x * q(a))
}

fn fmt_tau(tau: &[BigRational]) -> String {
    let parts: Vec<String> = tau.iter().map(|t| t.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Exponent vectors `τ` at which every equation's maximal term exponent is
/// attained at least twice and some choice of one tie per equation has full
/// rank. Pieces of the tie set of positive dimension are listed in
/// [`ExponentSearch::continua`]; a tie line without any endpoint is an error.
pub fn leading_exponents(system: &[MPoly], n: usize) -> Result<ExponentSearch> {
    if system.iter().any(|e| e.nxi() != n) {
        return Err(Error::DimensionMismatch(format!(
            "system is not in {n} variables"
        )));
    }
    let eqs: Vec<&MPoly> = system.iter().filter(|e| !e.is_zero()).collect();
    let eq_forms: Vec<Vec<Form>> = eqs.iter().map(|e| forms(e)).collect();
    // A single-form equation can never tie.
    if eq_forms.iter().any(|f| f.len() < 2) {
        return Ok(ExponentSearch::default());
    }
    let pairs: Vec<Vec<(usize, usize)>> = eq_forms
        .iter()
        .map(|fs| {
            (0..fs.len())
                .flat_map(|i| (i + 1..fs.len()).map(move |j| (i, j)))
                .collect()
        })
        .collect();
    let total = pairs
        .iter()
        .fold(1u128, |acc, p| acc.saturating_mul(p.len() as u128));
    if total > MAX_COMBINATIONS {
        return Err(Error::TooLarge {
            what: "tie combinations",
            max: MAX_COMBINATIONS as usize,
            got: total.min(usize::MAX as u128) as usize,
        });
    }
    let mut search = Search {
        system,
        eq_forms: eq_forms.clone(),
        n,
        found: Vec::new(),
        continua: Vec::new(),
    };
    let mut idx = vec![0usize; pairs.len()];
    'outer: loop {
        let rows: Vec<Vec<BigRational>> = idx
            .iter()
            .enumerate()
            .map(|(e, &k)| {
                let (i, j) = pairs[e][k];
                let (fi, fj) = (&eq_forms[e][i], &eq_forms[e][j]);
                let mut row: Vec<BigRational> = (0..n).map(|c| q(fi.a[c] - fj.a[c])).collect();
                row.push(q(fj.c - fi.c));
                row
            })
            .collect();
        search.flat(&rows, true)?;
        for e in (0..idx.len()).rev() {
            idx[e] += 1;
            if idx[e] < pairs[e].len() {
                continue 'outer;
            }
            idx[e] = 0;
        }
        break;
    }
    let mut out = ExponentSearch::default();
    for tau in search.found {
        let c = ExponentCandidate { tau };
        if c.tau.iter().all(|t| small_denominator(t, MAX_DENOMINATOR)) {
            out.candidates.push(c);
        } else {
            out.outside_lattice.push(c);
        }
    }
    out.candidates.sort();
    out.outside_lattice.sort();
    out.continua = search.continua;
    Ok(out)
}
