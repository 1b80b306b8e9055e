//! The loss and gradient restricted to a fixed-point space, as exact polynomials
//! in the block coordinates `ξ` and the dimension `d`.
//!
//! Rows of `Ξ(ξ)` fall into classes (one per block); all inner products between
//! rows depend only on the classes and on whether the rows coincide, so the
//! double sum of the kernel loss collapses to a finite sum weighted by pair
//! counts that are polynomials in `d`.

use num_traits::One;

use super::poly::{q, MPoly};
use crate::error::{Error, Result};
use crate::symmetry::{CoordKind, FixedPointSpace, IsotropyPattern};
use crate::tensor::KernelSpec;

/// Inner product and multiplicity of one class of row pairs.
#[derive(Clone, Debug)]
pub struct ClassPair {
    pub row_block: usize,
    pub col_block: usize,
    /// The pair `(i, i)` rather than two distinct rows.
    pub same_row: bool,
    pub inner: MPoly,
    pub count: MPoly,
}

/// One class of entries `W_{im}` against the target rows `e_m`.
#[derive(Clone, Debug)]
pub struct EntryClass {
    pub block: usize,
    pub value: MPoly,
    pub count: MPoly,
}

/// Row-class inner products of `Ξ(ξ)` with pair counts polynomial in `d`.
#[derive(Clone, Debug)]
pub struct BlockInnerTable {
    pub pattern: IsotropyPattern,
    pub nxi: usize,
    pub block_sizes: Vec<MPoly>,
    pub norms: Vec<MPoly>,
    pub pairs: Vec<ClassPair>,
    pub entries: Vec<EntryClass>,
    pub coord_kinds: Vec<CoordKind>,
}

fn symbolic_sizes(pattern: IsotropyPattern, nxi: usize) -> Vec<MPoly> {
    let tail = |r: i64| MPoly::linear_in_d(nxi, 1, -r);
    let c = |v: i64| MPoly::int(nxi, v);
    match pattern {
        IsotropyPattern::Full | IsotropyPattern::DiagSd => vec![MPoly::d(nxi)],
        IsotropyPattern::DiagSd1 => vec![tail(1), c(1)],
        IsotropyPattern::DiagSd2 => vec![tail(2), c(2)],
        IsotropyPattern::DiagSd11 => vec![tail(2), c(1), c(1)],
        IsotropyPattern::DiagSplit(i) => vec![tail(i as i64), c(i as i64)],
    }
}

impl BlockInnerTable {
    pub fn new(pattern: IsotropyPattern) -> Result<Self> {
        let layout = FixedPointSpace::new(pattern, pattern.min_dim())?;
        let kinds = layout.coord_kinds().to_vec();
        let nxi = kinds.len();
        let sizes = symbolic_sizes(pattern, nxi);
        let nb = sizes.len();
        let zero = MPoly::zero(nxi);
        let one = MPoly::one(nxi);

        let find = |want: CoordKind| -> MPoly {
            if pattern == IsotropyPattern::Full {
                return MPoly::xi(nxi, 0);
            }
            match kinds.iter().position(|k| *k == want) {
                Some(a) => MPoly::xi(nxi, a),
                None => zero.clone(),
            }
        };
        let diag: Vec<MPoly> = (0..nb)
            .map(|p| find(CoordKind::Diag { block: p }))
            .collect();
        let off: Vec<MPoly> = (0..nb).map(|p| find(CoordKind::Off { block: p })).collect();
        let cross = |p: usize, r: usize| {
            find(CoordKind::Cross {
                row_block: p,
                col_block: r,
            })
        };

        let norms: Vec<MPoly> = (0..nb)
            .map(|p| {
                let mut n = &diag[p].pow(2) + &(&(&sizes[p] - &one) * &off[p].pow(2));
                for r in (0..nb).filter(|&r| r != p) {
                    n = &n + &(&sizes[r] * &cross(p, r).pow(2));
                }
                n
            })
            .collect();

        let mut pairs = Vec::new();
        for p in 0..nb {
            pairs.push(ClassPair {
                row_block: p,
                col_block: p,
                same_row: true,
                inner: norms[p].clone(),
                count: sizes[p].clone(),
            });
            let mut s = &(&diag[p] * &off[p]).scale(&q(2))
                + &(&(&sizes[p] - &MPoly::int(nxi, 2)) * &off[p].pow(2));
            for r in (0..nb).filter(|&r| r != p) {
                s = &s + &(&sizes[r] * &cross(p, r).pow(2));
            }
            pairs.push(ClassPair {
                row_block: p,
                col_block: p,
                same_row: false,
                inner: s,
                count: &sizes[p] * &(&sizes[p] - &one),
            });
            for qb in (0..nb).filter(|&qb| qb != p) {
                let (xpq, xqp) = (cross(p, qb), cross(qb, p));
                let mut s = &(&diag[p] * &xqp) + &(&xpq * &diag[qb]);
                s = &s + &(&(&sizes[p] - &one) * &(&off[p] * &xqp));
                s = &s + &(&(&sizes[qb] - &one) * &(&xpq * &off[qb]));
                for r in (0..nb).filter(|&r| r != p && r != qb) {
                    s = &s + &(&sizes[r] * &(&cross(p, r) * &cross(qb, r)));
                }
                pairs.push(ClassPair {
                    row_block: p,
                    col_block: qb,
                    same_row: false,
                    inner: s,
                    count: &sizes[p] * &sizes[qb],
                });
            }
        }

        let mut entries = Vec::new();
        for p in 0..nb {
            entries.push(EntryClass {
                block: p,
                value: diag[p].clone(),
                count: sizes[p].clone(),
            });
            entries.push(EntryClass {
                block: p,
                value: off[p].clone(),
                count: &sizes[p] * &(&sizes[p] - &one),
            });
            for r in (0..nb).filter(|&r| r != p) {
                entries.push(EntryClass {
                    block: p,
                    value: cross(p, r),
                    count: &sizes[p] * &sizes[r],
                });
            }
        }

        Ok(Self {
            pattern,
            nxi,
            block_sizes: sizes,
            norms,
            pairs,
            entries,
            coord_kinds: kinds,
        })
    }

    /// Number of entries each coordinate covers, as polynomials in `d`.
    pub fn coord_counts(&self) -> Vec<MPoly> {
        let s = &self.block_sizes;
        let one = MPoly::one(self.nxi);
        self.coord_kinds
            .iter()
            .map(|k| match *k {
                CoordKind::All => MPoly::d(self.nxi).pow(2),
                CoordKind::Diag { block } => s[block].clone(),
                CoordKind::Off { block } => &s[block] * &(&s[block] - &one),
                CoordKind::Cross {
                    row_block,
                    col_block,
                } => &s[row_block] * &s[col_block],
            })
            .collect()
    }

    /// Total number of row pairs; equals `d²` identically.
    pub fn total_pair_count(&self) -> MPoly {
        self.pairs
            .iter()
            .fold(MPoly::zero(self.nxi), |acc, p| &acc + &p.count)
    }
}

fn kernel_poly(spec: KernelSpec, s: &MPoly, a: &MPoly, b: &MPoly) -> MPoly {
    match spec {
        KernelSpec::FrobeniusPower(n) => s.pow(n),
        KernelSpec::CubicGaussian => &s.pow(3).scale(&q(6)) + &(&(a * b) * s).scale(&q(9)),
    }
}

/// `ℒ(Ξ(ξ))` as a polynomial in `ξ` and `d`.
pub fn symbolic_restricted_loss(spec: KernelSpec, pattern: IsotropyPattern) -> Result<MPoly> {
    if let KernelSpec::FrobeniusPower(n) = spec {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("kernel power {n} < 2")));
        }
    }
    let t = BlockInnerTable::new(pattern)?;
    let nxi = t.nxi;
    let one = MPoly::one(nxi);
    let mut total = MPoly::zero(nxi);
    for pair in &t.pairs {
        let k = kernel_poly(
            spec,
            &pair.inner,
            &t.norms[pair.row_block],
            &t.norms[pair.col_block],
        );
        total = &total + &(&pair.count * &k);
    }
    for e in &t.entries {
        if e.value.is_zero() {
            continue;
        }
        let k = kernel_poly(spec, &e.value, &t.norms[e.block], &one);
        total = &total - &(&e.count * &k).scale(&q(2));
    }
    let unit = kernel_poly(spec, &one, &one, &one);
    Ok(&total + &(&MPoly::d(nxi) * &unit))
}

/// The entrywise restricted gradient `(∂ℒ(Ξ(ξ))/∂ξ_a) / count_a(d)`.
///
/// Its components are the common values of `∇ℒ(Ξ(ξ))` on each block.
pub fn symbolic_restricted_gradient(
    spec: KernelSpec,
    pattern: IsotropyPattern,
) -> Result<Vec<MPoly>> {
    let loss = symbolic_restricted_loss(spec, pattern)?;
    let t = BlockInnerTable::new(pattern)?;
    t.coord_counts()
        .iter()
        .enumerate()
        .map(|(a, c)| loss.diff(a).div_exact_by_d_poly(c))
        .collect()
}

/// Scales every polynomial by `1/2`, the conventional normalization of the restricted systems.
pub fn halved(system: &[MPoly]) -> Vec<MPoly> {
    let half = num_rational::BigRational::new(One::one(), 2.into());
    system.iter().map(|p| p.scale(&half)).collect()
}

/// Jacobian `∂g_a/∂ξ_b` of a system.
pub fn jacobian(system: &[MPoly]) -> Vec<Vec<MPoly>> {
    system
        .iter()
        .map(|p| (0..p.nxi()).map(|b| p.diff(b)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::poly::qf;
    use crate::symmetry::restrict_gradient;
    use crate::tensor::loss;

    #[test]
    fn full_pattern_losses() {
        let f = symbolic_restricted_loss(KernelSpec::FROBENIUS, IsotropyPattern::Full).unwrap();
        assert_eq!(f, MPoly::parse("x1^6*d^5 - 2*x1^3*d^2 + d").unwrap());
        let g = symbolic_restricted_loss(KernelSpec::CubicGaussian, IsotropyPattern::Full).unwrap();
        assert_eq!(
            g,
            MPoly::parse("15*x1^6*d^5 - 18*x1^3*d^3 - 12*x1^3*d^2 + 15*d").unwrap()
        );
    }

    #[test]
    fn pair_counts_sum_to_d_squared() {
        for p in [
            IsotropyPattern::Full,
            IsotropyPattern::DiagSd,
            IsotropyPattern::DiagSd1,
            IsotropyPattern::DiagSd2,
            IsotropyPattern::DiagSd11,
            IsotropyPattern::DiagSplit(3),
        ] {
            let t = BlockInnerTable::new(p).unwrap();
            assert_eq!(t.total_pair_count(), MPoly::d(t.nxi).pow(2), "{p}");
        }
    }

    #[test]
    fn uniform_point_loss() {
        let l = symbolic_restricted_loss(KernelSpec::FROBENIUS, IsotropyPattern::DiagSd).unwrap();
        let v = l.eval_q(&[qf(1, 5), qf(1, 5)], &q(5));
        assert_eq!(v, qf(24, 5));
    }

    #[test]
    fn full_gradient_is_proportional_to_quintic() {
        let g = symbolic_restricted_gradient(KernelSpec::FROBENIUS, IsotropyPattern::Full).unwrap();
        assert_eq!(g[0], MPoly::parse("6*x1^5*d^3 - 6*x1^2").unwrap());
    }

    #[test]
    fn diagonal_system_matches_reference() {
        let g = halved(
            &symbolic_restricted_gradient(KernelSpec::FROBENIUS, IsotropyPattern::DiagSd).unwrap(),
        );
        let e1 = MPoly::parse(
            "3*x2^5*d^3 + 15*x1*x2^4*d^2 - 15*x2^5*d^2 + 6*x1^3*x2^2*d + 12*x1^2*x2^3*d \
             - 42*x1*x2^4*d + 24*x2^5*d + 3*x1^5 - 6*x1^3*x2^2 - 12*x1^2*x2^3 - 3*x1^2 \
             + 27*x1*x2^4 - 12*x2^5",
        )
        .unwrap();
        let e2 = MPoly::parse(
            "3*x2^5*d^3 + 15*x1*x2^4*d^2 - 15*x2^5*d^2 + 30*x1^2*x2^3*d - 60*x1*x2^4*d \
             + 30*x2^5*d + 3*x1^4*x2 + 12*x1^3*x2^2 - 54*x1^2*x2^3 + 60*x1*x2^4 - 21*x2^5 - 3*x2^2",
        )
        .unwrap();
        assert_eq!(g[0], e1);
        assert_eq!(g[1], e2);
        assert_eq!(e1.len() + e2.len(), 25);
    }

    #[test]
    fn numeric_agreement_on_all_patterns() {
        let d = 6usize;
        for spec in [KernelSpec::FROBENIUS, KernelSpec::CubicGaussian] {
            for p in [
                IsotropyPattern::Full,
                IsotropyPattern::DiagSd,
                IsotropyPattern::DiagSd1,
                IsotropyPattern::DiagSd2,
                IsotropyPattern::DiagSd11,
            ] {
                let space = FixedPointSpace::new(p, d).unwrap();
                let xi: Vec<f64> = (0..space.dim())
                    .map(|a| 0.4 * ((a as f64) * 1.3 + 0.2).sin())
                    .collect();
                let sl = symbolic_restricted_loss(spec, p)
                    .unwrap()
                    .eval_f64(&xi, d as f64);
                let nl = loss(spec, &space.embed(&xi).unwrap());
                assert!(
                    (sl - nl).abs() <= 1e-10 * (1.0 + nl.abs()),
                    "{p} loss {sl} vs {nl}"
                );
                let sg = symbolic_restricted_gradient(spec, p).unwrap();
                let ng = restrict_gradient(spec, &space, &xi).unwrap();
                for (a, (s, n)) in sg.iter().zip(&ng).enumerate() {
                    let s = s.eval_f64(&xi, d as f64);
                    assert!(
                        (s - n).abs() <= 1e-9 * (1.0 + n.abs()),
                        "{p} comp {a}: {s} vs {n}"
                    );
                }
            }
        }
    }
}
