//! Row/column permutation action on `M(k, d)`, isotropy groups, and fixed-point
//! spaces of diagonal permutation groups.
//!
//! Fixed-point spaces use 0/1 block-indicator bases. Indices `0..d` are split
//! into consecutive blocks; for every ordered block pair `(P, Q)` the space has
//! one coordinate for the `P × Q` entries, except that a diagonal pair `(P, P)`
//! with `|P| > 1` gets two (diagonal and off-diagonal). Coordinates are ordered
//! by `P`, then `Q`, diagonal before off-diagonal, so a coordinate equals the
//! common value of its block entries.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::gradient;
use crate::error::{Error, Result};
use crate::tensor::{KernelSpec, WeightMatrix};

/// Largest `k` and `d` accepted by the brute-force isotropy search.
pub const ISOTROPY_MAX_DIM: usize = 6;

/// A pair of permutations acting on rows and columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermPair {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

fn is_bijection(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

impl PermPair {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if !is_bijection(&rows) || !is_bijection(&cols) {
            return Err(Error::InvalidArgument(
                "permutation pair components must be bijections".into(),
            ));
        }
        Ok(Self { rows, cols })
    }

    pub fn identity(k: usize, d: usize) -> Self {
        Self {
            rows: (0..k).collect(),
            cols: (0..d).collect(),
        }
    }

    /// The same permutation on rows and columns.
    pub fn diagonal(p: Vec<usize>) -> Result<Self> {
        Self::new(p.clone(), p)
    }

    pub fn random<R: Rng + ?Sized>(k: usize, d: usize, rng: &mut R) -> Self {
        let mut rows: Vec<usize> = (0..k).collect();
        let mut cols: Vec<usize> = (0..d).collect();
        rows.shuffle(rng);
        cols.shuffle(rng);
        Self { rows, cols }
    }

    /// `(self ∘ other)`: apply `other` first.
    pub fn compose(&self, other: &PermPair) -> PermPair {
        PermPair {
            rows: other.rows.iter().map(|&i| self.rows[i]).collect(),
            cols: other.cols.iter().map(|&j| self.cols[j]).collect(),
        }
    }

    pub fn inverse(&self) -> PermPair {
        PermPair {
            rows: invert(&self.rows),
            cols: invert(&self.cols),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, &x)| i == x)
            && self.cols.iter().enumerate().all(|(i, &x)| i == x)
    }
}

/// `(σW)_{ij} = W_{σ₁⁻¹(i), σ₂⁻¹(j)}`.
pub fn act(sigma: &PermPair, w: &WeightMatrix) -> Result<WeightMatrix> {
    if sigma.rows.len() != w.rows() || sigma.cols.len() != w.cols() {
        return Err(Error::DimensionMismatch(format!(
            "permutation pair of size {}x{} acting on a {}x{} matrix",
            sigma.rows.len(),
            sigma.cols.len(),
            w.rows(),
            w.cols()
        )));
    }
    let ri = invert(&sigma.rows);
    let ci = invert(&sigma.cols);
    Ok(WeightMatrix::from_fn(w.rows(), w.cols(), |i, j| {
        w.get(ri[i], ci[j])
    }))
}

/// Acts on a stacked-row vector (e.g. a gradient) as on the matrix it encodes.
pub fn act_stacked(sigma: &PermPair, v: &[f64]) -> Vec<f64> {
    let (k, d) = (sigma.rows.len(), sigma.cols.len());
    assert_eq!(v.len(), k * d);
    let ri = invert(&sigma.rows);
    let ci = invert(&sigma.cols);
    let mut out = vec![0.0; k * d];
    for i in 0..k {
        for j in 0..d {
            out[i * d + j] = v[ri[i] * d + ci[j]];
        }
    }
    out
}

/// Steps `p` to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Default membership tolerance `1e-9·(1 + ‖W‖_max)`.
pub fn default_isotropy_tol(w: &WeightMatrix) -> f64 {
    1e-9 * (1.0 + w.max_abs())
}

/// All pairs `σ` with `‖σW − W‖_max ≤ tol`, by exhaustive search.
pub fn isotropy_group(w: &WeightMatrix, tol: f64) -> Result<Vec<PermPair>> {
    let (k, d) = (w.rows(), w.cols());
    if k > ISOTROPY_MAX_DIM || d > ISOTROPY_MAX_DIM {
        return Err(Error::TooLarge {
            what: "isotropy enumeration",
            max: ISOTROPY_MAX_DIM,
            got: k.max(d),
        });
    }
    let mut out = Vec::new();
    let mut gamma: Vec<usize> = (0..d).collect();
    loop {
        // σW = W  ⇔  W[ρ(i)][γ(j)] = W[i][j] with ρ = σ₁⁻¹, γ = σ₂⁻¹.
        let cand: Vec<Vec<usize>> = (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&r| (0..d).all(|j| (w.get(r, gamma[j]) - w.get(i, j)).abs() <= tol))
                    .collect()
            })
            .collect();
        if cand.iter().all(|c| !c.is_empty()) {
            let mut rho = vec![usize::MAX; k];
            let mut used = vec![false; k];
            let cols = invert(&gamma);
            assign_rows(0, &cand, &mut rho, &mut used, &mut |rho| {
                out.push(PermPair {
                    rows: invert(rho),
                    cols: cols.clone(),
                });
            });
        }
        if !next_permutation(&mut gamma) {
            break;
        }
    }
    out.sort();
    Ok(out)
}

fn assign_rows(
    i: usize,
    cand: &[Vec<usize>],
    rho: &mut Vec<usize>,
    used: &mut Vec<bool>,
    emit: &mut impl FnMut(&[usize]),
) {
    if i == cand.len() {
        emit(rho);
        return;
    }
    for &r in &cand[i] {
        if !used[r] {
            used[r] = true;
            rho[i] = r;
            assign_rows(i + 1, cand, rho, used, emit);
            used[r] = false;
        }
    }
}

/// `k!·d! / |isotropy(W)|`.
pub fn orbit_length(w: &WeightMatrix) -> Result<u128> {
    let g = isotropy_group(w, default_isotropy_tol(w))?;
    Ok(factorial(w.rows()) * factorial(w.cols()) / g.len() as u128)
}

/// Named isotropy patterns of the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IsotropyPattern {
    /// `S_d × S_d`; fixed points are multiples of the all-ones matrix.
    Full,
    /// `ΔS_d`.
    DiagSd,
    /// `Δ(S_{d−1} × S_1)`.
    DiagSd1,
    /// `Δ(S_{d−2} × S_2)`.
    DiagSd2,
    /// `Δ(S_{d−2} × S_1 × S_1)`.
    DiagSd11,
    /// `Δ(S_{d−i} × S_i)` for a general tail size `i`.
    DiagSplit(usize),
}

impl IsotropyPattern {
    pub fn min_dim(&self) -> usize {
        match self {
            IsotropyPattern::Full | IsotropyPattern::DiagSd => 2,
            IsotropyPattern::DiagSd1 => 3,
            IsotropyPattern::DiagSd2 | IsotropyPattern::DiagSd11 => 4,
            IsotropyPattern::DiagSplit(i) => i + 2,
        }
    }

    /// Consecutive block sizes of `0..d` (a single block for `Full`).
    pub fn blocks(&self, d: usize) -> Result<Vec<usize>> {
        if d < self.min_dim() {
            return Err(Error::InvalidArgument(format!(
                "pattern {self} needs d >= {}, got {d}",
                self.min_dim()
            )));
        }
        Ok(match *self {
            IsotropyPattern::Full | IsotropyPattern::DiagSd => vec![d],
            IsotropyPattern::DiagSd1 => vec![d - 1, 1],
            IsotropyPattern::DiagSd2 => vec![d - 2, 2],
            IsotropyPattern::DiagSd11 => vec![d - 2, 1, 1],
            IsotropyPattern::DiagSplit(i) => vec![d - i, i],
        })
    }

    /// Group order at dimension `d`.
    pub fn order(&self, d: usize) -> Result<u128> {
        let b = self.blocks(d)?;
        Ok(match self {
            IsotropyPattern::Full => factorial(d) * factorial(d),
            _ => b.iter().map(|&s| factorial(s)).product(),
        })
    }

    /// Generators: adjacent transpositions inside every block, applied to rows
    /// and columns together (independently for `Full`).
    pub fn generators(&self, d: usize) -> Result<Vec<PermPair>> {
        let blocks = self.blocks(d)?;
        let id: Vec<usize> = (0..d).collect();
        let mut gens = Vec::new();
        let mut start = 0;
        for size in blocks {
            for a in start..start + size.saturating_sub(1) {
                let mut p = id.clone();
                p.swap(a, a + 1);
                if *self == IsotropyPattern::Full {
                    gens.push(PermPair::new(p.clone(), id.clone())?);
                    gens.push(PermPair::new(id.clone(), p)?);
                } else {
                    gens.push(PermPair::diagonal(p)?);
                }
            }
            start += size;
        }
        Ok(gens)
    }

    pub fn parse(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "full" => IsotropyPattern::Full,
            "diagsd" => IsotropyPattern::DiagSd,
            "diagsd1" => IsotropyPattern::DiagSd1,
            "diagsd2" => IsotropyPattern::DiagSd2,
            "diagsd11" => IsotropyPattern::DiagSd11,
            other => {
                if let Some(rest) = other.strip_prefix("diagsplit:") {
                    let i = rest
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("pattern `{name}`: {e}")))?;
                    if i == 0 {
                        return Err(Error::InvalidArgument("split size must be >= 1".into()));
                    }
                    IsotropyPattern::DiagSplit(i)
                } else {
                    return Err(Error::Parse(format!("unknown isotropy pattern `{name}`")));
                }
            }
        })
    }
}

impl fmt::Display for IsotropyPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsotropyPattern::Full => write!(f, "Full"),
            IsotropyPattern::DiagSd => write!(f, "DiagSd"),
            IsotropyPattern::DiagSd1 => write!(f, "DiagSd1"),
            IsotropyPattern::DiagSd2 => write!(f, "DiagSd2"),
            IsotropyPattern::DiagSd11 => write!(f, "DiagSd11"),
            IsotropyPattern::DiagSplit(i) => write!(f, "DiagSplit:{i}"),
        }
    }
}

/// Which entries of a block pair a coordinate covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoordKind {
    /// Every entry (only for `Full`).
    All,
    /// Diagonal entries of a diagonal block.
    Diag { block: usize },
    /// Off-diagonal entries of a diagonal block.
    Off { block: usize },
    /// Entries with rows in `row_block` and columns in `col_block`.
    Cross { row_block: usize, col_block: usize },
}

/// A fixed-point space `M(d,d)^G` with its 0/1 block basis.
#[derive(Clone, Debug)]
pub struct FixedPointSpace {
    pattern: IsotropyPattern,
    d: usize,
    blocks: Vec<usize>,
    starts: Vec<usize>,
    coords: Vec<CoordKind>,
}

impl FixedPointSpace {
    pub fn new(pattern: IsotropyPattern, d: usize) -> Result<Self> {
        let blocks = pattern.blocks(d)?;
        let mut starts = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for &b in &blocks {
            starts.push(acc);
            acc += b;
        }
        let coords = coord_layout(pattern, &blocks);
        Ok(Self {
            pattern,
            d,
            blocks,
            starts,
            coords,
        })
    }

    pub fn pattern(&self) -> IsotropyPattern {
        self.pattern
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn coord_kinds(&self) -> &[CoordKind] {
        &self.coords
    }

    fn block_of(&self, i: usize) -> usize {
        self.starts.iter().rposition(|&s| s <= i).unwrap()
    }

    /// Index of the coordinate owning entry `(i, j)`.
    pub fn coord_of(&self, i: usize, j: usize) -> usize {
        if self.pattern == IsotropyPattern::Full {
            return 0;
        }
        let (p, q) = (self.block_of(i), self.block_of(j));
        let want = if p != q {
            CoordKind::Cross {
                row_block: p,
                col_block: q,
            }
        } else if i == j {
            CoordKind::Diag { block: p }
        } else {
            CoordKind::Off { block: p }
        };
        self.coords.iter().position(|c| *c == want).unwrap()
    }

    /// Number of matrix entries covered by each coordinate (the diagonal Gram).
    pub fn counts(&self) -> Vec<usize> {
        let b = &self.blocks;
        self.coords
            .iter()
            .map(|c| match *c {
                CoordKind::All => self.d * self.d,
                CoordKind::Diag { block } => b[block],
                CoordKind::Off { block } => b[block] * (b[block] - 1),
                CoordKind::Cross {
                    row_block,
                    col_block,
                } => b[row_block] * b[col_block],
            })
            .collect()
    }

    /// Basis matrix of coordinate `a`.
    pub fn basis(&self, a: usize) -> WeightMatrix {
        WeightMatrix::from_fn(self.d, self.d, |i, j| {
            if self.coord_of(i, j) == a {
                1.0
            } else {
                0.0
            }
        })
    }

    /// `Ξ(ξ) = Σ ξ_a B_a`.
    pub fn embed(&self, xi: &[f64]) -> Result<WeightMatrix> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a {}-dimensional fixed-point space",
                xi.len(),
                self.dim()
            )));
        }
        Ok(WeightMatrix::from_fn(self.d, self.d, |i, j| {
            xi[self.coord_of(i, j)]
        }))
    }

    /// Orthogonal-projection coordinates: block averages of `W`.
    pub fn coordinates(&self, w: &WeightMatrix) -> Result<Vec<f64>> {
        if w.rows() != self.d || w.cols() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                self.d,
                w.rows(),
                w.cols()
            )));
        }
        Ok(self.average(w.as_slice()))
    }

    fn average(&self, v: &[f64]) -> Vec<f64> {
        let mut sums = vec![0.0; self.dim()];
        for i in 0..self.d {
            for j in 0..self.d {
                sums[self.coord_of(i, j)] += v[i * self.d + j];
            }
        }
        sums.iter()
            .zip(self.counts())
            .map(|(s, c)| s / c as f64)
            .collect()
    }

    /// Largest deviation of `W` from its projection onto the space.
    pub fn distance_max(&self, w: &WeightMatrix) -> Result<f64> {
        let proj = self.embed(&self.coordinates(w)?)?;
        Ok(proj.max_abs_diff(w))
    }
}

fn coord_layout(pattern: IsotropyPattern, blocks: &[usize]) -> Vec<CoordKind> {
    if pattern == IsotropyPattern::Full {
        return vec![CoordKind::All];
    }
    let mut out = Vec::new();
    for p in 0..blocks.len() {
        for q in 0..blocks.len() {
            if p == q {
                out.push(CoordKind::Diag { block: p });
                if blocks[p] > 1 {
                    out.push(CoordKind::Off { block: p });
                }
            } else {
                out.push(CoordKind::Cross {
                    row_block: p,
                    col_block: q,
                });
            }
        }
    }
    out
}

/// Entrywise gradient on the fixed-point space: `g_a = ⟨∇ℒ(Ξ(ξ)), B_a⟩ / ⟨B_a, B_a⟩`.
///
/// Equivalently `(∂/∂ξ_a) ℒ(Ξ(ξ)) / count_a`, the common value of the full
/// gradient on the entries of block `a`.
pub fn restrict_gradient(
    spec: KernelSpec,
    space: &FixedPointSpace,
    xi: &[f64],
) -> Result<Vec<f64>> {
    let w = space.embed(xi)?;
    Ok(space.average(&gradient(spec, &w)))
}

/// Summary of a permutation group acting on `M(k, d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSignature {
    pub order: u128,
    /// Sizes of the row orbits, sorted descending.
    pub row_orbits: Vec<usize>,
    /// Sizes of the column orbits, sorted descending.
    pub col_orbits: Vec<usize>,
    /// Whether `σ ↦ σ₁` and `σ ↦ σ₂` are injective.
    pub row_faithful: bool,
    pub col_faithful: bool,
}

fn orbit_sizes(perms: &[&Vec<usize>], n: usize) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for p in perms {
        for (i, &j) in p.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        *sizes.entry(r).or_default() += 1;
    }
    let mut v: Vec<usize> = sizes.into_values().collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

pub fn group_signature(group: &[PermPair]) -> GroupSignature {
    let (k, d) = group
        .first()
        .map(|g| (g.rows.len(), g.cols.len()))
        .unwrap_or((0, 0));
    let rows: Vec<&Vec<usize>> = group.iter().map(|g| &g.rows).collect();
    let cols: Vec<&Vec<usize>> = group.iter().map(|g| &g.cols).collect();
    let distinct = |v: &[&Vec<usize>]| {
        let mut m: HashMap<&Vec<usize>, ()> = HashMap::new();
        for x in v {
            m.insert(x, ());
        }
        m.len()
    };
    GroupSignature {
        order: group.len() as u128,
        row_orbits: orbit_sizes(&rows, k),
        col_orbits: orbit_sizes(&cols, d),
        row_faithful: distinct(&rows) == group.len(),
        col_faithful: distinct(&cols) == group.len(),
    }
}

/// Identifies a group, up to conjugation, among the named diagonal patterns.
///
/// A diagonal pattern `Δ(S_{λ₁} × … × S_{λ_r})` is recognized by faithful row
/// and column projections, row and column orbit sizes equal to `λ`, and order
/// `Π λ_i!` (which forces the full symmetric group on each orbit).
pub fn match_pattern(group: &[PermPair]) -> Option<IsotropyPattern> {
    let sig = group_signature(group);
    let d = sig.col_orbits.iter().sum::<usize>();
    if sig.row_orbits.iter().sum::<usize>() != d || d < 2 {
        return None;
    }
    if sig.order == factorial(d) * factorial(d) && sig.row_orbits == vec![d] {
        return Some(IsotropyPattern::Full);
    }
    if !(sig.row_faithful && sig.col_faithful) || sig.row_orbits != sig.col_orbits {
        return None;
    }
    if sig.order
        != sig
            .row_orbits
            .iter()
            .map(|&s| factorial(s))
            .product::<u128>()
    {
        return None;
    }
    let candidates = [
        IsotropyPattern::DiagSd,
        IsotropyPattern::DiagSd1,
        IsotropyPattern::DiagSd2,
        IsotropyPattern::DiagSd11,
    ];
    for p in candidates {
        if let Ok(mut b) = p.blocks(d) {
            b.sort_unstable_by(|a, b| b.cmp(a));
            if b == sig.row_orbits {
                return Some(p);
            }
        }
    }
    if sig.row_orbits.len() == 2 {
        return Some(IsotropyPattern::DiagSplit(sig.row_orbits[1]));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c5t(d: usize, t: f64) -> WeightMatrix {
        let mut w = WeightMatrix::identity(d);
        w.set(d - 2, d - 2, (1.0 - t * t * t).cbrt());
        w.set(d - 1, d - 2, t);
        w.set(d - 1, d - 1, 0.0);
        w
    }

    #[test]
    fn action_basics() {
        let w = WeightMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        assert_eq!(act(&PermPair::identity(3, 3), &w).unwrap(), w);
        let pi = PermPair::diagonal(vec![2, 0, 1]).unwrap();
        let id = WeightMatrix::identity(3);
        assert_eq!(act(&pi, &id).unwrap(), id);
        let swap = PermPair::new(vec![1, 0], vec![0, 1]).unwrap();
        let p = act(&swap, &WeightMatrix::identity(2)).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        assert!(act(&swap, &w).is_err());
        assert!(PermPair::new(vec![0, 0], vec![0, 1]).is_err());
    }

    #[test]
    fn action_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = WeightMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64);
        for _ in 0..20 {
            let a = PermPair::random(3, 4, &mut rng);
            let b = PermPair::random(3, 4, &mut rng);
            let lhs = act(&a.compose(&b), &w).unwrap();
            let rhs = act(&a, &act(&b, &w).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert!(a.compose(&a.inverse()).is_identity());
            assert_eq!(
                act_stacked(&a, w.as_slice()),
                act(&a, &w).unwrap().as_slice()
            );
        }
    }

    #[test]
    fn isotropy_examples() {
        let id = WeightMatrix::identity(4);
        let g = isotropy_group(&id, 1e-9).unwrap();
        assert_eq!(g.len(), 24);
        assert_eq!(match_pattern(&g), Some(IsotropyPattern::DiagSd));
        let ones = WeightMatrix::constant(4, 4, 1.0);
        let g = isotropy_group(&ones, 1e-9).unwrap();
        assert_eq!(g.len(), 576);
        assert_eq!(match_pattern(&g), Some(IsotropyPattern::Full));
        assert_eq!(orbit_length(&id).unwrap(), 24);
        assert!(isotropy_group(&WeightMatrix::identity(7), 1e-9).is_err());
    }

    #[test]
    fn continuum_isotropy() {
        let generic = c5t(4, 0.7);
        let g = isotropy_group(&generic, default_isotropy_tol(&generic)).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(match_pattern(&g), Some(IsotropyPattern::DiagSd11));
        assert_eq!(orbit_length(&generic).unwrap(), 288);
        let base = c5t(4, 0.0);
        let g = isotropy_group(&base, 1e-9).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(match_pattern(&g), Some(IsotropyPattern::DiagSd1));
    }

    #[test]
    fn spaces_have_expected_dims_and_are_fixed() {
        let cases = [
            (IsotropyPattern::Full, 1),
            (IsotropyPattern::DiagSd, 2),
            (IsotropyPattern::DiagSd1, 5),
            (IsotropyPattern::DiagSd2, 6),
            (IsotropyPattern::DiagSd11, 10),
            (IsotropyPattern::DiagSplit(3), 6),
        ];
        for (p, n) in cases {
            let s = FixedPointSpace::new(p, 6).unwrap();
            assert_eq!(s.dim(), n, "{p}");
            assert_eq!(s.counts().iter().sum::<usize>(), 36);
            for a in 0..n {
                let b = s.basis(a);
                for g in p.generators(6).unwrap() {
                    assert_eq!(act(&g, &b).unwrap(), b, "{p} basis {a}");
                }
            }
        }
        assert!(FixedPointSpace::new(IsotropyPattern::DiagSd11, 3).is_err());
    }

    #[test]
    fn embed_examples() {
        let s = FixedPointSpace::new(IsotropyPattern::DiagSd, 4).unwrap();
        assert_eq!(s.embed(&[1.0, 0.0]).unwrap(), WeightMatrix::identity(4));
        assert_eq!(
            s.embed(&[0.25, 0.25]).unwrap(),
            WeightMatrix::constant(4, 4, 0.25)
        );
        let s1 = FixedPointSpace::new(IsotropyPattern::DiagSd1, 4).unwrap();
        assert_eq!(s1.embed(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), c5t(4, 0.0));
        assert!(s1.embed(&[1.0]).is_err());
        let xi = [0.3, -0.1, 0.7, 0.2, -0.5];
        let back = s1.coordinates(&s1.embed(&xi).unwrap()).unwrap();
        for (a, b) in xi.iter().zip(&back) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn restricted_gradient_of_full_pattern() {
        let s = FixedPointSpace::new(IsotropyPattern::Full, 5).unwrap();
        let x: f64 = 0.3;
        let g = restrict_gradient(KernelSpec::FROBENIUS, &s, &[x]).unwrap();
        let d: f64 = 5.0;
        assert!((g[0] - (6.0 * x.powi(5) * d.powi(3) - 6.0 * x * x)).abs() < 1e-12);
        let s1 = FixedPointSpace::new(IsotropyPattern::DiagSd1, 5).unwrap();
        let g = restrict_gradient(KernelSpec::FROBENIUS, &s1, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn pattern_parsing() {
        assert_eq!(
            IsotropyPattern::parse("DiagSd1").unwrap(),
            IsotropyPattern::DiagSd1
        );
        assert_eq!(
            IsotropyPattern::parse("diagsplit:3").unwrap(),
            IsotropyPattern::DiagSplit(3)
        );
        assert!(IsotropyPattern::parse("nope").is_err());
        assert_eq!(IsotropyPattern::DiagSd2.order(5).unwrap(), 12);
    }
}
