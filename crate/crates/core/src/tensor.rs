//! Weight matrices, similarity kernels and the kernel form of the decomposition loss.
//!
//! The target tensor is always `T_e = Σ_i e_i^{⊗3}` and the scalar weights are
//! absorbed into the rows of `W`, so the loss of a `k × d` weight matrix reads
//!
//! ```text
//! L(W) = Σ_{i,j} κ(w_i, w_j) − 2 Σ_{i,m} κ(w_i, e_m) + Σ_{m,m'} κ(e_m, e_m')
//! ```
//!
//! Two kernels are supported: the Frobenius power kernel `⟨w,v⟩^n` and the
//! cubic-Gaussian kernel `6⟨w,v⟩³ + 9‖w‖²‖v‖²⟨w,v⟩`. The module also carries a
//! dense-tensor evaluator that builds `Σ w_i^{⊗3}` explicitly; it shares no code
//! with the kernel path and serves as its oracle.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension accepted by the dense-tensor oracle.
pub const DENSE_ORACLE_MAX_DIM: usize = 12;

/// A `k × d` real matrix whose rows are the decomposition components.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols < 2 {
            return Err(Error::InvalidArgument(format!(
                "weight matrix must have k >= 1 and d >= 2, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite entry {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// The matrix with every entry equal to `value`.
    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from a stacked-row vector (row `i` occupies `i*d..(i+1)*d`).
    pub fn from_stacked(rows: usize, cols: usize, v: &[f64]) -> Result<Self> {
        Self::new(rows, cols, v.to_vec())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Entries in stacked-row order.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest entrywise difference; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &WeightMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &WeightMatrix, factor: f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + factor * b)
                .collect(),
        }
    }
}

impl fmt::Debug for WeightMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "WeightMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Similarity kernel selecting the tensor norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelSpec {
    /// `κ(w, v) = ⟨w, v⟩^n`, the Frobenius norm of order-`n` tensors.
    FrobeniusPower(u32),
    /// `κ(w, v) = 6⟨w,v⟩³ + 9‖w‖²‖v‖²⟨w,v⟩`, the cubic-Gaussian norm.
    CubicGaussian,
}

/// Partial derivatives of a kernel written as a function `κ(s, a, b)` of
/// `s = ⟨w,v⟩`, `a = ‖w‖²` and `b = ‖v‖²`.
#[derive(Clone, Copy, Debug, Default)]
pub struct KernelPartials {
    pub value: f64,
    pub s: f64,
    pub a: f64,
    pub ss: f64,
    pub sa: f64,
    pub sb: f64,
    pub aa: f64,
    pub ab: f64,
}

impl KernelSpec {
    /// The Frobenius kernel of the order-3 problem.
    pub const FROBENIUS: KernelSpec = KernelSpec::FrobeniusPower(3);

    pub fn frobenius(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "Frobenius power kernel needs n >= 2, got {n}"
            )));
        }
        Ok(KernelSpec::FrobeniusPower(n))
    }

    pub fn is_frobenius(&self) -> bool {
        matches!(self, KernelSpec::FrobeniusPower(_))
    }

    /// `κ(e_m, e_m)`, which is also the per-column contribution of the target.
    pub fn unit_self_value(&self) -> f64 {
        match self {
            KernelSpec::FrobeniusPower(_) => 1.0,
            KernelSpec::CubicGaussian => 15.0,
        }
    }

    pub fn name(&self) -> String {
        match self {
            KernelSpec::FrobeniusPower(3) => "frobenius".to_string(),
            KernelSpec::FrobeniusPower(n) => format!("frobenius{n}"),
            KernelSpec::CubicGaussian => "gauss".to_string(),
        }
    }

    #[inline]
    pub fn value(&self, s: f64, a: f64, b: f64) -> f64 {
        match *self {
            KernelSpec::FrobeniusPower(n) => s.powi(n as i32),
            KernelSpec::CubicGaussian => 6.0 * s * s * s + 9.0 * a * b * s,
        }
    }

    #[inline]
    pub fn partials(&self, s: f64, a: f64, b: f64) -> KernelPartials {
        match *self {
            KernelSpec::FrobeniusPower(n) => {
                let n_f = n as f64;
                let sn2 = s.powi(n as i32 - 2);
                KernelPartials {
                    value: sn2 * s * s,
                    s: n_f * sn2 * s,
                    ss: n_f * (n_f - 1.0) * sn2,
                    ..Default::default()
                }
            }
            KernelSpec::CubicGaussian => KernelPartials {
                value: 6.0 * s * s * s + 9.0 * a * b * s,
                s: 18.0 * s * s + 9.0 * a * b,
                a: 9.0 * b * s,
                ss: 36.0 * s,
                sa: 9.0 * b,
                sb: 9.0 * a,
                aa: 0.0,
                ab: 9.0 * s,
            },
        }
    }

    /// Exact kernel value on rational inner products.
    pub fn value_exact(&self, s: &BigRational, a: &BigRational, b: &BigRational) -> BigRational {
        match *self {
            KernelSpec::FrobeniusPower(n) => num_traits::pow(s.clone(), n as usize),
            KernelSpec::CubicGaussian => {
                let six = BigRational::from_integer(BigInt::from(6));
                let nine = BigRational::from_integer(BigInt::from(9));
                six * s * s * s + nine * a * b * s
            }
        }
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Evaluates `κ(w, v)`.
pub fn kernel_eval(spec: KernelSpec, w: &[f64], v: &[f64]) -> Result<f64> {
    if w.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "kernel arguments of length {} and {}",
            w.len(),
            v.len()
        )));
    }
    Ok(spec.value(dot(w, v), dot(w, w), dot(v, v)))
}

/// Kernel-form loss against the target `T_e` of dimension `W.cols()`.
pub fn loss(spec: KernelSpec, w: &WeightMatrix) -> f64 {
    let (k, d) = (w.rows(), w.cols());
    let norms: Vec<f64> = (0..k).map(|i| dot(w.row(i), w.row(i))).collect();
    let mut total = 0.0;
    for i in 0..k {
        let wi = w.row(i);
        total += spec.value(norms[i], norms[i], norms[i]);
        for j in (i + 1)..k {
            total += 2.0 * spec.value(dot(wi, w.row(j)), norms[i], norms[j]);
        }
        for &x in wi {
            total -= 2.0 * spec.value(x, norms[i], 1.0);
        }
    }
    total + d as f64 * spec.unit_self_value()
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite entries")
}

/// The loss evaluated in exact rational arithmetic at the binary values of `W`.
///
/// Useful far from the origin, where the kernel sum cancels catastrophically in
/// floating point (e.g. the continuum `C_{5,t}` at large `t`).
pub fn loss_exact(spec: KernelSpec, w: &WeightMatrix) -> BigRational {
    let (k, d) = (w.rows(), w.cols());
    let rows: Vec<Vec<BigRational>> = (0..k)
        .map(|i| w.row(i).iter().map(|&x| rational(x)).collect())
        .collect();
    let dotq = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        x.iter()
            .zip(y)
            .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    };
    let norms: Vec<BigRational> = rows.iter().map(|r| dotq(r, r)).collect();
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut total = BigRational::zero();
    for i in 0..k {
        total += spec.value_exact(&norms[i], &norms[i], &norms[i]);
        for j in (i + 1)..k {
            total += &two * spec.value_exact(&dotq(&rows[i], &rows[j]), &norms[i], &norms[j]);
        }
        for x in &rows[i] {
            total -= &two * spec.value_exact(x, &norms[i], &one);
        }
    }
    let target = BigRational::from_float(spec.unit_self_value()).unwrap()
        * BigRational::from_integer(BigInt::from(d));
    total + target
}

/// `loss_exact` rounded to `f64`.
pub fn loss_exact_f64(spec: KernelSpec, w: &WeightMatrix) -> f64 {
    loss_exact(spec, w).to_f64().unwrap_or(f64::NAN)
}

/// A dense symmetric order-3 tensor on `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSymTensor {
    dim: usize,
    entries: Vec<f64>,
}

impl DenseSymTensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim * dim],
        }
    }

    /// `Σ_i w_i^{⊗3}` over the rows of `W`.
    pub fn from_rows(w: &WeightMatrix) -> Self {
        let d = w.cols();
        let mut t = Self::zeros(d);
        for r in 0..w.rows() {
            t.add_cube(w.row(r), 1.0);
        }
        t
    }

    /// `T_e = Σ_m e_m^{⊗3}`.
    pub fn target(dim: usize) -> Self {
        let mut t = Self::zeros(dim);
        for m in 0..dim {
            t.entries[(m * dim + m) * dim + m] = 1.0;
        }
        t
    }

    pub fn add_cube(&mut self, v: &[f64], weight: f64) {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                let vij = weight * v[i] * v[j];
                for k in 0..d {
                    self.entries[(i * d + j) * d + k] += vij * v[k];
                }
            }
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.entries[(i * self.dim + j) * self.dim + k]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sub(&self, other: &DenseSymTensor) -> DenseSymTensor {
        DenseSymTensor {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Entrywise Frobenius inner product.
    pub fn frobenius_inner(&self, other: &DenseSymTensor) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Checks invariance under all six index permutations.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let x = self.get(i, j, k);
                    let perms = [
                        self.get(i, k, j),
                        self.get(j, i, k),
                        self.get(j, k, i),
                        self.get(k, i, j),
                        self.get(k, j, i),
                    ];
                    if perms.iter().any(|y| (x - y).abs() > tol) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Coefficients of the cubic form `P(x) = ⟨T, x^{⊗3}⟩`, keyed by exponent vector.
    pub fn cubic_form(&self) -> Vec<(Vec<u32>, f64)> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in i..d {
                for k in j..d {
                    let mut p = vec![0u32; d];
                    p[i] += 1;
                    p[j] += 1;
                    p[k] += 1;
                    let distinct = if i == j && j == k {
                        1.0
                    } else if i == j || j == k {
                        3.0
                    } else {
                        6.0
                    };
                    out.push((p, distinct * self.get(i, j, k)));
                }
            }
        }
        out
    }

    /// `E_{x~N(0,I)}[⟨S,x^{⊗3}⟩⟨T,x^{⊗3}⟩]` by the Gaussian moment expansion.
    pub fn gaussian_inner(&self, other: &DenseSymTensor) -> f64 {
        let p = self.cubic_form();
        let q = other.cubic_form();
        let mut total = 0.0;
        for (pe, pa) in &p {
            if *pa == 0.0 {
                continue;
            }
            for (qe, qb) in &q {
                if *qb == 0.0 {
                    continue;
                }
                let r = MultiIndexMoment::new(pe.iter().zip(qe).map(|(a, b)| a + b).collect());
                total += gaussian_moment(&r) * pa * qb;
            }
        }
        total
    }
}

/// Exponent vector `r` of a Gaussian moment `E[x_1^{r_1}···x_d^{r_d}]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndexMoment {
    pub exponents: Vec<u32>,
}

impl MultiIndexMoment {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }
}

/// `(n-1)!!` for even `n`, exactly.
fn odd_double_factorial(n: u32) -> u128 {
    debug_assert!(n % 2 == 0);
    let mut acc: u128 = 1;
    let mut m = n.saturating_sub(1);
    while m > 1 {
        acc *= m as u128;
        m -= 2;
    }
    acc
}

/// Standard Gaussian moment `h_r`: zero if any exponent is odd, else `Π (r_i - 1)!!`.
pub fn gaussian_moment(r: &MultiIndexMoment) -> f64 {
    if r.exponents.iter().any(|e| e % 2 == 1) {
        return 0.0;
    }
    r.exponents
        .iter()
        .map(|&e| odd_double_factorial(e))
        .product::<u128>() as f64
}

/// Loss computed from explicitly materialized tensors.
///
/// Frobenius: `⟨S − T_e, S − T_e⟩_F` by direct summation over `d³` entries.
/// Cubic-Gaussian: the Gaussian-moment expansion of the two cubic forms.
pub fn loss_dense_oracle(spec: KernelSpec, w: &WeightMatrix) -> Result<f64> {
    let d = w.cols();
    if d > DENSE_ORACLE_MAX_DIM {
        return Err(Error::TooLarge {
            what: "dense tensor oracle",
            max: DENSE_ORACLE_MAX_DIM,
            got: d,
        });
    }
    let diff = DenseSymTensor::from_rows(w).sub(&DenseSymTensor::target(d));
    match spec {
        KernelSpec::FrobeniusPower(3) => Ok(diff.frobenius_inner(&diff)),
        KernelSpec::FrobeniusPower(n) => Err(Error::Unsupported(format!(
            "dense oracle only materializes order-3 tensors (n = {n})"
        ))),
        KernelSpec::CubicGaussian => Ok(diff.gaussian_inner(&diff)),
    }
}

/// True iff `W` is entrywise within `tol` of a permutation matrix.
pub fn is_permutation_matrix(w: &WeightMatrix, tol: f64) -> bool {
    if !w.is_square() {
        return false;
    }
    let d = w.rows();
    let mut used = vec![false; d];
    for i in 0..d {
        let row = w.row(i);
        let Some(j) = (0..d).find(|&j| (row[j] - 1.0).abs() <= tol) else {
            return false;
        };
        if used[j] || row.iter().enumerate().any(|(c, x)| c != j && x.abs() > tol) {
            return false;
        }
        used[j] = true;
    }
    true
}
