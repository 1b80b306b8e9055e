//! Analytic gradient and Hessian of the kernel loss.
//!
//! Vectors over `M(k, d)` use the stacked-row layout: entry `(i, l)` of `W`
//! sits at index `i*d + l`. Both kernels are handled through the partials of
//! `κ(s, a, b)` with `s = ⟨w,v⟩`, `a = ‖w‖²`, `b = ‖v‖²`:
//!
//! ```text
//! κ_w  = κ_s v + 2κ_a w
//! κ_ww = κ_ss vvᵀ + 2κ_sa (vwᵀ + wvᵀ) + 4κ_aa wwᵀ + 2κ_a I
//! κ_wv = κ_s I + κ_ss vwᵀ + 2κ_sb vvᵀ + 2κ_as wwᵀ + 4κ_ab wvᵀ
//! ```

use faer::Mat;

use crate::error::{Error, Result};
use crate::tensor::{dot, loss, KernelSpec, WeightMatrix};

/// Dense symmetric `(kd) × (kd)` Hessian in the stacked-row layout.
#[derive(Clone, Debug)]
pub struct HessianMatrix {
    n: usize,
    data: Vec<f64>,
}

impl HessianMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max |H - Hᵀ|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.n {
            for c in (r + 1)..self.n {
                m = m.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        m
    }

    pub fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.n, self.n, |r, c| self.get(r, c))
    }
}

/// `g += coef * x`.
#[inline]
fn axpy(g: &mut [f64], coef: f64, x: &[f64]) {
    for (gi, xi) in g.iter_mut().zip(x) {
        *gi += coef * xi;
    }
}

/// Analytic gradient of the loss in the stacked-row layout.
pub fn gradient(spec: KernelSpec, w: &WeightMatrix) -> Vec<f64> {
    let (k, d) = (w.rows(), w.cols());
    let norms: Vec<f64> = (0..k).map(|i| dot(w.row(i), w.row(i))).collect();
    let mut g = vec![0.0; k * d];
    for i in 0..k {
        let wi = w.row(i);
        let gi = &mut g[i * d..(i + 1) * d];
        let mut self_coef = 0.0;
        for j in 0..k {
            let wj = w.row(j);
            let p = spec.partials(dot(wi, wj), norms[i], norms[j]);
            axpy(gi, 2.0 * p.s, wj);
            self_coef += 4.0 * p.a;
        }
        for m in 0..d {
            let p = spec.partials(wi[m], norms[i], 1.0);
            gi[m] -= 2.0 * p.s;
            self_coef -= 4.0 * p.a;
        }
        axpy(gi, self_coef, wi);
    }
    g
}

/// Euclidean norm of the analytic gradient.
pub fn gradient_norm(spec: KernelSpec, w: &WeightMatrix) -> f64 {
    gradient(spec, w).iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Analytic Hessian of the loss.
pub fn hessian(spec: KernelSpec, w: &WeightMatrix) -> HessianMatrix {
    let (k, d) = (w.rows(), w.cols());
    let n = k * d;
    let norms: Vec<f64> = (0..k).map(|i| dot(w.row(i), w.row(i))).collect();
    let mut h = vec![0.0; n * n];

    // Off-diagonal and κ_wv(w_i, w_i) contributions: block (i, j) += 2κ_wv(w_i, w_j).
    for i in 0..k {
        let wi = w.row(i);
        for j in 0..k {
            let wj = w.row(j);
            let p = spec.partials(dot(wi, wj), norms[i], norms[j]);
            for l in 0..d {
                let row = &mut h[(i * d + l) * n + j * d..(i * d + l) * n + (j + 1) * d];
                for m in 0..d {
                    let mut v = p.ss * wj[l] * wi[m]
                        + 2.0 * p.sb * wj[l] * wj[m]
                        + 2.0 * p.sa * wi[l] * wi[m]
                        + 4.0 * p.ab * wi[l] * wj[m];
                    if l == m {
                        v += p.s;
                    }
                    row[m] += 2.0 * v;
                }
            }
        }
    }

    // Diagonal blocks: 2[Σ_l κ_ww(w_i, w_l) − Σ_m κ_ww(w_i, e_m)].
    let mut acc = vec![0.0; d * d];
    let mut u = vec![0.0; d];
    for i in 0..k {
        let wi = w.row(i);
        acc.iter_mut().for_each(|x| *x = 0.0);
        u.iter_mut().for_each(|x| *x = 0.0);
        let mut ww_coef = 0.0;
        let mut id_coef = 0.0;
        for l in 0..k {
            let wl = w.row(l);
            let p = spec.partials(dot(wi, wl), norms[i], norms[l]);
            if p.ss != 0.0 {
                for a in 0..d {
                    let s = p.ss * wl[a];
                    for b in 0..d {
                        acc[a * d + b] += s * wl[b];
                    }
                }
            }
            axpy(&mut u, 2.0 * p.sa, wl);
            ww_coef += 4.0 * p.aa;
            id_coef += 2.0 * p.a;
        }
        for m in 0..d {
            let p = spec.partials(wi[m], norms[i], 1.0);
            acc[m * d + m] -= p.ss;
            u[m] -= 2.0 * p.sa;
            ww_coef -= 4.0 * p.aa;
            id_coef -= 2.0 * p.a;
        }
        for a in 0..d {
            for b in 0..d {
                let mut v = acc[a * d + b] + u[a] * wi[b] + wi[a] * u[b] + ww_coef * wi[a] * wi[b];
                if a == b {
                    v += id_coef;
                }
                h[(i * d + a) * n + i * d + b] += 2.0 * v;
            }
        }
    }
    HessianMatrix { n, data: h }
}

fn perturbed(w: &WeightMatrix, idx: usize, delta: f64) -> WeightMatrix {
    let (k, d) = (w.rows(), w.cols());
    let mut out = w.clone();
    out.set(idx / d, idx % d, w.get(idx / d, idx % d) + delta);
    debug_assert!(idx < k * d);
    out
}

/// Max over coordinates of `|analytic − central difference| / (1 + |analytic|)`.
pub fn fd_check_gradient(spec: KernelSpec, w: &WeightMatrix, step: f64) -> Result<f64> {
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let g = gradient(spec, w);
    let mut worst: f64 = 0.0;
    for (idx, gi) in g.iter().enumerate() {
        let fp = loss(spec, &perturbed(w, idx, step));
        let fm = loss(spec, &perturbed(w, idx, -step));
        let fd = (fp - fm) / (2.0 * step);
        worst = worst.max((gi - fd).abs() / (1.0 + gi.abs()));
    }
    Ok(worst)
}

/// Hessian analogue of [`fd_check_gradient`], differencing the analytic gradient.
pub fn fd_check_hessian(spec: KernelSpec, w: &WeightMatrix, step: f64) -> Result<f64> {
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let h = hessian(spec, w);
    let n = h.dim();
    let mut worst: f64 = 0.0;
    for c in 0..n {
        let gp = gradient(spec, &perturbed(w, c, step));
        let gm = gradient(spec, &perturbed(w, c, -step));
        for r in 0..n {
            let fd = (gp[r] - gm[r]) / (2.0 * step);
            let an = h.get(r, c);
            worst = worst.max((an - fd).abs() / (1.0 + an.abs()));
        }
    }
    Ok(worst)
}

/// Critical point of the Frobenius loss generated by eigenpairs of `T_e`.
///
/// Each `(w, λ)` with `T_e(w, …, w, ·) = λw` contributes the row
/// `(λ / ⟨w,w⟩^{n−1})^{1/n} · w`; the remaining `d − r` rows are zero.
pub fn eigenpair_critical_point(
    eigvecs: &[Vec<f64>],
    eigvals: &[f64],
    n: u32,
    d: usize,
) -> Result<WeightMatrix> {
    if eigvecs.len() != eigvals.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} eigenvectors but {} eigenvalues",
            eigvecs.len(),
            eigvals.len()
        )));
    }
    if eigvecs.len() > d {
        return Err(Error::InvalidArgument(format!(
            "{} eigenpairs exceed dimension {d}",
            eigvecs.len()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "order must be >= 2, got {n}"
        )));
    }
    for (a, v) in eigvecs.iter().enumerate() {
        if v.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "eigenvector {a} has length {}, expected {d}",
                v.len()
            )));
        }
        let nv = dot(v, v);
        if nv == 0.0 {
            return Err(Error::InvalidArgument(format!("eigenvector {a} is zero")));
        }
        for (b, u) in eigvecs.iter().enumerate().skip(a + 1) {
            let c = dot(v, u);
            if c.abs() > 1e-10 * (nv * dot(u, u)).sqrt() {
                return Err(Error::InvalidArgument(format!(
                    "eigenvectors {a} and {b} are not orthogonal (inner product {c:e})"
                )));
            }
        }
        let scale = 1.0
            + v.iter()
                .fold(0.0f64, |m, x| m.max(x.abs()))
                .powi(n as i32 - 1);
        for (m, x) in v.iter().enumerate() {
            if (x.powi(n as i32 - 1) - eigvals[a] * x).abs() > 1e-10 * scale {
                return Err(Error::InvalidArgument(format!(
                    "vector {a} is not an eigenvector of the target for eigenvalue {} (coordinate {m})",
                    eigvals[a]
                )));
            }
        }
    }
    let mut w = WeightMatrix::zeros(d, d);
    for (r, (v, &lam)) in eigvecs.iter().zip(eigvals).enumerate() {
        let ratio = lam / dot(v, v).powi(n as i32 - 1);
        let t = if n % 2 == 1 {
            ratio.signum() * ratio.abs().powf(1.0 / n as f64)
        } else if ratio < 0.0 {
            return Err(Error::NoRealSolution(format!(
                "negative ratio {ratio} under an even root"
            )));
        } else {
            ratio.powf(1.0 / n as f64)
        };
        for (m, x) in v.iter().enumerate() {
            w.set(r, m, t * x);
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn sample(k: usize, d: usize, shift: f64) -> WeightMatrix {
        WeightMatrix::from_fn(k, d, |i, j| {
            ((i * d + j) as f64 * 0.731 + shift).sin() * 0.8
        })
    }

    #[test]
    fn identity_is_critical() {
        for spec in [KernelSpec::FROBENIUS, KernelSpec::CubicGaussian] {
            assert!(max_abs(&gradient(spec, &WeightMatrix::identity(4))) < 1e-13);
        }
    }

    #[test]
    fn uniform_point_is_critical() {
        let w = WeightMatrix::constant(5, 5, 0.2);
        assert!(max_abs(&gradient(KernelSpec::FROBENIUS, &w)) < 1e-13);
    }

    #[test]
    fn identity_hessian_blocks() {
        let d = 3;
        let h = hessian(KernelSpec::FROBENIUS, &WeightMatrix::identity(d));
        for r in 0..d * d {
            for c in 0..d * d {
                let (bi, l) = (r / d, r % d);
                let (bj, m) = (c / d, c % d);
                let expect = if bi != bj || l != m {
                    0.0
                } else if l == bi {
                    18.0
                } else {
                    6.0
                };
                assert!((h.get(r, c) - expect).abs() < 1e-12, "({r},{c})");
            }
        }
    }

    #[test]
    fn zero_hessian_vanishes() {
        let h = hessian(KernelSpec::FROBENIUS, &WeightMatrix::zeros(4, 4));
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn finite_differences_agree() {
        for spec in [KernelSpec::FROBENIUS, KernelSpec::CubicGaussian] {
            let w = sample(4, 4, 0.3);
            assert!(fd_check_gradient(spec, &w, 1e-6).unwrap() < 1e-6);
            assert!(fd_check_hessian(spec, &w, 1e-5).unwrap() < 1e-5);
            let h = hessian(spec, &w);
            assert!(h.max_asymmetry() <= 1e-10 * h.max_abs());
        }
        let rect = sample(3, 5, 1.1);
        assert!(fd_check_hessian(KernelSpec::CubicGaussian, &rect, 1e-5).unwrap() < 1e-5);
        assert!(fd_check_gradient(KernelSpec::FROBENIUS, &rect, 0.0).is_err());
    }

    #[test]
    fn eigenpair_points() {
        let d = 4;
        let vecs: Vec<Vec<f64>> = (0..d - 1)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let w = eigenpair_critical_point(&vecs, &vec![1.0; d - 1], 3, d).unwrap();
        let mut c5 = WeightMatrix::identity(d);
        c5.set(d - 1, d - 1, 0.0);
        assert_eq!(w, c5);
        assert!(max_abs(&gradient(KernelSpec::FROBENIUS, &w)) < 1e-13);

        let e = eigenpair_critical_point(&[], &[], 3, 3).unwrap();
        assert_eq!(e, WeightMatrix::zeros(3, 3));

        let scaled = eigenpair_critical_point(&[vec![2.0, 0.0, 0.0]], &[2.0], 3, 3).unwrap();
        assert!((scaled.get(0, 0) - 1.0).abs() < 1e-14);

        let mixed = vec![0.5, 0.5, 0.0];
        let pt = eigenpair_critical_point(&[mixed], &[0.5], 3, 3).unwrap();
        assert!(max_abs(&gradient(KernelSpec::FROBENIUS, &pt)) < 1e-12);

        assert!(eigenpair_critical_point(
            &[vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]],
            &[1.0, 1.0],
            3,
            3
        )
        .is_err());
        assert!(eigenpair_critical_point(&[vec![1.0, 0.0]], &[-1.0], 4, 2).is_err());
    }
}
