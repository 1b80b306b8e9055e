//! Radial sets about a critical point `c`: points where `∇ℒ` is parallel to
//! `x − c`. Provides the catalog of explicit radial curves, descent/ascent
//! classification along them, projected-gradient minimization of `ℒ` on
//! spheres `S_r(c)`, and saddle certificates built from the sphere deficit.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::calculus::gradient;
use crate::error::{Error, Result};
use crate::families::{construct, FamilyName, FamilySpec};
use crate::spectra::spectrum;
use crate::symmetry::{act, restrict_gradient, FixedPointSpace, IsotropyPattern, PermPair};
use crate::tensor::{is_permutation_matrix, loss, KernelSpec, WeightMatrix};

/// Deficits at or below this are not counted as descent.
pub const DEFICIT_TOL: f64 = 1e-9;
/// Half-width of the band around an integer order.
pub const ORDER_BAND: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialResidual {
    pub value: f64,
}

/// Largest 2×2 minor of `[∇ℒ(x) | x − c]`, divided by
/// `‖x − c‖_∞ · max(‖∇ℒ(x)‖_∞, 1e-4·(1 + ‖x‖_F)⁵)`.
///
/// The floor keeps roundoff in a vanishing gradient from reading as a
/// direction.
pub fn radial_residual(
    spec: KernelSpec,
    c: &WeightMatrix,
    x: &WeightMatrix,
) -> Result<RadialResidual> {
    if c.rows() != x.rows() || c.cols() != x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "center is {}x{}, point is {}x{}",
            c.rows(),
            c.cols(),
            x.rows(),
            x.cols()
        )));
    }
    let v: Vec<f64> = x
        .as_slice()
        .iter()
        .zip(c.as_slice())
        .map(|(a, b)| a - b)
        .collect();
    let vs = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if vs == 0.0 {
        return Err(Error::InvalidArgument(
            "radial residual needs x != c".into(),
        ));
    }
    let g = gradient(spec, x);
    let gs = g
        .iter()
        .fold(0.0f64, |m, a| m.max(a.abs()))
        .max(1e-4 * (1.0 + x.frobenius_norm()).powi(5));
    let mut worst = 0.0f64;
    for i in 0..v.len() {
        let (gi, vi) = (g[i] / gs, v[i] / vs);
        for j in i + 1..v.len() {
            worst = worst.max((gi * v[j] / vs - g[j] / gs * vi).abs());
        }
    }
    Ok(RadialResidual { value: worst })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveName {
    /// `I_{d−1} ⊕ [t]`.
    Gamma1,
    /// `(1 + t)I_{d−1} ⊕ [0]`.
    Gamma2,
    /// `I_{d−2} ⊕ [[a(t), 0], [t, 0]]` with `a(t) = ∛(1 − t³)`.
    Gamma3,
    /// `I_{d−i} ⊕ [t] ⊕ O_{i−1}`.
    GammaBlock(usize),
}

impl CurveName {
    pub const THEOREM_CURVES: [CurveName; 3] =
        [CurveName::Gamma1, CurveName::Gamma2, CurveName::Gamma3];
}

impl fmt::Display for CurveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveName::Gamma1 => write!(f, "Gamma1"),
            CurveName::Gamma2 => write!(f, "Gamma2"),
            CurveName::Gamma3 => write!(f, "Gamma3"),
            CurveName::GammaBlock(i) => write!(f, "GammaBlock:{i}"),
        }
    }
}

impl FromStr for CurveName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "gamma1" => return Ok(CurveName::Gamma1),
            "gamma2" => return Ok(CurveName::Gamma2),
            "gamma3" => return Ok(CurveName::Gamma3),
            _ => {}
        }
        if let Some(i) = t.strip_prefix("gammablock:") {
            let i: usize = i
                .parse()
                .map_err(|_| Error::Parse(format!("bad block size in `{s}`")))?;
            return Ok(CurveName::GammaBlock(i));
        }
        Err(Error::Parse(format!("unknown curve `{s}`")))
    }
}

impl Serialize for CurveName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A catalog curve through a Frobenius critical point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialCurve {
    pub name: CurveName,
    pub d: usize,
}

pub fn curve(name: CurveName, d: usize) -> Result<RadialCurve> {
    let ok = match name {
        CurveName::GammaBlock(i) => i >= 1 && i < d,
        _ => d >= 3,
    };
    if !ok {
        return Err(Error::InvalidArgument(format!(
            "curve {name} is not defined at d = {d}"
        )));
    }
    Ok(RadialCurve { name, d })
}

impl RadialCurve {
    pub const KERNEL: KernelSpec = KernelSpec::FROBENIUS;

    pub fn evaluate(&self, t: f64) -> WeightMatrix {
        let d = self.d;
        match self.name {
            CurveName::Gamma1 => {
                let mut w = WeightMatrix::identity(d);
                w.set(d - 1, d - 1, t);
                w
            }
            CurveName::Gamma2 => {
                let mut w = WeightMatrix::identity(d).scaled(1.0 + t);
                w.set(d - 1, d - 1, 0.0);
                w
            }
            CurveName::Gamma3 => {
                let mut w = WeightMatrix::identity(d);
                w.set(d - 2, d - 2, (1.0 - t * t * t).cbrt());
                w.set(d - 1, d - 1, 0.0);
                w.set(d - 1, d - 2, t);
                w
            }
            CurveName::GammaBlock(i) => WeightMatrix::from_fn(d, d, |r, c| {
                if r != c || r > d - i {
                    0.0
                } else if r == d - i {
                    t
                } else {
                    1.0
                }
            }),
        }
    }

    pub fn base(&self) -> WeightMatrix {
        self.evaluate(0.0)
    }

    pub fn loss(&self, t: f64) -> f64 {
        loss(Self::KERNEL, &self.evaluate(t))
    }

    pub fn loss_formula(&self, t: f64) -> f64 {
        let t3 = t * t * t;
        match self.name {
            CurveName::Gamma1 => t3 * t3 - 2.0 * t3 + 1.0,
            CurveName::Gamma2 => {
                let p = t3 * t3 + 6.0 * t3 * t * t + 15.0 * t3 * t + 18.0 * t3 + 9.0 * t * t;
                p * (self.d - 1) as f64 + 1.0
            }
            CurveName::Gamma3 => 1.0,
            CurveName::GammaBlock(i) => t3 * t3 - 2.0 * t3 + i as f64,
        }
    }

    /// Largest residual about `base()` over `n` evenly spaced `t ∈ (0, t_max]`.
    pub fn max_residual(&self, t_max: f64, n: usize) -> Result<f64> {
        let c = self.base();
        let mut worst = 0.0f64;
        for k in 1..=n {
            let x = self.evaluate(t_max * k as f64 / n as f64);
            worst = worst.max(radial_residual(Self::KERNEL, &c, &x)?.value);
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    Descent,
    Ascent,
    Level,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveClass {
    pub curve: CurveName,
    pub d: usize,
    pub kind: CurveKind,
    pub leading_order: Option<u32>,
    pub fitted_slope: Option<f64>,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn integer_order(slope: f64) -> Option<u32> {
    let r = slope.round();
    (r >= 0.0 && (slope - r).abs() <= ORDER_BAND).then_some(r as u32)
}

/// Monotonicity of `t ↦ ℒ(curve(t))` on `(0, window]` and the leading
/// exponent of `ℒ(t) − ℒ(0)` fitted over `[window/10, window]`.
pub fn classify_curve(curve: &RadialCurve, window: f64) -> Result<CurveClass> {
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "window must be positive, got {window}"
        )));
    }
    let l0 = curve.loss(0.0);
    let level_tol = 1e-12 * (1.0 + l0.abs());
    let n = 50;
    let deltas: Vec<f64> = (1..=n)
        .map(|k| curve.loss(window * k as f64 / n as f64) - l0)
        .collect();
    let mut class = CurveClass {
        curve: curve.name,
        d: curve.d,
        kind: CurveKind::Level,
        leading_order: None,
        fitted_slope: None,
    };
    if deltas.iter().all(|x| x.abs() <= level_tol) {
        return Ok(class);
    }
    let sign = deltas[0].signum();
    let mut prev = 0.0;
    for &x in &deltas {
        if (x - prev) * sign <= 0.0 {
            return Err(Error::NotMonotone(curve.name.to_string()));
        }
        prev = x;
    }
    class.kind = if sign < 0.0 {
        CurveKind::Descent
    } else {
        CurveKind::Ascent
    };
    let pts: Vec<(f64, f64)> = (0..=10)
        .map(|k| {
            let t = window * 10f64.powf(-(k as f64) / 10.0);
            (t, (curve.loss(t) - l0).abs())
        })
        .collect();
    class.fitted_slope = log_slope(&pts);
    class.leading_order = class.fitted_slope.and_then(integer_order);
    Ok(class)
}

/// Projected-gradient settings for [`sphere_min`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SphereOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub step: f64,
}

impl Default for SphereOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0,
            max_iters: 10_000,
            step: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereMin {
    pub w: WeightMatrix,
    pub value: f64,
    pub r: f64,
    /// Radial residual about the center at `w`.
    pub residual: f64,
    pub restart: usize,
    pub iterations: usize,
}

/// Displacement coordinates `y` about the center, with the metric that makes
/// `‖y‖` the Frobenius norm of the displacement.
struct Chart<'a> {
    spec: KernelSpec,
    c: &'a WeightMatrix,
    space: Option<FixedPointSpace>,
    base: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a> Chart<'a> {
    fn new(
        spec: KernelSpec,
        c: &'a WeightMatrix,
        pattern: Option<IsotropyPattern>,
    ) -> Result<Self> {
        let Some(pattern) = pattern else {
            return Ok(Self {
                spec,
                c,
                space: None,
                base: c.as_slice().to_vec(),
                weights: vec![1.0; c.as_slice().len()],
            });
        };
        if !c.is_square() {
            return Err(Error::InvalidArgument(
                "fixed-point spaces need a square center".into(),
            ));
        }
        let space = FixedPointSpace::new(pattern, c.rows())?;
        if space.distance_max(c)? > 1e-12 * (1.0 + c.max_abs()) {
            return Err(Error::InvalidArgument(format!(
                "center is not fixed by {pattern:?}"
            )));
        }
        Ok(Self {
            spec,
            c,
            base: space.coordinates(c)?,
            weights: space.counts().iter().map(|&n| n as f64).collect(),
            space: Some(space),
        })
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.weights)
            .map(|((x, y), w)| x * y * w)
            .sum()
    }

    fn coords(&self, y: &[f64]) -> Vec<f64> {
        self.base.iter().zip(y).map(|(b, y)| b + y).collect()
    }

    fn point(&self, y: &[f64]) -> WeightMatrix {
        let x = self.coords(y);
        match &self.space {
            Some(space) => space.embed(&x).expect("chart dimension"),
            None => WeightMatrix::from_stacked(self.c.rows(), self.c.cols(), &x)
                .expect("chart dimension"),
        }
    }

    fn value(&self, y: &[f64]) -> f64 {
        loss(self.spec, &self.point(y))
    }

    /// Gradient with respect to the chart metric.
    fn grad(&self, y: &[f64]) -> Vec<f64> {
        match &self.space {
            Some(space) => {
                restrict_gradient(self.spec, space, &self.coords(y)).expect("chart dimension")
            }
            None => gradient(self.spec, &self.point(y)),
        }
    }

    fn to_sphere(&self, mut y: Vec<f64>, r: f64) -> Vec<f64> {
        let n = self.dot(&y, &y).sqrt();
        if n == 0.0 {
            y[0] = 1.0;
            return self.to_sphere(y, r);
        }
        y.iter_mut().for_each(|v| *v *= r / n);
        y
    }

    fn tangent(&self, g: &[f64], y: &[f64], r: f64) -> Vec<f64> {
        let k = self.dot(g, y) / (r * r);
        g.iter().zip(y).map(|(g, y)| g - k * y).collect()
    }

    /// Barzilai–Borwein trial steps with Armijo backtracking, retracting to
    /// the sphere by rescaling.
    fn descend(&self, r: f64, restart: usize, opts: &SphereOptions) -> (Vec<f64>, f64, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(restart as u64);
        let y0: Vec<f64> = (0..self.base.len())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let mut y = self.to_sphere(y0, r);
        let mut value = self.value(&y);
        let mut g = self.grad(&y);
        let mut p = self.tangent(&g, &y, r);
        let mut step = opts.step;
        let mut iters = 0;
        while iters < opts.max_iters {
            let pn2 = self.dot(&p, &p);
            if pn2 == 0.0 || pn2.sqrt() <= 1e-13 * self.dot(&g, &g).sqrt() {
                break;
            }
            iters += 1;
            let mut trial_step = step;
            let next = loop {
                if trial_step < 1e-20 {
                    break None;
                }
                let trial: Vec<f64> = y.iter().zip(&p).map(|(y, p)| y - trial_step * p).collect();
                let trial = self.to_sphere(trial, r);
                let tv = self.value(&trial);
                let tg = self.grad(&trial);
                let tp = self.tangent(&tg, &trial, r);
                let armijo = tv <= value - 1e-4 * trial_step * pn2;
                let flat =
                    (tv - value).abs() <= 1e-14 * (1.0 + value.abs()) && self.dot(&tp, &tp) < pn2;
                if armijo || flat {
                    break Some((trial, tv, tg, tp));
                }
                trial_step *= 0.5;
            };
            let Some((ny, nv, ng, np)) = next else { break };
            let sy: Vec<f64> = ny.iter().zip(&y).map(|(a, b)| a - b).collect();
            let sp: Vec<f64> = np.iter().zip(&p).map(|(a, b)| a - b).collect();
            let curv = self.dot(&sy, &sp);
            step = if curv > 0.0 {
                (self.dot(&sy, &sy) / curv).min(1e6)
            } else {
                2.0 * trial_step
            };
            (y, value, g, p) = (ny, nv, ng, np);
        }
        (y, value, iters)
    }
}

/// Multi-restart projected gradient descent of `ℒ` on the sphere of radius
/// `r` about `c`, inside the fixed-point space of `pattern` when given.
///
/// The value is an upper bound on the sphere minimum.
pub fn sphere_min(
    spec: KernelSpec,
    c: &WeightMatrix,
    pattern: Option<IsotropyPattern>,
    r: f64,
    opts: &SphereOptions,
) -> Result<SphereMin> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sphere radius must be positive, got {r}"
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument(
            "sphere_min needs at least one restart".into(),
        ));
    }
    let chart = Chart::new(spec, c, pattern)?;
    let runs: Vec<(Vec<f64>, f64, usize)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..opts.restarts)
            .map(|k| {
                let chart = &chart;
                s.spawn(move || chart.descend(r, k, opts))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("restart thread"))
            .collect()
    });
    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.1 < runs[best].1 {
            best = k;
        }
    }
    let (y, value, iterations) = &runs[best];
    let w = chart.point(y);
    let residual = radial_residual(spec, c, &w)?.value;
    Ok(SphereMin {
        w,
        value: *value,
        r,
        residual,
        restart: best,
        iterations: *iterations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SaddleVerdict {
    /// Every sphere value lies below the critical value.
    SaddleCertified,
    /// The Hessian has a negative eigenvalue.
    SaddleByIndex,
    /// Every sphere value lies above the critical value.
    NotASaddle,
    Inconclusive,
}

impl SaddleVerdict {
    pub fn is_saddle(&self) -> bool {
        matches!(
            self,
            SaddleVerdict::SaddleCertified | SaddleVerdict::SaddleByIndex
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereRow {
    pub family: FamilyName,
    pub d: usize,
    pub r: f64,
    pub sphere_value: f64,
    pub deficit: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaddleCertificate {
    pub family: FamilyName,
    pub d: usize,
    pub loss: f64,
    pub index: usize,
    /// `None` for the ambient space.
    pub pattern: Option<IsotropyPattern>,
    pub rows: Vec<SphereRow>,
    pub fitted_order: Option<f64>,
    pub order: Option<u32>,
    pub verdict: SaddleVerdict,
}

/// Five radii spaced evenly in `log r` over `[0.02, 0.2]`.
pub fn default_r_grid() -> Vec<f64> {
    (0..5).map(|k| 0.02 * 10f64.powf(k as f64 / 4.0)).collect()
}

/// Sphere deficits `ℒ(c) − m(r)` of a catalog point over `r_grid`, searched
/// in the family's fixed-point space (or the ambient space when `ambient`).
pub fn certify_saddle(
    spec: &FamilySpec,
    d: usize,
    r_grid: &[f64],
    ambient: bool,
    opts: &SphereOptions,
) -> Result<SaddleCertificate> {
    if r_grid.is_empty() {
        return Err(Error::InvalidArgument("empty radius grid".into()));
    }
    let point = construct(spec, d)?;
    let pattern = (!ambient && d >= spec.pattern.min_dim()).then_some(spec.pattern);
    let index = spectrum(spec.kernel, &point.w, None)?.index;
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let m = sphere_min(spec.kernel, &point.w, pattern, r, opts)?;
        rows.push(SphereRow {
            family: spec.name,
            d,
            r,
            sphere_value: m.value,
            deficit: point.loss - m.value,
            residual: m.residual,
        });
    }
    let fitted_order = if rows.iter().all(|row| row.deficit > DEFICIT_TOL) {
        log_slope(
            &rows
                .iter()
                .map(|row| (row.r, row.deficit))
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let verdict = if index > 0 {
        SaddleVerdict::SaddleByIndex
    } else if rows.iter().all(|row| row.deficit > DEFICIT_TOL) {
        SaddleVerdict::SaddleCertified
    } else if rows.iter().all(|row| row.deficit < 0.0) {
        SaddleVerdict::NotASaddle
    } else {
        SaddleVerdict::Inconclusive
    };
    Ok(SaddleCertificate {
        family: spec.name,
        d,
        loss: point.loss,
        index,
        pattern,
        rows,
        fitted_order,
        order: fitted_order.and_then(integer_order),
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectionCheck {
    pub curve: CurveName,
    pub d: usize,
    pub t: f64,
    pub target: FamilyName,
    pub max_deviation: f64,
    pub holds: bool,
}

/// `Γ1(1)` is a permutation matrix, `Γ2(−1) = C_0`, and swapping the last
/// two rows of `Γ3(1)` gives `C_5`.
pub fn curve_connections(d: usize) -> Result<Vec<ConnectionCheck>> {
    let g1 = curve(CurveName::Gamma1, d)?.evaluate(1.0);
    let g2 = curve(CurveName::Gamma2, d)?.evaluate(-1.0);
    let g3 = curve(CurveName::Gamma3, d)?.evaluate(1.0);
    let ci = construct(&FamilySpec::of(FamilyName::CI), d)?.w;
    let c0 = construct(&FamilySpec::of(FamilyName::C0), d)?.w;
    let c5 = construct(&FamilySpec::of(FamilyName::C5t(0.0)), d)?.w;
    let mut rows: Vec<usize> = (0..d).collect();
    rows.swap(d - 2, d - 1);
    let swap = PermPair::new(rows, (0..d).collect())?;
    let moved = act(&swap, &g3)?;
    let checks = [
        (
            CurveName::Gamma1,
            1.0,
            FamilyName::CI,
            g1.max_abs_diff(&ci),
            is_permutation_matrix(&g1, 0.0),
        ),
        (
            CurveName::Gamma2,
            -1.0,
            FamilyName::C0,
            g2.max_abs_diff(&c0),
            g2 == c0,
        ),
        (
            CurveName::Gamma3,
            1.0,
            FamilyName::C5t(0.0),
            moved.max_abs_diff(&c5),
            moved == c5,
        ),
    ];
    Ok(checks
        .into_iter()
        .map(|(curve, t, target, max_deviation, holds)| ConnectionCheck {
            curve,
            d,
            t,
            target,
            max_deviation,
            holds,
        })
        .collect())
}
