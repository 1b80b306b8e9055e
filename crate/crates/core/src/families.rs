//! Catalog of symmetric critical families.
//!
//! Exact families are built in closed form. `C_2`, `C_3` and `D_2` are seeded
//! from their Puiseux series in `d` and Newton-polished in fixed-point
//! coordinates with the symbolic Jacobian.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::calculus::gradient_norm;
use crate::error::{Error, Result};
use crate::puiseux::{extend_series, seed_to_numeric, Coef, PuiseuxSeries};
use crate::symbolic::poly::{q, qf};
use crate::symbolic::{jacobian, symbolic_restricted_gradient, MPoly};
use crate::symmetry::{restrict_gradient, FixedPointSpace, IsotropyPattern};
use crate::tensor::{loss, loss_exact_f64, KernelSpec, WeightMatrix};

/// Depth (in powers of `1/d`) of the catalog series used as Newton seeds.
pub const SEED_DEPTH: u32 = 4;

const NEWTON_MAX_ITERS: usize = 50;

/// Catalog names.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyName {
    CI,
    C0,
    C1,
    C2,
    C3,
    C4,
    /// `C_{5,t}`; `t = 0` is `C_5`.
    C5t(f64),
    /// `I_{d−i} ⊕ O_i`.
    Cblock(usize),
    D0,
    D1,
    DI,
    D2,
}

impl FamilyName {
    pub const FROBENIUS_CATALOG: [FamilyName; 8] = [
        FamilyName::CI,
        FamilyName::C0,
        FamilyName::C1,
        FamilyName::C2,
        FamilyName::C3,
        FamilyName::C4,
        FamilyName::C5t(0.0),
        FamilyName::Cblock(2),
    ];

    pub const GAUSS_CATALOG: [FamilyName; 4] = [
        FamilyName::D0,
        FamilyName::D1,
        FamilyName::DI,
        FamilyName::D2,
    ];

    pub fn kernel(&self) -> KernelSpec {
        match self {
            FamilyName::D0 | FamilyName::D1 | FamilyName::DI | FamilyName::D2 => {
                KernelSpec::CubicGaussian
            }
            _ => KernelSpec::FROBENIUS,
        }
    }

    /// Smallest dimension at which the family is defined.
    pub fn min_d(&self) -> usize {
        match *self {
            FamilyName::CI | FamilyName::C0 | FamilyName::D0 | FamilyName::DI => 1,
            FamilyName::C1 | FamilyName::D1 | FamilyName::C5t(_) => 2,
            FamilyName::Cblock(i) => i + 1,
            FamilyName::C3 => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyName::CI => write!(f, "CI"),
            FamilyName::C0 => write!(f, "C0"),
            FamilyName::C1 => write!(f, "C1"),
            FamilyName::C2 => write!(f, "C2"),
            FamilyName::C3 => write!(f, "C3"),
            FamilyName::C4 => write!(f, "C4"),
            FamilyName::C5t(t) if *t == 0.0 => write!(f, "C5"),
            FamilyName::C5t(t) => write!(f, "C5t:{t}"),
            FamilyName::Cblock(i) => write!(f, "Cblock:{i}"),
            FamilyName::D0 => write!(f, "D0"),
            FamilyName::D1 => write!(f, "D1"),
            FamilyName::DI => write!(f, "DI"),
            FamilyName::D2 => write!(f, "D2"),
        }
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownFamily(s.to_string());
        let norm = s.trim().replace('_', "");
        let (head, arg) = match norm.split_once(':') {
            Some((h, a)) => (h.to_ascii_uppercase(), Some(a.trim().to_string())),
            None => (norm.to_ascii_uppercase(), None),
        };
        let name = match (head.as_str(), arg) {
            ("CI", None) => FamilyName::CI,
            ("C0", None) => FamilyName::C0,
            ("C1", None) => FamilyName::C1,
            ("C2", None) => FamilyName::C2,
            ("C3", None) => FamilyName::C3,
            ("C4", None) => FamilyName::C4,
            ("C5", None) => FamilyName::C5t(0.0),
            ("C5T", Some(t)) | ("C5", Some(t)) => {
                let t: f64 = t.parse().map_err(|_| unknown())?;
                if !t.is_finite() {
                    return Err(unknown());
                }
                FamilyName::C5t(t)
            }
            ("CBLOCK", Some(i)) => match i.parse::<usize>() {
                Ok(i) if i >= 1 => FamilyName::Cblock(i),
                _ => return Err(unknown()),
            },
            ("D0", None) => FamilyName::D0,
            ("D1", None) => FamilyName::D1,
            ("DI", None) => FamilyName::DI,
            ("D2", None) => FamilyName::D2,
            _ => return Err(unknown()),
        };
        Ok(name)
    }
}

impl Serialize for FamilyName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Construction {
    Exact,
    PuiseuxSeed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilySpec {
    pub name: FamilyName,
    pub kernel: KernelSpec,
    pub pattern: IsotropyPattern,
    pub construction: Construction,
}

impl FamilySpec {
    pub fn of(name: FamilyName) -> Self {
        use FamilyName::*;
        let pattern = match name {
            CI | C2 | DI => IsotropyPattern::DiagSd,
            C0 | C1 | D0 | D1 => IsotropyPattern::Full,
            C3 | D2 => IsotropyPattern::DiagSd1,
            C4 => IsotropyPattern::DiagSd2,
            C5t(t) if t == 0.0 => IsotropyPattern::DiagSd1,
            C5t(_) => IsotropyPattern::DiagSd11,
            Cblock(i) => IsotropyPattern::DiagSplit(i),
        };
        let construction = match name {
            C2 | C3 | D2 => Construction::PuiseuxSeed,
            _ => Construction::Exact,
        };
        Self {
            name,
            kernel: name.kernel(),
            pattern,
            construction,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::of(text.parse()?))
    }
}

/// A critical point of a catalog family at fixed `d`.
///
/// `xi` holds fixed-point coordinates when `d` reaches the pattern's minimum
/// dimension and the stacked entries of `w` otherwise; `residual` is the
/// matching gradient norm.
#[derive(Clone, Debug, Serialize)]
pub struct PolishedPoint {
    pub w: WeightMatrix,
    pub xi: Vec<f64>,
    pub residual: f64,
    pub loss: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(1 − t³)^{1/3}`, sign-preserving.
pub fn c5_a(t: f64) -> f64 {
    (1.0 - t * t * t).cbrt()
}

/// `D_1(d)` entry `(3(d + 2/3)/(5d³))^{1/3}`.
pub fn d1_entry(d: usize) -> f64 {
    let d = d as f64;
    (3.0 * (d + 2.0 / 3.0) / (5.0 * d * d * d)).cbrt()
}

fn closed_form(name: FamilyName, d: usize) -> WeightMatrix {
    use FamilyName::*;
    let df = d as f64;
    match name {
        CI | DI => WeightMatrix::identity(d),
        C0 | D0 => WeightMatrix::zeros(d, d),
        C1 => WeightMatrix::constant(d, d, 1.0 / df),
        D1 => WeightMatrix::constant(d, d, d1_entry(d)),
        C4 => WeightMatrix::from_fn(d, d, |i, j| match (i >= d - 2, j >= d - 2) {
            (true, true) => 0.5,
            (false, false) if i == j => 1.0,
            _ => 0.0,
        }),
        C5t(t) => {
            let mut w =
                WeightMatrix::from_fn(d, d, |i, j| if i == j && i + 2 < d { 1.0 } else { 0.0 });
            w.set(d - 2, d - 2, c5_a(t));
            w.set(d - 1, d - 2, t);
            w
        }
        Cblock(i) => {
            WeightMatrix::from_fn(d, d, |r, c| if r == c && r < d - i { 1.0 } else { 0.0 })
        }
        C2 | C3 | D2 => unreachable!("series-seeded family"),
    }
}

/// Loss, switching to exact rational evaluation when entries are large.
pub fn robust_loss(spec: KernelSpec, w: &WeightMatrix) -> f64 {
    if w.max_abs() > 10.0 {
        loss_exact_f64(spec, w)
    } else {
        loss(spec, w)
    }
}

/// Builds the family at dimension `d`.
pub fn construct(spec: &FamilySpec, d: usize) -> Result<PolishedPoint> {
    let min = spec.name.min_d();
    if d < min {
        return Err(Error::InvalidArgument(format!(
            "{} needs d >= {min}, got {d}",
            spec.name
        )));
    }
    let space = (d >= spec.pattern.min_dim())
        .then(|| FixedPointSpace::new(spec.pattern, d))
        .transpose()?;
    let w = match spec.construction {
        Construction::Exact => closed_form(spec.name, d),
        Construction::PuiseuxSeed => {
            let space = space.as_ref().ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "{} needs d >= {}",
                    spec.name,
                    spec.pattern.min_dim()
                ))
            })?;
            let series = catalog_series(spec.name)?.expect("seeded family has a series");
            let seed = seed_to_numeric(series, d);
            let xi = newton_polish(spec.kernel, space, seed)?;
            space.embed(&xi)?
        }
    };
    let (xi, residual) = match &space {
        Some(space) => {
            let xi = space.coordinates(&w)?;
            let g = restrict_gradient(spec.kernel, space, &xi)?;
            (xi, norm(&g))
        }
        None => (w.as_slice().to_vec(), gradient_norm(spec.kernel, &w)),
    };
    let scale = 1.0 + w.frobenius_norm().powi(5);
    if residual > 1e-8 * scale {
        return Err(Error::NewtonDiverged {
            iterations: 0,
            residual,
        });
    }
    Ok(PolishedPoint {
        loss: robust_loss(spec.kernel, &w),
        w,
        xi,
        residual,
    })
}

struct RestrictedSystem {
    f: Vec<MPoly>,
    j: Vec<Vec<MPoly>>,
}

fn restricted_system(
    kernel: KernelSpec,
    pattern: IsotropyPattern,
) -> Result<&'static RestrictedSystem> {
    static CACHE: OnceLock<
        std::sync::Mutex<Vec<(KernelSpec, IsotropyPattern, &'static RestrictedSystem)>>,
    > = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap();
    if let Some((_, _, s)) = guard.iter().find(|(k, p, _)| *k == kernel && *p == pattern) {
        return Ok(s);
    }
    let f = symbolic_restricted_gradient(kernel, pattern)?;
    let j = jacobian(&f);
    let sys: &'static RestrictedSystem = Box::leak(Box::new(RestrictedSystem { f, j }));
    guard.push((kernel, pattern, sys));
    Ok(sys)
}

/// Damped Newton iteration on the restricted gradient system.
pub fn newton_polish(
    kernel: KernelSpec,
    space: &FixedPointSpace,
    mut xi: Vec<f64>,
) -> Result<Vec<f64>> {
    let sys = restricted_system(kernel, space.pattern())?;
    let d = space.d() as f64;
    let n = xi.len();
    let eval = |x: &[f64]| -> Vec<f64> { sys.f.iter().map(|p| p.eval_f64(x, d)).collect() };
    let mut f = eval(&xi);
    let mut r = norm(&f);
    for _ in 0..NEWTON_MAX_ITERS {
        if r <= 1e-14 * (1.0 + norm(&xi)) {
            break;
        }
        let jfull: Vec<Vec<f64>> = sys
            .j
            .iter()
            .map(|row| row.iter().map(|p| p.eval_f64(&xi, d)).collect())
            .collect();
        // Zero coordinates whose equation and Jacobian row vanish span an
        // invariant subspace; they stay fixed.
        let active: Vec<usize> = (0..n)
            .filter(|&a| !(xi[a] == 0.0 && f[a] == 0.0 && jfull[a].iter().all(|&v| v == 0.0)))
            .collect();
        let m = active.len();
        let jm = Mat::<f64>::from_fn(m, m, |a, b| jfull[active[a]][active[b]]);
        let rhs = Mat::<f64>::from_fn(m, 1, |a, _| -f[active[a]]);
        let sol = jm.partial_piv_lu().solve(&rhs);
        let mut step = vec![0.0; n];
        for (a, &k) in active.iter().enumerate() {
            step[k] = sol[(a, 0)];
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = (0..n).map(|a| xi[a] + lambda * step[a]).collect();
            let ft = eval(&trial);
            let rt = norm(&ft);
            if rt.is_finite() && rt < r {
                xi = trial;
                f = ft;
                r = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let g = restrict_gradient(kernel, space, &xi)?;
    let residual = norm(&g);
    if !residual.is_finite() || residual > 1e-11 * (1.0 + norm(&xi)) {
        return Err(Error::NewtonDiverged {
            iterations: NEWTON_MAX_ITERS,
            residual,
        });
    }
    Ok(xi)
}

fn mono(exp: i64, c: BigRational) -> PuiseuxSeries {
    PuiseuxSeries::monomial(q(exp), c)
}

fn build_series(name: FamilyName) -> Result<Option<Vec<PuiseuxSeries>>> {
    use FamilyName::*;
    let extend = |pattern, seed: Vec<PuiseuxSeries>| -> Result<Vec<PuiseuxSeries>> {
        let sys = symbolic_restricted_gradient(name.kernel(), pattern)?;
        Ok(extend_series(&sys, &seed, SEED_DEPTH)?.series)
    };
    Ok(Some(match name {
        C1 => vec![mono(-1, q(1))],
        C2 => extend(
            IsotropyPattern::DiagSd,
            vec![mono(-1, q(-1)), mono(-1, q(1))],
        )?,
        C3 => extend(
            IsotropyPattern::DiagSd1,
            vec![
                mono(-1, q(-1)),
                mono(-1, q(1)),
                PuiseuxSeries::zero(),
                PuiseuxSeries::zero(),
                mono(0, q(1)),
            ],
        )?,
        D2 => extend(
            IsotropyPattern::DiagSd1,
            vec![
                mono(0, q(1)),
                mono(-3, q(-1)),
                mono(-1, q(1)),
                PuiseuxSeries::zero(),
                PuiseuxSeries::zero(),
            ],
        )?,
        D1 => vec![d1_series(SEED_DEPTH)?],
        _ => return Ok(None),
    }))
}

/// `(3/5)^{1/3} d^{−2/3} (1 + 2/(3d))^{1/3}` expanded binomially through `d^{−depth}`.
fn d1_series(depth: u32) -> Result<PuiseuxSeries> {
    let mut terms = Vec::new();
    let mut binom = q(1);
    let mut m = 0i64;
    loop {
        let exp = qf(-2, 3) - q(m);
        if exp < q(-(depth as i64)) {
            break;
        }
        let coef = &binom * num_traits::pow(qf(2, 3), m as usize);
        terms.push((
            exp,
            Coef::Radical {
                coef,
                radicand: qf(3, 5),
                index: 3,
            },
        ));
        binom = binom * (qf(1, 3) - q(m)) / q(m + 1);
        m += 1;
    }
    PuiseuxSeries::new(terms)
}

/// Puiseux series of the family's fixed-point coordinates in `d`, for the
/// families with a series description (`C_1`, `C_2`, `C_3`, `D_1`, `D_2`).
pub fn catalog_series(name: FamilyName) -> Result<Option<&'static [PuiseuxSeries]>> {
    type Slot = OnceLock<std::result::Result<Option<Vec<PuiseuxSeries>>, Error>>;
    static SLOTS: [Slot; 5] = [const { OnceLock::new() }; 5];
    let k = match name {
        FamilyName::C1 => 0,
        FamilyName::C2 => 1,
        FamilyName::C3 => 2,
        FamilyName::D1 => 3,
        FamilyName::D2 => 4,
        _ => return Ok(None),
    };
    match SLOTS[k].get_or_init(|| build_series(name)) {
        Ok(s) => Ok(s.as_deref()),
        Err(e) => Err(e.clone()),
    }
}

/// How a loss formula is asserted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LossOrder {
    Exact,
    /// Formula holds up to `o(d^{−p})`.
    LittleO(i32),
}

/// Table loss of the family at `d` and the order it is claimed to.
pub fn loss_formula(name: FamilyName, d: usize) -> (f64, LossOrder) {
    use FamilyName::*;
    let df = d as f64;
    match name {
        CI | DI => (0.0, LossOrder::Exact),
        C0 => (df, LossOrder::Exact),
        C1 => (df - 1.0 / df, LossOrder::Exact),
        C2 => (df - 1.0 / df, LossOrder::LittleO(1)),
        C3 => (df - 1.0, LossOrder::LittleO(0)),
        C4 => (1.5, LossOrder::Exact),
        C5t(_) => (1.0, LossOrder::Exact),
        Cblock(i) => (i as f64, LossOrder::Exact),
        D0 => (15.0 * df, LossOrder::Exact),
        D1 => (
            48.0 * df / 5.0 - 36.0 / 5.0 - 12.0 / (5.0 * df),
            LossOrder::Exact,
        ),
        D2 => (6.0 + 18.0 / df, LossOrder::LittleO(1)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ExactMatch,
    AsymptoticConsistent,
    Mismatch,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        *self != Verdict::Mismatch
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LossRow {
    pub d: usize,
    pub loss: f64,
    pub predicted: f64,
    pub deviation: f64,
    /// `deviation·d^p` for asymptotic formulas, `deviation` otherwise.
    pub scaled_deviation: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LossReport {
    pub family: FamilyName,
    pub order: LossOrder,
    pub rows: Vec<LossRow>,
    pub verdict: Verdict,
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Compares computed losses against the table formula along `d_list`.
pub fn verify_loss_formula(spec: &FamilySpec, d_list: &[usize]) -> Result<LossReport> {
    let mut rows = Vec::with_capacity(d_list.len());
    let mut order = LossOrder::Exact;
    for &d in d_list {
        let p = construct(spec, d)?;
        let (predicted, o) = loss_formula(spec.name, d);
        order = o;
        let deviation = (p.loss - predicted).abs();
        let scaled_deviation = match o {
            LossOrder::Exact => deviation,
            LossOrder::LittleO(k) => deviation * (d as f64).powi(k),
        };
        rows.push(LossRow {
            d,
            loss: p.loss,
            predicted,
            deviation,
            scaled_deviation,
            residual: p.residual,
        });
    }
    let exact = rows.iter().all(|r| rel_close(r.loss, r.predicted, 1e-10));
    let verdict = if exact {
        Verdict::ExactMatch
    } else if order != LossOrder::Exact
        && rows.len() >= 2
        && rows
            .windows(2)
            .all(|w| w[1].scaled_deviation < w[0].scaled_deviation)
    {
        Verdict::AsymptoticConsistent
    } else {
        Verdict::Mismatch
    };
    Ok(LossReport {
        family: spec.name,
        order,
        rows,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuumRow {
    pub t: f64,
    pub residual: f64,
    pub gradient_norm: f64,
    pub gradient_scale: f64,
    pub loss: f64,
    pub passed: bool,
}

/// Evaluates `C_{5,t}(d)` along `t_grid`.
///
/// The full gradient is accepted at `1e−8·(1 + ‖W‖⁵)`: for large `|t|` the
/// entries reach `|t|` and the kernel terms `|t|^5`, so float cancellation
/// dominates any absolute bound.
pub fn continuum_sweep(t_grid: &[f64], d: usize) -> Result<Vec<ContinuumRow>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "continuum needs d >= 2, got {d}"
        )));
    }
    t_grid
        .iter()
        .map(|&t| {
            let spec = FamilySpec::of(FamilyName::C5t(t));
            let p = construct(&spec, d)?;
            let gn = gradient_norm(spec.kernel, &p.w);
            let gradient_scale = 1.0 + p.w.frobenius_norm().powi(5);
            let passed = gn <= 1e-8 * gradient_scale && rel_close(p.loss, 1.0, 1e-10);
            Ok(ContinuumRow {
                t,
                residual: p.residual,
                gradient_norm: gn,
                gradient_scale,
                loss: p.loss,
                passed,
            })
        })
        .collect()
}

/// Exact table loss for the families whose loss is rational in `d`.
pub fn exact_loss_fraction(name: FamilyName, d: usize) -> Option<BigRational> {
    use FamilyName::*;
    let dq = q(d as i64);
    match name {
        CI | DI => Some(q(0)),
        C0 => Some(dq),
        C1 => Some(&dq - q(1) / &dq),
        C4 => Some(qf(3, 2)),
        C5t(_) => Some(q(1)),
        Cblock(i) => Some(q(i as i64)),
        D0 => Some(q(15) * dq),
        D1 => Some(qf(48, 5) * &dq - qf(36, 5) - qf(12, 5) / &dq),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::gradient;

    fn build(name: &str, d: usize) -> PolishedPoint {
        construct(&FamilySpec::parse(name).unwrap(), d).unwrap()
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "CI", "C0", "C1", "C2", "C3", "C4", "C5", "C5t:0.7", "Cblock:2", "D0", "D1", "DI", "D2",
        ] {
            let n: FamilyName = s.parse().unwrap();
            assert_eq!(n.to_string(), s);
        }
        assert_eq!("c_3".parse::<FamilyName>().unwrap(), FamilyName::C3);
        assert!(matches!(
            "Bogus".parse::<FamilyName>(),
            Err(Error::UnknownFamily(_))
        ));
        assert!("Cblock:0".parse::<FamilyName>().is_err());
    }

    #[test]
    fn closed_form_losses() {
        assert!((build("C1", 5).loss - 24.0 / 5.0).abs() < 1e-12);
        assert!((build("C4", 4).loss - 1.5).abs() < 1e-12);
        let c5 = build("C5t:0.7", 4);
        assert!(c5.residual <= 1e-12);
        assert!((c5.loss - 1.0).abs() < 1e-12);
        assert!((build("D1", 3).loss - 104.0 / 5.0).abs() < 1e-10);
    }

    #[test]
    fn c4_coordinates() {
        let p = build("C4", 6);
        assert_eq!(p.xi, vec![1.0, 0.0, 0.0, 0.0, 0.5, 0.5]);
    }

    #[test]
    fn seeded_families_are_critical() {
        for name in ["C2", "C3", "D2"] {
            let p = build(name, 8);
            let spec = FamilySpec::parse(name).unwrap();
            let g = gradient(spec.kernel, &p.w);
            assert!(
                norm(&g) <= 1e-10 * (1.0 + p.w.frobenius_norm().powi(3)),
                "{name}"
            );
        }
    }

    #[test]
    fn d1_series_matches_closed_form() {
        let s = catalog_series(FamilyName::D1).unwrap().unwrap();
        for d in [10usize, 40] {
            let v = seed_to_numeric(s, d)[0];
            let err = (v - d1_entry(d)).abs() / d1_entry(d);
            assert!(err < 2.0 / (d as f64).powi(4), "d={d}: {err}");
        }
    }

    #[test]
    fn too_small_dimension() {
        assert!(construct(&FamilySpec::parse("Cblock:3").unwrap(), 3).is_err());
    }
}
