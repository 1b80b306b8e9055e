//! Hessian spectra of catalog points and their tabulated predictions.
//!
//! Eigenvalues are clustered by an adaptive gap rule. Predictions are
//! instantiated at a given `d` with multiplicities kept as polynomials in `d`.
//! Asymptotic predictions are checked along a ladder of dimensions.

use faer::Side;
use serde::Serialize;

use crate::calculus::hessian;
use crate::error::{Error, Result};
use crate::families::{construct, robust_loss, FamilyName, FamilySpec, Verdict};
use crate::tensor::{KernelSpec, WeightMatrix};

/// Default cap on the Hessian dimension `d²` (`d = 128`).
pub const DEFAULT_MAX_DIM: usize = 16384;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    /// Sorted descending.
    pub clusters: Vec<Cluster>,
    pub loss: f64,
    pub index: usize,
    pub nullity: usize,
    pub tol: f64,
    pub verdict: Option<Verdict>,
    /// All eigenvalues, descending.
    #[serde(skip)]
    pub eigenvalues: Vec<f64>,
}

impl SpectrumReport {
    pub fn total_multiplicity(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }
}

/// Descending eigenvalues of the Hessian at `w`.
pub fn hessian_eigenvalues(spec: KernelSpec, w: &WeightMatrix, max_dim: usize) -> Result<Vec<f64>> {
    let n = w.rows() * w.cols();
    if n > max_dim {
        return Err(Error::TooLarge {
            what: "Hessian eigensolve",
            max: max_dim,
            got: n,
        });
    }
    let h = hessian(spec, w).to_faer();
    let mut ev = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Unsupported(format!("eigensolver failed: {e:?}")))?;
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// Splits descending values where consecutive gaps exceed `max(1e−7, 1e−6·spread)`.
pub fn cluster(eigs: &[f64]) -> Vec<Cluster> {
    let Some((&first, &last)) = eigs.first().zip(eigs.last()) else {
        return Vec::new();
    };
    let gap = (1e-6 * (first - last)).max(1e-7);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=eigs.len() {
        if i == eigs.len() || eigs[i - 1] - eigs[i] > gap {
            let group = &eigs[start..i];
            out.push(Cluster {
                value: group.iter().sum::<f64>() / group.len() as f64,
                multiplicity: group.len(),
            });
            start = i;
        }
    }
    out
}

/// Default index/nullity tolerance `1e−7·(1 + max|λ|)`.
pub fn default_tol(eigs: &[f64]) -> f64 {
    1e-7 * (1.0 + eigs.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// Clustered Hessian spectrum; `tol` defaults to [`default_tol`].
pub fn spectrum(spec: KernelSpec, w: &WeightMatrix, tol: Option<f64>) -> Result<SpectrumReport> {
    let eigenvalues = hessian_eigenvalues(spec, w, DEFAULT_MAX_DIM)?;
    let tol = tol.unwrap_or_else(|| default_tol(&eigenvalues));
    Ok(SpectrumReport {
        clusters: cluster(&eigenvalues),
        loss: robust_loss(spec, w),
        index: eigenvalues.iter().filter(|&&l| l < -tol).count(),
        nullity: eigenvalues.iter().filter(|&&l| l.abs() <= tol).count(),
        tol,
        verdict: None,
        eigenvalues,
    })
}

/// Accuracy to which a prediction is claimed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpectrumOrder {
    Exact,
    /// Up to `o(1/d)`.
    InvD,
    /// Up to `o(d^{−2/3})`.
    InvD23,
}

impl SpectrumOrder {
    /// Factor applied to deviations along a ladder.
    pub fn scale(&self, d: usize) -> f64 {
        match self {
            SpectrumOrder::Exact => 1.0,
            SpectrumOrder::InvD => d as f64,
            SpectrumOrder::InvD23 => (d as f64).powf(2.0 / 3.0),
        }
    }
}

/// `(c0 + c1·d + c2·d²) / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MultPoly {
    pub coeffs: [i64; 3],
    pub den: i64,
}

impl MultPoly {
    const fn new(c0: i64, c1: i64, c2: i64, den: i64) -> Self {
        Self {
            coeffs: [c0, c1, c2],
            den,
        }
    }

    pub fn eval(&self, d: usize) -> i64 {
        let d = d as i64;
        let [c0, c1, c2] = self.coeffs;
        (c0 + c1 * d + c2 * d * d) / self.den
    }

    pub fn eval_f64(&self, d: f64) -> f64 {
        let [c0, c1, c2] = self.coeffs;
        (c0 as f64 + c1 as f64 * d + c2 as f64 * d * d) / self.den as f64
    }
}

const ONE: MultPoly = MultPoly::new(1, 0, 0, 1);
const D: MultPoly = MultPoly::new(0, 1, 0, 1);
const D_1: MultPoly = MultPoly::new(-1, 1, 0, 1);
const D_2: MultPoly = MultPoly::new(-2, 1, 0, 1);
/// `(d−1)²`
const SQ: MultPoly = MultPoly::new(1, -2, 1, 1);
/// `(d−1)(d−2)/2`
const X_D: MultPoly = MultPoly::new(2, -3, 1, 2);
/// `d(d−3)/2`
const Y_D: MultPoly = MultPoly::new(0, -3, 1, 2);
/// `(d−2)(d−3)/2`
const X_D1: MultPoly = MultPoly::new(6, -5, 1, 2);
/// `(d−1)(d−4)/2`
const Y_D1: MultPoly = MultPoly::new(4, -5, 1, 2);

#[derive(Clone, Debug, Serialize)]
pub struct PredictedEntry {
    pub value: f64,
    pub multiplicity: usize,
    pub mult_poly: MultPoly,
    /// Isotypic component carrying the entry, when tabulated by component.
    pub component: Option<&'static str>,
    /// Whether the value is exact in `d` rather than a leading-order term.
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictedSpectrum {
    pub family: FamilyName,
    pub d: usize,
    pub entries: Vec<PredictedEntry>,
    pub order: SpectrumOrder,
}

impl PredictedSpectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Entries merged by equal value, descending.
    pub fn merged(&self) -> Vec<Cluster> {
        let mut v: Vec<(f64, usize)> = self
            .entries
            .iter()
            .map(|e| (e.value, e.multiplicity))
            .collect();
        v.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut out: Vec<Cluster> = Vec::new();
        for (value, m) in v {
            if m == 0 {
                continue;
            }
            match out.last_mut() {
                Some(c) if (c.value - value).abs() <= 1e-12 * (1.0 + value.abs()) => {
                    c.multiplicity += m
                }
                _ => out.push(Cluster {
                    value,
                    multiplicity: m,
                }),
            }
        }
        out
    }

    /// Predicted values repeated by multiplicity, descending.
    pub fn expanded(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Tabulated Hessian spectrum of a catalog family at `d`.
pub fn predicted(name: FamilyName, d: usize) -> Result<PredictedSpectrum> {
    use FamilyName::*;
    let x = d as f64;
    let c = 75f64.cbrt();
    let t13 = x.cbrt();
    let tm23 = 1.0 / (t13 * t13);
    let rows: Vec<(f64, MultPoly, Option<&'static str>)> = match name {
        CI => vec![
            (18.0, ONE, Some("t")),
            (6.0, ONE, Some("t")),
            (18.0, D_1, Some("s_d")),
            (6.0, D_1, Some("s_d")),
            (6.0, D_1, Some("s_d")),
            (6.0, X_D, Some("x_d")),
            (6.0, Y_D, Some("y_d")),
        ],
        C0 => vec![
            (0.0, ONE, Some("t")),
            (0.0, D_1, Some("s_d")),
            (0.0, D_1, Some("s_d")),
            (0.0, SQ, Some("s_d⊗s_d")),
        ],
        C1 => vec![
            (18.0 / x, ONE, Some("t")),
            (0.0, D_1, Some("s_d")),
            (-6.0 / x, D_1, Some("s_d")),
            (-12.0 / x, SQ, Some("s_d⊗s_d")),
        ],
        C2 => vec![
            (18.0 / x, ONE, Some("t")),
            (12.0 / x, ONE, Some("t")),
            (12.0 / x, D_1, Some("s_d")),
            (0.0, D_1, Some("s_d")),
            (-6.0 / x, D_1, Some("s_d")),
            (-12.0 / x, X_D, Some("x_d")),
            (-12.0 / x, Y_D, Some("y_d")),
        ],
        C3 => vec![
            (18.0, ONE, None),
            (6.0, D_1, None),
            (18.0 / x, ONE, None),
            (12.0 / x, D_1, None),
            (6.0 / x, ONE, None),
            (0.0, MultPoly::new(-4, 2, 0, 1), None),
            (-6.0 / x, D_2, None),
            (-12.0 / x, MultPoly::new(5, -5, 1, 1), None),
        ],
        C4 => vec![
            (18.0, D_2, None),
            (9.0, ONE, None),
            (6.0, MultPoly::new(2, -3, 1, 1), None),
            (3.0, D_2, None),
            (0.0, D_1, None),
            (-3.0, ONE, None),
            (-6.0, ONE, None),
        ],
        C5t(t) if t == 0.0 => vec![(18.0, D_1, None), (6.0, SQ, None), (0.0, D, None)],
        D1 => vec![
            (
                162.0 * c / 5.0 * t13 + 144.0 * c / 5.0 * tm23,
                ONE,
                Some("t"),
            ),
            (0.0, D_1, Some("s_d")),
            (
                18.0 * c / 5.0 * t13 - 32.0 * c / 5.0 * tm23,
                D_1,
                Some("s_d"),
            ),
            (
                -72.0 * c / 25.0 * t13 - 304.0 * c / 25.0 * tm23,
                SQ,
                Some("s_d⊗s_d"),
            ),
        ],
        DI => vec![
            (108.0, ONE, Some("t")),
            (18.0 * x + 180.0, ONE, Some("t")),
            (108.0, D_1, Some("s_d")),
            (36.0, D_1, Some("s_d")),
            (18.0 * x + 180.0, D_1, Some("s_d")),
            (36.0, X_D, Some("x_d")),
            (36.0, Y_D, Some("y_d")),
        ],
        D2 => vec![
            (0.0, ONE, Some("t")),
            (0.0, ONE, Some("t")),
            (108.0, ONE, Some("t")),
            (18.0 * x + 18.0, ONE, Some("t")),
            (18.0 * x + 162.0, ONE, Some("t")),
            (0.0, D_2, Some("s_{d-1}")),
            (36.0, D_2, Some("s_{d-1}")),
            (36.0, D_2, Some("s_{d-1}")),
            (108.0, D_2, Some("s_{d-1}")),
            (18.0 * x + 162.0, D_2, Some("s_{d-1}")),
            (36.0, X_D1, Some("x_{d-1}")),
            (36.0, Y_D1, Some("y_{d-1}")),
        ],
        _ => {
            return Err(Error::Unsupported(format!(
                "no tabulated spectrum for {name}"
            )));
        }
    };
    let order = match name {
        CI | C0 | C4 | C5t(_) => SpectrumOrder::Exact,
        C1 | C2 | C3 => SpectrumOrder::InvD,
        _ => SpectrumOrder::InvD23,
    };
    // The D_I entry 36 is exact; its pair (108, 18d+180) is the large-d limit
    // of `di_pair`.
    let exact_value = |v: f64| order == SpectrumOrder::Exact || (name == DI && v == 36.0);
    let min = match name {
        C3 | D2 => 4,
        _ => 3,
    };
    if d < min {
        return Err(Error::InvalidArgument(format!(
            "tabulated spectrum of {name} needs d >= {min}, got {d}"
        )));
    }
    Ok(PredictedSpectrum {
        family: name,
        d,
        entries: rows
            .into_iter()
            .map(|(value, p, component)| PredictedEntry {
                value,
                multiplicity: p.eval(d) as usize,
                mult_poly: p,
                component,
                exact: exact_value(value),
            })
            .collect(),
        order,
    })
}

/// Eigenvalues `(λ₊, λ₋)` of the column block `[[270, 54√(d−1)], [54√(d−1), 18d+18]]`
/// of the cubic-Gaussian Hessian at `I_d`: trace `18d + 288`, determinant `1944(d + 4)`.
pub fn di_pair(d: usize) -> (f64, f64) {
    let x = d as f64;
    let tr = 18.0 * x + 288.0;
    let det = 1944.0 * (x + 4.0);
    let root = (tr * tr - 4.0 * det).sqrt();
    ((tr + root) / 2.0, 2.0 * det / (tr + root))
}

/// Closed-form spectrum for families whose tabulated values are only
/// leading-order but whose exact spectrum is elementary (`D_I`).
pub fn closed_form(name: FamilyName, d: usize) -> Option<PredictedSpectrum> {
    if name != FamilyName::DI || d < 3 {
        return None;
    }
    let (hi, lo) = di_pair(d);
    let entry = |value, p: MultPoly| PredictedEntry {
        value,
        multiplicity: p.eval(d) as usize,
        mult_poly: p,
        component: None,
        exact: true,
    };
    Some(PredictedSpectrum {
        family: name,
        d,
        entries: vec![
            entry(hi, D),
            entry(lo, D),
            entry(36.0, MultPoly::new(0, -2, 1, 1)),
        ],
        order: SpectrumOrder::Exact,
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Multiset equality: values to `1e−8` relative, multiplicities exactly.
pub fn matches_exactly(report: &SpectrumReport, pred: &PredictedSpectrum) -> bool {
    let want = pred.merged();
    report.clusters.len() == want.len()
        && report
            .clusters
            .iter()
            .zip(&want)
            .all(|(c, w)| c.multiplicity == w.multiplicity && rel_close(c.value, w.value, 1e-8))
}

/// Every cluster carries the predicted multiplicity and the entries that are
/// exact in `d` match to `1e−8` relative.
pub fn matches_exact_entries(report: &SpectrumReport, pred: &PredictedSpectrum) -> bool {
    let want = pred.merged();
    if report.clusters.len() != want.len() || report.eigenvalues.len() != pred.total_multiplicity()
    {
        return false;
    }
    let exact = |v: f64| pred.entries.iter().any(|e| e.exact && e.value == v);
    assign_clusters(report, pred)
        .iter()
        .zip(&want)
        .all(|(r, w)| {
            r.predicted == w.value
                && r.multiplicity == w.multiplicity
                && (!exact(w.value) || r.deviation <= 1e-8 * w.value.abs().max(1.0))
        })
}

/// `max_i |λ_i − p_i|` over eigenvalues and predictions both sorted
/// descending; `None` when the counts differ.
pub fn sorted_rank_deviation(report: &SpectrumReport, pred: &PredictedSpectrum) -> Option<f64> {
    let p = pred.expanded();
    (p.len() == report.eigenvalues.len()).then(|| {
        report
            .eigenvalues
            .iter()
            .zip(&p)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    })
}

/// Per-cluster comparison row.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterRow {
    pub family: FamilyName,
    pub d: usize,
    pub value: f64,
    pub multiplicity: usize,
    pub predicted: f64,
    pub deviation: f64,
}

/// Groups eigenvalues by the predicted value they meet in sorted order.
pub fn assign_clusters(report: &SpectrumReport, pred: &PredictedSpectrum) -> Vec<ClusterRow> {
    let p = pred.expanded();
    let mut rows: Vec<ClusterRow> = Vec::new();
    for (&l, &v) in report.eigenvalues.iter().zip(&p) {
        match rows.last_mut() {
            Some(r) if r.predicted == v => {
                r.value += l;
                r.multiplicity += 1;
                r.deviation = r.deviation.max((l - v).abs());
            }
            _ => rows.push(ClusterRow {
                family: pred.family,
                d: pred.d,
                value: l,
                multiplicity: 1,
                predicted: v,
                deviation: (l - v).abs(),
            }),
        }
    }
    for r in &mut rows {
        r.value /= r.multiplicity as f64;
    }
    rows
}

/// Gap clusters paired with the nearest predicted value.
pub fn nearest_rows(report: &SpectrumReport, pred: &PredictedSpectrum) -> Vec<ClusterRow> {
    let want = pred.merged();
    report
        .clusters
        .iter()
        .map(|c| {
            let p = want
                .iter()
                .map(|w| w.value)
                .min_by(|a, b| (a - c.value).abs().total_cmp(&(b - c.value).abs()))
                .unwrap_or(f64::NAN);
            ClusterRow {
                family: pred.family,
                d: pred.d,
                value: c.value,
                multiplicity: c.multiplicity,
                predicted: p,
                deviation: (c.value - p).abs(),
            }
        })
        .collect()
}

/// Spectrum of a catalog family at `d` with its prediction and per-cluster rows.
#[derive(Clone, Debug, Serialize)]
pub struct FamilySpectrum {
    pub family: FamilyName,
    pub d: usize,
    pub report: SpectrumReport,
    pub predicted: PredictedSpectrum,
    pub rows: Vec<ClusterRow>,
    pub max_deviation: Option<f64>,
}

pub fn family_spectrum(name: FamilyName, d: usize) -> Result<FamilySpectrum> {
    let spec = FamilySpec::of(name);
    let pred = predicted(name, d)?;
    let point = construct(&spec, d)?;
    let mut report = spectrum(spec.kernel, &point.w, None)?;
    let closed = closed_form(name, d);
    let rows = if pred.order == SpectrumOrder::Exact {
        report.verdict = Some(if matches_exactly(&report, &pred) {
            Verdict::ExactMatch
        } else {
            Verdict::Mismatch
        });
        nearest_rows(&report, &pred)
    } else {
        if let Some(c) = &closed {
            report.verdict = Some(
                if matches_exact_entries(&report, &pred) && matches_exactly(&report, c) {
                    Verdict::ExactMatch
                } else {
                    Verdict::Mismatch
                },
            );
        }
        assign_clusters(&report, &pred)
    };
    Ok(FamilySpectrum {
        family: name,
        d,
        max_deviation: sorted_rank_deviation(&report, &pred),
        report,
        predicted: pred,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderRow {
    pub d: usize,
    pub max_deviation: f64,
    pub scaled_deviation: f64,
    pub exact_match: bool,
    pub closed_form_match: bool,
}

/// What an exact verdict was established against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Basis {
    Table,
    /// Tabulated multiplicities and exact entries, remaining values from [`closed_form`].
    ClosedForm,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub family: FamilyName,
    pub order: SpectrumOrder,
    pub rows: Vec<LadderRow>,
    pub basis: Basis,
    pub verdict: Verdict,
}

/// Verdict along a ladder: exact predictions must match at every `d`;
/// asymptotic ones need the scaled deviation to decrease strictly.
pub fn compare(points: &[FamilySpectrum]) -> Result<Comparison> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty ladder".into()))?;
    let order = first.predicted.order;
    let mut rows = Vec::with_capacity(points.len());
    let mut counts_ok = true;
    for p in points {
        let dev = p.max_deviation;
        counts_ok &= dev.is_some() && p.report.total_multiplicity() == p.d * p.d;
        let dev = dev.unwrap_or(f64::INFINITY);
        rows.push(LadderRow {
            d: p.d,
            max_deviation: dev,
            scaled_deviation: dev * order.scale(p.d),
            exact_match: matches_exactly(&p.report, &p.predicted),
            closed_form_match: matches_exact_entries(&p.report, &p.predicted)
                && closed_form(p.family, p.d).is_some_and(|c| matches_exactly(&p.report, &c)),
        });
    }
    let mut basis = Basis::Table;
    let verdict = if !counts_ok {
        Verdict::Mismatch
    } else if rows.iter().all(|r| r.exact_match) {
        Verdict::ExactMatch
    } else if rows.iter().all(|r| r.closed_form_match) {
        basis = Basis::ClosedForm;
        Verdict::ExactMatch
    } else if order != SpectrumOrder::Exact
        && rows.len() >= 2
        && rows
            .windows(2)
            .all(|w| w[1].scaled_deviation < w[0].scaled_deviation)
    {
        Verdict::AsymptoticConsistent
    } else {
        Verdict::Mismatch
    };
    Ok(Comparison {
        family: first.family,
        order,
        rows,
        basis,
        verdict,
    })
}

/// Spectra of `name` along `ladder`, compared.
pub fn ladder(name: FamilyName, ladder: &[usize]) -> Result<(Vec<FamilySpectrum>, Comparison)> {
    let points: Vec<FamilySpectrum> = ladder
        .iter()
        .map(|&d| family_spectrum(name, d))
        .collect::<Result<_>>()?;
    let cmp = compare(&points)?;
    Ok((points, cmp))
}

/// Descent directions certified along radial curves rather than by the
/// Hessian: the dimension of the zero block of `I_{d−i} ⊕ O_i`, on which the
/// loss restricts to that of `C_0(i)`.
pub fn higher_order_descents(name: FamilyName, d: usize) -> usize {
    match name {
        FamilyName::C0 => d * d,
        FamilyName::C5t(t) if t == 0.0 => 1,
        FamilyName::Cblock(i) => i * i,
        _ => 0,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexValueRow {
    pub family: FamilyName,
    pub d: usize,
    pub loss: f64,
    pub index: usize,
    pub loss_over_d: f64,
    pub index_over_d2: f64,
    pub higher_order_descents: usize,
}

/// Normalized loss against normalized index for each family at `d`.
pub fn index_value_report(families: &[FamilyName], d: usize) -> Result<Vec<IndexValueRow>> {
    families
        .iter()
        .map(|&name| {
            let spec = FamilySpec::of(name);
            let point = construct(&spec, d)?;
            let r = spectrum(spec.kernel, &point.w, None)?;
            Ok(IndexValueRow {
                family: name,
                d,
                loss: r.loss,
                index: r.index,
                loss_over_d: r.loss / d as f64,
                index_over_d2: r.index as f64 / (d * d) as f64,
                higher_order_descents: higher_order_descents(name, d),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spectrum() {
        let r = spectrum(KernelSpec::FROBENIUS, &WeightMatrix::identity(3), None).unwrap();
        assert_eq!(
            r.clusters
                .iter()
                .map(|c| c.multiplicity)
                .collect::<Vec<_>>(),
            vec![3, 6]
        );
        assert!((r.clusters[0].value - 18.0).abs() < 1e-10);
        assert!((r.clusters[1].value - 6.0).abs() < 1e-10);
        assert_eq!(r.index, 0);
    }

    #[test]
    fn clustering_splits_on_gaps() {
        let c = cluster(&[2.0, 2.0 + 1e-12, 1.0, -1.0, -1.0]);
        assert_eq!(c.len(), 3);
        assert_eq!(c[2].multiplicity, 2);
    }

    #[test]
    fn prediction_examples() {
        let p = predicted(FamilyName::C3, 10).unwrap();
        assert!(p
            .entries
            .iter()
            .any(|e| (e.value + 1.2).abs() < 1e-12 && e.multiplicity == 55));
        let p = predicted(FamilyName::C5t(0.0), 6).unwrap();
        let m: Vec<(f64, usize)> = p
            .merged()
            .iter()
            .map(|c| (c.value, c.multiplicity))
            .collect();
        assert_eq!(m, vec![(18.0, 5), (6.0, 25), (0.0, 6)]);
        let p = predicted(FamilyName::DI, 10).unwrap();
        let m = p.merged();
        assert_eq!(m[0].value, 360.0);
        assert_eq!(m[0].multiplicity, 10);
    }

    #[test]
    fn c4_and_c5_exact() {
        let f = family_spectrum(FamilyName::C4, 4).unwrap();
        assert_eq!(f.report.verdict, Some(Verdict::ExactMatch));
        assert_eq!(f.report.index, 2);
        let f = family_spectrum(FamilyName::C5t(0.0), 3).unwrap();
        assert_eq!(f.report.verdict, Some(Verdict::ExactMatch));
        assert_eq!((f.report.index, f.report.nullity), (0, 3));
    }

    #[test]
    fn identity_gauss_pair() {
        for d in [4, 7] {
            let f = family_spectrum(FamilyName::DI, d).unwrap();
            assert_eq!(f.report.verdict, Some(Verdict::ExactMatch));
            let (hi, lo) = di_pair(d);
            assert!((hi + lo - (18.0 * d as f64 + 288.0)).abs() < 1e-9);
        }
        let (hi, lo) = di_pair(1_000_000);
        assert!((lo - 108.0).abs() < 1e-3);
        assert!((hi - (18.0 * 1e6 + 180.0)).abs() < 1e-3);
    }

    #[test]
    fn too_large() {
        let w = WeightMatrix::identity(4);
        assert!(matches!(
            hessian_eigenvalues(KernelSpec::FROBENIUS, &w, 10),
            Err(Error::TooLarge { .. })
        ));
    }
}
