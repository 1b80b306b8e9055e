//! `symtensor` command-line front end.
//!
//! Every subcommand prints a JSON report (or CSV rows) and exits with 0 when
//! all verdicts pass, 1 when a verification fails and 2 on usage errors.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use symtensor::calculus::gradient_norm;
use symtensor::families::{
    catalog_series, construct, verify_loss_formula, FamilyName, FamilySpec, SEED_DEPTH,
};
use symtensor::puiseux::{
    extend_series, leading_coefficients, leading_exponents, parse_rational, Coef, PuiseuxSeries,
};
use symtensor::radial::{
    certify_saddle, classify_curve, curve, curve_connections, default_r_grid, sphere_min,
    CurveName, SaddleVerdict, SphereOptions,
};
use symtensor::spectra::{index_value_report, ladder};
use symtensor::symbolic::symbolic_restricted_gradient;
use symtensor::symmetry::IsotropyPattern;
use symtensor::{Error, KernelSpec};

use config::{parse_bool, parse_kernel, parse_ladder, parse_positive, parse_reals, FileConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Sphere minimizers must satisfy the tangent condition to this residual.
const SPHERE_RESIDUAL_TOL: f64 = 1e-6;
/// Curve classification window.
const CURVE_WINDOW: f64 = 0.01;

#[derive(Debug)]
pub struct UsageError(pub String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "symtensor",
    version,
    about = "Critical points, spectra and saddles of symmetric tensor decomposition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dimension ladder: `a..b`, `a,b,c` or `a`.
    #[arg(long, global = true)]
    d: Option<String>,
    /// frobenius | gauss
    #[arg(long, global = true)]
    kernel: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// json | csv
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct families, check criticality and the loss formulas.
    Verify {
        #[arg(required = true)]
        families: Vec<String>,
    },
    /// Hessian spectra against the tabulated multisets.
    Spectrum {
        #[arg(required = true)]
        families: Vec<String>,
    },
    /// Leading exponents, leading coefficients and series of a restricted system.
    Puiseux {
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long)]
        depth: Option<String>,
    },
    /// Sphere-deficit saddle certificate.
    Radial {
        family: String,
        /// Comma-separated radii.
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        restarts: Option<String>,
        /// Search the ambient space instead of the family's fixed-point space.
        #[arg(long)]
        ambient: bool,
    },
    /// Minimum of the loss on spheres about a family point.
    SphereMin {
        family: String,
        #[arg(long)]
        r: Option<String>,
        /// Isotropy pattern, or `ambient`.
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long)]
        restarts: Option<String>,
    },
    /// Loss-versus-index table, curve classes and curve connections.
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

/// Flag values merged over the config file.
struct Settings {
    file: FileConfig,
    cli: Cli,
}

impl Settings {
    fn raw(&self, key: &str, flag: Option<&str>) -> Option<String> {
        flag.map(str::to_string)
            .or_else(|| self.file.get(key).map(str::to_string))
    }

    fn ladder(&self, default: &str) -> Result<Vec<usize>, UsageError> {
        parse_ladder(
            &self
                .raw("d", self.cli.d.as_deref())
                .unwrap_or_else(|| default.to_string()),
        )
    }

    fn kernel(&self) -> Result<Option<KernelSpec>, UsageError> {
        self.raw("kernel", self.cli.kernel.as_deref())
            .map(|k| parse_kernel(&k))
            .transpose()
    }

    fn tol(&self) -> Result<Option<f64>, UsageError> {
        self.raw("tol", self.cli.tol.as_deref())
            .map(|t| parse_positive(&t, "--tol"))
            .transpose()
    }

    fn seed(&self) -> Result<u64, UsageError> {
        match self.raw("seed", self.cli.seed.as_deref()) {
            None => Ok(0),
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| UsageError(format!("bad seed `{s}`"))),
        }
    }

    fn format(&self) -> Result<Format, UsageError> {
        match self
            .raw("format", self.cli.format.as_deref())
            .as_deref()
            .map(str::trim)
        {
            None | Some("json") => Ok(Format::Json),
            Some("csv") => Ok(Format::Csv),
            Some(other) => Err(UsageError(format!(
                "unknown format `{other}` (expected json or csv)"
            ))),
        }
    }

    fn out(&self) -> Option<PathBuf> {
        self.cli
            .out
            .clone()
            .or_else(|| self.file.get("out").map(PathBuf::from))
    }

    fn sphere_options(&self, restarts: Option<&str>) -> Result<SphereOptions, UsageError> {
        let mut opts = SphereOptions {
            seed: self.seed()?,
            ..SphereOptions::default()
        };
        if let Some(r) = self.raw("restarts", restarts) {
            opts.restarts = match r.trim().parse::<usize>() {
                Ok(n) if n > 0 => n,
                _ => {
                    return Err(UsageError(format!(
                        "restarts must be a positive integer, got `{r}`"
                    )))
                }
            };
        }
        Ok(opts)
    }

    /// Parses family names, rejecting those whose kernel contradicts `--kernel`.
    fn families(&self, names: &[String]) -> Result<Vec<FamilySpec>, UsageError> {
        let kernel = self.kernel()?;
        names
            .iter()
            .map(|n| {
                let spec = FamilySpec::parse(n)?;
                match kernel {
                    Some(k) if k != spec.kernel => Err(UsageError(format!(
                        "family {} uses the {} kernel",
                        spec.name,
                        spec.kernel.name()
                    ))),
                    _ => Ok(spec),
                }
            })
            .collect()
    }
}

/// A rendered report and whether every verdict in it passed.
struct Outcome {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    pass: bool,
}

fn envelope(command: &str, pass: bool, body: Value) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "pass": pass,
    });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct PointCheck {
    d: usize,
    loss: Option<f64>,
    gradient_norm: Option<f64>,
    bound: Option<f64>,
    critical: bool,
    error: Option<String>,
}

fn cmd_verify(s: &Settings, names: &[String]) -> Result<Outcome, UsageError> {
    let specs = s.families(names)?;
    let ds = s.ladder("3..8")?;
    let factor = s.tol()?.unwrap_or(1e-8);
    let mut all_pass = true;
    let mut families = Vec::new();
    let mut rows = Vec::new();
    for spec in &specs {
        let points: Vec<PointCheck> = ds
            .iter()
            .map(|&d| match construct(spec, d) {
                Ok(p) => {
                    let g = gradient_norm(spec.kernel, &p.w);
                    let bound = factor * (1.0 + p.w.frobenius_norm().powi(5));
                    PointCheck {
                        d,
                        loss: Some(p.loss),
                        gradient_norm: Some(g),
                        bound: Some(bound),
                        critical: g <= bound,
                        error: None,
                    }
                }
                Err(e) => PointCheck {
                    d,
                    loss: None,
                    gradient_norm: None,
                    bound: None,
                    critical: false,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        let loss = verify_loss_formula(spec, &ds);
        let pass =
            points.iter().all(|p| p.critical) && loss.as_ref().is_ok_and(|l| l.verdict.passed());
        all_pass &= pass;
        let verdict = match &loss {
            Ok(l) => format!("{:?}", l.verdict),
            Err(_) => "Error".to_string(),
        };
        for p in &points {
            let lr = loss
                .as_ref()
                .ok()
                .and_then(|l| l.rows.iter().find(|r| r.d == p.d));
            rows.push(vec![
                spec.name.to_string(),
                p.d.to_string(),
                opt_f64(p.loss),
                opt_f64(lr.map(|r| r.predicted)),
                opt_f64(lr.map(|r| r.deviation)),
                opt_f64(lr.map(|r| r.scaled_deviation)),
                opt_f64(p.gradient_norm),
                p.critical.to_string(),
                verdict.clone(),
            ]);
        }
        families.push(json!({
            "family": spec.name,
            "kernel": spec.kernel.name(),
            "pattern": spec.pattern,
            "points": points,
            "loss": match &loss {
                Ok(l) => to_value(l),
                Err(e) => json!({ "error": e.to_string() }),
            },
            "pass": pass,
        }));
    }
    Ok(Outcome {
        json: envelope("verify", all_pass, json!({ "d": ds, "families": families })),
        header: vec![
            "family",
            "d",
            "loss",
            "predicted",
            "deviation",
            "scaled_deviation",
            "gradient_norm",
            "critical",
            "verdict",
        ],
        rows,
        pass: all_pass,
    })
}

fn cmd_spectrum(s: &Settings, names: &[String]) -> Result<Outcome, UsageError> {
    let specs = s.families(names)?;
    let ds = s.ladder("4..8")?;
    let mut all_pass = true;
    let mut families = Vec::new();
    let mut rows = Vec::new();
    for spec in &specs {
        match ladder(spec.name, &ds) {
            Ok((points, cmp)) => {
                all_pass &= cmp.verdict.passed();
                for p in &points {
                    for r in &p.rows {
                        rows.push(vec![
                            r.family.to_string(),
                            r.d.to_string(),
                            r.value.to_string(),
                            r.multiplicity.to_string(),
                            r.predicted.to_string(),
                            r.deviation.to_string(),
                            format!("{:?}", cmp.verdict),
                        ]);
                    }
                }
                families.push(json!({ "family": spec.name, "comparison": cmp, "points": points }));
            }
            Err(e) => {
                all_pass = false;
                families.push(json!({ "family": spec.name, "error": e.to_string() }));
            }
        }
    }
    let d_max = *ds.last().expect("nonempty ladder");
    let names: Vec<FamilyName> = specs.iter().map(|s| s.name).collect();
    let index_value = match index_value_report(&names, d_max) {
        Ok(r) => to_value(&r),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(Outcome {
        json: envelope(
            "spectrum",
            all_pass,
            json!({ "d": ds, "families": families, "index_value": index_value }),
        ),
        header: vec![
            "family",
            "d",
            "value",
            "multiplicity",
            "predicted",
            "deviation",
            "verdict",
        ],
        rows,
        pass: all_pass,
    })
}

fn coef_strings(cs: &[Coef]) -> Vec<String> {
    cs.iter().map(|c| c.to_string()).collect()
}

fn series_json(series: &[PuiseuxSeries]) -> Value {
    Value::Array(series.iter().map(PuiseuxSeries::to_json).collect())
}

fn series_rows(source: &str, series: &[PuiseuxSeries], rows: &mut Vec<Vec<String>>) {
    for (i, s) in series.iter().enumerate() {
        for (e, c) in s.terms() {
            rows.push(vec![
                source.to_string(),
                i.to_string(),
                e.to_string(),
                c.to_string(),
            ]);
        }
    }
}

fn cmd_puiseux(
    s: &Settings,
    pattern: Option<&str>,
    depth: Option<&str>,
) -> Result<Outcome, UsageError> {
    let kernel = s.kernel()?.unwrap_or(KernelSpec::FROBENIUS);
    let pattern =
        IsotropyPattern::parse(&s.raw("pattern", pattern).unwrap_or_else(|| "DiagSd".into()))?;
    let depth: u32 = match s.raw("depth", depth) {
        None => SEED_DEPTH,
        Some(t) => t
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("depth must be a non-negative integer, got `{t}`")))?,
    };
    let sys = symbolic_restricted_gradient(kernel, pattern)?;
    let n = sys.len();
    let mut pass = true;
    let mut rows = Vec::new();
    let mut candidates = Vec::new();
    let mut continua = Vec::new();
    let mut outside = Vec::new();
    match leading_exponents(&sys, n) {
        Ok(search) => {
            for (k, cand) in search.candidates.iter().enumerate() {
                let tau: Vec<String> = cand.tau.iter().map(|t| t.to_string()).collect();
                let solutions = match leading_coefficients(&sys, cand) {
                    Ok(sols) => sols
                        .iter()
                        .enumerate()
                        .map(|(j, sol)| {
                            let rational: Option<Vec<_>> =
                                sol.iter().map(|c| c.as_rational().cloned()).collect();
                            let mut entry = json!({ "leading": coef_strings(sol) });
                            if let Some(cs) = rational {
                                let seed: Vec<PuiseuxSeries> = cand
                                    .tau
                                    .iter()
                                    .zip(cs)
                                    .map(|(t, c)| PuiseuxSeries::monomial(t.clone(), c))
                                    .collect();
                                match extend_series(&sys, &seed, depth) {
                                    Ok(ext) => {
                                        series_rows(
                                            &format!("candidate{k}.{j}"),
                                            &ext.series,
                                            &mut rows,
                                        );
                                        entry["series"] = series_json(&ext.series);
                                    }
                                    Err(e) => entry["error"] = json!(e.to_string()),
                                }
                            }
                            entry
                        })
                        .collect::<Vec<_>>(),
                    Err(Error::NoRealSolution(m)) => {
                        vec![json!({ "no_real_solution": m })]
                    }
                    Err(e) => {
                        pass = false;
                        vec![json!({ "error": e.to_string() })]
                    }
                };
                candidates.push(json!({ "tau": tau, "solutions": solutions }));
            }
            for c in &search.outside_lattice {
                outside.push(c.tau.iter().map(|t| t.to_string()).collect::<Vec<_>>());
            }
            for c in &search.continua {
                let strs = |v: &[num_rational::BigRational]| {
                    v.iter().map(|t| t.to_string()).collect::<Vec<_>>()
                };
                continua.push(json!({
                    "start": strs(&c.start),
                    "end": c.end.as_deref().map(strs),
                    "direction": strs(&c.direction),
                }));
            }
        }
        Err(e @ Error::TooLarge { .. }) => candidates.push(json!({ "skipped": e.to_string() })),
        Err(e) => {
            pass = false;
            candidates.push(json!({ "error": e.to_string() }));
        }
    }
    let mut branches = Vec::new();
    for name in FamilyName::FROBENIUS_CATALOG
        .iter()
        .chain(FamilyName::GAUSS_CATALOG.iter())
    {
        let spec = FamilySpec::of(*name);
        if spec.kernel != kernel || spec.pattern != pattern {
            continue;
        }
        match catalog_series(*name) {
            Ok(Some(series)) if !series.iter().all(PuiseuxSeries::is_rational) => {
                let min_exp = parse_rational(&format!("-{depth}"))?;
                let series: Vec<PuiseuxSeries> =
                    series.iter().map(|s| s.truncated(&min_exp)).collect();
                series_rows(&name.to_string(), &series, &mut rows);
                branches.push(json!({ "family": name, "series": series_json(&series) }));
            }
            Ok(Some(series)) => {
                let seed: Vec<PuiseuxSeries> = series
                    .iter()
                    .map(|s| match s.leading() {
                        Some((e, Coef::Rational(c))) => {
                            PuiseuxSeries::monomial(e.clone(), c.clone())
                        }
                        _ => PuiseuxSeries::zero(),
                    })
                    .collect();
                match extend_series(&sys, &seed, depth) {
                    Ok(ext) => {
                        series_rows(&name.to_string(), &ext.series, &mut rows);
                        branches
                            .push(json!({ "family": name, "series": series_json(&ext.series) }));
                    }
                    Err(e) => {
                        pass = false;
                        branches.push(json!({ "family": name, "error": e.to_string() }));
                    }
                }
            }
            Ok(None) => {}
            Err(e) => {
                pass = false;
                branches.push(json!({ "family": name, "error": e.to_string() }));
            }
        }
    }
    Ok(Outcome {
        json: envelope(
            "puiseux",
            pass,
            json!({
                "kernel": kernel.name(),
                "pattern": pattern,
                "depth": depth,
                "candidates": candidates,
                "outside_lattice": outside,
                "continua": continua,
                "branches": branches,
            }),
        ),
        header: vec!["source", "coordinate", "exp", "coef"],
        rows,
        pass,
    })
}

fn cmd_radial(
    s: &Settings,
    family: &str,
    r: Option<&str>,
    restarts: Option<&str>,
    ambient: bool,
) -> Result<Outcome, UsageError> {
    let spec = s.families(&[family.to_string()])?.remove(0);
    let ds = s.ladder("4")?;
    let grid = match s.raw("r", r) {
        Some(t) => parse_reals(&t)?,
        None => default_r_grid(),
    };
    let ambient = ambient
        || s.file
            .get("ambient")
            .map(parse_bool)
            .transpose()?
            .unwrap_or(false);
    let opts = s.sphere_options(restarts)?;
    let mut pass = true;
    let mut certs = Vec::new();
    let mut rows = Vec::new();
    for &d in &ds {
        match certify_saddle(&spec, d, &grid, ambient, &opts) {
            Ok(c) => {
                pass &= c.verdict != SaddleVerdict::Inconclusive
                    && c.rows.iter().all(|r| r.residual <= SPHERE_RESIDUAL_TOL);
                for row in &c.rows {
                    rows.push(vec![
                        c.family.to_string(),
                        d.to_string(),
                        row.r.to_string(),
                        row.sphere_value.to_string(),
                        row.deficit.to_string(),
                        opt_f64(c.fitted_order),
                        format!("{:?}", c.verdict),
                    ]);
                }
                certs.push(to_value(&c));
            }
            Err(e) => {
                pass = false;
                certs.push(json!({ "d": d, "error": e.to_string() }));
            }
        }
    }
    Ok(Outcome {
        json: envelope(
            "radial",
            pass,
            json!({ "family": spec.name, "seed": opts.seed, "restarts": opts.restarts, "certificates": certs }),
        ),
        header: vec![
            "family",
            "d",
            "r",
            "sphere_value",
            "deficit",
            "fitted_order",
            "verdict",
        ],
        rows,
        pass,
    })
}

#[derive(Serialize)]
struct SphereRecord {
    family: FamilyName,
    d: usize,
    r: f64,
    value: f64,
    loss: f64,
    deficit: f64,
    residual: f64,
    restart: usize,
    iterations: usize,
}

fn cmd_sphere_min(
    s: &Settings,
    family: &str,
    r: Option<&str>,
    pattern: Option<&str>,
    restarts: Option<&str>,
) -> Result<Outcome, UsageError> {
    let spec = s.families(&[family.to_string()])?.remove(0);
    let ds = s.ladder("4")?;
    let radii = parse_reals(&s.raw("r", r).unwrap_or_else(|| "0.1".into()))?;
    let pattern = match s.raw("pattern", pattern) {
        None => None,
        Some(p) if p.trim().eq_ignore_ascii_case("ambient") => None,
        Some(p) => Some(IsotropyPattern::parse(&p)?),
    };
    let tol = s.tol()?.unwrap_or(SPHERE_RESIDUAL_TOL);
    let opts = s.sphere_options(restarts)?;
    let mut pass = true;
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for &d in &ds {
        let point = match construct(&spec, d) {
            Ok(p) => p,
            Err(e) => {
                pass = false;
                errors.push(json!({ "d": d, "error": e.to_string() }));
                continue;
            }
        };
        for &r in &radii {
            match sphere_min(spec.kernel, &point.w, pattern, r, &opts) {
                Ok(m) => {
                    pass &= m.residual <= tol;
                    records.push(SphereRecord {
                        family: spec.name,
                        d,
                        r,
                        value: m.value,
                        loss: point.loss,
                        deficit: point.loss - m.value,
                        residual: m.residual,
                        restart: m.restart,
                        iterations: m.iterations,
                    });
                }
                Err(e) => {
                    pass = false;
                    errors.push(json!({ "d": d, "r": r, "error": e.to_string() }));
                }
            }
        }
    }
    let rows = records
        .iter()
        .map(|m| {
            vec![
                m.family.to_string(),
                m.d.to_string(),
                m.r.to_string(),
                m.value.to_string(),
                m.loss.to_string(),
                m.deficit.to_string(),
                m.residual.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        json: envelope(
            "sphere-min",
            pass,
            json!({
                "pattern": pattern.map_or_else(|| json!("ambient"), |p| to_value(&p)),
                "seed": opts.seed,
                "restarts": opts.restarts,
                "records": records,
                "errors": errors,
            }),
        ),
        header: vec!["family", "d", "r", "value", "loss", "deficit", "residual"],
        rows,
        pass,
    })
}

fn cmd_report(s: &Settings) -> Result<Outcome, UsageError> {
    let ds = s.ladder("20")?;
    let kernel = s.kernel()?.unwrap_or(KernelSpec::FROBENIUS);
    let catalog: Vec<FamilyName> = if kernel == KernelSpec::FROBENIUS {
        FamilyName::FROBENIUS_CATALOG.to_vec()
    } else {
        FamilyName::GAUSS_CATALOG.to_vec()
    };
    let mut pass = true;
    let mut tables = Vec::new();
    let mut rows = Vec::new();
    for &d in &ds {
        let table = index_value_report(&catalog, d)?;
        for r in &table {
            rows.push(vec![
                r.family.to_string(),
                d.to_string(),
                r.loss.to_string(),
                r.index.to_string(),
                r.loss_over_d.to_string(),
                r.index_over_d2.to_string(),
                r.higher_order_descents.to_string(),
            ]);
        }
        let mut curves = Vec::new();
        let mut connections = Vec::new();
        if d >= 3 {
            for name in CurveName::THEOREM_CURVES {
                match classify_curve(&curve(name, d)?, CURVE_WINDOW) {
                    Ok(c) => curves.push(to_value(&c)),
                    Err(e) => {
                        pass = false;
                        curves.push(json!({ "curve": name, "error": e.to_string() }));
                    }
                }
            }
            let checks = curve_connections(d)?;
            pass &= checks.iter().all(|c| c.holds);
            connections = checks.iter().map(to_value).collect();
        }
        tables.push(
            json!({ "d": d, "index_value": table, "curves": curves, "connections": connections }),
        );
    }
    Ok(Outcome {
        json: envelope(
            "report",
            pass,
            json!({ "kernel": kernel.name(), "tables": tables }),
        ),
        header: vec![
            "family",
            "d",
            "loss",
            "index",
            "loss_over_d",
            "index_over_d2",
            "higher_order_descents",
        ],
        rows,
        pass,
    })
}

fn render(outcome: &Outcome, format: Format) -> Result<Vec<u8>, UsageError> {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&outcome.json).expect("report serializes");
            text.push('\n');
            Ok(text.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&outcome.header)
                .map_err(|e| UsageError(e.to_string()))?;
            for row in &outcome.rows {
                w.write_record(row).map_err(|e| UsageError(e.to_string()))?;
            }
            w.into_inner().map_err(|e| UsageError(e.to_string()))
        }
    }
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let s = Settings { file, cli };
    let format = s.format()?;
    let outcome = match &s.cli.command {
        Command::Verify { families } => cmd_verify(&s, families)?,
        Command::Spectrum { families } => cmd_spectrum(&s, families)?,
        Command::Puiseux { pattern, depth } => {
            cmd_puiseux(&s, pattern.as_deref(), depth.as_deref())?
        }
        Command::Radial {
            family,
            r,
            restarts,
            ambient,
        } => cmd_radial(&s, family, r.as_deref(), restarts.as_deref(), *ambient)?,
        Command::SphereMin {
            family,
            r,
            pattern,
            restarts,
        } => cmd_sphere_min(
            &s,
            family,
            r.as_deref(),
            pattern.as_deref(),
            restarts.as_deref(),
        )?,
        Command::Report => cmd_report(&s)?,
    };
    let bytes = render(&outcome, format)?;
    match s.out() {
        Some(path) => std::fs::write(&path, bytes)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| UsageError(e.to_string()))?,
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
