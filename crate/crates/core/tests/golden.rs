use serde_json::Value;
use symtensor::families::{catalog_series, construct, d1_entry, FamilyName, FamilySpec};
use symtensor::puiseux::{eval_series, Coef, PuiseuxSeries};
use symtensor::symbolic::poly::{q, qf};

const SERIES_FAMILIES: [FamilyName; 5] = [
    FamilyName::C1,
    FamilyName::C2,
    FamilyName::C3,
    FamilyName::D1,
    FamilyName::D2,
];

fn golden(name: FamilyName) -> Value {
    let path = format!("{}/tests/golden/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    serde_json::from_str(&text).unwrap()
}

fn series(name: FamilyName) -> &'static [PuiseuxSeries] {
    catalog_series(name).unwrap().expect("family has a series")
}

#[test]
fn catalog_series_match_golden_files() {
    for name in SERIES_FAMILIES {
        let g = golden(name);
        assert_eq!(g["family"], name.to_string());
        let want = g["series"].as_array().unwrap();
        let got = series(name);
        assert_eq!(got.len(), want.len(), "{name}");
        for (i, (s, w)) in got.iter().zip(want).enumerate() {
            assert_eq!(s.to_json(), *w, "{name} coordinate {i}");
            assert_eq!(
                PuiseuxSeries::from_json(w).unwrap(),
                *s,
                "{name} coordinate {i}"
            );
        }
    }
}

#[test]
fn golden_round_trip_preserves_radicals() {
    let g = golden(FamilyName::D1);
    let s = PuiseuxSeries::from_json(&g["series"][0]).unwrap();
    let (e, c) = s.leading().unwrap();
    assert_eq!(*e, qf(-2, 3));
    assert!(matches!(c, Coef::Radical { index: 3, .. }));
    assert!((c.to_f64() - 0.6_f64.cbrt()).abs() < 1e-15);
}

#[test]
fn c1_series_is_one_over_d() {
    let s = series(FamilyName::C1);
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].terms(), &[(q(-1), Coef::Rational(q(1)))]);
}

#[test]
fn c2_leading_terms() {
    let s = series(FamilyName::C2);
    assert_eq!(s[0].leading().unwrap(), &(q(-1), Coef::Rational(q(-1))));
    assert_eq!(s[1].leading().unwrap(), &(q(-1), Coef::Rational(q(1))));
}

#[test]
fn d1_series_tracks_closed_form() {
    let s = series(FamilyName::D1);
    for d in [8usize, 16, 64, 256] {
        let x = s[0].eval(d as f64);
        let exact = d1_entry(d);
        let df = d as f64;
        assert!(
            ((x - exact) / exact).abs() < 1e-2 * df.powi(-4),
            "d={d}: {x} vs {exact}"
        );
    }
}

#[test]
fn d2_constant_and_vanishing_coordinates() {
    let s = series(FamilyName::D2);
    assert_eq!(s[0].leading().unwrap(), &(q(0), Coef::Rational(q(1))));
    assert!(s[3].is_zero() && s[4].is_zero());
}

#[test]
fn series_agree_with_polished_points() {
    for name in [FamilyName::C2, FamilyName::C3, FamilyName::D2] {
        for d in [16usize, 64] {
            let p = construct(&FamilySpec::of(name), d).unwrap();
            let x = eval_series(series(name), d as f64);
            assert_eq!(x.len(), p.xi.len());
            let dev = x
                .iter()
                .zip(&p.xi)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(dev < 2e3 * (d as f64).powi(-5), "{name} d={d}: {dev:e}");
        }
    }
}
