use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symtensor::calculus::{fd_check_gradient, fd_check_hessian, gradient, hessian};
use symtensor::families::{construct, FamilyName, FamilySpec};
use symtensor::spectra::{higher_order_descents, index_value_report, predicted, spectrum};
use symtensor::symmetry::{
    act, act_stacked, default_isotropy_tol, isotropy_group, match_pattern, orbit_length, PermPair,
};
use symtensor::tensor::{loss, loss_dense_oracle};
use symtensor::{KernelSpec, WeightMatrix};

const D: usize = 4;
const KERNELS: [KernelSpec; 2] = [KernelSpec::FROBENIUS, KernelSpec::CubicGaussian];

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn matrix(k: usize, d: usize) -> impl Strategy<Value = WeightMatrix> {
    prop::collection::vec(-1.0f64..1.0, k * d)
        .prop_map(move |v| WeightMatrix::new(k, d, v).unwrap())
}

fn pair(k: usize, d: usize) -> impl Strategy<Value = PermPair> {
    (perm(k), perm(d)).prop_map(|(r, c)| PermPair::new(r, c).unwrap())
}

/// Index map of the action on stacked coordinates: `out[a] = src`.
fn stacked_perm(sigma: &PermPair) -> Vec<usize> {
    let n = sigma.rows.len() * sigma.cols.len();
    let ids: Vec<f64> = (0..n).map(|a| a as f64).collect();
    act_stacked(sigma, &ids)
        .into_iter()
        .map(|x| x as usize)
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn loss_is_invariant(w in matrix(D, D), s in pair(D, D)) {
        for k in KERNELS {
            let sw = act(&s, &w).unwrap();
            prop_assert!(rel(loss(k, &sw), loss(k, &w)) <= 1e-10);
        }
    }

    #[test]
    fn loss_is_invariant_for_rectangular_weights(w in matrix(3, 5), s in pair(3, 5)) {
        for k in KERNELS {
            prop_assert!(rel(loss(k, &act(&s, &w).unwrap()), loss(k, &w)) <= 1e-10);
        }
    }

    #[test]
    fn gradient_is_equivariant(w in matrix(D, D), s in pair(D, D)) {
        for k in KERNELS {
            let g = gradient(k, &w);
            let gs = gradient(k, &act(&s, &w).unwrap());
            let moved = act_stacked(&s, &g);
            let scale = 1.0 + g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (a, b) in gs.iter().zip(&moved) {
                prop_assert!((a - b).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn hessian_is_equivariant(w in matrix(D, D), s in pair(D, D)) {
        let p = stacked_perm(&s);
        for k in KERNELS {
            let h = hessian(k, &w);
            let hs = hessian(k, &act(&s, &w).unwrap());
            let scale = 1.0 + h.max_abs();
            for r in 0..p.len() {
                for c in 0..p.len() {
                    prop_assert!((hs.get(r, c) - h.get(p[r], p[c])).abs() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn dense_oracle_agrees(d in 1usize..=8, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = WeightMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        for k in KERNELS {
            let fast = loss(k, &w);
            let dense = loss_dense_oracle(k, &w).unwrap();
            prop_assert!((fast - dense).abs() <= 1e-10 * (1.0 + dense.abs()), "{k:?} d={d}: {fast} vs {dense}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn derivatives_match_finite_differences(w in matrix(D, D)) {
        for k in KERNELS {
            prop_assert!(fd_check_gradient(k, &w, 1e-6).unwrap() <= 1e-5);
            prop_assert!(fd_check_hessian(k, &w, 1e-5).unwrap() <= 1e-4);
        }
    }
}

fn all_families() -> Vec<FamilyName> {
    let mut v = FamilyName::FROBENIUS_CATALOG.to_vec();
    v.extend(FamilyName::GAUSS_CATALOG);
    v.push(FamilyName::C5t(0.7));
    v
}

#[test]
fn multiplicity_budgets_fill_the_hessian() {
    for name in all_families() {
        let lo = match name {
            FamilyName::C3 | FamilyName::D2 => 4,
            _ => 3,
        };
        for d in lo..lo + 5 {
            let Ok(p) = predicted(name, d) else { continue };
            assert_eq!(p.total_multiplicity(), d * d, "{name} d={d}");
            let poly_sum: f64 = p
                .entries
                .iter()
                .map(|e| e.mult_poly.eval_f64(d as f64))
                .sum();
            assert_eq!(poly_sum, (d * d) as f64, "{name} d={d}");
        }
    }
}

#[test]
fn multiplicity_polynomials_sum_to_d_squared() {
    for name in [
        FamilyName::CI,
        FamilyName::C1,
        FamilyName::C2,
        FamilyName::C4,
        FamilyName::DI,
    ] {
        let entries = predicted(name, 8).unwrap().entries;
        for x in [0.5f64, 1.5, 7.0, 100.0, 1e4] {
            let s: f64 = entries.iter().map(|e| e.mult_poly.eval_f64(x)).sum();
            assert!((s - x * x).abs() <= 1e-9 * x * x, "{name} at {x}: {s}");
        }
    }
}

#[test]
fn orbits_are_consistent_under_the_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in [
        FamilyName::CI,
        FamilyName::C1,
        FamilyName::C4,
        FamilyName::C5t(0.7),
        FamilyName::Cblock(2),
    ] {
        let w = construct(&FamilySpec::of(name), D).unwrap().w;
        let n = orbit_length(&w).unwrap();
        let g = isotropy_group(&w, default_isotropy_tol(&w)).unwrap().len();
        for _ in 0..10 {
            let s = PermPair::random(D, D, &mut rng);
            let sw = act(&s, &w).unwrap();
            assert_eq!(orbit_length(&sw).unwrap(), n, "{name}");
            let gs = isotropy_group(&sw, default_isotropy_tol(&sw)).unwrap();
            assert_eq!(gs.len(), g, "{name}");
            for h in &gs {
                let back = s.inverse().compose(h).compose(&s);
                assert!(act(&back, &w).unwrap().max_abs_diff(&w) <= 1e-12, "{name}");
            }
        }
    }
}

#[test]
fn isotropy_matches_the_family_pattern() {
    for name in all_families() {
        let spec = FamilySpec::of(name);
        let lo = spec.pattern.min_dim().max(name.min_d()).max(3);
        for d in lo..=6 {
            let w = construct(&spec, d).unwrap().w;
            for g in spec.pattern.generators(d).unwrap() {
                assert!(
                    act(&g, &w).unwrap().max_abs_diff(&w) <= 1e-9,
                    "{name} d={d}"
                );
            }
            if matches!(name, FamilyName::Cblock(i) if i >= 2) {
                continue;
            }
            let group = isotropy_group(&w, default_isotropy_tol(&w)).unwrap();
            let order = spec.pattern.order(d).unwrap();
            if name == FamilyName::C4 {
                // the half block also admits independent row and column swaps
                assert_eq!(group.len() as u128, 2 * order, "d={d}");
                continue;
            }
            assert_eq!(group.len() as u128, order, "{name} d={d}");
            assert_eq!(match_pattern(&group), Some(spec.pattern), "{name} d={d}");
        }
    }
}

#[test]
fn c4_orbit_length() {
    for d in 4..=6 {
        let w = construct(&FamilySpec::of(FamilyName::C4), d).unwrap().w;
        let fact: u128 = (1..=d as u128).product();
        assert_eq!(
            orbit_length(&w).unwrap(),
            (d * (d - 1)) as u128 * fact / 4,
            "d={d}"
        );
    }
}

#[test]
fn index_structure_of_exact_families() {
    for d in 3..=7 {
        let index = |name| {
            let w = construct(&FamilySpec::of(name), d).unwrap().w;
            spectrum(KernelSpec::FROBENIUS, &w, None).unwrap().index
        };
        assert_eq!(index(FamilyName::C1), d * d - d, "d={d}");
        assert_eq!(index(FamilyName::C4), 2, "d={d}");
        assert_eq!(index(FamilyName::C5t(0.0)), 0, "d={d}");
        assert_eq!(index(FamilyName::CI), 0, "d={d}");
    }
}

#[test]
fn loss_orders_like_index_plus_descents() {
    for d in [8usize, 10] {
        let rows = index_value_report(&FamilyName::FROBENIUS_CATALOG, d).unwrap();
        for a in &rows {
            for b in &rows {
                let sa = a.index + higher_order_descents(a.family, d);
                let sb = b.index + higher_order_descents(b.family, d);
                if a.loss < b.loss - 1e-9 {
                    assert!(
                        sa < sb,
                        "d={d}: {} ({}, {sa}) vs {} ({}, {sb})",
                        a.family,
                        a.loss,
                        b.family,
                        b.loss
                    );
                }
            }
        }
    }
}
