use num_rational::BigRational;
use symtensor::puiseux::{
    extend_series, jacobian_nonsingular_check, leading_coefficients, leading_exponents,
    reduce_invariant_subsystem, residual_exponent, seed_to_numeric, Coef, ExponentCandidate,
    PuiseuxSeries,
};
use symtensor::symbolic::poly::{q, qf};
use symtensor::symbolic::symbolic_restricted_gradient;
use symtensor::symmetry::IsotropyPattern;
use symtensor::KernelSpec;

fn tau(v: &[(i64, i64)]) -> ExponentCandidate {
    ExponentCandidate {
        tau: v.iter().map(|&(a, b)| qf(a, b)).collect(),
    }
}

fn mono(e: i64, c: BigRational) -> PuiseuxSeries {
    PuiseuxSeries::monomial(q(e), c)
}

#[test]
fn frobenius_diagonal_exponents() {
    let sys = symbolic_restricted_gradient(KernelSpec::FROBENIUS, IsotropyPattern::DiagSd).unwrap();
    let s = leading_exponents(&sys, 2).unwrap();
    assert_eq!(
        s.candidates,
        vec![tau(&[(-1, 1), (-1, 1)]), tau(&[(0, 1), (-3, 4)])]
    );
    assert!(s.outside_lattice.is_empty());
    let a = leading_coefficients(&sys, &tau(&[(-1, 1), (-1, 1)])).unwrap();
    let r = |x| Coef::Rational(q(x));
    assert_eq!(a, vec![vec![r(-1), r(1)], vec![r(1), r(1)]]);
    assert!(matches!(
        leading_coefficients(&sys, &tau(&[(0, 1), (-3, 4)])),
        Err(symtensor::Error::NoRealSolution(_))
    ));
}

#[test]
fn gauss_diagonal_exponents() {
    let sys =
        symbolic_restricted_gradient(KernelSpec::CubicGaussian, IsotropyPattern::DiagSd).unwrap();
    let s = leading_exponents(&sys, 2).unwrap();
    assert_eq!(
        s.candidates,
        vec![
            tau(&[(-2, 3), (-2, 3)]),
            tau(&[(-1, 6), (-2, 3)]),
            tau(&[(0, 1), (-1, 1)])
        ]
    );
    assert!(!s.continua.is_empty());
    let r = Coef::Radical {
        coef: q(1),
        radicand: qf(3, 5),
        index: 3,
    };
    let a = leading_coefficients(&sys, &s.candidates[0]).unwrap();
    assert_eq!(a, vec![vec![r.clone(), r]]);
    for c in &s.candidates[1..] {
        assert!(matches!(
            leading_coefficients(&sys, c),
            Err(symtensor::Error::NoRealSolution(_))
        ));
    }
}

#[test]
fn gauss_full_leading_coefficient() {
    let sys =
        symbolic_restricted_gradient(KernelSpec::CubicGaussian, IsotropyPattern::Full).unwrap();
    let s = leading_exponents(&sys, 1).unwrap();
    assert_eq!(s.candidates, vec![tau(&[(-2, 3)])]);
    let a = leading_coefficients(&sys, &s.candidates[0]).unwrap();
    assert_eq!(
        a,
        vec![vec![Coef::Radical {
            coef: q(1),
            radicand: qf(3, 5),
            index: 3
        }]]
    );
}

#[test]
fn c3_series() {
    let sys =
        symbolic_restricted_gradient(KernelSpec::FROBENIUS, IsotropyPattern::DiagSd1).unwrap();
    let seed = vec![
        mono(-1, q(-1)),
        mono(-1, q(1)),
        PuiseuxSeries::zero(),
        PuiseuxSeries::zero(),
        mono(0, q(1)),
    ];
    let red = reduce_invariant_subsystem(&sys, &seed).unwrap();
    assert_eq!(red.zeroed, vec![2, 3]);
    let ext = extend_series(&sys, &seed, 4).unwrap();
    let want1 = [
        (-1, qf(-1, 1)),
        (-2, qf(-13, 3)),
        (-3, qf(-77, 9)),
        (-4, qf(6421, 81)),
    ];
    let want2 = [
        (-1, qf(1, 1)),
        (-2, qf(13, 3)),
        (-3, qf(149, 9)),
        (-4, qf(2867, 81)),
    ];
    for (e, c) in want1 {
        assert_eq!(ext.series[0].coeff(&q(e)), Coef::Rational(c));
    }
    for (e, c) in want2 {
        assert_eq!(ext.series[1].coeff(&q(e)), Coef::Rational(c));
    }
    let x = seed_to_numeric(&ext.series, 10);
    assert_eq!(x.len(), 5);
    let res = residual_exponent(&sys, &ext.series).unwrap();
    assert!(res.as_ref().is_none_or(|e| *e < q(-4)), "{res:?}");
    let chk = jacobian_nonsingular_check(&sys, &ext.series, &[1, 1, 1, 1, 1]).unwrap();
    assert!(chk.initial_conditions_hold, "{chk:?}");
}

#[test]
fn d2_series() {
    let sys =
        symbolic_restricted_gradient(KernelSpec::CubicGaussian, IsotropyPattern::DiagSd1).unwrap();
    let seed = vec![
        mono(0, q(1)),
        mono(-3, q(-1)),
        mono(-1, q(1)),
        PuiseuxSeries::zero(),
        PuiseuxSeries::zero(),
    ];
    let ext = extend_series(&sys, &seed, 4).unwrap();
    let want = [
        (0, [(0, qf(1, 1)), (-3, qf(-5, 3)), (-4, qf(9, 1))].to_vec()),
        (1, [(-3, qf(-1, 1)), (-4, qf(7, 1))].to_vec()),
        (
            2,
            [
                (-1, qf(1, 1)),
                (-2, qf(-1, 1)),
                (-3, qf(2, 1)),
                (-4, qf(10, 3)),
            ]
            .to_vec(),
        ),
    ];
    for (i, terms) in want {
        for (e, c) in terms {
            assert_eq!(
                ext.series[i].coeff(&q(e)),
                Coef::Rational(c),
                "ξ{} d^{e}",
                i + 1
            );
        }
    }
}
