use asep2_core::bethe::{q_eval, QKind};
use asep2_core::fusion::transfer;
use asep2_core::model::{
    boundary_builder, markov_generator, single_species_boundary, BoundaryFamily, BuilderRule,
    ModelParams,
};
use asep2_core::tensorlinalg::CMatrix;
use asep2_core::Complex64;
use proptest::prelude::*;

fn max_column_sum(m: &CMatrix) -> f64 {
    (0..m.cols())
        .map(|j| m.column(j).iter().sum::<Complex64>().norm())
        .fold(0.0, f64::max)
}

fn rate() -> impl Strategy<Value = f64> {
    0.05f64..2.0
}

fn q_value() -> impl Strategy<Value = f64> {
    prop_oneof![0.2f64..0.9, 1.1f64..3.0]
}

fn family() -> impl Strategy<Value = BoundaryFamily> {
    prop_oneof![Just(BoundaryFamily::A), Just(BoundaryFamily::B)]
}

fn point() -> impl Strategy<Value = Complex64> {
    (0.3f64..2.0, -0.8f64..0.8).prop_map(|(r, i)| Complex64::new(r, i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generators_are_stochastic(q in q_value(), a in rate(), b in rate(), c in rate(), d in rate(), n in 1usize..4, f in family()) {
        let p = ModelParams::homogeneous(q, a, b, c, d, n).unwrap();
        let l = markov_generator(n, &p, f);
        prop_assert!(max_column_sum(&l) < 1e-12 * l.max_abs());
        for i in 0..l.rows() {
            for j in 0..l.cols() {
                if i != j {
                    prop_assert!(l[(i, j)].re >= 0.0 && l[(i, j)].im == 0.0);
                }
            }
        }
    }

    #[test]
    fn transfer_matrices_commute(q in q_value(), a in rate(), b in rate(), c in rate(), d in rate(), x in point(), y in point(), f in family()) {
        let p = ModelParams::homogeneous(q, a, b, c, d, 2).unwrap();
        let (tx, ty) = (transfer(x, &p, f), transfer(y, &p, f));
        let scale = tx.frobenius_norm() * ty.frobenius_norm();
        prop_assert!(tx.commutator(&ty).frobenius_norm() < 1e-11 * scale);
    }

    #[test]
    fn q_functions_are_reflection_invariant(q in q_value(), roots in prop::collection::vec(point(), 1..4), x in point(), second in any::<bool>()) {
        let (kind, pair) = if second { (QKind::Q2, q * q) } else { (QKind::Q1, q) };
        let reflected: Vec<Complex64> = roots.iter().map(|r| pair / r).collect();
        let a = q_eval(kind, &roots, x, q).unwrap();
        let b = q_eval(kind, &reflected, x, q).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn builder_keeps_columns_summing_to_zero(q in q_value(), a in rate(), c in rate(), a2 in rate(), c2 in rate(), steps in prop::collection::vec(0u8..3, 1..4)) {
        let mut m = single_species_boundary(q, a, c);
        for s in steps {
            let rule = match s {
                0 => BuilderRule::ZeroExtend,
                1 => BuilderRule::AppendSingle { alpha: a2, gamma: c2 },
                _ => BuilderRule::CoupleHead { alpha_p: a2, gamma_p: c2 },
            };
            m = boundary_builder(&m, q, rule).unwrap();
            prop_assert!(max_column_sum(&m) < 1e-12 * m.max_abs().max(1.0));
        }
    }

    #[test]
    fn invalid_parameters_are_rejected(q in -2.0f64..=0.0, a in rate()) {
        prop_assert!(ModelParams::homogeneous(q, a, a, a, a, 2).is_err());
        prop_assert!(ModelParams::homogeneous(1.0, a, a, a, a, 2).is_err());
        prop_assert!(ModelParams::homogeneous(2.0, -a, a, a, a, 2).is_err());
    }
}
