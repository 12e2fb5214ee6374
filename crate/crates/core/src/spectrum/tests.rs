use super::*;
use crate::bethe::TQVariant;
use crate::identities::SpecialPointConstants;
use crate::model::{species_zero_counter, z_kernel};
use crate::tables::reference_spectrum;
use crate::tensorlinalg::{circle_nodes, fit_scalar_on_circle, horner, relative_residual};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn assert_matches_reference(report: &SpectrumReport, family: BoundaryFamily) {
    let expected = reference_spectrum(family);
    assert_eq!(
        report.eigenvalues.len(),
        expected.len(),
        "{:?}",
        report.eigenvalues
    );
    for (value, mult) in expected {
        let hit = report
            .eigenvalues
            .iter()
            .find(|l| (l.value() - value).norm() <= MATCH_TOLERANCE)
            .unwrap_or_else(|| panic!("{} missing from {:?}", value, report.eigenvalues));
        assert_eq!(hit.multiplicity, mult, "multiplicity of {}", value);
    }
}

#[test]
fn first_model_preset_spectrum_matches_table() {
    let p = ModelParams::paper_a(2);
    let r = markov_spectrum(2, &p, BoundaryFamily::A).unwrap();
    assert_eq!(r.dimension(), 9);
    assert_matches_reference(&r, BoundaryFamily::A);
}

#[test]
fn second_model_preset_spectrum_matches_table() {
    let p = ModelParams::paper_b(2);
    let r = markov_spectrum(2, &p, BoundaryFamily::B).unwrap();
    assert_matches_reference(&r, BoundaryFamily::B);
}

#[test]
fn eigenvalue_sum_is_trace_and_real_parts_nonpositive() {
    use rand::{Rng, SeedableRng};
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for family in BoundaryFamily::ALL {
        for n in 1..=4 {
            for _ in 0..5 {
                let mut draw = || rng.gen_range(0.05..3.0);
                let q = loop {
                    let q: f64 = draw();
                    if (q - 1.0).abs() > 0.05 {
                        break q;
                    }
                };
                let p = ModelParams::homogeneous(q, draw(), draw(), draw(), draw(), n).unwrap();
                let r = markov_spectrum(n, &p, family).unwrap();
                let l = markov_generator(n, &p, family);
                let sum: C = r.expanded().iter().sum();
                let tr = l.trace();
                assert!(
                    (sum - tr).norm() <= 1e-9 * tr.norm().max(1.0),
                    "{family} N{n}: {sum} vs {tr}"
                );
                for v in r.expanded() {
                    assert!(v.re <= 1e-9, "{family} N{n}: eigenvalue {v}");
                }
                assert!(
                    r.eigenvalues.iter().any(|l| l.value().norm() < 1e-8),
                    "stationary eigenvalue"
                );
            }
        }
    }
}

#[test]
fn second_model_conserves_species_zero() {
    for n in 1..=3 {
        let p = ModelParams::paper_b(n);
        let l = markov_generator(n, &p, BoundaryFamily::B);
        let count = species_zero_counter(n);
        assert!(l.commutator(&count).max_abs() < 1e-12);
    }
}

#[test]
fn n_cap_and_length_are_enforced() {
    let p = ModelParams::paper_a(7);
    assert!(matches!(
        markov_spectrum(7, &p, BoundaryFamily::A),
        Err(SpectrumError::TooLarge { .. })
    ));
    let p = ModelParams::paper_a(2);
    assert!(matches!(
        markov_spectrum(3, &p, BoundaryFamily::A),
        Err(SpectrumError::LengthMismatch { .. })
    ));
}

#[test]
fn curves_sum_to_trace_and_agree_with_rediagonalization() {
    for family in BoundaryFamily::ALL {
        let p = ModelParams::preset(family, 2);
        let grid = linear_grid(c(0.2, 0.0), c(2.0, 0.0), 181);
        let curves = transfer_curves(&grid, &p, family, DEFAULT_X0).unwrap();
        assert_eq!(curves.len(), 181);
        for s in &curves {
            assert_eq!(s.values.len(), 9);
            let t = transfer(s.x, &p, family);
            let tr = t.trace();
            let sum: C = s.values.iter().sum();
            assert!(
                (sum - tr).norm() <= 1e-9 * t.max_abs().max(1.0),
                "{family} trace at {}",
                s.x
            );
        }
        for idx in [0, 37, 90, 141, 180] {
            let s = &curves[idx];
            let exact = eigenvalues(&transfer(s.x, &p, family)).unwrap();
            let scale = exact.iter().map(|v| v.norm()).fold(1.0, f64::max);
            assert!(
                crate::identities::multiset_gap(&s.values, &exact) < 1e-8 * scale.max(1.0),
                "{family} spot {idx}"
            );
        }
    }
}

#[test]
fn every_branch_is_a_polynomial_along_the_grid() {
    // eigenvectors are x-independent, so each tracked branch is a degree-(2N+4) polynomial
    for family in BoundaryFamily::ALL {
        let p = ModelParams::preset(family, 2);
        let degree = 2 * 2 + 4;
        let nodes = circle_nodes(degree + 1, 1.5, 0.1);
        let mut grid = nodes.clone();
        grid.extend(linear_grid(c(0.2, 0.0), c(2.0, 0.0), 181));
        let curves = transfer_curves(&grid, &p, family, DEFAULT_X0).unwrap();
        for b in 0..9 {
            let coeffs = fit_scalar_on_circle(
                |x| curves[nodes.iter().position(|n| (n - x).norm() < 1e-12).unwrap()].values[b],
                degree,
                1.5,
                0.1,
            );
            for s in &curves[degree + 1..] {
                let scale = s.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
                let err = (horner(&coeffs, s.x) - s.values[b]).norm() / scale;
                assert!(err < 1e-9, "{family} branch {b} at {}: {err}", s.x);
            }
        }
    }
}

#[test]
fn curves_are_scalar_at_one() {
    let p = ModelParams::paper_a(2);
    let curves = transfer_curves(&[c(1.0, 0.0)], &p, BoundaryFamily::A, DEFAULT_X0).unwrap();
    let e = SpecialPointConstants::new(&p, 1.0);
    let expect = e.e1 * e.e3 * z_kernel(c(1.0, 0.0), &p);
    for v in &curves[0].values {
        assert!(
            (v - expect).norm() <= 1e-9 * expect.norm().max(1.0),
            "{v} vs {expect}"
        );
    }
}

#[test]
fn subspace_tracking_handles_exact_degeneracy() {
    // the second model at N = 2 has a threefold stationary degeneracy in L; τ stays diagonalizable
    let p = ModelParams::paper_b(2);
    let grid = linear_grid(c(0.3, 0.1), c(1.7, -0.2), 20);
    let curves = transfer_curves(&grid, &p, BoundaryFamily::B, DEFAULT_X0).unwrap();
    for s in &curves {
        let t = transfer(s.x, &p, BoundaryFamily::B);
        let exact = eigenvalues(&t).unwrap();
        assert!(crate::identities::multiset_gap(&s.values, &exact) < 1e-8);
    }
}

#[test]
fn curves_for_matches_a_diagonal_family() {
    let d = |x: C| CMatrix::from_diag(&[x, x * x, C::new(2.0, 0.0), C::new(2.0, 0.0)]);
    let grid = linear_grid(c(0.5, 0.0), c(1.5, 0.5), 7);
    let curves = curves_for(d, &grid, c(0.9, 0.3)).unwrap();
    for s in &curves {
        let mut expected = vec![s.x, s.x * s.x, c(2.0, 0.0), c(2.0, 0.0)];
        expected.sort_by(cmp_complex);
        assert!(crate::identities::multiset_gap(&s.values, &expected) < 1e-12);
        assert!(relative_residual(&d(s.x), &d(s.x)) == 0.0);
    }
}

#[test]
fn el_from_roots_examples() {
    let pa = ModelParams::paper_a(2);
    let pb = ModelParams::paper_b(2);
    let e = el_from_roots(TQVariant::A3, &[c(1.6, 1.2)], &pa).unwrap();
    assert!((e - c(-61.4, 0.0)).norm() < MATCH_TOLERANCE, "{e}");
    let e = el_from_roots(TQVariant::B3, &[c(1.1572, -0.6788)], &pb).unwrap();
    assert!((e - c(-5.5301, 0.0)).norm() < MATCH_TOLERANCE, "{e}");
    assert_eq!(
        el_from_roots(TQVariant::B2, &[c(0.3, 0.1)], &pb).unwrap(),
        c(0.0, 0.0)
    );
    let e = el_from_roots(TQVariant::A3, &[], &pa).unwrap();
    assert!((e - c(-56.4, 0.0)).norm() < 1e-12);
    assert!(matches!(
        el_from_roots(TQVariant::A1, &[c(1.0, 0.0)], &pa),
        Err(SpectrumError::InvalidRoots(_))
    ));
    assert!(matches!(
        el_from_roots(TQVariant::A1, &[c(4.0, 0.0)], &pa),
        Err(SpectrumError::InvalidRoots(_))
    ));
    assert!(
        el_from_roots(TQVariant::B1, &[c(0.0, 0.0)], &pb)
            .unwrap()
            .norm()
            == 0.0
    );
}

#[test]
fn csv_has_header_and_full_precision() {
    let p = ModelParams::paper_a(1);
    let grid = linear_grid(c(0.2, 0.0), c(2.0, 0.0), 3);
    let curves = transfer_curves(&grid, &p, BoundaryFamily::A, DEFAULT_X0).unwrap();
    let csv = curves_csv(&curves, DEFAULT_X0, &[]);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with('#'));
    assert_eq!(lines[1], "re_x,im_x,re_L0,im_L0,re_L1,im_L1,re_L2,im_L2");
    assert_eq!(lines.len(), 5);
    let first = lines[2].split(',').next().unwrap();
    assert_eq!(first.parse::<f64>().unwrap(), 0.2);
    assert!(first.contains('e') && first.split('e').next().unwrap().len() >= 18);
}

#[test]
fn report_serializes_with_complex_objects() {
    let p = ModelParams::paper_a(1);
    let r = markov_spectrum(1, &p, BoundaryFamily::A).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert!(v["eigenvalues"][0]["value"]["re"].is_number());
    assert!(v["eigenvalues"][0]["multiplicity"].is_number());
    assert_eq!(v["source"], "markov/A/N1");
}
