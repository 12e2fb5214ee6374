//! Dense complex linear algebra and tensor-product helpers.

mod eigen;
mod lu;
mod matrix;
mod poly;
mod tensor;

pub use eigen::{
    cluster_eigenvalues, cmp_complex, eigen, eigenvalues, EigenDecomposition, DEFECTIVE_THRESHOLD,
};
pub use lu::{invert, solve, Lu, DEFAULT_PIVOT_TOL};
pub use matrix::{relative_residual, CMatrix};
pub use poly::{
    circle_nodes, fit_on_circle, fit_scalar_on_circle, horner, poly_derivative, poly_fit,
    PolyMatrix, DEFAULT_NODE_RADIUS,
};
pub use tensor::{
    apply_left, apply_right, embed, kron, kron_all, partial_trace, partial_transpose, swap_operator,
};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("singular matrix: pivot {pivot:e} at elimination step {step}")]
    Singular { pivot: f64, step: usize },
    #[error("QR iteration did not converge; stuck subdiagonal at row {row} with magnitude {subdiagonal:e}")]
    NoConvergence { row: usize, subdiagonal: f64 },
    #[error("repeated interpolation node {0}")]
    RepeatedNode(Complex64),
    #[error("ill-conditioned Vandermonde system (pivot {0:e})")]
    IllConditioned(f64),
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(n: usize, m: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        CMatrix::from_fn(n, m, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(
            kron(&CMatrix::identity(2), &CMatrix::identity(3)),
            CMatrix::identity(6)
        );
        let q = 4.0;
        let d = CMatrix::from_diag(&[c(1.0, 0.0), c(q, 0.0)]);
        let want = CMatrix::from_diag(&[c(1.0, 0.0), c(q, 0.0), c(q, 0.0), c(q * q, 0.0)]);
        assert_eq!(kron(&d, &d), want);
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b, cc, d) = (
            random(2, 2, &mut rng),
            random(2, 2, &mut rng),
            random(2, 2, &mut rng),
            random(2, 2, &mut rng),
        );
        let lhs = kron(&a, &b).matmul(&kron(&cc, &d));
        let rhs = kron(&a.matmul(&cc), &b.matmul(&d));
        assert!(relative_residual(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn partial_transpose_factorized_and_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (a, b) = (random(3, 3, &mut rng), random(3, 3, &mut rng));
        let m = kron(&a, &b);
        let pt = partial_transpose(&m, &[3, 3], 0).unwrap();
        assert!(relative_residual(&pt, &kron(&a.transpose(), &b)) < 1e-15);
        let back = partial_transpose(&pt, &[3, 3], 0).unwrap();
        assert_eq!(back, m);
        let both = partial_transpose(&pt, &[3, 3], 1).unwrap();
        assert!(relative_residual(&both, &m.transpose()) < 1e-15);
        assert!(partial_transpose(&m, &[2, 3], 0).is_err());
    }

    #[test]
    fn partial_trace_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b) = (random(3, 3, &mut rng), random(3, 3, &mut rng));
        let m = kron(&a, &b);
        let t0 = partial_trace(&m, &[3, 3], &[0]).unwrap();
        assert!(relative_residual(&t0, &b.scale(a.trace())) < 1e-14);
        let t1 = partial_trace(&m, &[3, 3], &[1]).unwrap();
        assert!(relative_residual(&t1, &a.scale(b.trace())) < 1e-14);
        let all = partial_trace(&m, &[3, 3], &[0, 1]).unwrap();
        assert!((all[(0, 0)] - m.trace()).norm() < 1e-13);
        let m2 = random(9, 9, &mut rng);
        let lhs = partial_trace(&(&m + &m2), &[3, 3], &[1]).unwrap();
        let rhs = &partial_trace(&m, &[3, 3], &[1]).unwrap()
            + &partial_trace(&m2, &[3, 3], &[1]).unwrap();
        assert!(relative_residual(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn local_application_matches_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dims = [3, 2, 3];
        let op = random(9, 9, &mut rng);
        let m = random(18, 18, &mut rng);
        // sites listed out of order: op's first factor is site 2
        let sites = [2, 0];
        let full = embed(&op, &sites, &dims).unwrap();
        let l = apply_left(&op, &sites, &dims, &m).unwrap();
        let r = apply_right(&m, &op, &sites, &dims).unwrap();
        assert!(relative_residual(&l, &full.matmul(&m)) < 1e-14);
        assert!(relative_residual(&r, &m.matmul(&full)) < 1e-14);
        // explicit construction through the swap: op on (2,0) = S (I ⊗ op on (0,2)) S
        let e02 = embed(&op, &[0, 2], &dims).unwrap();
        let sw = |k: usize| {
            let (i0, i1, i2) = (k / 6, (k / 3) % 2, k % 3);
            i2 * 6 + i1 * 3 + i0
        };
        let s = CMatrix::from_fn(
            18,
            18,
            |i, j| if sw(i) == j { c(1.0, 0.0) } else { c(0.0, 0.0) },
        );
        assert!(relative_residual(&full, &s.matmul(&e02).matmul(&s)) < 1e-14);
    }

    #[test]
    fn kron_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, b, d) = (
            random(2, 3, &mut rng),
            random(3, 2, &mut rng),
            random(2, 2, &mut rng),
        );
        let l = kron(&kron(&a, &b), &d);
        let r = kron(&a, &kron(&b, &d));
        assert!((&l - &r).max_abs() < 1e-12);
    }

    #[test]
    fn invert_cases() {
        assert_eq!(invert(&CMatrix::identity(3)).unwrap(), CMatrix::identity(3));
        let d = invert(&CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 4.0]])).unwrap();
        assert!(
            relative_residual(&d, &CMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.25]])) < 1e-16
        );
        let s = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        match invert(&s) {
            Err(LinalgError::Singular { pivot, .. }) => assert!(pivot < 1e-12),
            other => panic!("expected singular error, got {:?}", other),
        }
    }

    #[test]
    fn eigen_diagonal_and_jordan() {
        let d = CMatrix::from_diag(&[c(2.0, 3.0), c(1.0, 0.0)]);
        let e = eigen(&d).unwrap();
        assert_eq!(e.values, vec![c(1.0, 0.0), c(2.0, 3.0)]);
        assert!(!e.any_defective());
        let j = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = eigen(&j).unwrap();
        assert!(e.values.iter().all(|v| v.norm() < 1e-15));
        assert!(e.defective.iter().all(|&f| f));
    }

    fn check_decomposition(m: &CMatrix) {
        let e = eigen(m).unwrap();
        let norm = m.frobenius_norm();
        for k in 0..e.len() {
            let lam = e.values[k];
            let v = &e.right[k];
            let mv = m.matvec(v);
            let r: f64 = mv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - lam * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-9 * norm, "right residual {r}");
            let w = &e.left[k];
            let wm = m.adjoint().matvec(w);
            let r: f64 = wm
                .iter()
                .zip(w)
                .map(|(a, b)| (a - lam.conj() * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-9 * norm, "left residual {r}");
        }
        let s: Complex64 = e.values.iter().sum();
        assert!((s - m.trace()).norm() < 1e-9 * norm.max(1.0));
        let vals = eigenvalues(m).unwrap();
        for (a, b) in vals.iter().zip(&e.values) {
            assert!((a - b).norm() < 1e-8 * norm);
        }
    }

    #[test]
    fn eigen_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for &n in &[1usize, 2, 3, 5, 10, 27, 60] {
            let m = random(n, n, &mut rng);
            check_decomposition(&m);
        }
    }

    #[test]
    fn eigen_badly_scaled() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 12;
        let base = random(n, n, &mut rng);
        let m = CMatrix::from_fn(n, n, |i, j| base[(i, j)] * 10f64.powi(i as i32 - j as i32));
        check_decomposition(&m);
    }

    #[test]
    fn eigen_biorthogonal_for_distinct_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random(8, 8, &mut rng);
        let e = eigen(&m).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    let ip: Complex64 = e.left[i]
                        .iter()
                        .zip(&e.right[j])
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    assert!(ip.norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn cluster_counts() {
        let v = vec![c(-1.0, 0.0), c(-1.0 + 1e-12, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        let cl = cluster_eigenvalues(&v, 1e-7);
        assert_eq!(cl.iter().map(|x| x.1).collect::<Vec<_>>(), vec![2, 1, 1]);
    }

    #[test]
    fn poly_fit_small_cases() {
        let k = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let samples: Vec<_> = [c(0.5, 0.0), c(1.0, 1.0), c(-2.0, 0.3)]
            .iter()
            .map(|&x| (x, k.clone()))
            .collect();
        let p = poly_fit(&samples, 0).unwrap();
        assert_eq!(p.degree(), 0);
        assert!(relative_residual(p.coefficient(0), &k) < 1e-14);

        let samples = vec![
            (c(1.0, 0.0), CMatrix::identity(2)),
            (c(2.0, 0.0), CMatrix::identity(2).scale_real(2.0)),
        ];
        let p = poly_fit(&samples, 1).unwrap();
        assert!(p.coefficient(0).max_abs() < 1e-14);
        assert!(relative_residual(p.coefficient(1), &CMatrix::identity(2)) < 1e-14);

        let dup = vec![
            (c(1.0, 0.0), CMatrix::identity(1)),
            (c(1.0, 0.0), CMatrix::identity(1)),
        ];
        assert!(matches!(
            poly_fit(&dup, 1),
            Err(LinalgError::RepeatedNode(_))
        ));
    }

    #[test]
    fn poly_derivative_cases() {
        let p = PolyMatrix::new(vec![CMatrix::identity(2).scale_real(5.0)]).unwrap();
        assert_eq!(poly_derivative(&p, c(3.0, 0.0)).max_abs(), 0.0);
        let z = CMatrix::zeros(2, 2);
        let p = PolyMatrix::new(vec![z.clone(), z, CMatrix::identity(2)]).unwrap();
        let d = poly_derivative(&p, c(3.0, 0.0));
        assert!(relative_residual(&d, &CMatrix::identity(2).scale_real(6.0)) < 1e-15);
    }

    #[test]
    fn circle_fit_reproduces_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let coeffs: Vec<CMatrix> = (0..13).map(|_| random(2, 2, &mut rng)).collect();
        let truth = PolyMatrix::new(coeffs).unwrap();
        let fit = fit_on_circle(|x| Ok(truth.evaluate(x)), 12, DEFAULT_NODE_RADIUS, 0.0).unwrap();
        for k in 0..13 {
            assert!(relative_residual(fit.coefficient(k), truth.coefficient(k)) < 1e-12);
        }
        let samples: Vec<_> = circle_nodes(13, 1.5, 0.2)
            .into_iter()
            .map(|x| (x, truth.evaluate(x)))
            .collect();
        let fit2 = poly_fit(&samples, 12).unwrap();
        for (x, v) in &samples {
            assert!(relative_residual(&fit2.evaluate(*x), v) < 1e-10);
        }
    }
}
