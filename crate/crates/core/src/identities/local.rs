use num_complex::Complex64;

use super::{sample_pair, sample_point, CheckConfig, CheckReport};
use crate::fusion::Boundary;
use crate::model::{
    multispecies_k_minus, r_matrix_q, r_tilde_q, u_matrix, BoundaryFamily, ModelParams,
    MultiKVariant, ScalarKernels,
};
use crate::tensorlinalg::{
    embed, invert, partial_transpose, relative_residual, swap_operator, CMatrix,
};

type C = Complex64;

fn swapped(m: &CMatrix, d: usize) -> CMatrix {
    let p = swap_operator(d);
    p.matmul(m).matmul(&p)
}

/// `R₁₂(x/y)R₁₃(x)R₂₃(y) = R₂₃(y)R₁₃(x)R₁₂(x/y)` for an arbitrary R of local dimension `d`.
pub fn check_ybe_with(
    name: &str,
    r: &dyn Fn(C) -> CMatrix,
    d: usize,
    q: f64,
    cfg: &CheckConfig,
) -> CheckReport {
    let mut rng = cfg.rng_for(name);
    let dims = [d, d, d];
    let mut worst: f64 = 0.0;
    let mut pts = Vec::new();
    for _ in 0..cfg.trials {
        let (x, y) = sample_pair(&mut rng, q);
        pts.extend([x, y]);
        let r12 = embed(&r(x / y), &[0, 1], &dims).expect("dims");
        let r13 = embed(&r(x), &[0, 2], &dims).expect("dims");
        let r23 = embed(&r(y), &[1, 2], &dims).expect("dims");
        let lhs = r12.matmul(&r13).matmul(&r23);
        let rhs = r23.matmul(&r13).matmul(&r12);
        worst = worst.max(relative_residual(&lhs, &rhs));
    }
    CheckReport::new(name, &pts, worst, cfg.tolerance)
}

/// Yang-Baxter equation for the rank-m R-matrix.
pub fn check_ybe(params: &ModelParams, m: usize, cfg: &CheckConfig) -> CheckReport {
    let q = params.q();
    check_ybe_with(
        &format!("ybe/rank{}", m),
        &|x| r_matrix_q(x, q, m),
        m + 1,
        q,
        cfg,
    )
}

/// Initial condition, unitarity and both placements of crossing unitarity.
pub fn check_r_properties(params: &ModelParams, cfg: &CheckConfig) -> CheckReport {
    let name = format!("r-properties/q{}", params.q());
    let q = params.q();
    let k = ScalarKernels::new(params);
    let r = |x: C| r_matrix_q(x, q, 2);
    let mut worst = relative_residual(&r(C::new(1.0, 0.0)), &swap_operator(3).scale_real(q - 1.0));
    let dims = [3, 3];
    let u = u_matrix(q);
    let uinv = invert(&u).expect("U is diagonal and nonsingular");
    let u1 = embed(&u, &[0], &dims).expect("dims");
    let u1inv = embed(&uinv, &[0], &dims).expect("dims");
    let u2 = embed(&u, &[1], &dims).expect("dims");
    let u2inv = embed(&uinv, &[1], &dims).expect("dims");
    let mut rng = cfg.rng_for(&name);
    let mut pts = Vec::new();
    for _ in 0..cfg.trials {
        let x = sample_point(&mut rng, q);
        pts.push(x);
        let unit = r(x).matmul(&swapped(&r(1.0 / x), 3));
        worst = worst.max(relative_residual(
            &unit,
            &CMatrix::scalar_identity(9, k.rho1(x)),
        ));
        let rt12 = partial_transpose(&r(x), &dims, 0).expect("dims");
        let rt21 = partial_transpose(&swapped(&r(q.powi(3) / x), 3), &dims, 0).expect("dims");
        let rho = CMatrix::scalar_identity(9, k.rho2(x));
        let c2 = u2inv.matmul(&rt12).matmul(&u2).matmul(&rt21);
        let c1 = u1inv.matmul(&rt12).matmul(&u1).matmul(&rt21);
        worst = worst
            .max(relative_residual(&c2, &rho))
            .max(relative_residual(&c1, &rho));
    }
    CheckReport::new(name, &pts, worst, cfg.tolerance)
}

/// `R₁₂(x₁/x₂)K₁(x₁)R₂₁(x₁x₂)K₂(x₂) = K₂(x₂)R₁₂(x₁x₂)K₁(x₁)R₂₁(x₁/x₂)`.
pub fn check_re_with(
    name: &str,
    r: &dyn Fn(C) -> CMatrix,
    k: &dyn Fn(C) -> CMatrix,
    d: usize,
    q: f64,
    cfg: &CheckConfig,
) -> CheckReport {
    let mut rng = cfg.rng_for(name);
    let dims = [d, d];
    let mut worst: f64 = 0.0;
    let mut pts = Vec::new();
    for _ in 0..cfg.trials {
        let (x1, x2) = sample_pair(&mut rng, q);
        pts.extend([x1, x2]);
        let k1 = embed(&k(x1), &[0], &dims).expect("dims");
        let k2 = embed(&k(x2), &[1], &dims).expect("dims");
        let lhs = r(x1 / x2)
            .matmul(&k1)
            .matmul(&swapped(&r(x1 * x2), d))
            .matmul(&k2);
        let rhs = k2
            .matmul(&r(x1 * x2))
            .matmul(&k1)
            .matmul(&swapped(&r(x1 / x2), d));
        worst = worst.max(relative_residual(&lhs, &rhs));
    }
    CheckReport::new(name, &pts, worst, cfg.tolerance)
}

/// `R₁₂(x₁/x₂)K⁺₁(x₂)R̃₁₂(x₁x₂)K⁺₂(x₁) = K⁺₂(x₁)R̃₂₁(x₁x₂)K⁺₁(x₂)R₂₁(x₁/x₂)`.
pub fn check_dual_re_with(
    name: &str,
    r: &dyn Fn(C) -> CMatrix,
    r_tilde: &dyn Fn(C) -> CMatrix,
    k: &dyn Fn(C) -> CMatrix,
    q: f64,
    cfg: &CheckConfig,
) -> CheckReport {
    let mut rng = cfg.rng_for(name);
    let dims = [3, 3];
    let mut worst: f64 = 0.0;
    let mut pts = Vec::new();
    for _ in 0..cfg.trials {
        let (x1, x2) = sample_pair(&mut rng, q);
        pts.extend([x1, x2]);
        let k1 = embed(&k(x2), &[0], &dims).expect("dims");
        let k2 = embed(&k(x1), &[1], &dims).expect("dims");
        let lhs = r(x1 / x2).matmul(&k1).matmul(&r_tilde(x1 * x2)).matmul(&k2);
        let rhs = k2
            .matmul(&swapped(&r_tilde(x1 * x2), 3))
            .matmul(&k1)
            .matmul(&swapped(&r(x1 / x2), 3));
        worst = worst.max(relative_residual(&lhs, &rhs));
    }
    CheckReport::new(name, &pts, worst, cfg.tolerance)
}

pub fn check_re(params: &ModelParams, family: BoundaryFamily, cfg: &CheckConfig) -> CheckReport {
    let q = params.q();
    check_re_with(
        &format!("re/{}", family),
        &|x| r_matrix_q(x, q, 2),
        &|x| crate::model::k_minus(x, params, family),
        3,
        q,
        cfg,
    )
}

pub fn check_dual_re(
    params: &ModelParams,
    family: BoundaryFamily,
    cfg: &CheckConfig,
) -> CheckReport {
    let q = params.q();
    check_dual_re_with(
        &format!("dual-re/{}", family),
        &|x| r_matrix_q(x, q, 2),
        &|x| r_tilde_q(x, q),
        &|x| crate::model::k_plus(x, params, family),
        q,
        cfg,
    )
}

/// Rank-m reflection equation for a multi-species K⁻.
pub fn check_multispecies_re(
    params: &ModelParams,
    variant: MultiKVariant,
    cfg: &CheckConfig,
) -> CheckReport {
    let q = params.q();
    let name = format!("re/multispecies/{:?}/m{}", variant.kind, variant.m);
    if multispecies_k_minus(C::new(0.5, 0.5), params, variant).is_err() {
        return CheckReport::failed(name, &[], cfg.tolerance);
    }
    let k = |x: C| multispecies_k_minus(x, params, variant).expect("validated above");
    check_re_with(
        &name,
        &|x| r_matrix_q(x, q, variant.m),
        &k,
        variant.m + 1,
        q,
        cfg,
    )
}

/// Special values and inversion relations of K± (the second model uses its own constants and `h̄₂`).
pub fn check_k_properties(
    params: &ModelParams,
    family: BoundaryFamily,
    b: &dyn Boundary,
    cfg: &CheckConfig,
) -> CheckReport {
    let name = format!("k-properties/{}", family);
    let q = params.q();
    let sk = ScalarKernels::new(params);
    let (a, be, g, d, e1, e2) = (sk.alpha, sk.beta, sk.gamma, sk.delta, sk.eta1, sk.eta2);
    let u = u_matrix(q);
    let uinv = invert(&u).expect("U is diagonal and nonsingular");
    let mut worst: f64 = 0.0;
    let mut pts = Vec::new();
    for s in [1.0, -1.0] {
        let x = C::new(s, 0.0);
        pts.push(x);
        let c = C::new(q * g + s * e1 - q * a, 0.0);
        worst = worst.max(relative_residual(
            &b.k_minus(x),
            &CMatrix::scalar_identity(3, c),
        ));
        let x = C::new(s * q.powf(1.5), 0.0);
        pts.push(x);
        let c = match family {
            BoundaryFamily::A => q.powi(3) * d + s * q.powf(2.5) * e2 - q.powi(4) * be,
            BoundaryFamily::B => q.powi(4) * d + s * q.powf(2.5) * e2 - q.powi(3) * be,
        };
        worst = worst.max(relative_residual(&b.k_plus(x), &u.scale_real(c)));
    }
    let mut rng = cfg.rng_for(&name);
    for _ in 0..cfg.trials.max(20) {
        let x = sample_point(&mut rng, q);
        pts.push(x);
        let lhs = b.k_minus(x).matmul(&b.k_minus(1.0 / x));
        worst = worst.max(relative_residual(
            &lhs,
            &CMatrix::scalar_identity(3, sk.h1(x)),
        ));
        let lhs = b.k_plus(x).matmul(&uinv).matmul(&b.k_plus(q.powi(3) / x));
        let h2 = match family {
            BoundaryFamily::A => sk.h2(x),
            BoundaryFamily::B => sk.h2_bar(x),
        };
        worst = worst.max(relative_residual(&lhs, &u.scale(h2)));
    }
    CheckReport::new(name, &pts, worst, cfg.tolerance)
}
