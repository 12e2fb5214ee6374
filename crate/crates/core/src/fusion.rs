//! Projectors, monodromies, double-row transfer matrices and the fused hierarchy τ₂, τ₃.
//!
//! Fused objects live in the full tensor space; projectors are applied as sandwiches.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{k_minus, k_plus, r_matrix_q, r_tilde_q, BoundaryFamily, ModelParams};
use crate::tensorlinalg::{
    apply_left, apply_right, invert, partial_transpose, CMatrix, LinalgError,
};

type C = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("fusion order {0} is not supported")]
    InvalidOrder(usize),
    #[error("spectral parameter {0} is a pole of the construction")]
    Pole(C),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Operator on an ordered tensor product with each factor tagged auxiliary or quantum.
#[derive(Clone, Debug)]
pub struct SpacedOperator {
    pub matrix: CMatrix,
    pub dims: Vec<usize>,
    pub auxiliary: Vec<bool>,
}

impl SpacedOperator {
    pub fn aux_factors(&self) -> Vec<usize> {
        (0..self.dims.len())
            .filter(|&k| self.auxiliary[k])
            .collect()
    }
}

/// Antisymmetric projector of order 2 (9×9, rank 3) or 3 (27×27, rank 1).
pub fn projector(order: usize) -> Result<CMatrix, FusionError> {
    match order {
        1 => Ok(CMatrix::identity(3)),
        2 => {
            let mut p = CMatrix::zeros(9, 9);
            for i in 0..3 {
                for j in i + 1..3 {
                    let v = [(i * 3 + j, 1.0), (j * 3 + i, -1.0)];
                    for &(a, sa) in &v {
                        for &(b, sb) in &v {
                            p[(a, b)] += C::new(0.5 * sa * sb, 0.0);
                        }
                    }
                }
            }
            Ok(p)
        }
        3 => {
            let perms: [([usize; 3], f64); 6] = [
                ([0, 1, 2], 1.0),
                ([0, 2, 1], -1.0),
                ([1, 0, 2], -1.0),
                ([1, 2, 0], 1.0),
                ([2, 0, 1], 1.0),
                ([2, 1, 0], -1.0),
            ];
            let mut p = CMatrix::zeros(27, 27);
            for (pa, sa) in &perms {
                for (pb, sb) in &perms {
                    let a = pa[0] * 9 + pa[1] * 3 + pa[2];
                    let b = pb[0] * 9 + pb[1] * 3 + pb[2];
                    p[(a, b)] = C::new(sa * sb / 6.0, 0.0);
                }
            }
            Ok(p)
        }
        other => Err(FusionError::InvalidOrder(other)),
    }
}

/// Diagonal matrices `S₁₂`, `S₁₂₃` whose products with R-matrices at `q`-shifted points
/// reproduce the projectors up to a scalar.
pub fn s_matrix(order: usize, q: f64) -> Result<CMatrix, FusionError> {
    let re = |v: f64| C::new(v, 0.0);
    match order {
        2 => {
            let d = [0.0, 1.0, 1.0, 1.0 / q, 0.0, 1.0, 1.0 / q, 1.0 / q, 0.0];
            Ok(CMatrix::from_diag(&d.map(|v| re((q - 1.0) * v))))
        }
        3 => {
            let mut d = [0.0; 27];
            d[5] = 1.0;
            d[7] = 1.0 / q;
            d[11] = 1.0 / q;
            d[15] = 1.0 / (q * q);
            d[19] = 1.0 / (q * q);
            d[21] = 1.0 / q.powi(3);
            let f = (q - 1.0).powi(2) * (q * q - 1.0);
            Ok(CMatrix::from_diag(&d.map(|v| re(f * v))))
        }
        other => Err(FusionError::InvalidOrder(other)),
    }
}

/// `R̃(x)` in closed form; only `x = 0` is excluded.
pub fn r_tilde(x: C, params: &ModelParams) -> Result<CMatrix, FusionError> {
    if x.norm() < 1e-300 {
        return Err(FusionError::Pole(x));
    }
    Ok(r_tilde_q(x, params.q()))
}

/// `R̃(x)` computed literally as `ρ₂(x)((R^{t₁}(x))⁻¹)^{t₁}`; fails near zeros of `det R^{t₁}`.
pub fn r_tilde_by_inversion(x: C, params: &ModelParams) -> Result<CMatrix, FusionError> {
    let q = params.q();
    let rt1 = partial_transpose(&r_matrix_q(x, q, 2), &[3, 3], 0)?;
    let inv = invert(&rt1)?;
    Ok(partial_transpose(&inv, &[3, 3], 0)?.scale(crate::model::rho2(q, x)))
}

/// Source of the two boundary matrices entering the double-row construction.
pub trait Boundary: Sync {
    fn k_minus(&self, x: C) -> CMatrix;
    fn k_plus(&self, x: C) -> CMatrix;
}

/// The K± pair of one of the two models.
#[derive(Clone, Debug)]
pub struct FamilyBoundary {
    pub params: ModelParams,
    pub family: BoundaryFamily,
}

impl Boundary for FamilyBoundary {
    fn k_minus(&self, x: C) -> CMatrix {
        k_minus(x, &self.params, self.family)
    }
    fn k_plus(&self, x: C) -> CMatrix {
        k_plus(x, &self.params, self.family)
    }
}

/// `T₀(x) = R₀N(x/θ_N)…R₀₁(x/θ₁)` or, hatted, `T̂₀(x) = R₁₀(xθ₁)…R_N₀(xθ_N)` on `V₀⊗V₁…⊗V_N`.
pub fn monodromy(x: C, params: &ModelParams, hatted: bool) -> SpacedOperator {
    let n = params.n();
    let q = params.q();
    let dims = vec![3usize; n + 1];
    let d = 3usize.pow(n as u32 + 1);
    let mut m = CMatrix::identity(d);
    for (j, &th) in params.theta().iter().enumerate() {
        m = if hatted {
            apply_right(&m, &r_matrix_q(x * th, q, 2), &[j + 1, 0], &dims)
        } else {
            apply_left(&r_matrix_q(x / th, q, 2), &[0, j + 1], &dims, &m)
        }
        .expect("consistent dims");
    }
    let mut auxiliary = vec![false; n + 1];
    auxiliary[0] = true;
    SpacedOperator {
        matrix: m,
        dims,
        auxiliary,
    }
}

/// `tr_aux{ K⁺·Y }` where the auxiliary block occupies the leading `da` index range.
fn trace_aux_with(kp: &CMatrix, y: &CMatrix, da: usize) -> CMatrix {
    let dq = y.rows() / da;
    let mut out = CMatrix::zeros(dq, dq);
    for a in 0..da {
        for b in 0..da {
            let k = kp[(a, b)];
            if k == C::new(0.0, 0.0) {
                continue;
            }
            for i in 0..dq {
                let yrow = &y.row(b * dq + i)[a * dq..(a + 1) * dq];
                let orow = &mut out.data_mut()[i * dq..(i + 1) * dq];
                for (o, &v) in orow.iter_mut().zip(yrow) {
                    *o += k * v;
                }
            }
        }
    }
    out
}

/// Generic unfused double-row transfer matrix with local dimension `d` (used for the
/// one-species reduction as well).
pub fn double_row_transfer(
    x: C,
    _q: f64,
    theta: &[C],
    d: usize,
    r: &dyn Fn(C) -> CMatrix,
    kp: &CMatrix,
    km: &CMatrix,
) -> CMatrix {
    let n = theta.len();
    let dims = vec![d; n + 1];
    let mut y = CMatrix::identity(d.pow(n as u32 + 1));
    for (j, &th) in theta.iter().enumerate() {
        y = apply_right(&y, &r(x * th), &[j + 1, 0], &dims).expect("dims");
    }
    y = apply_left(km, &[0], &dims, &y).expect("dims");
    for (j, &th) in theta.iter().enumerate() {
        y = apply_left(&r(x / th), &[0, j + 1], &dims, &y).expect("dims");
    }
    trace_aux_with(kp, &y, d)
}

/// Double-row machinery bound to a chain (`q`, θ) and a boundary pair.
pub struct DoubleRow<'a> {
    q: f64,
    theta: Vec<C>,
    boundary: &'a dyn Boundary,
}

impl<'a> DoubleRow<'a> {
    pub fn new(params: &ModelParams, boundary: &'a dyn Boundary) -> Self {
        DoubleRow {
            q: params.q(),
            theta: params.theta().to_vec(),
            boundary,
        }
    }

    fn aux_projector(&self, m: usize) -> Result<Option<CMatrix>, FusionError> {
        Ok(if m == 1 { None } else { Some(projector(m)?) })
    }

    /// Unprojected K⁻_{a0…m−1}(y) on the aux space `(C³)^{⊗m}` (inner factors projected).
    fn k_minus_chain(&self, m: usize, a0: usize, y: C) -> Result<CMatrix, FusionError> {
        let dims = vec![3usize; m];
        let id = CMatrix::identity(3usize.pow(m as u32));
        let mut k = apply_left(&self.boundary.k_minus(y), &[a0], &dims, &id)?;
        if a0 + 1 == m {
            return Ok(k);
        }
        for kk in a0 + 1..m {
            let arg = y * y * self.q.powi((kk - a0) as i32);
            k = apply_right(&k, &r_matrix_q(arg, self.q, 2), &[kk, a0], &dims)?;
        }
        let inner = self.k_minus_chain(m, a0 + 1, y * self.q)?;
        let inner = self.sandwich_inner(m, a0 + 1, inner)?;
        Ok(k.matmul(&inner))
    }

    /// Unprojected K⁺_{a0…m−1}(y), mirror image of [`Self::k_minus_chain`] with `R̃`.
    fn k_plus_chain(&self, m: usize, a0: usize, y: C) -> Result<CMatrix, FusionError> {
        let dims = vec![3usize; m];
        let id = CMatrix::identity(3usize.pow(m as u32));
        let kp = apply_left(&self.boundary.k_plus(y), &[a0], &dims, &id)?;
        if a0 + 1 == m {
            return Ok(kp);
        }
        let inner = self.k_plus_chain(m, a0 + 1, y * self.q)?;
        let mut k = self.sandwich_inner(m, a0 + 1, inner)?;
        for kk in (a0 + 1..m).rev() {
            let arg = y * y * self.q.powi((kk - a0) as i32);
            if arg.norm() < 1e-300 {
                return Err(FusionError::Pole(arg));
            }
            k = apply_right(&k, &r_tilde_q(arg, self.q), &[kk, a0], &dims)?;
        }
        Ok(k.matmul(&kp))
    }

    /// Projects factors `a0..m` of an aux-space operator (no-op for a single factor).
    fn sandwich_inner(&self, m: usize, a0: usize, op: CMatrix) -> Result<CMatrix, FusionError> {
        let order = m - a0;
        if order == 1 {
            return Ok(op);
        }
        let p = projector(order)?;
        let dims = vec![3usize; m];
        let sites: Vec<usize> = (a0..m).collect();
        let left = apply_left(&p, &sites, &dims, &op)?;
        Ok(apply_right(&left, &p, &sites, &dims)?)
    }

    /// Fused `K⁻_{⟨1…m⟩}(x)` on the aux space, projected on both sides.
    pub fn fused_k_minus(&self, m: usize, x: C) -> Result<CMatrix, FusionError> {
        if !(1..=3).contains(&m) {
            return Err(FusionError::InvalidOrder(m));
        }
        let k = self.k_minus_chain(m, 0, x)?;
        self.sandwich_inner(m, 0, k)
    }

    /// Fused `K⁺_{⟨1…m⟩}(x)` on the aux space, projected on both sides.
    pub fn fused_k_plus(&self, m: usize, x: C) -> Result<CMatrix, FusionError> {
        if !(1..=3).contains(&m) {
            return Err(FusionError::InvalidOrder(m));
        }
        let k = self.k_plus_chain(m, 0, x)?;
        self.sandwich_inner(m, 0, k)
    }

    /// `τ_m(x) = tr_{1…m}{K⁺_{⟨1…m⟩} T_{⟨1…m⟩} K⁻_{⟨1…m⟩} T̂_{⟨1…m⟩}}`.
    pub fn fused(&self, m: usize, x: C) -> Result<CMatrix, FusionError> {
        if !(1..=3).contains(&m) {
            return Err(FusionError::InvalidOrder(m));
        }
        let n = self.theta.len();
        let q = self.q;
        let dims = vec![3usize; m + n];
        let aux: Vec<usize> = (0..m).collect();
        let p = self.aux_projector(m)?;
        let da = 3usize.pow(m as u32);
        let d = da * 3usize.pow(n as u32);

        let mut y = match &p {
            Some(p) => apply_left(p, &aux, &dims, &CMatrix::identity(d))?,
            None => CMatrix::identity(d),
        };
        // · T̂_1(x) T̂_2(qx) …, each T̂_a(y) = R_{1a}(yθ₁)…R_{Na}(yθ_N)
        for a in 0..m {
            let ya = x * q.powi(a as i32);
            for (j, &th) in self.theta.iter().enumerate() {
                y = apply_right(&y, &r_matrix_q(ya * th, q, 2), &[m + j, a], &dims)?;
            }
        }
        if let Some(p) = &p {
            y = apply_right(&y, p, &aux, &dims)?;
        }
        let km = self.fused_k_minus(m, x)?;
        y = apply_left(&km, &aux, &dims, &y)?;
        // T_1(x) T_2(qx) … ·, each T_a(y) = R_{aN}(y/θ_N)…R_{a1}(y/θ₁)
        for a in (0..m).rev() {
            let ya = x * q.powi(a as i32);
            for (j, &th) in self.theta.iter().enumerate() {
                y = apply_left(&r_matrix_q(ya / th, q, 2), &[a, m + j], &dims, &y)?;
            }
        }
        if let Some(p) = &p {
            y = apply_left(p, &aux, &dims, &y)?;
        }
        let kp = self.fused_k_plus(m, x)?;
        Ok(trace_aux_with(&kp, &y, da))
    }

    pub fn transfer(&self, x: C) -> CMatrix {
        self.fused(1, x).expect("order 1 is always valid")
    }
}

/// `τ(x)` for one of the two models.
pub fn transfer(x: C, params: &ModelParams, family: BoundaryFamily) -> CMatrix {
    let b = FamilyBoundary {
        params: params.clone(),
        family,
    };
    DoubleRow::new(params, &b).transfer(x)
}

/// `τ_m(x)`, `m ∈ {1, 2, 3}`.
pub fn fused_transfer(
    m: usize,
    x: C,
    params: &ModelParams,
    family: BoundaryFamily,
) -> Result<CMatrix, FusionError> {
    let b = FamilyBoundary {
        params: params.clone(),
        family,
    };
    DoubleRow::new(params, &b).fused(m, x)
}

/// Sign selector for [`fused_k`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KSign {
    Minus,
    Plus,
}

/// Fused K-matrix on the aux space `(C³)^{⊗m}`.
pub fn fused_k(
    sign: KSign,
    m: usize,
    x: C,
    params: &ModelParams,
    family: BoundaryFamily,
) -> Result<SpacedOperator, FusionError> {
    let b = FamilyBoundary {
        params: params.clone(),
        family,
    };
    let dr = DoubleRow::new(params, &b);
    let matrix = match sign {
        KSign::Minus => dr.fused_k_minus(m, x)?,
        KSign::Plus => dr.fused_k_plus(m, x)?,
    };
    Ok(SpacedOperator {
        matrix,
        dims: vec![3; m],
        auxiliary: vec![true; m],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorlinalg::{embed, relative_residual, swap_operator};

    fn theta_params(family: BoundaryFamily, n: usize) -> ModelParams {
        let theta = (0..n)
            .map(|j| C::from_polar(1.0, 0.13 * j as f64 - 0.11))
            .collect();
        ModelParams::preset(family, n).with_theta(theta).unwrap()
    }

    fn rank(m: &CMatrix) -> usize {
        crate::tensorlinalg::eigenvalues(m)
            .unwrap()
            .iter()
            .filter(|v| v.norm() > 1e-9)
            .count()
    }

    #[test]
    fn projectors_are_idempotent_with_expected_rank() {
        for (order, r) in [(2, 3), (3, 1)] {
            let p = projector(order).unwrap();
            assert!(relative_residual(&p.matmul(&p), &p) < 1e-15);
            assert_eq!(rank(&p), r);
        }
        assert!(matches!(projector(4), Err(FusionError::InvalidOrder(4))));
    }

    #[test]
    fn projectors_factor_through_r_matrices() {
        let q = 4.0;
        let x = r_matrix_q(C::new(q, 0.0), q, 2).matmul(&s_matrix(2, q).unwrap());
        let p = projector(2).unwrap();
        let c = (x
            .data()
            .iter()
            .zip(p.data())
            .map(|(a, b)| a * b.conj())
            .sum::<C>())
            / p.frobenius_norm().powi(2);
        assert!((c - C::new(-2.0 * (q - 1.0).powi(2), 0.0)).norm() < 1e-12);
        assert!(relative_residual(&x, &p.scale(c)) < 1e-13);

        let dims = [3, 3, 3];
        let r12 = embed(&r_matrix_q(C::new(q, 0.0), q, 2), &[0, 1], &dims).unwrap();
        let r13 = embed(&r_matrix_q(C::new(q * q, 0.0), q, 2), &[0, 2], &dims).unwrap();
        let r23 = embed(&r_matrix_q(C::new(q, 0.0), q, 2), &[1, 2], &dims).unwrap();
        let x = r12
            .matmul(&r13)
            .matmul(&r23)
            .matmul(&s_matrix(3, q).unwrap());
        let p = projector(3).unwrap();
        let c = x
            .data()
            .iter()
            .zip(p.data())
            .map(|(a, b)| a * b.conj())
            .sum::<C>()
            / p.frobenius_norm().powi(2);
        assert!(c.norm() > 1.0);
        assert!(relative_residual(&x, &p.scale(c)) < 1e-12);
    }

    #[test]
    fn r_tilde_routes_agree() {
        let p = ModelParams::paper_a(1);
        let x = C::new(0.8, 0.45);
        assert!(
            relative_residual(
                &r_tilde(x, &p).unwrap(),
                &r_tilde_by_inversion(x, &p).unwrap()
            ) < 1e-11
        );
        assert!(r_tilde(C::new(0.0, 0.0), &p).is_err());
    }

    #[test]
    fn single_site_monodromy_is_r_matrix() {
        let p = ModelParams::paper_a(1);
        let x = C::new(0.3, 1.1);
        let t = monodromy(x, &p, false);
        assert!(relative_residual(&t.matrix, &r_matrix_q(x, p.q(), 2)) < 1e-15);
        assert_eq!(t.aux_factors(), vec![0]);
        let p2 = ModelParams::paper_a(2);
        let t1 = monodromy(C::new(1.0, 0.0), &p2, false).matrix;
        // R₀₂(1)R₀₁(1) = (q−1)² P₀₂P₀₁
        let dims = [3, 3, 3];
        let p01 = embed(&swap_operator(3), &[0, 1], &dims).unwrap();
        let p02 = embed(&swap_operator(3), &[0, 2], &dims).unwrap();
        let expected = p02.matmul(&p01).scale_real((p2.q() - 1.0).powi(2));
        assert!(relative_residual(&t1, &expected) < 1e-15);
    }

    #[test]
    fn generic_double_row_matches_family_transfer() {
        let p = theta_params(BoundaryFamily::A, 2);
        let x = C::new(0.6, 0.2);
        let km = k_minus(x, &p, BoundaryFamily::A);
        let kp = k_plus(x, &p, BoundaryFamily::A);
        let q = p.q();
        let generic = double_row_transfer(x, q, p.theta(), 3, &|y| r_matrix_q(y, q, 2), &kp, &km);
        assert!(relative_residual(&generic, &transfer(x, &p, BoundaryFamily::A)) < 1e-13);
    }

    #[test]
    fn transfer_matrices_commute() {
        for family in BoundaryFamily::ALL {
            let p = theta_params(family, 2);
            let xs = [C::new(0.7, 0.4), C::new(-1.2, 0.3)];
            let t: Vec<Vec<CMatrix>> = (1..=3)
                .map(|m| {
                    xs.iter()
                        .map(|&x| fused_transfer(m, x, &p, family).unwrap())
                        .collect()
                })
                .collect();
            for a in &t {
                for b in &t {
                    let (u, v) = (&a[0], &b[1]);
                    let r = u.commutator(v).frobenius_norm()
                        / (u.frobenius_norm() * v.frobenius_norm());
                    assert!(r < 1e-11, "{:?} {}", family, r);
                }
            }
        }
    }

    #[test]
    fn transfer_at_one_is_scalar_and_tau3_is_scalar() {
        for family in BoundaryFamily::ALL {
            let p = theta_params(family, 2);
            let t1 = transfer(
                C::new(1.0, 0.0),
                &p.with_theta(vec![C::new(1.0, 0.0); 2]).unwrap(),
                family,
            );
            assert!(t1.as_scalar_identity(1e-11).is_some());
            let t3 = fused_transfer(3, C::new(0.7, 0.3), &p, family).unwrap();
            assert!(t3.as_scalar_identity(1e-10).is_some());
        }
    }

    #[test]
    fn tau2_vanishes_at_shifted_inhomogeneities() {
        let p = theta_params(BoundaryFamily::A, 2);
        let q = p.q();
        let scale = fused_transfer(2, C::new(0.9, 0.1), &p, BoundaryFamily::A)
            .unwrap()
            .frobenius_norm();
        for &th in p.theta() {
            let t = fused_transfer(2, th / q, &p, BoundaryFamily::A).unwrap();
            assert!(t.frobenius_norm() / scale < 1e-11);
        }
    }

    #[test]
    fn fused_k_lives_in_projected_subspace() {
        let p = ModelParams::paper_a(1);
        let x = C::new(0.5, 0.7);
        for m in 2..=3 {
            let pr = projector(m).unwrap();
            for sign in [KSign::Minus, KSign::Plus] {
                let k = fused_k(sign, m, x, &p, BoundaryFamily::A).unwrap().matrix;
                assert!(relative_residual(&pr.matmul(&k).matmul(&pr), &k) < 1e-14);
                assert!(k.frobenius_norm() > 0.0);
            }
        }
        assert!(fused_transfer(4, x, &p, BoundaryFamily::A).is_err());
    }
}
