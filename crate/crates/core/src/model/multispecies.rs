use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ModelError, ModelParams};
use crate::tensorlinalg::{fit_on_circle, CMatrix};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MultiKKind {
    /// `m = 2r`
    Even,
    /// `m = 2r − 1`
    Odd,
    Type3,
    Type4,
    Type5,
}

/// Rank-m boundary K⁻ variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiKVariant {
    pub kind: MultiKKind,
    pub m: usize,
}

impl MultiKVariant {
    pub fn new(kind: MultiKKind, m: usize) -> Result<Self, ModelError> {
        if m < 1 {
            return Err(ModelError::Variant("rank must be at least 1".into()));
        }
        match kind {
            MultiKKind::Even if !m.is_multiple_of(2) => Err(ModelError::Variant(format!(
                "even variant needs even rank, got {}",
                m
            ))),
            MultiKKind::Odd if m % 2 != 1 => Err(ModelError::Variant(format!(
                "odd variant needs odd rank, got {}",
                m
            ))),
            MultiKKind::Type3 | MultiKKind::Type4 | MultiKKind::Type5 if m < 2 => Err(
                ModelError::Variant(format!("{:?} needs rank at least 2", kind)),
            ),
            _ => Ok(MultiKVariant { kind, m }),
        }
    }
}

/// `ᾱ` solving `α = ᾱ + ᾱ(q−1)/(q(γ+ᾱ))`, on the root that tends to `α` as `q → 1`.
pub fn alpha_bar(q: f64, alpha: f64, gamma: f64) -> Result<f64, ModelError> {
    let b = q * gamma + q - 1.0 - q * alpha;
    let v = (-b + (b * b + 4.0 * q * q * alpha * gamma).sqrt()) / (2.0 * q);
    let resid = (v + v * (q - 1.0) / (q * (gamma + v)) - alpha).abs();
    if !(v > 0.0) || !resid.is_finite() || resid > 1e-10 * alpha.max(1.0) {
        return Err(ModelError::Variant(format!(
            "no positive alpha-bar for q={}, alpha={}, gamma={}",
            q, alpha, gamma
        )));
    }
    Ok(v)
}

/// `γ̄` solving `γ = γ̄ + γ̄(1−q)/(q(α+γ̄))`, on the root that tends to `γ` as `q → 1`.
pub fn gamma_bar(q: f64, alpha: f64, gamma: f64) -> Result<f64, ModelError> {
    let b = q * alpha + 1.0 - q - q * gamma;
    let v = (-b + (b * b + 4.0 * q * q * alpha * gamma).sqrt()) / (2.0 * q);
    let resid = (v + v * (1.0 - q) / (q * (alpha + v)) - gamma).abs();
    if !(v > 0.0) || !resid.is_finite() || resid > 1e-10 * gamma.max(1.0) {
        return Err(ModelError::Variant(format!(
            "no positive gamma-bar for q={}, alpha={}, gamma={}",
            q, alpha, gamma
        )));
    }
    Ok(v)
}

/// Rank-m K⁻ matrix of the requested variant (left-boundary rates α, γ).
pub fn multispecies_k_minus(
    x: C,
    params: &ModelParams,
    variant: MultiKVariant,
) -> Result<CMatrix, ModelError> {
    let MultiKVariant { kind, m } = MultiKVariant::new(variant.kind, variant.m)?;
    let (q, a, g, e) = (params.q(), params.alpha(), params.gamma(), params.eta1());
    let n = m + 1;
    let x2 = x * x;
    let zero = C::new(0.0, 0.0);
    let mut k = CMatrix::zeros(n, n);
    // indices below are 1-based to mirror the case analysis
    let mut set = |i: usize, j: usize, v: C| k[(i - 1, j - 1)] = v;
    match kind {
        MultiKKind::Even => {
            let r = m / 2;
            for i in 1..=n {
                for j in 1..=n {
                    let v = if i == j && i <= r {
                        q * (g - a) * x2 + e * x
                    } else if i == j && i >= r + 2 {
                        e * x + q * (g - a)
                    } else if i <= r && j == 2 * r + 2 - i {
                        q * g * (x2 - 1.0)
                    } else if j <= r && i == 2 * r + 2 - j {
                        q * a * (x2 - 1.0)
                    } else if i == j && i == r + 1 {
                        q * g * x2 + e * x - q * a
                    } else {
                        zero
                    };
                    set(i, j, v);
                }
            }
        }
        MultiKKind::Odd => {
            let r = m.div_ceil(2);
            for i in 1..=n {
                for j in 1..=n {
                    let v = if i == j && i <= r {
                        q * (g - a) * x2 + e * x
                    } else if i == j && i > r {
                        e * x + q * (g - a)
                    } else if i <= r && j == 2 * r + 1 - i {
                        q * g * (x2 - 1.0)
                    } else if j <= r && i == 2 * r + 1 - j {
                        q * a * (x2 - 1.0)
                    } else {
                        zero
                    };
                    set(i, j, v);
                }
            }
        }
        MultiKKind::Type3 => {
            // the α-row sits in the last row (i = m+1); this is the reading that solves the RE
            for i in 1..=n {
                for j in 1..=n {
                    let v = if i == 1 && j == 1 {
                        q * (g - a) * x2 + e * x
                    } else if i == n && j == n {
                        e * x + q * (g - a)
                    } else if i == 1 {
                        q * g * (x2 - 1.0)
                    } else if i == n {
                        q * a * (x2 - 1.0)
                    } else if i == j {
                        -q * a * x2 + e * x + q * g
                    } else {
                        zero
                    };
                    set(i, j, v);
                }
            }
        }
        MultiKKind::Type4 => {
            let ab = alpha_bar(q, a, g)?;
            for i in 1..=n {
                for j in 1..=n {
                    let v = if i == 1 && j == 1 {
                        q * (g - a) * x2 * x + e * x2
                    } else if i == 1 {
                        q * g * x * (x2 - 1.0)
                    } else if i == 2 && j == 1 {
                        q * a * x * (x2 - 1.0)
                    } else if i == 2 && j == 2 {
                        e * x2 + q * (g - a) * x
                    } else if i == 2 {
                        q * ab * (x2 - 1.0)
                    } else if i == j {
                        (q - q * a * x / ab) * (g * x + ab)
                    } else {
                        zero
                    };
                    set(i, j, v);
                }
            }
        }
        MultiKKind::Type5 => {
            let gb = gamma_bar(q, a, g)?;
            for i in 1..=n {
                for j in 1..=n {
                    let v = if i == n && j == n {
                        e * x + q * (g - a)
                    } else if i == n {
                        q * a * (x2 - 1.0)
                    } else if i == m && j == n {
                        q * g * (x2 - 1.0)
                    } else if i == m && j == m {
                        q * (g - a) * x2 + e * x
                    } else if i == m {
                        q * gb * x * (x2 - 1.0)
                    } else if i == j {
                        (q * g / gb * x - q * x2) * (gb * x + a)
                    } else {
                        zero
                    };
                    set(i, j, v);
                }
            }
        }
    }
    Ok(k)
}

/// Recursions that grow an integrable boundary generator by one or two species.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BuilderRule {
    /// `L ⊕ 0`
    ZeroExtend,
    /// `L ⊕ L_b^{(1)}(α, γ)`
    AppendSingle { alpha: f64, gamma: f64 },
    /// New last state fed from states 1 and 2 at rates `qγ′`, `qα′`.
    CoupleHead { alpha_p: f64, gamma_p: f64 },
    /// New last state fed from the two preceding states at rates `qγ`, `qα`; the base must
    /// end in an `L_b^{(1)}(α, γ)` block.
    CoupleTail { alpha: f64, gamma: f64 },
}

/// The one-species boundary block `[[−qα, qγ], [qα, −qγ]]`.
pub fn single_species_boundary(q: f64, alpha: f64, gamma: f64) -> CMatrix {
    CMatrix::from_real_rows(&[&[-q * alpha, q * gamma], &[q * alpha, -q * gamma]])
}

/// The two admissible `(α′, γ′)` choices for [`BuilderRule::CoupleHead`]:
/// `first` keeps `α′ = α` and solves for `γ′`; otherwise `γ′ = γ` and `α′` is solved for.
pub fn head_coupling_rates(
    q: f64,
    alpha: f64,
    gamma: f64,
    first: bool,
) -> Result<(f64, f64), ModelError> {
    if first {
        Ok((alpha, gamma_bar(q, alpha, gamma)?))
    } else {
        Ok((alpha_bar(q, alpha, gamma)?, gamma))
    }
}

fn column_sum_defect(m: &CMatrix) -> f64 {
    let scale = m.max_abs().max(1.0);
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)]).sum::<C>().norm())
        .fold(0.0, f64::max)
        / scale
}

/// Applies one recursion step to `base`.
pub fn boundary_builder(base: &CMatrix, q: f64, rule: BuilderRule) -> Result<CMatrix, ModelError> {
    if !base.is_square() || base.rows() < 2 {
        return Err(ModelError::Builder(format!(
            "base must be square of size ≥ 2, got {}x{}",
            base.rows(),
            base.cols()
        )));
    }
    if column_sum_defect(base) > 1e-12 {
        return Err(ModelError::Builder(
            "base columns do not sum to zero".into(),
        ));
    }
    let n = base.rows();
    let embed = |size: usize| {
        let mut out = CMatrix::zeros(size, size);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = base[(i, j)];
            }
        }
        out
    };
    let re = |v: f64| C::new(v, 0.0);
    let out = match rule {
        BuilderRule::ZeroExtend => embed(n + 1),
        BuilderRule::AppendSingle { alpha, gamma } => {
            let mut out = embed(n + 2);
            let lb = single_species_boundary(q, alpha, gamma);
            for i in 0..2 {
                for j in 0..2 {
                    out[(n + i, n + j)] = lb[(i, j)];
                }
            }
            out
        }
        BuilderRule::CoupleHead { alpha_p, gamma_p } => {
            let mut out = embed(n + 1);
            out[(0, n)] = re(q * gamma_p);
            out[(1, n)] = re(q * alpha_p);
            out[(n, n)] = re(-q * (alpha_p + gamma_p));
            out
        }
        BuilderRule::CoupleTail { alpha, gamma } => {
            let lb = single_species_boundary(q, alpha, gamma);
            let tol = 1e-12 * base.max_abs().max(1.0);
            let block_ok = (0..2)
                .all(|i| (0..2).all(|j| (base[(n - 2 + i, n - 2 + j)] - lb[(i, j)]).norm() <= tol));
            let decoupled = (0..n - 2).all(|i| {
                (n - 2..n).all(|j| base[(i, j)].norm() <= tol && base[(j, i)].norm() <= tol)
            });
            if !block_ok || !decoupled {
                return Err(ModelError::Builder(
                    "tail coupling needs a base ending in a decoupled one-species block with the same rates".into(),
                ));
            }
            let mut out = embed(n + 1);
            out[(n - 2, n)] = re(q * gamma);
            out[(n - 1, n)] = re(q * alpha);
            out[(n, n)] = re(-q * (alpha + gamma));
            out
        }
    };
    Ok(out)
}

/// Boundary generator encoded by a K⁻ matrix with `K(1) ∝ I`: off-diagonal part of
/// `(1−q)/(2k₀)·K′(1)`, diagonal fixed by zero column sums.
///
/// Errors if `K(1)` is not scalar or the implied diagonal shift is not uniform.
pub fn markovian_limit<F>(k: F, q: f64) -> Result<CMatrix, ModelError>
where
    F: Fn(C) -> CMatrix,
{
    let poly =
        fit_on_circle(|x| Ok(k(x)), 3, 1.5, 0.1).map_err(|e| ModelError::Variant(e.to_string()))?;
    let one = C::new(1.0, 0.0);
    let k1 = poly.evaluate(one);
    let k0 = k1
        .as_scalar_identity(1e-10)
        .ok_or_else(|| ModelError::Variant("K(1) is not proportional to the identity".into()))?;
    let d = poly.derivative(one).scale((1.0 - q) / (2.0 * k0));
    let n = d.rows();
    let mut l = d.clone();
    let mut shifts = Vec::with_capacity(n);
    for j in 0..n {
        let off: C = (0..n).filter(|&i| i != j).map(|i| d[(i, j)]).sum();
        l[(j, j)] = -off;
        shifts.push(-off - d[(j, j)]);
    }
    let spread = shifts
        .iter()
        .map(|s| (s - shifts[0]).norm())
        .fold(0.0, f64::max);
    if spread > 1e-9 * d.max_abs().max(1.0) {
        return Err(ModelError::Variant(
            "K'(1) does not differ from a generator by a multiple of I".into(),
        ));
    }
    Ok(l)
}
