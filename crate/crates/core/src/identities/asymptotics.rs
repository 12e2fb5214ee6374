use num_complex::Complex64;

use super::{CheckConfig, CheckReport, IdentityError};
use crate::fusion::{DoubleRow, FamilyBoundary, FusionError};
use crate::model::{w_operator, BoundaryFamily, ModelParams};
use crate::tensorlinalg::{eigenvalues, fit_on_circle, invert, CMatrix, LinalgError};

type C = Complex64;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Leading coefficient of `τ` (`m = 1`, degree `2N+4`) or of `x²τ₂` (`m = 2`, degree `4N+12`).
pub fn asymptotic_leading(
    params: &ModelParams,
    family: BoundaryFamily,
    m: usize,
) -> Result<CMatrix, IdentityError> {
    let n = params.n();
    let b = FamilyBoundary {
        params: params.clone(),
        family,
    };
    let dr = DoubleRow::new(params, &b);
    let to_linalg = |e: FusionError| match e {
        FusionError::Linalg(l) => l,
        other => LinalgError::DimensionMismatch(other.to_string()),
    };
    // a radius near the dominant scale keeps the top coefficient well resolved
    let radius = params.q().max(1.5);
    let poly = match m {
        1 => fit_on_circle(
            |x| dr.fused(1, x).map_err(to_linalg),
            2 * n + 4,
            radius,
            0.1,
        )?,
        2 => fit_on_circle(
            |x| dr.fused(2, x).map(|t| t.scale(x * x)).map_err(to_linalg),
            4 * n + 12,
            radius,
            0.1,
        )?,
        other => return Err(FusionError::InvalidOrder(other).into()),
    };
    Ok(poly.leading().clone())
}

/// Predicted eigenvalue of `t₁` in sector `m`.
pub fn t1_sector_value(params: &ModelParams, m: usize) -> f64 {
    let n = params.n();
    let (q, a, b, g, d) = (
        params.q(),
        params.alpha(),
        params.beta(),
        params.gamma(),
        params.delta(),
    );
    q * q * g * d + q.powi((n + m + 1) as i32) * a * b + q.powi(n as i32 - m as i32 + 2) * a * b
}

/// Predicted spectrum of `t₁`, one entry per eigenvalue (with multiplicity).
pub fn t1_spectrum(params: &ModelParams) -> Vec<C> {
    let n = params.n();
    let mut out = Vec::new();
    for m in 0..=n {
        let v = t1_sector_value(params, m);
        out.extend(std::iter::repeat_n(
            C::new(v, 0.0),
            binomial(n, m) << (n - m),
        ));
    }
    out
}

/// Predicted spectrum of `t₂`, one entry per eigenvalue (with multiplicity).
pub fn t2_spectrum(params: &ModelParams) -> Vec<C> {
    let n = params.n();
    let (q, a, b, g, d) = (
        params.q(),
        params.alpha(),
        params.beta(),
        params.gamma(),
        params.delta(),
    );
    let mut out = Vec::new();
    for m in 0..=n {
        let mi = m as i32;
        let v = -q.powi(3 * n as i32 + 9)
            * a
            * b
            * (q.powi(mi) * g * d + q.powi(1 - mi) * g * d + q.powi(n as i32) * a * b);
        out.extend(std::iter::repeat_n(
            C::new(v, 0.0),
            binomial(n, m) << (n - m),
        ));
    }
    out
}

/// Greedy nearest matching of two equal-length multisets; returns the worst relative gap.
pub(crate) fn multiset_gap(computed: &[C], expected: &[C]) -> f64 {
    if computed.len() != expected.len() {
        return f64::INFINITY;
    }
    let scale = expected.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut used = vec![false; computed.len()];
    let mut worst: f64 = 0.0;
    for e in expected {
        let best = (0..computed.len())
            .filter(|&i| !used[i])
            .min_by(|&i, &j| {
                (computed[i] - e)
                    .norm()
                    .total_cmp(&(computed[j] - e).norm())
            })
            .expect("equal lengths");
        used[best] = true;
        worst = worst.max((computed[best] - e).norm() / scale);
    }
    worst
}

/// Spectra of `t₁` and `t₂` against their closed forms (first model).
pub fn check_asymptotics(params: &ModelParams, cfg: &CheckConfig) -> Vec<CheckReport> {
    let n = params.n();
    [(1, t1_spectrum(params)), (2, t2_spectrum(params))]
        .into_iter()
        .map(|(m, expected)| {
            let name = format!("asymptotics/t{}/A/N{}", m, n);
            let res = asymptotic_leading(params, BoundaryFamily::A, m)
                .and_then(|t| Ok(eigenvalues(&t)?))
                .map(|ev| multiset_gap(&ev, &expected));
            CheckReport::new(name, &[], res.unwrap_or(f64::INFINITY), cfg.tolerance)
        })
        .collect()
}

fn digits(mut k: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for slot in d.iter_mut().rev() {
        *slot = k % 3;
        k /= 3;
    }
    d
}

/// True when `row` differs from `col` by one site `2 → 1|3`, or two sites `(2,2) → (1,3)|(3,1)`.
fn allowed_g_entry(row: &[usize], col: &[usize]) -> bool {
    let diff: Vec<usize> = (0..row.len()).filter(|&i| row[i] != col[i]).collect();
    let from_two = diff.iter().all(|&i| col[i] == 1 && row[i] != 1);
    match diff.len() {
        1 => from_two,
        2 => from_two && row[diff[0]] != row[diff[1]],
        _ => false,
    }
}

/// `G = t₁ − (q²γδ + q^{N+1}αβW + q^{N+2}αβW⁻¹)` has no diagonal and only the four allowed
/// off-diagonal index patterns.
pub fn check_g_pattern(params: &ModelParams, cfg: &CheckConfig) -> CheckReport {
    let n = params.n();
    let name = format!("asymptotics/g-pattern/A/N{}", n);
    let res = (|| -> Result<f64, IdentityError> {
        let t1 = asymptotic_leading(params, BoundaryFamily::A, 1)?;
        let (q, a, b, g, d) = (
            params.q(),
            params.alpha(),
            params.beta(),
            params.gamma(),
            params.delta(),
        );
        let w = w_operator(n, q);
        let winv = invert(&w)?;
        let dim = t1.rows();
        let diag = &(&CMatrix::scalar_identity(dim, C::new(q * q * g * d, 0.0))
            + &w.scale_real(q.powi(n as i32 + 1) * a * b))
            + &winv.scale_real(q.powi(n as i32 + 2) * a * b);
        let gm = &t1 - &diag;
        let scale = t1.max_abs().max(1.0);
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let v = gm[(i, j)].norm() / scale;
                if i == j || !allowed_g_entry(&digits(i, n), &digits(j, n)) {
                    worst = worst.max(v);
                }
            }
        }
        Ok(worst)
    })();
    CheckReport::new(name, &[], res.unwrap_or(f64::INFINITY), cfg.tolerance)
}
