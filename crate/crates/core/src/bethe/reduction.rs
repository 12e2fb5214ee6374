use num_complex::Complex64;

use super::{
    check_pole, q_eval_reduced, validate, BetheError, BetheSolution, QKind, Roots, TQKernels,
    TQVariant,
};
use crate::fusion::fused_transfer;
use crate::fusion::transfer;
use crate::identities::CheckReport;
use crate::model::{rho2, single_species_objects, BoundaryFamily, ModelParams};
use crate::spectrum::{curves_for, CurveSample, DEFAULT_X0};
use crate::tensorlinalg::eigenvalues;

type C = Complex64;

/// Reading of the middle term of the `Λ₂` relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lambda2Mode {
    /// `f(x)f(x)z(x)` as printed; the undefined shift in the last term's `z(tx)` is read as `t = q`.
    Literal,
    /// `f(x)f(x/q)z(x)`.
    ShiftedF,
    /// `f(x)f(1/x)z(x)`.
    InvertedF,
}

impl Lambda2Mode {
    pub const ALL: [Lambda2Mode; 3] = [
        Lambda2Mode::Literal,
        Lambda2Mode::ShiftedF,
        Lambda2Mode::InvertedF,
    ];
}

impl std::fmt::Display for Lambda2Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Lambda2Mode::Literal => "literal",
            Lambda2Mode::ShiftedF => "f(x)f(x/q)",
            Lambda2Mode::InvertedF => "f(x)f(1/x)",
        };
        f.write_str(s)
    }
}

/// Eigenvalue `Λ₂(x)` of the fused transfer matrix from first-type roots of the first model.
pub fn tq_lambda2(roots: &Roots, k: &TQKernels, x: C, mode: Lambda2Mode) -> Result<C, BetheError> {
    validate(TQVariant::A1, roots, k.n)?;
    check_pole(x, roots, k.q)?;
    let (q, n, m) = (k.q, k.n as i32, roots.m as i32);
    let q1 = |y: C| q_eval_reduced(QKind::Q1, &roots.lambda, y, q);
    let q2 = |y: C| q_eval_reduced(QKind::Q2, &roots.mu, y, q);
    let x4 = x.powu(4);
    let pre = k.y1(x) * k.y2(q * x) * rho2(q, q * x * x) * k.z(q * q * x);
    let t1 = q.powi(-n - m + 3) * x4 * k.y1(q * x) * k.f(x) * k.f(1.0 / x) * k.z(x) * q2(q * q * x)
        / q2(q * x);
    let middle = match mode {
        Lambda2Mode::Literal => k.f(x) * k.f(x),
        Lambda2Mode::ShiftedF => k.f(x) * k.f(x / q),
        Lambda2Mode::InvertedF => k.f(x) * k.f(1.0 / x),
    };
    let t2 = q.powi(-2 * n + 5) * middle * k.z(x) * q1(q * x) * q2(x) / (q1(x) * q2(q * x));
    let t3 =
        q.powi(m - n + 2) * x4 * k.y2(x) * k.f(q / x) * k.f(x) * k.z(q * x) * q1(x / q) / q1(x);
    let v = pre * (t1 + t2 + t3);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(BetheError::Pole(x))
    }
}

/// Points at which the readings of `Λ₂` are compared with the fused spectrum.
const MODE_PROBES: [C; 3] = [C::new(0.7, 0.3), C::new(1.3, -0.4), C::new(2.2, 0.1)];

/// One report per reading of `Λ₂`: worst distance (relative to the spectral radius) from each
/// solution's `Λ₂(x)` to the nearest eigenvalue of the exact fused `τ₂(x)`.
pub fn lambda2_mode_reports(
    solutions: &[BetheSolution],
    params: &ModelParams,
    tolerance: f64,
) -> Result<Vec<CheckReport>, BetheError> {
    if solutions.iter().any(|s| s.variant != TQVariant::A1) {
        return Err(BetheError::WrongVariant("the fused eigenvalue"));
    }
    let k = TQKernels::new(params);
    let mut spectra = Vec::with_capacity(MODE_PROBES.len());
    for &x in &MODE_PROBES {
        let t2 = fused_transfer(2, x, params, BoundaryFamily::A)?;
        let ev = eigenvalues(&t2).map_err(crate::spectrum::SpectrumError::from)?;
        spectra.push(ev);
    }
    let mut out = Vec::new();
    for mode in Lambda2Mode::ALL {
        let mut worst: f64 = 0.0;
        for (&x, ev) in MODE_PROBES.iter().zip(&spectra) {
            let scale = ev.iter().map(|e| e.norm()).fold(1.0, f64::max);
            for s in solutions {
                let l2 = tq_lambda2(&s.roots, &k, x, mode)?;
                worst = worst.max(
                    ev.iter()
                        .map(|e| (e - l2).norm() / scale)
                        .fold(f64::INFINITY, f64::min),
                );
            }
        }
        out.push(CheckReport::new(
            format!("lambda2-mode/{mode}"),
            &MODE_PROBES,
            worst,
            tolerance,
        ));
    }
    Ok(out)
}

/// Basis indices with no site in state `|2⟩` (no species-"0" particle).
pub(crate) fn no_zero_species_indices(n: usize) -> Vec<usize> {
    (0..3usize.pow(n as u32))
        .filter(|&i| {
            let mut k = i;
            (0..n).all(|_| {
                let d = k % 3;
                k /= 3;
                d != 1
            })
        })
        .collect()
}

/// Additive term relating the two-species eigenvalue at `M = 0` to the single-species one.
pub fn reduction_additive_term(family: BoundaryFamily, k: &TQKernels, x: C) -> C {
    let q = k.q;
    match family {
        BoundaryFamily::A => q.powi(4 - k.n as i32) * k.y2(x) * k.f(x / q) * k.z(q * x),
        BoundaryFamily::B => q.powi(-(k.n as i32)) * x.powu(4) * k.y2(x) * k.f(q / x) * k.z(q * x),
    }
}

/// Branchwise check of `Λ(x) = (q³−x²)/(q²−x²)·Λ⁽²⁾(x) + additive(x)` on the sector without
/// species "0", with `Λ⁽²⁾` from an independent diagonalization of the single-species `τ⁽²⁾`.
/// The residual also includes the leakage of `τ` out of that sector.
pub fn degenerate_reduction_check(
    family: BoundaryFamily,
    params: &ModelParams,
    grid: &[C],
    tolerance: f64,
) -> CheckReport {
    let name = format!("degenerate-reduction/{}/N{}", family, params.n());
    let idx = no_zero_species_indices(params.n());
    let all: Vec<usize> = (0..3usize.pow(params.n() as u32)).collect();
    let others: Vec<usize> = all.iter().copied().filter(|i| !idx.contains(i)).collect();
    let k = TQKernels::new(params);
    let q = k.q;
    let mut leak: f64 = 0.0;
    for &x in grid.iter().take(5) {
        let t = transfer(x, params, family);
        leak = leak.max(t.select(&others, &idx).max_abs() / t.max_abs().max(1.0));
    }
    let two = curves_for(
        |x| transfer(x, params, family).select(&idx, &idx),
        grid,
        DEFAULT_X0,
    );
    let one = curves_for(|x| single_species_objects(x, params).tau, grid, DEFAULT_X0);
    let (two, one) = match (two, one) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return CheckReport::failed(name, grid, tolerance),
    };
    let predicted: Vec<CurveSample> = one
        .into_iter()
        .map(|s| {
            let x = s.x;
            let r = (q.powi(3) - x * x) / (q * q - x * x);
            let add = reduction_additive_term(family, &k, x);
            CurveSample {
                x,
                values: s.values.iter().map(|l| r * l + add).collect(),
            }
        })
        .collect();
    let residual = match pair_branches(&two, &predicted) {
        Some(r) => r.max(leak),
        None => f64::INFINITY,
    };
    CheckReport::new(name, grid, residual, tolerance)
}

/// Pairs branches of `a` with branches of `b` (greedy on the worst relative deviation along the
/// grid) and returns the worst deviation of the pairing.
pub(crate) fn pair_branches(a: &[CurveSample], b: &[CurveSample]) -> Option<f64> {
    let nb = a.first()?.values.len();
    if b.first()?.values.len() != nb || a.len() != b.len() {
        return None;
    }
    let cost = |i: usize, j: usize| {
        a.iter()
            .zip(b)
            .map(|(sa, sb)| {
                let scale = sa.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
                (sa.values[i] - sb.values[j]).norm() / scale
            })
            .fold(0.0, f64::max)
    };
    let mut pairs: Vec<(f64, usize, usize)> = (0..nb)
        .flat_map(|i| (0..nb).map(move |j| (i, j)))
        .map(|(i, j)| (cost(i, j), i, j))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (mut ua, mut ub) = (vec![false; nb], vec![false; nb]);
    let mut worst: f64 = 0.0;
    for (c, i, j) in pairs {
        if !ua[i] && !ub[j] {
            ua[i] = true;
            ub[j] = true;
            worst = worst.max(c);
        }
    }
    Some(worst)
}
