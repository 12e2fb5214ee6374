//! Homogeneous T-Q relations, Bethe ansatz equations and a multistart root solver.

mod matching;
mod reduction;
mod solver;

pub use matching::{match_solutions, CompletenessReport, SolutionMatch, TRANSFER_MATCH_TOLERANCE};
pub use reduction::{
    degenerate_reduction_check, lambda2_mode_reports, reduction_additive_term, tq_lambda2,
    Lambda2Mode,
};
pub use solver::{canonicalize, solve_bae, MultistartConfig};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::JsonComplex;
use crate::model::{BoundaryFamily, ModelParams};
use crate::spectrum::SpectrumError;
use crate::tensorlinalg::{fit_scalar_on_circle, horner};

type C = Complex64;

/// Distance below which an argument counts as sitting on a pole.
pub const POLE_DISTANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BetheError {
    #[error("zero root in {0} outside the reduced form")]
    ZeroRoot(&'static str),
    #[error("x = {0} is within {POLE_DISTANCE:e} of a pole")]
    Pole(C),
    #[error("variant {variant} expects {expected_lambda} lambda and {expected_mu} mu roots for M = {m}, got {got_lambda} and {got_mu}")]
    RootCount {
        variant: TQVariant,
        m: usize,
        expected_lambda: usize,
        expected_mu: usize,
        got_lambda: usize,
        got_mu: usize,
    },
    #[error("sector M = {m} is outside the range of variant {variant} for N = {n}")]
    Sector {
        variant: TQVariant,
        m: usize,
        n: usize,
    },
    #[error("selection rules violated: {}", .0.join("; "))]
    Selection(Vec<String>),
    #[error("{0} is only defined for the first type of the first model")]
    WrongVariant(&'static str),
    #[error("homogeneous chain required (all theta = 1)")]
    Inhomogeneous,
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Fusion(#[from] crate::fusion::FusionError),
}

/// The six homogeneous T-Q relations: three per boundary family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TQVariant {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
}

impl TQVariant {
    pub const ALL: [TQVariant; 6] = [
        TQVariant::A1,
        TQVariant::A2,
        TQVariant::A3,
        TQVariant::B1,
        TQVariant::B2,
        TQVariant::B3,
    ];

    pub fn family(self) -> BoundaryFamily {
        match self {
            TQVariant::A1 | TQVariant::A2 | TQVariant::A3 => BoundaryFamily::A,
            _ => BoundaryFamily::B,
        }
    }

    /// Admissible sectors `M` for a chain of `n` sites.
    pub fn sectors(self, n: usize) -> std::ops::RangeInclusive<usize> {
        match self {
            TQVariant::A3 => 0..=n.saturating_sub(1),
            _ => 0..=n,
        }
    }

    /// Number of λ and μ roots in sector `m`.
    pub fn root_counts(self, n: usize, m: usize) -> Result<(usize, usize), BetheError> {
        let bad = || BetheError::Sector {
            variant: self,
            m,
            n,
        };
        if !self.sectors(n).contains(&m) {
            return Err(bad());
        }
        Ok(match self {
            TQVariant::A1 | TQVariant::B3 => ((n + m).checked_sub(1).ok_or_else(bad)?, m),
            TQVariant::A2 | TQVariant::B2 => (0, m),
            TQVariant::A3 => (m, n.checked_sub(2).ok_or_else(bad)?),
            TQVariant::B1 => (n - m, n),
        })
    }
}

impl std::fmt::Display for TQVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl std::str::FromStr for TQVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TQVariant::ALL
            .iter()
            .copied()
            .find(|v| v.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!(
                    "unknown variant '{}', expected one of A1 A2 A3 B1 B2 B3",
                    s.trim()
                )
            })
    }
}

/// The scalar functions entering every T-Q relation, bound to a parameter set.
#[derive(Clone, Debug)]
pub struct TQKernels {
    pub q: f64,
    pub n: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    eta1: f64,
    eta2: f64,
    theta: Vec<C>,
}

impl TQKernels {
    pub fn new(params: &ModelParams) -> Self {
        TQKernels {
            q: params.q(),
            n: params.n(),
            alpha: params.alpha(),
            beta: params.beta(),
            gamma: params.gamma(),
            delta: params.delta(),
            eta1: params.eta1(),
            eta2: params.eta2(),
            theta: params.theta().to_vec(),
        }
    }

    /// `y₁(x) = (x²−q³)/(x²−q)`.
    pub fn y1(&self, x: C) -> C {
        (x * x - self.q.powi(3)) / (x * x - self.q)
    }

    /// `y₂(x) = (x²−1)/(x²−q²)`.
    pub fn y2(&self, x: C) -> C {
        (x * x - 1.0) / (x * x - self.q * self.q)
    }

    /// `z(x) = Π_j (x/θ_j − q)(xθ_j − q)`.
    pub fn z(&self, x: C) -> C {
        let q = self.q;
        self.theta
            .iter()
            .map(|&t| (x / t - q) * (x * t - q))
            .product()
    }

    /// `f(x) = (qαx² − η₁x − qγ)(qβx² − η₂x − qδ)`.
    pub fn f(&self, x: C) -> C {
        let q = self.q;
        (q * self.alpha * x * x - self.eta1 * x - q * self.gamma)
            * (q * self.beta * x * x - self.eta2 * x - q * self.delta)
    }
}

/// Which trial function a root list belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QKind {
    /// `Q₁(x) = Π (x/λ − 1)(xλ − q)`.
    Q1,
    /// `Q₂(x) = Π (x/μ − 1)(xμ − q²)`.
    Q2,
}

impl QKind {
    fn pair(self, q: f64) -> f64 {
        match self {
            QKind::Q1 => q,
            QKind::Q2 => q * q,
        }
    }

    fn name(self) -> &'static str {
        match self {
            QKind::Q1 => "Q1",
            QKind::Q2 => "Q2",
        }
    }
}

/// `Q₁` or `Q₂` at `x`; zero roots are rejected.
pub fn q_eval(kind: QKind, roots: &[C], x: C, q: f64) -> Result<C, BetheError> {
    if roots.iter().any(|r| r.norm() == 0.0) {
        return Err(BetheError::ZeroRoot(kind.name()));
    }
    Ok(q_eval_reduced(kind, roots, x, q))
}

/// `Q₁` or `Q₂` where each zero root contributes the reduced factor `x`, the `λ → 0` limit of
/// `−λ/q·(x/λ − 1)(xλ − q)` (resp. `q²`), so ratios `Q(sx)/Q(x)` pick up a factor `s`.
pub fn q_eval_reduced(kind: QKind, roots: &[C], x: C, q: f64) -> C {
    let p = kind.pair(q);
    roots
        .iter()
        .map(|&r| {
            if r.norm() == 0.0 {
                x
            } else {
                (x / r - 1.0) * (x * r - p)
            }
        })
        .product()
}

/// Sector label and roots of one candidate eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct Roots {
    pub m: usize,
    pub lambda: Vec<C>,
    pub mu: Vec<C>,
}

impl Roots {
    pub fn new(m: usize, lambda: Vec<C>, mu: Vec<C>) -> Self {
        Roots { m, lambda, mu }
    }

    fn list(&self, kind: QKind) -> &[C] {
        match kind {
            QKind::Q1 => &self.lambda,
            QKind::Q2 => &self.mu,
        }
    }

    fn has_zero(&self) -> bool {
        self.lambda.iter().chain(&self.mu).any(|r| r.norm() == 0.0)
    }
}

/// One term of a T-Q relation: prefactor index plus the power `s` in `Q(q^s x)/Q(x)` for each Q it contains.
#[derive(Clone, Copy)]
struct Term {
    q1: Option<i32>,
    q2: Option<i32>,
}

impl Term {
    fn shift(&self, kind: QKind) -> Option<i32> {
        match kind {
            QKind::Q1 => self.q1,
            QKind::Q2 => self.q2,
        }
    }
}

fn terms(variant: TQVariant) -> [Term; 3] {
    let t = |q1, q2| Term { q1, q2 };
    match variant {
        TQVariant::A1 | TQVariant::A3 | TQVariant::B1 | TQVariant::B3 => {
            [t(Some(1), None), t(None, Some(-1)), t(Some(-1), Some(1))]
        }
        TQVariant::A2 | TQVariant::B2 => [t(None, None), t(None, Some(-1)), t(None, Some(1))],
    }
}

/// Prefactor of term `idx` (the part without Q-functions).
fn prefactor(variant: TQVariant, idx: usize, k: &TQKernels, m: usize, x: C) -> C {
    let (q, n, m) = (k.q, k.n as i32, m as i32);
    let x4 = x.powu(4);
    let qp = |e: i32| q.powi(e);
    match (variant, idx) {
        (TQVariant::A1, 0) => qp(-n - m + 1) * k.y1(x) * k.f(x) * k.z(x),
        (TQVariant::A1, 1) => qp(m - n + 4) * k.y2(x) * k.f(x / q) * k.z(q * x),
        (TQVariant::A1, _) => qp(-2) * x4 * k.y1(x) * k.y2(x) * k.f(q / x) * k.z(q * x),
        (TQVariant::A2, 0) => x4 * k.y1(x) * k.f(1.0 / x) * k.z(x),
        (TQVariant::A2, 1) => qp(m - n + 4) * k.y2(x) * k.f(x / q) * k.z(q * x),
        (TQVariant::A2, _) => qp(-m - n + 3) * k.y1(x) * k.y2(x) * k.f(x / q) * k.z(q * x),
        (TQVariant::A3, 0) => qp(-m) * k.y1(x) * k.f(x) * k.z(x),
        (TQVariant::A3, 1) => qp(-4) * x4 * k.y2(x) * k.f(q * q / x) * k.z(q * x),
        (TQVariant::A3, _) => qp(m - 2 * n + 3) * k.y1(x) * k.y2(x) * k.f(x) * k.z(q * x),
        (TQVariant::B1, 0) => qp(m - n) * x4 * k.y1(x) * k.f(1.0 / x) * k.z(x),
        (TQVariant::B1, 1) => x4 * k.y2(x) * k.f(q / x) * k.z(q * x),
        (TQVariant::B1, _) => qp(-n - m + 3) * k.y1(x) * k.y2(x) * k.f(x / q) * k.z(q * x),
        (TQVariant::B2, 0) => x4 * k.y1(x) * k.f(1.0 / x) * k.z(x),
        (TQVariant::B2, 1) => qp(m - n) * x4 * k.y2(x) * k.f(q / x) * k.z(q * x),
        (TQVariant::B2, _) => qp(-m - n + 3) * k.y1(x) * k.y2(x) * k.f(x / q) * k.z(q * x),
        (TQVariant::B3, 0) => qp(-n - m + 1) * k.y1(x) * k.f(x) * k.z(x),
        (TQVariant::B3, 1) => qp(m - n) * x4 * k.y2(x) * k.f(q / x) * k.z(q * x),
        (TQVariant::B3, _) => qp(-2) * x4 * k.y1(x) * k.y2(x) * k.f(q / x) * k.z(q * x),
    }
}

fn validate(variant: TQVariant, roots: &Roots, n: usize) -> Result<(), BetheError> {
    let (nl, nm) = variant.root_counts(n, roots.m)?;
    if roots.lambda.len() != nl || roots.mu.len() != nm {
        return Err(BetheError::RootCount {
            variant,
            m: roots.m,
            expected_lambda: nl,
            expected_mu: nm,
            got_lambda: roots.lambda.len(),
            got_mu: roots.mu.len(),
        });
    }
    if roots.has_zero() && variant != TQVariant::B1 {
        return Err(BetheError::ZeroRoot(
            if roots.lambda.iter().any(|r| r.norm() == 0.0) {
                "Q1"
            } else {
                "Q2"
            },
        ));
    }
    Ok(())
}

/// Points where some term of the relation is singular.
fn poles(roots: &Roots, q: f64) -> Vec<C> {
    let mut p = vec![C::new(0.0, 0.0)];
    for s in [q.sqrt(), q] {
        p.push(C::new(s, 0.0));
        p.push(C::new(-s, 0.0));
    }
    for kind in [QKind::Q1, QKind::Q2] {
        for &r in roots.list(kind) {
            if r.norm() > 0.0 {
                p.push(r);
                p.push(kind.pair(q) / r);
            }
        }
    }
    p
}

pub(crate) fn check_pole(x: C, roots: &Roots, q: f64) -> Result<(), BetheError> {
    if poles(roots, q)
        .iter()
        .any(|p| (x - p).norm() < POLE_DISTANCE)
    {
        return Err(BetheError::Pole(x));
    }
    Ok(())
}

/// Three-term sum without any validation; zero roots use the reduced factors.
pub(crate) fn lambda_unchecked(variant: TQVariant, roots: &Roots, k: &TQKernels, x: C) -> C {
    let q = k.q;
    terms(variant)
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut v = prefactor(variant, i, k, roots.m, x);
            for kind in [QKind::Q1, QKind::Q2] {
                if let Some(s) = t.shift(kind) {
                    let r = roots.list(kind);
                    v *= q_eval_reduced(kind, r, q.powi(s) * x, q) / q_eval_reduced(kind, r, x, q);
                }
            }
            v
        })
        .sum()
}

/// Transfer-matrix eigenvalue `Λ(x)` parameterized by a T-Q relation.
pub fn tq_lambda(variant: TQVariant, roots: &Roots, k: &TQKernels, x: C) -> Result<C, BetheError> {
    validate(variant, roots, k.n)?;
    check_pole(x, roots, k.q)?;
    Ok(lambda_unchecked(variant, roots, k, x))
}

/// Radius of the averaging circle used by [`tq_lambda_continued`].
const CONTINUATION_RADIUS: f64 = 1e-3;

/// `Λ(x)` continued through removable singularities: near a pole of the individual terms the
/// value is the mean over a small circle, which is exact up to `O(r¹⁶)` for a polynomial `Λ`.
/// Only meaningful when the roots solve the Bethe equations.
pub fn tq_lambda_continued(
    variant: TQVariant,
    roots: &Roots,
    k: &TQKernels,
    x: C,
) -> Result<C, BetheError> {
    validate(variant, roots, k.n)?;
    if check_pole(x, roots, k.q).is_ok() {
        return Ok(lambda_unchecked(variant, roots, k, x));
    }
    let pts = 16;
    let v: C = (0..pts)
        .map(|j| {
            let phase = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / pts as f64;
            lambda_unchecked(
                variant,
                roots,
                k,
                x + C::from_polar(CONTINUATION_RADIUS, phase),
            )
        })
        .sum::<C>()
        / pts as f64;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(BetheError::Pole(x))
    }
}

/// Left-hand sides of the Bethe equations (each should equal −1), ordered λ roots then μ roots.
/// Zero roots carry no equation.
pub(crate) fn bae_lhs(variant: TQVariant, roots: &Roots, k: &TQKernels) -> Vec<C> {
    let q = k.q;
    let ts = terms(variant);
    let mut out = Vec::new();
    for kind in [QKind::Q1, QKind::Q2] {
        for &r in roots.list(kind) {
            if r.norm() == 0.0 {
                continue;
            }
            let vals: Vec<C> = ts
                .iter()
                .enumerate()
                .filter(|(_, t)| t.shift(kind).is_some())
                .map(|(i, t)| {
                    let mut v = prefactor(variant, i, k, roots.m, r);
                    for other in [QKind::Q1, QKind::Q2] {
                        if let Some(s) = t.shift(other) {
                            let list = roots.list(other);
                            v *= q_eval_reduced(other, list, q.powi(s) * r, q);
                            if other != kind {
                                v /= q_eval_reduced(other, list, r, q);
                            }
                        }
                    }
                    v
                })
                .collect();
            out.push(vals[1] / vals[0]);
        }
    }
    out
}

/// Selection-rule violations at tolerance `tol`; zero roots are exempt only for `B1`.
pub fn selection_violations(variant: TQVariant, roots: &Roots, q: f64, tol: f64) -> Vec<String> {
    let mut bad = Vec::new();
    let zero_ok = variant == TQVariant::B1;
    let (l, m) = (&roots.lambda, &roots.mu);
    let near = |a: C, b: C| (a - b).norm() < tol;
    for (i, &a) in l.iter().enumerate() {
        if a.norm() == 0.0 && zero_ok {
            continue;
        }
        if a.norm() < tol {
            bad.push(format!("lambda_{i} = 0"));
            continue;
        }
        if near(a, C::new(1.0, 0.0)) || near(a, C::new(q, 0.0)) {
            bad.push(format!("lambda_{i} = {a} is 1 or q"));
        }
        for (j, &b) in l.iter().enumerate().skip(i + 1) {
            if b.norm() == 0.0 {
                continue;
            }
            if near(a, b) {
                bad.push(format!("lambda_{i} = lambda_{j}"));
            }
            if near(a, q / b) {
                bad.push(format!("lambda_{i} = q/lambda_{j}"));
            }
        }
        for (j, &b) in m.iter().enumerate() {
            if near(a, b) {
                bad.push(format!("lambda_{i} = mu_{j}"));
            }
        }
    }
    for (i, &a) in m.iter().enumerate() {
        if a.norm() == 0.0 && zero_ok {
            continue;
        }
        if a.norm() < tol {
            bad.push(format!("mu_{i} = 0"));
            continue;
        }
        for (j, &b) in m.iter().enumerate().skip(i + 1) {
            if b.norm() == 0.0 {
                continue;
            }
            if near(a, b) {
                bad.push(format!("mu_{i} = mu_{j}"));
            }
            if near(a, q * q / b) {
                bad.push(format!("mu_{i} = q^2/mu_{j}"));
            }
        }
    }
    bad
}

fn checked_lhs(variant: TQVariant, roots: &Roots, k: &TQKernels) -> Result<Vec<C>, BetheError> {
    validate(variant, roots, k.n)?;
    let bad = selection_violations(variant, roots, k.q, 1e-8);
    if !bad.is_empty() {
        return Err(BetheError::Selection(bad));
    }
    Ok(bae_lhs(variant, roots, k))
}

/// Product-form residuals `LHS + 1`, one per nonzero root (λ first, then μ).
pub fn bae_residual(
    variant: TQVariant,
    roots: &Roots,
    k: &TQKernels,
) -> Result<Vec<C>, BetheError> {
    Ok(checked_lhs(variant, roots, k)?
        .into_iter()
        .map(|v| v + 1.0)
        .collect())
}

/// Log-form residuals `log(−LHS)` on the principal branch, i.e. `log LHS − log(−1)` mod 2πi.
pub fn bae_residual_log(
    variant: TQVariant,
    roots: &Roots,
    k: &TQKernels,
) -> Result<Vec<C>, BetheError> {
    Ok(checked_lhs(variant, roots, k)?
        .into_iter()
        .map(|v| (-v).ln())
        .collect())
}

/// Largest relative deviation of `Λ` from its degree-`2N+4` interpolant at off-circle points;
/// small exactly when the Bethe equations remove every pole.
pub fn polynomial_defect(variant: TQVariant, roots: &Roots, k: &TQKernels) -> f64 {
    let degree = 2 * k.n + 4;
    let phase = 2.0 * std::f64::consts::PI * 0.37 / (degree + 1) as f64;
    let coeffs = fit_scalar_on_circle(
        |x| lambda_unchecked(variant, roots, k, x),
        degree,
        1.3,
        phase,
    );
    [
        C::new(0.45, 0.2),
        C::new(2.1, -0.7),
        C::new(-0.8, 1.7),
        C::new(3.1, 0.4),
    ]
    .iter()
    .map(|&x| {
        let v = lambda_unchecked(variant, roots, k, x);
        let d = (horner(&coeffs, x) - v).norm() / v.norm().max(1.0);
        if d.is_finite() {
            d
        } else {
            f64::INFINITY
        }
    })
    .fold(0.0, f64::max)
}

/// How a solution with zero roots was reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroReduction {
    pub zero_lambda: usize,
    pub zero_mu: usize,
}

/// A converged, canonicalized root set.
#[derive(Clone, Debug, PartialEq)]
pub struct BetheSolution {
    pub variant: TQVariant,
    pub roots: Roots,
    /// Max `|LHS + 1|` over all equations.
    pub residual: f64,
    pub e_l: C,
    pub reduction: Option<ZeroReduction>,
}

impl BetheSolution {
    pub fn m(&self) -> usize {
        self.roots.m
    }

    pub fn lambda(&self) -> &[C] {
        &self.roots.lambda
    }

    pub fn mu(&self) -> &[C] {
        &self.roots.mu
    }

    pub fn to_json(&self) -> BetheSolutionJson {
        BetheSolutionJson {
            variant: self.variant,
            m: self.roots.m,
            lambda: self.roots.lambda.iter().map(|&c| c.into()).collect(),
            mu: self.roots.mu.iter().map(|&c| c.into()).collect(),
            residual: self.residual,
            e_l: self.e_l.into(),
            reduction: self.reduction,
        }
    }
}

/// Serialized form of [`BetheSolution`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheSolutionJson {
    pub variant: TQVariant,
    #[serde(rename = "M")]
    pub m: usize,
    pub lambda: Vec<JsonComplex>,
    pub mu: Vec<JsonComplex>,
    pub residual: f64,
    #[serde(rename = "E_L")]
    pub e_l: JsonComplex,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reduction: Option<ZeroReduction>,
}

/// Builds a solution record from given roots: residual and `E_L` are recomputed.
pub fn evaluate_solution(
    variant: TQVariant,
    roots: Roots,
    params: &ModelParams,
) -> Result<BetheSolution, BetheError> {
    if !params.is_homogeneous() {
        return Err(BetheError::Inhomogeneous);
    }
    let k = TQKernels::new(params);
    let residual = bae_residual(variant, &roots, &k)?
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    let e_l = crate::spectrum::el_from_roots(variant, &roots.lambda, params)?;
    let zl = roots.lambda.iter().filter(|r| r.norm() == 0.0).count();
    let zm = roots.mu.iter().filter(|r| r.norm() == 0.0).count();
    let reduction = (zl + zm > 0).then_some(ZeroReduction {
        zero_lambda: zl,
        zero_mu: zm,
    });
    Ok(BetheSolution {
        variant,
        roots,
        residual,
        e_l,
        reduction,
    })
}
