//! Executable, tolerance-reported checks of the algebraic identities of the model.

mod asymptotics;
mod fused;
mod local;

#[cfg(test)]
pub(crate) use asymptotics::multiset_gap;
pub use asymptotics::{
    asymptotic_leading, check_asymptotics, check_g_pattern, t1_sector_value, t1_spectrum,
    t2_spectrum,
};
pub use fused::{
    check_commuting, check_markov_from_transfer, check_polynomiality, check_production,
    check_special_points, check_tau2_zeros, check_tau3, delta_q, SpecialPointConstants,
};
pub use local::{
    check_dual_re, check_dual_re_with, check_k_properties, check_multispecies_re,
    check_r_properties, check_re, check_re_with, check_ybe, check_ybe_with,
};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fusion::{Boundary, FamilyBoundary, FusionError};
use crate::json::JsonComplex;
use crate::model::{BoundaryFamily, ModelError, ModelParams, MultiKKind, MultiKVariant};
use crate::tensorlinalg::{CMatrix, LinalgError};

type C = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Precondition(String),
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub points: Vec<JsonComplex>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, points: &[C], residual: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.into(),
            points: points.iter().map(|&p| p.into()).collect(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual < tolerance,
        }
    }

    /// Report for a check that could not be evaluated.
    pub fn failed(name: impl Into<String>, points: &[C], tolerance: f64) -> Self {
        Self::new(name, points, f64::INFINITY, tolerance)
    }
}

/// Tolerance, sample count and base seed shared by the checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckConfig {
    pub tolerance: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            tolerance: 1e-8,
            trials: 10,
            seed: 0x5eed,
        }
    }
}

impl CheckConfig {
    /// RNG derived from the check name, so results do not depend on scheduling.
    pub fn rng_for(&self, name: &str) -> ChaCha8Rng {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in name.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        ChaCha8Rng::seed_from_u64(h ^ self.seed)
    }
}

/// Points the spectral-parameter samplers keep away from.
pub fn forbidden_points(q: f64) -> Vec<C> {
    let mut pts = vec![C::new(0.0, 0.0)];
    for p in [
        1.0,
        q.sqrt(),
        q,
        q.powf(1.5),
        1.0 / q,
        1.0 / q.sqrt(),
        q * q,
        q.powi(3),
    ] {
        pts.push(C::new(p, 0.0));
        pts.push(C::new(-p, 0.0));
    }
    pts
}

fn is_safe(x: C, q: f64) -> bool {
    forbidden_points(q).iter().all(|p| (x - p).norm() > 1e-2)
}

/// Rejection sample on the annulus `0.3 < |x| < 3` away from forbidden points.
pub fn sample_point(rng: &mut ChaCha8Rng, q: f64) -> C {
    loop {
        let x = C::from_polar(
            rng.gen_range(0.3..3.0),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        if is_safe(x, q) {
            return x;
        }
    }
}

/// A pair whose ratio and product are also safe.
pub fn sample_pair(rng: &mut ChaCha8Rng, q: f64) -> (C, C) {
    loop {
        let (a, b) = (sample_point(rng, q), sample_point(rng, q));
        if is_safe(a / b, q) && is_safe(a * b, q) {
            return (a, b);
        }
    }
}

/// Distinct unit-modulus inhomogeneities `θ_j = e^{iφ_j}`, `φ_j ∈ (−0.3, 0.3)`.
pub fn random_theta(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    let mut phases: Vec<f64> = Vec::with_capacity(n);
    while phases.len() < n {
        let p = rng.gen_range(-0.3..0.3);
        if phases.iter().all(|&o: &f64| (o - p).abs() > 1e-2) {
            phases.push(p);
        }
    }
    phases.into_iter().map(|p| C::from_polar(1.0, p)).collect()
}

/// Boundary with one entry of K⁻ or K⁺ shifted by `1e-3` times the matrix scale; used as a negative control.
#[derive(Clone, Debug)]
pub struct PerturbedBoundary {
    pub inner: FamilyBoundary,
    pub perturb_plus: bool,
    pub entry: (usize, usize),
    pub amount: f64,
}

impl PerturbedBoundary {
    pub fn new(params: &ModelParams, family: BoundaryFamily, perturb_plus: bool) -> Self {
        PerturbedBoundary {
            inner: FamilyBoundary {
                params: params.clone(),
                family,
            },
            perturb_plus,
            entry: (0, 0),
            amount: 1e-3,
        }
    }

    fn bump(&self, mut k: CMatrix) -> CMatrix {
        let s = k.max_abs().max(1.0);
        k[self.entry] += C::new(self.amount * s, 0.0);
        k
    }
}

impl Boundary for PerturbedBoundary {
    fn k_minus(&self, x: C) -> CMatrix {
        let k = self.inner.k_minus(x);
        if self.perturb_plus {
            k
        } else {
            self.bump(k)
        }
    }
    fn k_plus(&self, x: C) -> CMatrix {
        let k = self.inner.k_plus(x);
        if self.perturb_plus {
            self.bump(k)
        } else {
            k
        }
    }
}

fn family_boundary(params: &ModelParams, family: BoundaryFamily) -> FamilyBoundary {
    FamilyBoundary {
        params: params.clone(),
        family,
    }
}

/// Runs every check for each family and chain length. Rates come from `base`; θ is redrawn per
/// chain length. Failures are data; the returned order is fixed.
pub fn run_suite(
    base: &[(BoundaryFamily, ModelParams)],
    n_list: &[usize],
    cfg: &CheckConfig,
) -> Vec<CheckReport> {
    type Job<'a> = Box<dyn Fn() -> Vec<CheckReport> + Send + Sync + 'a>;
    let mut jobs: Vec<Job> = Vec::new();
    if let Some((_, p)) = base.first() {
        let p = p.clone();
        jobs.push(Box::new(move || {
            (1..=3).map(|m| check_ybe(&p, m, cfg)).collect()
        }));
    }
    for (family, params) in base {
        let (family, params) = (*family, params.clone());
        let p = params.clone();
        jobs.push(Box::new(move || {
            vec![
                check_r_properties(&p, cfg),
                check_re(&p, family, cfg),
                check_dual_re(&p, family, cfg),
                check_k_properties(&p, family, &family_boundary(&p, family), cfg),
            ]
        }));
        for &n in n_list {
            let mut rng = cfg.rng_for(&format!("theta/{}/{}", family, n));
            let theta = random_theta(&mut rng, n);
            let Ok(p) = params.with_theta(theta) else {
                jobs.push(Box::new(move || {
                    vec![CheckReport::failed(
                        format!("params/{}/N{}", family, n),
                        &[],
                        cfg.tolerance,
                    )]
                }));
                continue;
            };
            let p1 = p.clone();
            jobs.push(Box::new(move || {
                vec![check_commuting(
                    &p1,
                    family,
                    &family_boundary(&p1, family),
                    cfg,
                )]
            }));
            let p1 = p.clone();
            jobs.push(Box::new(move || {
                let b = family_boundary(&p1, family);
                let mut out = check_production(&p1, family, &b, cfg);
                out.extend(check_tau2_zeros(&p1, family, &b, cfg));
                out.push(check_tau3(&p1, family, &b, cfg));
                out.push(check_polynomiality(&p1, family, &b, cfg));
                out
            }));
            let p1 = p.clone();
            jobs.push(Box::new(move || {
                vec![check_markov_from_transfer(
                    &p1,
                    family,
                    &family_boundary(&p1, family),
                    cfg,
                )]
            }));
            if family == BoundaryFamily::A {
                let p1 = p.clone();
                jobs.push(Box::new(move || {
                    let mut out = check_special_points(&p1, &family_boundary(&p1, family), cfg);
                    out.extend(check_asymptotics(&p1, cfg));
                    out.push(check_g_pattern(&p1, cfg));
                    out
                }));
            }
        }
    }
    if let Some((_, p)) = base.first() {
        let p = p.clone();
        jobs.push(Box::new(move || multispecies_reports(&p, cfg)));
    }
    jobs.par_iter()
        .map(|job| job())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Rank-m reflection equation for all multi-species variants, `m = 2…4`.
pub fn multispecies_reports(params: &ModelParams, cfg: &CheckConfig) -> Vec<CheckReport> {
    let kinds = [
        MultiKKind::Even,
        MultiKKind::Odd,
        MultiKKind::Type3,
        MultiKKind::Type4,
        MultiKKind::Type5,
    ];
    let mut out = Vec::new();
    for m in 2..=4 {
        for kind in kinds {
            if let Ok(v) = MultiKVariant::new(kind, m) {
                out.push(check_multispecies_re(params, v, cfg));
            }
        }
    }
    out
}

/// The default suite: both presets, `N ∈ {1, 2, 3}`.
pub fn default_suite(cfg: &CheckConfig) -> Vec<CheckReport> {
    let base: Vec<_> = BoundaryFamily::ALL
        .iter()
        .map(|&f| (f, ModelParams::preset(f, 1)))
        .collect();
    run_suite(&base, &[1, 2, 3], cfg)
}
