use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    bae_lhs, polynomial_defect, selection_violations, BetheError, BetheSolution, Roots, TQKernels,
    TQVariant, ZeroReduction,
};
use crate::model::ModelParams;
use crate::spectrum::el_from_roots;
use crate::tables::seeds_for;
use crate::tensorlinalg::{cmp_complex, solve, CMatrix, Lu};

type C = Complex64;

/// Multistart budget and acceptance thresholds for [`solve_bae`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultistartConfig {
    /// Random starting points per sector.
    pub random_seeds: usize,
    /// Random starts at each shifted `q` for continuation (0 disables it).
    pub continuation_seeds: usize,
    /// Also start from the printed table roots when the parameters are a preset.
    pub table_seeds: bool,
    pub seed: u64,
    /// Accepted max `|LHS + 1|`.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        MultistartConfig {
            random_seeds: 200,
            continuation_seeds: 40,
            table_seeds: true,
            seed: 0x5eed,
            tolerance: 1e-9,
            max_iter: 80,
        }
    }
}

const SELECTION_TOL: f64 = 1e-5;
const POLY_TOL: f64 = 1e-8;
const DEDUP_TOL: f64 = 1e-6;

/// Resolves `λ ↔ q/λ` to `|λ| ≤ √q` and `μ ↔ q²/μ` to `|μ| ≤ q` (ties: nonnegative argument),
/// then sorts each list.
pub fn canonicalize(roots: &Roots, q: f64) -> Roots {
    fn pick(r: C, p: f64) -> C {
        if r.norm() == 0.0 {
            return r;
        }
        let s = p / r;
        let (a, b) = (r.norm(), s.norm());
        if (a - b).abs() <= 1e-9 * a.max(1.0) {
            if r.arg() >= 0.0 {
                r
            } else {
                s
            }
        } else if a < b {
            r
        } else {
            s
        }
    }
    let mut lambda: Vec<C> = roots.lambda.iter().map(|&r| pick(r, q)).collect();
    let mut mu: Vec<C> = roots.mu.iter().map(|&r| pick(r, q * q)).collect();
    lambda.sort_by(cmp_complex);
    mu.sort_by(cmp_complex);
    Roots::new(roots.m, lambda, mu)
}

/// Multiset comparison, so near-ties in the sort order do not split duplicates.
fn same_multiset(x: &[C], y: &[C]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut used = vec![false; y.len()];
    x.iter().all(|u| {
        let hit =
            (0..y.len()).find(|&j| !used[j] && (u - y[j]).norm() < DEDUP_TOL * u.norm().max(1.0));
        if let Some(j) = hit {
            used[j] = true;
        }
        hit.is_some()
    })
}

fn same_roots(a: &Roots, b: &Roots) -> bool {
    a.m == b.m && same_multiset(&a.lambda, &b.lambda) && same_multiset(&a.mu, &b.mu)
}

/// Layout of one solve: how many leading λ and μ entries are pinned at zero.
#[derive(Clone, Copy, Debug)]
struct Template {
    m: usize,
    lambda: usize,
    mu: usize,
    zero_lambda: usize,
    zero_mu: usize,
}

impl Template {
    fn free(&self) -> (usize, usize) {
        (self.lambda - self.zero_lambda, self.mu - self.zero_mu)
    }

    fn assemble(&self, v: &[C]) -> Roots {
        let (fl, _) = self.free();
        let zero = C::new(0.0, 0.0);
        let mut lambda = vec![zero; self.zero_lambda];
        lambda.extend_from_slice(&v[..fl]);
        let mut mu = vec![zero; self.zero_mu];
        mu.extend_from_slice(&v[fl..]);
        Roots::new(self.m, lambda, mu)
    }
}

fn log_residual(variant: TQVariant, t: &Template, k: &TQKernels, v: &[C]) -> Option<Vec<C>> {
    if v.iter().any(|z| !(z.norm() > 1e-12 && z.norm() < 1e12)) {
        return None;
    }
    let out: Vec<C> = bae_lhs(variant, &t.assemble(v), k)
        .into_iter()
        .map(|l| (-l).ln())
        .collect();
    out.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then_some(out)
}

fn max_norm(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn jacobian(variant: TQVariant, t: &Template, k: &TQKernels, v: &[C]) -> Option<CMatrix> {
    let n = v.len();
    let mut jac = CMatrix::zeros(n, n);
    for j in 0..n {
        let h = 1e-7 * v[j].norm().max(1.0);
        let mut vp = v.to_vec();
        let mut vm = v.to_vec();
        vp[j] += h;
        vm[j] -= h;
        let (fp, fm) = (
            log_residual(variant, t, k, &vp)?,
            log_residual(variant, t, k, &vm)?,
        );
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Some(jac)
}

/// Damped Newton on the log-form equations with a central-difference Jacobian.
fn newton(
    variant: TQVariant,
    t: &Template,
    k: &TQKernels,
    v0: Vec<C>,
    max_iter: usize,
) -> Option<Vec<C>> {
    let mut v = v0;
    for _ in 0..max_iter {
        let f = log_residual(variant, t, k, &v)?;
        let nf = max_norm(&f);
        if nf < 1e-12 {
            return Some(v);
        }
        let jac = jacobian(variant, t, k, &v)?;
        let rhs: Vec<C> = f.iter().map(|z| -z).collect();
        let dv = solve(&jac, &rhs).ok()?;
        let mut step = 1.0;
        while step > 1e-3 {
            let trial: Vec<C> = v.iter().zip(&dv).map(|(a, d)| a + d * step).collect();
            if log_residual(variant, t, k, &trial).is_some_and(|ft| max_norm(&ft) < nf) {
                break;
            }
            step /= 2.0;
        }
        v = v.iter().zip(&dv).map(|(a, d)| a + d * step).collect();
    }
    let f = log_residual(variant, t, k, &v)?;
    (max_norm(&f) < 1e-12).then_some(v)
}

fn annulus(rng: &mut ChaCha8Rng, q: f64) -> C {
    let r = rng.gen_range((0.05f64).ln()..(3.0 * q.sqrt()).ln()).exp();
    C::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Even draws: every root on the annulus. Odd draws: each root near 1 with probability 0.7.
fn random_start(rng: &mut ChaCha8Rng, n: usize, q: f64, mixed: bool) -> Vec<C> {
    (0..n)
        .map(|_| {
            if mixed && rng.gen_bool(0.7) {
                let r = rng.gen_range((0.005f64).ln()..(0.6f64).ln()).exp();
                C::new(1.0, 0.0) + C::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            } else {
                annulus(rng, q)
            }
        })
        .collect()
}

fn seed_rng(base: u64, variant: TQVariant, t: &Template, stream: u64, i: usize) -> ChaCha8Rng {
    let tag = (variant as u64) << 56
        ^ (t.m as u64) << 48
        ^ (t.zero_lambda as u64) << 40
        ^ (t.zero_mu as u64) << 32;
    ChaCha8Rng::seed_from_u64(base ^ tag ^ stream << 24 ^ i as u64)
}

/// Solves at a shifted `q` from random starts and follows each solution back to the target `q`.
fn continuation(
    variant: TQVariant,
    t: &Template,
    params: &ModelParams,
    cfg: &MultistartConfig,
    shift: f64,
    stream: u64,
) -> Vec<Vec<C>> {
    let q = params.q();
    let q_far = q + shift;
    if q_far <= 0.05 || (q_far - 1.0).abs() < 0.05 || ((q - 1.0) * (q_far - 1.0)) < 0.0 {
        return Vec::new();
    }
    let (fl, fm) = t.free();
    const STEPS: usize = 10;
    let kernels: Vec<TQKernels> = (0..=STEPS)
        .map(|s| {
            let qs = q_far + (q - q_far) * s as f64 / STEPS as f64;
            TQKernels::new(&params.with_q(qs).expect("q stays away from 1"))
        })
        .collect();
    (0..cfg.continuation_seeds)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = seed_rng(cfg.seed, variant, t, stream, i);
            let v0 = random_start(&mut rng, fl + fm, q_far, i % 2 == 1);
            let mut v = newton(variant, t, &kernels[0], v0, cfg.max_iter)?;
            for k in &kernels[1..] {
                v = newton(variant, t, k, v, cfg.max_iter)?;
            }
            Some(v)
        })
        .collect()
}

fn accept(
    variant: TQVariant,
    t: &Template,
    params: &ModelParams,
    k: &TQKernels,
    v: &[C],
    cfg: &MultistartConfig,
) -> Option<BetheSolution> {
    // equations that hold identically (singular Jacobian) leave the roots undetermined
    if !v.is_empty() {
        let jac = jacobian(variant, t, k, v)?;
        if jac.max_abs() < 1e-5 {
            return None;
        }
        Lu::with_tolerance(&jac, 1e-8).ok()?;
    }
    let roots = t.assemble(v);
    if !selection_violations(variant, &roots, k.q, SELECTION_TOL).is_empty() {
        return None;
    }
    let residual = max_norm(
        &bae_lhs(variant, &roots, k)
            .iter()
            .map(|l| l + 1.0)
            .collect::<Vec<_>>(),
    );
    if !(residual < cfg.tolerance) || !(polynomial_defect(variant, &roots, k) < POLY_TOL) {
        return None;
    }
    let roots = super::canonicalize(&roots, k.q);
    let e_l = if params.is_homogeneous() {
        el_from_roots(variant, &roots.lambda, params).ok()?
    } else {
        C::new(f64::NAN, f64::NAN)
    };
    Some(BetheSolution {
        variant,
        roots,
        residual,
        e_l,
        reduction: (t.zero_lambda + t.zero_mu > 0).then_some(ZeroReduction {
            zero_lambda: t.zero_lambda,
            zero_mu: t.zero_mu,
        }),
    })
}

/// Multistart Newton solve of the Bethe equations in sector `m`: table seeds, random starts and
/// continuation in `q`, filtered by the selection rules and by exact polynomiality of `Λ`,
/// canonicalized and deduplicated. For `B1` the zero-root reductions are searched as well.
/// An empty result means nothing converged within the budget.
pub fn solve_bae(
    variant: TQVariant,
    m: usize,
    params: &ModelParams,
    cfg: &MultistartConfig,
) -> Result<Vec<BetheSolution>, BetheError> {
    let n = params.n();
    let (nl, nm) = variant.root_counts(n, m)?;
    let k = TQKernels::new(params);
    let q = k.q;
    let base = Template {
        m,
        lambda: nl,
        mu: nm,
        zero_lambda: 0,
        zero_mu: 0,
    };
    let mut templates = vec![base];
    if variant == TQVariant::B1 {
        templates.extend((1..=nm).map(|z| Template {
            zero_lambda: nl,
            zero_mu: z,
            ..base
        }));
    }
    let mut found: Vec<BetheSolution> = Vec::new();
    for t in &templates {
        let (fl, fm) = t.free();
        let mut candidates: Vec<Vec<C>> = Vec::new();
        if fl + fm == 0 {
            candidates.push(Vec::new());
        } else {
            let mut starts: Vec<Vec<C>> = Vec::new();
            if cfg.table_seeds {
                for (l, u) in seeds_for(variant, m, params) {
                    let (zl, zm) = (
                        l.iter().filter(|r| r.norm() == 0.0).count(),
                        u.iter().filter(|r| r.norm() == 0.0).count(),
                    );
                    if (zl, zm) == (t.zero_lambda, t.zero_mu) {
                        starts.push(l.into_iter().chain(u).filter(|r| r.norm() > 0.0).collect());
                    }
                }
            }
            starts.extend((0..cfg.random_seeds).map(|i| {
                let mut rng = seed_rng(cfg.seed, variant, t, 0, i);
                random_start(&mut rng, fl + fm, q, i % 2 == 1)
            }));
            candidates = starts
                .into_par_iter()
                .filter_map(|v0| newton(variant, t, &k, v0, cfg.max_iter))
                .collect();
            if cfg.continuation_seeds > 0 {
                candidates.extend(continuation(variant, t, params, cfg, 0.2, 1));
                candidates.extend(continuation(variant, t, params, cfg, -0.2, 2));
            }
        }
        for v in candidates {
            if let Some(sol) = accept(variant, t, params, &k, &v, cfg) {
                if !found.iter().any(|f| same_roots(&f.roots, &sol.roots)) {
                    found.push(sol);
                }
            }
        }
    }
    found.sort_by(|a, b| {
        cmp_complex(&a.e_l, &b.e_l)
            .then_with(|| a.roots.lambda.len().cmp(&b.roots.lambda.len()))
            .then_with(|| {
                let key = |s: &BetheSolution| {
                    s.roots
                        .lambda
                        .iter()
                        .chain(&s.roots.mu)
                        .map(|z| (z.re, z.im))
                        .collect::<Vec<_>>()
                };
                key(a)
                    .partial_cmp(&key(b))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    Ok(found)
}
