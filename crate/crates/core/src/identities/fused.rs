use num_complex::Complex64;

use super::{sample_pair, sample_point, CheckConfig, CheckReport, IdentityError};
use crate::fusion::{Boundary, DoubleRow};
use crate::model::{markov_generator, rho2, z_kernel, BoundaryFamily, ModelParams, ScalarKernels};
use crate::tensorlinalg::{fit_on_circle, relative_residual, CMatrix};

type C = Complex64;

fn re(v: f64) -> C {
    C::new(v, 0.0)
}

/// Eigenvalue of `τ₃(x)`.
pub fn delta_q(x: C, params: &ModelParams, family: BoundaryFamily) -> C {
    let k = ScalarKernels::new(params);
    let (q, a, b, g, d, e1, e2) = (k.q, k.alpha, k.beta, k.gamma, k.delta, k.eta1, k.eta2);
    let n = params.n() as i32;
    let x2 = x * x;
    let z = |y: C| z_kernel(y, params);
    let common = q.powi(-2 * n + 6) * (1.0 - q.powi(4) * x2) * (q.powi(3) - x2)
        / ((1.0 - q * x2) * (1.0 - x2))
        * z(x)
        * z(q * q * x)
        * z(q.powi(3) * x)
        * rho2(q, q * x2)
        * rho2(q, q * q * x2)
        * rho2(q, q.powi(3) * x2);
    let inner = (q * a * x2 - e1 * x - q * g)
        * (q * b * x2 - e2 * x - q * d)
        * (q * g * x2 + e1 * x - q * a)
        * (q * d * x2 + e2 * x - q * b);
    let outer = match family {
        BoundaryFamily::A => (q * q * a * x2 - e1 * x - g) * (q * q * b * x2 - e2 * x - d),
        BoundaryFamily::B => (q * q * g * x2 + e1 * x - a) * (q * q * d * x2 + e2 * x - b),
    };
    common * inner * outer
}

/// The constants `e₁…e₆` for one sign choice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecialPointConstants {
    pub sign: f64,
    pub e1: C,
    pub e2: C,
    pub e3: C,
    pub e4: C,
    pub e5: C,
    pub e6: C,
}

impl SpecialPointConstants {
    pub fn new(params: &ModelParams, sign: f64) -> Self {
        let k = ScalarKernels::new(params);
        let (q, a, b, g, d, e1, e2, s) =
            (k.q, k.alpha, k.beta, k.gamma, k.delta, k.eta1, k.eta2, sign);
        let sq = q.sqrt();
        SpecialPointConstants {
            sign,
            e1: re(q * g + s * e1 - q * a),
            e2: re(q.powi(3) * d + s * q.powf(2.5) * e2 - q.powi(4) * b),
            e3: re((q.powi(3) - 1.0) / (q - 1.0) * (q * d + s * e2 - q * b)),
            e4: re((1.0 - q.powi(3)) / (q * q - q.powi(3))
                * (q.powi(3) * g + s * q.powf(2.5) * e1 - q.powi(4) * a)),
            e5: re((q.powi(4) - 1.0)
                * (q.powi(3) - 1.0)
                * (q * g + s * q * e1 - q.powi(3) * a)
                * (q * q * g + s * q * e1 - q * q * a)),
            e6: re((q.powi(4) - 1.0)
                * (q.powi(3) - 1.0)
                * (q * d + s * sq * e2 - q * q * b)
                * (q * q * d + s * sq * e2 - q * b)),
        }
    }
}

fn tag(family: BoundaryFamily, params: &ModelParams) -> String {
    format!("{}/N{}", family, params.n())
}

fn rel_commutator(a: &CMatrix, b: &CMatrix) -> f64 {
    let s = a.frobenius_norm() * b.frobenius_norm();
    if s == 0.0 {
        return 0.0;
    }
    a.commutator(b).frobenius_norm() / s
}

/// `[τ_j(x), τ_k(y)] = 0` for all `j, k ∈ {1, 2, 3}`.
pub fn check_commuting(
    params: &ModelParams,
    family: BoundaryFamily,
    b: &dyn Boundary,
    cfg: &CheckConfig,
) -> CheckReport {
    let name = format!("commuting/{}", tag(family, params));
    let dr = DoubleRow::new(params, b);
    let mut rng = cfg.rng_for(&name);
    let mut pts = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials {
        let (x, y) = sample_pair(&mut rng, params.q());
        pts.extend([x, y]);
        let eval = |z: C| -> Result<Vec<CMatrix>, IdentityError> {
            (1..=3).map(|m| Ok(dr.fused(m, z)?)).collect()
        };
        let (Ok(tx), Ok(ty)) = (eval(x), eval(y)) else {
            return CheckReport::failed(name, &pts, cfg.tolerance);
        };
        for a in &tx {
            for bm in &ty {
                worst = worst.max(rel_commutator(a, bm));
            }
        }
    }
    CheckReport::new(name, &pts, worst, cfg.tolerance)
}

/// `τ(θ_j^{±1})τ_m(qθ_j^{±1}) = τ_{m+1}(θ_j^{±1}) Π_{k=1}^m ρ₂(q^kθ_j^{±2})⁻¹`, `m = 1, 2`.
pub fn check_production(
    params: &ModelParams,
    family: BoundaryFamily,
    b: &dyn Boundary,
    cfg: &CheckConfig,
) -> Vec<CheckReport> {
    let q = params.q();
    let dr = DoubleRow::new(params, b);
    (1..=2)
        .map(|m| {
            let name = format!("production/m{}/{}", m, tag(family, params));
            let mut pts = Vec::new();
            let mut worst: f64 = 0.0;
            for &th in params.theta() {
                for t in [th, 1.0 / th] {
                    pts.push(t);
                    let res = (|| -> Result<f64, IdentityError> {
                        let lhs = dr.fused(1, t)?.matmul(&dr.fused(m, t * q)?);
                        let mut factor = C::new(1.0, 0.0);
                        for k in 1..=m {
                            factor /= rho2(q, q.powi(k as i32) * t * t);
                        }
                        let rhs = dr.fused(m + 1, t)?.scale(factor);
                        Ok(relative_residual(&lhs, &rhs))
                    })();
                    worst = worst.max(res.unwrap_or(f64::INFINITY));
                }
            }
            CheckReport::new(name, &pts, worst, cfg.tolerance)
        })
        .collect()
}

/// `τ₂(θ_j^{±1}/q) = 0`, measured against `‖τ₂‖` at a nearby generic point.
pub fn check_tau2_zeros(
    params: &ModelParams,
    family: BoundaryFamily,
    b: &dyn Boundary,
    cfg: &CheckConfig,
) -> Vec<CheckReport> {
    let q = params.q();
    let dr = DoubleRow::new(params, b);
    let name = format!("tau2-zeros/{}", tag(family, params));
    let mut pts = Vec::new();
    let mut worst: f64 = 0.0;
    for &th in params.theta() {
        for t in [th / q, 1.0 / (th * q)] {
            pts.push(t);
            let res = (|| -> Result<f64, IdentityError> {
                let at = dr.fused(2, t)?.frobenius_norm();
                let near = dr.fused(2, t * C::from_polar(1.05, 0.05))?.frobenius_norm();
                Ok(at / near.max(f64::MIN_POSITIVE))
            })();
            worst = worst.max(res.unwrap_or(f64::INFINITY));
        }
    }
    vec![CheckReport::new(name, &pts, worst, cfg.tolerance)]
}

/// `τ₃(x) = Δ_q(x)·I`.
pub fn check_tau3(
    params: &ModelParams,
    family: BoundaryFamily,
    b: &dyn Boundary,
    cfg: &CheckConfig,
) -> CheckReport {
    let name = format!("tau3-quantum-determinant/{}", tag(family, params));
    let dr = DoubleRow::new(params, b);
    let mut rng = cfg.rng_for(&name);
    let mut pts = Vec::new();
    let mut worst: f64 = 0.0;
    let dim = 3usize.pow(params.n() as u32);
    for _ in 0..cfg.trials.min(4) {
        let x = sample_point(&mut rng, params.q());
        pts.push(x);
        let res = dr.fused(3, x).map(|t| {
            relative_residual(
                &t,
                &CMatrix::scalar_identity(dim, delta_q(x, params, family)),
            )
        });
        worst = worst.max(res.unwrap_or(f64::INFINITY));
    }
    CheckReport::new(name, &pts, worst, cfg.tolerance)
}

/// The special-point identities of τ and τ₂ for the first model, both signs.
pub fn check_special_points(
    params: &ModelParams,
    b: &dyn Boundary,
    cfg: &CheckConfig,
) -> Vec<CheckReport> {
    let q = params.q();
    let n = params.n() as i32;
    let dim = 3usize.pow(n as u32);
    let dr = DoubleRow::new(params, b);
    let sk = ScalarKernels::new(params);
    let z = |y: C| z_kernel(y, params);
    let id = |c: C| CMatrix::scalar_identity(dim, c);
    let sq = q.sqrt();
    let qn = q.powi(-n);
    let tag = format!("A/N{}", n);

    type Identity<'a> = (
        &'a str,
        f64,
        Box<dyn Fn(f64, &SpecialPointConstants) -> Result<f64, IdentityError> + 'a>,
    );
    let ids: Vec<Identity> = vec![
        (
            "tau(±1)",
            1.0,
            Box::new(|s, e| {
                Ok(relative_residual(
                    &dr.fused(1, re(s))?,
                    &id(e.e1 * e.e3 * z(re(s))),
                ))
            }),
        ),
        (
            "tau(±q^3/2)",
            q.powf(1.5),
            Box::new(|s, e| {
                let x = re(s * q.powf(1.5));
                Ok(relative_residual(
                    &dr.fused(1, x)?,
                    &id(qn * e.e2 * e.e4 * z(re(s * q.powf(2.5)))),
                ))
            }),
        ),
        (
            "tau2(±1)",
            1.0,
            Box::new(|s, e| {
                let rhs = dr
                    .fused(1, re(s * q))?
                    .scale(e.e1 * e.e3 * rho2(q, re(q)) * z(re(s)));
                Ok(relative_residual(&dr.fused(2, re(s))?, &rhs))
            }),
        ),
        (
            "tau2(±q^1/2)",
            sq,
            Box::new(|s, e| {
                let rhs = dr
                    .fused(1, re(s * sq))?
                    .scale(qn * e.e2 * e.e4 * rho2(q, re(q * q)) * z(re(s * q.powf(2.5))));
                Ok(relative_residual(&dr.fused(2, re(s * sq))?, &rhs))
            }),
        ),
        (
            "tau2(±q)",
            q,
            Box::new(|s, e| {
                let c = q.powi(-2 * n)
                    * sk.h2(re(s * q * q))
                    * e.e5
                    * z(re(s * q * q))
                    * z(re(s * q.powi(3)));
                Ok(relative_residual(&dr.fused(2, re(s * q))?, &id(c)))
            }),
        ),
        (
            "tau2(±q^-1/2)",
            1.0 / sq,
            Box::new(|s, e| {
                let c = sk.h1(re(s * sq)) * e.e6 * z(re(s * sq)) * z(re(s / sq));
                Ok(relative_residual(&dr.fused(2, re(s / sq))?, &id(c)))
            }),
        ),
        (
            "tau2(±q^-1)=tau2(±q^3/2)=0",
            1.0 / q,
            Box::new(|s, _| {
                let mut worst: f64 = 0.0;
                for p in [1.0 / q, q.powf(1.5)] {
                    let at = dr.fused(2, re(s * p))?.frobenius_norm();
                    let near = dr
                        .fused(2, re(s * p) * C::from_polar(1.05, 0.05))?
                        .frobenius_norm();
                    worst = worst.max(at / near.max(f64::MIN_POSITIVE));
                }
                Ok(worst)
            }),
        ),
    ];
    ids.iter()
        .map(|(label, mag, f)| {
            let mut worst: f64 = 0.0;
            let mut pts = Vec::new();
            for s in [1.0, -1.0] {
                pts.push(re(s * mag));
                let e = SpecialPointConstants::new(params, s);
                worst = worst.max(f(s, &e).unwrap_or(f64::INFINITY));
            }
            CheckReport::new(
                format!("special-points/{}/{}", label, tag),
                &pts,
                worst,
                cfg.tolerance,
            )
        })
        .collect()
}

/// Reconstructs the Markov generator from `τ′(1)/τ(1)` at `θ_j = 1` and compares entrywise.
pub fn check_markov_from_transfer(
    params: &ModelParams,
    family: BoundaryFamily,
    b: &dyn Boundary,
    cfg: &CheckConfig,
) -> CheckReport {
    let n = params.n();
    let name = format!("markov-from-transfer/{}/N{}", family, n);
    let one = C::new(1.0, 0.0);
    let Ok(hp) = params.with_theta(vec![one; n]) else {
        return CheckReport::failed(name, &[one], cfg.tolerance);
    };
    let dr = DoubleRow::new(&hp, b);
    let res = (|| -> Result<f64, IdentityError> {
        let poly = fit_on_circle(
            |x| {
                dr.fused(1, x).map_err(|e| match e {
                    crate::fusion::FusionError::Linalg(l) => l,
                    other => crate::tensorlinalg::LinalgError::DimensionMismatch(other.to_string()),
                })
            },
            2 * n + 4,
            1.5,
            0.1,
        )?;
        let t1 = poly.evaluate(one);
        let c = t1.as_scalar_identity(1e-9).ok_or_else(|| {
            IdentityError::Precondition("τ(1) is not proportional to the identity".into())
        })?;
        let q = hp.q();
        let shift =
            n as f64 + q / 2.0 * hp.rate_sum() + (1.0 - 2.0 * q + q.powi(4)) / (1.0 - q.powi(3));
        let dim = t1.rows();
        let rec = &poly.derivative(one).scale((1.0 - q) / 2.0 / c)
            - &CMatrix::scalar_identity(dim, re(shift));
        Ok(relative_residual(&rec, &markov_generator(n, &hp, family)))
    })();
    CheckReport::new(name, &[one], res.unwrap_or(f64::INFINITY), cfg.tolerance)
}

/// `τ` is a degree-`2N+4` polynomial and `x²τ₂` a degree-`4N+12` polynomial.
pub fn check_polynomiality(
    params: &ModelParams,
    family: BoundaryFamily,
    b: &dyn Boundary,
    cfg: &CheckConfig,
) -> CheckReport {
    let n = params.n();
    let name = format!("polynomiality/{}", tag(family, params));
    let dr = DoubleRow::new(params, b);
    let probes = [
        C::from_polar(1.2, 0.7),
        C::from_polar(1.8, -2.1),
        C::from_polar(1.35, 2.9),
    ];
    let to_linalg = |e: crate::fusion::FusionError| match e {
        crate::fusion::FusionError::Linalg(l) => l,
        other => crate::tensorlinalg::LinalgError::DimensionMismatch(other.to_string()),
    };
    let res = (|| -> Result<f64, IdentityError> {
        let p1 = fit_on_circle(|x| dr.fused(1, x).map_err(to_linalg), 2 * n + 4, 1.5, 0.1)?;
        let p2 = fit_on_circle(
            |x| dr.fused(2, x).map(|t| t.scale(x * x)).map_err(to_linalg),
            4 * n + 12,
            1.5,
            0.1,
        )?;
        let mut worst: f64 = 0.0;
        for &x in &probes {
            worst = worst.max(relative_residual(&p1.evaluate(x), &dr.fused(1, x)?));
            worst = worst.max(relative_residual(
                &p2.evaluate(x),
                &dr.fused(2, x)?.scale(x * x),
            ));
        }
        Ok(worst)
    })();
    CheckReport::new(name, &probes, res.unwrap_or(f64::INFINITY), cfg.tolerance)
}
