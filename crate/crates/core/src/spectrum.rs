//! Exact spectra of Markov and transfer matrices and eigenvalue curves `Λ_i(x)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bethe::TQVariant;
use crate::fusion::transfer;
use crate::json::JsonComplex;
use crate::model::{markov_generator, BoundaryFamily, ModelParams};
use crate::tensorlinalg::{
    cluster_eigenvalues, cmp_complex, eigen, eigenvalues, CMatrix, LinalgError, Lu,
};

type C = Complex64;

/// Largest chain length accepted by [`markov_spectrum`].
pub const DEFAULT_N_CAP: usize = 6;
/// Relative gap below which eigenvalues are counted as one degenerate value.
pub const CLUSTER_GAP: f64 = 1e-7;
/// Absolute tolerance for matching computed values against four-decimal tables.
pub const MATCH_TOLERANCE: f64 = 5e-4;
/// Default generic basis point for eigenvalue curves.
pub const DEFAULT_X0: C = C::new(0.73, 0.41);
/// `|wᴴv|` (unit vectors) below this is treated as a biorthogonality breakdown.
const BIORTHOGONALITY_FLOOR: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("chain length {n} exceeds the exact-diagonalization cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("chain length must match the parameter set ({params} inhomogeneities, requested {n})")]
    LengthMismatch { n: usize, params: usize },
    #[error("left/right eigenvectors at x0 = {x0} are nearly orthogonal ({overlap:e}); choose another basis point")]
    Biorthogonality { x0: C, overlap: f64 },
    #[error("invalid root configuration: {0}")]
    InvalidRoots(String),
    #[error("empty grid")]
    EmptyGrid,
}

/// One distinct eigenvalue with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub value: JsonComplex,
    pub multiplicity: usize,
}

impl SpectralLine {
    pub fn value(&self) -> C {
        self.value.into()
    }
}

/// Clustered spectrum of one matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<SpectralLine>,
    pub source: String,
    pub family: BoundaryFamily,
    pub params: ModelParams,
}

impl SpectrumReport {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.iter().map(|l| l.multiplicity).sum()
    }

    /// Every eigenvalue repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<C> {
        self.eigenvalues
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.value(), l.multiplicity))
            .collect()
    }
}

fn check_length(n: usize, params: &ModelParams) -> Result<(), SpectrumError> {
    if n > DEFAULT_N_CAP {
        return Err(SpectrumError::TooLarge {
            n,
            cap: DEFAULT_N_CAP,
        });
    }
    if n != params.n() {
        return Err(SpectrumError::LengthMismatch {
            n,
            params: params.n(),
        });
    }
    Ok(())
}

fn report(
    values: &[C],
    source: String,
    params: &ModelParams,
    family: BoundaryFamily,
) -> SpectrumReport {
    SpectrumReport {
        eigenvalues: cluster_eigenvalues(values, CLUSTER_GAP)
            .into_iter()
            .map(|(v, m)| SpectralLine {
                value: v.into(),
                multiplicity: m,
            })
            .collect(),
        source,
        family,
        params: params.clone(),
    }
}

/// Exact spectrum of the Markov generator for `N` sites.
pub fn markov_spectrum(
    n: usize,
    params: &ModelParams,
    family: BoundaryFamily,
) -> Result<SpectrumReport, SpectrumError> {
    check_length(n, params)?;
    let vals = eigenvalues(&markov_generator(n, params, family))?;
    Ok(report(
        &vals,
        format!("markov/{}/N{}", family, n),
        params,
        family,
    ))
}

/// Exact spectrum of `τ(x)`.
pub fn transfer_spectrum(
    x: C,
    params: &ModelParams,
    family: BoundaryFamily,
) -> Result<SpectrumReport, SpectrumError> {
    check_length(params.n(), params)?;
    let vals = eigenvalues(&transfer(x, params, family))?;
    Ok(report(
        &vals,
        format!("transfer/{}/N{}/x={}", family, params.n(), x),
        params,
        family,
    ))
}

/// Branch values at one grid point, index-aligned to the basis fixed at `x₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSample {
    pub x: C,
    pub values: Vec<C>,
}

/// A degenerate (or simple) eigenspace of `τ(x₀)`: right basis `V`, left basis `W`
/// and `(WᴴV)⁻¹Wᴴ` for projecting.
struct Block {
    v: CMatrix,
    proj: CMatrix,
}

fn hermitian_dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn orthonormalize(vs: &mut [Vec<C>]) {
    for i in 0..vs.len() {
        for _ in 0..2 {
            for j in 0..i {
                let c = hermitian_dot(&vs[j], &vs[i]);
                let (head, tail) = vs.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= c * b;
                }
            }
        }
        let nrm = vs[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in vs[i].iter_mut() {
            *z /= nrm;
        }
    }
}

/// Orthonormal basis of the eigenspace of `m` near `shift` by two rounds of inverse iteration.
fn eigenspace(
    m: &CMatrix,
    shift: C,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<C>>, LinalgError> {
    let n = m.rows();
    let scale = m.max_abs().max(1.0);
    let eps = C::new(1e-10 * scale, 1e-10 * scale);
    let a = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            m[(i, j)] - shift - eps
        } else {
            m[(i, j)]
        }
    });
    let lu = Lu::with_tolerance(&a, 0.0)?;
    let mut vs: Vec<Vec<C>> = (0..k)
        .map(|_| {
            (0..n)
                .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    for _ in 0..2 {
        for v in vs.iter_mut() {
            *v = lu.solve_vec(v);
        }
        orthonormalize(&mut vs);
    }
    Ok(vs)
}

fn columns(vs: &[Vec<C>]) -> CMatrix {
    CMatrix::from_fn(vs[0].len(), vs.len(), |i, j| vs[j][i])
}

fn blocks_at(t0: &CMatrix, x0: C) -> Result<Vec<Block>, SpectrumError> {
    let dec = eigen(t0)?;
    let clusters = cluster_eigenvalues(&dec.values, CLUSTER_GAP);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c0ffee);
    let adj = t0.adjoint();
    let mut out = Vec::new();
    for (value, k) in clusters {
        let (vs, ws) = if k == 1 {
            let i = (0..dec.len())
                .min_by(|&a, &b| {
                    (dec.values[a] - value)
                        .norm()
                        .total_cmp(&(dec.values[b] - value).norm())
                })
                .expect("nonempty");
            (vec![dec.right[i].clone()], vec![dec.left[i].clone()])
        } else {
            (
                eigenspace(t0, value, k, &mut rng)?,
                eigenspace(&adj, value.conj(), k, &mut rng)?,
            )
        };
        let v = columns(&vs);
        let w = columns(&ws);
        let overlap = w.adjoint().matmul(&v);
        let lu =
            Lu::new(&overlap).map_err(|_| SpectrumError::Biorthogonality { x0, overlap: 0.0 })?;
        let det = lu.determinant().norm();
        if det.powf(1.0 / k as f64) < BIORTHOGONALITY_FLOOR {
            return Err(SpectrumError::Biorthogonality { x0, overlap: det });
        }
        out.push(Block {
            proj: lu.solve(&w.adjoint()),
            v,
        });
    }
    Ok(out)
}

/// Assigns `new` to the slots of `prev` by greedy nearest distance.
fn align(prev: &[C], new: Vec<C>) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); prev.len()];
    let mut pairs = Vec::new();
    for (i, p) in prev.iter().enumerate() {
        for (j, v) in new.iter().enumerate() {
            pairs.push(((p - v).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut used_i, mut used_j) = (vec![false; prev.len()], vec![false; new.len()]);
    for (_, i, j) in pairs {
        if !used_i[i] && !used_j[j] {
            used_i[i] = true;
            used_j[j] = true;
            out[i] = new[j];
        }
    }
    out
}

/// Eigenvalue curves of any commuting family `t(x)`, with the eigenbasis fixed at `x₀`.
pub fn curves_for<F>(t: F, grid: &[C], x0: C) -> Result<Vec<CurveSample>, SpectrumError>
where
    F: Fn(C) -> CMatrix + Sync,
{
    use rayon::prelude::*;
    if grid.is_empty() {
        return Err(SpectrumError::EmptyGrid);
    }
    let blocks = blocks_at(&t(x0), x0)?;
    let raw: Vec<Vec<Vec<C>>> = grid
        .par_iter()
        .map(|&x| {
            let tx = t(x);
            blocks
                .iter()
                .map(|b| {
                    let m = b.proj.matmul(&tx.matmul(&b.v));
                    if m.rows() == 1 {
                        Ok(vec![m[(0, 0)]])
                    } else {
                        eigenvalues(&m)
                    }
                })
                .collect::<Result<Vec<_>, LinalgError>>()
        })
        .collect::<Result<_, _>>()?;
    // continuity within degenerate blocks, following the grid order
    let mut prev: Vec<Vec<C>> = raw[0].clone();
    let mut out = Vec::with_capacity(grid.len());
    for (gi, per_block) in raw.into_iter().enumerate() {
        let aligned: Vec<Vec<C>> = if gi == 0 {
            per_block
        } else {
            per_block
                .into_iter()
                .zip(&prev)
                .map(|(vals, p)| align(p, vals))
                .collect()
        };
        out.push(CurveSample {
            x: grid[gi],
            values: aligned.iter().flatten().copied().collect(),
        });
        prev = aligned;
    }
    Ok(out)
}

/// Eigenvalue curves `Λ_i(x)` of the double-row transfer matrix.
pub fn transfer_curves(
    grid: &[C],
    params: &ModelParams,
    family: BoundaryFamily,
    x0: C,
) -> Result<Vec<CurveSample>, SpectrumError> {
    check_length(params.n(), params)?;
    curves_for(|x| transfer(x, params, family), grid, x0)
}

/// `count` equally spaced points from `start` to `stop` inclusive.
pub fn linear_grid(start: C, stop: C, count: usize) -> Vec<C> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * (i as f64 / (count - 1) as f64))
            .collect(),
    }
}

/// CSV with a header naming each branch by its value at `x₀`; 17 significant digits.
pub fn curves_csv(samples: &[CurveSample], x0: C, labels: &[C]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "# branches ordered by their eigenvalue at x0 = {:.17e}{:+.17e}i\n",
        x0.re, x0.im
    ));
    s.push_str("re_x,im_x");
    let count = samples.first().map_or(0, |c| c.values.len());
    for i in 0..count {
        s.push_str(&format!(",re_L{i},im_L{i}"));
    }
    s.push('\n');
    if !labels.is_empty() {
        s.push_str("# x0 values");
        for l in labels {
            s.push_str(&format!(",{:.17e},{:.17e}", l.re, l.im));
        }
        s.push('\n');
    }
    for c in samples {
        s.push_str(&format!("{:.16e},{:.16e}", c.x.re, c.x.im));
        for v in &c.values {
            s.push_str(&format!(",{:.16e},{:.16e}", v.re, v.im));
        }
        s.push('\n');
    }
    s
}

/// Markov eigenvalue from the λ roots of a homogeneous chain:
/// `E = −Σ (q−1)²/((1−1/λ)(q−λ))` plus the variant's constant. Zero roots (second
/// model, first type) contribute nothing.
pub fn el_from_roots(
    variant: TQVariant,
    lambda: &[C],
    params: &ModelParams,
) -> Result<C, SpectrumError> {
    let q = params.q();
    if matches!(variant, TQVariant::A2 | TQVariant::B2) {
        return Ok(C::new(0.0, 0.0));
    }
    let mut e = C::new(0.0, 0.0);
    for (k, &l) in lambda.iter().enumerate() {
        if l.norm() == 0.0 {
            if variant == TQVariant::B1 {
                continue;
            }
            return Err(SpectrumError::InvalidRoots(format!(
                "lambda_{k} = 0 is only allowed for B1"
            )));
        }
        if (l - 1.0).norm() < 1e-12 || (l - q).norm() < 1e-12 * q {
            return Err(SpectrumError::InvalidRoots(format!(
                "lambda_{k} = {l} sits on a pole (1 or q)"
            )));
        }
        e -= (q - 1.0).powi(2) / ((1.0 - 1.0 / l) * (q - l));
    }
    if variant != TQVariant::B1 {
        e -= q * params.rate_sum();
    }
    Ok(e)
}

/// Greedy matching of `values` into the clustered spectrum; returns for each value the index of
/// the nearest line within `tol`, or `None`.
pub fn match_to_spectrum(values: &[C], report: &SpectrumReport, tol: f64) -> Vec<Option<usize>> {
    values
        .iter()
        .map(|v| {
            report
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(i, l)| (i, (l.value() - v).norm()))
                .filter(|&(_, d)| d <= tol)
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i)
        })
        .collect()
}

/// Sorts complex values in the crate's canonical (real, imag) order.
pub fn sorted(mut v: Vec<C>) -> Vec<C> {
    v.sort_by(cmp_complex);
    v
}

#[cfg(test)]
mod tests;
