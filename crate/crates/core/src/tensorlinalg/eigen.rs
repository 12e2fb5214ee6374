//! Dense eigensolver for general complex matrices: diagonal balancing, Householder
//! reduction to Hessenberg form, then single-shift implicit QR to a complex Schur form.

use num_complex::Complex64;

use super::{CMatrix, LinalgError};

const EPS: f64 = f64::EPSILON;
/// QR sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;
/// `|wᴴv| / (‖w‖‖v‖)` below this marks an eigenvalue as defective.
pub const DEFECTIVE_THRESHOLD: f64 = 1e-6;

#[inline]
fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Eigen-decomposition sorted by (real, imag).
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors, `right[k]` belongs to `values[k]`.
    pub right: Vec<Vec<Complex64>>,
    /// Unit-norm left eigenvectors: `wᴴ·m = λ·wᴴ`.
    pub left: Vec<Vec<Complex64>>,
    /// Set where left and right vectors are (numerically) orthogonal, i.e. a Jordan block.
    pub defective: Vec<bool>,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn any_defective(&self) -> bool {
        self.defective.iter().any(|&d| d)
    }
}

/// Lexicographic (real, imag) comparison used for every sorted spectrum in the crate.
pub fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Scaling-only balancing; returns the balanced matrix and the diagonal `d` with `B = D⁻¹AD`.
fn balance(a: &CMatrix) -> (CMatrix, Vec<f64>) {
    let n = a.rows();
    let mut b = a.clone();
    let mut d = vec![1.0; n];
    const RADIX: f64 = 2.0;
    let mut converged = false;
    let mut rounds = 0;
    while !converged && rounds < 100 {
        converged = true;
        rounds += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(b[(j, i)]);
                    r += abs1(b[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut cc, mut rr) = (c, r);
            while cc < rr / RADIX {
                cc *= RADIX;
                rr /= RADIX;
                f *= RADIX;
            }
            while cc >= rr * RADIX {
                cc /= RADIX;
                rr *= RADIX;
                f /= RADIX;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
    }
    (b, d)
}

/// Householder reduction `A = Q·H·Qᴴ` in place; returns Q when requested.
fn hessenberg(h: &mut CMatrix, want_q: bool) -> Option<CMatrix> {
    let n = h.rows();
    let mut q = if want_q {
        Some(CMatrix::identity(n))
    } else {
        None
    };
    if n < 3 {
        return q;
    }
    for k in 0..n - 2 {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H ← (I − β v vᴴ) H on rows k+1..n
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + t, j)];
            }
            s *= beta;
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * s;
            }
        }
        // H ← H (I − β v vᴴ) on columns k+1..n
        let apply_cols = |m: &mut CMatrix| {
            for i in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for (t, vi) in v.iter().enumerate() {
                    s += m[(i, k + 1 + t)] * vi;
                }
                s *= beta;
                for (t, vi) in v.iter().enumerate() {
                    m[(i, k + 1 + t)] -= s * vi.conj();
                }
            }
        };
        apply_cols(h);
        if let Some(qm) = q.as_mut() {
            apply_cols(qm);
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    q
}

/// Givens rotation `G = [[c, s], [−s̄, c]]` with `G·[x, y]ᵀ = [r, 0]ᵀ`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let nrm = ax.hypot(ay);
    let c = ax / nrm;
    let s = (x / ax) * y.conj() / nrm;
    (c, s)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let (l1, l2) = (tr + root, tr - root);
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Reduces Hessenberg `h` to upper-triangular Schur form `T`, accumulating into `z` if given.
///
/// With `full` set, rotations are applied to the whole matrix so that `T` is usable for
/// eigenvectors; otherwise only the active window is updated.
fn schur(h: &mut CMatrix, mut z: Option<&mut CMatrix>, full: bool) -> Result<(), LinalgError> {
    let n = h.rows();
    if n == 0 {
        return Ok(());
    }
    let norm = h.data().iter().map(|&v| abs1(v)).fold(0.0, f64::max);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let cap = MAX_SWEEPS_PER_EIGENVALUE * n.max(1);
    while hi > 0 {
        // locate the start of the unreduced block ending at hi
        let mut l = hi;
        while l > 0 {
            let s = abs1(h[(l - 1, l - 1)]) + abs1(h[(l, l)]);
            let s = if s == 0.0 { norm } else { s };
            if abs1(h[(l, l - 1)]) <= EPS * s {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > cap {
            return Err(LinalgError::NoConvergence {
                row: hi,
                subdiagonal: h[(hi, hi - 1)].norm(),
            });
        }
        let shift = if iter % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75, 0.4) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        let (col_lo, row_hi_all) = if full { (0, n) } else { (l, hi + 1) };
        for k in l..hi {
            let (x, y) = if k == l {
                (h[(l, l)] - shift, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            // rows k, k+1
            let start = if k == l { l } else { k - 1 };
            for j in start..row_hi_all {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
            // columns k, k+1
            let rmax = (k + 2).min(hi);
            for i in col_lo..=rmax {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            if let Some(zm) = z.as_deref_mut() {
                for i in 0..n {
                    let a = zm[(i, k)];
                    let b = zm[(i, k + 1)];
                    zm[(i, k)] = a * c + b * s.conj();
                    zm[(i, k + 1)] = -a * s + b * c;
                }
            }
        }
    }
    Ok(())
}

/// Eigenvalues only, sorted by (real, imag).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "eigen of {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let (mut h, _) = balance(m);
    hessenberg(&mut h, false);
    schur(&mut h, None, false)?;
    let mut vals = h.diag();
    vals.sort_by(cmp_complex);
    Ok(vals)
}

fn normalize(v: &mut [Complex64]) {
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nrm > 0.0 {
        for z in v.iter_mut() {
            *z /= nrm;
        }
    }
}

/// Full decomposition with right and left eigenvectors.
pub fn eigen(m: &CMatrix) -> Result<EigenDecomposition, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "eigen of {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = m.rows();
    let (mut t, d) = balance(m);
    let mut q = hessenberg(&mut t, true).expect("Q requested");
    schur(&mut t, Some(&mut q), true)?;

    let tnorm = t.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let smallnum = f64::MIN_POSITIVE * (n as f64) / EPS;
    let mut values = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for k in 0..n {
        let lam = t[(k, k)];
        let smin = (EPS * lam.norm()).max(EPS * tnorm * 1e-3).max(smallnum);
        let guard = |den: Complex64| {
            if den.norm() < smin {
                Complex64::new(smin, 0.0)
            } else {
                den
            }
        };

        // right: T y = λ y with y_k = 1, y_i = 0 for i > k
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[j];
            }
            y[i] = -s / guard(t[(i, i)] - lam);
            if y[i].norm() > 1e150 {
                let sc = 1.0 / y[i].norm();
                for v in y.iter_mut() {
                    *v *= sc;
                }
            }
        }
        let mut v: Vec<Complex64> = (0..n)
            .map(|r| {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..=k {
                    s += q[(r, j)] * y[j];
                }
                s * d[r]
            })
            .collect();
        normalize(&mut v);

        // left: yᴴ T = λ yᴴ with y_k = 1, y_i = 0 for i < k; solved for conj(y)
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        u[k] = Complex64::new(1.0, 0.0);
        for j in k + 1..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in k..j {
                s += u[i] * t[(i, j)];
            }
            u[j] = -s / guard(t[(j, j)] - lam);
            if u[j].norm() > 1e150 {
                let sc = 1.0 / u[j].norm();
                for v in u.iter_mut() {
                    *v *= sc;
                }
            }
        }
        // w = D⁻¹ Q conj(u)
        let mut w: Vec<Complex64> = (0..n)
            .map(|r| {
                let mut s = Complex64::new(0.0, 0.0);
                for j in k..n {
                    s += q[(r, j)] * u[j].conj();
                }
                s / d[r]
            })
            .collect();
        normalize(&mut w);
        values.push(lam);
        right.push(v);
        left.push(w);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp_complex(&values[a], &values[b]));
    let values: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
    let right: Vec<Vec<Complex64>> = order.iter().map(|&i| right[i].clone()).collect();
    let left: Vec<Vec<Complex64>> = order.iter().map(|&i| left[i].clone()).collect();
    let defective = right
        .iter()
        .zip(&left)
        .map(|(v, w)| {
            let ip: Complex64 = w.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            ip.norm() < DEFECTIVE_THRESHOLD
        })
        .collect();
    Ok(EigenDecomposition {
        values,
        right,
        left,
        defective,
    })
}

/// Groups sorted eigenvalues whose pairwise gap is below `rel_gap · scale`, where the
/// scale is the spectral radius (at least 1). Returns (cluster mean, multiplicity).
pub fn cluster_eigenvalues(values: &[Complex64], rel_gap: f64) -> Vec<(Complex64, usize)> {
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = rel_gap * scale;
    let mut used = vec![false; values.len()];
    let mut out = Vec::new();
    for i in 0..values.len() {
        if used[i] {
            continue;
        }
        // single-linkage growth so ordering artefacts of (re, im) sorting do not split clusters
        let mut members = vec![i];
        used[i] = true;
        let mut grew = true;
        while grew {
            grew = false;
            for j in 0..values.len() {
                if !used[j]
                    && members
                        .iter()
                        .any(|&k| (values[k] - values[j]).norm() <= tol)
                {
                    used[j] = true;
                    members.push(j);
                    grew = true;
                }
            }
        }
        let mean = members.iter().map(|&k| values[k]).sum::<Complex64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out.sort_by(|a, b| cmp_complex(&a.0, &b.0));
    out
}
