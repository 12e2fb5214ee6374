use num_complex::Complex64;

use super::{CMatrix, LinalgError};

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn check_dims(m: &CMatrix, dims: &[usize]) -> Result<(), LinalgError> {
    let d: usize = dims.iter().product();
    if !m.is_square() || m.rows() != d {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}x{} matrix against factor dims {:?}",
            m.rows(),
            m.cols(),
            dims
        )));
    }
    Ok(())
}

/// Offsets of every configuration of the listed factors (first listed factor most significant).
fn offsets(dims: &[usize], st: &[usize], factors: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &o in &out {
            for l in 0..dims[f] {
                next.push(o + l * st[f]);
            }
        }
        out = next;
    }
    out
}

fn complement(n: usize, factors: &[usize]) -> Vec<usize> {
    (0..n).filter(|k| !factors.contains(k)).collect()
}

fn validate_sites(op: &CMatrix, sites: &[usize], dims: &[usize]) -> Result<(), LinalgError> {
    for (i, &s) in sites.iter().enumerate() {
        if s >= dims.len() || sites[..i].contains(&s) {
            return Err(LinalgError::DimensionMismatch(format!(
                "bad site list {:?}",
                sites
            )));
        }
    }
    let local: usize = sites.iter().map(|&s| dims[s]).product();
    if !op.is_square() || op.rows() != local {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}x{} local operator on sites {:?} of dims {:?}",
            op.rows(),
            op.cols(),
            sites,
            dims
        )));
    }
    Ok(())
}

/// Standard Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    CMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::identity(1);
    for f in factors {
        out = kron(&out, f);
    }
    out
}

/// Transpose in tensor factor `which` only.
pub fn partial_transpose(
    m: &CMatrix,
    dims: &[usize],
    which: usize,
) -> Result<CMatrix, LinalgError> {
    check_dims(m, dims)?;
    if which >= dims.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "factor {} of {}",
            which,
            dims.len()
        )));
    }
    let st = strides(dims);
    let (s, d) = (st[which], dims[which]);
    let n = m.rows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        let di = (i / s) % d;
        for j in 0..n {
            let dj = (j / s) % d;
            let i2 = i - di * s + dj * s;
            let j2 = j - dj * s + di * s;
            out[(i2, j2)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Trace over the listed factors, keeping the remaining ones in their original order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], which: &[usize]) -> Result<CMatrix, LinalgError> {
    check_dims(m, dims)?;
    if which.iter().any(|&w| w >= dims.len()) {
        return Err(LinalgError::DimensionMismatch(format!(
            "trace factors {:?} of {:?}",
            which, dims
        )));
    }
    let st = strides(dims);
    let rest = complement(dims.len(), which);
    let rest_off = offsets(dims, &st, &rest);
    let tr_off = offsets(dims, &st, which);
    let r = rest_off.len();
    let mut out = CMatrix::zeros(r, r);
    for (a, &ra) in rest_off.iter().enumerate() {
        for (b, &rb) in rest_off.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &tr_off {
                acc += m[(ra + t, rb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

fn nonzeros(op: &CMatrix) -> Vec<(usize, usize, Complex64)> {
    let mut nz = Vec::new();
    for i in 0..op.rows() {
        for j in 0..op.cols() {
            let v = op[(i, j)];
            if v != Complex64::new(0.0, 0.0) {
                nz.push((i, j, v));
            }
        }
    }
    nz
}

/// `(op ⊗ I) · m`, where `op` acts on `sites` (in the listed order) of a space with factor `dims`.
///
/// Never forms the embedded operator; cost is proportional to nnz(op) · dim².
pub fn apply_left(
    op: &CMatrix,
    sites: &[usize],
    dims: &[usize],
    m: &CMatrix,
) -> Result<CMatrix, LinalgError> {
    validate_sites(op, sites, dims)?;
    let d: usize = dims.iter().product();
    if m.rows() != d {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} rows against dim {}",
            m.rows(),
            d
        )));
    }
    let st = strides(dims);
    let loc = offsets(dims, &st, sites);
    let rest = offsets(dims, &st, &complement(dims.len(), sites));
    let nz = nonzeros(op);
    let nc = m.cols();
    let mut out = CMatrix::zeros(d, nc);
    let src = m.data();
    let dst = out.data_mut();
    for &b in &rest {
        for &(l, lp, v) in &nz {
            let ro = (b + loc[l]) * nc;
            let ri = (b + loc[lp]) * nc;
            let (orow, irow) = (&mut dst[ro..ro + nc], &src[ri..ri + nc]);
            for (o, &x) in orow.iter_mut().zip(irow) {
                *o += v * x;
            }
        }
    }
    Ok(out)
}

/// `m · (op ⊗ I)` with the same conventions as [`apply_left`].
pub fn apply_right(
    m: &CMatrix,
    op: &CMatrix,
    sites: &[usize],
    dims: &[usize],
) -> Result<CMatrix, LinalgError> {
    validate_sites(op, sites, dims)?;
    let d: usize = dims.iter().product();
    if m.cols() != d {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} cols against dim {}",
            m.cols(),
            d
        )));
    }
    let st = strides(dims);
    let loc = offsets(dims, &st, sites);
    let rest = offsets(dims, &st, &complement(dims.len(), sites));
    let nz = nonzeros(op);
    let mut out = CMatrix::zeros(m.rows(), d);
    for r in 0..m.rows() {
        let irow = m.row(r).to_vec();
        let orow = &mut out.data_mut()[r * d..(r + 1) * d];
        for &b in &rest {
            for &(l, lp, v) in &nz {
                orow[b + loc[lp]] += irow[b + loc[l]] * v;
            }
        }
    }
    Ok(out)
}

/// The full matrix of `op` acting on `sites`, identity elsewhere.
pub fn embed(op: &CMatrix, sites: &[usize], dims: &[usize]) -> Result<CMatrix, LinalgError> {
    apply_left(op, sites, dims, &CMatrix::identity(dims.iter().product()))
}

/// Permutation (swap) operator on `V_n ⊗ V_n`.
pub fn swap_operator(n: usize) -> CMatrix {
    let mut p = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            p[(i * n + j, j * n + i)] = Complex64::new(1.0, 0.0);
        }
    }
    p
}
