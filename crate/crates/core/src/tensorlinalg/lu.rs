use num_complex::Complex64;

use super::{CMatrix, LinalgError};

/// Pivots below this fraction of the largest entry are treated as singular.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-13;

/// LU factorization with partial pivoting, `P·A = L·U` packed in one matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self, LinalgError> {
        Self::with_tolerance(a, DEFAULT_PIVOT_TOL)
    }

    pub fn with_tolerance(a: &CMatrix, pivot_tol: f64) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::DimensionMismatch(format!(
                "LU of {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let scale = a.max_abs();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (mut p, mut best) = (k, 0.0);
            for i in k..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= pivot_tol * scale || best == 0.0 {
                return Err(LinalgError::Singular {
                    pivot: best,
                    step: k,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                x[i] = x[i] - l * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                x[i] = x[i] - u * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.rows();
        let mut out = CMatrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.column(j));
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.lu.rows();
        let mut d = Complex64::new(1.0, 0.0);
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        // sign of the permutation
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let (mut len, mut j) = (0, s);
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                d = -d;
            }
        }
        d
    }
}

/// Matrix inverse via partially pivoted LU.
pub fn invert(m: &CMatrix) -> Result<CMatrix, LinalgError> {
    let lu = Lu::new(m)?;
    Ok(lu.solve(&CMatrix::identity(m.rows())))
}

/// Solves `a·x = b` for a vector `b`.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    Ok(Lu::new(a)?.solve_vec(b))
}
