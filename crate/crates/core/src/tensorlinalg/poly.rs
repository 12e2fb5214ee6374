use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, LinalgError, Lu};

/// Default radius of the interpolation circle.
pub const DEFAULT_NODE_RADIUS: f64 = 1.5;

/// Matrix-valued polynomial `Σ_k coeffs[k]·x^k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyMatrix {
    coeffs: Vec<CMatrix>,
    /// True when the nominal leading coefficient vanishes (to the fit's resolution).
    pub degenerate: bool,
}

impl PolyMatrix {
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self, LinalgError> {
        let first = coeffs.first().ok_or_else(|| {
            LinalgError::DimensionMismatch("polynomial without coefficients".into())
        })?;
        let shape = (first.rows(), first.cols());
        if coeffs.iter().any(|c| (c.rows(), c.cols()) != shape) {
            return Err(LinalgError::DimensionMismatch(
                "coefficient shapes differ".into(),
            ));
        }
        let scale = coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max);
        let degenerate = coeffs.last().unwrap().max_abs() <= 1e-12 * scale;
        Ok(PolyMatrix { coeffs, degenerate })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> &CMatrix {
        &self.coeffs[k]
    }

    pub fn leading(&self) -> &CMatrix {
        self.coeffs.last().unwrap()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.coeffs[0].rows(), self.coeffs[0].cols())
    }

    pub fn evaluate(&self, x: Complex64) -> CMatrix {
        let mut acc = self.leading().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.scale(x);
            acc += c;
        }
        acc
    }

    /// Exact derivative of the polynomial at `x`.
    pub fn derivative(&self, x: Complex64) -> CMatrix {
        let (r, c) = self.shape();
        let mut acc = CMatrix::zeros(r, c);
        for k in (1..self.coeffs.len()).rev() {
            acc = acc.scale(x);
            acc += &self.coeffs[k].scale_real(k as f64);
        }
        acc
    }
}

/// `count` points on the circle of `radius`, rotated by `phase` radians.
pub fn circle_nodes(count: usize, radius: f64, phase: f64) -> Vec<Complex64> {
    (0..count)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / count as f64 + phase))
        .collect()
}

/// Interpolating (or least-squares when over-determined) matrix polynomial of `degree`.
pub fn poly_fit(
    samples: &[(Complex64, CMatrix)],
    degree: usize,
) -> Result<PolyMatrix, LinalgError> {
    let n = samples.len();
    if n < degree + 1 {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} samples for degree {}",
            n, degree
        )));
    }
    let scale = samples.iter().map(|(x, _)| x.norm()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..i {
            if (samples[i].0 - samples[j].0).norm() <= 1e-14 * scale.max(1.0) {
                return Err(LinalgError::RepeatedNode(samples[i].0));
            }
        }
    }
    let (r, c) = (samples[0].1.rows(), samples[0].1.cols());
    if samples.iter().any(|(_, m)| (m.rows(), m.cols()) != (r, c)) {
        return Err(LinalgError::DimensionMismatch(
            "sample shapes differ".into(),
        ));
    }
    let s = if scale > 0.0 { scale } else { 1.0 };
    let m = degree + 1;
    let v = CMatrix::from_fn(n, m, |i, k| (samples[i].0 / s).powu(k as u32));
    let f = CMatrix::from_fn(n, r * c, |i, e| samples[i].1.data()[e]);
    let (a, b) = if n == m {
        (v, f)
    } else {
        let vh = v.adjoint();
        (vh.matmul(&v), vh.matmul(&f))
    };
    let lu = Lu::with_tolerance(&a, 1e-14).map_err(|e| match e {
        LinalgError::Singular { pivot, .. } => LinalgError::IllConditioned(pivot),
        other => other,
    })?;
    let d = lu.solve(&b);
    let coeffs = (0..m)
        .map(|k| {
            let inv = s.powi(-(k as i32));
            CMatrix::from_fn(r, c, |i, j| d[(k, i * c + j)] * inv)
        })
        .collect();
    PolyMatrix::new(coeffs)
}

/// Samples `f` on `degree+1` scaled roots of unity and interpolates exactly by a discrete
/// Fourier transform (the Vandermonde matrix on a circle is unitary up to scaling).
pub fn fit_on_circle<F>(
    f: F,
    degree: usize,
    radius: f64,
    phase: f64,
) -> Result<PolyMatrix, LinalgError>
where
    F: Fn(Complex64) -> Result<CMatrix, LinalgError>,
{
    let n = degree + 1;
    let nodes = circle_nodes(n, radius, phase);
    let values: Vec<CMatrix> = nodes.iter().map(|&x| f(x)).collect::<Result<_, _>>()?;
    let (r, c) = (values[0].rows(), values[0].cols());
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = CMatrix::zeros(r, c);
        for (j, val) in values.iter().enumerate() {
            let w = Complex64::from_polar(1.0, -2.0 * PI * (j * k % n) as f64 / n as f64);
            acc += &val.scale(w);
        }
        let norm = Complex64::from_polar(radius.powi(-(k as i32)), -(k as f64) * phase) / n as f64;
        coeffs.push(acc.scale(norm));
    }
    PolyMatrix::new(coeffs)
}

/// Same as [`fit_on_circle`] for scalar functions, returning plain coefficients.
pub fn fit_scalar_on_circle<F>(f: F, degree: usize, radius: f64, phase: f64) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let n = degree + 1;
    let values: Vec<Complex64> = circle_nodes(n, radius, phase).into_iter().map(f).collect();
    (0..n)
        .map(|k| {
            let acc: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v * Complex64::from_polar(1.0, -2.0 * PI * (j * k % n) as f64 / n as f64)
                })
                .sum();
            acc * Complex64::from_polar(radius.powi(-(k as i32)), -(k as f64) * phase) / n as f64
        })
        .collect()
}

/// Horner evaluation of scalar coefficients (lowest order first).
pub fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// Convenience wrapper for the derivative entry point.
pub fn poly_derivative(p: &PolyMatrix, x: Complex64) -> CMatrix {
    p.derivative(x)
}
