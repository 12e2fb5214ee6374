use num_complex::Complex64;

use super::{BoundaryFamily, ModelParams};
use crate::tensorlinalg::CMatrix;

type C = Complex64;

fn re(v: f64) -> C {
    C::new(v, 0.0)
}

/// Closed-form scalar functions bound to a parameter set.
#[derive(Clone, Copy, Debug)]
pub struct ScalarKernels {
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl ScalarKernels {
    pub fn new(p: &ModelParams) -> Self {
        ScalarKernels {
            q: p.q(),
            alpha: p.alpha(),
            beta: p.beta(),
            gamma: p.gamma(),
            delta: p.delta(),
            eta1: p.eta1(),
            eta2: p.eta2(),
        }
    }

    pub fn a(&self, x: C) -> C {
        self.q - x
    }
    pub fn b_plus(&self, x: C) -> C {
        self.q - self.q * x
    }
    pub fn b_minus(&self, x: C) -> C {
        1.0 - x
    }
    pub fn c_plus(&self, x: C) -> C {
        self.q * x - x
    }
    pub fn c_minus(&self, _x: C) -> C {
        re(self.q - 1.0)
    }
    pub fn rho1(&self, x: C) -> C {
        self.a(x) * self.a(1.0 / x)
    }
    pub fn rho2(&self, x: C) -> C {
        rho2(self.q, x)
    }
    pub fn h1(&self, x: C) -> C {
        let (q, a, g, e) = (self.q, self.alpha, self.gamma, self.eta1);
        (q * a * x * x - e * x - q * g) * (q * a / (x * x) - e / x - q * g)
    }
    /// `h₂` of the first model.
    pub fn h2(&self, x: C) -> C {
        let (q, b, d, e) = (self.q, self.beta, self.delta, self.eta2);
        (q * b * x * x - q * e * x - q.powi(3) * d)
            * (q.powi(7) * b / (x * x) - q.powi(4) * e / x - q.powi(3) * d)
    }
    /// Second-model analogue of `h₂` (β↔δ, η₂→−η₂).
    pub fn h2_bar(&self, x: C) -> C {
        let (q, b, d, e) = (self.q, self.beta, self.delta, self.eta2);
        (q * d * x * x + q * e * x - q.powi(3) * b)
            * (q.powi(7) * d / (x * x) + q.powi(4) * e / x - q.powi(3) * b)
    }
}

/// `ρ₂(x) = b⁻(x)·b⁺(q³/x)`.
pub fn rho2(q: f64, x: C) -> C {
    (1.0 - x) * (q - q.powi(4) / x)
}

/// Rank-m stochastic R-matrix on `V⊗V`, `dim V = m+1`.
pub fn r_matrix_q(x: C, q: f64, m: usize) -> CMatrix {
    let n = m + 1;
    let mut r = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let ij = i * n + j;
            let ji = j * n + i;
            if i == j {
                r[(ij, ij)] = q - x;
            } else if i < j {
                r[(ij, ij)] = 1.0 - x;
                r[(ij, ji)] = q * x - x;
            } else {
                r[(ij, ij)] = q - q * x;
                r[(ij, ji)] = re(q - 1.0);
            }
        }
    }
    r
}

pub fn r_matrix(x: C, params: &ModelParams, m: usize) -> CMatrix {
    r_matrix_q(x, params.q(), m)
}

/// `R̃(x) = ρ₂(x)((R^{t₁}(x))⁻¹)^{t₁}` for rank 2 in closed form; entries carry at most a `1/x`.
pub fn r_tilde_q(x: C, q: f64) -> CMatrix {
    let mut r = CMatrix::zeros(9, 9);
    for i in 0..3usize {
        for j in 0..3usize {
            let ij = i * 3 + j;
            let ji = j * 3 + i;
            if i == j {
                r[(ij, ij)] = q * (x - q * q) / x;
            } else if i < j {
                r[(ij, ij)] = q * (x - q.powi(3)) / x;
                r[(ij, ji)] = re(q.powi((j - i) as i32) * (q - 1.0));
            } else {
                r[(ij, ij)] = (x - q.powi(3)) / x;
                r[(ij, ji)] = q.powi(3 - (i - j) as i32) * (q - 1.0) / x;
            }
        }
    }
    r
}

/// `U = diag{1/q, 1, q}`.
pub fn u_matrix(q: f64) -> CMatrix {
    CMatrix::from_diag(&[re(1.0 / q), re(1.0), re(q)])
}

pub fn k_minus(x: C, params: &ModelParams, family: BoundaryFamily) -> CMatrix {
    let (q, a, g, e) = (params.q(), params.alpha(), params.gamma(), params.eta1());
    let z = C::new(0.0, 0.0);
    let x2 = x * x;
    let d11 = q * (g - a) * x2 + e * x;
    let d33 = e * x + q * (g - a);
    let up = q * g * (x2 - 1.0);
    let lo = q * a * (x2 - 1.0);
    let rows = match family {
        BoundaryFamily::A => [
            [d11, up, up],
            [z, -q * a * x2 + e * x + q * g, z],
            [lo, lo, d33],
        ],
        BoundaryFamily::B => [
            [d11, z, up],
            [z, q * g * x2 + e * x - q * a, z],
            [lo, z, d33],
        ],
    };
    CMatrix::from_fn(3, 3, |i, j| rows[i][j])
}

pub fn k_plus(x: C, params: &ModelParams, family: BoundaryFamily) -> CMatrix {
    let (q, b, d, e) = (params.q(), params.beta(), params.delta(), params.eta2());
    let z = C::new(0.0, 0.0);
    let x2 = x * x;
    let q3 = q.powi(3);
    let up = b * (x2 - q3);
    let lo = q * d * (x2 - q3);
    let rows = match family {
        BoundaryFamily::A => [
            [e * x + q * q * (d - q * b), up, up],
            [z, -q * b * x2 + q * e * x + q3 * d, z],
            [lo, lo, q * (d - q * b) * x2 + q * q * e * x],
        ],
        BoundaryFamily::B => [
            [e * x + q * q * (q * d - b), z, up],
            [z, q * d * x2 + q * e * x - q3 * b, z],
            [lo, z, q * (q * d - b) * x2 + q * q * e * x],
        ],
    };
    CMatrix::from_fn(3, 3, |i, j| rows[i][j])
}

/// `z(x) = Π_j (x/θ_j − q)(xθ_j − q)`.
pub fn z_kernel(x: C, params: &ModelParams) -> C {
    let q = params.q();
    params
        .theta()
        .iter()
        .map(|&t| (x / t - q) * (x * t - q))
        .product()
}
