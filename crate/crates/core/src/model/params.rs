use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("q must be positive and different from 1 (got {0})")]
    InvalidQ(f64),
    #[error("boundary rate {name} must be a finite non-negative number (got {value})")]
    InvalidRate { name: &'static str, value: f64 },
    #[error("the chain needs at least one site")]
    EmptyChain,
    #[error("inhomogeneity theta_{index} must be finite and nonzero")]
    InvalidTheta { index: usize },
    #[error("{0}")]
    Variant(String),
    #[error("boundary builder: {0}")]
    Builder(String),
}

/// Boundary model selector: `A` is the first model (particle species 0 not conserved),
/// `B` the second one with an unbroken U(1) symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryFamily {
    A,
    B,
}

impl BoundaryFamily {
    pub const ALL: [BoundaryFamily; 2] = [BoundaryFamily::A, BoundaryFamily::B];
}

impl std::fmt::Display for BoundaryFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryFamily::A => write!(f, "A"),
            BoundaryFamily::B => write!(f, "B"),
        }
    }
}

impl std::str::FromStr for BoundaryFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(BoundaryFamily::A),
            "B" | "b" => Ok(BoundaryFamily::B),
            other => Err(format!("unknown family '{}', expected A or B", other)),
        }
    }
}

/// Model parameters: bulk asymmetry `q`, boundary rates and site inhomogeneities.
///
/// `eta1`/`eta2` are always derived on demand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    q: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    theta: Vec<Complex64>,
}

impl ModelParams {
    pub fn new(
        q: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        theta: Vec<Complex64>,
    ) -> Result<Self, ModelError> {
        if !(q.is_finite() && q > 0.0) || (q - 1.0).abs() < 1e-12 {
            return Err(ModelError::InvalidQ(q));
        }
        for (name, value) in [
            ("alpha", alpha),
            ("beta", beta),
            ("gamma", gamma),
            ("delta", delta),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ModelError::InvalidRate { name, value });
            }
        }
        if theta.is_empty() {
            return Err(ModelError::EmptyChain);
        }
        for (index, t) in theta.iter().enumerate() {
            if !(t.re.is_finite() && t.im.is_finite()) || t.norm() == 0.0 {
                return Err(ModelError::InvalidTheta { index });
            }
        }
        Ok(ModelParams {
            q,
            alpha,
            beta,
            gamma,
            delta,
            theta,
        })
    }

    /// Homogeneous chain, all `θ_j = 1`.
    pub fn homogeneous(
        q: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        n: usize,
    ) -> Result<Self, ModelError> {
        Self::new(
            q,
            alpha,
            beta,
            gamma,
            delta,
            vec![Complex64::new(1.0, 0.0); n],
        )
    }

    /// Parameter set used for the first model's benchmark tables.
    pub fn paper_a(n: usize) -> Self {
        Self::homogeneous(4.0, 1.2, 2.4, 3.5, 7.0, n).expect("valid preset")
    }

    /// Parameter set used for the second model's benchmark tables.
    pub fn paper_b(n: usize) -> Self {
        Self::homogeneous(1.8, 0.22, 0.41, 0.76, 0.95, n).expect("valid preset")
    }

    pub fn preset(family: BoundaryFamily, n: usize) -> Self {
        match family {
            BoundaryFamily::A => Self::paper_a(n),
            BoundaryFamily::B => Self::paper_b(n),
        }
    }

    pub fn with_theta(&self, theta: Vec<Complex64>) -> Result<Self, ModelError> {
        Self::new(self.q, self.alpha, self.beta, self.gamma, self.delta, theta)
    }

    pub fn with_q(&self, q: f64) -> Result<Self, ModelError> {
        Self::new(
            q,
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
            self.theta.clone(),
        )
    }

    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn theta(&self) -> &[Complex64] {
        &self.theta
    }
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn eta1(&self) -> f64 {
        1.0 - self.q + self.q * self.alpha - self.q * self.gamma
    }

    pub fn eta2(&self) -> f64 {
        1.0 - self.q + self.q * self.beta - self.q * self.delta
    }

    pub fn rate_sum(&self) -> f64 {
        self.alpha + self.beta + self.gamma + self.delta
    }

    pub fn is_homogeneous(&self) -> bool {
        self.theta
            .iter()
            .all(|t| (t - Complex64::new(1.0, 0.0)).norm() < 1e-14)
    }
}
