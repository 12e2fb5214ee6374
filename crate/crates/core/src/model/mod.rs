//! Parameters and the concrete matrices of the model: R, K±, generators, rank-m variants.

mod markov;
mod matrices;
mod multispecies;
mod params;

pub use markov::{
    boundary_block, bulk_generator_block, markov_generator, species_zero_counter, w_operator,
};
pub use matrices::{
    k_minus, k_plus, r_matrix, r_matrix_q, r_tilde_q, rho2, u_matrix, z_kernel, ScalarKernels,
};
pub use multispecies::{
    alpha_bar, boundary_builder, gamma_bar, head_coupling_rates, markovian_limit,
    multispecies_k_minus, single_species_boundary, BuilderRule, MultiKKind, MultiKVariant,
};
pub use params::{BoundaryFamily, ModelError, ModelParams};

use num_complex::Complex64;

use crate::fusion::double_row_transfer;
use crate::tensorlinalg::CMatrix;

/// One-species objects obtained when species "0" is absent.
#[derive(Clone, Debug)]
pub struct SingleSpeciesObjects {
    pub r: CMatrix,
    pub k_minus: CMatrix,
    pub k_plus: CMatrix,
    pub tau: CMatrix,
}

/// 2×2 K⁻ of the one-species reduction.
pub fn nested_k_minus(x: Complex64, params: &ModelParams) -> CMatrix {
    let (q, a, g, e) = (params.q(), params.alpha(), params.gamma(), params.eta1());
    let rows = [
        [q * (g - a) * x * x + e * x, q * g * (x * x - 1.0)],
        [q * a * (x * x - 1.0), e * x + q * (g - a)],
    ];
    CMatrix::from_fn(2, 2, |i, j| rows[i][j])
}

/// 2×2 K⁺ of the one-species reduction.
pub fn nested_k_plus(x: Complex64, params: &ModelParams) -> CMatrix {
    let (q, b, d, e) = (params.q(), params.beta(), params.delta(), params.eta2());
    let rows = [
        [e * x + q * q * (d - b), b * (x * x - q * q)],
        [q * d * (x * x - q * q), q * (d - b) * x * x + q * e * x],
    ];
    CMatrix::from_fn(2, 2, |i, j| rows[i][j])
}

/// The 4×4 R, nested K± and the `2^N`-dimensional double-row transfer matrix `τ⁽²⁾(x)`.
pub fn single_species_objects(x: Complex64, params: &ModelParams) -> SingleSpeciesObjects {
    let q = params.q();
    let kp = nested_k_plus(x, params);
    let km = nested_k_minus(x, params);
    let tau = double_row_transfer(x, q, params.theta(), 2, &|y| r_matrix_q(y, q, 1), &kp, &km);
    SingleSpeciesObjects {
        r: r_matrix_q(x, q, 1),
        k_minus: km,
        k_plus: kp,
        tau,
    }
}
