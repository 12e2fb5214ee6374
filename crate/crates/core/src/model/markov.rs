use num_complex::Complex64;

use super::{BoundaryFamily, ModelParams};
use crate::tensorlinalg::{apply_left, CMatrix};

/// Bulk two-site generator block (rates in units of the backward rate), basis index `3i+j`.
fn bulk_block(q: f64) -> CMatrix {
    let mut m = CMatrix::zeros(9, 9);
    let entries = [
        (1, 1, -1.0),
        (1, 3, q),
        (2, 2, -1.0),
        (2, 6, q),
        (3, 1, 1.0),
        (3, 3, -q),
        (5, 5, -1.0),
        (5, 7, q),
        (6, 2, 1.0),
        (6, 6, -q),
        (7, 5, 1.0),
        (7, 7, -q),
    ];
    for (r, c, v) in entries {
        m[(r, c)] = Complex64::new(v, 0.0);
    }
    m
}

/// Left (`first = true`) or right boundary block of the generator.
pub fn boundary_block(params: &ModelParams, family: BoundaryFamily, first: bool) -> CMatrix {
    let q = params.q();
    let (inj, ext) = if first {
        (params.alpha(), params.gamma())
    } else {
        (params.delta(), params.beta())
    };
    let (a, g) = (q * inj, q * ext);
    match family {
        BoundaryFamily::A => {
            CMatrix::from_real_rows(&[&[-a, g, g], &[0.0, -a - g, 0.0], &[a, a, -g]])
        }
        BoundaryFamily::B => {
            CMatrix::from_real_rows(&[&[-a, 0.0, g], &[0.0, 0.0, 0.0], &[a, 0.0, -g]])
        }
    }
}

/// Bulk two-site block `L_{i,i+1}`.
pub fn bulk_generator_block(params: &ModelParams) -> CMatrix {
    bulk_block(params.q())
}

/// Markov generator `L = L₁ + Σ L_{i,i+1} + L_N` on `(C³)^{⊗N}`; columns sum to zero.
pub fn markov_generator(n: usize, params: &ModelParams, family: BoundaryFamily) -> CMatrix {
    assert!(n >= 1, "chain needs at least one site");
    let dims = vec![3usize; n];
    let d = 3usize.pow(n as u32);
    let id = CMatrix::identity(d);
    let mut l =
        apply_left(&boundary_block(params, family, true), &[0], &dims, &id).expect("valid dims");
    l += &apply_left(&boundary_block(params, family, false), &[n - 1], &dims, &id)
        .expect("valid dims");
    let bulk = bulk_block(params.q());
    for i in 0..n.saturating_sub(1) {
        l += &apply_left(&bulk, &[i, i + 1], &dims, &id).expect("valid dims");
    }
    l
}

/// Diagonal operator counting sites in state |2⟩ (species "0").
pub fn species_zero_counter(n: usize) -> CMatrix {
    let d = 3usize.pow(n as u32);
    CMatrix::from_fn(d, d, |i, j| {
        if i != j {
            return Complex64::new(0.0, 0.0);
        }
        let mut k = i;
        let mut count = 0;
        for _ in 0..n {
            if k % 3 == 1 {
                count += 1;
            }
            k /= 3;
        }
        Complex64::new(count as f64, 0.0)
    })
}

/// `W = ⊗ diag{1, q, 1}` on the quantum space.
pub fn w_operator(n: usize, q: f64) -> CMatrix {
    let counter = species_zero_counter(n);
    CMatrix::from_fn(counter.rows(), counter.cols(), |i, j| {
        if i == j {
            Complex64::new(q.powi(counter[(i, i)].re as i32), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
