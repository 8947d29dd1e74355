#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use scramble::linalg::unitary_propagator;
use scramble::{ComplexMatrix, DensityMatrix};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `(G + G†)/2` with entries uniform in the unit square.
pub fn random_hermitian(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&g + g.adjoint()).scale_real(0.5)
}

pub fn random_unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim);
    unitary_propagator(&h, 3.0).unwrap()
}

/// `G G† / Tr(G G†)` for a random `dim x rank` factor `G`.
pub fn random_density(rng: &mut StdRng, dim: usize, rank: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, c| {
        if c < rank {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}
