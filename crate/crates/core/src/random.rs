//! Seeded generators for random states, unitaries and state sets.
//!
//! Everything here is driven by [`ChaCha8Rng`], so a seed fully determines
//! the output on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{unitary_from_first_column, CMatrix, CVector, DensityMatrix, StateSet, StateVector, UnitaryMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` under `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian sample.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        if let Ok(s) = StateVector::normalized(gaussian_vector(rng, dim)) {
            return s;
        }
    }
}

/// Haar-random unitary: Gram–Schmidt on the columns of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitaryMatrix {
    let first = random_state(rng, dim).into_inner();
    let rest: Vec<CVector> = (1..dim).map(|_| gaussian_vector(rng, dim)).collect();
    unitary_from_first_column(&first, &rest).expect("normalized first column")
}

/// Random full-rank density matrix `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::from_hermitized(&gg.unscale(tr)).expect("Wishart sample is a density matrix")
}

/// `n` Haar-random states in dimension `n`; almost surely distinct.
pub fn random_state_set<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StateSet {
    loop {
        let states = (0..n).map(|_| random_state(rng, n)).collect();
        if let Ok(set) = StateSet::new(states) {
            return set;
        }
    }
}

/// Complex number with standard Gaussian real and imaginary parts.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    gaussian(rng)
}
