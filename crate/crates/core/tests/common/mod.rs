//! Shared helpers for the integration tests. The map and the iteration below
//! are written directly against nalgebra so they do not share code with the
//! solver under test.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Tr_CR[U (ρ ⊗ σ) U†]`, index `(a, b) ↦ a·d_ctc + b`.
pub fn oracle_map(u: &M, rho: &M, sigma: &M) -> M {
    let (da, db) = (rho.nrows(), sigma.nrows());
    let joint = rho.kronecker(sigma);
    let evolved = u * joint * u.adjoint();
    M::from_fn(db, db, |r, s| (0..da).map(|a| evolved[(a * db + r, a * db + s)]).sum())
}

/// Damped iteration `σ ← (σ + M(σ))/2` from `I/d`. Returns `None` when it does
/// not settle within `max_iter` steps.
pub fn power_iteration(u: &M, rho: &M, d_ctc: usize, max_iter: usize) -> Option<M> {
    let mut sigma = M::identity(d_ctc, d_ctc) * c(1.0 / d_ctc as f64, 0.0);
    for _ in 0..max_iter {
        let next = (&sigma + oracle_map(u, rho, &sigma)) * c(0.5, 0.0);
        let step = max_abs(&(&next - &sigma));
        sigma = next;
        if step < 1e-14 {
            return Some(sigma);
        }
    }
    None
}

/// A family on the qutrit standard basis that satisfies `U_k|k⟩ = |k⟩` but
/// sends `|0⟩` around the cycle 1 → 2 → 1 so that `⟨1|U_1|0⟩ = ⟨2|U_2|0⟩ = 0`
/// fails to hold only through the cycle: `U_1` swaps `|0⟩ ↔ |2⟩`, `U_2` swaps
/// `|0⟩ ↔ |1⟩`, `U_0 = I`.
pub fn cycle_violating_family() -> Vec<dctc_superpose::UnitaryMatrix> {
    use dctc_superpose::UnitaryMatrix;
    vec![
        UnitaryMatrix::identity(3),
        UnitaryMatrix::permutation(&[2, 1, 0]).unwrap(),
        UnitaryMatrix::permutation(&[1, 0, 2]).unwrap(),
    ]
}
