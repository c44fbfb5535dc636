//! Perfect discrimination of `N` known, non-orthogonal states with one CTC.
//!
//! The interaction is a SWAP of the CR and CTC registers followed by the
//! controlled unitary `C = Σ_k |k⟩⟨k| ⊗ U_k` (CR controls, CTC target). Each
//! `U_k` sends `|ψ_k⟩` to `|k⟩` and must have `⟨j|U_k|ψ_j⟩ ≠ 0` for every
//! `j`, `k`. With CR input `|ψ_j⟩` the only self-consistent CTC state is then
//! `|j⟩⟨j|`, and the CR output is `|j⟩⟨j|` too.

use crate::dctc::{self, FixedPointResult, Policy};
use crate::error::{Error, Result};
use crate::linalg::{
    state_fidelity, unitary_with_column, CVector, DensityMatrix, StateSet, StateVector, UnitaryMatrix,
};
use crate::random::{random_state, rng_stream};

/// Floor on `|⟨j|U_k|ψ_j⟩|`.
pub const TOL_COND2: f64 = 1e-6;
/// Randomized completions tried per `U_k` before giving up.
pub const MAX_ATTEMPTS: usize = 64;
/// Fidelity above which an input counts as a member of the set.
pub const TOL_MEMBERSHIP: f64 = 1e-8;

/// `U_k` for the set: `U_k|ψ_k⟩ = |k⟩` exactly and every overlap
/// `|⟨j|U_k|ψ_j⟩|` above [`TOL_COND2`].
///
/// `U_k = V†` where column `k` of `V` is `ψ_k`. The other columns of `V` come
/// from Gram–Schmidt over the standard basis on the first attempt and over
/// Haar-random vectors drawn from `(rng_seed, k)` on later attempts.
pub fn build_uk(states: &StateSet, k: usize, rng_seed: u64) -> Result<UnitaryMatrix> {
    let n = states.len();
    let target = states.get(k)?.amplitudes().clone();
    let mut rng = rng_stream(rng_seed, k as u64);
    for attempt in 0..MAX_ATTEMPTS {
        let candidates: Vec<CVector> =
            if attempt == 0 { Vec::new() } else { (0..n).map(|_| random_state(&mut rng, n).into_inner()).collect() };
        let uk = unitary_with_column(k, &target, &candidates)?.adjoint();
        if overlaps_for(states, &uk).into_iter().all(|t| t > TOL_COND2) {
            return Ok(uk);
        }
    }
    Err(Error::Condition2Exhausted { k, attempts: MAX_ATTEMPTS })
}

/// `|⟨j|U|ψ_j⟩|` for every `j`.
fn overlaps_for(states: &StateSet, u: &UnitaryMatrix) -> Vec<f64> {
    states.states().iter().enumerate().map(|(j, psi)| (u.entries().row(j) * psi.amplitudes())[(0, 0)].norm()).collect()
}

/// Overlap table of a candidate family `U_0 … U_{N−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// `overlaps[j][k] = |⟨j|U_k|ψ_j⟩|`.
    pub overlaps: Vec<Vec<f64>>,
    pub min_overlap: f64,
    /// `‖U_k|ψ_k⟩ − |k⟩‖` per `k`.
    pub condition1_deviation: Vec<f64>,
}

impl ConditionReport {
    pub fn satisfied(&self) -> bool {
        self.min_overlap > TOL_COND2 && self.condition1_deviation.iter().all(|&d| d <= 1e-9)
    }
}

pub fn condition_report(states: &StateSet, uks: &[UnitaryMatrix]) -> Result<ConditionReport> {
    let n = states.len();
    check_family(n, uks)?;
    let columns: Vec<Vec<f64>> = uks.iter().map(|uk| overlaps_for(states, uk)).collect();
    let overlaps: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|k| columns[k][j]).collect()).collect();
    let min_overlap = columns.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let condition1_deviation = uks
        .iter()
        .enumerate()
        .map(|(k, uk)| {
            let image = uk.entries() * states.states()[k].amplitudes();
            (image - StateVector::basis(n, k).amplitudes()).norm()
        })
        .collect();
    Ok(ConditionReport { overlaps, min_overlap, condition1_deviation })
}

fn check_family(n: usize, uks: &[UnitaryMatrix]) -> Result<()> {
    if uks.len() != n || uks.iter().any(|u| u.dim() != n) {
        return Err(Error::Dimension(format!(
            "expected {n} unitaries of dimension {n}, got dimensions {:?}",
            uks.iter().map(UnitaryMatrix::dim).collect::<Vec<_>>()
        )));
    }
    Ok(())
}

/// `(Σ_k |k⟩⟨k| ⊗ U_k) · SWAP` on `CR ⊗ CTC`: SWAP acts first.
pub fn compose_total(uks: &[UnitaryMatrix]) -> Result<UnitaryMatrix> {
    let n = uks.len();
    check_family(n, uks)?;
    let controlled = UnitaryMatrix::block_diagonal(uks)?;
    controlled.compose(&UnitaryMatrix::swap(n, n))
}

/// Everything needed to run the discrimination circuit on a known set.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguisherBundle {
    state_set: StateSet,
    uks: Vec<UnitaryMatrix>,
    total: UnitaryMatrix,
    condition2_min: f64,
}

impl DistinguisherBundle {
    pub fn state_set(&self) -> &StateSet {
        &self.state_set
    }

    pub fn uks(&self) -> &[UnitaryMatrix] {
        &self.uks
    }

    pub fn total(&self) -> &UnitaryMatrix {
        &self.total
    }

    pub fn condition2_min(&self) -> f64 {
        self.condition2_min
    }

    pub fn condition_report(&self) -> ConditionReport {
        condition_report(&self.state_set, &self.uks).expect("bundle family matches its set")
    }
}

pub fn build_distinguisher(states: &StateSet, rng_seed: u64) -> Result<DistinguisherBundle> {
    let uks = (0..states.len()).map(|k| build_uk(states, k, rng_seed)).collect::<Result<Vec<_>>>()?;
    let total = compose_total(&uks)?;
    let condition2_min = condition_report(states, &uks)?.min_overlap;
    Ok(DistinguisherBundle { state_set: states.clone(), uks, total, condition2_min })
}

/// Result of running the discrimination circuit on one input.
#[derive(Debug, Clone, PartialEq)]
pub struct Distinction {
    pub rho_ctc: DensityMatrix,
    pub rho_out: DensityMatrix,
    /// `argmax_j ⟨j|ρ_out|j⟩`.
    pub decoded: usize,
    pub fidelity_to_basis: f64,
    pub residual: f64,
    pub fixed_space_dim: usize,
    /// False when the input matched no member of the set; the result is still
    /// computed but carries no guarantee.
    pub input_in_set: bool,
}

pub fn distinguish(bundle: &DistinguisherBundle, input: &StateVector) -> Result<Distinction> {
    let n = bundle.state_set.len();
    if input.dim() != n {
        return Err(Error::Dimension(format!("input of dimension {} for a {n}-state set", input.dim())));
    }
    let input_in_set =
        bundle.state_set.states().iter().any(|psi| state_fidelity(psi, input).is_ok_and(|f| f >= 1.0 - TOL_MEMBERSHIP));
    let rho_cr = input.projector();
    let FixedPointResult { fixed_point, residual, fixed_space_dim, .. } =
        dctc::fixed_point(&bundle.total, &rho_cr, Policy::RequireUnique)?;
    let rho_out = dctc::output_state(&bundle.total, &rho_cr, &fixed_point)?;
    let diagonal: Vec<f64> = (0..n).map(|j| rho_out.entries()[(j, j)].re).collect();
    let decoded = (0..n).fold(0, |best, j| if diagonal[j] > diagonal[best] { j } else { best });
    Ok(Distinction {
        rho_ctc: fixed_point,
        rho_out,
        decoded,
        fidelity_to_basis: diagonal[decoded],
        residual,
        fixed_space_dim,
        input_in_set,
    })
}
