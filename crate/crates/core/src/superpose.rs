//! Superposing two unknown members of a known set with two CTC interactions.
//!
//! Each unknown state `ψ_m`, `ψ_n` is run through its own discrimination
//! circuit, which leaves `|m⟩⟨m|` and `|n⟩⟨n|` on the CR outputs. The
//! block-diagonal unitary
//!
//! ```text
//! U′ = Σ_{i,j} |i⟩⟨i| ⊗ |j⟩⟨j| ⊗ U^{i,j}
//! ```
//!
//! then writes `U^{m,n}|0⟩ = γ⁻¹(α ψ_m + β ψ_n)` onto a fresh ancilla.

use num_complex::Complex64;

use crate::brun::{build_distinguisher, distinguish, DistinguisherBundle};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, partial_trace, state_fidelity, tensor_product, unitary_from_first_column, CMatrix, CVector,
    DensityMatrix, StateSet, StateVector, Subsystem, UnitaryMatrix,
};

/// Normalizers below this make the target superposition undefined.
pub const TOL_GAMMA: f64 = 1e-9;
/// Second eigenvalue of the reduced ancilla above which purity is lost.
pub const TOL_PURITY: f64 = 1e-6;

/// Amplitudes `(α, β)` of the requested superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionSpec {
    alpha: Complex64,
    beta: Complex64,
}

impl SuperpositionSpec {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let finite = [alpha.re, alpha.im, beta.re, beta.im].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::Invalid { kind: "superposition amplitudes", detail: "non-finite value".into() });
        }
        if alpha.norm() == 0.0 && beta.norm() == 0.0 {
            return Err(Error::ZeroAmplitudes);
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

/// `γ = ‖α ψ_i + β ψ_j‖`.
pub fn gamma(states: &StateSet, i: usize, j: usize, spec: &SuperpositionSpec) -> Result<f64> {
    Ok(combination(states, i, j, spec)?.norm())
}

fn combination(states: &StateSet, i: usize, j: usize, spec: &SuperpositionSpec) -> Result<CVector> {
    let (a, b) = (states.get(i)?.amplitudes(), states.get(j)?.amplitudes());
    Ok(a * spec.alpha + b * spec.beta)
}

/// `ω = γ⁻¹(α ψ_i + β ψ_j)`.
pub fn build_omega(states: &StateSet, i: usize, j: usize, spec: &SuperpositionSpec) -> Result<StateVector> {
    let v = combination(states, i, j, spec)?;
    let gamma = v.norm();
    if gamma.is_nan() || gamma < TOL_GAMMA {
        return Err(Error::DegenerateSuperposition { i, j, gamma });
    }
    StateVector::new(v.unscale(gamma))
}

/// Permutation exchanging basis indices `0` and `i`, so `P_i|0⟩ = |i⟩`.
pub fn index_swap(dim: usize, i: usize) -> UnitaryMatrix {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.swap(0, i);
    UnitaryMatrix::permutation(&perm).expect("transposition is a permutation")
}

/// `U^{i,j}`: for `i ≠ j` a Gram–Schmidt completion of `ω` over `ψ_0 … ψ_{N−1}`;
/// for `i = j` the product `U_i† P_i`, which sends `|0⟩` to `ψ_i`.
pub fn build_u_ij(
    states: &StateSet,
    i: usize,
    j: usize,
    spec: &SuperpositionSpec,
    uks: &[UnitaryMatrix],
) -> Result<UnitaryMatrix> {
    let n = states.len();
    states.get(i)?;
    states.get(j)?;
    if i == j {
        let ui = uks.get(i).ok_or(Error::IndexOutOfRange { index: i, len: uks.len() })?;
        if ui.dim() != n {
            return Err(Error::Dimension(format!("U_{i} has dimension {} for a {n}-state set", ui.dim())));
        }
        return ui.adjoint().compose(&index_swap(n, i));
    }
    let omega = build_omega(states, i, j, spec)?;
    unitary_from_first_column(omega.amplitudes(), &states.amplitudes())
}

/// Block-diagonal `U′` of dimension `N³`, block `(i, j)` at offset `(i·N + j)·N`.
pub fn build_u_prime(states: &StateSet, spec: &SuperpositionSpec, uks: &[UnitaryMatrix]) -> Result<UnitaryMatrix> {
    let n = states.len();
    let blocks = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| build_u_ij(states, i, j, spec, uks))
        .collect::<Result<Vec<_>>>()?;
    UnitaryMatrix::block_diagonal(&blocks)
}

/// Outcome of one run of the superposition protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub spec: SuperpositionSpec,
    pub m: usize,
    pub n: usize,
    pub ancilla_state: StateVector,
    pub expected: StateVector,
    pub fidelity: f64,
    pub fixed_point_residuals: (f64, f64),
    pub fixed_space_dims: (usize, usize),
    pub decoded_indices: (usize, usize),
    /// Second-largest eigenvalue of the reduced ancilla matrix.
    pub ancilla_impurity: f64,
}

/// Builds a discrimination bundle from `rng_seed` and runs the protocol on `(ψ_m, ψ_n)`.
pub fn run_protocol(
    states: &StateSet,
    m: usize,
    n: usize,
    spec: &SuperpositionSpec,
    rng_seed: u64,
) -> Result<ProtocolReport> {
    let bundle = build_distinguisher(states, rng_seed)?;
    run_protocol_with(&bundle, m, n, spec)
}

/// Runs the protocol with a prebuilt bundle; lets sweeps share one bundle.
pub fn run_protocol_with(
    bundle: &DistinguisherBundle,
    m: usize,
    n: usize,
    spec: &SuperpositionSpec,
) -> Result<ProtocolReport> {
    let states = bundle.state_set();
    let size = states.len();
    let expected = build_omega(states, m, n, spec)?;
    let u_prime = build_u_prime(states, spec, bundle.uks())?;

    // Two independent CTC systems; only the inputs ψ_m and ψ_n are handed over.
    let (phi_1, phi_2) = (states.get(m)?.clone(), states.get(n)?.clone());
    let (first, second) = rayon::join(|| distinguish(bundle, &phi_1), || distinguish(bundle, &phi_2));
    let (first, second) = (first?, second?);

    let registers = DensityMatrix::new(tensor_product(first.rho_out.entries(), second.rho_out.entries()))?;
    let reduced = ancilla_after(&u_prime, &registers, size)?;

    let (values, vectors) = hermitian_eigen(reduced.entries());
    let second_largest = if size > 1 { values[size - 2] } else { 0.0 };
    if second_largest > TOL_PURITY {
        return Err(Error::PurityLoss { second: second_largest });
    }
    let ancilla_state = canonical_phase(StateVector::normalized(vectors.column(size - 1).into_owned())?);
    let fidelity = state_fidelity(&ancilla_state, &expected)?;

    Ok(ProtocolReport {
        spec: *spec,
        m,
        n,
        ancilla_state,
        expected,
        fidelity,
        fixed_point_residuals: (first.residual, second.residual),
        fixed_space_dims: (first.fixed_space_dim, second.fixed_space_dim),
        decoded_indices: (first.decoded, second.decoded),
        ancilla_impurity: second_largest.max(0.0),
    })
}

/// Rotates the global phase so the largest-magnitude amplitude is real and positive.
fn canonical_phase(state: StateVector) -> StateVector {
    let amps = state.amplitudes();
    let pivot = (0..amps.len()).fold(0, |best, k| if amps[k].norm() > amps[best].norm() + 1e-12 { k } else { best });
    let theta = amps[pivot].arg();
    state.with_phase(-theta)
}

/// Applies `U′` to `registers ⊗ |0⟩⟨0|` and returns the reduced ancilla state.
pub fn ancilla_after(u_prime: &UnitaryMatrix, registers: &DensityMatrix, ancilla_dim: usize) -> Result<DensityMatrix> {
    if u_prime.dim() != registers.dim() * ancilla_dim {
        return Err(Error::Dimension(format!(
            "U' has dimension {} but registers ⊗ ancilla is {}×{}",
            u_prime.dim(),
            registers.dim(),
            ancilla_dim
        )));
    }
    let ancilla_in = StateVector::basis(ancilla_dim, 0).projector();
    let joint = tensor_product(registers.entries(), ancilla_in.entries());
    DensityMatrix::from_hermitized(&partial_trace(
        &u_prime.conjugate(&joint),
        registers.dim(),
        ancilla_dim,
        Subsystem::Second,
    )?)
}

/// Largest column-wise deviation between `a` and `b` when each column of `b`
/// may carry its own global phase.
pub fn column_phase_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "column-phase comparison of different shapes");
    (0..a.ncols())
        .map(|c| {
            let (x, y) = (a.column(c), b.column(c));
            let overlap = y.dotc(&x);
            let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
            (x - y * phase).iter().map(|z| z.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Closed forms for the two-state set `{|0⟩, |−⟩}`.
pub mod two_state {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn state_set() -> StateSet {
        let minus = StateVector::from_slice(&[Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0)])
            .expect("normalized");
        StateSet::new(vec![StateVector::basis(2, 0), minus]).expect("distinct")
    }

    pub fn hadamard() -> CMatrix {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
    }

    pub fn pauli_x() -> CMatrix {
        let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        CMatrix::from_row_slice(2, 2, &[o, l, l, o])
    }

    /// `(|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ H) · SWAP`.
    pub fn distinguisher() -> CMatrix {
        let p0 = StateVector::basis(2, 0).projector().into_inner();
        let p1 = StateVector::basis(2, 1).projector().into_inner();
        (tensor_product(&p0, &CMatrix::identity(2, 2)) + tensor_product(&p1, &hadamard()))
            * UnitaryMatrix::swap(2, 2).entries()
    }

    /// `γ⁻¹ [[a + b/√2, b*/√2], [−b/√2, a* + b*/√2]]` with `γ` the column norm.
    fn off_diagonal(a: Complex64, b: Complex64) -> CMatrix {
        let s = FRAC_1_SQRT_2;
        let m = CMatrix::from_row_slice(2, 2, &[a + b * s, b.conj() * s, -b * s, a.conj() + b.conj() * s]);
        let gamma = ((a + b * s).norm_sqr() + (b * s).norm_sqr()).sqrt();
        m.unscale(gamma)
    }

    /// Closed form of `U^{i,j}` for this set.
    pub fn u_ij(i: usize, j: usize, alpha: Complex64, beta: Complex64) -> CMatrix {
        match (i, j) {
            (0, 0) => CMatrix::identity(2, 2),
            (0, 1) => off_diagonal(alpha, beta),
            (1, 0) => off_diagonal(beta, alpha),
            (1, 1) => hadamard() * pauli_x(),
            _ => panic!("two-state closed form has no block ({i}, {j})"),
        }
    }
}
