//! Dense complex linear algebra shared by the rest of the crate.
//!
//! All composite systems use one Kronecker convention: the first factor is the
//! slow (outer) index, so `|a⟩ ⊗ |b⟩` lives at index `a * dim_b + b`. The
//! chronology-respecting register is always the first factor and the CTC
//! register the second.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const TOL_NORM: f64 = 1e-10;
pub const TOL_HERM: f64 = 1e-10;
pub const TOL_UNI: f64 = 1e-10;
pub const TOL_GS: f64 = 1e-10;
pub const TOL_PSD: f64 = 1e-9;
pub const TOL_DISTINCT: f64 = 1e-9;

/// Loss of orthogonality above which a Gram–Schmidt step is repeated.
const REORTHOGONALIZE_ABOVE: f64 = 1e-8;

pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest absolute entry.
pub fn max_entry_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues (ascending) and matching eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitize(m).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Kronecker product, first factor as the slow index:
/// `result[(i·p + k), (j·q + l)] = a[i, j] · b[k, l]` for `b` of shape `p × q`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (p, q) = b.shape();
    CMatrix::from_fn(a.nrows() * p, a.ncols() * q, |r, c| a[(r / p, c / q)] * b[(r % p, c % q)])
}

/// Which factor of a bipartite system survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Traces out one factor of a `(dim_a·dim_b)`-square matrix.
pub fn partial_trace(m: &CMatrix, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<CMatrix> {
    let total = dim_a * dim_b;
    if dim_a == 0 || dim_b == 0 || m.nrows() != total || m.ncols() != total {
        return Err(Error::Dimension(format!(
            "partial trace of a {}x{} matrix over {dim_a}x{dim_b} subsystems",
            m.nrows(),
            m.ncols()
        )));
    }
    let out = match keep {
        Subsystem::First => {
            CMatrix::from_fn(dim_a, dim_a, |i, j| (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum())
        }
        Subsystem::Second => {
            CMatrix::from_fn(dim_b, dim_b, |k, l| (0..dim_a).map(|i| m[(i * dim_b + k, i * dim_b + l)]).sum())
        }
    };
    Ok(out)
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let report = validate(Candidate::State(&amplitudes));
        let norm_failed = report.failures().next().map(|check| check.invariant == "norm");
        if let Some(norm_failed) = norm_failed {
            if norm_failed {
                return Err(Error::Normalization { norm: amplitudes.norm() });
            }
            return Err(report.into_error("state vector"));
        }
        Ok(Self(amplitudes))
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    /// Scales an arbitrary nonzero vector to unit norm.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < TOL_GS {
            return Err(Error::Normalization { norm });
        }
        Self::new(v.unscale(norm))
    }

    /// Computational basis ket `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = CVector::zeros(dim);
        v[k] = ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn into_inner(self) -> CVector {
        self.0
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// Multiplies by the global phase `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> Self {
        Self(&self.0 * Complex64::from_polar(1.0, theta))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix(&self.0 * self.0.adjoint())
    }
}

/// A positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let report = validate(Candidate::Density(&entries));
        if !report.is_valid() {
            return Err(report.into_error("density matrix"));
        }
        Ok(Self(entries))
    }

    /// Hermitizes `m` before validating; removes anti-Hermitian rounding noise.
    pub fn from_hermitized(m: &CMatrix) -> Result<Self> {
        Self::new(hermitize(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> f64 {
        state.amplitudes().dotc(&(&self.0 * state.amplitudes())).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.0).0
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        entropy_of_spectrum(&self.eigenvalues())
    }
}

pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).fold(0.0, |acc, h| acc + h)
}

/// A square matrix with `U†U = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let report = validate(Candidate::Unitary(&entries));
        if !report.is_valid() {
            return Err(report.into_error("unitary matrix"));
        }
        Ok(Self(entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    /// Exchanges the two factors of a `dim_a ⊗ dim_b` system:
    /// `|a⟩|b⟩ ↦ |b⟩|a⟩`.
    pub fn swap(dim_a: usize, dim_b: usize) -> Self {
        let total = dim_a * dim_b;
        let mut m = CMatrix::zeros(total, total);
        for a in 0..dim_a {
            for b in 0..dim_b {
                m[(b * dim_a + a, a * dim_b + b)] = ONE;
            }
        }
        Self(m)
    }

    /// Permutation matrix sending `|k⟩` to `|perm[k]⟩`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let dim = perm.len();
        let mut seen = vec![false; dim];
        let mut m = CMatrix::zeros(dim, dim);
        for (k, &target) in perm.iter().enumerate() {
            if target >= dim || std::mem::replace(&mut seen[target], true) {
                return Err(Error::Invalid {
                    kind: "permutation",
                    detail: format!("{perm:?} is not a permutation of 0..{dim}"),
                });
            }
            m[(target, k)] = ONE;
        }
        Ok(Self(m))
    }

    /// Block-diagonal `Σ_k |k⟩⟨k| ⊗ blocks[k]`; all blocks share one dimension.
    pub fn block_diagonal(blocks: &[UnitaryMatrix]) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::Dimension("block-diagonal operator needs at least one block".into()));
        };
        let d = first.dim();
        if let Some(bad) = blocks.iter().find(|b| b.dim() != d) {
            return Err(Error::Dimension(format!("block of dimension {} among blocks of dimension {d}", bad.dim())));
        }
        let mut m = CMatrix::zeros(d * blocks.len(), d * blocks.len());
        for (k, block) in blocks.iter().enumerate() {
            m.view_mut((k * d, k * d), (d, d)).copy_from(block.entries());
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "cannot compose unitaries of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    pub fn tensor(&self, other: &UnitaryMatrix) -> Self {
        Self(tensor_product(&self.0, &other.0))
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "unitary of dimension {} applied to a state of dimension {}",
                self.dim(),
                state.dim()
            )));
        }
        Ok(StateVector(&self.0 * state.amplitudes()))
    }

    /// `U m U†` without any validity check on `m`.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        &self.0 * m * self.0.adjoint()
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.0)
    }
}

fn unitarity_residual(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    max_entry_norm(&(gram - CMatrix::identity(m.ncols(), m.ncols())))
}

/// Ordered set of `N` distinct states in an `N`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet(Vec<StateVector>);

impl StateSet {
    pub fn new(states: Vec<StateVector>) -> Result<Self> {
        let raw: Vec<CVector> = states.iter().map(|s| s.amplitudes().clone()).collect();
        let report = validate(Candidate::StateSet(&raw));
        if !report.is_valid() {
            return Err(report.into_error("state set"));
        }
        Ok(Self(states))
    }

    /// Number of states, which equals the Hilbert-space dimension.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.0
    }

    pub fn get(&self, index: usize) -> Result<&StateVector> {
        self.0.get(index).ok_or(Error::IndexOutOfRange { index, len: self.0.len() })
    }

    pub fn amplitudes(&self) -> Vec<CVector> {
        self.0.iter().map(|s| s.amplitudes().clone()).collect()
    }
}

/// `|⟨a|b⟩|²`.
pub fn state_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("fidelity between states of dimension {} and {}", a.dim(), b.dim())));
    }
    Ok(a.inner(b).norm_sqr())
}

/// Projects `v` off the orthonormal `basis` with modified Gram–Schmidt,
/// repeating the sweep while orthogonality is lost. Returns the normalized
/// residual, or `None` if `v` is numerically inside `span(basis)`.
fn orthogonalize(basis: &[CVector], v: &CVector) -> Option<CVector> {
    let scale = v.norm();
    if scale < f64::MIN_POSITIVE {
        return None;
    }
    let mut r = v.unscale(scale);
    for _ in 0..3 {
        for q in basis {
            let c = q.dotc(&r);
            r.axpy(-c, q, ONE);
        }
        let norm = r.norm();
        if norm < TOL_GS {
            return None;
        }
        r.unscale_mut(norm);
        let loss = basis.iter().map(|q| q.dotc(&r).norm()).fold(0.0, f64::max);
        if loss <= REORTHOGONALIZE_ABOVE {
            return Some(r);
        }
    }
    None
}

/// Extends orthonormal `basis` with Gram–Schmidt over `candidates` in order,
/// then over the standard basis, until it spans the full space.
fn complete_basis<'a>(
    mut basis: Vec<CVector>,
    candidates: impl IntoIterator<Item = &'a CVector>,
    dim: usize,
) -> Vec<CVector> {
    let standard: Vec<CVector> = (0..dim).map(|k| StateVector::basis(dim, k).into_inner()).collect();
    for v in candidates {
        if basis.len() == dim {
            return basis;
        }
        if let Some(q) = orthogonalize(&basis, v) {
            basis.push(q);
        }
    }
    for v in &standard {
        if basis.len() == dim {
            break;
        }
        if let Some(q) = orthogonalize(&basis, v) {
            basis.push(q);
        }
    }
    basis
}

/// Builds a unitary whose column `column` is exactly `fixed`; the remaining
/// columns, left to right, are the Gram–Schmidt completion over `candidates`
/// followed by the standard basis.
pub fn unitary_with_column(column: usize, fixed: &CVector, candidates: &[CVector]) -> Result<UnitaryMatrix> {
    let dim = fixed.len();
    if dim == 0 {
        return Err(Error::Dimension("empty first column".into()));
    }
    if column >= dim {
        return Err(Error::Dimension(format!("column {column} out of range for dimension {dim}")));
    }
    let norm = fixed.norm();
    if (norm - 1.0).abs() > TOL_NORM {
        return Err(Error::Normalization { norm });
    }
    if let Some(bad) = candidates.iter().find(|c| c.len() != dim) {
        return Err(Error::Dimension(format!(
            "candidate of dimension {} for a {dim}-dimensional completion",
            bad.len()
        )));
    }
    let basis = complete_basis(vec![fixed.clone()], candidates, dim);
    debug_assert_eq!(basis.len(), dim);
    let mut rest = basis.into_iter().skip(1);
    let mut m = CMatrix::zeros(dim, dim);
    for c in 0..dim {
        let col = if c == column { fixed.clone() } else { rest.next().expect("completion spans the space") };
        m.set_column(c, &col);
    }
    UnitaryMatrix::new(m)
}

/// Unitary `U` with `U|0⟩ = first`, completed by Gram–Schmidt over `candidates`.
pub fn unitary_from_first_column(first: &CVector, candidates: &[CVector]) -> Result<UnitaryMatrix> {
    unitary_with_column(0, first, candidates)
}

/// Object submitted to [`validate`].
#[derive(Debug, Clone, Copy)]
pub enum Candidate<'a> {
    State(&'a CVector),
    Density(&'a CMatrix),
    Unitary(&'a CMatrix),
    StateSet(&'a [CVector]),
}

/// Outcome of one invariant check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub invariant: &'static str,
    /// Measured quantity: a residual, or for `distinct` the largest pairwise fidelity.
    pub measured: f64,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidityReport {
    pub checks: Vec<Check>,
}

impl ValidityReport {
    fn push(&mut self, invariant: &'static str, measured: f64, limit: f64) {
        let passed = measured <= limit;
        self.checks.push(Check { invariant, measured, limit, passed });
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, invariant: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.invariant == invariant)
    }

    fn into_error(self, kind: &'static str) -> Error {
        let detail = self
            .failures()
            .map(|c| format!("{} (measured {:e}, limit {:e})", c.invariant, c.measured, c.limit))
            .collect::<Vec<_>>()
            .join(", ");
        if self.failures().any(|c| c.invariant == "shape") {
            return Error::Dimension(format!("{kind}: {detail}"));
        }
        Error::Invalid { kind, detail }
    }
}

/// Checks every invariant of the chosen type and reports measured residuals.
pub fn validate(candidate: Candidate<'_>) -> ValidityReport {
    let mut report = ValidityReport::default();
    match candidate {
        Candidate::State(v) => check_state(&mut report, v),
        Candidate::Density(m) => {
            if !check_square(&mut report, m) {
                return report;
            }
            let herm = max_entry_norm(&(m - m.adjoint()));
            report.push("hermitian", herm, TOL_HERM);
            report.push("trace", (m.trace() - ONE).norm(), TOL_NORM);
            let psd = if herm.is_finite() { (-min_eigenvalue(m)).max(0.0) } else { f64::INFINITY };
            report.push("psd", psd, TOL_PSD);
        }
        Candidate::Unitary(m) => {
            if !check_square(&mut report, m) {
                return report;
            }
            report.push("unitarity", unitarity_residual(m), TOL_UNI);
        }
        Candidate::StateSet(states) => {
            let n = states.len();
            let bad_dims = states.iter().filter(|s| s.len() != n).count();
            report.push("shape", if n == 0 { 1.0 } else { bad_dims as f64 }, 0.0);
            let norm_dev = states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);
            report.push("norm", norm_dev, TOL_NORM);
            if bad_dims > 0 {
                return report;
            }
            let mut max_fid: f64 = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    let (a, b) = (&states[i], &states[j]);
                    let fid = a.dotc(b).norm_sqr() / (a.norm_squared() * b.norm_squared());
                    max_fid = max_fid.max(if fid.is_nan() { 1.0 } else { fid });
                }
            }
            let limit = 1.0 - TOL_DISTINCT;
            report.checks.push(Check { invariant: "distinct", measured: max_fid, limit, passed: max_fid < limit });
        }
    }
    report
}

fn check_state(report: &mut ValidityReport, v: &CVector) {
    report.push("shape", if v.is_empty() { 1.0 } else { 0.0 }, 0.0);
    let dev = (v.norm() - 1.0).abs();
    report.push("norm", if dev.is_nan() { f64::INFINITY } else { dev }, TOL_NORM);
}

fn check_square(report: &mut ValidityReport, m: &CMatrix) -> bool {
    let ok = m.nrows() == m.ncols() && m.nrows() > 0;
    report.push("shape", if ok { 0.0 } else { 1.0 }, 0.0);
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
    }

    fn pauli_x() -> CMatrix {
        real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    fn minus() -> StateVector {
        StateVector::from_slice(&[c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)]).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(tensor_product(&i2, &i2), CMatrix::identity(4, 4));
    }

    #[test]
    fn tensor_product_mixed_product_rule() {
        let x = pauli_x();
        let i2 = CMatrix::identity(2, 2);
        let lhs = tensor_product(&x, &i2) * tensor_product(&i2, &x);
        // X ⊗ X written out by hand: anti-diagonal ones.
        let expected = real(4, 4, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(lhs, expected);
        assert_eq!(tensor_product(&x, &x), expected);
    }

    #[test]
    fn tensor_product_rectangular_layout() {
        let a = real(1, 2, &[1.0, 2.0]);
        let b = real(2, 1, &[3.0, 5.0]);
        assert_eq!(tensor_product(&a, &b), real(2, 2, &[3.0, 6.0, 5.0, 10.0]));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let p0 = StateVector::basis(2, 0).projector().into_inner();
        let p1 = StateVector::basis(2, 1).projector().into_inner();
        let m = tensor_product(&p0, &p1);
        assert_eq!(partial_trace(&m, 2, 2, Subsystem::Second).unwrap(), p1);
        assert_eq!(partial_trace(&m, 2, 2, Subsystem::First).unwrap(), p0);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let bell = StateVector::from_slice(&[c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]).unwrap();
        let rho = bell.projector().into_inner();
        for keep in [Subsystem::First, Subsystem::Second] {
            let reduced = partial_trace(&rho, 2, 2, keep).unwrap();
            assert_abs_diff_eq!(max_entry_norm(&(reduced - CMatrix::identity(2, 2) * c(0.5))), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = CMatrix::identity(4, 4);
        assert!(matches!(partial_trace(&m, 2, 3, Subsystem::First), Err(Error::Dimension(_))));
    }

    #[test]
    fn swap_exchanges_factors() {
        let s = UnitaryMatrix::swap(2, 3);
        let a = StateVector::basis(2, 1);
        let b = StateVector::basis(3, 2);
        let ab = StateVector::new(a.amplitudes().kronecker(b.amplitudes())).unwrap();
        let ba = StateVector::new(b.amplitudes().kronecker(a.amplitudes())).unwrap();
        assert_eq!(s.apply(&ab).unwrap(), ba);
        assert!(s.unitarity_residual() == 0.0);
    }

    #[test]
    fn completion_of_orthonormal_candidates_is_identity() {
        let e0 = StateVector::basis(2, 0).into_inner();
        let e1 = StateVector::basis(2, 1).into_inner();
        let u = unitary_from_first_column(&e0, &[e0.clone(), e1]).unwrap();
        assert_eq!(u.entries(), &CMatrix::identity(2, 2));
    }

    #[test]
    fn completion_without_candidates_uses_standard_basis() {
        let plus = CVector::from_vec(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]);
        let u = unitary_from_first_column(&plus, &[]).unwrap();
        assert_eq!(u.entries().column(0), plus.column(0));
        assert!(u.unitarity_residual() < 1e-15);
        assert_abs_diff_eq!(u.entries().column(1).dotc(&plus).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn completion_skips_dependent_candidates() {
        let e0 = StateVector::basis(3, 0).into_inner();
        let dup = e0.clone() * c(-2.0);
        let u = unitary_from_first_column(&e0, &[dup.clone(), dup]).unwrap();
        assert_eq!(u.entries(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn completion_places_fixed_column() {
        let v = minus().into_inner();
        let e = [StateVector::basis(2, 0).into_inner(), StateVector::basis(2, 1).into_inner()];
        let u = unitary_with_column(1, &v, &e).unwrap();
        let h = real(2, 2, &[1.0, 1.0, 1.0, -1.0]) * c(FRAC_1_SQRT_2);
        assert!(max_entry_norm(&(u.entries() - h)) < 1e-15);
    }

    #[test]
    fn completion_rejects_unnormalized_first() {
        let v = CVector::from_vec(vec![c(1.0), c(1.0)]);
        assert!(matches!(unitary_from_first_column(&v, &[]), Err(Error::Normalization { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis(2, 0);
        let one = StateVector::basis(2, 1);
        assert_eq!(state_fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(state_fidelity(&zero, &one).unwrap(), 0.0);
        // |⟨0|−⟩|² = (1/√2)²
        assert_abs_diff_eq!(state_fidelity(&zero, &minus()).unwrap(), 0.5, epsilon = 1e-15);
        assert!(state_fidelity(&zero, &StateVector::basis(3, 0)).is_err());
    }

    #[test]
    fn validate_identity_unitary() {
        let i2 = CMatrix::identity(2, 2);
        let report = validate(Candidate::Unitary(&i2));
        assert!(report.is_valid());
        assert_eq!(report.get("unitarity").unwrap().measured, 0.0);
    }

    #[test]
    fn validate_flags_bad_trace() {
        let m = CMatrix::identity(2, 2) * c(0.75);
        let report = validate(Candidate::Density(&m));
        assert!(!report.is_valid());
        let failed: Vec<_> = report.failures().map(|c| c.invariant).collect();
        assert_eq!(failed, vec!["trace"]);
        assert_abs_diff_eq!(report.get("trace").unwrap().measured, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn validate_flags_negative_eigenvalue() {
        let m = real(2, 2, &[1.5, 0.0, 0.0, -0.5]);
        let report = validate(Candidate::Density(&m));
        assert!(!report.get("psd").unwrap().passed);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn validate_flags_duplicate_states() {
        let e0 = StateVector::basis(2, 0).into_inner();
        let report = validate(Candidate::StateSet(&[e0.clone(), e0]));
        let failed: Vec<_> = report.failures().map(|c| c.invariant).collect();
        assert_eq!(failed, vec!["distinct"]);
    }

    #[test]
    fn state_set_requires_n_states_in_n_dims() {
        let err = StateSet::new(vec![StateVector::basis(3, 0), StateVector::basis(3, 1)]).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
        assert!(StateSet::new(vec![StateVector::basis(2, 0), minus()]).is_ok());
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let err = StateVector::from_slice(&[c(1.0), c(1.0)]).unwrap_err();
        assert!(matches!(err, Error::Normalization { .. }));
    }

    #[test]
    fn entropy_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(rho.entropy(), 4f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(StateVector::basis(3, 1).projector().entropy(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn block_diagonal_layout() {
        let x = UnitaryMatrix::new(pauli_x()).unwrap();
        let bd = UnitaryMatrix::block_diagonal(&[UnitaryMatrix::identity(2), x.clone()]).unwrap();
        let expected = tensor_product(&StateVector::basis(2, 0).projector().into_inner(), &CMatrix::identity(2, 2))
            + tensor_product(&StateVector::basis(2, 1).projector().into_inner(), x.entries());
        assert_eq!(bd.entries(), &expected);
    }

    #[test]
    fn permutation_rejects_repeats() {
        assert!(UnitaryMatrix::permutation(&[0, 0]).is_err());
        let p = UnitaryMatrix::permutation(&[2, 1, 0]).unwrap();
        assert_eq!(p.apply(&StateVector::basis(3, 0)).unwrap(), StateVector::basis(3, 2));
    }
}
