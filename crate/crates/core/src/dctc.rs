//! Deutsch self-consistency for a chronology-respecting (CR) system that
//! interacts once with a CTC system.
//!
//! For a joint unitary `U` on `CR ⊗ CTC` and a CR input `ρ_CR`, the CTC state
//! must be a fixed point of
//!
//! ```text
//! M(σ) = Tr_CR[ U (ρ_CR ⊗ σ) U† ]
//! ```
//!
//! and the CR output is `Tr_CTC[ U (ρ_CR ⊗ σ*) U† ]` at that fixed point.
//! `M` is linear and CPTP, so it has at least one density-matrix fixed point.
//! [`fixed_point`] finds the whole eigenvalue-1 eigenspace of its matrix
//! representation through an SVD of `L − I`, which also reveals when the
//! fixed point is not unique.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{
    entropy_of_spectrum, hermitian_eigen, hermitize, max_entry_norm, partial_trace, tensor_product, CMatrix, CVector,
    DensityMatrix, Subsystem, UnitaryMatrix, ONE, TOL_PSD,
};

/// Maximum admissible `‖σ* − M(σ*)‖_max` for a reported fixed point.
pub const TOL_FIX: f64 = 1e-8;
/// Singular values of `L − I` below this count as zero.
pub const SVD_CUTOFF: f64 = 1e-9;
/// Maximum-entropy refinement stops once a sweep gains less than this.
pub const ENTROPY_TOL: f64 = 1e-10;

const MAX_ENTROPY_SWEEPS: usize = 500;
const GOLDEN_ITERATIONS: usize = 90;
const BISECTION_ITERATIONS: usize = 80;
/// Feasibility margin on the minimum eigenvalue during entropy refinement.
const FEASIBLE_EIGEN_FLOOR: f64 = -1e-13;

/// How [`fixed_point`] chooses among several fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Fail with [`Error::NonUniqueFixedPoint`] unless the fixed point is unique.
    #[default]
    RequireUnique,
    /// Pick the fixed point of largest von Neumann entropy.
    MaxEntropy,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::RequireUnique => "require_unique",
            Policy::MaxEntropy => "max_entropy",
        })
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "require_unique" => Ok(Policy::RequireUnique),
            "max_entropy" => Ok(Policy::MaxEntropy),
            other => Err(format!("unknown policy `{other}` (expected require_unique or max_entropy)")),
        }
    }
}

/// Numerical knobs of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub svd_cutoff: f64,
    pub residual_tol: f64,
    pub entropy_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { svd_cutoff: SVD_CUTOFF, residual_tol: TOL_FIX, entropy_tol: ENTROPY_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult {
    pub fixed_point: DensityMatrix,
    /// `‖σ* − M(σ*)‖` in max-entry norm.
    pub residual: f64,
    /// Complex dimension of the eigenvalue-1 eigenspace of the linearized map.
    pub fixed_space_dim: usize,
    pub unique: bool,
}

/// CTC dimension implied by `u` and `rho_cr`.
fn ctc_dim(u: &UnitaryMatrix, rho_cr: &CMatrix) -> Result<usize> {
    let cr = rho_cr.nrows();
    if cr == 0 || rho_cr.ncols() != cr || !u.dim().is_multiple_of(cr) {
        return Err(Error::Dimension(format!(
            "unitary of dimension {} does not factor over a CR system of dimension {cr}",
            u.dim()
        )));
    }
    Ok(u.dim() / cr)
}

fn check_sigma(u: &UnitaryMatrix, rho_cr: &DensityMatrix, sigma: &DensityMatrix) -> Result<usize> {
    let d = ctc_dim(u, rho_cr.entries())?;
    if sigma.dim() != d {
        return Err(Error::Dimension(format!(
            "CTC state of dimension {} for a {}x{d} interaction",
            sigma.dim(),
            rho_cr.dim()
        )));
    }
    Ok(d)
}

/// `U (ρ_CR ⊗ σ) U†` on raw matrices.
fn evolve(u: &UnitaryMatrix, rho_cr: &CMatrix, sigma: &CMatrix) -> CMatrix {
    u.conjugate(&tensor_product(rho_cr, sigma))
}

/// `Tr_CR[U (ρ_CR ⊗ σ) U†]` for any (not necessarily positive) `σ`.
fn apply_map(u: &UnitaryMatrix, rho_cr: &CMatrix, sigma: &CMatrix, d: usize) -> CMatrix {
    let cr = rho_cr.nrows();
    partial_trace(&evolve(u, rho_cr, sigma), cr, d, Subsystem::Second).expect("dimensions checked")
}

/// The self-consistency map `σ ↦ Tr_CR[U (ρ_CR ⊗ σ) U†]`.
pub fn ctc_map(u: &UnitaryMatrix, rho_cr: &DensityMatrix, sigma: &DensityMatrix) -> Result<DensityMatrix> {
    let d = check_sigma(u, rho_cr, sigma)?;
    DensityMatrix::from_hermitized(&apply_map(u, rho_cr.entries(), sigma.entries(), d))
}

/// The CR output `Tr_CTC[U (ρ_CR ⊗ σ) U†]`.
pub fn output_state(u: &UnitaryMatrix, rho_cr: &DensityMatrix, sigma: &DensityMatrix) -> Result<DensityMatrix> {
    let d = check_sigma(u, rho_cr, sigma)?;
    let joint = evolve(u, rho_cr.entries(), sigma.entries());
    DensityMatrix::from_hermitized(&partial_trace(&joint, rho_cr.dim(), d, Subsystem::First)?)
}

/// `‖σ − M(σ)‖` in max-entry norm.
pub fn consistency_residual(u: &UnitaryMatrix, rho_cr: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let d = check_sigma(u, rho_cr, sigma)?;
    let mapped = apply_map(u, rho_cr.entries(), sigma.entries(), d);
    Ok(max_entry_norm(&(sigma.entries() - mapped)))
}

/// Column-stacking vectorization: `vec(A)[r + c·d] = A[r, c]`.
fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

fn unvectorize(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Matrix `L` with `vec(M(σ)) = L · vec(σ)` under column stacking.
pub fn superoperator_matrix(u: &UnitaryMatrix, rho_cr: &DensityMatrix) -> Result<CMatrix> {
    let d = ctc_dim(u, rho_cr.entries())?;
    let mut l = CMatrix::zeros(d * d, d * d);
    for col in 0..d {
        for row in 0..d {
            let mut unit = CMatrix::zeros(d, d);
            unit[(row, col)] = ONE;
            let image = apply_map(u, rho_cr.entries(), &unit, d);
            l.set_column(row + col * d, &vectorize(&image));
        }
    }
    Ok(l)
}

pub fn fixed_point(u: &UnitaryMatrix, rho_cr: &DensityMatrix, policy: Policy) -> Result<FixedPointResult> {
    fixed_point_with(u, rho_cr, policy, &SolverOptions::default())
}

/// Solves `σ = M(σ)` spectrally and selects a solution according to `policy`.
pub fn fixed_point_with(
    u: &UnitaryMatrix,
    rho_cr: &DensityMatrix,
    policy: Policy,
    options: &SolverOptions,
) -> Result<FixedPointResult> {
    let d = ctc_dim(u, rho_cr.entries())?;
    let l = superoperator_matrix(u, rho_cr)?;
    let shifted = &l - CMatrix::identity(d * d, d * d);
    let svd = shifted.svd(true, true);
    let (left, right_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));

    let null: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] < options.svd_cutoff).collect();
    let smallest = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    let fixed_space_dim = null.len();

    let candidate = match fixed_space_dim {
        0 => return Err(Error::NoFixedPointNumerical { residual: smallest }),
        1 => {
            let x = unvectorize(&right_t.row(null[0]).adjoint(), d);
            trace_normalized(&x).ok_or(Error::NoFixedPointNumerical { residual: smallest })?
        }
        dim => match policy {
            Policy::RequireUnique => return Err(Error::NonUniqueFixedPoint { dim }),
            Policy::MaxEntropy => {
                let right: Vec<CVector> = null.iter().map(|&i| right_t.row(i).adjoint()).collect();
                let left: Vec<CVector> = null.iter().map(|&i| left.column(i).into_owned()).collect();
                max_entropy_fixed_point(&right, &left, d, options)
                    .ok_or(Error::NoFixedPointNumerical { residual: smallest })?
            }
        },
    };

    let fixed_point =
        DensityMatrix::from_hermitized(&candidate).map_err(|_| Error::NoFixedPointNumerical { residual: smallest })?;
    let residual = max_entry_norm(&(fixed_point.entries() - apply_map(u, rho_cr.entries(), fixed_point.entries(), d)));
    if residual > options.residual_tol {
        return Err(Error::NoFixedPointNumerical { residual });
    }
    Ok(FixedPointResult { fixed_point, residual, fixed_space_dim, unique: fixed_space_dim == 1 })
}

/// Hermitian, unit-trace rescaling of an eigenvector with arbitrary phase.
fn trace_normalized(x: &CMatrix) -> Option<CMatrix> {
    let tr = x.trace();
    if tr.norm() < 1e-12 {
        return None;
    }
    Some(hermitize(&(x / tr)))
}

/// Real coordinates of a Hermitian matrix for Frobenius-orthogonal bookkeeping.
fn real_coords(h: &CMatrix) -> Vec<f64> {
    h.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn from_real_coords(coords: &[f64], d: usize) -> CMatrix {
    CMatrix::from_iterator(d, d, coords.chunks(2).map(|p| Complex64::new(p[0], p[1])))
}

/// Orthonormal (real Frobenius) basis of `span_R(vectors)`, dropping dependent ones.
fn real_orthonormal_basis(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            r.iter_mut().for_each(|x| *x /= norm);
            basis.push(r);
        }
    }
    basis
}

fn min_eigen(x: &CMatrix) -> f64 {
    hermitian_eigen(x).0.first().copied().unwrap_or(0.0)
}

fn entropy_of(x: &CMatrix) -> f64 {
    entropy_of_spectrum(&hermitian_eigen(x).0)
}

/// Largest `t ≥ 0` keeping `x + sign·t·dir` positive semidefinite.
fn feasible_extent(x: &CMatrix, dir: &CMatrix, sign: f64) -> f64 {
    let feasible = |t: f64| min_eigen(&(x + dir * Complex64::new(sign * t, 0.0))) >= FEASIBLE_EIGEN_FLOOR;
    if !feasible(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    // Traceless nonzero directions always leave the PSD cone eventually.
    while feasible(hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return hi;
        }
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Golden-section maximization of the concave `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc < fe {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = f(e);
        } else {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
    }
    0.5 * (a + b)
}

/// Maximum-entropy density matrix inside the eigenvalue-1 eigenspace.
///
/// `right` and `left` are the right and left null vectors of `L − I`. The
/// starting point is the spectral projection of `I/d` onto the fixed space,
/// which equals the Cesàro mean of the map's iterates and so is a valid fixed
/// density matrix. The search then does exact line searches along a
/// Frobenius-orthonormal basis of traceless Hermitian fixed matrices.
fn max_entropy_fixed_point(right: &[CVector], left: &[CVector], d: usize, options: &SolverOptions) -> Option<CMatrix> {
    let k = right.len();
    let r = CMatrix::from_columns(right);
    let w = CMatrix::from_columns(left);
    let gram_inv = (w.adjoint() * &r).try_inverse()?;
    let start = vectorize(&CMatrix::identity(d, d).unscale(d as f64));
    let projected = &r * (gram_inv * (w.adjoint() * start));
    let mut x = trace_normalized(&unvectorize(&projected, d))?;

    // Fixed space is closed under †, so Hermitian and anti-Hermitian parts of
    // each eigenvector are themselves fixed.
    let mut hermitian_parts = Vec::with_capacity(2 * k);
    for v in right {
        let m = unvectorize(v, d);
        let m_dag = m.adjoint();
        hermitian_parts.push(real_coords(&((&m + &m_dag) * Complex64::new(0.5, 0.0))));
        hermitian_parts.push(real_coords(&((&m - &m_dag) * Complex64::new(0.0, -0.5))));
    }
    let traceless: Vec<Vec<f64>> = real_orthonormal_basis(&hermitian_parts)
        .iter()
        .map(|b| {
            let bm = from_real_coords(b, d);
            real_coords(&(&bm - &x * bm.trace()))
        })
        .collect();
    let directions: Vec<CMatrix> =
        real_orthonormal_basis(&traceless).iter().map(|b| hermitize(&from_real_coords(b, d))).collect();

    let mut entropy = entropy_of(&x);
    for _ in 0..MAX_ENTROPY_SWEEPS {
        let before = entropy;
        for dir in &directions {
            let hi = feasible_extent(&x, dir, 1.0);
            let lo = -feasible_extent(&x, dir, -1.0);
            if hi - lo <= 0.0 {
                continue;
            }
            let at = |t: f64| entropy_of(&(&x + dir * Complex64::new(t, 0.0)));
            let t = golden_max(at, lo, hi);
            let trial = &x + dir * Complex64::new(t, 0.0);
            let trial_entropy = entropy_of(&trial);
            if trial_entropy > entropy && min_eigen(&trial) >= -TOL_PSD {
                x = trial;
                entropy = trial_entropy;
            }
        }
        if entropy - before < options.entropy_tol {
            break;
        }
    }
    Some(x)
}
