//! Simulation of Deutsch closed-timelike-curve (D-CTC) circuits.
//!
//! The crate covers three layers:
//!
//! - [`dctc`]: the self-consistency map of a CR system interacting with a CTC
//!   system, its linearization, and a spectral fixed-point solver that also
//!   detects non-unique solutions.
//! - [`brun`]: perfect discrimination of `N` known non-orthogonal states in
//!   `N` dimensions by a SWAP followed by a controlled unitary.
//! - [`superpose`]: deterministic preparation of `γ⁻¹(α ψ_m + β ψ_n)` for two
//!   unknown members `ψ_m`, `ψ_n` of a known set, using two such
//!   discriminations and a block-diagonal unitary on an ancilla.
//!
//! [`linalg`] holds the shared dense complex kernels and the validated
//! newtypes ([`StateVector`], [`DensityMatrix`], [`UnitaryMatrix`],
//! [`StateSet`]). [`cli`] drives everything from TOML configuration files and
//! backs the `dctc` binary.
//!
//! ```
//! use dctc_superpose::{brun, superpose, SuperpositionSpec};
//! use num_complex::Complex64;
//!
//! let set = superpose::two_state::state_set(); // {|0⟩, |−⟩}
//! let spec = SuperpositionSpec::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
//! let bundle = brun::build_distinguisher(&set, 0).unwrap();
//! let report = superpose::run_protocol_with(&bundle, 0, 1, &spec).unwrap();
//! assert!(report.fidelity > 1.0 - 1e-8);
//! ```

pub mod brun;
pub mod cli;
pub mod dctc;
pub mod error;
pub mod linalg;
pub mod random;
pub mod report;
pub mod superpose;

pub use brun::{build_distinguisher, distinguish, DistinguisherBundle};
pub use dctc::{fixed_point, FixedPointResult, Policy};
pub use error::{Error, Result};
pub use linalg::{DensityMatrix, StateSet, StateVector, UnitaryMatrix};
pub use superpose::{run_protocol, ProtocolReport, SuperpositionSpec};
