//! Two-qubit entanglement as a function of spin observables.
//!
//! The crate builds the six structured two-qubit state families, the spin
//! tensor `s_μν = σ_μ ⊗ σ_ν` with total-spin observables, and the named
//! Hamiltonians that preserve each family's structure. Negativity is always
//! available from an independent partial-transpose eigenvalue computation,
//! against which every closed-form and observable-based relation is checked.

pub mod entanglement;
pub mod error;
pub mod evolution;
pub mod figures;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod spin;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
