//! Unitary evolution `ρ(t) = U ρ₀ U†` with `U = exp(−iHt)` (ħ = 1).

use crate::error::{Error, Result};
use crate::linalg::{Matrix4, Propagator, Sign, C64};
use crate::spin::{
    hamiltonian_from_coefficients, named_hamiltonian, HamiltonianCoefficients, NamedHamiltonian,
    Observable,
};
use crate::states::{
    build_family, mixed_initial, pure_initial, validate_density_matrix, DensityMatrix,
    FamilyParams, MixedInitialState, PureInitialState,
};

/// Strictly increasing, finite sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    values: Vec<f64>,
}

impl TimeGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid("empty".into()));
        }
        if values.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("non-finite time".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(Self { values })
    }

    /// `n ≥ 2` evenly spaced points from `start` to `end` inclusive.
    pub fn linspace(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n}"
            )));
        }
        let step = (end - start) / (n - 1) as f64;
        let mut values: Vec<f64> = (0..n).map(|k| start + step * k as f64).collect();
        values[n - 1] = end;
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Evolves states under one fixed Hamiltonian, diagonalizing it once.
#[derive(Debug, Clone, Copy)]
pub struct Evolver {
    propagator: Propagator,
}

impl Evolver {
    pub fn new(h: &Observable) -> Result<Self> {
        Ok(Self {
            propagator: Propagator::new(h.matrix())?,
        })
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    /// `exp(−iHt)`.
    pub fn unitary(&self, t: f64) -> Matrix4 {
        self.propagator.at(t, Sign::Minus)
    }

    /// `U ρ U†` for a precomputed `U`, re-validated.
    pub fn conjugate(u: &Matrix4, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = (*u * *rho.matrix() * u.adjoint()).hermitian_part();
        validate_density_matrix(&out)
    }

    /// `|ψ(t)⟩⟨ψ(t)|` with `|ψ(t)⟩ = U|ψ⟩`. For pure states this keeps small
    /// populations accurate to relative precision, which `U ρ U†` does not.
    pub fn evolve_ket(&self, ket: &[C64; 4], t: f64) -> Result<DensityMatrix> {
        DensityMatrix::from_ket(&self.unitary(t).apply(ket))
    }

    pub fn evolve(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if t == 0.0 {
            return Ok(*rho);
        }
        Self::conjugate(&self.unitary(t), rho)
    }
}

/// `ρ(t) = e^{−iHt} ρ₀ e^{iHt}`.
pub fn evolve(rho0: &DensityMatrix, h: &Observable, t: f64) -> Result<DensityMatrix> {
    Evolver::new(h)?.evolve(rho0, t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Family(FamilyParams),
    Pure(PureInitialState),
    Mixed(MixedInitialState),
    Raw(DensityMatrix),
}

impl InitialState {
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        match self {
            Self::Family(p) => Ok(build_family(p)),
            Self::Pure(s) => pure_initial(s),
            Self::Mixed(s) => Ok(mixed_initial(s)),
            Self::Raw(rho) => Ok(*rho),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianSpec {
    Named(NamedHamiltonian),
    Coefficients(HamiltonianCoefficients),
}

impl HamiltonianSpec {
    pub fn observable(&self) -> Result<Observable> {
        match self {
            Self::Named(n) => named_hamiltonian(n),
            Self::Coefficients(c) => Ok(hamiltonian_from_coefficients(c)),
        }
    }
}

/// An initial state, a Hamiltonian, and the times to sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub initial: InitialState,
    pub hamiltonian: HamiltonianSpec,
    times: TimeGrid,
}

impl Scenario {
    pub fn new(
        initial: InitialState,
        hamiltonian: HamiltonianSpec,
        times: TimeGrid,
    ) -> Result<Self> {
        if times.values()[0] != 0.0 {
            return Err(Error::InvalidGrid("scenario times must start at 0".into()));
        }
        Ok(Self {
            initial,
            hamiltonian,
            times,
        })
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    /// The evolved state at every grid time, in order.
    pub fn run(&self) -> Result<Vec<DensityMatrix>> {
        let rho0 = self.initial.density_matrix()?;
        let evolver = Evolver::new(&self.hamiltonian.observable()?)?;
        self.times
            .values()
            .iter()
            .map(|&t| evolver.evolve(&rho0, t))
            .collect()
    }
}
