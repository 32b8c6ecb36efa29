//! Spin-tensor operator basis `s_μν = σ_μ ⊗ σ_ν`, total-spin observables,
//! and the two-qubit Hamiltonians assembled from them.
//!
//! Basis ordering is |00⟩, |01⟩, |10⟩, |11⟩ throughout.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{kron, Matrix2, Matrix4, HERMITIAN_TOL, I, ONE, ZERO};
use crate::states::DensityMatrix;

/// Imaginary part above which an expectation value is rejected.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-12;
/// Tolerance for the coefficient patterns in [`matches_form`].
pub const FORM_TOL: f64 = 1e-12;

/// Index of a single-qubit Pauli matrix; 0 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const I: PauliIndex = PauliIndex(0);
    pub const X: PauliIndex = PauliIndex(1);
    pub const Y: PauliIndex = PauliIndex(2);
    pub const Z: PauliIndex = PauliIndex(3);

    pub fn new(value: u8) -> Result<Self> {
        if value <= 3 {
            Ok(PauliIndex(value))
        } else {
            Err(Error::InvalidPauliIndex(value))
        }
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> [PauliIndex; 4] {
        [Self::I, Self::X, Self::Y, Self::Z]
    }
}

impl TryFrom<u8> for PauliIndex {
    type Error = Error;
    fn try_from(value: u8) -> Result<Self> {
        Self::new(value)
    }
}

pub fn pauli(k: PauliIndex) -> Matrix2 {
    match k.0 {
        0 => Matrix2::identity(),
        1 => Matrix2([[ZERO, ONE], [ONE, ZERO]]),
        2 => Matrix2([[ZERO, -I], [I, ZERO]]),
        _ => Matrix2::from_diag([1.0, -1.0]),
    }
}

/// A Hermitian operator with a human-readable label.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: Matrix4,
    label: String,
}

impl Observable {
    pub fn new(matrix: Matrix4, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    // Only for sums of spin tensors with real coefficients.
    fn hermitian_unchecked(matrix: Matrix4, label: impl Into<String>) -> Self {
        Self {
            matrix,
            label: label.into(),
        }
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn s(mu: u8, nu: u8) -> Matrix4 {
    kron(&pauli(PauliIndex(mu)), &pauli(PauliIndex(nu)))
}

/// `s_μν = σ_μ ⊗ σ_ν`.
pub fn spin_tensor(mu: PauliIndex, nu: PauliIndex) -> Observable {
    Observable::hermitian_unchecked(s(mu.0, nu.0), format!("s_{{{}{}}}", mu.0, nu.0))
}

/// `S_z = (s₃₀ + s₀₃)/2 = diag(1, 0, 0, −1)`.
pub fn total_spin_z() -> Observable {
    Observable::hermitian_unchecked((s(3, 0) + s(0, 3)) * 0.5, "S_z")
}

/// `S² = Σᵢ SᵢSᵢ` with `Sᵢ = (sᵢ₀ + s₀ᵢ)/2`.
pub fn total_spin_squared() -> Observable {
    let mut sum = Matrix4::zeros();
    for i in 1..=3 {
        let si = (s(i, 0) + s(0, i)) * 0.5;
        sum = sum + si * si;
    }
    Observable::hermitian_unchecked(sum.hermitian_part(), "S^2")
}

/// `Tr(O ρ)`; the imaginary part must vanish to within
/// [`EXPECTATION_IMAG_TOL`].
pub fn expectation(o: &Observable, rho: &DensityMatrix) -> Result<f64> {
    let m = o.matrix();
    let r = rho.matrix();
    let mut tr = ZERO;
    for i in 0..4 {
        for k in 0..4 {
            tr += m[(i, k)] * r[(k, i)];
        }
    }
    if tr.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(Error::NonRealExpectation { imag: tr.im });
    }
    Ok(tr.re)
}

/// Real coefficient table `h_μν` of `H = Σ h_μν s_μν`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HamiltonianCoefficients {
    h: [[f64; 4]; 4],
}

impl HamiltonianCoefficients {
    pub fn new(h: [[f64; 4]; 4]) -> Result<Self> {
        if h.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteParameter { name: "h" });
        }
        Ok(Self { h })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.h[mu][nu]
    }

    pub fn table(&self) -> &[[f64; 4]; 4] {
        &self.h
    }
}

/// `Σ_{μν} h_μν s_μν`.
pub fn hamiltonian_from_coefficients(c: &HamiltonianCoefficients) -> Observable {
    let mut m = Matrix4::zeros();
    for mu in 0..4u8 {
        for nu in 0..4u8 {
            let h = c.h[mu as usize][nu as usize];
            if h != 0.0 {
                m = m + s(mu, nu) * h;
            }
        }
    }
    Observable::hermitian_unchecked(m, "H")
}

/// The six named Hamiltonian shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianForm {
    /// `h₃₀s₃₀ + h₀₃s₀₃ + f₁(s₁₂ − s₂₁) + g₁(s₁₁ + s₂₂) + h₃₃s₃₃`
    H1,
    /// `h₃₀s₃₀ + h₀₃s₀₃ + f₂(s₁₂ + s₂₁) + g₂(s₁₁ − s₂₂) + h₃₃s₃₃`
    H2,
    /// `½ω₁(s₃₀ + s₀₃) + g₁(s₁₁ + s₂₂) + h₁s₃₃`
    H11,
    /// `½ω₂(s₃₀ + s₀₃) + f₁(s₁₂ − s₂₁) + h₁s₃₃`
    H12,
    /// `½ω₂(s₃₀ − s₀₃) + g₂(s₁₁ − s₂₂) + h₂s₃₃`
    H21,
    /// `½ω₂(s₃₀ − s₀₃) + f₂(s₁₂ + s₂₁) + h₂s₃₃`
    H22,
}

impl HamiltonianForm {
    /// The broad class the form belongs to.
    pub fn class(self) -> FormClass {
        match self {
            Self::H1 | Self::H11 | Self::H12 => FormClass::H1,
            Self::H2 | Self::H21 | Self::H22 => FormClass::H2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::H1 => "H[1]",
            Self::H2 => "H[2]",
            Self::H11 => "H[1,1]",
            Self::H12 => "H[1,2]",
            Self::H21 => "H[2,1]",
            Self::H22 => "H[2,2]",
        }
    }
}

impl fmt::Display for HamiltonianForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The two general coefficient patterns under which the family relations
/// keep their form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormClass {
    H1,
    H2,
}

impl fmt::Display for FormClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormClass::H1 => "H[1]",
            FormClass::H2 => "H[2]",
        })
    }
}

/// Named Hamiltonian parameters. Each form reads only the fields it uses.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HamiltonianParams {
    pub h30: Option<f64>,
    pub h03: Option<f64>,
    pub h33: Option<f64>,
    pub f1: Option<f64>,
    pub g1: Option<f64>,
    pub f2: Option<f64>,
    pub g2: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
}

impl HamiltonianParams {
    /// Looks up a parameter by its short name (`omega1`, `g2`, `h30`, ...).
    pub fn slot_mut(&mut self, name: &str) -> Option<&mut Option<f64>> {
        Some(match name {
            "h30" => &mut self.h30,
            "h03" => &mut self.h03,
            "h33" => &mut self.h33,
            "f1" => &mut self.f1,
            "g1" => &mut self.g1,
            "f2" => &mut self.f2,
            "g2" => &mut self.g2,
            "omega1" => &mut self.omega1,
            "omega2" => &mut self.omega2,
            "h1" => &mut self.h1,
            "h2" => &mut self.h2,
            _ => return None,
        })
    }
}

fn require(value: Option<f64>, name: &'static str) -> Result<f64> {
    let v = value.ok_or(Error::MissingParameter(name))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteParameter { name })
    }
}

/// A Hamiltonian form together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NamedHamiltonian {
    pub form: HamiltonianForm,
    pub params: HamiltonianParams,
}

impl NamedHamiltonian {
    pub fn new(form: HamiltonianForm, params: HamiltonianParams) -> Self {
        Self { form, params }
    }

    /// The coupling constant that drives population exchange.
    pub fn coupling(&self) -> Result<f64> {
        let p = &self.params;
        match self.form {
            HamiltonianForm::H11 => require(p.g1, "g1"),
            HamiltonianForm::H12 => require(p.f1, "f1"),
            HamiltonianForm::H21 => require(p.g2, "g2"),
            HamiltonianForm::H22 => require(p.f2, "f2"),
            HamiltonianForm::H1 => Ok(require(p.f1, "f1")?.hypot(require(p.g1, "g1")?)),
            HamiltonianForm::H2 => Ok(require(p.f2, "f2")?.hypot(require(p.g2, "g2")?)),
        }
    }

    /// Coefficient table equivalent to this named form.
    pub fn coefficients(&self) -> Result<HamiltonianCoefficients> {
        let p = &self.params;
        let mut h = [[0.0; 4]; 4];
        match self.form {
            HamiltonianForm::H1 | HamiltonianForm::H2 => {
                h[3][0] = require(p.h30, "h30")?;
                h[0][3] = require(p.h03, "h03")?;
                h[3][3] = require(p.h33, "h33")?;
                if self.form == HamiltonianForm::H1 {
                    let (f, g) = (require(p.f1, "f1")?, require(p.g1, "g1")?);
                    h[1][2] = f;
                    h[2][1] = -f;
                    h[1][1] = g;
                    h[2][2] = g;
                } else {
                    let (f, g) = (require(p.f2, "f2")?, require(p.g2, "g2")?);
                    h[1][2] = f;
                    h[2][1] = f;
                    h[1][1] = g;
                    h[2][2] = -g;
                }
            }
            HamiltonianForm::H11 => {
                let w = require(p.omega1, "omega1")?;
                let g = require(p.g1, "g1")?;
                h[3][0] = w / 2.0;
                h[0][3] = w / 2.0;
                h[1][1] = g;
                h[2][2] = g;
                h[3][3] = require(p.h1, "h1")?;
            }
            HamiltonianForm::H12 => {
                let w = require(p.omega2, "omega2")?;
                let f = require(p.f1, "f1")?;
                h[3][0] = w / 2.0;
                h[0][3] = w / 2.0;
                h[1][2] = f;
                h[2][1] = -f;
                h[3][3] = require(p.h1, "h1")?;
            }
            HamiltonianForm::H21 => {
                let w = require(p.omega2, "omega2")?;
                let g = require(p.g2, "g2")?;
                h[3][0] = w / 2.0;
                h[0][3] = -w / 2.0;
                h[1][1] = g;
                h[2][2] = -g;
                h[3][3] = require(p.h2, "h2")?;
            }
            HamiltonianForm::H22 => {
                let w = require(p.omega2, "omega2")?;
                let f = require(p.f2, "f2")?;
                h[3][0] = w / 2.0;
                h[0][3] = -w / 2.0;
                h[1][2] = f;
                h[2][1] = f;
                h[3][3] = require(p.h2, "h2")?;
            }
        }
        HamiltonianCoefficients::new(h)
    }
}

/// Builds the named Hamiltonian directly from the spin-tensor combination of
/// its defining expression.
pub fn named_hamiltonian(h: &NamedHamiltonian) -> Result<Observable> {
    let p = &h.params;
    let m = match h.form {
        HamiltonianForm::H1 => {
            s(3, 0) * require(p.h30, "h30")?
                + s(0, 3) * require(p.h03, "h03")?
                + (s(1, 2) - s(2, 1)) * require(p.f1, "f1")?
                + (s(1, 1) + s(2, 2)) * require(p.g1, "g1")?
                + s(3, 3) * require(p.h33, "h33")?
        }
        HamiltonianForm::H2 => {
            s(3, 0) * require(p.h30, "h30")?
                + s(0, 3) * require(p.h03, "h03")?
                + (s(1, 2) + s(2, 1)) * require(p.f2, "f2")?
                + (s(1, 1) - s(2, 2)) * require(p.g2, "g2")?
                + s(3, 3) * require(p.h33, "h33")?
        }
        HamiltonianForm::H11 => {
            (s(3, 0) + s(0, 3)) * (0.5 * require(p.omega1, "omega1")?)
                + (s(1, 1) + s(2, 2)) * require(p.g1, "g1")?
                + s(3, 3) * require(p.h1, "h1")?
        }
        HamiltonianForm::H12 => {
            (s(3, 0) + s(0, 3)) * (0.5 * require(p.omega2, "omega2")?)
                + (s(1, 2) - s(2, 1)) * require(p.f1, "f1")?
                + s(3, 3) * require(p.h1, "h1")?
        }
        HamiltonianForm::H21 => {
            (s(3, 0) - s(0, 3)) * (0.5 * require(p.omega2, "omega2")?)
                + (s(1, 1) - s(2, 2)) * require(p.g2, "g2")?
                + s(3, 3) * require(p.h2, "h2")?
        }
        HamiltonianForm::H22 => {
            (s(3, 0) - s(0, 3)) * (0.5 * require(p.omega2, "omega2")?)
                + (s(1, 2) + s(2, 1)) * require(p.f2, "f2")?
                + s(3, 3) * require(p.h2, "h2")?
        }
    };
    Ok(Observable::hermitian_unchecked(m, h.form.name()))
}

/// True iff every nonzero coefficient is one the class permits, with the
/// paired entries tied as the class requires.
pub fn matches_form(c: &HamiltonianCoefficients, class: FormClass) -> bool {
    let h = &c.h;
    let permitted = |mu: usize, nu: usize| {
        matches!(
            (mu, nu),
            (3, 0) | (0, 3) | (3, 3) | (1, 1) | (2, 2) | (1, 2) | (2, 1)
        )
    };
    for mu in 0..4 {
        for nu in 0..4 {
            if !permitted(mu, nu) && h[mu][nu].abs() > FORM_TOL {
                return false;
            }
        }
    }
    match class {
        FormClass::H1 => {
            (h[1][2] + h[2][1]).abs() <= FORM_TOL && (h[1][1] - h[2][2]).abs() <= FORM_TOL
        }
        FormClass::H2 => {
            (h[1][2] - h[2][1]).abs() <= FORM_TOL && (h[1][1] + h[2][2]).abs() <= FORM_TOL
        }
    }
}
