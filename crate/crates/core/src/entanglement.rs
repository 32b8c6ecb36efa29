//! Negativity from the partial transpose, and the closed-form and
//! observable-based negativity relations in their literal and corrected
//! readings.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, Matrix4};
use crate::spin::{expectation, spin_tensor, total_spin_squared, total_spin_z, PauliIndex};
use crate::states::{build_family, DensityMatrix, FamilyParams, FamilyWeights};

/// Negative radicands smaller than this in magnitude are rounding noise and
/// evaluate as zero.
pub const DOMAIN_SLACK: f64 = 1e-12;
/// Slack on the physical ranges of [`ObservableVector`] components.
pub const OBSERVABLE_SLACK: f64 = 1e-9;

/// Partial transpose on the second qubit:
/// `((a,b),(c,d)) ↦ ((a,d),(c,b))` in `|q₁q₂⟩` ordering.
pub fn partial_transpose_matrix(m: &Matrix4) -> Matrix4 {
    Matrix4::from_fn(|r, c| {
        let (a, d) = (r / 2, r % 2);
        let (cc, b) = (c / 2, c % 2);
        m[(2 * a + b, 2 * cc + d)]
    })
}

pub fn partial_transpose(rho: &DensityMatrix) -> Matrix4 {
    partial_transpose_matrix(rho.matrix())
}

/// `N(ρ) = Σ |min(λ_k(ρ^{T₂}), 0)|`.
pub fn negativity_oracle(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho);
    let e = hermitian_eigen(&pt)?;
    Ok(e.eigenvalues.iter().map(|&l| (-l).max(0.0)).sum())
}

/// Which reading of a printed formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaVariant {
    /// The expression exactly as printed.
    AsPrinted,
    /// The expression that agrees with the partial-transpose negativity.
    Corrected,
}

impl fmt::Display for FormulaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AsPrinted => "as-printed",
            Self::Corrected => "corrected",
        })
    }
}

/// Expectation values `⟨s₁₁⟩, ⟨s₁₂⟩, ⟨S_z⟩, ⟨S²⟩`.
///
/// `⟨1 − S_z⟩` and `⟨1 + S_z⟩` are kept alongside `⟨S_z⟩`: near `S_z = ±1`
/// the rounded value of `⟨S_z⟩` alone cannot resolve `1 − ⟨S_z⟩²` below
/// about `1e-16`, which the square root in the pure-state relation
/// amplifies to `1e-8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableVector {
    pub s11: f64,
    pub s12: f64,
    pub sz: f64,
    pub s2: f64,
    sz_margins: (f64, f64),
}

impl ObservableVector {
    pub fn new(s11: f64, s12: f64, sz: f64, s2: f64) -> Result<Self> {
        if ![s11, s12, sz, s2].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument(
                "observable values must be finite".into(),
            ));
        }
        if sz.abs() > 1.0 + OBSERVABLE_SLACK {
            return Err(Error::InvalidArgument(format!(
                "<S_z> = {sz} outside [-1, 1]"
            )));
        }
        if !(-OBSERVABLE_SLACK..=2.0 + OBSERVABLE_SLACK).contains(&s2) {
            return Err(Error::InvalidArgument(format!(
                "<S^2> = {s2} outside [0, 2]"
            )));
        }
        Ok(Self {
            s11,
            s12,
            sz,
            s2,
            sz_margins: (1.0 - sz, 1.0 + sz),
        })
    }

    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            s11: expectation(&spin_tensor(PauliIndex::X, PauliIndex::X), rho)?,
            s12: expectation(&spin_tensor(PauliIndex::X, PauliIndex::Y), rho)?,
            sz: expectation(&total_spin_z(), rho)?,
            s2: expectation(&total_spin_squared(), rho)?,
            sz_margins: spin_z_margins(rho),
        })
    }

    /// `(⟨1 − S_z⟩, ⟨1 + S_z⟩)`.
    pub fn sz_margins(&self) -> (f64, f64) {
        self.sz_margins
    }

    fn transverse_sq(&self) -> f64 {
        self.s11 * self.s11 + self.s12 * self.s12
    }
}

/// `⟨1 ∓ S_z⟩` summed from the populations they weight, using `Tr ρ = 1`.
fn spin_z_margins(rho: &DensityMatrix) -> (f64, f64) {
    let m = rho.matrix();
    let p = |i: usize| m[(i, i)].re.max(0.0);
    let mid = p(1) + p(2);
    (mid + 2.0 * p(3), mid + 2.0 * p(0))
}

fn sqrt_checked(formula: &'static str, radicand: f64) -> Result<f64> {
    if radicand < -DOMAIN_SLACK {
        return Err(Error::DomainError { formula, radicand });
    }
    Ok(radicand.max(0.0).sqrt())
}

fn check_family(family: u8) -> Result<()> {
    if (1..=6).contains(&family) {
        Ok(())
    } else {
        Err(Error::InvalidFamily(family))
    }
}

/// Closed-form negativity of a family member.
///
/// Families 3–6 print as `√(x² + v²) − x`; the partial transpose gives
/// `(√(x² + 4v²) − x)/2`, where `x` is the population sharing the
/// transposed coherence block (`d₃`, `a₄`, `c₅`, `b₆`).
pub fn family_negativity(p: &FamilyParams, variant: FormulaVariant) -> f64 {
    let v = p.v();
    let x = match p.weights() {
        FamilyWeights::One { .. } | FamilyWeights::Two { .. } => return v,
        FamilyWeights::Three { d, .. } => d,
        FamilyWeights::Four { a, .. } => a,
        FamilyWeights::Five { c, .. } => c,
        FamilyWeights::Six { b, .. } => b,
    };
    match variant {
        FormulaVariant::AsPrinted => (x * x + v * v).sqrt() - x,
        FormulaVariant::Corrected => ((x * x + 4.0 * v * v).sqrt() - x) / 2.0,
    }
}

/// Negativity of a family member from its spin-tensor expectation values.
///
/// The corrected relation is `½(√(⟨s₁₁⟩² + ⟨s₁₂⟩² + X²) − X)` with
/// `X = 0, 0, −⟨S_z⟩, ⟨S_z⟩, 2 − ⟨S²⟩, 2 − ⟨S²⟩` for families 1..6.
pub fn observable_negativity(
    family: u8,
    obs: &ObservableVector,
    variant: FormulaVariant,
) -> Result<f64> {
    check_family(family)?;
    let t = obs.transverse_sq();
    let x = match family {
        1 | 2 => 0.0,
        3 => -obs.sz,
        4 => obs.sz,
        _ => 2.0 - obs.s2,
    };
    Ok(match variant {
        FormulaVariant::Corrected => 0.5 * ((t + x * x).sqrt() - x),
        FormulaVariant::AsPrinted => match family {
            1 | 2 => 0.5 * t.sqrt(),
            3 => 0.5 * (t + obs.sz * obs.sz).sqrt() + obs.sz,
            4 => 0.5 * (t + obs.sz * obs.sz).sqrt() - obs.sz,
            _ => 0.5 * (t + x * x).sqrt() + obs.s2 - 2.0,
        },
    })
}

/// The evolution scenarios with a dedicated negativity relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    /// `|ψ⟩` evolving within family 1.
    Psi,
    /// `|φ±⟩` evolving within family 2.
    Phi,
    /// Mixed kind 1 under `H[2,1]` or `H[2,2]`.
    M1,
    /// Mixed kind 2 under `H[1,2]`.
    M2,
    /// Mixed kinds 3, 4 under `H[1,2]` (land in family 3).
    M34,
    /// Mixed kinds 5, 6 under `H[1,2]` (land in family 4).
    M56,
    /// Mixed kinds 3–6 under `H[2,1]` or `H[2,2]` (land in families 5, 6).
    M3456H2x,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Psi => "N_psi",
            Self::Phi => "N_phi",
            Self::M1 => "N_M1",
            Self::M2 => "N_M2",
            Self::M34 => "N_M34",
            Self::M56 => "N_M56",
            Self::M3456H2x => "N_M3456",
        }
    }
}

/// Negativity of a scenario state from its observables. `obs0` carries the
/// time-zero values and is required for [`ScenarioKind::M1`].
pub fn scenario_negativity(
    kind: ScenarioKind,
    obs: &ObservableVector,
    obs0: Option<&ObservableVector>,
    variant: FormulaVariant,
) -> Result<f64> {
    let sz = obs.sz;
    let s2 = obs.s2;
    let printed = variant == FormulaVariant::AsPrinted;
    match kind {
        ScenarioKind::Psi => {
            let (below, above) = obs.sz_margins;
            if printed {
                Ok(0.5 * sqrt_checked("N_psi = sqrt(1 - <S_z>)/2", below)?)
            } else {
                Ok(0.5 * (below * above).max(0.0).sqrt())
            }
        }
        ScenarioKind::Phi | ScenarioKind::M2 => Ok(0.5 * ((s2 - 1.0) * (s2 - 1.0)).sqrt()),
        ScenarioKind::M1 => {
            let sz0 = obs0
                .ok_or_else(|| {
                    Error::InvalidArgument("M1 relation needs time-zero observables".into())
                })?
                .sz;
            let radicand = sz0 * sz0 - sz * sz;
            if printed {
                Ok(0.5 * sqrt_checked("N_M1 = sqrt(<S_z>(0)^2 - <S_z>^2)/2", radicand)?)
            } else {
                Ok(0.5 * radicand.max(0.0).sqrt())
            }
        }
        ScenarioKind::M34 => {
            if printed {
                let r = sz * sz + (s2 + sz - 1.0).powi(2);
                Ok(sqrt_checked("N_M34", r)? + sz)
            } else {
                observable_negativity(3, obs, variant)
            }
        }
        ScenarioKind::M56 => {
            if printed {
                let r = sz * sz + (s2 - sz - 1.0).powi(2);
                Ok(sqrt_checked("N_M56", r)? - sz)
            } else {
                observable_negativity(4, obs, variant)
            }
        }
        ScenarioKind::M3456H2x => {
            if printed {
                let r = (2.0 - s2).powi(2) + (s2 - 1.0).powi(2) - sz * sz;
                Ok(sqrt_checked("N_M3456", r)? + s2 - 2.0)
            } else {
                observable_negativity(5, obs, variant)
            }
        }
    }
}

/// Printed, corrected, and oracle values of one formula at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyRecord {
    pub context: String,
    pub printed_value: f64,
    pub corrected_value: f64,
    pub oracle_value: f64,
    pub abs_deviation_printed: f64,
}

impl DiscrepancyRecord {
    pub fn new(context: String, printed: f64, corrected: f64, oracle: f64) -> Self {
        Self {
            context,
            printed_value: printed,
            corrected_value: corrected,
            oracle_value: oracle,
            abs_deviation_printed: (printed - oracle).abs(),
        }
    }
}

/// What a discrepancy is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum DiscrepancyPoint<'a> {
    /// The closed form of a family member.
    ClosedForm(&'a FamilyParams),
    /// The observable relation of a family member.
    ObservableRelation(&'a FamilyParams),
    /// A scenario relation on a state, with optional time-zero state.
    Scenario {
        kind: ScenarioKind,
        state: &'a DensityMatrix,
        initial: Option<&'a DensityMatrix>,
    },
}

/// Evaluates both readings and the oracle at one point. A printed formula
/// that leaves its domain records `NaN`.
pub fn discrepancy(
    context: impl Into<String>,
    point: DiscrepancyPoint<'_>,
) -> Result<DiscrepancyRecord> {
    let context = context.into();
    match point {
        DiscrepancyPoint::ClosedForm(p) => {
            let oracle = negativity_oracle(&build_family(p))?;
            Ok(DiscrepancyRecord::new(
                context,
                family_negativity(p, FormulaVariant::AsPrinted),
                family_negativity(p, FormulaVariant::Corrected),
                oracle,
            ))
        }
        DiscrepancyPoint::ObservableRelation(p) => {
            let rho = build_family(p);
            let obs = ObservableVector::from_state(&rho)?;
            let f = p.family();
            Ok(DiscrepancyRecord::new(
                context,
                observable_negativity(f, &obs, FormulaVariant::AsPrinted)?,
                observable_negativity(f, &obs, FormulaVariant::Corrected)?,
                negativity_oracle(&rho)?,
            ))
        }
        DiscrepancyPoint::Scenario {
            kind,
            state,
            initial,
        } => {
            let obs = ObservableVector::from_state(state)?;
            let obs0 = initial.map(ObservableVector::from_state).transpose()?;
            let printed =
                match scenario_negativity(kind, &obs, obs0.as_ref(), FormulaVariant::AsPrinted) {
                    Ok(x) => x,
                    Err(Error::DomainError { .. }) => f64::NAN,
                    Err(e) => return Err(e),
                };
            Ok(DiscrepancyRecord::new(
                context,
                printed,
                scenario_negativity(kind, &obs, obs0.as_ref(), FormulaVariant::Corrected)?,
                negativity_oracle(state)?,
            ))
        }
    }
}
