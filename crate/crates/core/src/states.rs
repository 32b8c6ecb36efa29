//! Validated density matrices, the six structured state families, and the
//! pure and mixed initial states used in the evolution scenarios.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, Matrix4, C64, HERMITIAN_TOL, ZERO};

pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as positive semidefinite is `-PSD_TOL`.
pub const PSD_TOL: f64 = 1e-12;
/// Slack on family weights and on the positivity bound `v² ≤ p·q`.
pub const WEIGHT_TOL: f64 = 1e-12;

/// A Hermitian, unit-trace, positive-semidefinite 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix4);

impl DensityMatrix {
    pub fn matrix(&self) -> &Matrix4 {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4 {
        self.0
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::identity() * 0.25)
    }

    /// Projector onto a normalized ket.
    pub fn from_ket(ket: &[C64; 4]) -> Result<Self> {
        validate_density_matrix(&Matrix4::outer(ket, ket))
    }
}

/// Checks Hermiticity, unit trace, and positivity, in that order.
pub fn validate_density_matrix(m: &Matrix4) -> Result<DensityMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceNotOne { trace });
    }
    let min_eigenvalue = hermitian_eigen(m)?.eigenvalues[0];
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix(*m))
}

impl TryFrom<Matrix4> for DensityMatrix {
    type Error = Error;
    fn try_from(m: Matrix4) -> Result<Self> {
        validate_density_matrix(&m)
    }
}

/// Diagonal weights of each family, named after the populations they set.
///
/// | family | diagonal (|00⟩,|01⟩,|10⟩,|11⟩) | coherence |
/// |---|---|---|
/// | 1 | (a, 0, 0, 1−a) | (|00⟩,|11⟩) |
/// | 2 | (0, b, 1−b, 0) | (|01⟩,|10⟩) |
/// | 3 | (0, 1−c−d, c, d) | (|01⟩,|10⟩) |
/// | 4 | (a, b, 1−a−b, 0) | (|01⟩,|10⟩) |
/// | 5 | (1−c−d, 0, c, d) | (|00⟩,|11⟩) |
/// | 6 | (1−b−d, b, 0, d) | (|00⟩,|11⟩) |
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyWeights {
    One { a: f64 },
    Two { b: f64 },
    Three { c: f64, d: f64 },
    Four { a: f64, b: f64 },
    Five { c: f64, d: f64 },
    Six { b: f64, d: f64 },
}

impl FamilyWeights {
    pub fn family(&self) -> u8 {
        match self {
            Self::One { .. } => 1,
            Self::Two { .. } => 2,
            Self::Three { .. } => 3,
            Self::Four { .. } => 4,
            Self::Five { .. } => 5,
            Self::Six { .. } => 6,
        }
    }

    pub fn populations(&self) -> [f64; 4] {
        match *self {
            Self::One { a } => [a, 0.0, 0.0, 1.0 - a],
            Self::Two { b } => [0.0, b, 1.0 - b, 0.0],
            Self::Three { c, d } => [0.0, 1.0 - c - d, c, d],
            Self::Four { a, b } => [a, b, 1.0 - a - b, 0.0],
            Self::Five { c, d } => [1.0 - c - d, 0.0, c, d],
            Self::Six { b, d } => [1.0 - b - d, b, 0.0, d],
        }
    }

    fn named(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::One { a } => vec![("a", a)],
            Self::Two { b } => vec![("b", b)],
            Self::Three { c, d } | Self::Five { c, d } => vec![("c", c), ("d", d)],
            Self::Four { a, b } => vec![("a", a), ("b", b)],
            Self::Six { b, d } => vec![("b", b), ("d", d)],
        }
    }
}

/// Upper-triangle position of the family's single coherence.
pub fn coherence_slot(family: u8) -> (usize, usize) {
    match family {
        2..=4 => (1, 2),
        _ => (0, 3),
    }
}

/// Parameters of one member of the six families. The coherence enters the
/// upper slot as `e^{−iα}·v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    weights: FamilyWeights,
    v: f64,
    alpha: f64,
}

impl FamilyParams {
    pub fn new(weights: FamilyWeights, v: f64, alpha: f64) -> Result<Self> {
        let named = weights.named();
        for &(name, x) in &named {
            if !x.is_finite() || !(-WEIGHT_TOL..=1.0 + WEIGHT_TOL).contains(&x) {
                return Err(Error::InvalidWeights(format!("{name} = {x} not in [0, 1]")));
            }
        }
        let pops = weights.populations();
        if let Some(p) = pops
            .iter()
            .find(|&&p| !(-WEIGHT_TOL..=1.0 + WEIGHT_TOL).contains(&p))
        {
            return Err(Error::InvalidWeights(format!(
                "complementary weight {p} not in [0, 1]"
            )));
        }
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidWeights(format!(
                "coherence magnitude v = {v} must be finite and non-negative"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidWeights("phase alpha is not finite".into()));
        }
        let (p, q) = coherence_slot(weights.family());
        let bound = pops[p] * pops[q];
        if v * v > bound + WEIGHT_TOL {
            return Err(Error::PositivityViolation {
                v_squared: v * v,
                bound,
            });
        }
        Ok(Self { weights, v, alpha })
    }

    pub fn family(&self) -> u8 {
        self.weights.family()
    }

    pub fn weights(&self) -> FamilyWeights {
        self.weights
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family {}", self.family())?;
        for (name, x) in self.weights.named() {
            write!(f, " {name}={x}")?;
        }
        write!(f, " v={} alpha={}", self.v, self.alpha)
    }
}

/// The density matrix of a family member.
pub fn build_family(p: &FamilyParams) -> DensityMatrix {
    let pops = p.weights.populations();
    let mut m = Matrix4::from_diag(pops);
    let (i, j) = coherence_slot(p.family());
    let coh = C64::from_polar(p.v, -p.alpha);
    m[(i, j)] = coh;
    m[(j, i)] = coh.conj();
    // FamilyParams::new already enforced the positivity and trace invariants.
    DensityMatrix(m)
}

/// A family the state's zero pattern fits, with parameters read off it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyMatch {
    pub family: u8,
    pub params: FamilyParams,
}

/// Diagonal positions allowed to be nonzero, per family.
fn support(family: u8) -> [bool; 4] {
    match family {
        1 => [true, false, false, true],
        2 => [false, true, true, false],
        3 => [false, true, true, true],
        4 => [true, true, true, false],
        5 => [true, false, true, true],
        _ => [true, true, false, true],
    }
}

/// Largest modulus among the entries family `family` requires to vanish.
pub fn pattern_residual(rho: &DensityMatrix, family: u8) -> f64 {
    let m = rho.matrix();
    let diag = support(family);
    let (p, q) = coherence_slot(family);
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            let allowed = if i == j {
                diag[i]
            } else {
                (i, j) == (p, q) || (i, j) == (q, p)
            };
            if !allowed {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// Every family whose zero pattern `rho` matches within `tol`.
pub fn classify_family(rho: &DensityMatrix, tol: f64) -> Vec<FamilyMatch> {
    let m = rho.matrix();
    let pop = |k: usize| m[(k, k)].re.clamp(0.0, 1.0);
    (1..=6u8)
        .filter(|&family| pattern_residual(rho, family) <= tol)
        .map(|family| {
            let weights = match family {
                1 => FamilyWeights::One { a: pop(0) },
                2 => FamilyWeights::Two { b: pop(1) },
                3 => FamilyWeights::Three {
                    c: pop(2),
                    d: pop(3),
                },
                4 => FamilyWeights::Four {
                    a: pop(0),
                    b: pop(1),
                },
                5 => FamilyWeights::Five {
                    c: pop(2),
                    d: pop(3),
                },
                _ => FamilyWeights::Six {
                    b: pop(1),
                    d: pop(3),
                },
            };
            let (i, j) = coherence_slot(family);
            let coh = m[(i, j)];
            let v = coh.norm();
            let alpha = if v <= tol { 0.0 } else { -coh.arg() };
            FamilyMatch {
                family,
                params: FamilyParams { weights, v, alpha },
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PureKind {
    /// `sinθ|00⟩ + e^{−iα}cosθ|11⟩`
    Psi,
    /// `sinθ|01⟩ + cosθ|10⟩`
    PhiPlus,
    /// `sinθ|01⟩ − cosθ|10⟩`
    PhiMinus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureInitialState {
    pub kind: PureKind,
    pub theta: f64,
    /// Relative phase; 0 for `PhiPlus` and π for `PhiMinus`.
    pub alpha: f64,
}

impl PureInitialState {
    pub fn psi(theta: f64, alpha: f64) -> Self {
        Self {
            kind: PureKind::Psi,
            theta,
            alpha,
        }
    }

    pub fn phi_plus(theta: f64) -> Self {
        Self {
            kind: PureKind::PhiPlus,
            theta,
            alpha: 0.0,
        }
    }

    pub fn phi_minus(theta: f64) -> Self {
        Self {
            kind: PureKind::PhiMinus,
            theta,
            alpha: std::f64::consts::PI,
        }
    }

    pub fn ket(&self) -> [C64; 4] {
        let (s, c) = self.theta.sin_cos();
        match self.kind {
            PureKind::Psi => [
                C64::new(s, 0.0),
                ZERO,
                ZERO,
                C64::from_polar(c, -self.alpha),
            ],
            PureKind::PhiPlus => [ZERO, C64::new(s, 0.0), C64::new(c, 0.0), ZERO],
            PureKind::PhiMinus => [ZERO, C64::new(s, 0.0), C64::new(-c, 0.0), ZERO],
        }
    }
}

pub fn pure_initial(s: &PureInitialState) -> Result<DensityMatrix> {
    if !s.theta.is_finite() || !s.alpha.is_finite() {
        return Err(Error::InvalidArgument(
            "pure state angles must be finite".into(),
        ));
    }
    let ket = s.ket();
    Ok(DensityMatrix(Matrix4::outer(&ket, &ket).hermitian_part()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedInitialState {
    kind: u8,
    pub theta: f64,
}

impl MixedInitialState {
    pub fn new(kind: u8, theta: f64) -> Result<Self> {
        if !(1..=6).contains(&kind) {
            return Err(Error::InvalidMixedKind(kind));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidArgument("theta must be finite".into()));
        }
        Ok(Self { kind, theta })
    }

    pub fn kind(&self) -> u8 {
        self.kind
    }

    /// Basis indices carrying weights `sin²θ` and `cos²θ`.
    fn slots(&self) -> (usize, usize) {
        match self.kind {
            1 => (0, 3),
            2 => (1, 2),
            3 => (2, 3),
            4 => (1, 3),
            5 => (0, 2),
            _ => (0, 1),
        }
    }
}

/// The diagonal mixture `sin²θ|x⟩⟨x| + cos²θ|y⟩⟨y|` for the given kind.
///
/// Kind 6 is `sin²θ|00⟩⟨00| + cos²θ|01⟩⟨01|`; see [`printed_mixed_six`] for
/// the non-Hermitian matrix it replaces.
pub fn mixed_initial(s: &MixedInitialState) -> DensityMatrix {
    let (x, y) = s.slots();
    let (sin, cos) = s.theta.sin_cos();
    let mut diag = [0.0; 4];
    diag[x] = sin * sin;
    diag[y] = cos * cos;
    DensityMatrix(Matrix4::from_diag(diag))
}

/// `sin²θ|01⟩⟨00| + cos²θ|01⟩⟨01|`, taken literally. Not Hermitian for
/// `sinθ ≠ 0`.
pub fn printed_mixed_six(theta: f64) -> Matrix4 {
    let (sin, cos) = theta.sin_cos();
    let mut m = Matrix4::zeros();
    m[(1, 0)] = C64::new(sin * sin, 0.0);
    m[(1, 1)] = C64::new(cos * cos, 0.0);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn bell() -> Matrix4 {
        let mut m = Matrix4::zeros();
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = C64::new(0.5, 0.0);
        }
        m
    }

    #[test]
    fn family_one_bell() {
        let p = FamilyParams::new(FamilyWeights::One { a: 0.5 }, 0.5, 0.0).unwrap();
        assert!(build_family(&p).matrix().max_abs_diff(&bell()) < 1e-16);
    }

    #[test]
    fn family_three_positivity() {
        let ok = FamilyParams::new(FamilyWeights::Three { c: 0.3, d: 0.2 }, 0.3, 0.0);
        assert!(ok.is_ok());
        let rho = build_family(&ok.unwrap());
        assert!(validate_density_matrix(rho.matrix()).is_ok());

        let err = FamilyParams::new(FamilyWeights::Three { c: 0.3, d: 0.2 }, 0.45, 0.0);
        assert!(matches!(err, Err(Error::PositivityViolation { .. })));
    }

    #[test]
    fn family_weight_errors() {
        assert!(matches!(
            FamilyParams::new(FamilyWeights::Four { a: 0.7, b: 0.5 }, 0.0, 0.0),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            FamilyParams::new(FamilyWeights::Two { b: 1.2 }, 0.0, 0.0),
            Err(Error::InvalidWeights(_))
        ));
        // negative v is not phase-absorbed
        assert!(matches!(
            FamilyParams::new(FamilyWeights::One { a: 0.5 }, -0.1, 0.0),
            Err(Error::InvalidWeights(_))
        ));
    }

    #[test]
    fn validation_errors() {
        assert!(validate_density_matrix(&(Matrix4::identity() * 0.25)).is_ok());
        assert!(matches!(
            validate_density_matrix(&Matrix4::from_diag([1.0, 1.0, 0.0, 0.0])),
            Err(Error::TraceNotOne { .. })
        ));
        assert!(matches!(
            validate_density_matrix(&Matrix4::from_diag([1.5, -0.5, 0.0, 0.0])),
            Err(Error::NotPositive { .. })
        ));
        let mut m = Matrix4::from_diag([1.0, 0.0, 0.0, 0.0]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(
            validate_density_matrix(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn classify_bell() {
        let rho = validate_density_matrix(&bell()).unwrap();
        let found = classify_family(&rho, 1e-12);
        let ids: Vec<u8> = found.iter().map(|m| m.family).collect();
        assert_eq!(ids, vec![1, 5, 6]);
        assert_eq!(
            found[1].params.weights(),
            FamilyWeights::Five { c: 0.0, d: 0.5 }
        );
        assert_eq!(
            found[2].params.weights(),
            FamilyWeights::Six { b: 0.0, d: 0.5 }
        );
    }

    #[test]
    fn classify_maximally_mixed_is_empty() {
        assert!(classify_family(&DensityMatrix::maximally_mixed(), 1e-12).is_empty());
    }

    #[test]
    fn classify_family_two_containment() {
        let p = FamilyParams::new(FamilyWeights::Two { b: 0.4 }, 0.2, 1.0).unwrap();
        let found = classify_family(&build_family(&p), 1e-12);
        let ids: Vec<u8> = found.iter().map(|m| m.family).collect();
        assert_eq!(ids, vec![2, 3, 4]);
        for m in &found {
            assert!((m.params.v() - 0.2).abs() < 1e-15);
            assert!((m.params.alpha() - 1.0).abs() < 1e-15);
        }
        assert_eq!(
            found[1].params.weights(),
            FamilyWeights::Three { c: 0.6, d: 0.0 }
        );
        assert_eq!(
            found[2].params.weights(),
            FamilyWeights::Four { a: 0.0, b: 0.4 }
        );
    }

    #[test]
    fn pure_states() {
        let up = pure_initial(&PureInitialState::psi(FRAC_PI_2, 0.3)).unwrap();
        assert!(
            up.matrix()
                .max_abs_diff(&Matrix4::from_diag([1.0, 0.0, 0.0, 0.0]))
                < 1e-15
        );

        let b = pure_initial(&PureInitialState::psi(FRAC_PI_4, 0.0)).unwrap();
        assert!(b.matrix().max_abs_diff(&bell()) < 1e-15);

        for s in [
            PureInitialState::psi(0.3, 1.1),
            PureInitialState::phi_plus(0.7),
            PureInitialState::phi_minus(1.9),
        ] {
            let rho = pure_initial(&s).unwrap();
            assert!((*rho.matrix() * *rho.matrix()).max_abs_diff(rho.matrix()) < 1e-12);
            assert!(validate_density_matrix(rho.matrix()).is_ok());
        }
    }

    #[test]
    fn psi_lands_in_family_one() {
        let theta = 0.4;
        let rho = pure_initial(&PureInitialState::psi(theta, 0.9)).unwrap();
        let m = classify_family(&rho, 1e-12);
        assert_eq!(m[0].family, 1);
        assert!((m[0].params.v() - (theta.sin() * theta.cos()).abs()).abs() < 1e-15);
        assert_eq!(
            m[0].params.weights(),
            FamilyWeights::One {
                a: theta.sin().powi(2)
            }
        );
        // e^{−iα} on |11⟩ puts e^{+iα} in the upper coherence slot
        assert!((m[0].params.alpha() + 0.9).abs() < 1e-14);
    }

    #[test]
    fn mixed_states() {
        let m1 = mixed_initial(&MixedInitialState::new(1, FRAC_PI_2).unwrap());
        assert!(
            m1.matrix()
                .max_abs_diff(&Matrix4::from_diag([1.0, 0.0, 0.0, 0.0]))
                < 1e-15
        );
        let theta = 0.8_f64;
        let (s2, c2) = (theta.sin().powi(2), theta.cos().powi(2));
        let m3 = mixed_initial(&MixedInitialState::new(3, theta).unwrap());
        assert_eq!(*m3.matrix(), Matrix4::from_diag([0.0, 0.0, s2, c2]));
        let m6 = mixed_initial(&MixedInitialState::new(6, theta).unwrap());
        assert_eq!(*m6.matrix(), Matrix4::from_diag([s2, c2, 0.0, 0.0]));
        assert!(MixedInitialState::new(7, 0.1).is_err());
        for k in 1..=6 {
            let rho = mixed_initial(&MixedInitialState::new(k, theta).unwrap());
            assert!(validate_density_matrix(rho.matrix()).is_ok());
        }
    }

    #[test]
    fn printed_kind_six_is_not_hermitian() {
        let m = printed_mixed_six(0.6);
        assert!((m.hermiticity_defect() - 0.6_f64.sin().powi(2)).abs() < 1e-15);
        assert!(printed_mixed_six(0.0).is_hermitian(0.0));
    }
}
