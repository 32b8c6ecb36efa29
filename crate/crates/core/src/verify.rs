//! Seeded verification sweeps of the negativity relations and the
//! invariance and conservation claims, compared against the oracle.
//!
//! Random draws are made sequentially from one seeded generator, then the
//! trials are evaluated in parallel and reduced in draw order, so a report
//! depends only on its seed.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::entanglement::{
    family_negativity, negativity_oracle, observable_negativity, FormulaVariant, ObservableVector,
};
use crate::error::{Error, Result};
use crate::evolution::{Evolver, TimeGrid};
use crate::figures::{
    calibrate_time_scale, check_figure, entanglement_generation, scaled_time_grid, Figure,
    CAPTION_TOL,
};
use crate::linalg::C64;
use crate::sampling::{random_family_params, random_form, seeded};
use crate::spin::{
    named_hamiltonian, FormClass, HamiltonianForm, HamiltonianParams, NamedHamiltonian,
};
use crate::states::{build_family, pattern_residual, pure_initial, PureInitialState};

/// At most this many failing points are kept per report.
pub const MAX_LISTED_FAILURES: usize = 10;

/// Tolerance for closed forms and observable relations on static states.
pub const STATIC_TOL: f64 = 1e-12;
/// Tolerance for relations and conservation along evolutions.
pub const DYNAMIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub point: String,
    pub error: f64,
}

/// Outcome of checking one claim. `pass` holds exactly when
/// `max_abs_error ≤ tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub claim: String,
    pub trials: usize,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// First failing points, in draw order.
    pub failures: Vec<Failure>,
    pub failure_count: usize,
    pub seed: Option<u64>,
}

impl VerificationReport {
    fn from_errors(
        claim: impl Into<String>,
        trials: usize,
        tolerance: f64,
        seed: Option<u64>,
        errors: impl IntoIterator<Item = (String, f64)>,
    ) -> Self {
        let mut max_abs_error = 0.0_f64;
        let mut failures = Vec::new();
        let mut failure_count = 0;
        for (point, error) in errors {
            // NaN counts as the worst possible error.
            let error = if error.is_nan() { f64::INFINITY } else { error };
            max_abs_error = max_abs_error.max(error);
            if error > tolerance {
                failure_count += 1;
                if failures.len() < MAX_LISTED_FAILURES {
                    failures.push(Failure { point, error });
                }
            }
        }
        Self {
            claim: claim.into(),
            trials,
            max_abs_error,
            tolerance,
            pass: max_abs_error <= tolerance,
            failures,
            failure_count,
            seed,
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (trials {}, max error {:.3e}, tol {:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.claim,
            self.trials,
            self.max_abs_error,
            self.tolerance,
        )?;
        if let Some(seed) = self.seed {
            write!(f, ", seed {seed}")?;
        }
        write!(f, ")")
    }
}

fn class_name(class: FormClass) -> &'static str {
    match class {
        FormClass::H1 => "H[1]",
        FormClass::H2 => "H[2]",
    }
}

/// Closed-form negativity against the oracle on random members of a
/// family. Families 1 and 2 also check the formula as printed.
pub fn verify_closed_forms(
    family: u8,
    variant: FormulaVariant,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    if !(1..=6).contains(&family) {
        return Err(Error::InvalidFamily(family));
    }
    let mut rng = seeded(seed);
    let draws: Vec<_> = (0..trials)
        .map(|_| random_family_params(&mut rng, family))
        .collect();
    let errors: Result<Vec<(String, f64)>> = draws
        .par_iter()
        .map(|p| {
            let oracle = negativity_oracle(&build_family(p))?;
            Ok((
                p.to_string(),
                (family_negativity(p, variant) - oracle).abs(),
            ))
        })
        .collect();
    Ok(VerificationReport::from_errors(
        format!("closed form ({variant}), family {family}"),
        trials,
        tol,
        Some(seed),
        errors?,
    ))
}

/// Observable-based negativity against the oracle on random members of a
/// family.
pub fn verify_observable_relations(
    family: u8,
    variant: FormulaVariant,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    if !(1..=6).contains(&family) {
        return Err(Error::InvalidFamily(family));
    }
    let mut rng = seeded(seed);
    let draws: Vec<_> = (0..trials)
        .map(|_| random_family_params(&mut rng, family))
        .collect();
    let errors: Result<Vec<(String, f64)>> = draws
        .par_iter()
        .map(|p| {
            let rho = build_family(p);
            let obs = ObservableVector::from_state(&rho)?;
            let n = match observable_negativity(family, &obs, variant) {
                Ok(n) => n,
                Err(Error::DomainError { .. }) => f64::NAN,
                Err(e) => return Err(e),
            };
            Ok((p.to_string(), (n - negativity_oracle(&rho)?).abs()))
        })
        .collect();
    Ok(VerificationReport::from_errors(
        format!("observable relation ({variant}), family {family}"),
        trials,
        tol,
        Some(seed),
        errors?,
    ))
}

/// Whether the family's structure and relation are claimed to survive
/// evolution under the class.
pub fn pairing_claimed(family: u8, class: FormClass) -> bool {
    matches!(
        (family, class),
        (1 | 2, _) | (3 | 4, FormClass::H1) | (5 | 6, FormClass::H2)
    )
}

/// The claimed (family, class) pairings.
pub fn claimed_pairings() -> Vec<(u8, FormClass)> {
    let mut out = Vec::new();
    for family in 1..=6u8 {
        for class in [FormClass::H1, FormClass::H2] {
            if pairing_claimed(family, class) {
                out.push((family, class));
            }
        }
    }
    out
}

fn describe_form(h: &NamedHamiltonian) -> String {
    match h.coefficients() {
        Ok(c) => format!("{} {:?}", h.form.name(), c.table()),
        Err(_) => h.form.name().to_string(),
    }
}

/// Evolves random family members under random Hamiltonians of the class and
/// checks, at every grid time, that the state stays in the family and that
/// the corrected observable relation matches the oracle. Each point's error
/// is the larger of the zero-pattern residual and the relation error.
pub fn verify_relation_over_time(
    family: u8,
    class: FormClass,
    trials: usize,
    grid: &TimeGrid,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    if !(1..=6).contains(&family) {
        return Err(Error::InvalidFamily(family));
    }
    if !pairing_claimed(family, class) {
        return Err(Error::UnsupportedPairing(format!(
            "family {family} under {}",
            class_name(class)
        )));
    }
    let mut rng = seeded(seed);
    let draws: Vec<_> = (0..trials)
        .map(|_| {
            (
                random_family_params(&mut rng, family),
                random_form(&mut rng, class),
            )
        })
        .collect();
    let per_trial: Result<Vec<Vec<(String, f64)>>> = draws
        .par_iter()
        .map(|(p, h)| {
            let evolver = Evolver::new(&named_hamiltonian(h)?)?;
            let rho0 = build_family(p);
            grid.values()
                .iter()
                .map(|&t| {
                    let rho = evolver.evolve(&rho0, t)?;
                    // `classify_family(rho, tol)` lists the family exactly when
                    // this residual is within `tol`.
                    let residual = pattern_residual(&rho, family);
                    let obs = ObservableVector::from_state(&rho)?;
                    let n = observable_negativity(family, &obs, FormulaVariant::Corrected)?;
                    let error = residual.max((n - negativity_oracle(&rho)?).abs());
                    Ok((format!("{p}; {}; t={t}", describe_form(h)), error))
                })
                .collect()
        })
        .collect();
    Ok(VerificationReport::from_errors(
        format!(
            "family {family} keeps its form and relation under {}",
            class_name(class)
        ),
        trials,
        tol,
        Some(seed),
        per_trial?.into_iter().flatten(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConservationKind {
    /// `N_ψ` under a general `H[1]`.
    PsiUnderH1,
    /// `N_φ±` under `H[2]` with `h₀₃ = h₃₀`.
    PhiUnderH2Symmetric,
}

impl ConservationKind {
    pub fn claim(self) -> &'static str {
        match self {
            Self::PsiUnderH1 => "N_psi conserved under H[1]",
            Self::PhiUnderH2Symmetric => "N_phi conserved under H[2] with h03 = h30",
        }
    }
}

/// Checks `|N(t) − N(0)| ≤ tol` along evolutions from random pure states.
pub fn verify_conservation(
    kind: ConservationKind,
    trials: usize,
    grid: &TimeGrid,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = seeded(seed);
    let draws: Vec<(PureInitialState, NamedHamiltonian)> = (0..trials)
        .map(|_| {
            let theta = rng.gen::<f64>() * PI;
            match kind {
                ConservationKind::PsiUnderH1 => {
                    let alpha = rng.gen::<f64>() * TAU;
                    (
                        PureInitialState::psi(theta, alpha),
                        random_form(&mut rng, FormClass::H1),
                    )
                }
                ConservationKind::PhiUnderH2Symmetric => {
                    let state = if rng.gen::<bool>() {
                        PureInitialState::phi_plus(theta)
                    } else {
                        PureInitialState::phi_minus(theta)
                    };
                    let mut h = random_form(&mut rng, FormClass::H2);
                    h.params.h03 = h.params.h30;
                    (state, h)
                }
            }
        })
        .collect();
    let per_trial: Result<Vec<Vec<(String, f64)>>> = draws
        .par_iter()
        .map(|(state, h)| {
            let evolver = Evolver::new(&named_hamiltonian(h)?)?;
            let ket: [C64; 4] = state.ket();
            let n0 = negativity_oracle(&pure_initial(state)?)?;
            grid.values()
                .iter()
                .map(|&t| {
                    let n = negativity_oracle(&evolver.evolve_ket(&ket, t)?)?;
                    Ok((
                        format!("{state:?}; {}; t={t}", describe_form(h)),
                        (n - n0).abs(),
                    ))
                })
                .collect()
        })
        .collect();
    Ok(VerificationReport::from_errors(
        kind.claim(),
        trials,
        tol,
        Some(seed),
        per_trial?.into_iter().flatten(),
    ))
}

/// `(t, N(t))` for `|ψ⟩` evolving under an `H[2]`-type Hamiltonian, where
/// `N_ψ` is not conserved.
pub fn breaking_demo(
    theta: f64,
    hamiltonian: &NamedHamiltonian,
    grid: &TimeGrid,
) -> Result<Vec<(f64, f64)>> {
    if hamiltonian.form.class() != FormClass::H2 {
        return Err(Error::UnsupportedPairing(format!(
            "breaking demonstration needs an H[2] form, got {}",
            hamiltonian.form.name()
        )));
    }
    if hamiltonian.coupling()? == 0.0 {
        return Err(Error::InvalidArgument(
            "breaking demonstration needs nonzero coupling".into(),
        ));
    }
    let evolver = Evolver::new(&named_hamiltonian(hamiltonian)?)?;
    let ket = PureInitialState::psi(theta, 0.0).ket();
    grid.values()
        .iter()
        .map(|&t| Ok((t, negativity_oracle(&evolver.evolve_ket(&ket, t)?)?)))
        .collect()
}

/// The standard witness: `θ = 0` under `H[2,2]` with `f₂ = ½` over one
/// period, required to reach `N ≥ 0.49` and return to `N ≤ 0.01`.
pub fn verify_breaking() -> Result<VerificationReport> {
    let h = NamedHamiltonian::new(HamiltonianForm::H22, Figure::default_params());
    let grid = TimeGrid::linspace(0.0, PI, 1001)?;
    let trace = breaking_demo(0.0, &h, &grid)?;
    let max_n = trace.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let min_n = trace.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let shortfall = (0.49 - max_n).max(0.0) + (min_n - 0.01).max(0.0);
    Ok(VerificationReport::from_errors(
        format!("N_psi not conserved under H[2,2] (max {max_n:.6}, min {min_n:.2e})"),
        1,
        0.0,
        None,
        [("theta=0, f2=0.5".to_string(), shortfall)],
    ))
}

/// Per-figure checks: caption match after calibration, pointwise corrected
/// relation, and entanglement generation for the mixed-state figures.
pub fn verify_figures(
    params: &HamiltonianParams,
    theta_steps: usize,
    time_steps: usize,
    formula_tol: f64,
) -> Result<Vec<VerificationReport>> {
    let checks: Result<Vec<_>> = Figure::all()
        .into_par_iter()
        .map(|fig| check_figure(&fig, params, theta_steps, time_steps))
        .collect();
    let mut reports = Vec::new();
    for check in checks? {
        let fig = check.figure;
        reports.push(VerificationReport::from_errors(
            format!(
                "{fig} caption negativity (kappa {:.6}, gamma {})",
                check.kappa, check.gamma
            ),
            check.samples,
            CAPTION_TOL,
            None,
            [(fig.to_string(), check.caption_max_error)],
        ));
        let unclassified = if check.unclassified > 0 {
            f64::INFINITY
        } else {
            0.0
        };
        reports.push(VerificationReport::from_errors(
            format!(
                "{fig} corrected relation on the surface ({} samples off-family)",
                check.unclassified
            ),
            check.samples,
            formula_tol,
            None,
            [(fig.to_string(), check.formula_max_error.max(unclassified))],
        ));
        if fig.id() >= 5 {
            let cal = calibrate_time_scale(&fig, params)?;
            let times = scaled_time_grid(cal.kappa, time_steps)?;
            let (n0, max_n) = entanglement_generation(&fig, params, FRAC_PI_4, &times)?;
            let shortfall = n0.max((0.05 - max_n).max(0.0));
            reports.push(VerificationReport::from_errors(
                format!(
                    "{fig} separable at t=0 and entangled later (N(0) {n0:.1e}, max {max_n:.4})"
                ),
                1,
                STATIC_TOL,
                None,
                [("theta=pi/4".to_string(), shortfall)],
            ));
        }
    }
    Ok(reports)
}

/// Which group of claims to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    ClosedForms,
    ObservableRelations,
    Invariance,
    Conservation,
    Figures,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "closed_forms",
        "observable_relations",
        "invariance",
        "conservation",
        "figures",
        "all",
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ClosedForms => "closed_forms",
            Self::ObservableRelations => "observable_relations",
            Self::Invariance => "invariance",
            Self::Conservation => "conservation",
            Self::Figures => "figures",
            Self::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "closed_forms" => Self::ClosedForms,
            "observable_relations" => Self::ObservableRelations,
            "invariance" => Self::Invariance,
            "conservation" => Self::Conservation,
            "figures" => Self::Figures,
            "all" => Self::All,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown suite '{other}', expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Settings shared by the suites. `None` fields use each claim's default.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub trials: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub params: HamiltonianParams,
    pub theta_steps: usize,
    pub time_steps: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            trials: None,
            seed: crate::sampling::DEFAULT_SEED,
            tol: None,
            params: Figure::default_params(),
            theta_steps: 101,
            time_steps: 101,
        }
    }
}

/// Seed for one sub-claim, so adding claims does not shift the others.
fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs every claim in the suite, in a fixed order.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let static_tol = opts.tol.unwrap_or(STATIC_TOL);
    let dynamic_tol = opts.tol.unwrap_or(DYNAMIC_TOL);
    let mut out = Vec::new();
    let wants = |s: Suite| suite == s || suite == Suite::All;

    if wants(Suite::ClosedForms) {
        let trials = opts.trials.unwrap_or(1000);
        for family in 1..=6u8 {
            let seed = sub_seed(opts.seed, 100 + family as u64);
            out.push(verify_closed_forms(
                family,
                FormulaVariant::Corrected,
                trials,
                static_tol,
                seed,
            )?);
            if family <= 2 {
                out.push(verify_closed_forms(
                    family,
                    FormulaVariant::AsPrinted,
                    trials,
                    static_tol,
                    seed,
                )?);
            }
        }
    }
    if wants(Suite::ObservableRelations) {
        let trials = opts.trials.unwrap_or(1000);
        for family in 1..=6u8 {
            out.push(verify_observable_relations(
                family,
                FormulaVariant::Corrected,
                trials,
                static_tol,
                sub_seed(opts.seed, 200 + family as u64),
            )?);
        }
    }
    if wants(Suite::Invariance) {
        let trials = opts.trials.unwrap_or(100);
        let grid = TimeGrid::linspace(0.0, 10.0, 20)?;
        for (family, class) in claimed_pairings() {
            let tag = 300 + 10 * family as u64 + (class == FormClass::H2) as u64;
            out.push(verify_relation_over_time(
                family,
                class,
                trials,
                &grid,
                dynamic_tol,
                sub_seed(opts.seed, tag),
            )?);
        }
    }
    if wants(Suite::Conservation) {
        let trials = opts.trials.unwrap_or(100);
        let grid = TimeGrid::linspace(0.0, 10.0, 20)?;
        for (tag, kind) in [
            (401, ConservationKind::PsiUnderH1),
            (402, ConservationKind::PhiUnderH2Symmetric),
        ] {
            out.push(verify_conservation(
                kind,
                trials,
                &grid,
                dynamic_tol,
                sub_seed(opts.seed, tag),
            )?);
        }
        out.push(verify_breaking()?);
    }
    if wants(Suite::Figures) {
        out.extend(verify_figures(
            &opts.params,
            opts.theta_steps,
            opts.time_steps,
            dynamic_tol,
        )?);
    }
    Ok(out)
}
