//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::FRAC_PI_4;
use std::process::Command;
use std::time::{Duration, Instant};

use twoqubit::entanglement::FormulaVariant;
use twoqubit::evolution::{evolve, TimeGrid};
use twoqubit::figures::calibrate_time_scale;
use twoqubit::figures::{check_figure, entanglement_generation, scaled_time_grid, Figure};
use twoqubit::linalg::{exp_unitary, hermitian_eigen, Sign};
use twoqubit::report::discrepancy_report;
use twoqubit::sampling::{random_family_params, random_hermitian, seeded, DEFAULT_SEED};
use twoqubit::spin::Observable;
use twoqubit::states::{build_family, validate_density_matrix};
use twoqubit::verify::{
    claimed_pairings, verify_breaking, verify_closed_forms, verify_conservation,
    verify_observable_relations, verify_relation_over_time, ConservationKind,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{} [{:.2} s]", out.detail, elapsed.as_secs_f64());
    if let Some(limit) = budget {
        if elapsed > limit {
            out.pass = false;
            out.detail = format!("{} exceeds {} s budget", out.detail, limit.as_secs());
        }
    }
    out
}

fn closed_forms() -> Outcome {
    let mut worst = 0.0_f64;
    let mut worst_printed = 0.0_f64;
    for family in 1..=6u8 {
        let seed = DEFAULT_SEED + family as u64;
        let r = verify_closed_forms(family, FormulaVariant::Corrected, 1000, 1e-12, seed).unwrap();
        worst = worst.max(r.max_abs_error);
        if family <= 2 {
            let r =
                verify_closed_forms(family, FormulaVariant::AsPrinted, 1000, 1e-12, seed).unwrap();
            worst_printed = worst_printed.max(r.max_abs_error);
        }
    }
    outcome(
        worst <= 1e-12 && worst_printed <= 1e-12,
        format!(
            "6000 draws, corrected max {worst:.2e}, printed (families 1-2) max {worst_printed:.2e}"
        ),
    )
}

fn observable_relations() -> Outcome {
    let worst = (1..=6u8)
        .map(|family| {
            verify_observable_relations(
                family,
                FormulaVariant::Corrected,
                1000,
                1e-12,
                DEFAULT_SEED + 10 + family as u64,
            )
            .unwrap()
            .max_abs_error
        })
        .fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("6000 draws, max {worst:.2e}"))
}

fn form_invariance() -> Outcome {
    let grid = TimeGrid::linspace(0.0, 10.0, 20).unwrap();
    let pairings = claimed_pairings();
    let mut worst = 0.0_f64;
    let mut failing = Vec::new();
    for (i, &(family, class)) in pairings.iter().enumerate() {
        let r = verify_relation_over_time(
            family,
            class,
            100,
            &grid,
            1e-10,
            DEFAULT_SEED + 20 + i as u64,
        )
        .unwrap();
        worst = worst.max(r.max_abs_error);
        if !r.pass {
            failing.push(r.claim);
        }
    }
    outcome(
        failing.is_empty() && pairings.len() == 8,
        format!(
            "{} pairings x 100 trials x 20 times, max {worst:.2e} {failing:?}",
            pairings.len()
        ),
    )
}

fn conservation() -> Outcome {
    let grid = TimeGrid::linspace(0.0, 10.0, 20).unwrap();
    let psi = verify_conservation(
        ConservationKind::PsiUnderH1,
        100,
        &grid,
        1e-10,
        DEFAULT_SEED + 30,
    )
    .unwrap();
    let phi = verify_conservation(
        ConservationKind::PhiUnderH2Symmetric,
        100,
        &grid,
        1e-10,
        DEFAULT_SEED + 31,
    )
    .unwrap();
    let breaking = verify_breaking().unwrap();
    outcome(
        psi.pass && phi.pass && breaking.pass,
        format!(
            "psi/H1 {:.2e}, phi/H2 sym {:.2e}, {}",
            psi.max_abs_error, phi.max_abs_error, breaking.claim
        ),
    )
}

fn figure_surfaces() -> Outcome {
    let params = Figure::default_params();
    let mut pass = true;
    let mut parts = Vec::new();
    for fig in Figure::all() {
        let c = check_figure(&fig, &params, 101, 101).unwrap();
        let gamma_ok = if fig.id() <= 4 {
            c.gamma == 1.0
        } else {
            c.gamma > 0.0
        };
        pass &= c.caption_max_error <= 1e-6
            && c.formula_max_error <= 1e-10
            && c.unclassified == 0
            && gamma_ok;
        parts.push(format!(
            "{}{}: gamma {} caption {:.1e} formula {:.1e}",
            fig.id(),
            fig.member().map(|m| format!("/{m}")).unwrap_or_default(),
            c.gamma,
            c.caption_max_error,
            c.formula_max_error
        ));
    }
    outcome(pass, parts.join("; "))
}

fn generation() -> Outcome {
    let params = Figure::default_params();
    let mut pass = true;
    let mut parts = Vec::new();
    for fig in Figure::all().into_iter().filter(|f| f.id() >= 5) {
        let kappa = calibrate_time_scale(&fig, &params).unwrap().kappa;
        let times = scaled_time_grid(kappa, 101).unwrap();
        let (n0, max_n) = entanglement_generation(&fig, &params, FRAC_PI_4, &times).unwrap();
        pass &= n0 <= 1e-12 && max_n > 0.05;
        parts.push(format!(
            "{}/{}: N(0) {n0:.1e} max {max_n:.4}",
            fig.id(),
            fig.member().unwrap()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn kernel() -> Outcome {
    let mut rng = seeded(DEFAULT_SEED + 40);
    let mut residual = 0.0_f64;
    let mut unitarity = 0.0_f64;
    let mut evolution = 0.0_f64;
    for k in 0..10_000 {
        let h = random_hermitian(&mut rng);
        residual = residual.max(hermitian_eigen(&h).unwrap().residual(&h));
        if k % 10 == 0 {
            let t = 10.0 * (k as f64 / 10_000.0) - 5.0;
            let u = exp_unitary(&h, t, Sign::Minus).unwrap();
            unitarity = unitarity
                .max((u * u.adjoint()).max_abs_diff(&twoqubit::linalg::Matrix4::identity()));
            let family = (k / 10 % 6 + 1) as u8;
            let rho = build_family(&random_family_params(&mut rng, family));
            let out = evolve(&rho, &Observable::new(h, "H").unwrap(), t).unwrap();
            let m = out.matrix();
            let before = hermitian_eigen(rho.matrix()).unwrap().eigenvalues;
            let after = hermitian_eigen(m).unwrap().eigenvalues;
            let spectrum = before
                .iter()
                .zip(&after)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            evolution = evolution
                .max((m.trace().re - 1.0).abs())
                .max(m.hermiticity_defect())
                .max(spectrum);
            validate_density_matrix(m).unwrap();
        }
    }
    outcome(
        residual <= 1e-12 && unitarity <= 1e-12 && evolution <= 1e-12,
        format!("eigen residual {residual:.2e}, unitarity {unitarity:.2e}, trace/hermiticity/spectrum {evolution:.2e}"),
    )
}

fn discrepancies() -> Outcome {
    let a = discrepancy_report(DEFAULT_SEED, 100).unwrap();
    let b = discrepancy_report(DEFAULT_SEED, 100).unwrap();
    let flagged: Vec<_> = a.flagged().iter().map(|c| c.id()).collect();
    let stable = a.summary == b.summary;
    outcome(
        a.matches_documented() && stable && flagged.len() == 5,
        format!("flagged {flagged:?}, stable {stable}"),
    )
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_twoqubit");
    let dir = tempfile::tempdir().unwrap();
    let run_surface = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(bin)
            .args(["surface", "--figure", "1", "--out"])
            .arg(&path)
            .output()
            .unwrap()
            .status;
        (status.code(), std::fs::read(&path).unwrap_or_default())
    };
    let (c1, a) = run_surface("a.csv");
    let (c2, b) = run_surface("b.csv");
    let identical = c1 == Some(0) && c2 == Some(0) && !a.is_empty() && a == b;
    let verify = Command::new(bin)
        .args(["verify", "--suite", "all"])
        .output()
        .unwrap()
        .status
        .code();
    outcome(
        identical && verify == Some(0),
        format!(
            "surface csv identical {identical} ({} bytes), verify exit {verify:?}",
            a.len()
        ),
    )
}

/// Name, runtime budget in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle vs closed forms", Some(5), closed_forms),
        ("oracle vs observable relations", None, observable_relations),
        ("form invariance under evolution", Some(30), form_invariance),
        ("conservation and its breaking", None, conservation),
        ("figure surfaces", Some(60), figure_surfaces),
        (
            "entanglement generation from separable mixtures",
            None,
            generation,
        ),
        ("kernel properties", None, kernel),
        ("discrepancy report regression", None, discrepancies),
        ("cli determinism", None, cli_determinism),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let out = timed(budget.map(Duration::from_secs), check);
        if !out.pass {
            failures += 1;
        }
        println!(
            "{} criterion {}: {name}: {}",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
