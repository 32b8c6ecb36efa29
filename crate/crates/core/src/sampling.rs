//! Seeded random draws for the verification sweeps.
//!
//! All randomness goes through [`ChaCha8Rng`] seeded from a `u64`, so a
//! report's seed reproduces it exactly on any platform.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{Matrix4, C64};
use crate::spin::{FormClass, HamiltonianForm, HamiltonianParams, NamedHamiltonian};
use crate::states::{FamilyParams, FamilyWeights};

pub type SeededRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_070_101;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Three weights uniform on the probability simplex.
fn simplex3(rng: &mut impl Rng) -> [f64; 3] {
    let (x, y): (f64, f64) = (rng.gen(), rng.gen());
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    [lo, hi - lo, 1.0 - hi]
}

/// A valid member of `family` (1..=6): weights uniform on their simplex,
/// `v` uniform up to the positivity bound, `α` uniform on `[0, 2π)`.
pub fn random_family_params(rng: &mut impl Rng, family: u8) -> FamilyParams {
    let weights = match family {
        1 => FamilyWeights::One { a: rng.gen() },
        2 => FamilyWeights::Two { b: rng.gen() },
        3 => {
            let [_, c, d] = simplex3(rng);
            FamilyWeights::Three { c, d }
        }
        4 => {
            let [a, b, _] = simplex3(rng);
            FamilyWeights::Four { a, b }
        }
        5 => {
            let [_, c, d] = simplex3(rng);
            FamilyWeights::Five { c, d }
        }
        6 => {
            let [_, b, d] = simplex3(rng);
            FamilyWeights::Six { b, d }
        }
        other => panic!("family {other} out of range"),
    };
    let pops = weights.populations();
    let (p, q) = crate::states::coherence_slot(family);
    let v = (pops[p] * pops[q]).max(0.0).sqrt() * rng.gen::<f64>();
    let alpha = rng.gen::<f64>() * TAU;
    FamilyParams::new(weights, v, alpha).expect("sampled parameters are valid by construction")
}

/// Coefficients of the general form `class` drawn uniformly from `[-1, 1]`.
pub fn random_form(rng: &mut impl Rng, class: FormClass) -> NamedHamiltonian {
    let mut u = || rng.gen_range(-1.0..=1.0);
    let params = match class {
        FormClass::H1 => HamiltonianParams {
            h30: Some(u()),
            h03: Some(u()),
            h33: Some(u()),
            f1: Some(u()),
            g1: Some(u()),
            ..Default::default()
        },
        FormClass::H2 => HamiltonianParams {
            h30: Some(u()),
            h03: Some(u()),
            h33: Some(u()),
            f2: Some(u()),
            g2: Some(u()),
            ..Default::default()
        },
    };
    let form = match class {
        FormClass::H1 => HamiltonianForm::H1,
        FormClass::H2 => HamiltonianForm::H2,
    };
    NamedHamiltonian::new(form, params)
}

/// Hermitian matrix with entries uniform in `[-1, 1]` (real and imaginary
/// parts independently, diagonal real).
pub fn random_hermitian(rng: &mut impl Rng) -> Matrix4 {
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        m[(i, i)] = C64::new(rng.gen_range(-1.0..=1.0), 0.0);
        for j in (i + 1)..4 {
            let z = C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}
