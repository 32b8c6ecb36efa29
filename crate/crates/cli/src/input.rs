//! JSON input files: state specifications and run configurations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use twoqubit::evolution::InitialState;
use twoqubit::linalg::{Matrix4, C64};
use twoqubit::spin::HamiltonianParams;
use twoqubit::states::{
    validate_density_matrix, FamilyParams, FamilyWeights, MixedInitialState, PureInitialState,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input or configuration.
    #[error("{0}")]
    Config(String),
    /// A file could not be read or written.
    #[error("{0}")]
    Io(String),
    /// A check ran and did not pass.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Failed(_) => 1,
            Self::Config(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// 1-based line of the first occurrence of `"key"`, or 1.
fn line_of(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines()
        .position(|l| l.contains(&needle))
        .map_or(1, |i| i + 1)
}

fn parse_json<'a, T: Deserialize<'a>>(path: &Path, text: &'a str) -> CliResult<T> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), e.line().max(1))))
}

fn at_key(path: &Path, text: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}:{}: {msg}", path.display(), line_of(text, key)))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum StateSpec {
    Family(FamilySpec),
    Pure(PureSpec),
    Mixed(MixedSpec),
    Raw(Vec<[f64; 2]>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilySpec {
    family: u8,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    d: Option<f64>,
    v: f64,
    #[serde(default)]
    alpha: f64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PureKindSpec {
    Psi,
    PhiPlus,
    PhiMinus,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PureSpec {
    kind: PureKindSpec,
    theta: f64,
    alpha: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixedSpec {
    kind: u8,
    theta: f64,
}

impl FamilySpec {
    fn weights(&self, path: &Path, text: &str) -> CliResult<FamilyWeights> {
        let fields = [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)];
        let needed: &[&str] = match self.family {
            1 => &["a"],
            2 => &["b"],
            3 | 5 => &["c", "d"],
            4 => &["a", "b"],
            6 => &["b", "d"],
            other => {
                return Err(at_key(
                    path,
                    text,
                    "family",
                    format!("family {other} not in 1..=6"),
                ))
            }
        };
        for (name, value) in fields {
            match (needed.contains(&name), value) {
                (true, None) => {
                    return Err(at_key(
                        path,
                        text,
                        "family",
                        format!("family {} needs '{name}'", self.family),
                    ))
                }
                (false, Some(_)) => {
                    return Err(at_key(
                        path,
                        text,
                        name,
                        format!("'{name}' is not a parameter of family {}", self.family),
                    ))
                }
                _ => {}
            }
        }
        let get = |x: Option<f64>| x.unwrap_or_default();
        Ok(match self.family {
            1 => FamilyWeights::One { a: get(self.a) },
            2 => FamilyWeights::Two { b: get(self.b) },
            3 => FamilyWeights::Three {
                c: get(self.c),
                d: get(self.d),
            },
            4 => FamilyWeights::Four {
                a: get(self.a),
                b: get(self.b),
            },
            5 => FamilyWeights::Five {
                c: get(self.c),
                d: get(self.d),
            },
            _ => FamilyWeights::Six {
                b: get(self.b),
                d: get(self.d),
            },
        })
    }
}

/// Reads a state specification file.
pub fn load_state(path: &Path) -> CliResult<InitialState> {
    let text = read_text(path)?;
    let spec: StateSpec = parse_json(path, &text)?;
    match spec {
        StateSpec::Family(f) => {
            let weights = f.weights(path, &text)?;
            let p = FamilyParams::new(weights, f.v, f.alpha)
                .map_err(|e| at_key(path, &text, "v", e))?;
            Ok(InitialState::Family(p))
        }
        StateSpec::Pure(p) => {
            let state = match (p.kind, p.alpha) {
                (PureKindSpec::Psi, alpha) => PureInitialState::psi(p.theta, alpha.unwrap_or(0.0)),
                (_, Some(_)) => {
                    return Err(at_key(
                        path,
                        &text,
                        "alpha",
                        "'alpha' applies to kind \"psi\" only",
                    ))
                }
                (PureKindSpec::PhiPlus, None) => PureInitialState::phi_plus(p.theta),
                (PureKindSpec::PhiMinus, None) => PureInitialState::phi_minus(p.theta),
            };
            twoqubit::states::pure_initial(&state).map_err(|e| at_key(path, &text, "theta", e))?;
            Ok(InitialState::Pure(state))
        }
        StateSpec::Mixed(m) => MixedInitialState::new(m.kind, m.theta)
            .map(InitialState::Mixed)
            .map_err(|e| at_key(path, &text, "kind", e)),
        StateSpec::Raw(entries) => {
            if entries.len() != 16 {
                return Err(at_key(
                    path,
                    &text,
                    "raw",
                    format!("expected 16 [re, im] entries, got {}", entries.len()),
                ));
            }
            let m = Matrix4::from_fn(|i, j| {
                let [re, im] = entries[4 * i + j];
                C64::new(re, im)
            });
            validate_density_matrix(&m)
                .map(InitialState::Raw)
                .map_err(|e| at_key(path, &text, "raw", e))
        }
    }
}

/// Settings read from `--config`. Command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub state: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub figure: Option<u8>,
    pub member: Option<u8>,
    pub suite: Option<String>,
    pub theta_steps: Option<usize>,
    pub time_steps: Option<usize>,
    pub trials: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        let cfg: RunConfig = parse_json(path, &text)?;
        let err = |key: &str, msg: String| at_key(path, &text, key, msg);
        for (key, steps) in [
            ("theta_steps", cfg.theta_steps),
            ("time_steps", cfg.time_steps),
        ] {
            if let Some(n) = steps {
                check_steps(n).map_err(|e| err(key, e.to_string()))?;
            }
        }
        if let Some(tol) = cfg.tol {
            check_tol(tol).map_err(|e| err("tol", e.to_string()))?;
        }
        let mut scratch = HamiltonianParams::default();
        for (key, &value) in &cfg.params {
            set_param(&mut scratch, key, value).map_err(|e| err(key, e.to_string()))?;
        }
        Ok(cfg)
    }
}

pub fn check_steps(n: usize) -> CliResult<usize> {
    if n < 2 {
        return Err(CliError::Config(format!(
            "grid size must be at least 2, got {n}"
        )));
    }
    Ok(n)
}

pub fn check_tol(tol: f64) -> CliResult<f64> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Config(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    Ok(tol)
}

pub fn set_param(params: &mut HamiltonianParams, key: &str, value: f64) -> CliResult<()> {
    if !value.is_finite() {
        return Err(CliError::Config(format!("parameter {key} must be finite")));
    }
    let slot = params.slot_mut(key).ok_or_else(|| {
        CliError::Config(format!(
            "unknown parameter '{key}' (expected one of omega1, omega2, f1, g1, f2, g2, h1, h2, h30, h03, h33)"
        ))
    })?;
    *slot = Some(value);
    Ok(())
}

/// Parses `key=value`.
pub fn parse_assignment(s: &str) -> CliResult<(String, f64)> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected key=value, got '{s}'")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("'{value}' is not a number in '{s}'")))?;
    Ok((key.trim().to_string(), value))
}
