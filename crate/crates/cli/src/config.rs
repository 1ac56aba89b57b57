use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use num_traits::One;
use serde::Deserialize;

use tropical_bundle::exact::{parse_rat, Rat};
use tropical_bundle::gluing::Constants;

/// Optional config file; command-line flags override any field.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub constants: Option<String>,
    pub parametric: Option<bool>,
    pub no_twist: Option<bool>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub hbar: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub trials: Option<usize>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub constants: Constants,
    pub parametric: bool,
    /// `b2` was derived from the other five constants at load time.
    pub b2_autosolved: bool,
    pub no_twist: bool,
    pub seed: u64,
    pub grid: usize,
    pub hbars: Vec<f64>,
    pub tol: f64,
    pub trials: usize,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub multisection: Option<PathBuf>,
}

impl RunConfig {
    /// Deterministic echo of the configuration for reports.
    pub fn echo(&self) -> serde_json::Value {
        let constants = match &self.constants {
            Constants::Parametric => serde_json::json!("parametric"),
            Constants::Rational(v) => serde_json::json!(v
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()),
        };
        serde_json::json!({
            "constants": constants,
            "parametric": self.parametric,
            "b2_autosolved": self.b2_autosolved,
            "no_twist": self.no_twist,
            "seed": self.seed,
            "grid": self.grid,
            "hbar": self.hbars,
            "tol": self.tol,
            "trials": self.trials,
        })
    }
}

/// Parse `a0=-1,b0=1,...` (rationals allowed, `b2` optional).
pub fn parse_constants(spec: &str) -> Result<(Constants, bool)> {
    let mut values: [Option<Rat>; 6] = Default::default();
    const NAMES: [&str; 6] = ["a0", "b0", "a1", "b1", "a2", "b2"];
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got {part:?}"))?;
        let idx = NAMES
            .iter()
            .position(|n| *n == key.trim())
            .ok_or_else(|| anyhow!("unknown constant {key:?}"))?;
        let rat = parse_rat(value).map_err(|e| anyhow!("{e}"))?;
        if values[idx].replace(rat).is_some() {
            bail!("constant {key} given twice");
        }
    }
    for (name, v) in NAMES.iter().zip(&values).take(5) {
        if v.is_none() {
            bail!("missing constant {name}");
        }
    }
    let five = [
        values[0].clone().unwrap(),
        values[1].clone().unwrap(),
        values[2].clone().unwrap(),
        values[3].clone().unwrap(),
        values[4].clone().unwrap(),
    ];
    match values[5].clone() {
        Some(b2) => {
            let all = [
                five[0].clone(),
                five[1].clone(),
                five[2].clone(),
                five[3].clone(),
                five[4].clone(),
                b2,
            ];
            let prod: Rat = all.iter().cloned().fold(Rat::one(), |a, b| a * b);
            if prod != -Rat::one() {
                bail!(
                    "constants must satisfy a0*b0*a1*b1*a2*b2 = -1 (got {prod}); \
                     omit b2 to solve for it automatically"
                );
            }
            Ok((Constants::Rational(all), false))
        }
        None => {
            let c = Constants::from_free_values(five)
                .map_err(|e| anyhow!("cannot solve for b2: {e}"))?;
            Ok((c, true))
        }
    }
}

pub fn load_file(path: &PathBuf) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
}
