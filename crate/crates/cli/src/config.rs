use std::path::{Path, PathBuf};

use entcrit::linalg::c;
use entcrit::models::FieldSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::cli::Format;
use crate::output::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<entcrit::Error> for CliError {
    fn from(e: entcrit::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// On-disk form of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// One experiment's fully resolved parameters.
pub trait Experiment: Serialize + DeserializeOwned + Default {
    const NAME: &'static str;

    /// Range checks beyond what the types enforce.
    fn validate(&self) -> Result<(), String>;

    fn run(&self) -> Result<Report, CliError>;
}

/// Defaults, then the config file's params, then the flags.
pub fn resolve<E: Experiment>(
    file: Option<&Map<String, Value>>,
    shared: Map<String, Value>,
    flags: &impl Serialize,
) -> Result<E, CliError> {
    let defaults = match serde_json::to_value(E::default()) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("parameter structs serialize to objects"),
    };
    let mut merged = defaults.clone();
    if let Some(file) = file {
        merged.extend(file.clone());
    }
    for (key, value) in shared {
        if !defaults.contains_key(&key) {
            return Err(CliError::Config(format!(
                "{} does not take --{}",
                E::NAME,
                key.replace('_', "-")
            )));
        }
        merged.insert(key, value);
    }
    if let Value::Object(flags) = serde_json::to_value(flags).map_err(|e| CliError::Config(e.to_string()))? {
        merged.extend(flags);
    }
    let params: E = serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(e.to_string()))?;
    params.validate().map_err(CliError::Config)?;
    Ok(params)
}

fn numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect()
}

/// `vacuum`, `fock:N`, `coherent:RE,IM`, `squeezed:R[,PHI]`, `epsilon:E`,
/// `custom:RE,IM;RE,IM;...`
pub fn parse_field(s: &str) -> Result<FieldSpec, String> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "vacuum" => Ok(FieldSpec::Vacuum),
        "fock" => rest
            .trim()
            .parse()
            .map(|n| FieldSpec::Fock { n })
            .map_err(|e| format!("fock:{rest}: {e}")),
        "coherent" => match numbers(rest)?.as_slice() {
            [re] => Ok(FieldSpec::coherent(c(*re, 0.0))),
            [re, im] => Ok(FieldSpec::coherent(c(*re, *im))),
            _ => Err("coherent takes RE[,IM]".into()),
        },
        "squeezed" => match numbers(rest)?.as_slice() {
            [r] => Ok(FieldSpec::Squeezed { r: *r, phi: 0.0 }),
            [r, phi] => Ok(FieldSpec::Squeezed { r: *r, phi: *phi }),
            _ => Err("squeezed takes R[,PHI]".into()),
        },
        "epsilon" => match numbers(rest)?.as_slice() {
            [e] => FieldSpec::epsilon_state(*e).map_err(|e| e.to_string()),
            _ => Err("epsilon takes one number".into()),
        },
        "custom" => {
            let amps = rest
                .split(';')
                .map(|pair| match numbers(pair)?.as_slice() {
                    [re, im] => Ok([*re, *im]),
                    [re] => Ok([*re, 0.0]),
                    _ => Err(format!("custom amplitude `{pair}` is not RE,IM")),
                })
                .collect::<Result<Vec<_>, String>>()?;
            Ok(FieldSpec::Custom { amplitudes: amps })
        }
        _ => Err(format!(
            "unknown field `{kind}` (vacuum | fock | coherent | squeezed | epsilon | custom)"
        )),
    }
}
