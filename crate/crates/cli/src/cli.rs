use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entcrit::models::jc::AtomInit;
use entcrit::models::FieldSpec;
use serde::{Deserialize, Serialize};

use crate::config::parse_field;

#[derive(Debug, Parser)]
#[command(
    name = "entcrit",
    version,
    about = "Entanglement-criteria experiments on truncated light–matter models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jaynes–Cummings witness matrix with a thermal field.
    JcThermal {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: JcArgs,
    },
    /// Tavis–Cummings margins, closed form against evolution.
    Tavis {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: TavisArgs,
    },
    /// Dicke model: atomic-group moments and tests.
    Dicke {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: DickeArgs,
    },
    /// Two beam splitters in cascade.
    Beamsplitters {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: BsArgs,
    },
    /// Mixing thresholds for noisy two-party families.
    NoiseThreshold {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: NoiseArgs,
    },
    /// Witness matrices under Gaussian transformations.
    TwoModeInvariant {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: InvariantArgs,
    },
    /// Local uncertainty relations.
    Lur {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: LurArgs,
    },
    /// Monte Carlo check of the base tests against the partial transpose.
    PptCrosscheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: PptArgs,
    },
    /// Run the experiment named in a config file.
    Run {
        /// JSON config file.
        config: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        dump_config: bool,
    },
    /// List the experiments.
    List,
    /// Describe one experiment.
    Describe { experiment: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Default)]
pub struct Common {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted). CSV output gets a `<file>.json` sidecar.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Print the resolved config and exit.
    #[arg(long)]
    pub dump_config: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub fock_dim: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

impl Common {
    /// The shared numeric flags as config keys.
    pub fn overrides(&self) -> serde_json::Map<String, serde_json::Value> {
        let mut out = serde_json::Map::new();
        if let Some(s) = self.seed {
            out.insert("seed".into(), s.into());
        }
        if let Some(d) = self.fock_dim {
            out.insert("fock_dim".into(), d.into());
        }
        if let Some(t) = self.tolerance {
            out.insert("tolerance".into(), t.into());
        }
        out
    }
}

#[derive(Debug, Clone, Args, Serialize, Default)]
pub struct JcArgs {
    /// Mean thermal photon numbers.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nbar: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kt_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[arg(long, value_parser = parse_atom)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom: Option<AtomInit>,
}

fn parse_atom(s: &str) -> Result<AtomInit, String> {
    match s {
        "excited" | "e" => Ok(AtomInit::Excited),
        "ground" | "g" => Ok(AtomInit::Ground),
        _ => Err(format!("unknown atom state `{s}` (excited | ground)")),
    }
}

#[derive(Debug, Clone, Args, Serialize, Default)]
pub struct TavisArgs {
    /// Total excitation number.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Number of Ωt points.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_t_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Default)]
pub struct DickeArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_atoms: Option<usize>,
    /// Size of the first atomic group.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Input field: vacuum, fock:N, coherent:RE,IM, squeezed:R[,PHI], epsilon:E, custom:RE,IM;RE,IM;...
    #[arg(long, value_parser = parse_field)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_t_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Default)]
pub struct BsArgs {
    /// Transmission of the first splitter; a list gives one row each.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    /// Input field, same syntax as `dicke --field`.
    #[arg(long, value_parser = parse_field)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<FieldSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `s|ψ⟩⟨ψ| + (1−s)I/4` with `|ψ⟩ = c₁|00⟩ + c₂|11⟩`.
    #[default]
    Bell,
    /// Four-dimensional correlated subspace with random `|v₁⟩, |v₂⟩`.
    Subspace,
    /// `s|ψ₀₁⟩⟨ψ₀₁| + (1−s)` noise on two modes, bilinear-form criterion.
    Psi01,
}

#[derive(Debug, Clone, Args, Serialize, Default)]
pub struct NoiseArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    /// Real amplitude `c₁` of the two-term state (`c₂ = √(1 − c₁²)`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    /// Number of `s` points in the table.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeChoice {
    AtomField,
    SqueezedPair,
    #[default]
    Both,
}

#[derive(Debug, Clone, Args, Serialize, Default)]
pub struct InvariantArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeChoice>,
    /// Squeezing of the squeezed-pair probe state.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LurInstance {
    #[default]
    TwoModeSqueezed,
    AtomField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    #[default]
    Correlating,
    Literal,
}

#[derive(Debug, Clone, Args, Serialize, Default)]
pub struct LurArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<LurInstance>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    /// Relative phases for the atom–field instance.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phis: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args, Serialize, Default)]
pub struct PptArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}
