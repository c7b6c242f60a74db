mod cli;
mod config;
mod describe;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use cli::{Cli, Command, Common, Format};
use config::{resolve, CliError, Experiment, ExperimentConfig, OutputSpec};
use experiments::*;

fn execute<E: Experiment>(
    common: &Common,
    file: Option<ExperimentConfig>,
    flags: &impl Serialize,
) -> Result<(), CliError> {
    let file = match (file, &common.config) {
        (Some(f), _) => Some(f),
        (None, Some(path)) => Some(ExperimentConfig::load(path)?),
        (None, None) => None,
    };
    if let Some(f) = &file {
        if f.experiment != E::NAME {
            return Err(CliError::Config(format!(
                "config is for `{}`, not `{}`",
                f.experiment,
                E::NAME
            )));
        }
    }
    let params: E = resolve(file.as_ref().map(|f| &f.params), common.overrides(), flags)?;
    let file_out = file.map(|f| f.output).unwrap_or_default();
    let out = OutputSpec {
        path: common.output.clone().or(file_out.path),
        format: common.format.unwrap_or(file_out.format),
    };
    let params_json = serde_json::to_value(&params).map_err(|e| CliError::Config(e.to_string()))?;

    if common.dump_config {
        let resolved = ExperimentConfig {
            experiment: E::NAME.to_string(),
            params: match params_json {
                serde_json::Value::Object(m) => m,
                _ => unreachable!("parameter structs serialize to objects"),
            },
            output: out,
        };
        let text = serde_json::to_string_pretty(&resolved).map_err(|e| CliError::Io(e.to_string()))?;
        return output::print_stdout(&(text + "\n"));
    }

    let report = params.run()?;
    let written = output::emit(E::NAME, &params_json, &report, out.path.as_deref(), out.format)?;
    for line in &report.summary {
        eprintln!("{line}");
    }
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run_file(path: PathBuf, output: Option<PathBuf>, format: Option<Format>, dump_config: bool) -> Result<(), CliError> {
    let file = ExperimentConfig::load(&path)?;
    let common = Common {
        output,
        format,
        dump_config,
        ..Default::default()
    };
    let name = file.experiment.clone();
    let f = Some(file);
    match name.as_str() {
        JcParams::NAME => execute::<JcParams>(&common, f, &()),
        TavisParams::NAME => execute::<TavisParams>(&common, f, &()),
        DickeParams::NAME => execute::<DickeParams>(&common, f, &()),
        BsParams::NAME => execute::<BsParams>(&common, f, &()),
        NoiseParams::NAME => execute::<NoiseParams>(&common, f, &()),
        InvariantParams::NAME => execute::<InvariantParams>(&common, f, &()),
        LurParams::NAME => execute::<LurParams>(&common, f, &()),
        PptParams::NAME => execute::<PptParams>(&common, f, &()),
        other => Err(CliError::Config(format!(
            "unknown experiment `{other}`; see `entcrit list`"
        ))),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::JcThermal { common, args } => execute::<JcParams>(&common, None, &args),
        Command::Tavis { common, args } => execute::<TavisParams>(&common, None, &args),
        Command::Dicke { common, args } => execute::<DickeParams>(&common, None, &args),
        Command::Beamsplitters { common, args } => execute::<BsParams>(&common, None, &args),
        Command::NoiseThreshold { common, args } => execute::<NoiseParams>(&common, None, &args),
        Command::TwoModeInvariant { common, args } => execute::<InvariantParams>(&common, None, &args),
        Command::Lur { common, args } => execute::<LurParams>(&common, None, &args),
        Command::PptCrosscheck { common, args } => execute::<PptParams>(&common, None, &args),
        Command::Run {
            config,
            output,
            format,
            dump_config,
        } => run_file(config, output, format, dump_config),
        Command::List => {
            let text: String = describe::EXPERIMENTS
                .iter()
                .map(|e| format!("{:<20} {}\n", e.name, e.summary))
                .collect();
            output::print_stdout(&text)
        }
        Command::Describe { experiment } => match describe::find(&experiment) {
            Some(e) => output::print_stdout(&format!("{}\n\n{}\n", e.summary, e.details)),
            None => Err(CliError::Config(format!(
                "unknown experiment `{experiment}`; see `entcrit list`"
            ))),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
