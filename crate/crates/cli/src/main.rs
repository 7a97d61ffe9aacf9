//! `deforma`: command-line front end over JSON model files.

mod emit;
mod run;

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deforma::model::Model;
use deforma::{fixtures, Error};
use serde::Serialize;

use crate::emit::{Report, Status};

#[derive(Debug, Parser)]
#[command(name = "deforma", version, about = "Exact deformation-theory checks on dgla models")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Model file, or the name of a bundled fixture.
    #[arg(long, global = true, value_name = "FILE")]
    model: Option<String>,

    #[command(flatten)]
    options: Options,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Options shared by several commands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Options {
    /// Arity bound for convolution dglas.
    #[arg(long, global = true, value_name = "N")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,

    /// Bound on the polynomial degree in t.
    #[arg(long, global = true, value_name = "D")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tdeg: Option<usize>,

    /// Truncated polynomial algebra with k generators, modulo the N-th power of the ideal.
    #[arg(long, global = true, value_name = "k,N", value_parser = parse_artin)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artin: Option<(usize, usize)>,
}

fn parse_artin(s: &str) -> Result<(usize, usize), String> {
    let (k, n) = s.split_once(',').ok_or("expected k,N")?;
    let k = k.trim().parse().map_err(|e| format!("k: {e}"))?;
    let n = n.trim().parse().map_err(|e| format!("N: {e}"))?;
    Ok((k, n))
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Check the axioms of every structure in the model.
    Validate {
        #[arg(long)]
        #[serde(skip_serializing_if = "Option::is_none")]
        dgla: Option<String>,
    },
    /// Cohomology ranks and representatives.
    Cohomology {
        #[arg(long, conflicts_with = "complex")]
        #[serde(skip_serializing_if = "Option::is_none")]
        dgla: Option<String>,
        #[arg(long)]
        #[serde(skip_serializing_if = "Option::is_none")]
        complex: Option<String>,
    },
    /// Maurer-Cartan residue, order-by-order extension, obstruction.
    Mc(McArgs),
    /// Gauge action, equivalence, stabilizers, gauge paths, π1 at zero.
    Gauge(GaugeArgs),
    /// L∞ residual of the strict embedding of a morphism.
    LinfCheck {
        #[arg(long)]
        #[serde(skip_serializing_if = "Option::is_none")]
        morphism: Option<String>,
    },
    /// Cartan homotopy conditions, plus the contraction identities when the model has them.
    CartanCheck {
        #[serde(skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// Gauge transport of the zero morphism along a Cartan homotopy.
    Transport {
        #[serde(skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// Homotopy fiber of a sub-dgla inclusion.
    Holim(HolimArgs),
    /// Period differential and images of obstructions.
    Period(PeriodArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dgla: Option<String>,
    /// Named element; zero when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[arg(long, group = "mc_action")]
    pub residue: bool,
    #[arg(long, group = "mc_action")]
    pub extend: bool,
    #[arg(long, group = "mc_action")]
    pub obstruction: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GaugeArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dgla: Option<String>,
    /// Maurer-Cartan element acted on; zero when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    /// Degree-0 gauge parameter.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    /// Second Maurer-Cartan element, for `--equiv`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[arg(long, group = "gauge_action")]
    pub act: bool,
    #[arg(long, group = "gauge_action")]
    pub equiv: bool,
    #[arg(long, group = "gauge_action")]
    pub stabilizer: bool,
    #[arg(long, group = "gauge_action")]
    pub path: bool,
    #[arg(long, group = "gauge_action")]
    pub pi1: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HolimArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dgla: Option<String>,
    /// Named sub-dgla.
    #[arg(long, conflicts_with = "filtration")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub: Option<String>,
    /// Use the filtration-preserving operators inside the End dgla of its cdga.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filtration: Option<String>,
    /// Section spanning a d-stable complement, for `--witness`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub section: Option<String>,
    /// Cartan homotopy, for `--map`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cartan: Option<String>,
    #[arg(long, group = "holim_action")]
    pub validate: bool,
    #[arg(long, group = "holim_action")]
    pub cohomology: bool,
    #[arg(long, group = "holim_action")]
    pub witness: bool,
    #[arg(long, group = "holim_action")]
    pub map: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PeriodArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cartan: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filtration: Option<String>,
    /// First-order element to extend, for `--obstruction-image`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[arg(long, group = "period_action")]
    pub differential: bool,
    #[arg(long, group = "period_action")]
    pub obstruction_image: bool,
}

/// Failures that stop a command before it produces a result.
#[derive(Debug)]
pub enum Failure {
    /// Missing or unknown named input.
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn status(&self) -> (Status, u8) {
        match self {
            Failure::Input(_) => (Status::Invalid, 2),
            Failure::Core(Error::Parse(_) | Error::Schema { .. } | Error::Dangling { .. }) => (Status::Invalid, 2),
            Failure::Core(Error::Unsupported(_)) => (Status::Inconclusive, 3),
            Failure::Core(_) => (Status::Invalid, 1),
        }
    }

    fn payload(&self) -> serde_json::Value {
        let (kind, message, path) = match self {
            Failure::Input(m) => ("input", m.clone(), None),
            Failure::Core(e) => {
                let kind = match e {
                    Error::Parse(_) => "parse",
                    Error::Schema { .. } => "schema",
                    Error::Dangling { .. } => "dangling-reference",
                    Error::Unsupported(_) => "unsupported",
                    _ => "check",
                };
                let path = match e {
                    Error::Schema { path, .. } | Error::Dangling { path, .. } => Some(path.clone()),
                    _ => None,
                };
                (kind, e.to_string(), path)
            }
        };
        let mut err = serde_json::json!({ "kind": kind, "message": message });
        if let Some(p) = path {
            err["path"] = p.into();
        }
        serde_json::json!({ "error": err })
    }
}

fn load_model(arg: Option<&str>) -> Result<Model, Failure> {
    let arg = arg.ok_or_else(|| Failure::Input("missing --model".into()))?;
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(Model::load(path)?);
    }
    if fixtures::names().any(|n| n == arg) || fixtures::mutation_names().any(|n| n == arg) {
        return Ok(fixtures::load(arg)?);
    }
    Err(Failure::Input(format!("{arg}: no such file or fixture")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = emit::echo(&cli.command, &cli.options);
    let (model_name, outcome) = match load_model(cli.model.as_deref()) {
        Ok(model) => (Some(model.name().to_string()), run::run(&model, &cli.command, &cli.options)),
        Err(f) => (None, Err(f)),
    };
    let (report, code) = match outcome {
        Ok(o) => {
            let code = o.status.exit_code();
            (Report { command: echo, model: model_name, status: o.status, payload: o.payload }, code)
        }
        Err(f) => {
            let (status, code) = f.status();
            (Report { command: echo, model: model_name, status, payload: f.payload() }, code)
        }
    };
    let out = match cli.format {
        Format::Json => emit::json(&report),
        Format::Text => emit::text(&report),
    };
    print!("{out}");
    ExitCode::from(code)
}
