use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "qroofline",
    version,
    about = "Compare quantum machine configurations with circuit fidelity models"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct Global {
    /// Machine datasheet JSON (defaults to the bundled one).
    #[arg(long, global = true)]
    pub datasheet: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Model {
    Digital,
    Cyclic,
    Coupling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Kind {
    OneQubit,
    Ratio,
    TwoQubit,
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Policy {
    Shared,
    PerMachine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Mapping {
    OneMinusP,
    ProcessToAverage,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Gate counts, cycle count and parallelism of a QASM circuit.
    Metrics(MetricsArgs),
    /// Estimated circuit fidelity on one machine.
    Fidelity(FidelityArgs),
    /// Region grid and 2-qubit threshold for two configurations.
    Compare(CompareArgs),
    /// Solve one threshold.
    Threshold(ThresholdArgs),
    /// Weyl-chamber coordinates of circuit blocks.
    Weyl(WeylArgs),
    /// Model vs Monte-Carlo validation sweep.
    Validate(ValidateArgs),
    /// Machine datasheet commands.
    #[command(subcommand)]
    Machines(MachinesCommand),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MachinesCommand {
    /// List machines in the datasheet.
    List,
}

#[derive(Args, Debug, Serialize)]
pub struct MetricsArgs {
    pub circuit: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct FidelityArgs {
    /// QASM circuit.
    #[arg(conflicts_with = "counts")]
    pub circuit: Option<PathBuf>,
    /// Gate counts as `n1,n2`.
    #[arg(long)]
    pub counts: Option<String>,
    #[arg(long)]
    pub machine: Option<String>,
    /// 2-qubit gate on the machine (defaults to its first).
    #[arg(long)]
    pub gate: Option<String>,
    #[arg(long, value_enum, default_value_t = Model::Digital)]
    pub model: Model,
    /// 1-qubit average fidelity override.
    #[arg(long)]
    pub f1: Option<f64>,
    /// 2-qubit average fidelity override.
    #[arg(long)]
    pub f2: Option<f64>,
    #[arg(long)]
    pub ec1: Option<f64>,
    #[arg(long)]
    pub ec2: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
}

/// Workload for one side of a comparison: a QASM file, bare counts, or a
/// record from `--records`.
#[derive(Args, Debug, Serialize)]
pub struct Sides {
    #[arg(long)]
    pub a_circuit: Option<PathBuf>,
    /// `n1,n2`
    #[arg(long)]
    pub a_counts: Option<String>,
    /// `benchmark,gate_set,topology` row of `--records`.
    #[arg(long)]
    pub a_record: Option<String>,
    #[arg(long)]
    pub a_machine: Option<String>,
    #[arg(long)]
    pub a_gate: Option<String>,
    #[arg(long)]
    pub b_circuit: Option<PathBuf>,
    #[arg(long)]
    pub b_counts: Option<String>,
    #[arg(long)]
    pub b_record: Option<String>,
    #[arg(long)]
    pub b_machine: Option<String>,
    #[arg(long)]
    pub b_gate: Option<String>,
    /// Count records, CSV or JSON.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub sides: Sides,
    /// Grid size `NXxNY`.
    #[arg(long, default_value = "200x200")]
    pub grid: String,
    /// Range of A's 2-qubit fidelity, `lo:hi`.
    #[arg(long, default_value = "0.990:0.999")]
    pub x: String,
    /// Range of B's relative 2-qubit fidelity, `lo:hi`.
    #[arg(long, default_value = "0.99:1.01")]
    pub y: String,
    #[arg(long, default_value = "0.999:0.99999")]
    pub r1a: String,
    #[arg(long, default_value = "0.999:0.99999")]
    pub r1b: String,
    #[arg(long, value_enum, default_value_t = Model::Digital)]
    pub model: Model,
    /// 1-qubit fidelities for the threshold (default: machine datasheet, else the top of the range).
    #[arg(long)]
    pub f1a: Option<f64>,
    #[arg(long)]
    pub f1b: Option<f64>,
    #[arg(long, default_value_t = 0.999)]
    pub f2b_max: f64,
    /// Also write the threshold report JSON here.
    #[arg(long)]
    pub threshold_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[command(flatten)]
    pub sides: Sides,
    #[arg(long)]
    pub f1a: Option<f64>,
    #[arg(long)]
    pub f1b: Option<f64>,
    #[arg(long)]
    pub f2a: Option<f64>,
    #[arg(long)]
    pub f2b: Option<f64>,
    #[arg(long, default_value_t = 0.999)]
    pub f2b_max: f64,
    #[arg(long, default_value_t = 0.999)]
    pub f1_floor: f64,
    #[arg(long, default_value_t = 10.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t = Policy::Shared)]
    pub policy: Policy,
    #[arg(long, value_enum, default_value_t = Model::Digital)]
    pub model: Model,
}

#[derive(Args, Debug, Serialize)]
pub struct WeylArgs {
    pub circuit: PathBuf,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub blocks: u8,
    /// Emit the 2-qubit-gates-per-block histogram instead of coordinates.
    #[arg(long)]
    pub histogram: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 5)]
    pub width: usize,
    /// `lo:hi:step` or a comma list.
    #[arg(long, default_value = "5:50:5")]
    pub cnots: String,
    #[arg(long, default_value = "25")]
    pub depths: String,
    /// Depolarizing probabilities `p1,p2`.
    #[arg(long, default_value = "0.001,0.01")]
    pub noise: String,
    #[arg(long, default_value_t = 1000)]
    pub trajectories: usize,
    #[arg(long, value_enum, default_value_t = Mapping::OneMinusP)]
    pub mapping: Mapping,
}
