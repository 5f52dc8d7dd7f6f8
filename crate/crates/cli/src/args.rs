use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use qdiscord::verify::Suite;
use qdiscord::ChiMode;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qdiscord", version, about = "Quantum discord, decoherence regimes and teleportation fidelity of Bell-diagonal states")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiModeArg {
    AsPrinted,
    OracleCalibrated,
}

impl From<ChiModeArg> for ChiMode {
    fn from(m: ChiModeArg) -> Self {
        match m {
            ChiModeArg::AsPrinted => ChiMode::AsPrinted,
            ChiModeArg::OracleCalibrated => ChiMode::OracleCalibrated,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Normalization of the closed-form classical correlations.
    #[arg(long, global = true, value_enum, default_value_t = ChiModeArg::OracleCalibrated)]
    pub chi_mode: ChiModeArg,
    /// Physicality tolerance for input states and izodiscord bisection tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for Monte Carlo and randomized verification.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
}

/// Bell-diagonal state parameters. Occupations come either from
/// `--rho-phi`/`--rho-psi` or from `--delta`.
#[derive(Debug, Args, Serialize, Default)]
pub struct StateArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["delta", "bell", "maximally_mixed"])]
    pub rho_phi: Option<f64>,
    /// Defaults to 1/2 − rho_phi.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["delta", "bell", "maximally_mixed"])]
    pub rho_psi: Option<f64>,
    /// Occupation difference rho_phi − rho_psi.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["bell", "maximally_mixed"])]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["bell", "maximally_mixed"])]
    pub sigma_phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["bell", "maximally_mixed"])]
    pub sigma_psi: Option<f64>,
    /// The Bell state |Phi+>.
    #[arg(long, conflicts_with = "maximally_mixed")]
    pub bell: bool,
    /// The maximally mixed state.
    #[arg(long)]
    pub maximally_mixed: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Mutual information, classical correlations, discord and regime of a state.
    Correlations(CorrelationsArgs),
    /// Teleportation fidelity through a Bell-diagonal resource.
    Teleport(TeleportArgs),
    /// Correlations along a decoherence trajectory.
    Trajectory(TrajectoryArgs),
    /// Regime, discord and fidelity map over the (sigma_phi, delta) plane.
    Sweep(SweepArgs),
    /// Constant-discord contours.
    Izodiscord(IzodiscordArgs),
    /// Separability line located by concurrence and by the 2/3 fidelity limit.
    Separability(SeparabilityArgs),
    /// Oracle-equivalence suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CorrelationsArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Also run the measurement-optimization oracle on the dense matrix.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputState {
    #[value(name = "0", alias = "zero")]
    Zero,
    #[value(name = "1", alias = "one")]
    One,
    #[value(name = "+", alias = "plus")]
    Plus,
    #[value(name = "-", alias = "minus")]
    Minus,
    #[value(name = "+i", alias = "plus-i")]
    PlusI,
    #[value(name = "-i", alias = "minus-i")]
    MinusI,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("what").required(true).args(["input", "theta", "extrema", "average"])))]
pub struct TeleportArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Named input state.
    #[arg(long, value_enum, allow_hyphen_values = true)]
    pub input: Option<InputState>,
    /// Bloch polar angle of the input state.
    #[arg(long, requires = "phi")]
    pub theta: Option<f64>,
    /// Bloch azimuth of the input state.
    #[arg(long, requires = "theta", allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Worst- and best-case fidelity over all inputs.
    #[arg(long)]
    pub extrema: bool,
    /// Fidelity averaged over the Bloch sphere.
    #[arg(long)]
    pub average: bool,
    /// Cross-check against an independent route (protocol simulation, input grid,
    /// or Monte Carlo).
    #[arg(long)]
    pub oracle: bool,
    /// Monte Carlo sample count for `--average --oracle`.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Generalized amplitude damping with Gaussian dephasing.
    Gad,
    /// Short-time transverse-coupling model.
    Transverse,
}

#[derive(Debug, Args, Serialize)]
pub struct TrajectoryArgs {
    /// Initial state; |Phi+> when omitted.
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum, default_value_t = Model::Gad)]
    pub model: Model,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_relax: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_phase: f64,
    /// Validity window of the transverse model (t <= gamma_prime).
    #[arg(long)]
    pub gamma_prime: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 201)]
    pub n_sigma: usize,
    #[arg(long, default_value_t = 201)]
    pub n_delta: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma_min: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub sigma_max: f64,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub delta_max: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct IzodiscordArgs {
    /// Discord levels in bits, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5, 0.7])]
    pub levels: Vec<f64>,
    #[arg(long, default_value_t = 201)]
    pub n_delta: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SeparabilityArgs {
    #[arg(long, default_value_t = 50)]
    pub n_delta: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub delta_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteArg {
    All,
    ChiCalibration,
    Protocol,
    Extrema,
    TransitionTime,
    WorstCaseFidelity,
    JumpBase,
    AverageFidelity,
    Separability,
}

impl SuiteArg {
    pub fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::All => Suite::ALL.to_vec(),
            SuiteArg::ChiCalibration => vec![Suite::ChiCalibration],
            SuiteArg::Protocol => vec![Suite::Protocol],
            SuiteArg::Extrema => vec![Suite::Extrema],
            SuiteArg::TransitionTime => vec![Suite::TransitionTime],
            SuiteArg::WorstCaseFidelity => vec![Suite::WorstCaseFidelity],
            SuiteArg::JumpBase => vec![Suite::JumpBase],
            SuiteArg::AverageFidelity => vec![Suite::AverageFidelity],
            SuiteArg::Separability => vec![Suite::Separability],
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Correlations(_) => "correlations",
            Command::Teleport(_) => "teleport",
            Command::Trajectory(_) => "trajectory",
            Command::Sweep(_) => "sweep",
            Command::Izodiscord(_) => "izodiscord",
            Command::Separability(_) => "separability",
            Command::Verify(_) => "verify",
        }
    }
}
