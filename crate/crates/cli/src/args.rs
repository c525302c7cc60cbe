use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zalm_core::montecarlo::{Counting, SelectionPolicy};
use zalm_core::HeraldMode;

use crate::config::ParamOverrides;

#[derive(Debug, Parser)]
#[command(name = "zalm", version, about = "Islands-based ZALM source metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ParamArgs {
    /// `key = value` file read before the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mean pairs per island per polarization per pulse (G - 1).
    #[arg(long, allow_negative_numbers = true)]
    pub gain_minus_one: Option<f64>,
    /// Partial-BSM detection efficiency.
    #[arg(long)]
    pub eta_t: Option<f64>,
    /// Transmitter-to-receiver transmissivity.
    #[arg(long)]
    pub eta_r: Option<f64>,
    #[arg(long)]
    pub islands: Option<u64>,
    /// Pump pulses per second.
    #[arg(long)]
    pub pump_rate: Option<f64>,
    /// same-island, spci-paper or spci-exact.
    #[arg(long)]
    pub herald_mode: Option<HeraldMode>,
}

impl ParamArgs {
    pub fn overrides(&self) -> ParamOverrides {
        ParamOverrides {
            gain_minus_one: self.gain_minus_one,
            eta_t: self.eta_t,
            eta_r: self.eta_r,
            n_islands: self.islands,
            pump_rate: self.pump_rate,
            herald_mode: self.herald_mode,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every metric at one parameter point.
    Metrics {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// One figure preset or a custom one-axis sweep, written as CSV.
    Sweep(SweepArgs),
    /// Invert a metric for the gain, or find the island count.
    Solve {
        #[command(subcommand)]
        target: SolveTarget,
    },
    /// Monte Carlo herald statistics.
    Mc(McArgs),
    /// Fock-space oracle against the closed forms.
    Oracle(OracleArgs),
    /// Write all seven figure presets into a directory.
    Figures {
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Figure preset, 4 to 10.
    #[arg(long, conflicts_with_all = ["axis", "metric"])]
    pub figure: Option<u8>,
    /// Swept parameter for a custom sweep.
    #[arg(long, value_enum, requires = "metric")]
    pub axis: Option<AxisVar>,
    #[arg(long, allow_negative_numbers = true)]
    pub min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub max: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Treat min and max as base-10 exponents.
    #[arg(long)]
    pub log: bool,
    /// MetricBundle field to record.
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum AxisVar {
    GainMinusOne,
    EtaT,
    EtaR,
}

impl AxisVar {
    pub fn column(self, log: bool) -> &'static str {
        match (self, log) {
            (AxisVar::GainMinusOne, false) => "g_minus_1",
            (AxisVar::GainMinusOne, true) => "log10_g_minus_1",
            (AxisVar::EtaT, false) => "eta_t",
            (AxisVar::EtaT, true) => "log10_eta_t",
            (AxisVar::EtaR, false) => "eta_r",
            (AxisVar::EtaR, true) => "log10_eta_r",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum SolveTarget {
    /// Gain that reaches a Bell-state fraction or fidelity.
    Gain {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(
            long,
            conflicts_with = "fidelity",
            required_unless_present = "fidelity"
        )]
        fraction: Option<f64>,
        #[arg(long)]
        fidelity: Option<f64>,
    },
    /// Fewest islands whose true-herald probability reaches the target.
    Islands {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0.25)]
        target: f64,
        /// First re-solve the gain for this source Bell-state fraction at the
        /// given η_T.
        #[arg(long, conflicts_with = "reference_eta_t")]
        fraction: Option<f64>,
        /// First re-solve the gain so the source Bell-state fraction equals
        /// the one at (G - 1, this η_T).
        #[arg(long)]
        reference_eta_t: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum PolicyArg {
    Uniform,
    Lowest,
}

impl From<PolicyArg> for SelectionPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Uniform => SelectionPolicy::UniformRandom,
            PolicyArg::Lowest => SelectionPolicy::LowestIndex,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum CountingArg {
    Detector,
    IndependentPairs,
}

impl From<CountingArg> for Counting {
    fn from(c: CountingArg) -> Self {
        match c {
            CountingArg::Detector => Counting::Detector,
            CountingArg::IndependentPairs => Counting::IndependentPairs,
        }
    }
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub pulses: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    pub policy: PolicyArg,
    #[arg(long, value_enum, default_value = "detector")]
    pub counting: CountingArg,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = zalm_core::fock::DEFAULT_CUTOFF)]
    pub cutoff: usize,
    /// `+H-V` style pattern, or `all`.
    #[arg(long, default_value = "+H-V", allow_hyphen_values = true)]
    pub pattern: String,
    /// Largest acceptable |oracle - closed form|.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Largest acceptable Bell-basis off-diagonal element.
    #[arg(long, default_value_t = 1e-10)]
    pub off_diagonal_tolerance: f64,
    #[arg(long, default_value_t = zalm_core::fock::DEFAULT_TAIL_BUDGET)]
    pub tail_budget: f64,
}
