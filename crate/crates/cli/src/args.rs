use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "ancient-flow", version, about = "Experiments on ancient curve-shortening flows in R^n")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Number of curve nodes.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed of the randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with `grid`, `out`, `seed` and a `params` record for the
    /// subcommand; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample exact torus curves and tabulate their asymptotics.
    Torus(TorusArgs),
    /// Lowest eigenvalues of the drift Laplacian on a multiply covered circle.
    Spectrum(SpectrumArgs),
    /// Curve-shortening flow in physical time.
    Flow(FlowArgs),
    /// Curve-shortening flow in rescaled time.
    Rescaled(RescaledArgs),
    /// Caloric fields along a flow and their Gaussian norms.
    Caloric(CaloricArgs),
    /// Effective codimension of a torus curve.
    Codim(CodimArgs),
    /// Randomized checks of the weighted inequalities and rates.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Gaussian entropy of a curve.
    Entropy(EntropyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Torus(_) => "torus",
            Command::Spectrum(_) => "spectrum",
            Command::Flow(_) => "flow",
            Command::Rescaled(_) => "rescaled",
            Command::Caloric(_) => "caloric",
            Command::Codim(_) => "codim",
            Command::Verify(v) => match v {
                VerifyCommand::Poincare(_) => "verify-poincare",
                VerifyCommand::Rayleigh(_) => "verify-rayleigh",
                VerifyCommand::Carleman(_) => "verify-carleman",
                VerifyCommand::Drift(_) => "verify-drift",
                VerifyCommand::Growth(_) => "verify-growth",
                VerifyCommand::Rigidity(_) => "verify-rigidity",
            },
            Command::Entropy(_) => "entropy",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    Poincare(PoincareArgs),
    Rayleigh(RayleighArgs),
    Carleman(CarlemanArgs),
    Drift(DriftArgs),
    Growth(GrowthArgs),
    Rigidity(RigidityArgs),
}

/// Where a command's curve comes from; exactly one source may be given.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveSource {
    /// Curve JSON file.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Torus curve frequencies, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub torus: Option<Vec<u32>>,
    /// Shrinking circle covered this many times.
    #[arg(long)]
    pub circle_mult: Option<u32>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TorusArgs {
    #[arg(long, value_delimiter = ',')]
    pub freqs: Option<Vec<u32>>,
    /// Time of the emitted curve.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// `T1:T2` window of the radius and distance tables.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    /// `T1:T2` window of the entropy sweep; no sweep when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub entropy_sweep: Option<String>,
    #[arg(long)]
    pub sweep_points: Option<usize>,
    /// Samples of the graph decay fit.
    #[arg(long)]
    pub decay_samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub multiplicity: Option<u32>,
    /// Circle radius; the shrinker radius when absent.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Eigenvalues computed beyond the zero one.
    #[arg(long)]
    pub count: Option<usize>,
    /// Accepted absolute eigenvalue error.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Start time; also the time at which torus and circle sources are sampled.
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// `explicit` or `semi-implicit`.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub cadence: Option<usize>,
    /// Multiplicity of the reference circle for the graph norm column.
    #[arg(long)]
    pub reference_mult: Option<u32>,
    /// Coordinate plane of the reference circle, e.g. `2,3`.
    #[arg(long, value_delimiter = ',')]
    pub reference_plane: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RescaledArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Physical time of torus sources, which are then rescaled.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau1: Option<f64>,
    #[arg(long)]
    pub dtau: Option<f64>,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub cadence: Option<usize>,
    #[arg(long)]
    pub reference_mult: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub reference_plane: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CaloricArgs {
    #[command(flatten)]
    pub source: CurveSource,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub cadence: Option<usize>,
    /// Random trigonometric fields added to the coordinates.
    #[arg(long)]
    pub fields: Option<usize>,
    #[arg(long)]
    pub max_mode: Option<usize>,
    /// Relative increase of the Gaussian norm tolerated per stored sample.
    #[arg(long)]
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodimArgs {
    #[arg(long, value_delimiter = ',')]
    pub torus: Option<Vec<u32>>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Pair radius; solved from `t` when absent.
    #[arg(long)]
    pub r: Option<f64>,
    /// Ignore `--r` and solve the radius from `t`.
    #[arg(long)]
    pub r_from_t: bool,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Expected codimension; checked when given.
    #[arg(long)]
    pub expect: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoincareArgs {
    #[arg(long)]
    pub sigma_mult: Option<u32>,
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub max_mode: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RayleighArgs {
    #[arg(long)]
    pub sigma_mult: Option<u32>,
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub max_mode: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CarlemanArgs {
    #[arg(long)]
    pub sigma_mult: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Mode `k` of the separable caloric test function on the static circle.
    #[arg(long)]
    pub caloric_mode: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Odd number of time samples.
    #[arg(long)]
    pub time_samples: Option<usize>,
    /// Additional random space-time fields.
    #[arg(long)]
    pub instances: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftArgs {
    #[arg(long, value_delimiter = ',')]
    pub freqs: Option<Vec<u32>>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Grid sizes of the convergence study.
    #[arg(long, value_delimiter = ',')]
    pub grids: Option<Vec<usize>>,
    /// Direction `U`; random when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrowthArgs {
    #[arg(long, value_delimiter = ',')]
    pub freqs: Option<Vec<u32>>,
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Attached field: `x0`, `x1`, ... or `one`.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub expect: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RigidityArgs {
    #[arg(long)]
    pub sigma_mult: Option<u32>,
    #[arg(long)]
    pub mode: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau_window: Option<String>,
    #[arg(long)]
    pub dtau: Option<f64>,
    #[arg(long)]
    pub cadence: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub source: CurveSource,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_evals: Option<usize>,
    #[arg(long)]
    pub expect: Option<f64>,
    /// Relative tolerance of `--expect`.
    #[arg(long)]
    pub tolerance: Option<f64>,
}
