//! Command-line and config-file parameters.
//!
//! Every subcommand has one parameter struct used both as clap arguments and
//! as a TOML table. All fields are optional so that a flag given on the
//! command line can be told apart from one that was left out; precedence is
//! flag, then config file, then the default listed in `--help`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "opcalc", version, about = "Operator-integral calculus for pairs of Hermitian matrices")]
pub struct Cli {
    /// TOML file with one optional table per subcommand, e.g. `[commutator-check]`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate φ(A, B) as a double operator integral.
    Doi(DoiArgs),
    /// Compare the triple-integral evaluators against each other.
    TrioiCheck(TrioiCheckArgs),
    /// Check the commutator identity on seeded random trials.
    CommutatorCheck(CommutatorCheckArgs),
    /// Trace-norm ratio sweep ‖[φ(A,B),Q]‖₁ / (‖[A,Q]‖₁ + ‖[B,Q]‖₁).
    S1Bound(S1BoundArgs),
    /// Dyadic Besov-norm estimate of a sampled function.
    Besov(BesovArgs),
    /// Sinc partition defect and sinc-expansion reconstruction error.
    SincCheck(SincCheckArgs),
    /// Trace formula on truncated shifts.
    HeltonHowe(HeltonHoweArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Doi(_) => "doi",
            Command::TrioiCheck(_) => "trioi-check",
            Command::CommutatorCheck(_) => "commutator-check",
            Command::S1Bound(_) => "s1-bound",
            Command::Besov(_) => "besov",
            Command::SincCheck(_) => "sinc-check",
            Command::HeltonHowe(_) => "helton-howe",
        }
    }
}

/// Fills every unset field of `self` from `file`.
pub trait Merge {
    fn merge(self, file: Self) -> Self;
}

macro_rules! mergeable {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl Merge for $ty {
            fn merge(self, file: Self) -> Self {
                $ty { $($field: self.$field.or(file.$field)),* }
            }
        }
    };
}

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DoiArgs {
    /// Function of x and y [default: sin(x)*cos(y)]
    #[arg(long)]
    pub phi: Option<String>,
    /// Matrix JSON for A; a seeded random Hermitian matrix when absent
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Matrix JSON for B; a seeded random Hermitian matrix when absent
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Dimension of random inputs, 1..=512 [default: 4]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Seed for random inputs [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output matrix JSON; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(DoiArgs { phi, a, b, dim, seed, out });

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TrioiCheckArgs {
    /// Dimension, 1..=16 [default: 4]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of trials, 1..=10000 [default: 25]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; trial t uses seed + t [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest accepted relative error [default: 1e-11]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Output CSV; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(TrioiCheckArgs { dim, trials, seed, tolerance, out });

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartnerArg {
    /// Q is a normalized random matrix
    Random,
    /// Q = ψ(A, B) for a second family member ψ
    Product,
}

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CommutatorCheckArgs {
    /// Dimension, 1..=128 [default: 6]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of trials, 1..=10000 [default: 20]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; trial t uses seed + t [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Source of Q [default: random]
    #[arg(long, value_enum)]
    pub partner: Option<PartnerArg>,
    /// Largest accepted identity error [default: 1e-10]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Output CSV; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(CommutatorCheckArgs { dim, trials, seed, partner, tolerance, out });

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct S1BoundArgs {
    /// Fixed function; trials draw from the test family when absent
    #[arg(long)]
    pub phi: Option<String>,
    /// Smallest dimension, 1..=128 [default: 2]
    #[arg(long)]
    pub min_dim: Option<usize>,
    /// Largest dimension, 1..=128 [default: 10]
    #[arg(long)]
    pub max_dim: Option<usize>,
    /// Number of trials, 1..=10000 [default: 100]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; trial t uses seed + t [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid size for the Besov estimate of --phi, power of two 2..=4096 [default: 128]
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Half width of the Besov sampling square [default: 4]
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Output CSV; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(S1BoundArgs { phi, min_dim, max_dim, trials, seed, grid_size, half_width, out });

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BesovArgs {
    /// Grid file, JSON or binary (detected by content); overrides --phi
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Function to sample [default: sin(x)*cos(y)]
    #[arg(long)]
    pub phi: Option<String>,
    /// Samples per axis, power of two 2..=4096 [default: 128]
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Half width L of the square [−L, L]² [default: 4]
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Output JSON; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(BesovArgs { input, phi, grid_size, half_width, out });

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SincCheckArgs {
    /// Comma-separated truncation ladder J, each 1..=5000 [default: 50,100,200,400,500]
    #[arg(long, value_delimiter = ',')]
    pub truncations: Option<Vec<usize>>,
    /// Number of random probe triples, 1..=10000 [default: 60]
    #[arg(long)]
    pub probes: Option<usize>,
    /// Probe seed [default: 43]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest accepted reconstruction error at the last J [default: 1e-2]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Output CSV; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(SincCheckArgs { truncations, probes, seed, tolerance, out });

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct HeltonHoweArgs {
    /// First function [default: x]
    #[arg(long)]
    pub phi: Option<String>,
    /// Second function [default: y]
    #[arg(long)]
    pub psi: Option<String>,
    /// Comma-separated principal block sizes N [default: 8,16]
    #[arg(long = "N", value_delimiter = ',')]
    #[serde(rename = "N")]
    pub n: Option<Vec<usize>>,
    /// Truncation ratio M / N, 2..=64, with M at most 2048 [default: 4]
    #[arg(long)]
    pub ratio: Option<usize>,
    /// Radial Gauss nodes; 4x as many angles are used, 1..=4096 [default: 16]
    #[arg(long)]
    pub quad_points: Option<usize>,
    /// Largest accepted |lhs − rhs| [default: 1e-6]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Output stem; writes <stem>.csv and <stem>.json. CSV to stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}
mergeable!(HeltonHoweArgs { phi, psi, n, ratio, quad_points, tolerance, out });

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub doi: Option<DoiArgs>,
    pub trioi_check: Option<TrioiCheckArgs>,
    pub commutator_check: Option<CommutatorCheckArgs>,
    pub s1_bound: Option<S1BoundArgs>,
    pub besov: Option<BesovArgs>,
    pub sinc_check: Option<SincCheckArgs>,
    pub helton_howe: Option<HeltonHoweArgs>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Applies the matching table to `command`.
    pub fn apply(self, command: Command) -> Command {
        fn with<T: Merge + Default>(args: T, table: Option<T>) -> T {
            match table {
                Some(t) => args.merge(t),
                None => args,
            }
        }
        match command {
            Command::Doi(a) => Command::Doi(with(a, self.doi)),
            Command::TrioiCheck(a) => Command::TrioiCheck(with(a, self.trioi_check)),
            Command::CommutatorCheck(a) => Command::CommutatorCheck(with(a, self.commutator_check)),
            Command::S1Bound(a) => Command::S1Bound(with(a, self.s1_bound)),
            Command::Besov(a) => Command::Besov(with(a, self.besov)),
            Command::SincCheck(a) => Command::SincCheck(with(a, self.sinc_check)),
            Command::HeltonHowe(a) => Command::HeltonHowe(with(a, self.helton_howe)),
        }
    }
}
