//! `snmark`: synthetic corpora, channel simulation, watermark benchmarks,
//! sensor fingerprints and the linking experiments from the command line.
//!
//! Exit status is 0 on success, 1 when the work itself fails and 2 when
//! the invocation is wrong.

mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Domain(format!("{}: {e}", path.display()))
    }
}

impl From<snmark::Error> for Failure {
    fn from(e: snmark::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "snmark",
    version,
    about = "Sensor-fingerprint forensics over simulated social networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic camera corpus and its manifest.
    Synth(SynthArgs),
    /// Compare two image files (name, digest, content, metadata).
    Diff(DiffArgs),
    /// Pass one image through a simulated network.
    Simulate(SimulateArgs),
    /// Print or write the built-in network profiles.
    Profiles(ProfilesArgs),
    /// Re-derive the per-class JPEG qualities of the profiles.
    Calibrate(CalibrateArgs),
    /// Watermark schemes and the survival grid.
    #[command(subcommand)]
    Wm(WmCommand),
    /// Build and match sensor fingerprints.
    #[command(subcommand)]
    Fingerprint(FingerprintCommand),
    /// Attribution and profile-linking experiments.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON file with any of the fields below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub cameras: Option<usize>,
    #[arg(long)]
    pub images: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub strength: Option<f64>,
    #[arg(long, value_enum)]
    pub scene: Option<SceneArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SceneArg {
    Flat,
    Gradient,
    Textured,
}

#[derive(Args, Debug)]
pub struct DiffArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Network id (SN01..) or name.
    #[arg(long)]
    pub sn: String,
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Upload time, seconds since the epoch.
    #[arg(long)]
    pub timestamp: Option<i64>,
    /// Uploading profile; changes the per-upload IPTC fields.
    #[arg(long, default_value = "profile1")]
    pub uploader: String,
}

#[derive(Args, Debug)]
pub struct ProfilesArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = snmark::channel::CALIBRATION_PER_CLASS)]
    pub per_class: usize,
    #[arg(long, default_value_t = snmark::channel::CALIBRATION_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchemeArg {
    Lsb,
    KeyedLsb,
    Dct,
    Dwt,
}

#[derive(Subcommand, Debug)]
pub enum WmCommand {
    /// Mark an image; the result is written as PNG.
    Embed(WmEmbedArgs),
    /// Read the payload of a readable scheme.
    Extract(WmExtractArgs),
    /// Test for the wavelet mark.
    Detect(WmDetectArgs),
    /// Run every scheme through every network.
    Grid(WmGridArgs),
}

#[derive(Args, Debug)]
pub struct WmEmbedArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Payload as hex; otherwise `--bits` random bits from `--seed`.
    #[arg(long)]
    pub message: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub bits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the seed.
    #[arg(long)]
    pub key: Option<u64>,
}

#[derive(Args, Debug)]
pub struct WmExtractArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub key: u64,
}

#[derive(Args, Debug)]
pub struct WmDetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub key: u64,
}

#[derive(Args, Debug)]
pub struct WmGridArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// JSON grid configuration (payload size, scheme parameters).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub per_class: usize,
    #[arg(long, default_value = "1920x1080")]
    pub standard: String,
    #[arg(long, default_value = "2688x1512")]
    pub large: String,
    #[arg(long, default_value = "512x512")]
    pub small: String,
}

#[derive(Subcommand, Debug)]
pub enum FingerprintCommand {
    /// Average the noise residuals of one camera's images.
    Build(FpBuildArgs),
    /// Correlate an image with a stored fingerprint.
    Match(FpMatchArgs),
}

#[derive(Args, Debug)]
pub struct FpBuildArgs {
    /// Manifest; the camera's train and unassigned entries are used.
    #[arg(long, requires = "camera")]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub camera: Option<String>,
    /// Explicit image files instead of a manifest.
    #[arg(long, num_args = 1.., conflicts_with = "corpus")]
    pub inputs: Vec<PathBuf>,
    /// Device id stored with explicit inputs.
    #[arg(long, default_value = "device")]
    pub device: String,
    #[arg(long, value_enum, default_value_t = DenoiserArg::WaveletHard)]
    pub denoiser: DenoiserArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FpMatchArgs {
    #[arg(long)]
    pub fingerprint: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = snmark::prnu::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = DenoiserArg::WaveletHard)]
    pub denoiser: DenoiserArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DenoiserArg {
    WaveletHard,
    WaveletSoft,
    Gaussian,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ClassifierArg {
    Threshold,
    Glm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TaskArg {
    Attribution,
    Intra,
    Inter,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GlmScopeArg {
    PerChannel,
    Global,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub task: TaskArg,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Seeds the train/test split.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// JSON with `split` and `eval` objects.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Restrict to these networks (ids or names, comma separated).
    #[arg(long, value_delimiter = ',')]
    pub sn: Vec<String>,
    #[arg(long)]
    pub train: Option<usize>,
    #[arg(long)]
    pub test: Option<usize>,
    #[arg(long, value_enum)]
    pub classifier: Option<ClassifierArg>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub denoiser: Option<DenoiserArg>,
    #[arg(long, value_enum)]
    pub glm_scope: Option<GlmScopeArg>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
