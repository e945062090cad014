use clap::{Args, Parser, Subcommand, ValueEnum};
use eips_itl::icd::StopRule;
use eips_itl::itl::Descriptor;
use eips_itl::kaf::Algorithm;
use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "eips-itl", version, about = "Explicit-feature kernel ITL estimators and adaptive filters")]
pub struct Cli {
    /// JSON object of flag values (keys are long flag names); flags on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Accumulate a descriptor over all feature pairs of one or more tables.
    Estimate(EstimateArgs),
    /// Run adaptive filters on the Mackey-Glass prediction protocol.
    Kaf(KafArgs),
    /// Generate a Mackey-Glass series.
    GenMg(GenMgArgs),
    /// Time information-potential backends on synthetic data.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// Aligned columns for reading in a terminal.
    Table,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write results here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Direct,
    Icd,
    Eips,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    Taylor,
    Gq,
    RffPaired,
    RffShifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scaling {
    Global,
    PerColumn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StdKind {
    Population,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DelimiterKind {
    Comma,
    Whitespace,
}

fn parse_descriptor(s: &str) -> Result<Descriptor, String> {
    s.parse().map_err(|e: eips_itl::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: eips_itl::Error| e.to_string())
}

fn parse_rule(s: &str) -> Result<StopRule, String> {
    s.parse().map_err(|e: eips_itl::Error| e.to_string())
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EstimateArgs {
    /// Bundled table names (iris, wine, cancer, yeast, abalone) or paths to
    /// delimited files.
    #[arg(long, value_delimiter = ',', value_name = "NAME|PATH")]
    pub dataset: Vec<String>,

    /// Directory holding the bundled tables.
    #[arg(long, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,

    /// Field separator of dataset files given by path.
    #[arg(long, value_enum, default_value_t = DelimiterKind::Comma)]
    pub delimiter: DelimiterKind,

    /// Dataset files given by path have no header line.
    #[arg(long)]
    pub no_header: bool,

    /// Columns to drop from dataset files given by path (names or indices).
    #[arg(long, value_delimiter = ',')]
    pub drop_columns: Vec<String>,

    /// cc, correntropy, cip, qmi-cs, qmi-ed, dcs, ded, ip or entropy.
    #[arg(long, default_value = "cc", value_parser = parse_descriptor)]
    pub descriptor: Descriptor,

    #[arg(long, value_enum, value_delimiter = ',', default_value = "direct")]
    pub backend: Vec<BackendKind>,

    /// Parzen kernel width.
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    pub sigma: f64,

    /// Incomplete Cholesky tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,

    #[arg(long, default_value = "trace", value_parser = parse_rule)]
    pub icd_rule: StopRule,

    #[arg(long)]
    pub max_rank: Option<usize>,

    /// Feature map of the eips backend.
    #[arg(long, value_enum, default_value_t = MapKind::Taylor)]
    pub map: MapKind,

    /// Taylor or quadrature degrees; one result row per value.
    #[arg(long, value_delimiter = ',', default_value = "9")]
    pub degree: Vec<u32>,

    /// Feature counts of the quadrature and Fourier maps.
    #[arg(long, value_delimiter = ',', default_value = "330")]
    pub features: Vec<usize>,

    #[arg(long, default_value_t = 1)]
    pub trials: usize,

    /// Count feature-map construction in the reported CPU time.
    #[arg(long)]
    pub include_setup: bool,

    /// Emit a row per trial besides the mean.
    #[arg(long)]
    pub per_trial: bool,

    /// Seed of the random feature maps.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Scaling::Global)]
    pub scaling: Scaling,

    #[arg(long, value_enum, default_value_t = StdKind::Population)]
    pub std: StdKind,

    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct KafArgs {
    /// One or more of: lms, lmee-sig, klms, kmcc, qkmcc, kmee-sig,
    /// qkmee-sig, nt-klms, nt-kmcc, nt-kmee, nt-kmee-ts, nt-kmee-sig.
    #[arg(long, value_delimiter = ',', default_value = "nt-kmcc", value_parser = parse_algorithm)]
    pub algorithm: Vec<Algorithm>,

    /// Input feature map of the nt-* filters.
    #[arg(long, value_enum, default_value_t = MapKind::Gq)]
    pub map: MapKind,

    #[arg(long, default_value_t = 8)]
    pub degree: u32,

    #[arg(long, default_value_t = 330)]
    pub features: usize,

    /// Learning rate (default 0.4, or 0.05 for error-entropy filters).
    #[arg(long)]
    pub eta: Option<f64>,

    /// Input kernel width.
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    pub sigma: f64,

    /// Correntropy and SIG kernel width.
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    pub sigma_c: f64,

    /// Error-kernel width of the full IP gradient (default sqrt(2)*sigma-c).
    #[arg(long)]
    pub ip_width: Option<f64>,

    /// Error history length of the entropy filters.
    #[arg(long, default_value_t = 200)]
    pub window: usize,

    /// Quantization radius of qkmcc and qkmee-sig.
    #[arg(long, default_value_t = 0.07)]
    pub q_factor: f64,

    /// Taylor degree of the error map of nt-kmee-ts.
    #[arg(long, default_value_t = 4)]
    pub error_degree: u32,

    #[arg(long, default_value_t = 20)]
    pub trials: usize,

    #[arg(long, default_value_t = 2000)]
    pub train: usize,

    #[arg(long, default_value_t = 200)]
    pub test: usize,

    /// Length of the generated series before embedding.
    #[arg(long, default_value_t = 20000)]
    pub series_len: usize,

    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,

    /// Use this series (as written by gen-mg) instead of generating one.
    #[arg(long, value_name = "PATH")]
    pub series: Option<PathBuf>,

    #[arg(long, default_value_t = 7)]
    pub embed: usize,

    #[arg(long, default_value_t = 1)]
    pub horizon: usize,

    /// Test-set evaluation period, in updates.
    #[arg(long, default_value_t = 10)]
    pub eval_every: usize,

    /// Base seed; trial t uses seed + t for its window and feature map.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for trials.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,

    /// Emit rows for every trial besides the means.
    #[arg(long)]
    pub per_trial: bool,

    /// Save each trained filter as JSON in this directory.
    #[arg(long, value_name = "DIR")]
    pub save_state: Option<PathBuf>,

    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GenMgArgs {
    #[arg(long, default_value_t = 20000)]
    pub samples: usize,

    #[arg(long, default_value_t = 0.2)]
    pub beta: f64,

    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,

    #[arg(long, default_value_t = 30.0)]
    pub tau: f64,

    #[arg(long, default_value_t = 10.0)]
    pub n: f64,

    /// Sampling period.
    #[arg(long, default_value_t = 6.0)]
    pub dt: f64,

    /// Integration step.
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,

    #[arg(long, default_value_t = 0.9)]
    pub x0: f64,

    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,

    /// Keep the integrator output instead of standardizing it.
    #[arg(long)]
    pub raw: bool,

    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BenchArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "direct,icd,eips")]
    pub backend: Vec<BackendKind>,

    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000")]
    pub sizes: Vec<usize>,

    #[arg(long, default_value_t = 5)]
    pub repeats: usize,

    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    pub sigma: f64,

    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,

    /// Taylor degree of the eips backend.
    #[arg(long, default_value_t = 9)]
    pub degree: u32,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub output: Output,
}
