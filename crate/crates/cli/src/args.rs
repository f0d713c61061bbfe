use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Default seed for keys generated by `demo` and `batch`.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(
    name = "pixelbreak",
    version,
    about = "Image encryption schemes for private learning, and attacks on them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Block-scrambling scheme.
    Tanaka {
        #[command(subcommand)]
        op: TanakaOp,
    },
    /// Per-pixel negative-positive scheme.
    Skk {
        #[command(subcommand)]
        op: SkkOp,
    },
    /// Run an attack against a ciphertext.
    Attack {
        #[command(subcommand)]
        attack: AttackCommand,
    },
    /// Compare two images.
    Metrics(MetricsArgs),
    /// Regenerate figure panels from the bundled samples.
    Demo(DemoArgs),
    /// Run every attack over a manifest of images and write a CSV report.
    Batch(BatchArgs),
    /// Write a key file.
    Keygen(KeygenArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("key_source").required(true).args(["key", "key_file"])))]
pub struct KeySource {
    /// Key as 32 hex characters.
    #[arg(long, value_name = "HEX")]
    pub key: Option<String>,
    /// File holding the key as 32 hex characters and a newline.
    #[arg(long, value_name = "PATH")]
    pub key_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InOut {
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TanakaParams {
    #[command(flatten)]
    pub key: KeySource,
    #[arg(long, value_name = "M", value_parser = clap::value_parser!(u32).range(1..))]
    pub block_size: u32,
    /// Also reverse keyed components.
    #[arg(long)]
    pub reversal: bool,
    #[command(flatten)]
    pub io: InOut,
}

#[derive(Debug, Subcommand)]
pub enum TanakaOp {
    Encrypt(TanakaParams),
    Decrypt(TanakaParams),
}

#[derive(Debug, Args)]
pub struct SkkParams {
    #[command(flatten)]
    pub key: KeySource,
    /// Also shuffle channels within each pixel.
    #[arg(long)]
    pub shuffle: bool,
    /// Treat the key as a base key and derive the key of image `--index`.
    #[arg(long, requires = "index")]
    pub per_image: bool,
    #[arg(long, value_name = "N", requires = "per_image")]
    pub index: Option<u64>,
    #[command(flatten)]
    pub io: InOut,
}

#[derive(Debug, Subcommand)]
pub enum SkkOp {
    Encrypt(SkkParams),
    Decrypt(SkkParams),
}

/// Key material for the simulated encryption oracle. Only the oracle sees it.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("oracle_key_source").required(true).args(["oracle_key", "oracle_key_file"])))]
pub struct OracleSetup {
    /// Key held by the oracle, as 32 hex characters.
    #[arg(long, value_name = "HEX")]
    pub oracle_key: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub oracle_key_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Known plaintext, used only for scoring.
    #[arg(long, value_name = "PATH")]
    pub original: Option<PathBuf>,
    /// Write an attack report as JSON. Needs `--original`.
    #[arg(long, value_name = "PATH", requires = "original")]
    pub report: Option<PathBuf>,
    /// Record wall-clock time in the report instead of 0.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum AttackCommand {
    /// Chosen-plaintext attack on the block-scrambling scheme.
    TanakaCpa {
        #[command(flatten)]
        oracle: OracleSetup,
        #[arg(long, value_name = "M", value_parser = clap::value_parser!(u32).range(1..))]
        block_size: u32,
        /// Oracle key was generated with reversal enabled.
        #[arg(long)]
        reversal: bool,
        /// Target pixels per helper image.
        #[arg(long, value_name = "N", default_value_t = 16)]
        batch: usize,
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Chosen-plaintext attack on the same-key per-pixel scheme.
    SkkCpa {
        #[command(flatten)]
        oracle: OracleSetup,
        /// Oracle key was generated with shuffling enabled.
        #[arg(long)]
        shuffle: bool,
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Force every channel to one leading bit.
    SkkCoaBasic {
        #[arg(long, value_enum)]
        leading_bit: LeadingBit,
        /// Also write `<output>.gray.<ext>`.
        #[arg(long)]
        emit_grayscale: bool,
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Neighbour-guided search over the 48 options of each pixel.
    SkkCoaAdv {
        /// Write 48 decryptions, one per option of the first pixel, into the
        /// output directory.
        #[arg(long)]
        enumerate_seeds: bool,
        #[arg(long)]
        emit_grayscale: bool,
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        report: ReportArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LeadingBit {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

impl LeadingBit {
    pub fn as_bool(self) -> bool {
        matches!(self, LeadingBit::One)
    }
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub reference: PathBuf,
    pub candidate: PathBuf,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    All,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    #[arg(long, value_name = "DIR")]
    pub outdir: PathBuf,
    #[arg(long, env = "PIXELBREAK_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// One image path per line; relative paths resolve against the manifest.
    pub manifest: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub outdir: PathBuf,
    /// CSV report, one row per (image, attack).
    #[arg(long, value_name = "PATH")]
    pub report: PathBuf,
    #[arg(long, env = "PIXELBREAK_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_name = "M", default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub block_size: u32,
    #[arg(long, value_name = "N", default_value_t = 16)]
    pub batch: usize,
    #[arg(long, value_enum, default_value = "0")]
    pub leading_bit: LeadingBit,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    /// Derive the key from this seed instead of system randomness.
    #[arg(long, env = "PIXELBREAK_SEED")]
    pub seed: Option<u64>,
    /// Key file to write; stdout if omitted.
    pub output: Option<PathBuf>,
}
