use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use umthresh::histogram::PeakConfig;
use umthresh::thresholding::Mode;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "umthresh",
    version,
    about = "Quantum-inspired histogram thresholding and NEQR binarization"
)]
pub struct Cli {
    /// Directory for every file the command writes.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect peaks and extract thresholds; writes thresholds.json and curves.csv.
    Thresholds(ThresholdsArgs),
    /// Map an image onto its threshold levels and score it against baselines.
    Quantize(QuantizeArgs),
    /// Binarize through the comparator circuit, per pixel, or classically.
    Binarize(BinarizeArgs),
    /// Cost, depth and truth-table check of the comparator for a range of widths.
    ReportComparator(ComparatorArgs),
    /// Recompute the worked 4-level and 2x2 examples.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Shots per peak in sampled mode (default 1000); for `binarize --route full-circuit`,
    /// samples the circuit instead of reading it exactly.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Required in sampled mode.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = PeakConfig::default().smooth_window)]
    pub smooth_window: usize,
    #[arg(long, default_value_t = PeakConfig::default().prominence_fraction)]
    pub prominence: f64,
    #[arg(long, default_value_t = PeakConfig::default().min_separation)]
    pub min_separation: u32,
    #[arg(long, default_value_t = PeakConfig::default().width_divisor)]
    pub width_divisor: f64,
    /// Images with at most this many distinct intensities count as one peak.
    #[arg(long, default_value_t = 16)]
    pub sparse_levels: usize,
    /// Peak set JSON to use instead of detection.
    #[arg(long)]
    pub peaks: Option<PathBuf>,
}

impl PipelineArgs {
    pub fn mode(&self) -> Result<Mode, CliError> {
        match self.mode {
            ModeArg::Exact => Ok(Mode::Exact),
            ModeArg::Sampled => {
                let shots = self.shots.unwrap_or(1000);
                if shots == 0 {
                    return Err(CliError::Usage("--shots must be at least 1".into()));
                }
                let seed = self
                    .seed
                    .ok_or_else(|| CliError::Usage("--mode sampled requires --seed".into()))?;
                Ok(Mode::Sampled { shots, seed })
            }
        }
    }

    pub fn peak_config(&self) -> PeakConfig {
        PeakConfig {
            smooth_window: self.smooth_window,
            prominence_fraction: self.prominence,
            min_separation: self.min_separation,
            width_divisor: self.width_divisor,
        }
    }
}

#[derive(Debug, Args)]
pub struct ThresholdsArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    SegmentMean,
    PeakValue,
    BinaryExtremes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    None,
    Otsu,
    MultiOtsu,
}

#[derive(Debug, Args)]
pub struct QuantizeArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = RuleArg::SegmentMean)]
    pub rule: RuleArg,
    #[arg(long, value_enum, default_value_t = Baseline::None)]
    pub compare: Baseline,
    /// Binarize with a single pipeline threshold instead of multilevel output.
    #[arg(long)]
    pub binary: bool,
    /// Threshold set JSON to use instead of running the pipeline.
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    FullCircuit,
    PerPixel,
    Classical,
}

#[derive(Debug, Args)]
pub struct BinarizeArgs {
    pub input: PathBuf,
    /// Pixels strictly above this are white; defaults to the pipeline's choice.
    #[arg(long)]
    pub threshold: Option<u32>,
    #[arg(long, value_enum, default_value_t = RouteArg::PerPixel)]
    pub route: RouteArg,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct ComparatorArgs {
    #[arg(long, default_value_t = 1)]
    pub q_min: usize,
    #[arg(long, default_value_t = 4)]
    pub q_max: usize,
    /// Widths above this are checked on random pairs instead of exhaustively.
    #[arg(long, default_value_t = 4)]
    pub exhaustive_max: usize,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}
