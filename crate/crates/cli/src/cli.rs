//! Command-line grammar. Every numeric parameter is optional at the parser
//! level so a `--config` JSON file can supply it; the commands check for
//! completeness after merging (flags win over the file, the file over
//! built-in defaults).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "resonest",
    version,
    about = "Coupling and external-Q extraction from time-domain resonator \
             records, filter synthesis, and estimator comparison",
    propagate_version = true
)]
pub struct Cli {
    /// JSON file supplying per-subcommand parameter defaults
    #[arg(short, long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for multi-input runs (0 = one per CPU)
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an oracle record with known ground truth
    #[command(subcommand)]
    Gen(GenCommand),
    /// Extract the coupling coefficient from probe-voltage records
    ExtractK(ExtractKArgs),
    /// Extract the external Q from incident/total voltage records
    ExtractQe(ExtractQeArgs),
    /// Convert a low-pass prototype into coupling targets
    Synth(SynthArgs),
    /// Invert a monotone design curve at a target ordinate
    Invert(InvertArgs),
    /// Compare subspace and periodogram estimates on one record
    Compare(CompareArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Gaussian excitation pulse (peak 1 at t = 1/fp)
    Pulse(GenPulseArgs),
    /// Closed-form split-pair record: two damped cosines
    TwoTone(GenTwoToneArgs),
    /// Circuit-level split-pair record: integrated coupled LC pair
    Ode(GenOdeArgs),
}

#[derive(Debug, Args)]
pub struct GenPulseArgs {
    /// Pulse center frequency, Hz
    #[arg(long)]
    pub fp: Option<f64>,
    /// Sample interval, seconds
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of samples
    #[arg(long)]
    pub n: Option<usize>,
    /// Signal CSV to write
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Ground-truth sidecar JSON (default: output with .json extension)
    #[arg(long, value_name = "FILE")]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenTwoToneArgs {
    /// Uncoupled resonance frequency, Hz
    #[arg(long)]
    pub f0: Option<f64>,
    /// Coupling coefficient (0 collapses the record to a single tone)
    #[arg(long)]
    pub k: Option<f64>,
    /// Shared decay rate, 1/s
    #[arg(long)]
    pub damping: Option<f64>,
    /// Amplitude of the lower mode
    #[arg(long)]
    pub amplitude_minus: Option<f64>,
    /// Amplitude of the upper mode
    #[arg(long)]
    pub amplitude_plus: Option<f64>,
    /// Phase of the lower mode, radians
    #[arg(long)]
    pub phase_minus: Option<f64>,
    /// Phase of the upper mode, radians
    #[arg(long)]
    pub phase_plus: Option<f64>,
    /// Sample interval, seconds
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of samples
    #[arg(long)]
    pub n: Option<usize>,
    /// Signal CSV to write
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Ground-truth sidecar JSON (default: output with .json extension)
    #[arg(long, value_name = "FILE")]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenOdeArgs {
    /// Uncoupled resonance frequency, Hz
    #[arg(long)]
    pub f0: Option<f64>,
    /// Coupling coefficient
    #[arg(long)]
    pub k: Option<f64>,
    /// Center frequency of the Gaussian drive pulse, Hz
    #[arg(long)]
    pub fp: Option<f64>,
    /// Modal decay rate, 1/s
    #[arg(long)]
    pub damping: Option<f64>,
    /// Sample interval, seconds
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of samples
    #[arg(long)]
    pub n: Option<usize>,
    /// Signal CSV to write
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Ground-truth sidecar JSON (default: output with .json extension)
    #[arg(long, value_name = "FILE")]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractKArgs {
    /// Input signal CSV(s); several inputs run as parallel jobs
    #[arg(long = "input", value_name = "FILE", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Uncoupled resonance frequency, Hz
    #[arg(long)]
    pub f0: Option<f64>,
    /// Excitation pulse center frequency, Hz
    #[arg(long)]
    pub fp: Option<f64>,
    /// Design bandwidth B, Hz
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Bandpass width multiplier (bandpass envelope width = alpha*B)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Correlation order m of the subspace estimator
    #[arg(long)]
    pub correlation_order: Option<usize>,
    /// Number of complex modes the subspace estimator extracts
    #[arg(long)]
    pub n_modes: Option<usize>,
    /// Relative tolerance for conjugate pairing
    #[arg(long)]
    pub pairing_tolerance: Option<f64>,
    /// Half-width around f0 in which the split pair is sought, Hz
    #[arg(long)]
    pub selection_band: Option<f64>,
    /// Seconds to drop from the record start before processing
    #[arg(long)]
    pub trim_front: Option<f64>,
    /// Directory for intermediate-stage CSVs (single input only)
    #[arg(long, value_name = "DIR")]
    pub emit_stages: Option<PathBuf>,
    /// Output JSON file (single input; default stdout) or directory
    /// (several inputs; default: next to each input as <stem>.k.json)
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractQeArgs {
    /// Incident-voltage signal CSV
    #[arg(long, value_name = "FILE")]
    pub incident: PathBuf,
    /// Total-voltage signal CSV (same grid as the incident record)
    #[arg(long, value_name = "FILE")]
    pub total: PathBuf,
    /// Lower edge of the evaluation band, Hz
    #[arg(long)]
    pub f_min: Option<f64>,
    /// Upper edge of the evaluation band, Hz
    #[arg(long)]
    pub f_max: Option<f64>,
    /// Transform length (records are zero-padded up to it)
    #[arg(long)]
    pub nfft: Option<usize>,
    /// Reflection-spectrum CSV to write
    #[arg(long, value_name = "FILE")]
    pub spectrum_out: Option<PathBuf>,
    /// Output JSON file (default stdout)
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Low-pass prototype element values g0..g_{n+1}, comma separated
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub g: Vec<f64>,
    /// Center frequency, Hz
    #[arg(long)]
    pub fc: Option<f64>,
    /// Absolute bandwidth, Hz
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Output JSON file (default stdout)
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Monotone curve CSV (header x,y)
    #[arg(long, value_name = "FILE")]
    pub curve: PathBuf,
    /// Ordinate to invert at
    #[arg(long)]
    pub target: Option<f64>,
    /// Output JSON file (default stdout)
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Input signal CSV
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Ground-truth sidecar JSON (as written by `gen`)
    #[arg(long, value_name = "FILE")]
    pub truth: Option<PathBuf>,
    /// Correlation order m of the subspace estimator
    #[arg(long)]
    pub correlation_order: Option<usize>,
    /// Number of complex modes the subspace estimator extracts
    #[arg(long)]
    pub n_modes: Option<usize>,
    /// Relative tolerance for conjugate pairing
    #[arg(long)]
    pub pairing_tolerance: Option<f64>,
    /// Center of the band the counts are restricted to, Hz
    #[arg(long)]
    pub band_center: Option<f64>,
    /// Full width of that band, Hz
    #[arg(long)]
    pub band_width: Option<f64>,
    /// Periodogram length as a multiple of the record length
    #[arg(long)]
    pub nfft_factor: Option<usize>,
    /// Output JSON file (default stdout)
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}
