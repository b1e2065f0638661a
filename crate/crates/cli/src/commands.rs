//! Command implementations. Everything here works in `f64`, reads/writes
//! through `resonest::io`, and returns `resonest::Error` so `main` can map
//! failures onto the exit-code contract.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use resonest::extraction::{
    coupling_coefficient, external_q, extract_coupling_detailed, group_delay, s11_from_voltages,
    CouplingExtraction, KPipelineConfig,
};
use resonest::io::{read_curve_csv, read_signal_csv, write_signal_csv, write_spectrum_csv};
use resonest::signals::{gaussian_pulse, oracle_ode, oracle_two_tone, CoupledPairSpec, PulseSpec};
use resonest::spectral::{esprit, pair_to_real_modes, periodogram_peaks, EspritConfig};
use resonest::synthesis::{coupling_targets, FilterPrototype};
use resonest::{Error, Result, Signal64};

use crate::cli::{
    Cli, Command, CompareArgs, ExtractKArgs, ExtractQeArgs, GenCommand, GenOdeArgs, GenPulseArgs,
    GenTwoToneArgs, InvertArgs, SynthArgs,
};
use crate::config::{self, pick, require, ConfigFile};

/// Version stamped into every JSON result.
const SCHEMA: u32 = 1;

pub fn run(cli: Cli) -> Result<()> {
    let cfg = config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Gen(GenCommand::Pulse(args)) => gen_pulse(args, &cfg),
        Command::Gen(GenCommand::TwoTone(args)) => gen_two_tone(args, &cfg),
        Command::Gen(GenCommand::Ode(args)) => gen_ode(args, &cfg),
        Command::ExtractK(args) => extract_k(args, &cfg, cli.jobs),
        Command::ExtractQe(args) => extract_qe(args, &cfg),
        Command::Synth(args) => synth(args, &cfg),
        Command::Invert(args) => invert(args, &cfg),
        Command::Compare(args) => compare(args, &cfg),
    }
}

/// Writes pretty JSON to `output`, or to stdout when no path was given.
fn emit_json<V: Serialize>(output: Option<&Path>, value: &V) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidArgument(format!("serializing result: {e}")))?;
    match output {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn sidecar_path(output: &Path, sidecar: Option<PathBuf>) -> PathBuf {
    sidecar.unwrap_or_else(|| output.with_extension("json"))
}

fn gen_pulse(args: GenPulseArgs, cfg: &ConfigFile) -> Result<()> {
    let c = &cfg.gen.pulse;
    let fp = require(args.fp, c.fp, "fp")?;
    let dt = require(args.dt, c.dt, "dt")?;
    let n = require(args.n, c.n, "n")?;
    let pulse = gaussian_pulse(&PulseSpec::new(fp)?, dt, n)?;
    write_signal_csv(&args.output, &pulse)?;
    let sidecar = sidecar_path(&args.output, args.sidecar);
    emit_json(
        Some(&sidecar),
        &json!({ "schema": SCHEMA, "kind": "pulse", "fp_hz": fp, "dt_s": dt, "n": n }),
    )?;
    log::info!(
        "wrote {} samples to {} (ground truth in {})",
        n,
        args.output.display(),
        sidecar.display()
    );
    Ok(())
}

fn coupled_pair_spec(
    f0: f64,
    k: f64,
    damping: f64,
    amplitudes: Option<(f64, f64)>,
    phases: Option<(f64, f64)>,
) -> Result<CoupledPairSpec<f64>> {
    let mut spec = CoupledPairSpec::new(f0, k)?.with_damping(damping)?;
    if let Some((minus, plus)) = amplitudes {
        spec = spec.with_amplitudes(minus, plus)?;
    }
    if let Some((minus, plus)) = phases {
        spec = spec.with_phases(minus, plus)?;
    }
    Ok(spec)
}

fn split_sidecar(
    kind: &str,
    spec: &CoupledPairSpec<f64>,
    extra: serde_json::Value,
) -> serde_json::Value {
    let (f_minus, f_plus) = spec.split_frequencies();
    let mut value = json!({
        "schema": SCHEMA,
        "kind": kind,
        "f0_hz": spec.f0(),
        "k": spec.k(),
        "f_minus_hz": f_minus,
        "f_plus_hz": f_plus,
        "damping_per_s": spec.damping(),
    });
    if let (Some(obj), Some(more)) = (value.as_object_mut(), extra.as_object()) {
        for (key, v) in more {
            obj.insert(key.clone(), v.clone());
        }
    }
    value
}

fn gen_two_tone(args: GenTwoToneArgs, cfg: &ConfigFile) -> Result<()> {
    let c = &cfg.gen.two_tone;
    let f0 = require(args.f0, c.f0, "f0")?;
    let k = require(args.k, c.k, "k")?;
    let dt = require(args.dt, c.dt, "dt")?;
    let n = require(args.n, c.n, "n")?;
    let damping = pick(args.damping, c.damping, 0.0);
    let amplitudes = (
        pick(args.amplitude_minus, c.amplitude_minus, 1.0),
        pick(args.amplitude_plus, c.amplitude_plus, 1.0),
    );
    let phases = (
        pick(args.phase_minus, c.phase_minus, 0.0),
        pick(args.phase_plus, c.phase_plus, 0.0),
    );
    let spec = coupled_pair_spec(f0, k, damping, Some(amplitudes), Some(phases))?;
    let signal = oracle_two_tone(&spec, dt, n)?;
    write_signal_csv(&args.output, &signal)?;
    let sidecar = sidecar_path(&args.output, args.sidecar);
    emit_json(Some(&sidecar), &split_sidecar("two-tone", &spec, json!({})))?;
    log::info!(
        "wrote {} samples to {} (ground truth in {})",
        n,
        args.output.display(),
        sidecar.display()
    );
    Ok(())
}

fn gen_ode(args: GenOdeArgs, cfg: &ConfigFile) -> Result<()> {
    let c = &cfg.gen.ode;
    let f0 = require(args.f0, c.f0, "f0")?;
    let k = require(args.k, c.k, "k")?;
    let fp = require(args.fp, c.fp, "fp")?;
    let dt = require(args.dt, c.dt, "dt")?;
    let n = require(args.n, c.n, "n")?;
    let damping = pick(args.damping, c.damping, 0.0);
    let spec = coupled_pair_spec(f0, k, damping, None, None)?;
    let drive = gaussian_pulse(&PulseSpec::new(fp)?, dt, n)?;
    let signal = oracle_ode(&spec, dt, n, &drive)?;
    write_signal_csv(&args.output, &signal)?;
    let sidecar = sidecar_path(&args.output, args.sidecar);
    emit_json(
        Some(&sidecar),
        &split_sidecar("ode", &spec, json!({ "fp_hz": fp })),
    )?;
    Ok(())
}

/// JSON wrapper adding the schema version to a serializable payload.
#[derive(Serialize)]
struct Versioned<V: Serialize> {
    schema: u32,
    #[serde(flatten)]
    value: V,
}

fn versioned<V: Serialize>(value: V) -> Versioned<V> {
    Versioned {
        schema: SCHEMA,
        value,
    }
}

fn extract_k(args: ExtractKArgs, cfg: &ConfigFile, jobs: Option<usize>) -> Result<()> {
    let c = &cfg.extract_k;
    let mut pipeline: KPipelineConfig<f64> = KPipelineConfig::new(
        require(args.f0, c.f0, "f0")?,
        require(args.fp, c.fp, "fp")?,
        require(args.bandwidth, c.bandwidth, "bandwidth")?,
    );
    pipeline.alpha = pick(args.alpha, c.alpha, pipeline.alpha);
    pipeline.esprit.correlation_order = pick(
        args.correlation_order,
        c.correlation_order,
        pipeline.esprit.correlation_order,
    );
    pipeline.esprit.n_complex_modes =
        pick(args.n_modes, c.n_modes, pipeline.esprit.n_complex_modes);
    pipeline.esprit.pairing_tolerance = pick(
        args.pairing_tolerance,
        c.pairing_tolerance,
        pipeline.esprit.pairing_tolerance,
    );
    pipeline.band_for_selection = args.selection_band.or(c.selection_band);
    let trim = pick(args.trim_front, c.trim_front, 0.0);

    if args.inputs.len() == 1 {
        let detail = process_record(
            &args.inputs[0],
            &pipeline,
            trim,
            args.emit_stages.as_deref(),
        )?;
        return emit_json(args.output.as_deref(), &versioned(&detail.result));
    }

    if args.emit_stages.is_some() {
        return Err(Error::InvalidArgument(
            "--emit-stages works with a single --input; run the inputs separately".into(),
        ));
    }
    if let Some(dir) = &args.output {
        fs::create_dir_all(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("building the worker pool: {e}")))?;
    let results: Vec<(PathBuf, Result<()>)> = pool.install(|| {
        args.inputs
            .par_iter()
            .map(|input| {
                let out = match &args.output {
                    Some(dir) => {
                        let stem = input.file_stem().unwrap_or_default();
                        let mut name = stem.to_os_string();
                        name.push(".k.json");
                        dir.join(name)
                    }
                    None => input.with_extension("k.json"),
                };
                let one = process_record(input, &pipeline, trim, None)
                    .and_then(|detail| emit_json(Some(&out), &versioned(&detail.result)));
                (input.clone(), one)
            })
            .collect()
    });
    let mut first_failure = None;
    for (input, outcome) in results {
        if let Err(err) = outcome {
            log::error!("{}: {err}", input.display());
            if first_failure.is_none() {
                first_failure = Some(err);
            }
        }
    }
    match first_failure {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn process_record(
    input: &Path,
    pipeline: &KPipelineConfig<f64>,
    trim_front: f64,
    emit_stages: Option<&Path>,
) -> Result<CouplingExtraction<f64>> {
    let signal: Signal64 = read_signal_csv(input)?;
    let signal = if trim_front > 0.0 {
        signal.trim_front(trim_front)?
    } else {
        signal
    };
    let detail = extract_coupling_detailed(&signal, pipeline)?;
    if let Some(dir) = emit_stages {
        fs::create_dir_all(dir)?;
        write_signal_csv(dir.join("raw_decimated.csv"), &detail.stages.raw_decimated)?;
        write_signal_csv(dir.join("anti_aliased.csv"), &detail.stages.anti_aliased)?;
        write_signal_csv(dir.join("bandpassed.csv"), &detail.stages.bandpassed)?;
    }
    Ok(detail)
}

fn extract_qe(args: ExtractQeArgs, cfg: &ConfigFile) -> Result<()> {
    let c = &cfg.extract_qe;
    let f_min = require(args.f_min, c.f_min, "f-min")?;
    let f_max = require(args.f_max, c.f_max, "f-max")?;
    let nfft = pick(args.nfft, c.nfft, 16384);
    let incident: Signal64 = read_signal_csv(&args.incident)?;
    let total: Signal64 = read_signal_csv(&args.total)?;
    let spectrum = s11_from_voltages(&incident, &total, f_min, f_max, nfft)?;
    let with_delay = group_delay(&spectrum)?;
    let (q_e, f0) = external_q(&with_delay)?;
    if let Some(path) = &args.spectrum_out {
        write_spectrum_csv(path, &with_delay)?;
    }
    emit_json(
        args.output.as_deref(),
        &json!({ "schema": SCHEMA, "q_e": q_e, "f0_hz": f0 }),
    )
}

fn synth(args: SynthArgs, cfg: &ConfigFile) -> Result<()> {
    let c = &cfg.synth;
    let g = if args.g.is_empty() {
        c.g.clone().ok_or_else(|| {
            Error::InvalidArgument(
                "missing --g: pass the prototype values or set `g` in the config file".into(),
            )
        })?
    } else {
        args.g.clone()
    };
    let proto = FilterPrototype::new(
        g,
        require(args.fc, c.fc, "fc")?,
        require(args.bandwidth, c.bandwidth, "bandwidth")?,
    )?;
    let targets = coupling_targets(&proto);
    emit_json(
        args.output.as_deref(),
        &json!({
            "schema": SCHEMA,
            "delta": proto.fractional_bandwidth(),
            "q_e_in": targets.q_e_in,
            "q_e_out": targets.q_e_out,
            "k": targets.k,
        }),
    )
}

fn invert(args: InvertArgs, cfg: &ConfigFile) -> Result<()> {
    let target = require(args.target, cfg.invert.target, "target")?;
    let curve = read_curve_csv::<f64>(&args.curve)?;
    let x = curve.invert(target)?;
    emit_json(
        args.output.as_deref(),
        &json!({ "schema": SCHEMA, "target": target, "x": x }),
    )
}

/// Ground-truth sidecar as written by `gen two-tone` / `gen ode`.
#[derive(Debug, Deserialize)]
struct TruthSidecar {
    k: f64,
    f0_hz: f64,
    f_minus_hz: f64,
    f_plus_hz: f64,
}

#[derive(Serialize)]
struct ModeReport {
    frequency_hz: f64,
    damping_per_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
}

#[derive(Serialize)]
struct EspritReport {
    resolved: bool,
    modes: Vec<ModeReport>,
    orphan_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
}

#[derive(Serialize)]
struct PeriodogramReport {
    nfft: usize,
    resolved: bool,
    peaks_hz: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
}

#[derive(Serialize)]
struct TruthReport {
    k: f64,
    f0_hz: f64,
    f_minus_hz: f64,
    f_plus_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    esprit_error_rel: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    periodogram_error_rel: Option<f64>,
}

#[derive(Serialize)]
struct CompareReport {
    schema: u32,
    input: String,
    samples: usize,
    window_s: f64,
    /// Transform-limited resolution of the window, `1/(n*dt)`.
    rayleigh_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    band_hz: Option<[f64; 2]>,
    esprit: EspritReport,
    periodogram: PeriodogramReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<TruthReport>,
}

fn nearest(frequencies: &[f64], target: f64) -> Option<(usize, f64)> {
    frequencies.iter().copied().enumerate().min_by(|a, b| {
        (a.1 - target)
            .abs()
            .partial_cmp(&(b.1 - target).abs())
            .expect("finite frequencies")
    })
}

/// Coupling estimate from a frequency list: the entries nearest the true
/// split frequencies, provided they are distinct.
fn k_from_frequencies(frequencies: &[f64], truth: &TruthSidecar) -> Option<f64> {
    let (i_lo, f_lo) = nearest(frequencies, truth.f_minus_hz)?;
    let (i_hi, f_hi) = nearest(frequencies, truth.f_plus_hz)?;
    if i_lo == i_hi {
        return None;
    }
    coupling_coefficient(f_lo.min(f_hi), f_lo.max(f_hi)).ok()
}

/// Relative error of an estimator against the sidecar: on k when the pair is
/// split, on the single frequency when k = 0.
fn error_against_truth(frequencies: &[f64], truth: &TruthSidecar) -> Option<f64> {
    if truth.k > 0.0 {
        k_from_frequencies(frequencies, truth).map(|k_hat| (k_hat - truth.k).abs() / truth.k)
    } else {
        nearest(frequencies, truth.f0_hz)
            .map(|(_, f_hat)| (f_hat - truth.f0_hz).abs() / truth.f0_hz)
    }
}

fn compare(args: CompareArgs, cfg: &ConfigFile) -> Result<()> {
    let c = &cfg.compare;
    let signal: Signal64 = read_signal_csv(&args.input)?;
    let defaults: EspritConfig<f64> = EspritConfig::default();
    let esprit_cfg = EspritConfig {
        correlation_order: pick(
            args.correlation_order,
            c.correlation_order,
            defaults.correlation_order,
        ),
        n_complex_modes: pick(args.n_modes, c.n_modes, defaults.n_complex_modes),
        pairing_tolerance: pick(
            args.pairing_tolerance,
            c.pairing_tolerance,
            defaults.pairing_tolerance,
        ),
        ..defaults
    };
    let nfft_factor = pick(args.nfft_factor, c.nfft_factor, 16);

    let truth: Option<TruthSidecar> = match &args.truth {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            Some(serde_json::from_str(&text).map_err(|e| {
                Error::InvalidArgument(format!("truth sidecar {}: {e}", path.display()))
            })?)
        }
        None => None,
    };

    let band = match (
        args.band_center.or(c.band_center),
        args.band_width.or(c.band_width),
    ) {
        (Some(center), Some(width)) => Some([center - width / 2.0, center + width / 2.0]),
        (Some(_), None) | (None, Some(_)) => {
            return Err(Error::InvalidArgument(
                "--band-center and --band-width go together".into(),
            ));
        }
        (None, None) => None,
    };
    let in_band = |f: f64| band.map_or(true, |[lo, hi]| (lo..=hi).contains(&f));

    let estimates = esprit(&signal, &esprit_cfg)?;
    let paired = pair_to_real_modes(&estimates, esprit_cfg.pairing_tolerance)?;
    let modes: Vec<ModeReport> = paired
        .modes
        .iter()
        .filter(|m| in_band(m.frequency))
        .map(|m| ModeReport {
            frequency_hz: m.frequency,
            damping_per_s: m.damping,
            amplitude: m.amplitude,
        })
        .collect();
    let mode_freqs: Vec<f64> = modes.iter().map(|m| m.frequency_hz).collect();

    let nfft = nfft_factor.max(1) * signal.len();
    let peaks_hz: Vec<f64> = periodogram_peaks(&signal, nfft)
        .into_iter()
        .map(|(f, _)| f)
        .filter(|&f| in_band(f))
        .collect();

    let k_esprit = truth
        .as_ref()
        .and_then(|t| k_from_frequencies(&mode_freqs, t));
    let k_periodogram = truth
        .as_ref()
        .and_then(|t| k_from_frequencies(&peaks_hz, t));
    let truth_report = truth.map(|t| TruthReport {
        esprit_error_rel: error_against_truth(&mode_freqs, &t),
        periodogram_error_rel: error_against_truth(&peaks_hz, &t),
        k: t.k,
        f0_hz: t.f0_hz,
        f_minus_hz: t.f_minus_hz,
        f_plus_hz: t.f_plus_hz,
    });

    let window_s = signal.len() as f64 * signal.dt();
    let report = CompareReport {
        schema: SCHEMA,
        input: args.input.display().to_string(),
        samples: signal.len(),
        window_s,
        rayleigh_hz: 1.0 / window_s,
        band_hz: band,
        esprit: EspritReport {
            resolved: mode_freqs.len() >= 2,
            k: k_esprit,
            modes,
            orphan_count: paired.orphans.len(),
        },
        periodogram: PeriodogramReport {
            nfft,
            resolved: peaks_hz.len() >= 2,
            k: k_periodogram,
            peaks_hz,
        },
        truth: truth_report,
    };
    emit_json(args.output.as_deref(), &report)
}
