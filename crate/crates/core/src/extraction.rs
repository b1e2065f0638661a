//! End-to-end extraction pipelines: the multirate + subspace chain that
//! turns a raw time-domain voltage record into an inter-resonator coupling
//! coefficient, and the reflection-spectrum chain that turns incident/total
//! voltage records into an external quality factor via group delay.

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::dsp::{
    apply_fir, decimate_filtered, decimate_raw, design_lowpass, gaussian_bandpass, plan_decimation,
};
use crate::error::{Error, Result};
use crate::num::{as_f64, lit, litn, Real};
use crate::signals::UniformSignal;
use crate::spectral::{
    esprit, pair_to_real_modes, select_split_pair, ComplexFrequencyEstimate, EspritConfig,
    RealModeEstimate,
};

/// Stop attenuation of the pipeline's anti-alias lowpass, dB.
const AAF_STOP_DB: f64 = 80.0;

/// AAF cutoff as a fraction of the post-decimation rate.
const AAF_CUTOFF_FRACTION: f64 = 0.45;

/// Relative spectral floor below which the excitation cannot normalize a
/// reflection measurement.
const SPECTRUM_FLOOR_REL: f64 = 1e-9;

/// Configuration of the coupling-extraction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct KPipelineConfig<T> {
    /// Resonance frequency of the (uncoupled) resonators, Hz.
    pub f0: T,
    /// Center frequency of the excitation pulse, Hz.
    pub fp: T,
    /// Design bandwidth B, Hz; the bandpass width is alpha·B.
    pub bandwidth: T,
    /// Bandpass width multiplier; 2..=5 is the reasonable range (values
    /// outside it are accepted with a warning). Default 5.
    pub alpha: T,
    /// Subspace estimator settings.
    pub esprit: EspritConfig<T>,
    /// Half-width of the window around f0 in which the split pair is sought;
    /// `None` selects the default 3·alpha·B.
    pub band_for_selection: Option<T>,
}

impl<T: Real> KPipelineConfig<T> {
    pub fn new(f0: T, fp: T, bandwidth: T) -> Self {
        Self {
            f0,
            fp,
            bandwidth,
            alpha: lit(5.0),
            esprit: EspritConfig::default(),
            band_for_selection: None,
        }
    }

    /// Bandpass envelope width f̃ = alpha·B.
    pub fn f_tilde(&self) -> T {
        self.alpha * self.bandwidth
    }

    /// Mode-selection half-width around f0.
    pub fn selection_band(&self) -> T {
        self.band_for_selection
            .unwrap_or_else(|| lit::<T>(3.0) * self.alpha * self.bandwidth)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("f0", self.f0),
            ("fp", self.fp),
            ("bandwidth", self.bandwidth),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.alpha.is_finite() && self.alpha > T::zero()) {
            return Err(Error::invalid(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.alpha < lit(2.0) || self.alpha > lit(5.0) {
            log::warn!(
                "bandpass width multiplier alpha = {} is outside the reasonable range [2, 5]",
                self.alpha
            );
        }
        if let Some(band) = self.band_for_selection {
            if !(band.is_finite() && band > T::zero()) {
                return Err(Error::invalid(format!(
                    "selection band must be positive, got {band}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-stage record of what the pipeline actually did.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineDiagnostics<T> {
    pub input_rate_hz: T,
    pub input_samples: usize,
    pub stage1_factor: usize,
    pub stage1_rate_hz: T,
    pub stage2_factor: usize,
    pub stage2_rate_hz: T,
    /// Anti-alias filter length; `None` when stage 2 was an identity.
    pub anti_alias_taps: Option<usize>,
    pub bandpass_taps: usize,
    pub samples_after_decimation: usize,
    pub samples_after_bandpass: usize,
    /// Every complex-frequency estimate the subspace step produced.
    pub estimates: Vec<ComplexFrequencyEstimate<T>>,
    /// Real modes after conjugate pairing.
    pub modes: Vec<RealModeEstimate<T>>,
    /// Estimates that found no conjugate partner.
    pub orphans: Vec<ComplexFrequencyEstimate<T>>,
}

/// Result of the coupling extraction. Serializes with explicit Hz-suffixed
/// field names (`f_minus_hz`, `f_plus_hz`, `k`, `diagnostics`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingResult<T> {
    #[serde(rename = "f_minus_hz")]
    pub f_minus: T,
    #[serde(rename = "f_plus_hz")]
    pub f_plus: T,
    pub k: T,
    #[serde(rename = "diagnostics")]
    pub stages: PipelineDiagnostics<T>,
}

/// The intermediate signals of one pipeline run, for inspection or export.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineStages<T> {
    /// After the raw (unfiltered) decimation toward 10·fp.
    pub raw_decimated: UniformSignal<T>,
    /// After the anti-alias-filtered decimation toward 4·f0.
    pub anti_aliased: UniformSignal<T>,
    /// After the Gaussian bandpass around f0.
    pub bandpassed: UniformSignal<T>,
}

/// A coupling extraction together with its intermediate signals.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingExtraction<T> {
    pub result: CouplingResult<T>,
    pub stages: PipelineStages<T>,
}

/// Coupling coefficient of a split resonance pair:
/// K = (f₊² − f₋²)/(f₊² + f₋²).
pub fn coupling_coefficient<T: Real>(f_minus: T, f_plus: T) -> Result<T> {
    if !(f_minus.is_finite() && f_minus > T::zero()) {
        return Err(Error::invalid(format!(
            "f_minus must be positive, got {f_minus}"
        )));
    }
    if !(f_plus.is_finite() && f_plus >= f_minus) {
        return Err(Error::invalid(format!(
            "f_plus must be at least f_minus = {f_minus}, got {f_plus}"
        )));
    }
    let (lo2, hi2) = (f_minus * f_minus, f_plus * f_plus);
    Ok((hi2 - lo2) / (hi2 + lo2))
}

/// Runs the full coupling pipeline and returns the result with its
/// intermediate signals: raw decimation toward 10·fp, anti-alias-filtered
/// decimation toward 4·f0, Gaussian bandpass around f0, subspace estimation,
/// conjugate pairing, split-pair selection, and the coupling formula.
pub fn extract_coupling_detailed<T: Real>(
    signal: &UniformSignal<T>,
    config: &KPipelineConfig<T>,
) -> Result<CouplingExtraction<T>> {
    config.validate()?;
    let rate = signal.sample_rate();
    let min_rate = lit::<T>(20.0) * config.fp;
    if as_f64(rate) < as_f64(min_rate) * (1.0 - 1e-9) {
        return Err(Error::invalid(format!(
            "record sampled at {rate} Hz is below 20x the pulse center {} Hz; \
             the pipeline needs that margin for the raw decimation stage",
            config.fp
        )));
    }
    let m = config.esprit.correlation_order;

    let plan = plan_decimation(rate, config.fp, config.f0)?;
    let raw_decimated = decimate_raw(signal, plan.stage1_factor())?;

    // Predict the post-decimation length up front so a too-short record is
    // reported in these terms before any convolution is attempted.
    let too_short = |remaining: usize| {
        Error::invalid(format!(
            "only {remaining} samples would remain after decimation to \
             {} Hz; the subspace step wants at least 4m = {} — use a longer record \
             or a smaller correlation order",
            plan.stage2_rate(),
            4 * m
        ))
    };
    let (anti_aliased, anti_alias_taps) = if plan.stage2_factor() == 1 {
        if raw_decimated.len() < 4 * m {
            return Err(too_short(raw_decimated.len()));
        }
        (raw_decimated.clone(), None)
    } else {
        let cutoff = lit::<T>(AAF_CUTOFF_FRACTION) * plan.stage2_rate();
        let aaf = design_lowpass(plan.stage1_rate(), cutoff, lit::<T>(AAF_STOP_DB))?;
        let taps = aaf.len();
        let factor = plan.stage2_factor();
        let valid = (raw_decimated.len() + 1).saturating_sub(taps);
        let predicted = valid.div_ceil(factor);
        if predicted < 4 * m {
            return Err(too_short(predicted));
        }
        (decimate_filtered(&raw_decimated, factor, &aaf)?, Some(taps))
    };
    let samples_after_decimation = anti_aliased.len();

    let bandpass = gaussian_bandpass(config.f0, config.f_tilde(), anti_aliased.sample_rate())?;
    let bandpassed = apply_fir(&anti_aliased, &bandpass)?;
    if bandpassed.len() < 4 * m {
        log::warn!(
            "bandpass edge trimming left {} samples, below the comfortable 4m = {}; \
             estimates degrade gracefully down to the hard floor of 2m",
            bandpassed.len(),
            4 * m
        );
    }

    let estimates = esprit(&bandpassed, &config.esprit)?;
    let paired = pair_to_real_modes(&estimates, config.esprit.pairing_tolerance)?;
    let (f_minus, f_plus) = select_split_pair(&paired.modes, config.f0, config.selection_band())?;
    let k = coupling_coefficient(f_minus, f_plus)?;

    let result = CouplingResult {
        f_minus,
        f_plus,
        k,
        stages: PipelineDiagnostics {
            input_rate_hz: rate,
            input_samples: signal.len(),
            stage1_factor: plan.stage1_factor(),
            stage1_rate_hz: plan.stage1_rate(),
            stage2_factor: plan.stage2_factor(),
            stage2_rate_hz: plan.stage2_rate(),
            anti_alias_taps,
            bandpass_taps: bandpass.len(),
            samples_after_decimation,
            samples_after_bandpass: bandpassed.len(),
            estimates,
            modes: paired.modes,
            orphans: paired.orphans,
        },
    };
    Ok(CouplingExtraction {
        result,
        stages: PipelineStages {
            raw_decimated,
            anti_aliased,
            bandpassed,
        },
    })
}

/// [`extract_coupling_detailed`] without the intermediate signals.
pub fn extract_coupling<T: Real>(
    signal: &UniformSignal<T>,
    config: &KPipelineConfig<T>,
) -> Result<CouplingResult<T>> {
    Ok(extract_coupling_detailed(signal, config)?.result)
}

/// A one-port reflection spectrum on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSpectrum<T> {
    frequencies: Vec<T>,
    s11: Vec<Complex<T>>,
    group_delay: Option<Vec<T>>,
}

impl<T: Real> ReflectionSpectrum<T> {
    /// Builds a spectrum, validating that the grid is strictly increasing
    /// and uniform within 1 ppm. Reflection magnitudes above 1.05 draw a
    /// warning (passive data should stay at or below 1) but are accepted.
    pub fn new(
        frequencies: Vec<T>,
        s11: Vec<Complex<T>>,
        group_delay: Option<Vec<T>>,
    ) -> Result<Self> {
        if frequencies.len() != s11.len() {
            return Err(Error::invalid(format!(
                "{} frequencies but {} reflection values",
                frequencies.len(),
                s11.len()
            )));
        }
        if frequencies.is_empty() {
            return Err(Error::invalid("spectrum needs at least one point"));
        }
        if let Some(gd) = &group_delay {
            if gd.len() != frequencies.len() {
                return Err(Error::invalid(format!(
                    "{} group-delay values for {} grid points",
                    gd.len(),
                    frequencies.len()
                )));
            }
        }
        if frequencies.iter().any(|f| !f.is_finite())
            || s11.iter().any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::invalid("spectrum values must be finite"));
        }
        if frequencies.len() > 1 {
            let df = frequencies[1] - frequencies[0];
            if !(df.is_finite() && df > T::zero()) {
                return Err(Error::invalid("frequency grid must be strictly increasing"));
            }
            for w in frequencies.windows(2) {
                let step = w[1] - w[0];
                if (as_f64(step) - as_f64(df)).abs() > 1e-6 * as_f64(df) {
                    return Err(Error::invalid(format!(
                        "frequency grid is not uniform: step {step} differs from {df}"
                    )));
                }
            }
        }
        let max_mag = s11.iter().map(|v| v.norm()).fold(T::zero(), T::max);
        if max_mag > lit(1.05) {
            log::warn!(
                "reflection magnitude reaches {max_mag}; passive one-port data should stay near or below 1"
            );
        }
        Ok(Self {
            frequencies,
            s11,
            group_delay,
        })
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    pub fn s11(&self) -> &[Complex<T>] {
        &self.s11
    }

    pub fn group_delay(&self) -> Option<&[T]> {
        self.group_delay.as_deref()
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty grids
    }
}

/// Reflection coefficient from time-domain voltage records:
/// S₁₁(f) = F(v_tot − v_inc)/F(v_inc) on the transform grid restricted to
/// [fmin, fmax]. The shorter record is zero-padded to the longer; both are
/// zero-padded to `nfft` (raised to the record length if below it).
pub fn s11_from_voltages<T: Real>(
    v_inc: &UniformSignal<T>,
    v_tot: &UniformSignal<T>,
    fmin: T,
    fmax: T,
    nfft: usize,
) -> Result<ReflectionSpectrum<T>> {
    if !v_inc.same_grid(v_tot) {
        return Err(Error::invalid(format!(
            "voltage records must share the time grid: dt {} vs {}, t0 {} vs {}",
            v_inc.dt(),
            v_tot.dt(),
            v_inc.t0(),
            v_tot.t0()
        )));
    }
    let fs = v_inc.sample_rate();
    let nyquist = fs / lit::<T>(2.0);
    if !(fmin.is_finite() && fmax.is_finite() && T::zero() <= fmin && fmin < fmax) {
        return Err(Error::invalid(format!(
            "need 0 <= fmin < fmax, got fmin = {fmin}, fmax = {fmax}"
        )));
    }
    if fmax > nyquist {
        return Err(Error::invalid(format!(
            "fmax = {fmax} Hz exceeds the record's Nyquist rate {nyquist} Hz"
        )));
    }
    let n = v_inc.len().max(v_tot.len());
    let nfft = nfft.max(n);
    let zero = Complex::new(T::zero(), T::zero());
    let mut num = vec![zero; nfft];
    let mut den = vec![zero; nfft];
    for i in 0..n {
        let inc = v_inc.samples().get(i).copied().unwrap_or_else(T::zero);
        let tot = v_tot.samples().get(i).copied().unwrap_or_else(T::zero);
        num[i] = Complex::new(tot - inc, T::zero());
        den[i] = Complex::new(inc, T::zero());
    }
    let fft = FftPlanner::new().plan_fft_forward(nfft);
    fft.process(&mut num);
    fft.process(&mut den);
    let df = as_f64(fs) / nfft as f64;
    let k_lo = (as_f64(fmin) / df).ceil() as usize;
    let k_hi = (as_f64(fmax) / df).floor() as usize;
    let k_hi = k_hi.min(nfft / 2);
    if k_hi < k_lo + 2 {
        return Err(Error::invalid(format!(
            "band [{fmin}, {fmax}] Hz covers fewer than 3 transform bins (bin width {df} Hz); \
             raise nfft or widen the band"
        )));
    }
    let peak = den[..=nfft / 2]
        .iter()
        .map(|c| c.norm())
        .fold(T::zero(), T::max);
    let floor = peak * lit::<T>(SPECTRUM_FLOOR_REL);
    let offending: Vec<f64> = (k_lo..=k_hi)
        .filter(|&k| den[k].norm() < floor)
        .map(|k| k as f64 * df)
        .collect();
    if !offending.is_empty() {
        return Err(Error::SpectrumUnderflow {
            threshold_rel: SPECTRUM_FLOOR_REL,
            offending_hz: offending,
        });
    }
    let mut frequencies = Vec::with_capacity(k_hi - k_lo + 1);
    let mut s11 = Vec::with_capacity(k_hi - k_lo + 1);
    for k in k_lo..=k_hi {
        frequencies.push(litn::<T>(k) * fs / litn::<T>(nfft));
        s11.push(num[k] / den[k]);
    }
    ReflectionSpectrum::new(frequencies, s11, None)
}

/// Fills in the group delay τ_g(f) = −(1/2π)·dφ/df, with the reflection
/// phase unwrapped at π-jump threshold and differentiated by central
/// differences (one-sided at the band edges).
pub fn group_delay<T: Real>(spectrum: &ReflectionSpectrum<T>) -> Result<ReflectionSpectrum<T>> {
    let n = spectrum.len();
    if n < 3 {
        return Err(Error::invalid(format!(
            "group delay needs at least 3 grid points, got {n}"
        )));
    }
    let two_pi = T::PI() + T::PI();
    let mut phase = Vec::with_capacity(n);
    let mut offset = T::zero();
    let mut prev = spectrum.s11[0].arg();
    phase.push(prev);
    let mut rough_steps = 0usize;
    for v in &spectrum.s11[1..] {
        let raw = v.arg();
        let mut step = raw - prev;
        while step > T::PI() {
            step -= two_pi;
            offset -= two_pi;
        }
        while step < -T::PI() {
            step += two_pi;
            offset += two_pi;
        }
        if step.abs() > T::PI() / lit::<T>(2.0) {
            rough_steps += 1;
        }
        phase.push(raw + offset);
        prev = raw;
    }
    if rough_steps * 10 > n - 1 {
        log::warn!(
            "{rough_steps} of {} phase steps exceed pi/2: the frequency grid may be too \
             coarse for reliable unwrapping",
            n - 1
        );
    }
    let f = &spectrum.frequencies;
    let mut tau = Vec::with_capacity(n);
    for i in 0..n {
        let (dphi, df) = if i == 0 {
            (phase[1] - phase[0], f[1] - f[0])
        } else if i == n - 1 {
            (phase[n - 1] - phase[n - 2], f[n - 1] - f[n - 2])
        } else {
            (phase[i + 1] - phase[i - 1], f[i + 1] - f[i - 1])
        };
        tau.push(-dphi / (two_pi * df));
    }
    ReflectionSpectrum::new(
        spectrum.frequencies.clone(),
        spectrum.s11.clone(),
        Some(tau),
    )
}

/// External quality factor from the group-delay peak:
/// Q_e = ω₀·τ_g(ω₀)/4, with ω₀ refined by 3-point parabolic interpolation
/// around the interior maximum of τ_g.
pub fn external_q<T: Real>(spectrum: &ReflectionSpectrum<T>) -> Result<(T, T)> {
    let tau = spectrum.group_delay.as_ref().ok_or_else(|| {
        Error::invalid("external Q needs the group delay: call group_delay first")
    })?;
    let n = tau.len();
    if n < 3 {
        return Err(Error::invalid("external Q needs at least 3 grid points"));
    }
    let mut imax = 0usize;
    for (i, &t) in tau.iter().enumerate() {
        if t > tau[imax] {
            imax = i;
        }
    }
    if imax == 0 || imax == n - 1 {
        return Err(Error::invalid(format!(
            "group-delay maximum sits at the band edge ({} Hz): widen the band so the \
             resonance peak is interior",
            spectrum.frequencies[imax]
        )));
    }
    let (a, b, c) = (tau[imax - 1], tau[imax], tau[imax + 1]);
    let curvature = a - b - b + c;
    let delta = if curvature < T::zero() {
        (lit::<T>(0.5) * (a - c) / curvature)
            .max(lit(-0.5))
            .min(lit(0.5))
    } else {
        T::zero()
    };
    let df = spectrum.frequencies[1] - spectrum.frequencies[0];
    let f_hat = spectrum.frequencies[imax] + delta * df;
    let tau_hat = b - lit::<T>(0.25) * (a - c) * delta;
    if !(tau_hat.is_finite() && tau_hat > T::zero()) {
        return Err(Error::invalid(format!(
            "group-delay peak {tau_hat} s is not positive: no resonance in band"
        )));
    }
    let two_pi = T::PI() + T::PI();
    let q_e = two_pi * f_hat * tau_hat / lit::<T>(4.0);
    Ok((q_e, f_hat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{gaussian_pulse, oracle_two_tone, CoupledPairSpec, PulseSpec};
    use approx::assert_relative_eq;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn coupling_formula_examples() {
        assert_eq!(coupling_coefficient(1e9, 1e9).unwrap(), 0.0);
        let k: f64 = coupling_coefficient(3.32e9, 4.06e9).unwrap();
        assert!((k - 0.1985).abs() < 1e-4, "K = {k}");
        assert!(coupling_coefficient(-1.0, 1e9).is_err());
        assert!(coupling_coefficient(2e9, 1e9).is_err());
    }

    #[test]
    fn coupling_formula_inverts_the_split_identity() {
        for &k in &[0.001, 0.005, 0.05, 0.07, 0.2, 0.5, 0.9] {
            let spec = CoupledPairSpec::new(2.2e9, k).unwrap();
            let (lo, hi) = spec.split_frequencies();
            let got = coupling_coefficient(lo, hi).unwrap();
            assert_relative_eq!(got, k, max_relative = 1e-12);
        }
    }

    #[test]
    fn coupling_formula_is_scale_invariant() {
        let (lo, hi) = (3.333e9, 4.077e9);
        let base = coupling_coefficient(lo, hi).unwrap();
        for &s in &[1e-6, 0.3, 7.0, 1e6] {
            let scaled = coupling_coefficient(lo * s, hi * s).unwrap();
            assert_relative_eq!(scaled, base, max_relative = 1e-14);
        }
    }

    /// §III.B-style setup: slow resonator, long record, wide alpha.
    fn narrowband_config() -> KPipelineConfig<f64> {
        KPipelineConfig::new(0.965e9, 5e9, 20e6)
    }

    fn narrowband_record(k: f64, seconds: f64) -> UniformSignal<f64> {
        let fs = 400e9;
        let n = (seconds * fs).round() as usize;
        let spec = CoupledPairSpec::new(0.965e9, k).unwrap();
        oracle_two_tone(&spec, 1.0 / fs, n).unwrap()
    }

    #[test]
    fn pipeline_recovers_narrowband_coupling_within_one_percent() {
        let config = narrowband_config();
        let signal = narrowband_record(0.02, 100e-9);
        let result = extract_coupling(&signal, &config).unwrap();
        assert_relative_eq!(result.k, 0.02, max_relative = 1e-2);
        // The result's own split frequencies reproduce k through the formula.
        let again = coupling_coefficient(result.f_minus, result.f_plus).unwrap();
        assert_relative_eq!(again, result.k, max_relative = 1e-12);
        assert!(result.f_minus < result.f_plus);
        // Diagnostics recorded the whole chain.
        let d = &result.stages;
        assert_eq!(d.stage1_factor, 8);
        assert_eq!(d.stage2_factor, 12);
        assert!(d.anti_alias_taps.is_some());
        assert_eq!(d.estimates.len(), 4);
        assert_eq!(d.modes.len(), 2);
    }

    #[test]
    fn pipeline_handles_wideband_split_in_a_short_window() {
        // §III.C-style setup: strong coupling, 10 ns record, narrow alpha.
        // The tight budget leaves ~22 post-bandpass samples, so the
        // correlation order must come down accordingly.
        let mut config = KPipelineConfig::new(3.75e9, 10e9, 350e6);
        config.alpha = 2.0;
        config.esprit.correlation_order = 10;
        let fs = 400e9;
        let n = (10e-9 * fs) as usize;
        let spec = CoupledPairSpec::new(3.75e9, 0.1).unwrap();
        let signal = oracle_two_tone(&spec, 1.0 / fs, n).unwrap();
        let result = extract_coupling(&signal, &config).unwrap();
        assert_relative_eq!(result.k, 0.1, max_relative = 2e-2);
    }

    #[test]
    fn pipeline_rejects_contamination_at_double_frequency() {
        let config = narrowband_config();
        let clean = narrowband_record(0.02, 100e-9);
        // Interfering tone at 2·f0 with amplitude equal to the record peak.
        let peak = clean.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let f2 = 2.0 * 0.965e9;
        let dt = clean.dt();
        let samples: Vec<f64> = clean
            .samples()
            .iter()
            .enumerate()
            .map(|(i, &v)| v + peak * (TWO_PI * f2 * i as f64 * dt).cos())
            .collect();
        let dirty = UniformSignal::new(samples, dt).unwrap();
        let result = extract_coupling(&dirty, &config).unwrap();
        assert_relative_eq!(result.k, 0.02, max_relative = 2e-2);
    }

    #[test]
    fn pipeline_enforces_rate_and_length_preconditions() {
        let config = narrowband_config();
        // Rate below 20x fp.
        let slow = {
            let spec = CoupledPairSpec::new(0.965e9, 0.02).unwrap();
            oracle_two_tone(&spec, 1.0 / 80e9, 4000).unwrap()
        };
        assert!(extract_coupling(&slow, &config).is_err());
        // Record too short to leave 4m samples after decimation.
        let short = narrowband_record(0.02, 5e-9);
        match extract_coupling(&short, &config) {
            Err(Error::InvalidArgument(msg)) => {
                assert!(msg.contains("after decimation"), "message: {msg}")
            }
            other => panic!("expected invalid-argument, got {other:?}"),
        }
    }

    #[test]
    fn pipeline_stage_signals_are_consistent() {
        let config = narrowband_config();
        let signal = narrowband_record(0.05, 100e-9);
        let detailed = extract_coupling_detailed(&signal, &config).unwrap();
        let d = &detailed.result.stages;
        assert_eq!(
            detailed.stages.raw_decimated.len(),
            signal.len() / d.stage1_factor
        );
        assert_eq!(
            detailed.stages.anti_aliased.len(),
            d.samples_after_decimation
        );
        assert_eq!(detailed.stages.bandpassed.len(), d.samples_after_bandpass);
        assert_relative_eq!(
            detailed.stages.bandpassed.sample_rate(),
            d.stage2_rate_hz,
            max_relative = 1e-12
        );
        // JSON field names are part of the interface.
        let json = serde_json::to_value(&detailed.result).unwrap();
        for key in ["f_minus_hz", "f_plus_hz", "k", "diagnostics"] {
            assert!(json.get(key).is_some(), "missing field {key}");
        }
    }

    /// Incident pulse plus a delayed copy: S11 is a pure phase e^{−i2πfτ}.
    fn delay_pair(delay_samples: usize) -> (UniformSignal<f64>, UniformSignal<f64>) {
        let fs = 40e9;
        let dt = 1.0 / fs;
        let n = 4096;
        let pulse = gaussian_pulse(&PulseSpec::new(2e9).unwrap(), dt, n).unwrap();
        let inc = pulse.samples().to_vec();
        let tot: Vec<f64> = (0..n)
            .map(|i| {
                inc[i]
                    + if i >= delay_samples {
                        inc[i - delay_samples]
                    } else {
                        0.0
                    }
            })
            .collect();
        (
            UniformSignal::new(inc, dt).unwrap(),
            UniformSignal::new(tot, dt).unwrap(),
        )
    }

    #[test]
    fn s11_trivial_identities() {
        let (inc, _) = delay_pair(0);
        let spec = s11_from_voltages(&inc, &inc, 0.5e9, 4e9, 8192).unwrap();
        assert!(spec.s11().iter().all(|v| v.norm() == 0.0));
        let doubled = inc.scaled(2.0);
        let spec = s11_from_voltages(&inc, &doubled, 0.5e9, 4e9, 8192).unwrap();
        for v in spec.s11() {
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn s11_of_delayed_copy_has_unit_magnitude_and_linear_phase() {
        let delay_samples = 37;
        let (inc, tot) = delay_pair(delay_samples);
        let tau = delay_samples as f64 * inc.dt();
        for nfft in [4 * 4096, 16 * 4096] {
            let spec = s11_from_voltages(&inc, &tot, 0.5e9, 4e9, nfft).unwrap();
            for v in spec.s11() {
                assert_relative_eq!(v.norm(), 1.0, max_relative = 1e-9);
            }
            let with_delay = group_delay(&spec).unwrap();
            for (&f, &tg) in with_delay
                .frequencies()
                .iter()
                .zip(with_delay.group_delay().unwrap())
            {
                assert_relative_eq!(tg, tau, max_relative = 1e-6);
                let _ = f;
            }
        }
    }

    #[test]
    fn s11_flags_denominator_underflow_with_frequencies() {
        let fs = 40e9;
        let dt = 1.0 / fs;
        // A Gaussian buried mid-record decays to exact zero at both edges, so
        // its spectrum at 8 GHz is pure rounding noise. (A pulse launched at
        // t = 0 would not do: its onset step floors the spectrum near
        // exp(-2*pi)/(2*pi*f*dt) relative — far above the underflow floor.)
        let sigma = 1.4e-9;
        let center = 4096.0 / 2.0 * dt;
        let samples: Vec<f64> = (0..4096)
            .map(|i| {
                let t = i as f64 * dt - center;
                (-0.5 * (t / sigma).powi(2)).exp()
            })
            .collect();
        let pulse = UniformSignal::new(samples, dt).unwrap();
        let tot = pulse.scaled(2.0);
        match s11_from_voltages(&pulse, &tot, 8e9, 9e9, 8192) {
            Err(Error::SpectrumUnderflow {
                offending_hz,
                threshold_rel,
            }) => {
                assert!(!offending_hz.is_empty());
                assert!(offending_hz.iter().all(|&f| (8e9..=9e9).contains(&f)));
                assert_relative_eq!(threshold_rel, 1e-9);
            }
            other => panic!("expected spectrum underflow, got {other:?}"),
        }
    }

    #[test]
    fn s11_rejects_mismatched_grids_and_bad_bands() {
        let (inc, tot) = delay_pair(10);
        let offset = UniformSignal::with_origin(tot.samples().to_vec(), tot.dt(), 1e-9).unwrap();
        assert!(s11_from_voltages(&inc, &offset, 1e9, 2e9, 8192).is_err());
        assert!(s11_from_voltages(&inc, &tot, 2e9, 1e9, 8192).is_err());
        assert!(s11_from_voltages(&inc, &tot, 1e9, 21e9, 8192).is_err());
    }

    #[test]
    fn constant_phase_spectrum_has_zero_delay() {
        let freqs: Vec<f64> = (0..64).map(|i| 1e9 + i as f64 * 1e6).collect();
        let vals = vec![Complex::new(0.3, -0.4); 64];
        let spec = ReflectionSpectrum::new(freqs, vals, None).unwrap();
        let with_delay = group_delay(&spec).unwrap();
        assert!(with_delay.group_delay().unwrap().iter().all(|&t| t == 0.0));
    }

    /// One-port reflection of a resonator with external quality factor q:
    /// S11 = −(1 − j·a)/(1 + j·a), a = 2·q·(f − f0)/f0. Unit magnitude
    /// everywhere; group delay peaks at 4·q/ω0 on resonance.
    fn resonator_spectrum(f0: f64, q: f64, n: usize, span: f64) -> ReflectionSpectrum<f64> {
        let freqs: Vec<f64> = (0..n)
            .map(|i| f0 - span / 2.0 + span * i as f64 / (n - 1) as f64)
            .collect();
        let vals: Vec<Complex<f64>> = freqs
            .iter()
            .map(|&f| {
                let a = 2.0 * q * (f - f0) / f0;
                -(Complex::new(1.0, -a)) / Complex::new(1.0, a)
            })
            .collect();
        ReflectionSpectrum::new(freqs, vals, None).unwrap()
    }

    #[test]
    fn resonator_group_delay_peaks_at_four_q_over_omega() {
        let (f0, q) = (3.75e9, 6.62);
        let spec = resonator_spectrum(f0, q, 801, 3e9);
        let with_delay = group_delay(&spec).unwrap();
        let tau = with_delay.group_delay().unwrap();
        let peak = tau.iter().cloned().fold(f64::MIN, f64::max);
        assert_relative_eq!(peak, 4.0 * q / (TWO_PI * f0), max_relative = 1e-2);
    }

    #[test]
    fn external_q_recovers_the_synthesis_target_within_one_percent() {
        let (f0, q) = (3.75e9, 6.62);
        let spec = resonator_spectrum(f0, q, 801, 3e9);
        let (q_hat, f_hat) = external_q(&group_delay(&spec).unwrap()).unwrap();
        assert_relative_eq!(q_hat, q, max_relative = 1e-2);
        assert_relative_eq!(f_hat, f0, max_relative = 1e-4);
    }

    #[test]
    fn external_q_formula_arithmetic_and_linearity() {
        let f0 = 1e9;
        let tau0 = 40.0 / (TWO_PI * f0); // ω0·τ = 40 → Q = 10
        let freqs = vec![f0 - 1e6, f0, f0 + 1e6];
        let vals = vec![Complex::new(1.0, 0.0); 3];
        let spec = ReflectionSpectrum::new(
            freqs.clone(),
            vals.clone(),
            Some(vec![0.5 * tau0, tau0, 0.5 * tau0]),
        )
        .unwrap();
        let (q, f_hat) = external_q(&spec).unwrap();
        assert_relative_eq!(q, 10.0, max_relative = 1e-12);
        assert_relative_eq!(f_hat, f0, max_relative = 1e-12);
        let doubled =
            ReflectionSpectrum::new(freqs, vals, Some(vec![tau0, 2.0 * tau0, tau0])).unwrap();
        let (q2, _) = external_q(&doubled).unwrap();
        assert_relative_eq!(q2, 2.0 * q, max_relative = 1e-12);
    }

    #[test]
    fn external_q_requires_interior_peak_and_group_delay() {
        let freqs: Vec<f64> = (0..16).map(|i| 1e9 + i as f64 * 1e6).collect();
        let vals = vec![Complex::new(1.0, 0.0); 16];
        let rising: Vec<f64> = (0..16).map(|i| i as f64 * 1e-9).collect();
        let spec = ReflectionSpectrum::new(freqs.clone(), vals.clone(), Some(rising)).unwrap();
        assert!(external_q(&spec).is_err());
        let no_delay = ReflectionSpectrum::new(freqs, vals, None).unwrap();
        assert!(external_q(&no_delay).is_err());
    }

    #[test]
    fn spectrum_construction_validates_grid() {
        let vals = vec![Complex::new(0.0f64, 0.0); 3];
        assert!(ReflectionSpectrum::new(vec![1e9, 2e9, 1.5e9], vals.clone(), None).is_err());
        assert!(ReflectionSpectrum::new(vec![1e9, 2e9, 4e9], vals.clone(), None).is_err());
        assert!(ReflectionSpectrum::new(vec![1e9, 2e9], vals, None).is_err());
    }
}
