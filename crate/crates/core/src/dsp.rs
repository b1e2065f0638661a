//! Multirate front end: two-stage decimation planning, windowed-sinc
//! anti-alias lowpass design, Gaussian-envelope bandpass design, and FIR
//! application with group-delay bookkeeping.
//!
//! The analysis pipeline reduces a heavily oversampled record in two steps —
//! a raw keep-every-Nth pass down to roughly ten times the excitation pulse's
//! center frequency (safe because the record is near-silent above half that
//! rate), then an anti-alias-filtered pass down to roughly four times the
//! resonance — before a narrow Gaussian bandpass isolates the band of
//! interest.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{as_f64, lit, litn, Real};
use crate::signals::UniformSignal;

/// Tap count above which a filter design is refused as infeasible.
const MAX_TAPS: usize = 1_000_000;

/// Relative tolerance for "same sample rate" checks.
const RATE_TOLERANCE: f64 = 1e-6;

/// A linear-phase FIR filter tied to the sample rate it was designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter<T> {
    taps: Vec<T>,
    fs: T,
    passband_edge: Option<T>,
}

impl<T: Real> FirFilter<T> {
    /// Wraps raw taps. `passband_edge` declares the edge of the band the
    /// filter is meant to pass, which decimation uses to verify that the
    /// retained band stays below the reduced Nyquist rate.
    pub fn new(taps: Vec<T>, fs: T, passband_edge: Option<T>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::invalid("filter needs at least one tap"));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("filter taps must be finite"));
        }
        if !(fs.is_finite() && fs > T::zero()) {
            return Err(Error::invalid(format!(
                "sample rate must be positive, got {fs}"
            )));
        }
        if let Some(edge) = passband_edge {
            if !(edge.is_finite() && edge > T::zero()) {
                return Err(Error::invalid(format!(
                    "passband edge must be positive, got {edge}"
                )));
            }
        }
        Ok(Self {
            taps,
            fs,
            passband_edge,
        })
    }

    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty tap vectors
    }

    /// Design sample rate in Hz.
    pub fn fs(&self) -> T {
        self.fs
    }

    /// Edge of the intended passband, when the design declares one.
    pub fn passband_edge(&self) -> Option<T> {
        self.passband_edge
    }

    /// Group delay in samples: (len − 1)/2, exact for the odd-length
    /// symmetric filters this module designs.
    pub fn group_delay_samples(&self) -> usize {
        (self.taps.len() - 1) / 2
    }

    /// Group delay in seconds.
    pub fn group_delay_seconds(&self) -> T {
        litn::<T>(self.group_delay_samples()) / self.fs
    }

    /// Frequency response at `f_hz` by direct evaluation of the transfer
    /// function (phase referenced to the first tap).
    pub fn response_at(&self, f_hz: T) -> Complex<T> {
        let two_pi = T::PI() + T::PI();
        let phi = two_pi * f_hz / self.fs;
        let mut re = T::zero();
        let mut im = T::zero();
        for (k, &tap) in self.taps.iter().enumerate() {
            let theta = phi * litn::<T>(k);
            re += tap * theta.cos();
            im -= tap * theta.sin();
        }
        Complex::new(re, im)
    }

    /// Magnitude response in dB at `f_hz`.
    pub fn magnitude_db_at(&self, f_hz: T) -> T {
        let mag = self.response_at(f_hz).norm();
        lit::<T>(20.0) * mag.max(T::min_positive_value()).log10()
    }

    /// True when the taps are bit-for-bit symmetric (linear phase).
    pub fn is_symmetric(&self) -> bool {
        let n = self.taps.len();
        (0..n / 2).all(|i| self.taps[i] == self.taps[n - 1 - i])
    }
}

/// Two-stage decimation plan: a raw unfiltered reduction toward
/// `stage1_target`, then an anti-alias-filtered reduction toward
/// `stage2_target`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimationPlan<T> {
    input_fs: T,
    stage1_target: T,
    stage2_target: T,
    stage1_factor: usize,
    stage2_factor: usize,
}

impl<T: Real> DecimationPlan<T> {
    pub fn input_fs(&self) -> T {
        self.input_fs
    }

    /// Rate the raw stage aims for: ten times the pulse center frequency.
    pub fn stage1_target(&self) -> T {
        self.stage1_target
    }

    /// Rate the filtered stage aims for: four times the resonance.
    pub fn stage2_target(&self) -> T {
        self.stage2_target
    }

    pub fn stage1_factor(&self) -> usize {
        self.stage1_factor
    }

    pub fn stage2_factor(&self) -> usize {
        self.stage2_factor
    }

    /// Rate after the raw stage.
    pub fn stage1_rate(&self) -> T {
        self.input_fs / litn::<T>(self.stage1_factor)
    }

    /// Rate after the filtered stage.
    pub fn stage2_rate(&self) -> T {
        self.stage1_rate() / litn::<T>(self.stage2_factor)
    }
}

/// Plans the two decimation stages for a record sampled at `input_fs`,
/// excited by a pulse centered at `fp`, observing a resonance near `f0`.
///
/// Both factors are the largest integers that keep the achieved rate at or
/// above its target (stage 1: 10·fp, stage 2: 4·f0), clamped to at least 1.
/// A record below 10·fp cannot represent the pulse band (which carries
/// significant energy to about 5·fp) and is rejected; between 10·fp and
/// 20·fp there is no room to decimate, so stage 1 degenerates to a no-op
/// with a logged warning.
pub fn plan_decimation<T: Real>(input_fs: T, fp: T, f0: T) -> Result<DecimationPlan<T>> {
    for (name, v) in [("input_fs", input_fs), ("fp", fp), ("f0", f0)] {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if fp < lit::<T>(2.0) * f0 {
        return Err(Error::invalid(format!(
            "pulse center {fp} Hz must sit at least two resonances above f0 = {f0} Hz \
             so the excitation band clears the split modes"
        )));
    }
    if fp < lit::<T>(5.0) * f0 {
        log::warn!(
            "pulse center {fp} Hz is below 5x the resonance {f0} Hz; \
             the excitation rolls off close to the band of interest"
        );
    }
    // Tiny relative nudge so exact multiples are not floored down by one.
    let guard = 1.0 + 1e-12;
    let stage1_target = lit::<T>(10.0) * fp;
    let ratio1 = as_f64(input_fs) / as_f64(stage1_target);
    if ratio1 * guard < 1.0 {
        return Err(Error::invalid(format!(
            "input rate {input_fs} Hz is below 10x the pulse center {fp} Hz; \
             the record undersamples the excitation band"
        )));
    }
    let stage1_factor = ((ratio1 * guard).floor() as usize).max(1);
    if stage1_factor == 1 && ratio1 < 2.0 {
        log::warn!(
            "input rate {input_fs} Hz leaves no headroom to decimate toward 10x \
             the pulse center; stage 1 is a no-op"
        );
    }
    let stage1_rate = as_f64(input_fs) / stage1_factor as f64;
    let stage2_target = lit::<T>(4.0) * f0;
    let ratio2 = stage1_rate / as_f64(stage2_target);
    let stage2_factor = ((ratio2 * guard).floor() as usize).max(1);
    Ok(DecimationPlan {
        input_fs,
        stage1_target,
        stage2_target,
        stage1_factor,
        stage2_factor,
    })
}

/// Keeps every `factor`-th sample starting at index 0, without filtering.
/// Safe only when the signal is near-silent above the reduced Nyquist rate.
pub fn decimate_raw<T: Real>(signal: &UniformSignal<T>, factor: usize) -> Result<UniformSignal<T>> {
    if factor < 1 {
        return Err(Error::invalid("decimation factor must be at least 1"));
    }
    if factor == 1 {
        return Ok(signal.clone());
    }
    let kept: Vec<T> = signal.samples().iter().step_by(factor).copied().collect();
    UniformSignal::with_origin(kept, signal.dt() * litn::<T>(factor), signal.t0())
}

/// Designs a linear-phase Kaiser windowed-sinc lowpass at sample rate `fs`
/// that passes DC..`cutoff` and meets `stop_attenuation_db` of rejection at
/// and beyond 1.25·cutoff.
///
/// Stricter than the bare Nyquist bound, this requires the full transition
/// band to fit below fs/2 (1.25·cutoff ≤ fs/2), since a transition region
/// folded across Nyquist cannot meet its attenuation target.
pub fn design_lowpass<T: Real>(fs: T, cutoff: T, stop_attenuation_db: T) -> Result<FirFilter<T>> {
    if !(fs.is_finite() && fs > T::zero()) {
        return Err(Error::invalid(format!(
            "sample rate must be positive, got {fs}"
        )));
    }
    if !(cutoff.is_finite() && cutoff > T::zero()) {
        return Err(Error::invalid(format!(
            "cutoff must be positive, got {cutoff}"
        )));
    }
    let stop_edge = lit::<T>(1.25) * cutoff;
    if stop_edge > fs / lit::<T>(2.0) {
        return Err(Error::invalid(format!(
            "transition band must fit below Nyquist: need 1.25 x cutoff = {stop_edge} Hz \
             <= fs/2 = {} Hz",
            fs / lit::<T>(2.0)
        )));
    }
    if !(stop_attenuation_db.is_finite() && stop_attenuation_db > T::zero()) {
        return Err(Error::invalid("stop attenuation must be positive dB"));
    }
    // Kaiser design with a 3 dB margin so the realized response clears the
    // requested floor rather than grazing it.
    let a = as_f64(stop_attenuation_db) + 3.0;
    let beta = if a > 50.0 {
        0.1102 * (a - 8.7)
    } else if a >= 21.0 {
        0.5842 * (a - 21.0).powf(0.4) + 0.07886 * (a - 21.0)
    } else {
        0.0
    };
    let delta_omega = 2.0 * std::f64::consts::PI * as_f64(cutoff) * 0.25 / as_f64(fs);
    let order = ((a - 7.95) / (2.285 * delta_omega)).ceil();
    if !(order.is_finite() && order < MAX_TAPS as f64) {
        return Err(Error::invalid(format!(
            "lowpass at cutoff {cutoff} Hz on a {fs} Hz grid needs {order} taps; \
             refusing designs beyond {MAX_TAPS}"
        )));
    }
    let mut n = order as usize + 1;
    if n % 2 == 0 {
        n += 1;
    }
    let half = (n - 1) / 2;
    // Ideal lowpass centered mid-transition, shaped by the Kaiser window.
    let fc = lit::<T>(1.125) * cutoff / fs; // cycles per sample
    let beta_t = lit::<T>(beta);
    let i0_beta = bessel_i0(beta_t);
    let mut taps = vec![T::zero(); n];
    for j in 0..=half {
        let m = litn::<T>(j); // offset from center
        let x = lit::<T>(2.0) * fc * m;
        let ideal = lit::<T>(2.0) * fc * sinc(x);
        let frac = m / litn::<T>(half.max(1));
        let window = bessel_i0(beta_t * (T::one() - frac * frac).max(T::zero()).sqrt()) / i0_beta;
        let tap = ideal * window;
        taps[half + j] = tap;
        taps[half - j] = tap; // mirror: bit-exact symmetry
    }
    let sum: T = taps.iter().copied().sum();
    for tap in &mut taps {
        *tap /= sum;
    }
    FirFilter::new(taps, fs, Some(cutoff))
}

/// Designs the Gaussian-envelope bandpass centered at `f0` with envelope
/// width parameter `f_tilde`: taps sample cos(2π·f0·t)·exp(−2π·f_tilde²·t²),
/// truncated where the envelope falls below 1e−12 of its peak, then
/// normalized to unit gain at `f0`.
pub fn gaussian_bandpass<T: Real>(f0: T, f_tilde: T, fs: T) -> Result<FirFilter<T>> {
    for (name, v) in [("f0", f0), ("f_tilde", f_tilde), ("fs", fs)] {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    let nyquist = fs / lit::<T>(2.0);
    if f0 + lit::<T>(3.0) * f_tilde >= nyquist {
        return Err(Error::invalid(format!(
            "band exceeds Nyquist: f0 + 3 x f_tilde = {} Hz must stay below fs/2 = {nyquist} Hz",
            f0 + lit::<T>(3.0) * f_tilde
        )));
    }
    let dt = T::one() / fs;
    // Envelope exp(−2π·f̃²·t²) reaches 1e−12 at t = sqrt(ln(1e12)/(2π))/f̃.
    let t_max = (lit::<T>(1e12).ln() / (T::PI() + T::PI())).sqrt() / f_tilde;
    let half = as_f64(t_max / dt).floor() as usize;
    let n = 2 * half + 1;
    if n > MAX_TAPS {
        return Err(Error::invalid(format!(
            "bandpass with f_tilde = {f_tilde} Hz on a {fs} Hz grid needs {n} taps; \
             refusing designs beyond {MAX_TAPS}"
        )));
    }
    let two_pi = T::PI() + T::PI();
    let mut taps = vec![T::zero(); n];
    for j in 0..=half {
        let t = litn::<T>(j) * dt;
        let tap = (two_pi * f0 * t).cos() * (-two_pi * f_tilde * f_tilde * t * t).exp();
        taps[half + j] = tap;
        taps[half - j] = tap; // cosine is even: mirror is exact
    }
    let filter = FirFilter::new(taps, fs, None)?;
    let gain = filter.response_at(f0).norm();
    if !(gain.is_finite() && gain > T::zero()) {
        return Err(Error::invalid(
            "bandpass normalization failed: zero gain at center",
        ));
    }
    let taps = filter.taps.into_iter().map(|t| t / gain).collect();
    FirFilter::new(taps, fs, None)
}

/// Applies an FIR filter by valid-region linear convolution: the output
/// drops the (taps − 1) leading edge-transient samples, and its time origin
/// advances by the filter's group delay so tone phases are preserved in
/// absolute time.
pub fn apply_fir<T: Real>(
    signal: &UniformSignal<T>,
    filter: &FirFilter<T>,
) -> Result<UniformSignal<T>> {
    let fs = signal.sample_rate();
    let rel = (as_f64(fs) - as_f64(filter.fs)).abs() / as_f64(filter.fs);
    if rel > RATE_TOLERANCE {
        return Err(Error::invalid(format!(
            "filter designed for {} Hz applied to a {} Hz signal",
            filter.fs, fs
        )));
    }
    let n = signal.len();
    let m = filter.len();
    if n < m {
        return Err(Error::invalid(format!(
            "signal of {n} samples is shorter than the {m}-tap filter"
        )));
    }
    let x = signal.samples();
    let h = &filter.taps;
    let out_len = n - m + 1;
    let mut out = Vec::with_capacity(out_len);
    for i in 0..out_len {
        let mut acc = T::zero();
        for (k, &tap) in h.iter().enumerate() {
            acc += tap * x[i + m - 1 - k];
        }
        out.push(acc);
    }
    let delay = litn::<T>(filter.group_delay_samples()) * signal.dt();
    UniformSignal::with_origin(out, signal.dt(), signal.t0() + delay)
}

/// Anti-alias-filtered decimation: convolves with `aaf`, then keeps every
/// `factor`-th sample. `factor = 1` returns the signal untouched. The filter
/// must declare a passband edge (as [`design_lowpass`] does) at or below the
/// reduced Nyquist rate.
pub fn decimate_filtered<T: Real>(
    signal: &UniformSignal<T>,
    factor: usize,
    aaf: &FirFilter<T>,
) -> Result<UniformSignal<T>> {
    if factor < 1 {
        return Err(Error::invalid("decimation factor must be at least 1"));
    }
    if factor == 1 {
        return Ok(signal.clone());
    }
    let edge = aaf.passband_edge.ok_or_else(|| {
        Error::invalid("anti-alias filter must declare a passband edge to validate decimation")
    })?;
    let new_nyquist = signal.sample_rate() / litn::<T>(2 * factor);
    if edge > new_nyquist * (T::one() + lit::<T>(RATE_TOLERANCE)) {
        return Err(Error::invalid(format!(
            "anti-alias passband edge {edge} Hz exceeds the decimated Nyquist rate {new_nyquist} Hz"
        )));
    }
    let filtered = apply_fir(signal, aaf)?;
    decimate_raw(&filtered, factor)
}

/// Least-squares amplitude and phase of known-frequency tones in a signal:
/// fits Σ aᵢ·cos(2π·fᵢ·t) + bᵢ·sin(2π·fᵢ·t) over absolute time and returns
/// (amplitude, phase) per tone such that the component is A·cos(2π·f·t + φ).
pub fn fit_tones<T: Real>(signal: &UniformSignal<T>, freqs: &[T]) -> Result<Vec<(T, T)>> {
    if freqs.is_empty() {
        return Ok(Vec::new());
    }
    let n = signal.len();
    let cols = 2 * freqs.len();
    if n < cols {
        return Err(Error::invalid(format!(
            "{n} samples cannot determine {cols} tone coefficients"
        )));
    }
    let two_pi = T::PI() + T::PI();
    let mut design = Array2::<T>::zeros((n, cols));
    for (j, &f) in freqs.iter().enumerate() {
        for i in 0..n {
            let theta = two_pi * f * signal.time_at(i);
            design[[i, 2 * j]] = theta.cos();
            design[[i, 2 * j + 1]] = theta.sin();
        }
    }
    // Normal equations are adequate here: the design is near-orthogonal for
    // distinct tones over many cycles.
    let gram = design.t().dot(&design);
    let y = Array2::from_shape_fn((n, 1), |(i, _)| signal.samples()[i]);
    let rhs = design.t().dot(&y);
    let sol = crate::spectral::linalg::solve_real(&gram, &rhs)
        .ok_or_else(|| Error::invalid("tone fit is singular: frequencies too close or aliased"))?;
    Ok(freqs
        .iter()
        .enumerate()
        .map(|(j, _)| {
            let a = sol[[2 * j, 0]];
            let b = sol[[2 * j + 1, 0]];
            (a.hypot(b), (-b).atan2(a))
        })
        .collect())
}

/// Modified Bessel function I₀ via its power series.
fn bessel_i0<T: Real>(x: T) -> T {
    let quarter_x2 = x * x / lit::<T>(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = T::one();
    loop {
        term = term * quarter_x2 / (k * k);
        sum += term;
        if term <= T::epsilon() * sum {
            return sum;
        }
        k += T::one();
    }
}

/// Normalized sinc: sin(πx)/(πx).
fn sinc<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        let px = T::PI() * x;
        px.sin() / px
    }
}
