//! Uniformly sampled records, the Gaussian excitation pulse, and two
//! ground-truth generators for coupled resonator pairs: a closed-form
//! two-tone sum and a circuit ODE integrated with RK4. The generators agree
//! on mode frequencies by construction, so each validates the other and both
//! serve as references for the estimation pipeline.

use crate::error::{Error, Result};
use crate::num::{lit, litn, Real};

/// Relative envelope level below which generated waveforms are truncated to
/// exactly zero, giving them bounded support.
const ENVELOPE_TRUNCATION: f64 = 1e-12;

/// Relative tolerance for "same grid" checks on sample intervals.
const GRID_TOLERANCE: f64 = 1e-6;

/// A real-valued signal on a uniform time grid `t0 + i*dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSignal<T> {
    samples: Vec<T>,
    dt: T,
    t0: T,
}

impl<T: Real> UniformSignal<T> {
    /// Wraps samples taken at interval `dt`, first sample at `t = 0`.
    pub fn new(samples: Vec<T>, dt: T) -> Result<Self> {
        Self::with_origin(samples, dt, T::zero())
    }

    /// Wraps samples taken at interval `dt`, first sample at `t = t0`.
    pub fn with_origin(samples: Vec<T>, dt: T, t0: T) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("signal must contain at least one sample"));
        }
        if !(dt.is_finite() && dt > T::zero()) {
            return Err(Error::invalid(format!(
                "sample interval must be positive and finite, got {dt}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::invalid(format!(
                "time origin must be finite, got {t0}"
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::invalid(format!(
                "sample {i} is not finite: {}",
                samples[i]
            )));
        }
        Ok(Self { samples, dt, t0 })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false: the constructor rejects empty records.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> T {
        T::one() / self.dt
    }

    /// Record length in seconds, counted as `len * dt`.
    pub fn duration(&self) -> T {
        litn::<T>(self.len()) * self.dt
    }

    /// Absolute time of sample `i`.
    pub fn time_at(&self, i: usize) -> T {
        self.t0 + litn::<T>(i) * self.dt
    }

    /// Copies `len` samples starting at `start`, keeping absolute time.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > self.samples.len() {
            return Err(Error::invalid(format!(
                "slice [{start}, {}) out of bounds for {} samples",
                start + len,
                self.samples.len()
            )));
        }
        Self::with_origin(
            self.samples[start..start + len].to_vec(),
            self.dt,
            self.time_at(start),
        )
    }

    /// Drops at least `seconds` from the front of the record, keeping
    /// absolute time. Useful for discarding a drive transient before
    /// estimation.
    pub fn trim_front(&self, seconds: T) -> Result<Self> {
        if seconds < T::zero() {
            return Err(Error::invalid("trim duration must be non-negative"));
        }
        let skip = (seconds / self.dt).ceil();
        let skip = skip
            .to_usize()
            .ok_or_else(|| Error::invalid("trim duration overflows"))?;
        if skip >= self.samples.len() {
            return Err(Error::invalid(format!(
                "trimming {seconds} s removes the whole {}-sample record",
                self.samples.len()
            )));
        }
        self.slice(skip, self.samples.len() - skip)
    }

    /// Returns a copy with every sample multiplied by `gain`.
    pub fn scaled(&self, gain: T) -> Self {
        Self {
            samples: self.samples.iter().map(|&s| s * gain).collect(),
            dt: self.dt,
            t0: self.t0,
        }
    }

    /// True when `other` shares this record's sample interval within 1 ppm.
    pub fn same_grid(&self, other: &Self) -> bool {
        let rel = ((self.dt - other.dt) / self.dt).abs();
        let origin_offset = ((self.t0 - other.t0) / self.dt).abs();
        rel <= lit(GRID_TOLERANCE) && origin_offset <= lit(GRID_TOLERANCE)
    }
}

/// Gaussian excitation pulse parameterized by its center frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec<T> {
    fp: T,
}

impl<T: Real> PulseSpec<T> {
    pub fn new(fp: T) -> Result<Self> {
        if !(fp.is_finite() && fp > T::zero()) {
            return Err(Error::invalid(format!(
                "pulse center frequency must be positive, got {fp}"
            )));
        }
        Ok(Self { fp })
    }

    pub fn fp(&self) -> T {
        self.fp
    }
}

/// Samples the unit-peak Gaussian pulse
/// `p(t) = exp(-2*pi*fp^2 * (t - 1/fp)^2)` on the grid `t = i*dt`.
///
/// The peak sits at `t = 1/fp`; the value at `t = 0` is `exp(-2*pi)`.
/// Samples where the value falls below 1e-12 of the peak are set to exactly
/// zero so the pulse has bounded support.
pub fn gaussian_pulse<T: Real>(spec: &PulseSpec<T>, dt: T, n: usize) -> Result<UniformSignal<T>> {
    if n == 0 {
        return Err(Error::invalid("pulse length must be at least one sample"));
    }
    let fp = spec.fp;
    let two_pi = lit::<T>(2.0) * T::PI();
    let center = T::one() / fp;
    let log_floor = lit::<T>(ENVELOPE_TRUNCATION.ln());
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let tau = litn::<T>(i) * dt - center;
        let exponent = -two_pi * fp * fp * tau * tau;
        samples.push(if exponent < log_floor {
            T::zero()
        } else {
            exponent.exp()
        });
    }
    UniformSignal::new(samples, dt)
}

/// Spectral attenuation of the Gaussian pulse at frequency `f` relative to
/// its DC value, in dB: `-10*log10(e) * (f/fp)^2`.
///
/// This closed form is the design bound used to place decimation targets; it
/// predicts about -108.6 dB at `f = 5*fp`. Requires `fp > 0`; even in `f`.
pub fn pulse_attenuation_db<T: Real>(f: T, fp: T) -> T {
    assert!(
        fp.is_finite() && fp > T::zero(),
        "pulse center frequency must be positive"
    );
    let ratio = f / fp;
    -lit::<T>(10.0) * T::E().log10() * ratio * ratio
}

/// A pair of identical resonators with mutual coupling `k`, the common
/// ground truth for both generators.
///
/// The coupled pair splits the uncoupled resonance `f0` into
/// `f_minus = f0/sqrt(1+k)` and `f_plus = f0/sqrt(1-k)`. `damping` is one
/// exponential decay rate (1/s) applied to both modes; amplitudes and phases
/// are free per-mode excitation coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledPairSpec<T> {
    f0: T,
    k: T,
    damping: T,
    amplitude_minus: T,
    amplitude_plus: T,
    phase_minus: T,
    phase_plus: T,
}

impl<T: Real> CoupledPairSpec<T> {
    /// Undamped pair with unit amplitudes and zero phases.
    pub fn new(f0: T, k: T) -> Result<Self> {
        if !(f0.is_finite() && f0 > T::zero()) {
            return Err(Error::invalid(format!(
                "resonance frequency must be positive, got {f0}"
            )));
        }
        if !(k.is_finite() && k >= T::zero() && k < T::one()) {
            return Err(Error::invalid(format!(
                "coupling coefficient must lie in [0, 1), got {k}"
            )));
        }
        Ok(Self {
            f0,
            k,
            damping: T::zero(),
            amplitude_minus: T::one(),
            amplitude_plus: T::one(),
            phase_minus: T::zero(),
            phase_plus: T::zero(),
        })
    }

    /// Sets the per-mode exponential decay rate (1/s, non-negative).
    pub fn with_damping(mut self, damping: T) -> Result<Self> {
        if !(damping.is_finite() && damping >= T::zero()) {
            return Err(Error::invalid(format!(
                "damping must be non-negative, got {damping}"
            )));
        }
        self.damping = damping;
        Ok(self)
    }

    pub fn with_amplitudes(mut self, minus: T, plus: T) -> Result<Self> {
        if !(minus.is_finite() && plus.is_finite()) {
            return Err(Error::invalid("mode amplitudes must be finite"));
        }
        self.amplitude_minus = minus;
        self.amplitude_plus = plus;
        Ok(self)
    }

    pub fn with_phases(mut self, minus: T, plus: T) -> Result<Self> {
        if !(minus.is_finite() && plus.is_finite()) {
            return Err(Error::invalid("mode phases must be finite"));
        }
        self.phase_minus = minus;
        self.phase_plus = plus;
        Ok(self)
    }

    pub fn f0(&self) -> T {
        self.f0
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn damping(&self) -> T {
        self.damping
    }

    /// The split mode frequencies `(f_minus, f_plus)`.
    ///
    /// `f_minus = f0/sqrt(1+k) <= f0 <= f_plus = f0/sqrt(1-k)`; for k = 0 the
    /// two coincide at `f0`.
    pub fn split_frequencies(&self) -> (T, T) {
        let one = T::one();
        (
            self.f0 / (one + self.k).sqrt(),
            self.f0 / (one - self.k).sqrt(),
        )
    }
}

/// Closed-form generator: the sum of two damped cosines at the pair's split
/// frequencies, `sum_j a_j * exp(-sigma*t) * cos(2*pi*f_j*t + phi_j)`.
///
/// With `k = 0` both components sit at `f0` and the record is a single tone.
pub fn oracle_two_tone<T: Real>(
    spec: &CoupledPairSpec<T>,
    dt: T,
    n: usize,
) -> Result<UniformSignal<T>> {
    if n == 0 {
        return Err(Error::invalid("record length must be at least one sample"));
    }
    if !(dt.is_finite() && dt > T::zero()) {
        return Err(Error::invalid(format!(
            "sample interval must be positive, got {dt}"
        )));
    }
    let (f_minus, f_plus) = spec.split_frequencies();
    let nyquist = T::one() / (lit::<T>(2.0) * dt);
    if f_plus >= nyquist {
        return Err(Error::invalid(format!(
            "upper mode {f_plus} Hz at or above Nyquist {nyquist} Hz"
        )));
    }
    let two_pi = lit::<T>(2.0) * T::PI();
    let sigma = spec.damping;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = litn::<T>(i) * dt;
        let envelope = (-sigma * t).exp();
        let minus = spec.amplitude_minus * (two_pi * f_minus * t + spec.phase_minus).cos();
        let plus = spec.amplitude_plus * (two_pi * f_plus * t + spec.phase_plus).cos();
        samples.push(envelope * (minus + plus));
    }
    UniformSignal::new(samples, dt)
}

/// Two identical LC resonators with mutual inductive coupling, driven by a
/// current source on resonator 1 and probed as the capacitor voltage on
/// resonator 2.
///
/// State is `[q1, q2, phi1, phi2]`: capacitor charges and inductor flux
/// linkages. With coupling `k` the mutual inductance is `M = k*L`, which
/// splits the modes at exactly the frequencies of
/// [`CoupledPairSpec::split_frequencies`]. Damping enters as a modal term
/// `-2*sigma*phi` so both modes decay at the same rate; it shifts the damped
/// oscillation frequency by the usual second-order `(sigma/omega)^2` amount.
#[derive(Debug, Clone, Copy)]
pub struct CoupledLcPair<T> {
    inductance: T,
    capacitance: T,
    mutual: T,
    sigma: T,
}

impl<T: Real> CoupledLcPair<T> {
    pub fn new(spec: &CoupledPairSpec<T>) -> Self {
        let omega0 = lit::<T>(2.0) * T::PI() * spec.f0;
        let capacitance = T::one();
        let inductance = T::one() / (omega0 * omega0 * capacitance);
        Self {
            inductance,
            capacitance,
            mutual: spec.k * inductance,
            sigma: spec.damping,
        }
    }

    /// Branch currents recovered from the flux linkages.
    fn currents(&self, state: &[T; 4]) -> (T, T) {
        let det = self.inductance * self.inductance - self.mutual * self.mutual;
        let i1 = (self.inductance * state[2] - self.mutual * state[3]) / det;
        let i2 = (self.inductance * state[3] - self.mutual * state[2]) / det;
        (i1, i2)
    }

    /// State derivative under a drive current injected into resonator 1.
    pub fn derivatives(&self, state: &[T; 4], drive: T) -> [T; 4] {
        let (i1, i2) = self.currents(state);
        let two = lit::<T>(2.0);
        [
            i1 + drive,
            i2,
            -state[0] / self.capacitance - two * self.sigma * state[2],
            -state[1] / self.capacitance - two * self.sigma * state[3],
        ]
    }

    /// Total stored energy; conserved by the dynamics when undamped and
    /// undriven.
    pub fn energy(&self, state: &[T; 4]) -> T {
        let (i1, i2) = self.currents(state);
        let half = lit::<T>(0.5);
        let electric = half * (state[0] * state[0] + state[1] * state[1]) / self.capacitance;
        let magnetic =
            half * (self.inductance * (i1 * i1 + i2 * i2) + lit::<T>(2.0) * self.mutual * i1 * i2);
        electric + magnetic
    }

    /// Probe voltage on resonator 2 for a given state.
    pub fn probe_voltage(&self, state: &[T; 4]) -> T {
        state[1] / self.capacitance
    }

    /// Classic fixed-step RK4 update with the drive sampled at the step's
    /// endpoints and midpoint.
    pub fn step_rk4(&self, state: &[T; 4], h: T, drive: (T, T, T)) -> [T; 4] {
        let half = lit::<T>(0.5);
        let sixth = T::one() / lit::<T>(6.0);
        let k1 = self.derivatives(state, drive.0);
        let mut y = *state;
        for j in 0..4 {
            y[j] = state[j] + half * h * k1[j];
        }
        let k2 = self.derivatives(&y, drive.1);
        for j in 0..4 {
            y[j] = state[j] + half * h * k2[j];
        }
        let k3 = self.derivatives(&y, drive.1);
        for j in 0..4 {
            y[j] = state[j] + h * k3[j];
        }
        let k4 = self.derivatives(&y, drive.2);
        let mut next = *state;
        for j in 0..4 {
            next[j] = state[j] + sixth * h * (k1[j] + lit::<T>(2.0) * (k2[j] + k3[j]) + k4[j]);
        }
        next
    }

    /// Integrates from rest over `n` grid points with step `dt`, returning
    /// the state at every grid point. `drive[i]` is the injected current at
    /// `t = i*dt` (zero past the end of the slice); midpoint values are
    /// interpolated linearly.
    pub fn integrate(&self, dt: T, n: usize, drive: &[T]) -> Vec<[T; 4]> {
        let at = |i: usize| -> T {
            if i < drive.len() {
                drive[i]
            } else {
                T::zero()
            }
        };
        let half = lit::<T>(0.5);
        let mut states = Vec::with_capacity(n);
        let mut state = [T::zero(); 4];
        states.push(state);
        for i in 0..n.saturating_sub(1) {
            let d0 = at(i);
            let d1 = at(i + 1);
            let dmid = half * (d0 + d1);
            state = self.step_rk4(&state, dt, (d0, dmid, d1));
            states.push(state);
        }
        states
    }
}

/// Circuit-level generator: integrates the coupled LC pair driven by
/// `excitation` (a current record on the same grid) and returns the probe
/// voltage on resonator 2.
///
/// The fixed RK4 step equals `dt` and must satisfy `dt <= 1/(10*f_plus)`,
/// otherwise the step is rejected as unstable. With `k = 0` the output is
/// identically zero: nothing couples into resonator 2.
pub fn oracle_ode<T: Real>(
    spec: &CoupledPairSpec<T>,
    dt: T,
    n: usize,
    excitation: &UniformSignal<T>,
) -> Result<UniformSignal<T>> {
    if n == 0 {
        return Err(Error::invalid("record length must be at least one sample"));
    }
    if !(dt.is_finite() && dt > T::zero()) {
        return Err(Error::invalid(format!(
            "sample interval must be positive, got {dt}"
        )));
    }
    let rel = ((dt - excitation.dt()) / dt).abs();
    if rel > lit(GRID_TOLERANCE) {
        return Err(Error::invalid(format!(
            "excitation grid {} s does not match integration grid {dt} s",
            excitation.dt()
        )));
    }
    let (_, f_plus) = spec.split_frequencies();
    let max_step = T::one() / (lit::<T>(10.0) * f_plus);
    if dt > max_step {
        return Err(Error::invalid(format!(
            "step {dt} s unstable: must not exceed 1/(10*f_plus) = {max_step} s"
        )));
    }
    let pair = CoupledLcPair::new(spec);
    let states = pair.integrate(dt, n, excitation.samples());
    let samples = states.iter().map(|s| pair.probe_voltage(s)).collect();
    UniformSignal::new(samples, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn pulse_peak_and_origin_values() {
        // Grid chosen so t = 1/fp lands exactly on a sample.
        let fp = 5e9f64;
        let spec = PulseSpec::new(fp).unwrap();
        let dt = 1.0 / (fp * 100.0);
        let pulse = gaussian_pulse(&spec, dt, 400).unwrap();
        assert_eq!(pulse.samples()[100], 1.0, "peak at t = 1/fp");
        let expected_origin = (-2.0 * std::f64::consts::PI).exp();
        assert_relative_eq!(pulse.samples()[0], expected_origin, max_relative = 1e-12);
        assert_abs_diff_eq!(expected_origin, 1.8674e-3, epsilon = 1e-7);
    }

    #[test]
    fn pulse_is_nonnegative_unimodal_with_bounded_support() {
        let spec = PulseSpec::new(2e9f64).unwrap();
        let pulse = gaussian_pulse(&spec, 1.0 / 80e9, 400).unwrap();
        let s = pulse.samples();
        assert!(s.iter().all(|&v| v >= 0.0));
        let peak = s
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(s[..peak].windows(2).all(|w| w[1] >= w[0]), "rising edge");
        assert!(s[peak..].windows(2).all(|w| w[1] <= w[0]), "falling edge");
        // Support ends once the envelope drops below 1e-12 of the peak.
        assert_eq!(*s.last().unwrap(), 0.0);
        assert!(s.iter().filter(|&&v| v == 0.0).count() > 0);
        assert!(s.iter().all(|&v| v == 0.0 || v >= 1e-12));
    }

    #[test]
    fn pulse_scales_with_center_frequency() {
        // p_fp(t) depends on fp*t only, so doubling fp compresses time by 2:
        // sampling fp = 10 GHz at dt equals sampling fp = 5 GHz at 2*dt.
        let dt = 1.0 / 400e9f64;
        let fast = gaussian_pulse(&PulseSpec::new(10e9).unwrap(), dt, 500).unwrap();
        let slow = gaussian_pulse(&PulseSpec::new(5e9).unwrap(), 2.0 * dt, 500).unwrap();
        for i in 0..500 {
            assert_abs_diff_eq!(fast.samples()[i], slow.samples()[i], epsilon = 1e-15);
        }
    }

    #[test]
    fn attenuation_closed_form() {
        let fp = 5e9f64;
        assert_eq!(pulse_attenuation_db(0.0, fp), 0.0);
        let at_fp = pulse_attenuation_db(fp, fp);
        assert_relative_eq!(
            at_fp,
            -10.0 * std::f64::consts::E.log10(),
            max_relative = 1e-14
        );
        let at_5fp = pulse_attenuation_db(5.0 * fp, fp);
        assert_relative_eq!(at_5fp, -108.5736, max_relative = 1e-6);
        assert!(at_5fp <= -108.0);
        // Even in f.
        assert_eq!(pulse_attenuation_db(-fp, fp), at_fp);
    }

    #[test]
    fn split_frequencies_match_closed_form() {
        let spec = CoupledPairSpec::new(3.65e9f64, 0.1985).unwrap();
        let (f_minus, f_plus) = spec.split_frequencies();
        assert_relative_eq!(f_minus, 3.65e9 / 1.1985f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(f_plus, 3.65e9 / 0.8015f64.sqrt(), max_relative = 1e-15);
        // Frozen values for the strongly coupled pair.
        assert_relative_eq!(f_minus, 3.334e9, max_relative = 1e-4);
        assert_relative_eq!(f_plus, 4.077e9, max_relative = 1e-4);
    }

    #[test]
    fn two_tone_first_order_spacing() {
        // For small k the split is approximately k*f0 wide.
        let f0 = 3.65e9f64;
        for &k in &[0.005, 0.01, 0.02] {
            let spec = CoupledPairSpec::new(f0, k).unwrap();
            let (f_minus, f_plus) = spec.split_frequencies();
            let spacing = f_plus - f_minus;
            assert!(
                (spacing - k * f0).abs() < k * k * f0,
                "k = {k}: spacing {spacing} vs first-order {}",
                k * f0
            );
        }
    }

    #[test]
    fn two_tone_closed_form_samples() {
        let spec = CoupledPairSpec::new(1e9f64, 0.1)
            .unwrap()
            .with_damping(2e7)
            .unwrap()
            .with_amplitudes(0.7, 1.3)
            .unwrap()
            .with_phases(0.2, -0.4)
            .unwrap();
        let dt = 1e-11;
        let record = oracle_two_tone(&spec, dt, 64).unwrap();
        let (f_minus, f_plus) = spec.split_frequencies();
        let w = 2.0 * std::f64::consts::PI;
        for (i, &v) in record.samples().iter().enumerate() {
            let t = i as f64 * dt;
            let expected = (-2e7 * t).exp()
                * (0.7 * (w * f_minus * t + 0.2).cos() + 1.3 * (w * f_plus * t - 0.4).cos());
            assert_abs_diff_eq!(v, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_tone_zero_coupling_is_single_tone() {
        let spec = CoupledPairSpec::new(1e9f64, 0.0).unwrap();
        let record = oracle_two_tone(&spec, 1e-10, 128).unwrap();
        let w = 2.0 * std::f64::consts::PI * 1e9;
        for (i, &v) in record.samples().iter().enumerate() {
            let t = i as f64 * 1e-10;
            assert_abs_diff_eq!(v, 2.0 * (w * t).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn two_tone_rejects_aliased_modes() {
        let spec = CoupledPairSpec::new(1e9f64, 0.3).unwrap();
        // f_plus ~ 1.195 GHz, Nyquist at 1 GHz.
        let err = oracle_two_tone(&spec, 5e-10, 64).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)), "got {err:?}");
    }

    #[test]
    fn ode_zero_coupling_leaves_resonator_two_silent() {
        let spec = CoupledPairSpec::new(1e9f64, 0.0).unwrap();
        let dt = 1e-11;
        let pulse = gaussian_pulse(&PulseSpec::new(5e9).unwrap(), dt, 2000).unwrap();
        let out = oracle_ode(&spec, dt, 2000, &pulse).unwrap();
        assert!(out.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ode_conserves_energy_after_the_drive() {
        let spec = CoupledPairSpec::new(1e9f64, 0.05).unwrap();
        let dt = 1e-11;
        let n = 10_000;
        let pulse = gaussian_pulse(&PulseSpec::new(5e9).unwrap(), dt, n).unwrap();
        let pair = CoupledLcPair::new(&spec);
        let states = pair.integrate(dt, n, pulse.samples());
        // The pulse support ends well before sample 200.
        let reference = pair.energy(&states[200]);
        assert!(reference > 0.0);
        for state in states[200..].iter().step_by(100) {
            assert_relative_eq!(pair.energy(state), reference, max_relative = 1e-4);
        }
    }

    #[test]
    fn ode_rejects_unstable_step() {
        let spec = CoupledPairSpec::new(1e9f64, 0.05).unwrap();
        // 1/(10*f_plus) ~ 97.5 ps; ask for 200 ps.
        let dt = 2e-10;
        let pulse = gaussian_pulse(&PulseSpec::new(5e9).unwrap(), dt, 100).unwrap();
        let err = oracle_ode(&spec, dt, 100, &pulse).unwrap_err();
        assert!(err.to_string().contains("unstable"), "got {err}");
    }

    #[test]
    fn ode_rejects_mismatched_excitation_grid() {
        let spec = CoupledPairSpec::new(1e9f64, 0.05).unwrap();
        let pulse = gaussian_pulse(&PulseSpec::new(5e9).unwrap(), 1.1e-11, 100).unwrap();
        let err = oracle_ode(&spec, 1e-11, 100, &pulse).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn signal_slice_and_trim_keep_absolute_time() {
        let s = UniformSignal::new(vec![0.0f64, 1.0, 2.0, 3.0, 4.0], 0.5).unwrap();
        let sl = s.slice(2, 3).unwrap();
        assert_eq!(sl.t0(), 1.0);
        assert_eq!(sl.samples(), &[2.0, 3.0, 4.0]);
        let tr = s.trim_front(0.9).unwrap();
        assert_eq!(tr.t0(), 1.0, "ceil to the next grid point");
        assert_eq!(tr.len(), 3);
    }

    #[test]
    fn signal_rejects_bad_construction() {
        assert!(UniformSignal::<f64>::new(vec![], 1.0).is_err());
        assert!(UniformSignal::new(vec![1.0f64], 0.0).is_err());
        assert!(UniformSignal::new(vec![1.0f64], -1.0).is_err());
        assert!(UniformSignal::new(vec![f64::NAN], 1.0).is_err());
    }
}
