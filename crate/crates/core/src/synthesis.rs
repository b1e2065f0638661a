//! Filter synthesis utilities: converting a low-pass prototype into coupling
//! targets, inverting sampled monotone design curves (coupling versus spacing,
//! external Q versus tap position) to physical dimensions, and evaluating a
//! multi-term Debye permittivity model.
//!
//! The conversion step is closed-form narrowband synthesis: for a bandpass
//! filter of fractional bandwidth `Δ = B / fc` built from `n` coupled
//! resonators with prototype values `g0..g_{n+1}`,
//!
//! ```text
//! Q_e,in  = g0·g1 / Δ        Q_e,out = g_n·g_{n+1} / Δ
//! K_{i,i+1} = Δ / sqrt(g_i·g_{i+1})        i = 1..n-1
//! ```
//!
//! Design curves arrive as sparse sampled data (typically digitized from a
//! parameter sweep), so the interpolant must not invent wiggles: a
//! shape-preserving monotone cubic (Fritsch–Carlson slopes) is used, and
//! extrapolation beyond the sampled range is refused rather than guessed.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{as_f64, lit, Real};

/// Relative-to-range tolerance the curve inverter drives the residual below.
const INVERSION_TOLERANCE_REL: f64 = 1e-9;

/// Fractional bandwidth above which the narrowband synthesis formulas start
/// to drift from full network synthesis; construction warns past this point.
const NARROWBAND_LIMIT: f64 = 0.3;

/// Low-pass prototype of an `n`-resonator bandpass filter: element values
/// `g0..g_{n+1}` plus the band it is to be realized over.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPrototype<T> {
    g: Vec<T>,
    fc: T,
    bandwidth: T,
}

impl<T: Real> FilterPrototype<T> {
    /// Builds a prototype from element values `g0..g_{n+1}`, a center
    /// frequency, and an absolute bandwidth (both in Hz).
    ///
    /// Requires at least two internal resonators (four `g` values), all `g`
    /// positive, and a positive band. Fractional bandwidths above 0.3 are
    /// accepted with a warning: the synthesis formulas are narrowband
    /// approximations.
    pub fn new(g: Vec<T>, fc: T, bandwidth: T) -> Result<Self> {
        if g.len() < 4 {
            return Err(Error::invalid(format!(
                "a prototype needs at least 4 element values (g0..g3) for two \
                 coupled resonators; got {}",
                g.len()
            )));
        }
        if let Some(bad) = g.iter().find(|v| !(v.is_finite() && **v > T::zero())) {
            return Err(Error::invalid(format!(
                "prototype element values must be positive and finite; got {bad}"
            )));
        }
        if !(fc.is_finite() && fc > T::zero()) {
            return Err(Error::invalid(format!(
                "center frequency must be positive and finite; got {fc} Hz"
            )));
        }
        if !(bandwidth.is_finite() && bandwidth > T::zero()) {
            return Err(Error::invalid(format!(
                "bandwidth must be positive and finite; got {bandwidth} Hz"
            )));
        }
        let delta = bandwidth / fc;
        if delta > lit(NARROWBAND_LIMIT) {
            log::warn!(
                "fractional bandwidth {delta} exceeds {NARROWBAND_LIMIT}; the \
                 narrowband coupling formulas lose accuracy this wide"
            );
        }
        Ok(Self { g, fc, bandwidth })
    }

    /// Number of resonators `n` (two fewer than the element count).
    pub fn order(&self) -> usize {
        self.g.len() - 2
    }

    /// Element values `g0..g_{n+1}`.
    pub fn g(&self) -> &[T] {
        &self.g
    }

    /// Center frequency in Hz.
    pub fn center_frequency(&self) -> T {
        self.fc
    }

    /// Absolute bandwidth in Hz.
    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    /// Fractional bandwidth `Δ = B / fc`.
    pub fn fractional_bandwidth(&self) -> T {
        self.bandwidth / self.fc
    }
}

/// Coupling targets realizing a [`FilterPrototype`]: external quality factors
/// at the two ports and the `n-1` inter-resonator coupling coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingTargets<T> {
    /// External Q of the input resonator, `g0·g1/Δ`.
    pub q_e_in: T,
    /// External Q of the output resonator, `g_n·g_{n+1}/Δ`.
    pub q_e_out: T,
    /// Inter-resonator couplings `K_{i,i+1} = Δ/sqrt(g_i·g_{i+1})`, `i = 1..n-1`.
    pub k: Vec<T>,
}

/// Converts a low-pass prototype into the external Qs and inter-resonator
/// couplings that realize it at the prototype's band.
///
/// A palindromic prototype yields `q_e_in == q_e_out` and a palindromic `k`
/// sequence exactly (the products `g_i·g_{i+1}` pair up term for term).
pub fn coupling_targets<T: Real>(proto: &FilterPrototype<T>) -> CouplingTargets<T> {
    let delta = proto.fractional_bandwidth();
    let g = proto.g();
    let n = proto.order();
    let q_e_in = g[0] * g[1] / delta;
    let q_e_out = g[n] * g[n + 1] / delta;
    let k = (1..n).map(|i| delta / (g[i] * g[i + 1]).sqrt()).collect();
    CouplingTargets { q_e_in, q_e_out, k }
}

/// Strictly monotone sampled curve with a shape-preserving cubic interpolant,
/// supporting forward evaluation and numeric inversion.
///
/// The interpolant is the Fritsch–Carlson monotone cubic: it passes through
/// every sample, never overshoots the sampled range, and is strictly monotone
/// wherever the data are. Evaluation and inversion outside the sampled span
/// are errors — design curves are strongly nonlinear off the measured range,
/// so extrapolating them silently would be worse than refusing.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCurve<T> {
    x: Vec<T>,
    y: Vec<T>,
    /// Interpolant slope at each knot.
    slopes: Vec<T>,
    increasing: bool,
}

impl<T: Real> MonotoneCurve<T> {
    /// Builds a curve from `(x, y)` samples: at least three, `x` strictly
    /// increasing, `y` strictly monotone (either direction), all finite.
    pub fn new(samples: &[(T, T)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::invalid(format!(
                "a monotone curve needs at least 3 samples; got {}",
                samples.len()
            )));
        }
        if samples
            .iter()
            .any(|(x, y)| !(x.is_finite() && y.is_finite()))
        {
            return Err(Error::invalid("curve samples must be finite"));
        }
        let x: Vec<T> = samples.iter().map(|s| s.0).collect();
        let y: Vec<T> = samples.iter().map(|s| s.1).collect();
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "curve abscissae must be strictly increasing",
            ));
        }
        let increasing = y[1] > y[0];
        let ordered = |a: T, b: T| if increasing { b > a } else { b < a };
        if y.windows(2).any(|w| !ordered(w[0], w[1])) {
            return Err(Error::invalid(
                "curve ordinates must be strictly monotone (no repeats, no \
                 direction changes)",
            ));
        }
        let slopes = monotone_slopes(&x, &y);
        Ok(Self {
            x,
            y,
            slopes,
            increasing,
        })
    }

    /// Sampled abscissae.
    pub fn xs(&self) -> &[T] {
        &self.x
    }

    /// Sampled ordinates.
    pub fn ys(&self) -> &[T] {
        &self.y
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.x.len()
    }

    /// Always false: construction requires three samples.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when `y` increases with `x`.
    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    /// Sampled `x` span as `(min, max)`.
    pub fn x_range(&self) -> (T, T) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Sampled `y` span as `(min, max)` regardless of direction.
    pub fn y_range(&self) -> (T, T) {
        let first = self.y[0];
        let last = self.y[self.y.len() - 1];
        if self.increasing {
            (first, last)
        } else {
            (last, first)
        }
    }

    /// Evaluates the interpolant at `x`, which must lie within the sampled
    /// span (inclusive).
    pub fn evaluate(&self, x: T) -> Result<T> {
        if !x.is_finite() {
            return Err(Error::invalid(format!(
                "curve abscissa must be finite; got {x}"
            )));
        }
        let (lo, hi) = self.x_range();
        if x < lo || x > hi {
            return Err(Error::invalid(format!(
                "abscissa {x} outside sampled span [{lo}, {hi}]; the curve is \
                 not extrapolated"
            )));
        }
        // partition_point returns the first knot > x, so seg is the interval
        // [x_seg, x_seg+1] containing x, clamped for x == last knot.
        let seg = self
            .x
            .partition_point(|&knot| knot <= x)
            .saturating_sub(1)
            .min(self.x.len() - 2);
        Ok(self.eval_segment(seg, x))
    }

    /// Hermite evaluation on segment `i` (no range checks).
    fn eval_segment(&self, i: usize, x: T) -> T {
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        h00 * self.y[i]
            + h10 * h * self.slopes[i]
            + h01 * self.y[i + 1]
            + h11 * h * self.slopes[i + 1]
    }

    /// Solves `evaluate(x) == target` for `x`.
    ///
    /// A target equal to a sample's ordinate returns that sample's abscissa
    /// exactly. Otherwise the bracketing segment is found and bisected until
    /// the residual falls below `1e-9` of the curve's full `y` span. Targets
    /// outside the sampled range are refused with the nearest endpoint.
    pub fn invert(&self, target: T) -> Result<T> {
        if !target.is_finite() {
            return Err(Error::invalid(format!(
                "inversion target must be finite; got {target}"
            )));
        }
        let (y_min, y_max) = self.y_range();
        if target < y_min || target > y_max {
            let nearest_low = (target - y_min).abs() <= (target - y_max).abs();
            let nearest_x = match (nearest_low, self.increasing) {
                (true, true) | (false, false) => self.x[0],
                _ => self.x[self.x.len() - 1],
            };
            return Err(Error::CurveOutOfRange {
                target: as_f64(target),
                y_min: as_f64(y_min),
                y_max: as_f64(y_max),
                nearest_x: as_f64(nearest_x),
            });
        }
        // The interpolant passes through the samples, so a knot hit is exact.
        if let Some(i) = self.y.iter().position(|&y| y == target) {
            return Ok(self.x[i]);
        }
        // Monotone knot ordinates: binary-search the bracketing segment.
        let seg = if self.increasing {
            self.y.partition_point(|&y| y < target) - 1
        } else {
            self.y.partition_point(|&y| y > target) - 1
        };
        let tol = lit::<T>(INVERSION_TOLERANCE_REL) * (y_max - y_min);
        let half = lit::<T>(0.5);
        let mut lo = self.x[seg];
        let mut hi = self.x[seg + 1];
        let mut mid = half * (lo + hi);
        // 200 halvings exhaust an f64 interval; the loop exits on tolerance
        // long before that for any non-degenerate curve.
        for _ in 0..200 {
            mid = half * (lo + hi);
            let residual = self.eval_segment(seg, mid) - target;
            if residual.abs() <= tol || mid <= lo || mid >= hi {
                break;
            }
            let overshoot = if self.increasing {
                residual > T::zero()
            } else {
                residual < T::zero()
            };
            if overshoot {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(mid)
    }
}

/// Fritsch–Carlson knot slopes for monotone cubic interpolation.
///
/// Interior slopes are the weighted harmonic mean of adjacent secants (zero
/// where the secants disagree in sign, which cannot happen for strictly
/// monotone data); end slopes use the one-sided three-point estimate, clamped
/// so the end segments stay monotone.
fn monotone_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let h: Vec<T> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let d: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![T::zero(); n];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= T::zero() {
            m[i] = T::zero();
        } else {
            let w1 = lit::<T>(2.0) * h[i] + h[i - 1];
            let w2 = h[i] + lit::<T>(2.0) * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m[0] = edge_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

/// One-sided three-point slope estimate at an endpoint, clamped for shape
/// preservation: `h0`/`d0` belong to the end segment, `h1`/`d1` to its
/// neighbor.
fn edge_slope<T: Real>(h0: T, h1: T, d0: T, d1: T) -> T {
    let slope = ((lit::<T>(2.0) * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if slope * d0 <= T::zero() {
        T::zero()
    } else if d0 * d1 <= T::zero() && slope.abs() > lit::<T>(3.0) * d0.abs() {
        lit::<T>(3.0) * d0
    } else {
        slope
    }
}

/// Debye relaxation term: pole strength and relaxation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DebyeTerm<T> {
    /// Permittivity contribution at zero frequency (dimensionless, ≥ 0).
    pub delta_eps: T,
    /// Relaxation time in seconds (> 0).
    pub tau_seconds: T,
}

/// Multi-term Debye dielectric model,
/// `ε(ω) = ε_inf + Σ_m Δε_m / (1 + jωτ_m)`.
///
/// The form is passive: `Im ε ≤ 0` for every `f ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DebyeModel<T> {
    eps_inf: T,
    terms: Vec<DebyeTerm<T>>,
}

impl<T: Real> DebyeModel<T> {
    /// Builds a model from the optical-limit permittivity and relaxation
    /// terms. Requires `eps_inf ≥ 1`, every `delta_eps ≥ 0`, every `tau > 0`.
    pub fn new(eps_inf: T, terms: Vec<DebyeTerm<T>>) -> Result<Self> {
        if !(eps_inf.is_finite() && eps_inf >= T::one()) {
            return Err(Error::invalid(format!(
                "high-frequency permittivity must be finite and at least 1; got {eps_inf}"
            )));
        }
        for (i, term) in terms.iter().enumerate() {
            if !(term.delta_eps.is_finite() && term.delta_eps >= T::zero()) {
                return Err(Error::invalid(format!(
                    "term {i}: pole strength must be finite and non-negative; got {}",
                    term.delta_eps
                )));
            }
            if !(term.tau_seconds.is_finite() && term.tau_seconds > T::zero()) {
                return Err(Error::invalid(format!(
                    "term {i}: relaxation time must be finite and positive; got {} s",
                    term.tau_seconds
                )));
            }
        }
        Ok(Self { eps_inf, terms })
    }

    /// Optical-limit permittivity `ε_inf`.
    pub fn eps_inf(&self) -> T {
        self.eps_inf
    }

    /// Relaxation terms.
    pub fn terms(&self) -> &[DebyeTerm<T>] {
        &self.terms
    }

    /// Complex relative permittivity at `f` Hz (`f ≥ 0`).
    pub fn permittivity(&self, f: T) -> Result<Complex<T>> {
        if !(f.is_finite() && f >= T::zero()) {
            return Err(Error::invalid(format!(
                "permittivity is evaluated at non-negative finite frequencies; got {f} Hz"
            )));
        }
        let omega = lit::<T>(2.0) * T::PI() * f;
        let mut eps = Complex::new(self.eps_inf, T::zero());
        for term in &self.terms {
            let denom = Complex::new(T::one(), omega * term.tau_seconds);
            eps += Complex::new(term.delta_eps, T::zero()) / denom;
        }
        Ok(eps)
    }

    /// Real part of the relative permittivity at `f` Hz.
    pub fn relative_permittivity(&self, f: T) -> Result<T> {
        Ok(self.permittivity(f)?.re)
    }

    /// Loss tangent `-Im ε / Re ε` at `f` Hz.
    pub fn loss_tangent(&self, f: T) -> Result<T> {
        let eps = self.permittivity(f)?;
        Ok(-eps.im / eps.re)
    }
}
