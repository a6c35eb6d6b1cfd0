//! Kerr-gate readout.
//!
//! A pump pulse co-propagating with the signal through a short fiber writes a
//! transient birefringence `Δφ(T) = 8π n₂ / (3 λ_s) ∫₀ᴸ I_p(T − d_w z) dz`, and
//! the gated fraction of the signal is `η(T) = sin²(2θ) sin²(Δφ(T)/2)`. `T` is
//! the signal's co-moving time in picoseconds and `d_w` the pump–signal walkoff
//! in ps/m.
//!
//! A delay scan multiplies the walk output (a train of short pulses, one per
//! occupied bin) by the gate window and records the transmitted energy at
//! each pump delay. Zero delay is the delay at which the gate window is
//! centered on bin `t0`.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

#[allow(unused_imports)] // std builds resolve these as inherent methods
use num_traits::Float;

use crate::error::{Error, Result};
use crate::state::{BinGrid, Distribution, Polarization};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PumpShape {
    Gaussian,
    /// Flat top of full width `fwhm` centered on zero.
    Rectangular,
}

/// Pump intensity profile in the signal's co-moving frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpPulse {
    /// Peak intensity in W/m² (any unit consistent with `n2`).
    pub peak_intensity: f64,
    pub fwhm_ps: f64,
    pub shape: PumpShape,
}

impl PumpPulse {
    pub const DEFAULT_FWHM_PS: f64 = 0.1;

    pub fn new(peak_intensity: f64, fwhm_ps: f64, shape: PumpShape) -> Result<Self> {
        if !peak_intensity.is_finite() || peak_intensity < 0.0 {
            return Err(Error::InvalidPump(
                "peak intensity must be finite and non-negative",
            ));
        }
        if !fwhm_ps.is_finite() || fwhm_ps <= 0.0 {
            return Err(Error::InvalidPump("fwhm must be positive"));
        }
        Ok(Self {
            peak_intensity,
            fwhm_ps,
            shape,
        })
    }

    /// `I_p(t)` for `t` in picoseconds.
    #[inline]
    pub fn intensity(&self, t_ps: f64) -> f64 {
        match self.shape {
            PumpShape::Gaussian => {
                let x = t_ps / self.fwhm_ps;
                self.peak_intensity * (-4.0 * LN_2 * x * x).exp()
            }
            PumpShape::Rectangular => {
                if t_ps.abs() <= 0.5 * self.fwhm_ps {
                    self.peak_intensity
                } else {
                    0.0
                }
            }
        }
    }

    fn with_peak(&self, peak_intensity: f64) -> Self {
        Self {
            peak_intensity,
            ..*self
        }
    }

    /// Half-width beyond which the profile is negligible.
    fn reach_ps(&self) -> f64 {
        match self.shape {
            PumpShape::Gaussian => 3.0 * self.fwhm_ps,
            PumpShape::Rectangular => 0.5 * self.fwhm_ps,
        }
    }
}

/// Physical parameters of the gate fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    /// Pump–signal polarization angle, radians.
    pub theta: f64,
    /// Nonlinear index, m²/W.
    pub n2: f64,
    /// Signal wavelength, m.
    pub lambda_s: f64,
    /// Fiber length, m.
    pub fiber_length: f64,
    /// `1/v_gp − 1/v_gs`, ps/m.
    pub walkoff_ps_per_m: f64,
    /// Simpson points along the fiber (odd, ≥ 3).
    pub z_steps: usize,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            theta: PI / 4.0,
            n2: 2.6e-20,
            lambda_s: 720e-9,
            fiber_length: 0.10,
            walkoff_ps_per_m: 2.0,
            z_steps: 2001,
        }
    }
}

impl GateConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fiber_length.is_finite() && self.fiber_length > 0.0) {
            return Err(Error::InvalidGate("fiber length must be positive"));
        }
        if self.z_steps < 3 || self.z_steps.is_multiple_of(2) {
            return Err(Error::InvalidGate("z_steps must be odd and at least 3"));
        }
        if !(self.lambda_s.is_finite() && self.lambda_s > 0.0) {
            return Err(Error::InvalidGate("signal wavelength must be positive"));
        }
        if !self.n2.is_finite() || !self.theta.is_finite() || !self.walkoff_ps_per_m.is_finite() {
            return Err(Error::NonFinite {
                what: "gate parameter",
            });
        }
        Ok(())
    }

    /// `8π n₂ / (3 λ_s)`.
    fn phase_prefactor(&self) -> f64 {
        8.0 * PI * self.n2 / (3.0 * self.lambda_s)
    }

    /// Co-moving time at which a symmetric pump gives the largest phase.
    pub fn gate_center_ps(&self) -> f64 {
        0.5 * self.walkoff_ps_per_m * self.fiber_length
    }
}

/// Composite Simpson rule with `points` (odd) samples on `[0, length]`.
fn simpson<F: Fn(f64) -> f64>(f: F, length: f64, points: usize) -> f64 {
    debug_assert!(points >= 3 && points % 2 == 1);
    let intervals = points - 1;
    let h = length / intervals as f64;
    let mut sum = f(0.0) + f(length);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0
}

/// Nonlinear phase with an explicit number of quadrature points.
pub fn nonlinear_phase_with_steps(
    t_ps: f64,
    cfg: &GateConfig,
    pump: &PumpPulse,
    z_steps: usize,
) -> f64 {
    let dw = cfg.walkoff_ps_per_m;
    let integral = simpson(|z| pump.intensity(t_ps - dw * z), cfg.fiber_length, z_steps);
    cfg.phase_prefactor() * integral
}

/// `Δφ(T)` in radians.
pub fn nonlinear_phase(t_ps: f64, cfg: &GateConfig, pump: &PumpPulse) -> f64 {
    nonlinear_phase_with_steps(t_ps, cfg, pump, cfg.z_steps)
}

/// `η(T) = sin²(2θ) sin²(Δφ(T)/2)`, in `[0, 1]`.
pub fn gate_efficiency(t_ps: f64, cfg: &GateConfig, pump: &PumpPulse) -> f64 {
    efficiency_from_phase(cfg.theta, nonlinear_phase(t_ps, cfg, pump))
}

#[inline]
fn efficiency_from_phase(theta: f64, phase: f64) -> f64 {
    let a = (2.0 * theta).sin();
    let b = (0.5 * phase).sin();
    (a * a) * (b * b)
}

/// Largest `Δφ(T)` over `T`, located by golden-section search around the
/// gate center. Both pump shapes are symmetric, so `Δφ` is unimodal.
pub fn max_nonlinear_phase(cfg: &GateConfig, pump: &PumpPulse) -> (f64, f64) {
    let center = cfg.gate_center_ps();
    let half = 0.5 * (cfg.walkoff_ps_per_m * cfg.fiber_length).abs() + pump.reach_ps();
    let phase = |t: f64| nonlinear_phase(t, cfg, pump);
    let (mut a, mut b) = (center - half, center + half);
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (phase(c), phase(d));
    for _ in 0..64 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = phase(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = phase(d);
        }
    }
    // The symmetric center is a maximizer too; keep whichever is larger.
    let (t_best, best) = if fc >= fd { (c, fc) } else { (d, fd) };
    let at_center = phase(center);
    if at_center >= best {
        (center, at_center)
    } else {
        (t_best, best)
    }
}

/// Finds the pump peak intensity that makes `max_T Δφ(T) = π`, by bracketing
/// and bisection.
pub fn calibrate_pump(cfg: &GateConfig, shape: PumpShape, fwhm_ps: f64) -> Result<PumpPulse> {
    cfg.validate()?;
    let base = PumpPulse::new(0.0, fwhm_ps, shape)?;
    let peak_phase = |intensity: f64| max_nonlinear_phase(cfg, &base.with_peak(intensity)).1;

    // Walkoff only lowers the peak phase, so the no-walkoff intensity is a
    // lower bound.
    let mut lo = PI / (cfg.phase_prefactor() * cfg.fiber_length);
    if !(lo.is_finite() && lo > 0.0) {
        return Err(Error::NoBracket);
    }
    let mut hi = lo;
    let mut bracketed = false;
    for _ in 0..400 {
        let p = peak_phase(hi);
        if !p.is_finite() {
            break;
        }
        if p >= PI {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !bracketed {
        return Err(Error::NoBracket);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * hi {
            break;
        }
        if peak_phase(mid) < PI {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let intensity = if (peak_phase(lo) - PI).abs() <= (peak_phase(hi) - PI).abs() {
        lo
    } else {
        hi
    };
    Ok(base.with_peak(intensity))
}

/// Gated intensity sampled against pump delay.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalTrace {
    samples: Vec<(f64, f64)>,
}

impl TemporalTrace {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyScan);
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::UnsortedScan);
        }
        for &(delay, value) in &samples {
            if !delay.is_finite() || !value.is_finite() {
                return Err(Error::NonFinite {
                    what: "trace sample",
                });
            }
            if value < 0.0 {
                return Err(Error::NegativeProbability(value));
            }
        }
        Ok(Self { samples })
    }

    /// `(delay_ps, intensity)` pairs in increasing delay.
    #[inline]
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Sample closest in delay to `delay_ps`.
    pub fn nearest(&self, delay_ps: f64) -> (f64, f64) {
        let idx = self.samples.partition_point(|s| s.0 < delay_ps);
        match idx {
            0 => self.samples[0],
            i if i == self.samples.len() => self.samples[i - 1],
            i => {
                let (below, above) = (self.samples[i - 1], self.samples[i]);
                if delay_ps - below.0 <= above.0 - delay_ps {
                    below
                } else {
                    above
                }
            }
        }
    }
}

/// Strictly increasing list of pump delays, ps.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayScan(Vec<f64>);

impl DelayScan {
    pub fn new(delays: Vec<f64>) -> Result<Self> {
        if delays.is_empty() {
            return Err(Error::EmptyScan);
        }
        if delays.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite { what: "scan delay" });
        }
        if delays.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::UnsortedScan);
        }
        Ok(Self(delays))
    }

    /// `start, start + step, …` up to `stop` (inclusive within rounding).
    pub fn uniform(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(stop >= start) {
            return Err(Error::EmptyScan);
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Self::new((0..count).map(|i| start + i as f64 * step).collect())
    }

    /// Scan covering every bin of `grid` with one bin of margin on each side.
    pub fn covering(grid: BinGrid, step: f64) -> Result<Self> {
        let spacing = grid.spacing_ps();
        Self::uniform(-spacing, grid.bin_count() as f64 * spacing, step)
    }

    #[inline]
    pub fn delays(&self) -> &[f64] {
        &self.0
    }
}

/// Signal-side settings of a trace synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalModel {
    /// FWHM of each time-bin pulse, ps.
    pub pulse_fwhm_ps: f64,
    /// Constant additive floor.
    pub background: f64,
}

impl Default for SignalModel {
    fn default() -> Self {
        Self {
            pulse_fwhm_ps: 0.3,
            background: 0.0,
        }
    }
}

/// Gate window tabulated on a uniform grid around its center.
struct GateWindow {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

const GATE_SAMPLES: usize = 2001;

impl GateWindow {
    fn tabulate(cfg: &GateConfig, pump: &PumpPulse) -> Self {
        let center = cfg.gate_center_ps();
        let half = 0.5 * (cfg.walkoff_ps_per_m * cfg.fiber_length).abs() + pump.reach_ps();
        let step = 2.0 * half / (GATE_SAMPLES - 1) as f64;
        let values = (0..GATE_SAMPLES)
            .map(|j| gate_efficiency(center - half + j as f64 * step, cfg, pump))
            .collect();
        Self {
            start: -half,
            step,
            values,
        }
    }

    fn half_width(&self) -> f64 {
        -self.start
    }

    /// `∫ η_c(x) g(x + offset) dx` by the trapezoid rule, with `g` a
    /// unit-area Gaussian of standard deviation `sigma`.
    fn overlap(&self, offset: f64, sigma: f64) -> f64 {
        let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
        let last = self.values.len() - 1;
        let mut sum = 0.0;
        for (j, &eta) in self.values.iter().enumerate() {
            if eta == 0.0 {
                continue;
            }
            let x = self.start + j as f64 * self.step + offset;
            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
            sum += w * eta * (-0.5 * (x / sigma) * (x / sigma)).exp();
        }
        sum * norm * self.step
    }
}

/// Simulated delay scan of the gated signal.
///
/// Each bin with probability `p` contributes a Gaussian pulse of area `p`
/// centered on its bin delay; the value at pump delay `Δτ` is the energy the
/// gate window passes, plus `signal.background`. Pass a single-polarization
/// component (see [`Distribution::component`]) to model the analyzer.
pub fn synthesize_trace(
    dist: &Distribution,
    cfg: &GateConfig,
    pump: &PumpPulse,
    signal: &SignalModel,
    scan: &DelayScan,
) -> Result<TemporalTrace> {
    check_signal(cfg, signal)?;
    trace_with_window(dist, &GateWindow::tabulate(cfg, pump), signal, scan)
}

fn check_signal(cfg: &GateConfig, signal: &SignalModel) -> Result<()> {
    cfg.validate()?;
    if !(signal.pulse_fwhm_ps > 0.0) || !(signal.background >= 0.0) {
        return Err(Error::InvalidPump(
            "signal fwhm must be positive and background non-negative",
        ));
    }
    Ok(())
}

fn trace_with_window(
    dist: &Distribution,
    window: &GateWindow,
    signal: &SignalModel,
    scan: &DelayScan,
) -> Result<TemporalTrace> {
    let sigma = signal.pulse_fwhm_ps / (2.0 * (2.0 * LN_2).sqrt());
    let reach = window.half_width() + 8.0 * sigma;
    let grid = dist.grid();
    let marginal = dist.bin_marginal();

    let samples = scan
        .delays()
        .iter()
        .map(|&delay| {
            let mut value = signal.background;
            for (m, &p) in marginal.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let offset = delay - grid.delay_ps(m);
                if offset.abs() > reach {
                    continue;
                }
                value += p * window.overlap(offset, sigma);
            }
            (delay, value)
        })
        .collect();
    TemporalTrace::new(samples)
}

/// Per-bin peak values read off one polarization's trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakReadout {
    pub polarization: Polarization,
    pub grid: BinGrid,
    pub peaks: Vec<f64>,
}

impl PeakReadout {
    pub fn total(&self) -> f64 {
        self.peaks.iter().sum()
    }
}

/// Takes the trace value at each bin delay `n · spacing` (nearest sample).
pub fn discretize_trace(
    trace: &TemporalTrace,
    grid: BinGrid,
    pol: Polarization,
) -> Result<PeakReadout> {
    let samples = trace.samples();
    let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
    let slack = 1e-9 * grid.spacing_ps();
    let peaks = (0..grid.bin_count())
        .map(|n| {
            let delay = grid.delay_ps(n);
            if delay < first - slack || delay > last + slack {
                return Err(Error::TraceNotCovering { delay_ps: delay });
            }
            Ok(trace.nearest(delay).1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PeakReadout {
        polarization: pol,
        grid,
        peaks,
    })
}

/// Merges the H and V readouts and renormalizes over both components.
///
/// An all-zero readout (for example a gate at θ = 0) stays all zero.
pub fn readout_distribution(h: &PeakReadout, v: &PeakReadout) -> Result<Distribution> {
    if h.grid != v.grid {
        return Err(Error::GridMismatch {
            left: h.grid.spacing_ps(),
            right: v.grid.spacing_ps(),
        });
    }
    let total = h.total() + v.total();
    let scale = if total > 0.0 { 1.0 / total } else { 0.0 };
    let mut flat = alloc::vec![0.0; h.grid.dimension()];
    for (readout, pol) in [(h, h.polarization), (v, v.polarization)] {
        for (m, &peak) in readout.peaks.iter().enumerate() {
            flat[2 * m + pol.index()] += peak * scale;
        }
    }
    Distribution::from_vector(h.grid, flat)
}

/// Both traces and the renormalized readout for one output distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    pub trace_h: TemporalTrace,
    pub trace_v: TemporalTrace,
    pub distribution: Distribution,
}

/// Scans both analyzer settings and discretizes the result.
pub fn read_out(
    dist: &Distribution,
    cfg: &GateConfig,
    pump: &PumpPulse,
    signal: &SignalModel,
    scan: &DelayScan,
) -> Result<Readout> {
    check_signal(cfg, signal)?;
    let grid = dist.grid();
    let window = GateWindow::tabulate(cfg, pump);
    let trace_h = trace_with_window(&dist.component(Polarization::H), &window, signal, scan)?;
    let trace_v = trace_with_window(&dist.component(Polarization::V), &window, signal, scan)?;
    let h = discretize_trace(&trace_h, grid, Polarization::H)?;
    let v = discretize_trace(&trace_v, grid, Polarization::V)?;
    let distribution = readout_distribution(&h, &v)?;
    Ok(Readout {
        trace_h,
        trace_v,
        distribution,
    })
}
