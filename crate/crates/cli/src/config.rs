//! Run configuration: a TOML file, validated into core types.
//!
//! Angles are given in degrees and converted to radians here. Every section
//! and key is optional; see the README for the full list and defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;
use timebin_qwalk_core::analysis::{reference_setup_losses, DriftModel, LossComponent};
use timebin_qwalk_core::kerr::{GateConfig, PumpShape, SignalModel};
use timebin_qwalk_core::{
    BinGrid, CoinParams, Complex64, InputSpec, Polarization, StepConfig, StepSchedule, Tolerances,
};

pub const DEFAULT_STEPS: usize = 18;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    seed: u64,
    steps: Option<usize>,
    output_dir: Option<PathBuf>,
    emit_plots: bool,
    bin_spacing_ps: Option<f64>,
    input: RawInput,
    schedule: RawSchedule,
    gate: RawGate,
    pump: RawPump,
    trace: RawTrace,
    variance: RawVariance,
    drift: RawDrift,
    budget: RawBudget,
    tolerances: RawTolerances,
    source: RawSource,
}

#[derive(Debug, Deserialize, Default, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum InputKind {
    #[default]
    SingleBin,
    TwoBin,
    Explicit,
}

#[derive(Debug, Deserialize, Clone, Copy)]
enum PolKey {
    H,
    V,
}

impl From<PolKey> for Polarization {
    fn from(p: PolKey) -> Self {
        match p {
            PolKey::H => Polarization::H,
            PolKey::V => Polarization::V,
        }
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct RawInput {
    kind: InputKind,
    alpha_re: Option<f64>,
    alpha_im: Option<f64>,
    beta_re: Option<f64>,
    beta_im: Option<f64>,
    k: Option<usize>,
    nu_deg: Option<f64>,
    entries: Vec<RawEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    pol: PolKey,
    bin: usize,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawSchedule {
    omega_deg: f64,
    gamma_deg: f64,
    loss_db: f64,
    shift: bool,
    steps: Vec<RawStep>,
}

impl Default for RawSchedule {
    fn default() -> Self {
        Self {
            omega_deg: 90.0,
            gamma_deg: 0.0,
            loss_db: StepConfig::DEFAULT_LOSS_DB,
            shift: true,
            steps: Vec::new(),
        }
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct RawStep {
    omega_deg: Option<f64>,
    gamma_deg: Option<f64>,
    loss_db: Option<f64>,
    shift: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawGate {
    theta_deg: f64,
    n2: f64,
    lambda_s_nm: f64,
    length_m: f64,
    walkoff_ps_per_m: f64,
    z_steps: usize,
}

impl Default for RawGate {
    fn default() -> Self {
        let g = GateConfig::default();
        Self {
            theta_deg: g.theta.to_degrees(),
            n2: g.n2,
            lambda_s_nm: g.lambda_s * 1e9,
            length_m: g.fiber_length,
            walkoff_ps_per_m: g.walkoff_ps_per_m,
            z_steps: g.z_steps,
        }
    }
}

#[derive(Debug, Deserialize, Default, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum ShapeKey {
    #[default]
    Gaussian,
    Rectangular,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawPump {
    shape: ShapeKey,
    fwhm_ps: f64,
    peak_intensity: Option<f64>,
}

impl Default for RawPump {
    fn default() -> Self {
        Self {
            shape: ShapeKey::Gaussian,
            fwhm_ps: timebin_qwalk_core::kerr::PumpPulse::DEFAULT_FWHM_PS,
            peak_intensity: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawTrace {
    signal_fwhm_ps: f64,
    background: f64,
    scan_step_ps: f64,
    scan_start_ps: Option<f64>,
    scan_stop_ps: Option<f64>,
}

impl Default for RawTrace {
    fn default() -> Self {
        let s = SignalModel::default();
        Self {
            signal_fwhm_ps: s.pulse_fwhm_ps,
            background: s.background,
            scan_step_ps: 0.05,
            scan_start_ps: None,
            scan_stop_ps: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawVariance {
    fit_min: usize,
    fit_max: Option<usize>,
}

impl Default for RawVariance {
    fn default() -> Self {
        Self {
            fit_min: 5,
            fit_max: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawDrift {
    sigma_gamma_deg: f64,
    sigma_omega_deg: f64,
    samples: usize,
    interval_h: f64,
    calibrate: bool,
    target: f64,
    calibration_seeds: usize,
}

impl Default for RawDrift {
    fn default() -> Self {
        Self {
            sigma_gamma_deg: 0.0,
            sigma_omega_deg: 0.0,
            samples: 50,
            interval_h: 1.0,
            calibrate: false,
            target: 0.97,
            calibration_seeds: 32,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawBudget {
    reference: bool,
    crystals: Option<u32>,
    components: Vec<RawComponent>,
}

impl Default for RawBudget {
    fn default() -> Self {
        Self {
            reference: true,
            crystals: None,
            components: Vec::new(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    name: String,
    loss_db: f64,
    #[serde(default = "one")]
    count: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawTolerances {
    norm: f64,
    conservation: f64,
}

impl Default for RawTolerances {
    fn default() -> Self {
        Self {
            norm: Tolerances::DEFAULT.norm,
            conservation: Tolerances::DEFAULT.conservation,
        }
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct RawSource {
    mean_photon_number: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSettings {
    pub shape: PumpShape,
    pub fwhm_ps: f64,
    /// `None`: calibrate for unit gate efficiency.
    pub peak_intensity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub step_ps: f64,
    pub start_ps: Option<f64>,
    pub stop_ps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceSettings {
    pub fit_min: usize,
    pub fit_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSettings {
    pub model: DriftModel,
    pub calibrate: bool,
    pub target: f64,
    pub calibration_seeds: usize,
}

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub emit_plots: bool,
    pub bin_spacing_ps: f64,
    pub input: InputSpec,
    pub schedule: StepSchedule,
    pub gate: GateConfig,
    pub pump: PumpSettings,
    pub signal: SignalModel,
    pub scan: ScanSettings,
    pub variance: VarianceSettings,
    pub drift: DriftSettings,
    pub budget: Vec<LossComponent>,
    pub tolerances: Tolerances,
    /// Recorded only; the walker is always a single photon.
    pub mean_photon_number: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn from_toml_str(text: &str, overrides: Overrides) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        build(raw, overrides)
    }

    /// Grid large enough for the whole walk.
    pub fn grid(&self) -> BinGrid {
        BinGrid::new(
            self.bin_spacing_ps,
            self.input.max_bin() + self.schedule.shift_count() + 1,
        )
        .expect("spacing validated at load time")
    }
}

fn finite(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(key, "must be finite"))
    }
}

fn positive(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(key, "must be positive"))
    }
}

fn non_negative(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(invalid(key, "must be finite and non-negative"))
    }
}

fn loss(key: &str, db: f64) -> Result<f64, ConfigError> {
    if db.is_finite() && db <= 0.0 {
        Ok(db)
    } else {
        Err(invalid(key, "loss in dB must be finite and ≤ 0"))
    }
}

fn build(raw: RawConfig, overrides: Overrides) -> Result<RunConfig, ConfigError> {
    let bin_spacing_ps = positive(
        "bin_spacing_ps",
        raw.bin_spacing_ps.unwrap_or(BinGrid::DEFAULT_SPACING_PS),
    )?;
    let input = build_input(&raw.input)?;
    let schedule = build_schedule(&raw.schedule, raw.steps, overrides.steps)?;
    let gate = build_gate(&raw.gate)?;

    let pump = PumpSettings {
        shape: match raw.pump.shape {
            ShapeKey::Gaussian => PumpShape::Gaussian,
            ShapeKey::Rectangular => PumpShape::Rectangular,
        },
        fwhm_ps: positive("pump.fwhm_ps", raw.pump.fwhm_ps)?,
        peak_intensity: raw
            .pump
            .peak_intensity
            .map(|p| non_negative("pump.peak_intensity", p))
            .transpose()?,
    };

    let signal = SignalModel {
        pulse_fwhm_ps: positive("trace.signal_fwhm_ps", raw.trace.signal_fwhm_ps)?,
        background: non_negative("trace.background", raw.trace.background)?,
    };
    let scan = ScanSettings {
        step_ps: positive("trace.scan_step_ps", raw.trace.scan_step_ps)?,
        start_ps: raw
            .trace
            .scan_start_ps
            .map(|x| finite("trace.scan_start_ps", x))
            .transpose()?,
        stop_ps: raw
            .trace
            .scan_stop_ps
            .map(|x| finite("trace.scan_stop_ps", x))
            .transpose()?,
    };
    if let (Some(a), Some(b)) = (scan.start_ps, scan.stop_ps) {
        if b < a {
            return Err(invalid(
                "trace.scan_stop_ps",
                "must not be below trace.scan_start_ps",
            ));
        }
    }

    let variance = VarianceSettings {
        fit_min: raw.variance.fit_min,
        fit_max: raw.variance.fit_max,
    };
    if let Some(max) = variance.fit_max {
        if max < variance.fit_min {
            return Err(invalid(
                "variance.fit_max",
                "must not be below variance.fit_min",
            ));
        }
    }

    let seed = overrides.seed.unwrap_or(raw.seed);
    let d = &raw.drift;
    let drift = DriftSettings {
        model: DriftModel {
            sigma_gamma: non_negative("drift.sigma_gamma_deg", d.sigma_gamma_deg)?.to_radians(),
            sigma_omega: non_negative("drift.sigma_omega_deg", d.sigma_omega_deg)?.to_radians(),
            seed,
            samples: d.samples,
            sample_interval_h: non_negative("drift.interval_h", d.interval_h)?,
        },
        calibrate: d.calibrate,
        target: d.target,
        calibration_seeds: d.calibration_seeds,
    };
    if drift.calibrate {
        if !(d.target > 0.0 && d.target < 1.0) {
            return Err(invalid("drift.target", "must lie strictly between 0 and 1"));
        }
        if d.calibration_seeds == 0 {
            return Err(invalid("drift.calibration_seeds", "must be at least 1"));
        }
        if d.samples < 2 {
            return Err(invalid(
                "drift.samples",
                "calibration needs at least 2 samples",
            ));
        }
    }

    let budget = build_budget(&raw.budget, schedule.len())?;

    let tolerances = Tolerances {
        norm: positive("tolerances.norm", raw.tolerances.norm)?,
        conservation: positive("tolerances.conservation", raw.tolerances.conservation)?,
    };

    let mean_photon_number = raw
        .source
        .mean_photon_number
        .map(|m| non_negative("source.mean_photon_number", m))
        .transpose()?;

    Ok(RunConfig {
        seed,
        output_dir: raw.output_dir,
        emit_plots: raw.emit_plots,
        bin_spacing_ps,
        input,
        schedule,
        gate,
        pump,
        signal,
        scan,
        variance,
        drift,
        budget,
        tolerances,
        mean_photon_number,
    })
}

fn build_input(raw: &RawInput) -> Result<InputSpec, ConfigError> {
    let only = |kind: &str, present: &[(&str, bool)]| -> Result<(), ConfigError> {
        match present.iter().find(|p| p.1) {
            Some((key, _)) => Err(invalid(
                format!("input.{key}"),
                format!("not used by kind = \"{kind}\""),
            )),
            None => Ok(()),
        }
    };
    let polarization_keys = [
        ("alpha_re", raw.alpha_re.is_some()),
        ("alpha_im", raw.alpha_im.is_some()),
        ("beta_re", raw.beta_re.is_some()),
        ("beta_im", raw.beta_im.is_some()),
    ];
    match raw.kind {
        InputKind::SingleBin => {
            only(
                "single_bin",
                &[
                    ("k", raw.k.is_some()),
                    ("nu_deg", raw.nu_deg.is_some()),
                    ("entries", !raw.entries.is_empty()),
                ],
            )?;
            let alpha = Complex64::new(
                finite("input.alpha_re", raw.alpha_re.unwrap_or(1.0))?,
                finite("input.alpha_im", raw.alpha_im.unwrap_or(0.0))?,
            );
            let beta = Complex64::new(
                finite("input.beta_re", raw.beta_re.unwrap_or(0.0))?,
                finite("input.beta_im", raw.beta_im.unwrap_or(0.0))?,
            );
            let norm = alpha.norm_sqr() + beta.norm_sqr();
            if (norm - 1.0).abs() > Tolerances::DEFAULT.norm {
                return Err(invalid(
                    "input.alpha_re/alpha_im/beta_re/beta_im",
                    format!("|alpha|² + |beta|² must be 1, got {norm}"),
                ));
            }
            Ok(InputSpec::SingleBin { alpha, beta })
        }
        InputKind::TwoBin => {
            only("two_bin", &polarization_keys)?;
            only("two_bin", &[("entries", !raw.entries.is_empty())])?;
            let k = raw
                .k
                .ok_or_else(|| invalid("input.k", "required for kind = \"two_bin\""))?;
            if k == 0 {
                return Err(invalid("input.k", "must be at least 1"));
            }
            let nu = finite("input.nu_deg", raw.nu_deg.unwrap_or(0.0))?.to_radians();
            Ok(InputSpec::TwoBin { k, nu })
        }
        InputKind::Explicit => {
            only("explicit", &polarization_keys)?;
            only(
                "explicit",
                &[("k", raw.k.is_some()), ("nu_deg", raw.nu_deg.is_some())],
            )?;
            if raw.entries.is_empty() {
                return Err(invalid("input.entries", "required for kind = \"explicit\""));
            }
            let mut entries = Vec::with_capacity(raw.entries.len());
            let mut norm = 0.0;
            for (i, e) in raw.entries.iter().enumerate() {
                let amp = Complex64::new(
                    finite(&format!("input.entries[{i}].re"), e.re)?,
                    finite(&format!("input.entries[{i}].im"), e.im)?,
                );
                norm += amp.norm_sqr();
                entries.push((e.pol.into(), e.bin, amp));
            }
            // Duplicates add amplitudes; the exact check happens on preparation.
            if !(norm > 0.0) {
                return Err(invalid("input.entries", "all amplitudes are zero"));
            }
            Ok(InputSpec::Explicit { entries })
        }
    }
}

fn build_schedule(
    raw: &RawSchedule,
    steps: Option<usize>,
    cli_steps: Option<usize>,
) -> Result<StepSchedule, ConfigError> {
    let omega = finite("schedule.omega_deg", raw.omega_deg)?;
    let gamma = finite("schedule.gamma_deg", raw.gamma_deg)?;
    let loss_db = loss("schedule.loss_db", raw.loss_db)?;
    let default_step = StepConfig {
        shift_enabled: raw.shift,
        ..StepConfig::with_loss_db(CoinParams::from_degrees(omega, gamma), loss_db)
            .map_err(|e| invalid("schedule.loss_db", e.to_string()))?
    };

    if raw.steps.is_empty() {
        let count = cli_steps.or(steps).unwrap_or(DEFAULT_STEPS);
        return Ok(StepSchedule::uniform(count, default_step));
    }

    let listed = raw.steps.len();
    if let Some(n) = steps {
        if n != listed {
            return Err(invalid(
                "steps",
                format!("is {n} but schedule.steps lists {listed} steps"),
            ));
        }
    }
    let mut list = Vec::with_capacity(listed);
    for (i, s) in raw.steps.iter().enumerate() {
        let key = |k: &str| format!("schedule.steps[{i}].{k}");
        let o = finite(&key("omega_deg"), s.omega_deg.unwrap_or(omega))?;
        let g = finite(&key("gamma_deg"), s.gamma_deg.unwrap_or(gamma))?;
        let db = loss(&key("loss_db"), s.loss_db.unwrap_or(loss_db))?;
        let step = StepConfig::with_loss_db(CoinParams::from_degrees(o, g), db)
            .map_err(|e| invalid(key("loss_db"), e.to_string()))?;
        list.push(StepConfig {
            shift_enabled: s.shift.unwrap_or(raw.shift),
            ..step
        });
    }
    let schedule = StepSchedule::new(list);
    match cli_steps {
        Some(n) if n > listed => Err(invalid(
            "--steps",
            format!("{n} exceeds the {listed} steps listed in schedule.steps"),
        )),
        Some(n) => Ok(schedule.truncated(n)),
        None => Ok(schedule),
    }
}

fn build_gate(raw: &RawGate) -> Result<GateConfig, ConfigError> {
    if raw.z_steps < 3 || raw.z_steps.is_multiple_of(2) {
        return Err(invalid("gate.z_steps", "must be odd and at least 3"));
    }
    Ok(GateConfig {
        theta: finite("gate.theta_deg", raw.theta_deg)?.to_radians(),
        n2: positive("gate.n2", raw.n2)?,
        lambda_s: positive("gate.lambda_s_nm", raw.lambda_s_nm)? / 1e9,
        fiber_length: positive("gate.length_m", raw.length_m)?,
        walkoff_ps_per_m: finite("gate.walkoff_ps_per_m", raw.walkoff_ps_per_m)?,
        z_steps: raw.z_steps,
    })
}

fn build_budget(raw: &RawBudget, steps: usize) -> Result<Vec<LossComponent>, ConfigError> {
    let mut list = if raw.reference {
        let crystals = match raw.crystals {
            Some(c) => c,
            None => {
                u32::try_from(steps).map_err(|_| invalid("budget.crystals", "too many steps"))?
            }
        };
        reference_setup_losses(crystals)
    } else {
        if raw.crystals.is_some() {
            return Err(invalid(
                "budget.crystals",
                "only used with budget.reference = true",
            ));
        }
        Vec::new()
    };
    for (i, c) in raw.components.iter().enumerate() {
        let db = loss(&format!("budget.components[{i}].loss_db"), c.loss_db)?;
        if c.count == 0 {
            return Err(invalid(
                format!("budget.components[{i}].count"),
                "must be at least 1",
            ));
        }
        list.push(LossComponent::new(c.name.clone(), db, c.count));
    }
    Ok(list)
}
