use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::layout::{make_layout, AtomLayout, LayoutKind};
use crate::liouvillian::{DensityMatrix, DriveConvention, DriveSpec};
use crate::linalg::{CVector, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub drive: DriveConfig,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: LayoutKind,
    /// κΔx/π
    pub spacing_over_pi: f64,
    #[serde(default = "one")]
    pub gamma0: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(default)]
    pub rabi: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default)]
    pub convention: DriveConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedState {
    #[default]
    Gg,
    Ee,
    Beta,
}

/// A named two-atom state, or explicit `[re, im]` amplitudes over the
/// product basis |gg⟩, |ge⟩, |eg⟩, |ee⟩ (normalized on use).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Named(NamedState),
    Amplitudes(Vec<[f64; 2]>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Named(NamedState::Gg)
    }
}

impl InitialState {
    pub fn density_matrix(&self, dim: usize) -> Result<DensityMatrix> {
        let amps: Vec<C64> = match self {
            InitialState::Named(NamedState::Gg) => return DensityMatrix::basis_state(dim, 0),
            InitialState::Named(NamedState::Ee) => return DensityMatrix::basis_state(dim, dim - 1),
            InitialState::Named(NamedState::Beta) => {
                if dim != 4 {
                    return Err(Error::Config("the beta state needs two atoms".into()));
                }
                return DensityMatrix::pure(&beta_state());
            }
            InitialState::Amplitudes(a) => a.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        };
        if amps.len() != dim {
            return Err(Error::Config(format!("initial_state has {} amplitudes, expected {dim}", amps.len())));
        }
        DensityMatrix::pure(&CVector::from_vec(amps))
    }
}

/// |β⟩ = (|ge⟩ − |eg⟩)/√2
pub fn beta_state() -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, 0.0)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// Horizon in 1/γ₀; when absent it is chosen from the slowest decay mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    401
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t_max: None,
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    PGg,
    PGe,
    PEg,
    PEe,
    PBeta,
    PPsiPlus,
    PPsiMinus,
    Concurrence,
    Intensity,
    G2Zero,
    MandelQ,
    RhoEe,
    CoherenceSum,
    RateEPlus,
    RateEMinus,
    RatePlusG,
    RateMinusG,
    /// Largest concurrence reached during the evolution.
    ConcurrenceMax,
    TimeOfMax,
}

impl Observable {
    pub const ALL: [Observable; 19] = [
        Self::PGg,
        Self::PGe,
        Self::PEg,
        Self::PEe,
        Self::PBeta,
        Self::PPsiPlus,
        Self::PPsiMinus,
        Self::Concurrence,
        Self::Intensity,
        Self::G2Zero,
        Self::MandelQ,
        Self::RhoEe,
        Self::CoherenceSum,
        Self::RateEPlus,
        Self::RateEMinus,
        Self::RatePlusG,
        Self::RateMinusG,
        Self::ConcurrenceMax,
        Self::TimeOfMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PGg => "p_gg",
            Self::PGe => "p_ge",
            Self::PEg => "p_eg",
            Self::PEe => "p_ee",
            Self::PBeta => "p_beta",
            Self::PPsiPlus => "p_psi_plus",
            Self::PPsiMinus => "p_psi_minus",
            Self::Concurrence => "concurrence",
            Self::Intensity => "intensity",
            Self::G2Zero => "g2_zero",
            Self::MandelQ => "mandel_q",
            Self::RhoEe => "rho_ee",
            Self::CoherenceSum => "coherence_sum",
            Self::RateEPlus => "rate_e_plus",
            Self::RateEMinus => "rate_e_minus",
            Self::RatePlusG => "rate_plus_g",
            Self::RateMinusG => "rate_minus_g",
            Self::ConcurrenceMax => "concurrence_max",
            Self::TimeOfMax => "t_at_max",
        }
    }

    /// Needs a time evolution rather than a steady state.
    pub fn is_transient(self) -> bool {
        matches!(self, Self::ConcurrenceMax | Self::TimeOfMax)
    }
}

/// One or two swept parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepConfig {
    Single(SweepAxis),
    Grid(Vec<SweepAxis>),
}

impl SweepConfig {
    pub fn axes(&self) -> &[SweepAxis] {
        match self {
            SweepConfig::Single(a) => std::slice::from_ref(a),
            SweepConfig::Grid(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted config path of a numeric field, e.g. `drive.rabi`.
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n)
                .map(|k| {
                    if k == n - 1 {
                        self.max
                    } else {
                        self.min + (self.max - self.min) * k as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }

    pub fn resolution(&self) -> f64 {
        if self.points > 1 {
            (self.max - self.min).abs() / (self.points - 1) as f64
        } else {
            0.0
        }
    }
}

/// Config paths that can be swept. `delta_rel` (δ₁₂/Δ₁₂) is only
/// meaningful for the drive-coupling scenario, which has no model to build.
pub const SWEEPABLE: [&str; 6] = [
    "delta_rel",
    "geometry.spacing_over_pi",
    "geometry.gamma0",
    "drive.rabi",
    "drive.detuning",
    "time.t_max",
];

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite, got {x}")))
    }
}

impl ScenarioConfig {
    pub fn new(kind: LayoutKind, spacing_over_pi: f64) -> Self {
        Self {
            geometry: GeometryConfig {
                kind,
                spacing_over_pi,
                gamma0: 1.0,
            },
            drive: DriveConfig::default(),
            initial_state: InitialState::default(),
            time: TimeConfig::default(),
            outputs: Vec::new(),
            sweep: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        check_finite("geometry.spacing_over_pi", g.spacing_over_pi)?;
        check_finite("geometry.gamma0", g.gamma0)?;
        if g.spacing_over_pi < 0.0 {
            return Err(Error::Config("geometry.spacing_over_pi must be >= 0".into()));
        }
        if g.gamma0 <= 0.0 {
            return Err(Error::Config("geometry.gamma0 must be > 0".into()));
        }
        check_finite("drive.rabi", self.drive.rabi)?;
        check_finite("drive.detuning", self.drive.detuning)?;
        if self.drive.rabi < 0.0 {
            return Err(Error::Config("drive.rabi must be >= 0".into()));
        }
        if let InitialState::Amplitudes(a) = &self.initial_state {
            if a.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Config("initial_state amplitudes must be finite".into()));
            }
            if a.len() != 4 {
                return Err(Error::Config(format!("initial_state needs 4 amplitudes, got {}", a.len())));
            }
            if a.iter().all(|&[re, im]| re == 0.0 && im == 0.0) {
                return Err(Error::Config("initial_state amplitudes are all zero".into()));
            }
        }
        if let Some(t) = self.time.t_max {
            check_finite("time.t_max", t)?;
            if t <= 0.0 {
                return Err(Error::Config("time.t_max must be > 0".into()));
            }
        }
        if self.time.samples < 2 {
            return Err(Error::Config("time.samples must be >= 2".into()));
        }
        if let Some(sweep) = &self.sweep {
            let axes = sweep.axes();
            if axes.is_empty() || axes.len() > 2 {
                return Err(Error::Config(format!("sweep needs one or two axes, got {}", axes.len())));
            }
            for axis in axes {
                if !SWEEPABLE.contains(&axis.parameter.as_str()) {
                    return Err(Error::Config(format!(
                        "cannot sweep `{}` (sweepable: {})",
                        axis.parameter,
                        SWEEPABLE.join(", ")
                    )));
                }
                check_finite("sweep.min", axis.min)?;
                check_finite("sweep.max", axis.max)?;
                if axis.points < 1 {
                    return Err(Error::Config("sweep.points must be >= 1".into()));
                }
            }
            if axes.len() == 2 && axes[0].parameter == axes[1].parameter {
                return Err(Error::Config("sweep axes must differ".into()));
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<AtomLayout> {
        make_layout(
            self.geometry.kind,
            self.geometry.spacing_over_pi * std::f64::consts::PI,
            self.geometry.gamma0,
        )
    }

    pub fn drive_spec(&self) -> Result<DriveSpec> {
        DriveSpec::with_convention(self.drive.rabi, self.drive.detuning, self.drive.convention)
    }

    /// Overrides one field by dotted path. `value` is parsed as JSON, falling
    /// back to a bare string (so `geometry.kind=small` works unquoted).
    pub fn set(&mut self, path: &str, value: &str) -> Result<()> {
        let parsed = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
        self.set_value(path, parsed)
    }

    pub fn set_value(&mut self, path: &str, value: Value) -> Result<()> {
        let mut root = serde_json::to_value(&*self).map_err(|e| Error::Config(e.to_string()))?;
        let keys: Vec<&str> = path.split('.').collect();
        if keys.iter().any(|k| k.is_empty()) {
            return Err(Error::Config(format!("invalid override path `{path}`")));
        }
        let mut node = &mut root;
        for key in &keys[..keys.len() - 1] {
            let obj = node
                .as_object_mut()
                .ok_or_else(|| Error::Config(format!("invalid override path `{path}`")))?;
            node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
        }
        node.as_object_mut()
            .ok_or_else(|| Error::Config(format!("invalid override path `{path}`")))?
            .insert(keys[keys.len() - 1].to_string(), value);
        let updated: ScenarioConfig =
            serde_json::from_value(root).map_err(|e| Error::Config(format!("override `{path}`: {e}")))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
    ScenarioConfig::from_json(&text).map_err(|e| e.context(path.display().to_string()))
}

pub fn write_config(config: &ScenarioConfig, path: &Path) -> Result<()> {
    std::fs::write(path, config.to_json() + "\n")?;
    Ok(())
}
