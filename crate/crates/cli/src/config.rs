//! Run configuration: a single JSON document with sections `system`,
//! `baths`, `solver`, `evolve`, `sweep`, `output`.
//!
//! Sweep axes name parameters by dotted paths (`baths.R.temperature`,
//! `system.e_e`, ...) and are applied in listed order at every grid
//! point; the virtual path `bath_temperature_delta` sets the right bath
//! to `T_L + value` after the earlier axes have been applied.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use neqcoh::model::{BathLabel, BathSpec, InterferenceSpec, SpectralModel, SystemSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub baths: BathsConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathsConfig {
    #[serde(rename = "L")]
    pub left: BathConfig,
    #[serde(rename = "R")]
    pub right: BathConfig,
}

/// One bath; the label comes from its position in [`BathsConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub temperature: f64,
    pub spectrum: SpectralModel,
    #[serde(default = "default_interference")]
    pub interference: InterferenceSpec,
}

fn default_interference() -> InterferenceSpec {
    InterferenceSpec::maximal()
}

impl BathConfig {
    pub fn to_spec(&self, label: BathLabel) -> Result<BathSpec> {
        BathSpec::new(
            label,
            self.temperature,
            self.spectrum.clone(),
            self.interference.clone(),
        )
        .with_context(|| format!("baths.{label}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    #[default]
    Nullspace,
    Bloch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub method: SolverMethod,
    /// Seed for every random draw (explicit initial states, verify checks).
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    7
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolverMethod::Nullspace,
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub initial: InitialState,
    pub t_end: f64,
    /// Defaults to 0.01 / (largest transition gap).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Record every n-th step; default aims at ~2000 samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Named(NamedState),
    /// Explicit density matrix, rows of (re, im) entry pairs.
    Explicit {
        matrix: Vec<Vec<(f64, f64)>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedState {
    Ground,
    MaximallyMixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<SweepAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted parameter path; see [`apply_path`] for the supported set.
    pub path: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate().context("system")?;
        self.baths.left.to_spec(BathLabel::L)?;
        self.baths.right.to_spec(BathLabel::R)?;
        if let Some(sweep) = &self.sweep {
            if sweep.axes.is_empty() {
                bail!("sweep.axes: need at least one axis");
            }
            for (i, axis) in sweep.axes.iter().enumerate() {
                if axis.count < 1 {
                    bail!("sweep.axes[{i}].count: must be >= 1");
                }
                // reject unknown paths up front by probing on a copy
                let mut probe = self.clone();
                apply_path(&mut probe, &axis.path, axis.min)
                    .with_context(|| format!("sweep.axes[{i}].path"))?;
            }
        }
        if let Some(evolve) = &self.evolve {
            if evolve.t_end < 0.0 {
                bail!("evolve.t_end: must be >= 0");
            }
            if let Some(dt) = evolve.dt {
                if dt <= 0.0 {
                    bail!("evolve.dt: must be > 0");
                }
            }
            if let InitialState::Explicit { matrix } = &evolve.initial {
                let d = self.system.dim();
                if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
                    bail!("evolve.initial.matrix: must be {d}x{d} for this system");
                }
            }
        }
        Ok(())
    }

    pub fn bath_specs(&self) -> Result<[BathSpec; 2]> {
        Ok([
            self.baths.left.to_spec(BathLabel::L)?,
            self.baths.right.to_spec(BathLabel::R)?,
        ])
    }
}

/// Set one dotted parameter path to a value.
pub fn apply_path(config: &mut RunConfig, path: &str, value: f64) -> Result<()> {
    match path {
        "baths.L.temperature" => config.baths.left.temperature = value,
        "baths.R.temperature" => config.baths.right.temperature = value,
        "bath_temperature_delta" => {
            config.baths.right.temperature = config.baths.left.temperature + value;
        }
        "baths.L.interference.phase" => config.baths.left.interference.phase = value,
        "baths.R.interference.phase" => config.baths.right.interference.phase = value,
        "baths.L.interference.weight.value" => set_weight(&mut config.baths.left, value, path)?,
        "baths.R.interference.weight.value" => set_weight(&mut config.baths.right, value, path)?,
        "baths.L.spectrum.gamma11" => set_flat(&mut config.baths.left, 1, value, path)?,
        "baths.L.spectrum.gamma22" => set_flat(&mut config.baths.left, 2, value, path)?,
        "baths.R.spectrum.gamma11" => set_flat(&mut config.baths.right, 1, value, path)?,
        "baths.R.spectrum.gamma22" => set_flat(&mut config.baths.right, 2, value, path)?,
        _ if path.starts_with("system.") => set_system(&mut config.system, path, value)?,
        other => {
            bail!("unknown parameter path '{other}' (see `neqcoh schema` for the supported set)")
        }
    }
    Ok(())
}

fn set_weight(bath: &mut BathConfig, value: f64, path: &str) -> Result<()> {
    match &mut bath.interference.weight {
        neqcoh::model::WeightFactorModel::Constant { value: v } => {
            *v = value;
            Ok(())
        }
        _ => bail!("{path}: weight model is not 'constant'"),
    }
}

fn set_flat(bath: &mut BathConfig, pair: usize, value: f64, path: &str) -> Result<()> {
    match &mut bath.spectrum {
        SpectralModel::Flat { gamma11, gamma22 } => {
            if pair == 1 {
                *gamma11 = value;
            } else {
                *gamma22 = value;
            }
            Ok(())
        }
        _ => bail!("{path}: spectrum model is not 'flat'"),
    }
}

fn set_system(system: &mut SystemSpec, path: &str, value: f64) -> Result<()> {
    let field = path.trim_start_matches("system.");
    let ok = match system {
        SystemSpec::Lambda { e_g1, e_g2, e_e } => match field {
            "e_g1" => {
                *e_g1 = value;
                true
            }
            "e_g2" => {
                *e_g2 = value;
                true
            }
            "e_e" => {
                *e_e = value;
                true
            }
            _ => false,
        },
        SystemSpec::Vee { e_g, e_e1, e_e2 } | SystemSpec::Xi { e_g, e_e1, e_e2 } => match field {
            "e_g" => {
                *e_g = value;
                true
            }
            "e_e1" => {
                *e_e1 = value;
                true
            }
            "e_e2" => {
                *e_e2 = value;
                true
            }
            _ => false,
        },
        SystemSpec::CoupledTls { omega1, omega2, g } => match field {
            "omega1" => {
                *omega1 = value;
                true
            }
            "omega2" => {
                *omega2 = value;
                true
            }
            "g" => {
                *g = value;
                true
            }
            _ => false,
        },
    };
    if !ok {
        bail!("unknown parameter path 'system.{field}' for this system kind");
    }
    Ok(())
}

/// Human-readable config schema printed by `neqcoh schema`.
pub const SCHEMA_TEXT: &str = r#"Configuration document (JSON object)

system:            the open system (tagged by "kind")
  {"kind": "lambda", "e_g1": 0.0, "e_g2": 0.01, "e_e": 1.005}
  {"kind": "vee",    "e_g": 0.0, "e_e1": 0.995, "e_e2": 1.005}
  {"kind": "xi",     "e_g": 0.0, "e_e1": 1.005, "e_e2": 2.0}
  {"kind": "coupled_tls", "omega1": 1.05, "omega2": 0.95, "g": 0.05}

baths:             the two heat baths, keyed "L" and "R"
  temperature:     real >= 0 (k_B = 1)
  spectrum:        diagonal coupling spectra gamma_11, gamma_22
    {"type": "flat", "gamma11": 0.01, "gamma22": 0.02}
    {"type": "tabulated", "entries": [{"frequency": 1.005, "gamma11": ..., "gamma22": ...}, ...]}
    {"type": "logistic_step", "pair1": {"low": ..., "high": ..., "center": ..., "width": ...}, "pair2": {...}}
  interference:    cross-spectrum construction (optional; defaults to full weight, zero phase)
    weight:        {"type": "constant", "value": 0..1}
                   {"type": "dimensional", "d": 1|2|3, "distance_scale": x0 >= 0}
    phase:         phase of gamma_12 in radians
  For coupled_tls systems each bath couples to one qubit through its
  gamma11 channel; the interference section is ignored (the cross terms
  come from the eigenbasis structure itself).

solver:            optional
  method:          "nullspace" (default) or "bloch" (lambda/vee only)
  seed:            integer seed for random draws (default 7)

evolve:            required by `neqcoh evolve`
  initial:         "ground" | "maximally-mixed" | {"matrix": [[[re, im], ...], ...]}
  t_end:           end time (hbar = 1 units)
  dt:              step (default 0.01 / largest gap)
  sample_stride:   record every n-th step (default targets ~2000 samples)

sweep:             required by `neqcoh sweep`
  axes:            [{"path": ..., "min": ..., "max": ..., "count": ...}, ...]
                   applied in order at every grid point; first axis is the
                   slowest (outermost) loop
  paths:           baths.L.temperature      baths.R.temperature
                   bath_temperature_delta   (sets T_R = T_L + value)
                   baths.{L,R}.spectrum.gamma11 / gamma22   (flat spectra)
                   baths.{L,R}.interference.phase
                   baths.{L,R}.interference.weight.value    (constant weight)
                   system.<field>           (e_g1, e_g2, e_e / e_g, e_e1, e_e2 /
                                             omega1, omega2, g per kind)

output:            optional; command-line --out/--format take precedence
  format:          "csv" (default) or "json"
  path:            output file (stdout when absent)
"#;
