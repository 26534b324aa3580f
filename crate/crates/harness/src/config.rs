//! Scenario configuration: the JSON schema read by `nsopo run` and written by
//! `nsopo preset --emit-config`.

use serde::{Deserialize, Serialize};

use nsopo_core::constraints::MaterialSpec;
use nsopo_core::fock::ChainState;
use nsopo_core::hamiltonians::{kerr_rotation_phases, ShapingParams};
use nsopo_core::observables::{GridSpec, DEFAULT_PEAK_THRESHOLD};
use nsopo_core::propagate::EvolveConfig;
use nsopo_core::C64;

use crate::error::{HarnessError, Result};

/// One self-describing run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Absent only for material-only scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shaping: Option<ShapingParams>,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<LossSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kerr_rotation: Option<KerrRotation>,
    #[serde(default)]
    pub observables: Observables,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialSpec>,
    /// Fields chosen by calibration rather than taken from a source value.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub calibrated: Vec<Calibration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    Uniform {
        truncation: usize,
    },
    Coherent {
        alpha: C64,
        truncation: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_limit: Option<f64>,
    },
    SqueezedVacuum {
        r: f64,
        truncation: usize,
    },
    Fock {
        n: usize,
        truncation: usize,
    },
}

impl InitialState {
    pub fn build(&self) -> nsopo_core::Result<ChainState> {
        match *self {
            InitialState::Uniform { truncation } => ChainState::uniform(truncation),
            InitialState::Coherent { alpha, truncation, tail_limit: None } => ChainState::coherent(alpha, truncation),
            InitialState::Coherent { alpha, truncation, tail_limit: Some(l) } => {
                ChainState::coherent_with_tail_limit(alpha, truncation, l)
            }
            InitialState::SqueezedVacuum { r, truncation } => ChainState::squeezed_vacuum(r, truncation),
            InitialState::Fock { n, truncation } => ChainState::fock(n, truncation),
        }
    }

    pub fn truncation(&self) -> usize {
        match *self {
            InitialState::Uniform { truncation }
            | InitialState::Coherent { truncation, .. }
            | InitialState::SqueezedVacuum { truncation, .. }
            | InitialState::Fock { truncation, .. } => truncation,
        }
    }
}

/// Kerr phase `e^{i(g_ss+g_ii+g_is)t·m²}` applied after the shaping step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrRotation {
    pub g_ss: f64,
    pub g_ii: f64,
    pub g_is: f64,
    pub t: f64,
}

impl KerrRotation {
    pub fn phases(&self, truncation: usize) -> Vec<C64> {
        kerr_rotation_phases(self.g_ss, self.g_ii, self.g_is, self.t, truncation)
    }
}

/// Lossy two-mode evolution of the embedded chain state, sampled along the
/// way and compared with the lossless trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpec {
    /// `γ/Γ_cav` values; one lossy run each.
    pub strength_to_loss: Vec<f64>,
    /// Fidelity is recorded at `t = kτ/samples`, `k = 1..=samples`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// RK4 steps over the whole of `[0, τ]`.
    #[serde(default = "default_loss_steps")]
    pub n_steps: usize,
    #[serde(default = "default_loss_boundary")]
    pub boundary_limit: Option<f64>,
}

fn default_samples() -> usize {
    9
}

fn default_loss_steps() -> usize {
    900
}

fn default_loss_boundary() -> Option<f64> {
    Some(1e-6)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observables {
    #[serde(default = "yes")]
    pub distribution: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peaks: Option<PeakSpec>,
    /// First-order sinc envelope for comparison with the distribution.
    #[serde(default)]
    pub envelope: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerSpec>,
    /// Fidelity of the final chain state with this target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_target: Option<InitialState>,
}

fn yes() -> bool {
    true
}

impl Default for Observables {
    fn default() -> Self {
        Self { distribution: true, peaks: None, envelope: false, wigner: None, fidelity_target: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakSpec {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_PEAK_THRESHOLD
}

impl Default for PeakSpec {
    fn default() -> Self {
        Self { threshold: DEFAULT_PEAK_THRESHOLD }
    }
}

/// Square phase-space grid plus the angular offset used for sector weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerSpec {
    pub half_width: f64,
    pub step: f64,
    #[serde(default)]
    pub sector_offset: f64,
}

impl WignerSpec {
    pub fn grid(&self) -> GridSpec {
        GridSpec::square(self.half_width, self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    /// Dotted config path, e.g. `shaping.xi`.
    pub field: String,
    /// What the value was tuned to achieve.
    pub target: String,
}

impl ScenarioConfig {
    /// Parses JSON, reporting the offending field path on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de)
            .map_err(|e| HarnessError::Config { path: e.path().to_string(), message: e.inner().to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Canonical form used for hashing: keys sorted, no whitespace.
    pub fn canonical_json(&self) -> String {
        // `serde_json::Value` keeps object keys in a BTreeMap.
        let v = serde_json::to_value(self).expect("config serializes");
        v.to_string()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: String| Err(HarnessError::Config { path: path.into(), message });
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad("name", format!("{:?} is not a usable run name", self.name));
        }
        match &self.initial {
            None if self.material.is_none() => {
                return bad("initial", "an initial state is required unless the run is material-only".into());
            }
            None => {
                if self.shaping.is_some() || self.loss.is_some() || self.kerr_rotation.is_some() {
                    return bad("initial", "dynamics requested without an initial state".into());
                }
            }
            Some(init) => {
                if init.truncation() == 0 {
                    return bad("initial.truncation", "must be at least 1".into());
                }
            }
        }
        if let Some(p) = &self.shaping {
            if let Err(e) = p.validate() {
                return bad("shaping", e.to_string());
            }
        }
        if let Some(n) = self.evolve.n_steps {
            if n == 0 {
                return bad("evolve.n_steps", "must be at least 1".into());
            }
        }
        if let Some(loss) = &self.loss {
            if self.shaping.is_none() {
                return bad("loss", "loss runs need a shaping section".into());
            }
            if loss.strength_to_loss.is_empty() || loss.strength_to_loss.iter().any(|r| r.is_nan() || *r <= 0.0) {
                return bad("loss.strength_to_loss", "needs at least one positive ratio".into());
            }
            if loss.samples == 0 || loss.n_steps < loss.samples {
                return bad("loss.samples", "need 1 ≤ samples ≤ n_steps".into());
            }
            if self.shaping.as_ref().is_some_and(|p| p.schedule.is_some()) {
                return bad("loss", "detuning schedules are not supported with loss".into());
            }
        }
        if let Some(p) = &self.observables.peaks {
            if !(p.threshold > 0.0 && p.threshold < 1.0) {
                return bad("observables.peaks.threshold", "must lie in (0, 1)".into());
            }
        }
        if let Some(w) = &self.observables.wigner {
            if !(w.half_width > 0.0 && w.step > 0.0 && w.step < w.half_width) {
                return bad("observables.wigner", "need 0 < step < half_width".into());
            }
        }
        if let (Some(t), Some(i)) = (&self.observables.fidelity_target, &self.initial) {
            if t.truncation() != i.truncation() {
                return bad("observables.fidelity_target.truncation", "must match the initial truncation".into());
            }
        }
        if let Some(m) = &self.material {
            if let Err(e) = m.validate() {
                return bad("material", e.to_string());
            }
        }
        Ok(())
    }
}
