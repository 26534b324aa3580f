//! Time evolution engines.
//!
//! [`evolve_chain`] is the workhorse: Crank–Nicolson on the tridiagonal chain
//! Hamiltonian with the midpoint time in each step. [`evolve_chain_exact`]
//! is a spectral oracle for it, [`evolve_lindblad`] integrates the lossy
//! two-mode master equation and [`evolve_three_mode`] keeps the pump quantum.

mod crank_nicolson;
mod exact;
mod lindblad;
mod three_mode;
mod two_mode;

pub use crank_nicolson::{cn_step_tridiagonal, solve_tridiagonal};
pub use exact::evolve_chain_exact;
pub use lindblad::{evolve_lindblad, evolve_lindblad_observed, lindblad_rhs, LossConfig};
pub use three_mode::{evolve_three_mode, ThreeModeModel};
pub use two_mode::evolve_two_mode;

use serde::{Deserialize, Serialize};

use crate::fock::ChainState;
use crate::hamiltonians::ShapingParams;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    CrankNicolson,
    ExactExponential,
}

/// Step control and guard limits for unitary evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    /// `None` selects [`default_steps`].
    #[serde(default)]
    pub n_steps: Option<usize>,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_norm_tol")]
    pub norm_tolerance: f64,
    /// Largest allowed `|c_M|²` during the run; `None` disables the guard
    /// (needed for states that start with support at the edge).
    #[serde(default = "default_boundary")]
    pub boundary_limit: Option<f64>,
}

fn default_norm_tol() -> f64 {
    1e-10
}

fn default_boundary() -> Option<f64> {
    Some(1e-8)
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            n_steps: None,
            method: Method::CrankNicolson,
            norm_tolerance: default_norm_tol(),
            boundary_limit: default_boundary(),
        }
    }
}

impl EvolveConfig {
    pub fn with_steps(n: usize) -> Self {
        Self { n_steps: Some(n), ..Self::default() }
    }

    pub fn without_boundary_guard(mut self) -> Self {
        self.boundary_limit = None;
        self
    }

    pub fn steps_for(&self, params: &ShapingParams, truncation: usize) -> Result<usize> {
        match self.n_steps {
            Some(0) => Err(Error::InvalidParameter("n_steps must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(default_steps(params, truncation)),
        }
    }
}

/// `max(4000, ⌈50·|Ξ|τ·M⌉)`.
pub fn default_steps(params: &ShapingParams, truncation: usize) -> usize {
    let scaled = (50.0 * params.xi.norm() * params.tau * truncation as f64).ceil();
    4000.max(scaled as usize)
}

/// Evolves a chain state over `[0, τ]`, honouring any detuning schedule.
pub fn evolve_chain(state: &ChainState, params: &ShapingParams, cfg: &EvolveConfig) -> Result<ChainState> {
    params.validate()?;
    let n = cfg.steps_for(params, state.truncation())?;
    if cfg.method == Method::ExactExponential {
        return evolve_chain_exact(state, params, cfg);
    }
    let times = params.segment_times();
    let mut amps = state.amplitudes().to_vec();
    let mut tracker = Guard::new(cfg, state.norm_sqr());
    tracker.observe(&amps)?;
    for w in times.windows(2) {
        let steps = segment_steps(n, w[1] - w[0], params.tau);
        crank_nicolson::evolve_segment(&mut amps, params, w[0], w[1], steps, &mut tracker)?;
    }
    tracker.finish(&amps)?;
    Ok(ChainState::from_normalized(amps))
}

/// Same as [`evolve_chain`] with the schedule made explicit: each segment
/// gets its share of the steps and the interaction-picture time keeps
/// running across segment boundaries.
pub fn schedule_evolve(state: &ChainState, params: &ShapingParams, cfg: &EvolveConfig) -> Result<ChainState> {
    evolve_chain(state, params, cfg)
}

/// Evolves a chain state over an arbitrary window `[t0, t1]` of the
/// interaction-picture clock with a fixed number of CN steps.
pub fn evolve_chain_window(
    state: &ChainState,
    params: &ShapingParams,
    t0: f64,
    t1: f64,
    n_steps: usize,
) -> Result<ChainState> {
    if n_steps == 0 || !(t1 >= t0) {
        return Err(Error::InvalidParameter(format!(
            "bad window [{t0}, {t1}] with {n_steps} steps"
        )));
    }
    let cfg = EvolveConfig::with_steps(n_steps).without_boundary_guard();
    let mut amps = state.amplitudes().to_vec();
    let mut tracker = Guard::new(&cfg, state.norm_sqr());
    crank_nicolson::evolve_segment(&mut amps, params, t0, t1, n_steps, &mut tracker)?;
    tracker.finish(&amps)?;
    Ok(ChainState::from_normalized(amps))
}

pub(crate) fn segment_steps(total: usize, duration: f64, tau: f64) -> usize {
    ((total as f64) * duration / tau).round().max(1.0) as usize
}

/// Multiplies each chain amplitude by the given phase.
pub fn apply_kerr_rotation(state: &ChainState, phases: &[C64]) -> Result<ChainState> {
    if phases.len() != state.amplitudes().len() {
        return Err(Error::ShapeMismatch(format!(
            "{} phases for a chain of {} amplitudes",
            phases.len(),
            state.amplitudes().len()
        )));
    }
    let amps = state.amplitudes().iter().zip(phases).map(|(c, p)| c * p).collect();
    Ok(ChainState::from_normalized(amps))
}

/// Running norm / boundary bookkeeping shared by the chain propagators.
pub(crate) struct Guard {
    norm0: f64,
    boundary_limit: Option<f64>,
    norm_tol: f64,
    pub max_boundary: f64,
}

impl Guard {
    pub fn new(cfg: &EvolveConfig, norm0: f64) -> Self {
        Self {
            norm0,
            boundary_limit: cfg.boundary_limit,
            norm_tol: cfg.norm_tolerance,
            max_boundary: 0.0,
        }
    }

    pub fn observe(&mut self, amps: &[C64]) -> Result<()> {
        let edge = amps[amps.len() - 1];
        if !edge.re.is_finite() || !edge.im.is_finite() {
            return Err(Error::NonFinite("chain propagation"));
        }
        self.max_boundary = self.max_boundary.max(edge.norm_sqr());
        Ok(())
    }

    pub fn finish(&self, amps: &[C64]) -> Result<()> {
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("chain propagation"));
        }
        let drift = (crate::norm_sqr(amps) - self.norm0).abs();
        if drift > self.norm_tol {
            return Err(Error::NormDrift { drift, limit: self.norm_tol });
        }
        if let Some(limit) = self.boundary_limit {
            if self.max_boundary > limit {
                return Err(Error::BoundaryGuard { mass: self.max_boundary, limit });
            }
        }
        Ok(())
    }
}
