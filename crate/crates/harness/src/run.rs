//! Executes one scenario: state → (evolution) → (Kerr rotation) → observables.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use nsopo_core::constraints::{full_report, ConstraintReport};
use nsopo_core::fock::{ChainState, TwoModeDensityMatrix, TwoModeState};
use nsopo_core::hamiltonians::ShapingParams;
use nsopo_core::observables::{
    detect_peaks, fidelity, fidelity_mixed, number_distribution, quadrant_weights, sector_integrals, sinc_envelope,
    wigner,
    NumberDistribution, PeakReport, WignerGrid,
};
use nsopo_core::propagate::{
    apply_kerr_rotation, evolve_chain, evolve_chain_window, evolve_lindblad_observed, EvolveConfig, LossConfig,
};

use crate::config::{LossSpec, ScenarioConfig};
use crate::error::{CoreContext, Result};

/// Self-describing record written next to every run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub name: String,
    /// SHA-256 of the canonical config JSON.
    pub config_hash: String,
    pub version: String,
    pub config: ScenarioConfig,
    pub summary: Summary,
}

/// Scalar digest of a run, also used as the row payload of sweep tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wigner_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wigner_integral: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector_weights: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector_integrals: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraints_pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerOutput {
    pub grid: WignerGrid,
    /// Positive mass per angular sector, see [`quadrant_weights`].
    pub sectors: [f64; 4],
    /// Signed integral per sector, see [`sector_integrals`].
    pub sector_integrals: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRow {
    pub strength_to_loss: f64,
    pub gamma_t: f64,
    pub t: f64,
    pub infidelity: f64,
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub metadata: Metadata,
    #[serde(skip)]
    pub final_state: Option<ChainState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<NumberDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<NumberDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peaks: Option<PeakReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<Vec<LossRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintReport>,
}

pub fn config_hash(cfg: &ScenarioConfig) -> String {
    hex::encode(Sha256::digest(cfg.canonical_json().as_bytes()))
}

pub fn run(cfg: &ScenarioConfig) -> Result<RunResult> {
    cfg.validate()?;
    let mut summary = Summary::default();
    let mut out = RunResult {
        metadata: Metadata {
            name: cfg.name.clone(),
            config_hash: config_hash(cfg),
            version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
            summary: Summary::default(),
        },
        final_state: None,
        distribution: None,
        envelope: None,
        peaks: None,
        wigner: None,
        loss: None,
        constraints: None,
    };

    if let Some(init) = &cfg.initial {
        let initial = init.build().ctx("initial state")?;
        let mut state = match &cfg.shaping {
            Some(p) => evolve_chain(&initial, p, &cfg.evolve).ctx("chain evolution")?,
            None => initial.clone(),
        };
        if let (Some(loss), Some(p)) = (&cfg.loss, &cfg.shaping) {
            out.loss = Some(loss_experiment(&initial, p, &cfg.evolve, loss)?);
        }
        if let Some(k) = &cfg.kerr_rotation {
            state = apply_kerr_rotation(&state, &k.phases(state.truncation())).ctx("Kerr rotation")?;
        }
        summary.boundary_mass = Some(state.boundary_mass());

        let obs = &cfg.observables;
        let dist = number_distribution(&state);
        if obs.distribution || obs.peaks.is_some() {
            summary.mean_m = Some(dist.mean());
            summary.argmax_m = Some(dist.argmax());
            summary.p_max = Some(dist.get(dist.argmax()));
        }
        if let Some(spec) = &obs.peaks {
            let r = detect_peaks(&dist, spec.threshold).ctx("peak detection")?;
            summary.peak_count = Some(r.locations.len());
            if !r.spacings.is_empty() {
                summary.mean_spacing = Some(r.spacings.iter().sum::<usize>() as f64 / r.spacings.len() as f64);
            }
            out.peaks = Some(r);
        }
        if obs.envelope {
            if let Some(p) = &cfg.shaping {
                let e = sinc_envelope(state.truncation(), p.n_center, p.gamma, p.tau, p.xi.arg())
                    .ctx("sinc envelope")?;
                out.envelope = Some(e);
            }
        }
        if let Some(w) = &obs.wigner {
            let grid = wigner(state.amplitudes(), &w.grid()).ctx("Wigner function")?;
            let sectors = quadrant_weights(&grid, w.sector_offset);
            let signed = sector_integrals(&grid, w.sector_offset);
            summary.wigner_min = Some(grid.min());
            summary.wigner_integral = Some(grid.integral());
            summary.sector_weights = Some(sectors);
            summary.sector_integrals = Some(signed);
            out.wigner = Some(WignerOutput { grid, sectors, sector_integrals: signed });
        }
        if let Some(t) = &obs.fidelity_target {
            let target = t.build().ctx("fidelity target")?;
            summary.fidelity = Some(fidelity(&state, &target).ctx("fidelity")?);
        }
        if obs.distribution {
            out.distribution = Some(dist);
        }
        out.final_state = Some(state);
    }

    if let Some(m) = &cfg.material {
        let report = full_report(m).ctx("constraint report")?;
        summary.constraints_pass = Some(report.overall_pass);
        out.constraints = Some(report);
    }
    out.metadata.summary = summary;
    Ok(out)
}

/// Lindblad runs for every strength-to-loss ratio, each compared at the
/// sample times with the lossless chain trajectory.
fn loss_experiment(
    initial: &ChainState,
    params: &ShapingParams,
    evolve: &EvolveConfig,
    spec: &LossSpec,
) -> Result<Vec<LossRow>> {
    let m = initial.truncation();
    let k = spec.samples;
    let sample_step = |j: usize| (j * spec.n_steps + k / 2) / k;
    let dt = params.tau / spec.n_steps as f64;
    let times: Vec<f64> = (1..=k).map(|j| sample_step(j) as f64 * dt).collect();

    // Lossless reference at each sample time.
    let cn_total = evolve.steps_for(params, m).ctx("loss reference")?;
    let mut reference = Vec::with_capacity(k);
    let mut psi = initial.clone();
    let mut t0 = 0.0;
    for &t in &times {
        let n = ((cn_total as f64) * (t - t0) / params.tau).ceil().max(1.0) as usize;
        psi = evolve_chain_window(&psi, params, t0, t, n).ctx("loss reference")?;
        reference.push(psi.clone());
        t0 = t;
    }

    let rho0 = TwoModeDensityMatrix::from_pure(&TwoModeState::embed_chain(initial));
    let mut rows = Vec::with_capacity(k * spec.strength_to_loss.len());
    for &ratio in &spec.strength_to_loss {
        let mut cfg = LossConfig::new(params.gamma.abs() / ratio, spec.n_steps);
        cfg.boundary_limit = spec.boundary_limit;
        let mut next = 0;
        evolve_lindblad_observed(&rho0, params, &cfg, |step, t, rho| {
            if next < k && step == sample_step(next + 1) {
                let f = fidelity_mixed(rho, &reference[next])?;
                rows.push(LossRow {
                    strength_to_loss: ratio,
                    gamma_t: params.gamma * t,
                    t,
                    infidelity: 1.0 - f,
                    purity: rho.purity(),
                });
                next += 1;
            }
            Ok(())
        })
        .ctx(&format!("Lindblad evolution at γ/Γ = {ratio}"))?;
    }
    Ok(rows)
}
