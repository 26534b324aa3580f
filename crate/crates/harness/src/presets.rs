//! Named presets. Parameters that were tuned rather than given are
//! listed in each config's `calibrated` section together with the target the
//! value was tuned to.

use std::f64::consts::PI;

use nsopo_core::constraints::appendix_spec;
use nsopo_core::hamiltonians::ShapingParams;
use nsopo_core::propagate::EvolveConfig;
use nsopo_core::C64;

use crate::config::{
    Calibration, InitialState, KerrRotation, LossSpec, Observables, PeakSpec, ScenarioConfig, WignerSpec,
};
use crate::error::{HarnessError, Result};

/// Canonical preset names, in display order.
pub const PRESETS: &[&str] = &[
    "fig1-a",
    "fig1-b",
    "fig1-c",
    "fig1-d",
    "fig2-a",
    "fig2-b",
    "fig2-c",
    "fig2-d",
    "fig3-a",
    "fig3-b",
    "fig3-c",
    "fig3-d",
    "fig3-e",
    "fig3-f",
    "loss-curves",
    "appendix-report",
];

/// Descriptive aliases accepted in addition to the canonical names.
const ALIASES: &[(&str, &str)] = &[
    ("fig1-phase-minus-i", "fig1-a"),
    ("fig1-phase-plus-i", "fig1-b"),
    ("fig1-phase-plus-1", "fig1-c"),
    ("fig1-phase-minus-1", "fig1-d"),
    ("fig2-fock", "fig2-a"),
    ("fig3-coherent", "fig3-a"),
    ("fig3-kerr-only", "fig3-b"),
    ("loss", "loss-curves"),
    ("appendix", "appendix-report"),
];

/// |Ξ| for the fig1 presets.
pub const FIG1_XI: f64 = 0.68;
/// Shape-centre detuning offset for the fig1 presets, in units of γ.
pub const FIG1_DELTA_OVER_GAMMA: f64 = -1.5;

const FIG3_WIGNER: WignerSpec = WignerSpec { half_width: 17.5, step: 0.25, sector_offset: 0.0 };

fn cal(field: &str, target: &str) -> Calibration {
    Calibration { field: field.into(), target: target.into() }
}

fn base(name: &str, description: &str, initial: InitialState) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        description: description.into(),
        initial: Some(initial),
        shaping: None,
        evolve: EvolveConfig::default(),
        loss: None,
        kerr_rotation: None,
        observables: Observables::default(),
        material: None,
        calibrated: Vec::new(),
    }
}

fn coherent(alpha: f64, truncation: usize) -> InitialState {
    InitialState::Coherent { alpha: C64::new(alpha, 0.0), truncation, tail_limit: None }
}

fn fig1(name: &str, phase: C64, label: &str) -> ScenarioConfig {
    let mut c = base(
        name,
        &format!("Uniform real state shaped with Ξ = {label}·|Ξ|, n′ = 60, γ = π, τ = 0.08"),
        InitialState::Uniform { truncation: 120 },
    );
    c.shaping = Some(ShapingParams::new(phase * FIG1_XI, PI, 60, 0.08).with_delta_center(FIG1_DELTA_OVER_GAMMA * PI));
    // The uniform state has weight at the truncation edge from the start.
    c.evolve = EvolveConfig::default().without_boundary_guard();
    c.observables.peaks = Some(PeakSpec { threshold: 0.2 });
    c.observables.envelope = true;
    c.calibrated = vec![
        cal("shaping.xi", "|Ξ| = 0.68: largest P_{-i}(60)/P_{+i}(60) before the central peak winds"),
        cal("shaping.delta_center", "Δc = -1.5γ: puts the Ξ = -i maximum and the Ξ = +i minimum on m = 60"),
    ];
    c
}

fn fig2_a() -> ScenarioConfig {
    let mut c = base(
        "fig2-a",
        "Approximate Fock state at m = 52 from a coherent state with α = 7",
        coherent(7.0, 110),
    );
    c.shaping = Some(ShapingParams::new(C64::new(0.0, -0.107), 0.35, 51, 1.0));
    c.observables.peaks = Some(PeakSpec::default());
    c.calibrated = vec![
        cal("shaping.gamma", "γτ = 0.35: spacing s ≈ 18 wide enough to hold the state in one peak"),
        cal("shaping.xi", "|Ξ|τ = 0.107: maximises P(52) before the peak winds"),
        cal("shaping.n_center", "n′ = 51: the Ξ = -i peak sits one photon above n′, so this targets m = 52"),
    ];
    c
}

fn fig2_b() -> ScenarioConfig {
    let mut c = base("fig2-b", "Coherent state α = 7 shaped with peak spacing s = 2", coherent(7.0, 110));
    c.shaping = Some(ShapingParams::new(C64::new(0.0, -1.0), PI, 10, 1.0));
    c.observables.peaks = Some(PeakSpec::default());
    c.calibrated = vec![
        cal("shaping.n_center", "n′ = 10: shape centre far below the coherent peak at 49"),
        cal("shaping.xi", "|Ξ|τ = 1: odd-m probabilities fully suppressed; larger values wind the pattern"),
    ];
    c
}

fn fig2_squeezed(name: &str, gamma: f64, s: usize, xi: f64) -> ScenarioConfig {
    let mut c = base(
        name,
        &format!("Two-mode squeezed vacuum shaped with peak spacing s = {s}"),
        InitialState::SqueezedVacuum { r: 1.5, truncation: 100 },
    );
    c.shaping = Some(ShapingParams::new(C64::new(0.0, -xi), gamma, 40, 1.0));
    c.observables.peaks = Some(PeakSpec::default());
    c.calibrated = vec![
        cal("initial.r", "r = 1.5: mean photon number sinh²r ≈ 4.5"),
        cal("shaping.n_center", "n′ = 40: shape centre above the bulk of the distribution"),
        cal("shaping.xi", &format!("|Ξ|τ = {xi}: strongest period-{s} modulation before the pattern winds")),
    ];
    c
}

fn fig3_cat(name: &str, xi: C64, label: &str) -> ScenarioConfig {
    let mut c = base(
        name,
        &format!("Coherent α = 7 shaped with Ξ = {label} (γ = π/2, τ = 1, n′ = 8), then Kerr-rotated by π/4"),
        coherent(7.0, 110),
    );
    c.shaping = Some(ShapingParams::new(xi, PI / 2.0, 8, 1.0));
    c.kerr_rotation = Some(fig3_kerr());
    c.observables.wigner = Some(FIG3_WIGNER);
    c
}

/// Equal Kerr weights with `(g_ss + g_ii + g_is)·t = π/4`, the rotation that
/// splits a coherent state into four phases for `s = 4`.
fn fig3_kerr() -> KerrRotation {
    KerrRotation { g_ss: PI / 12.0, g_ii: PI / 12.0, g_is: PI / 12.0, t: 1.0 }
}

fn loss_curves() -> ScenarioConfig {
    let mut c = base(
        "loss-curves",
        "Approximate N = 5 Fock state from α = 2 under cavity loss, γ/Γ_cav ∈ {30, 100, 300}",
        coherent(2.0, 22),
    );
    c.shaping = Some(ShapingParams::new(C64::new(0.0, -0.3), 0.9, 4, 1.0));
    c.loss = Some(LossSpec {
        strength_to_loss: vec![30.0, 100.0, 300.0],
        samples: 9,
        n_steps: 900,
        boundary_limit: Some(1e-6),
    });
    c.calibrated = vec![cal("shaping.xi", "arg Ξ = -π/2: peak aligned with the shape centre")];
    c
}

fn appendix_report() -> ScenarioConfig {
    ScenarioConfig {
        name: "appendix-report".into(),
        description: "Material feasibility report for the 1 µm plausibility scenario".into(),
        initial: None,
        shaping: None,
        evolve: EvolveConfig::default(),
        loss: None,
        kerr_rotation: None,
        observables: Observables::default(),
        material: Some(appendix_spec()),
        calibrated: vec![cal("material.chi2", "χ⁽²⁾ chosen so that Ξ/γ = 1")],
    }
}

/// Returns the named preset. Aliases resolve to the canonical config, so the
/// run name is always the canonical one.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let canonical = ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, c)| *c);
    let i = C64::i();
    let one = C64::new(1.0, 0.0);
    let cfg = match canonical {
        "fig1-a" => fig1("fig1-a", -i, "-i"),
        "fig1-b" => fig1("fig1-b", i, "+i"),
        "fig1-c" => fig1("fig1-c", one, "+1"),
        "fig1-d" => fig1("fig1-d", -one, "-1"),
        "fig2-a" => fig2_a(),
        "fig2-b" => fig2_b(),
        "fig2-c" => fig2_squeezed("fig2-c", PI, 2, 4.0),
        "fig2-d" => fig2_squeezed("fig2-d", PI / 3.0, 6, 1.6),
        "fig3-a" => {
            let mut c = base("fig3-a", "Coherent state α = 7, no shaping", coherent(7.0, 110));
            c.observables.wigner = Some(FIG3_WIGNER);
            c
        }
        "fig3-b" => {
            let mut c = base("fig3-b", "Coherent state α = 7 after a π/4 Kerr rotation, no shaping", coherent(7.0, 110));
            c.kerr_rotation = Some(fig3_kerr());
            c.observables.wigner = Some(FIG3_WIGNER);
            c
        }
        "fig3-c" => fig3_cat("fig3-c", 2.0 * one, "2"),
        "fig3-d" => fig3_cat("fig3-d", -2.0 * i, "-2i"),
        "fig3-e" => fig3_cat("fig3-e", -2.0 * one, "-2"),
        "fig3-f" => fig3_cat("fig3-f", 2.0 * i, "2i"),
        "loss-curves" => loss_curves(),
        "appendix-report" => appendix_report(),
        _ => return Err(HarnessError::UnknownPreset(name.into())),
    };
    debug_assert!(cfg.validate().is_ok(), "preset {canonical} is invalid");
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate_and_round_trip() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            assert_eq!(c.name, *name);
            c.validate().unwrap();
            assert_eq!(ScenarioConfig::from_json(&c.to_json()).unwrap(), c);
        }
        for (alias, canonical) in ALIASES {
            assert_eq!(preset(alias).unwrap(), preset(canonical).unwrap());
        }
        assert!(matches!(preset("fig9"), Err(HarnessError::UnknownPreset(_))));
    }

    #[test]
    fn loss_preset_contents() {
        let c = preset("loss-curves").unwrap();
        assert_eq!(c.loss.as_ref().unwrap().strength_to_loss, vec![30.0, 100.0, 300.0]);
        assert!(matches!(c.initial, Some(InitialState::Coherent { alpha, .. }) if alpha == C64::new(2.0, 0.0)));
        assert_eq!(c.shaping.as_ref().unwrap().n_center, 4);
    }

    #[test]
    fn fig3_b_is_kerr_only() {
        let c = preset("fig3-b").unwrap();
        assert!(c.shaping.is_none());
        let k = c.kerr_rotation.unwrap();
        assert!(((k.g_ss + k.g_ii + k.g_is) * k.t - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn calibrated_fields_are_flagged() {
        for name in ["fig1-a", "fig2-a", "fig2-b", "fig2-c", "fig2-d"] {
            assert!(!preset(name).unwrap().calibrated.is_empty(), "{name}");
        }
    }
}
