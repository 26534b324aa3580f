use std::f64::consts::{FRAC_PI_2, PI};

use nsopo_core::fock::{ChainState, ThreeModeState, TwoModeDensityMatrix, TwoModeState};
use nsopo_core::hamiltonians::{h0_diagonal, KerrMatrix};
use nsopo_core::observables::{fidelity_mixed, number_distribution, wigner, GridSpec};
use nsopo_core::propagate::{
    evolve_chain, evolve_chain_exact, evolve_lindblad, evolve_three_mode, EvolveConfig, LossConfig,
    ThreeModeModel,
};
use nsopo_core::{hamiltonians::ShapingParams, C64};

fn max_diff(a: &ChainState, b: &ChainState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn crank_nicolson_matches_spectral_oracle() {
    let s = ChainState::coherent(C64::new(3.0, 0.0), 40).unwrap();
    let p = ShapingParams::new(C64::new(0.0, -0.5), 1.2, 9, 1.0).with_delta_center(-0.4);
    let cfg = EvolveConfig::with_steps(8000);
    let cn = evolve_chain(&s, &p, &cfg).unwrap();
    let ex = evolve_chain_exact(&s, &p, &cfg).unwrap();
    assert!(max_diff(&cn, &ex) < 1e-6);
}

#[test]
fn crank_nicolson_second_order() {
    let s = ChainState::coherent(C64::new(2.0, 0.0), 30).unwrap();
    let p = ShapingParams::new(C64::new(0.3, -0.3), 2.0, 4, 1.0);
    let reference = evolve_chain(&s, &p, &EvolveConfig::with_steps(64_000)).unwrap();
    let err = |n| max_diff(&evolve_chain(&s, &p, &EvolveConfig::with_steps(n)).unwrap(), &reference);
    let order = (err(1000) / err(2000)).log2();
    assert!((1.9..=2.1).contains(&order), "order {order}");
}

/// A strong coherent pump reduces the three-mode model to the chain. The
/// bare coupling phase `E(p+1,m) − E(p,m+1) = w₀ + γm` runs opposite to the
/// chain phase, so the reduced Hamiltonian is `−H*` of the chain with
/// `Ξ = κ̄ α_Σ`, `n′ = 0`, `Δ(n′) = −w₀`; for a real initial chain the
/// three-mode signal/idler state follows the complex conjugate.
#[test]
fn strong_pump_reduces_to_chain() {
    let gamma = FRAC_PI_2;
    let g = gamma / 6.0;
    let chain = ChainState::coherent(C64::new(1.0, 0.0), 10).unwrap();
    let xi_target = C64::new(0.1, -0.3);

    let mut infidelity = Vec::new();
    for alpha in [4.0, 8.0] {
        let model = ThreeModeModel {
            omega: [3.0, 1.4, 1.6],
            g: KerrMatrix::signal_idler(g, g, g),
            kappa: xi_target.conj() / alpha,
            tau: 1.0,
        };
        let e = |p: i64, m: i64| h0_diagonal(model.omega, &model.g, [p, m, m]).unwrap();
        let w0 = e(1, 0) - e(0, 1);
        let params = ShapingParams::new(xi_target, gamma, 0, 1.0).with_delta_center(-w0);
        let reduced = evolve_chain(&chain, &params, &EvolveConfig::with_steps(4000).without_boundary_guard())
            .unwrap();

        let s = ThreeModeState::coherent_pump(C64::new(alpha, 0.0), &chain).unwrap();
        let out = evolve_three_mode(&s, &model, &EvolveConfig::with_steps(4000)).unwrap();
        let rho = out.chain_density();
        let target: Vec<C64> = reduced.amplitudes().iter().map(|c| c.conj()).collect();
        let mut f = C64::new(0.0, 0.0);
        for (r, a) in target.iter().enumerate() {
            for (c, b) in target.iter().enumerate() {
                f += a.conj() * rho[(r, c)] * b;
            }
        }
        infidelity.push(1.0 - f.re);
    }
    assert!(infidelity[1] < infidelity[0], "{infidelity:?}");
    assert!(infidelity[1] < 1e-2, "{infidelity:?}");
}

#[test]
fn lossless_master_equation_is_unitary() {
    let chain = ChainState::coherent(C64::new(1.0, 0.0), 10).unwrap();
    let p = ShapingParams::new(C64::new(0.0, -0.4), PI / 2.0, 2, 1.0);
    let rho = TwoModeDensityMatrix::from_pure(&TwoModeState::embed_chain(&chain));
    let mut cfg = LossConfig::new(0.0, 2000);
    cfg.boundary_limit = None;
    let out = evolve_lindblad(&rho, &p, &cfg).unwrap();
    let pure = evolve_chain(&chain, &p, &EvolveConfig::with_steps(4000).without_boundary_guard()).unwrap();
    assert!((out.purity() - 1.0).abs() < 1e-8);
    assert!(fidelity_mixed(&out, &pure).unwrap() > 1.0 - 1e-8);
}

#[test]
fn wigner_normalized_for_displaced_state() {
    let s = ChainState::coherent(C64::new(1.5, -1.0), 30).unwrap();
    let w = wigner(s.amplitudes(), &GridSpec::square(7.0, 0.05)).unwrap();
    assert!((w.integral() - 1.0).abs() < 1e-3);
    let d = number_distribution(&s);
    assert!((d.mean() - 3.25).abs() < 1e-6);
}
