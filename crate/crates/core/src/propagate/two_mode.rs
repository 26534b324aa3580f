use super::{segment_steps, EvolveConfig};
use crate::fock::TwoModeState;
use crate::hamiltonians::{two_mode_hamiltonian, ShapingParams};
use crate::{Error, Result, C64};

/// Unitary CN evolution on the full two-mode space.
///
/// The Hamiltonian conserves `N_s − N_i`, so every fixed-difference diagonal
/// `(d+k, k)` is an independent tridiagonal block.
pub fn evolve_two_mode(
    state: &TwoModeState,
    params: &ShapingParams,
    cfg: &EvolveConfig,
) -> Result<TwoModeState> {
    params.validate()?;
    let (ms, mi) = state.truncations();
    let total = cfg.steps_for(params, ms.max(mi))?;
    let w = mi + 1;
    let blocks: Vec<Vec<usize>> = (-(mi as i64)..=(ms as i64))
        .map(|d| {
            let (s0, i0) = if d >= 0 { (d as usize, 0) } else { (0, (-d) as usize) };
            (0..)
                .map(|k| (s0 + k, i0 + k))
                .take_while(|&(s, i)| s <= ms && i <= mi)
                .map(|(s, i)| s * w + i)
                .collect()
        })
        .collect();

    let norm0 = state.norm_sqr();
    let mut out = state.clone();
    let amps = out.amplitudes_mut();
    let mut buf = Vec::new();
    let mut upper = Vec::new();
    let times = params.segment_times();
    for win in times.windows(2) {
        let steps = segment_steps(total, win[1] - win[0], params.tau);
        let dt = (win[1] - win[0]) / steps as f64;
        for k in 0..steps {
            let tm = win[0] + (k as f64 + 0.5) * dt;
            let h = two_mode_hamiltonian(params, ms, mi, tm);
            for block in blocks.iter().filter(|b| b.len() > 1) {
                buf.clear();
                buf.extend(block.iter().map(|&a| amps[a]));
                upper.clear();
                upper.extend(block[..block.len() - 1].iter().map(|&a| h.up[a]));
                super::cn_step_tridiagonal(&upper, dt, &mut buf)?;
                for (&a, v) in block.iter().zip(&buf) {
                    amps[a] = *v;
                }
            }
        }
    }
    if amps.iter().any(|c: &C64| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("two-mode propagation"));
    }
    let drift = (crate::norm_sqr(amps) - norm0).abs();
    if drift > cfg.norm_tolerance {
        return Err(Error::NormDrift { drift, limit: cfg.norm_tolerance });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ChainState;
    use crate::propagate::evolve_chain;

    #[test]
    fn diagonal_embedding_follows_chain() {
        let c = ChainState::coherent(C64::new(1.5, 0.0), 16).unwrap();
        let p = ShapingParams::new(C64::new(0.3, -0.2), 0.9, 2, 1.0);
        let cfg = EvolveConfig::with_steps(1000);
        let chain = evolve_chain(&c, &p, &cfg).unwrap();
        let two = evolve_two_mode(&TwoModeState::embed_chain(&c), &p, &cfg).unwrap();
        let back = two.extract_chain().unwrap();
        for (a, b) in back.amplitudes().iter().zip(chain.amplitudes()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn number_difference_conserved() {
        let sig: Vec<C64> = (0..7).map(|k| C64::new(0.9_f64.powi(k), 0.1)).collect();
        let idl: Vec<C64> = (0..6).map(|k| C64::new(0.5, 0.7_f64.powi(k))).collect();
        let s = TwoModeState::product(&sig, &idl).unwrap();
        let p = ShapingParams::new(C64::new(0.5, 0.5), 1.2, 2, 1.0);
        let out = evolve_two_mode(&s, &p, &EvolveConfig::with_steps(500)).unwrap();
        let before = s.number_difference_distribution();
        let after = out.number_difference_distribution();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
