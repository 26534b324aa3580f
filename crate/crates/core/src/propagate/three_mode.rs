//! Unitary oracle with a quantum pump.
//!
//! `H = −i(κ a_Σ† a_s a_i − h.c.)` in the interaction picture of `H₀`, on
//! chain states `|p⟩_Σ|m⟩_s|m⟩_i`. The coupling `(p, m+1) → (p+1, m)` picks up
//! the phase `e^{i(E(p+1,m) − E(p,m+1))t}` from [`h0_diagonal`]. `p + m` is
//! conserved, so each fixed-sum diagonal is one tridiagonal block.

use serde::{Deserialize, Serialize};

use super::EvolveConfig;
use crate::fock::ThreeModeState;
use crate::hamiltonians::{h0_diagonal, KerrMatrix};
use crate::{Error, Result, C64};

const MAX_AMPLITUDES: usize = 200_000;

/// Three-mode model parameters; `kappa` is the per-pump-photon coupling,
/// i.e. `Ξ/α_Σ*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeModeModel {
    pub omega: [f64; 3],
    pub g: KerrMatrix,
    pub kappa: C64,
    pub tau: f64,
}

impl ThreeModeModel {
    fn energy(&self, p: usize, m: usize) -> f64 {
        // Occupations are non-negative by construction.
        h0_diagonal(self.omega, &self.g, [p as i64, m as i64, m as i64]).unwrap_or(f64::NAN)
    }

    /// `⟨p+1, m|H(t)|p, m+1⟩`.
    pub fn coupling(&self, p: usize, m: usize, t: f64) -> C64 {
        let amp = ((p + 1) as f64).sqrt() * (m + 1) as f64;
        let w = self.energy(p + 1, m) - self.energy(p, m + 1);
        C64::new(0.0, -amp) * self.kappa * C64::from_polar(1.0, w * t)
    }
}

pub fn evolve_three_mode(
    state: &ThreeModeState,
    model: &ThreeModeModel,
    cfg: &EvolveConfig,
) -> Result<ThreeModeState> {
    if !(model.tau > 0.0) {
        return Err(Error::InvalidParameter(format!("τ must be positive, got {}", model.tau)));
    }
    let n_amp = state.amplitudes().len();
    if n_amp > MAX_AMPLITUDES {
        return Err(Error::SizeGuard(format!(
            "three-mode oracle limited to {MAX_AMPLITUDES} amplitudes, got {n_amp}"
        )));
    }
    let (lo, hi) = state.pump_range();
    let mmax = state.chain_truncation();
    let steps = match cfg.n_steps {
        Some(0) => return Err(Error::InvalidParameter("n_steps must be ≥ 1".into())),
        Some(n) => n,
        None => {
            let rate = model.kappa.norm() * ((hi + 1) as f64).sqrt() * model.tau * mmax as f64;
            4000.max((50.0 * rate).ceil() as usize)
        }
    };
    let dt = model.tau / steps as f64;
    let norm0 = state.norm_sqr();

    // Blocks of constant K = p + m, listed by ascending m.
    let blocks: Vec<(usize, usize, usize)> = (lo..=hi + mmax)
        .filter_map(|k| {
            let m0 = k.saturating_sub(hi);
            let m1 = mmax.min(k.checked_sub(lo)?);
            (m1 > m0).then_some((k, m0, m1))
        })
        .collect();

    let mut out = state.clone();
    let mut buf = Vec::new();
    let mut upper = Vec::new();
    for step in 0..steps {
        let tm = (step as f64 + 0.5) * dt;
        for &(k, m0, m1) in &blocks {
            buf.clear();
            buf.extend((m0..=m1).map(|m| out.get(k - m, m)));
            upper.clear();
            // Entry j couples (K−m, m) with (K−m−1, m+1).
            upper.extend((m0..m1).map(|m| model.coupling(k - m - 1, m, tm)));
            super::cn_step_tridiagonal(&upper, dt, &mut buf)?;
            for (j, m) in (m0..=m1).enumerate() {
                let idx = out.index(k - m, m);
                out.amplitudes_mut()[idx] = buf[j];
            }
        }
    }
    if out.amplitudes().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("three-mode propagation"));
    }
    let drift = (out.norm_sqr() - norm0).abs();
    if drift > 1e-8 {
        return Err(Error::NormDrift { drift, limit: 1e-8 });
    }
    Ok(out)
}
