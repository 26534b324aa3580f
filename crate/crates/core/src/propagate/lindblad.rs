//! Fixed-step RK4 integration of the two-mode master equation
//!
//! `dρ/dt = −i[H(t), ρ] + (Γ/2) Σ_{j∈{s,i}} (2 a_j ρ a_j† − {N_j, ρ})`.
//!
//! `H` only couples `(n_s, n_i) ↔ (n_s+1, n_i+1)`, so both the commutator
//! and the dissipator are evaluated entry by entry without building any
//! operator matrices.

use serde::{Deserialize, Serialize};

use crate::fock::TwoModeDensityMatrix;
use crate::hamiltonians::{two_mode_hamiltonian, ShapingParams, TwoModeHamiltonian};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    /// Equal signal and idler decay rate.
    pub gamma_cav: f64,
    pub n_steps: usize,
    #[serde(default = "default_trace_limit")]
    pub trace_limit: f64,
    /// Largest population allowed on the truncation edge; `None` disables.
    #[serde(default = "default_boundary")]
    pub boundary_limit: Option<f64>,
}

fn default_trace_limit() -> f64 {
    1e-6
}

fn default_boundary() -> Option<f64> {
    Some(1e-6)
}

impl LossConfig {
    pub fn new(gamma_cav: f64, n_steps: usize) -> Self {
        Self {
            gamma_cav,
            n_steps,
            trace_limit: default_trace_limit(),
            boundary_limit: default_boundary(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma_cav >= 0.0) || !self.gamma_cav.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Γ_cav must be finite and ≥ 0, got {}",
                self.gamma_cav
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter("loss n_steps must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Right-hand side of the master equation, written into `out`.
pub fn lindblad_rhs(rho: &[C64], h: &TwoModeHamiltonian, gamma_cav: f64, out: &mut [C64]) {
    let d = h.dim();
    let w = h.mi + 1;
    let zero = C64::new(0.0, 0.0);
    let mi = C64::new(0.0, -1.0);
    for a in 0..d {
        let (nsa, nia) = (a / w, a % w);
        let ua = h.up_index(a).map(|x| (x, h.up[a]));
        let da = h.down_index(a).map(|x| (x, h.up[x].conj()));
        for b in 0..d {
            let (nsb, nib) = (b / w, b % w);
            // (Hρ)_ab
            let mut hr = zero;
            if let Some((ua_i, ua_v)) = ua {
                hr += ua_v * rho[ua_i * d + b];
            }
            if let Some((da_i, da_v)) = da {
                hr += da_v * rho[da_i * d + b];
            }
            // (ρH)_ab = Σ_c ρ_ac H_cb
            let mut rh = zero;
            if let Some(db) = h.down_index(b) {
                rh += rho[a * d + db] * h.up[db];
            }
            if let Some(ub) = h.up_index(b) {
                rh += rho[a * d + ub] * h.up[b].conj();
            }
            let mut v = mi * (hr - rh);
            if gamma_cav > 0.0 {
                let mut diss = zero;
                if nsa < h.ms && nsb < h.ms {
                    let f = (((nsa + 1) * (nsb + 1)) as f64).sqrt();
                    diss += rho[(a + w) * d + b + w] * (2.0 * f);
                }
                if nia < h.mi && nib < h.mi {
                    let f = (((nia + 1) * (nib + 1)) as f64).sqrt();
                    diss += rho[(a + 1) * d + b + 1] * (2.0 * f);
                }
                diss -= rho[a * d + b] * ((nsa + nsb + nia + nib) as f64);
                v += diss * (0.5 * gamma_cav);
            }
            out[a * d + b] = v;
        }
    }
}

/// Evolves `ρ` over `[0, τ]`.
pub fn evolve_lindblad(
    rho: &TwoModeDensityMatrix,
    params: &ShapingParams,
    loss: &LossConfig,
) -> Result<TwoModeDensityMatrix> {
    evolve_lindblad_observed(rho, params, loss, |_, _, _| Ok(()))
}

/// Like [`evolve_lindblad`], calling `observe(step, t, ρ)` after every step
/// (and once with step 0 before the first).
pub fn evolve_lindblad_observed<F>(
    rho: &TwoModeDensityMatrix,
    params: &ShapingParams,
    loss: &LossConfig,
    mut observe: F,
) -> Result<TwoModeDensityMatrix>
where
    F: FnMut(usize, f64, &TwoModeDensityMatrix) -> Result<()>,
{
    params.validate()?;
    loss.validate()?;
    let (ms, mi) = rho.truncations();
    let d = rho.dim();
    let check_edge = |r: &TwoModeDensityMatrix| -> Result<()> {
        if let Some(limit) = loss.boundary_limit {
            let mass = r.boundary_mass();
            if mass > limit {
                return Err(Error::BoundaryGuard { mass, limit });
            }
        }
        Ok(())
    };
    check_edge(rho)?;
    let tr0 = rho.trace().re;

    let mut state = rho.clone();
    observe(0, 0.0, &state)?;
    let dt = params.tau / loss.n_steps as f64;
    let n2 = d * d;
    let mut k1 = vec![C64::new(0.0, 0.0); n2];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    for step in 0..loss.n_steps {
        let t = step as f64 * dt;
        let h0 = two_mode_hamiltonian(params, ms, mi, t);
        let hm = two_mode_hamiltonian(params, ms, mi, t + 0.5 * dt);
        let h1 = two_mode_hamiltonian(params, ms, mi, t + dt);
        let y = state.entries();

        lindblad_rhs(y, &h0, loss.gamma_cav, &mut k1);
        axpy(y, &k1, 0.5 * dt, &mut tmp);
        lindblad_rhs(&tmp, &hm, loss.gamma_cav, &mut k2);
        axpy(y, &k2, 0.5 * dt, &mut tmp);
        lindblad_rhs(&tmp, &hm, loss.gamma_cav, &mut k3);
        axpy(y, &k3, dt, &mut tmp);
        lindblad_rhs(&tmp, &h1, loss.gamma_cav, &mut k4);

        let out = state.entries_mut();
        for k in 0..n2 {
            out[k] += (k1[k] + (k2[k] + k3[k]) * 2.0 + k4[k]) * (dt / 6.0);
        }
        state.hermitize();

        let tr = state.trace();
        if !tr.re.is_finite() {
            return Err(Error::NonFinite("Lindblad integration"));
        }
        let drift = (tr.re - tr0).abs();
        if drift > loss.trace_limit {
            return Err(Error::TraceDrift { drift, limit: loss.trace_limit });
        }
        check_edge(&state)?;
        observe(step + 1, t + dt, &state)?;
    }
    Ok(state)
}

fn axpy(y: &[C64], k: &[C64], h: f64, out: &mut [C64]) {
    for ((o, a), b) in out.iter_mut().zip(y).zip(k) {
        *o = a + b * h;
    }
}

// Dense reference used to validate the sparse index formulas.
#[cfg(test)]
fn dense_rhs(rho: &[C64], h: &TwoModeHamiltonian, gamma: f64) -> Vec<C64> {
    let d = h.dim();
    let w = h.mi + 1;
    let hd = h.to_dense();
    let mut a_s = vec![vec![0.0; d]; d];
    let mut a_i = vec![vec![0.0; d]; d];
    for x in 0..d {
        let (ns, ni) = (x / w, x % w);
        if ns > 0 {
            a_s[x - w][x] = (ns as f64).sqrt();
        }
        if ni > 0 {
            a_i[x - 1][x] = (ni as f64).sqrt();
        }
    }
    let mm = |a: &dyn Fn(usize, usize) -> C64, b: &dyn Fn(usize, usize) -> C64| {
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                out[r * d + c] = (0..d).map(|k| a(r, k) * b(k, c)).sum();
            }
        }
        out
    };
    let r = |i: usize, j: usize| rho[i * d + j];
    let hh = |i: usize, j: usize| hd[i][j];
    let hr = mm(&hh, &r);
    let rh = mm(&r, &hh);
    let mut out: Vec<C64> = hr.iter().zip(&rh).map(|(x, y)| C64::new(0.0, -1.0) * (x - y)).collect();
    for a in [&a_s, &a_i] {
        let av = |i: usize, j: usize| C64::new(a[i][j], 0.0);
        let ad = |i: usize, j: usize| C64::new(a[j][i], 0.0);
        let ar = mm(&av, &r);
        let ara = {
            let ar_f = |i: usize, j: usize| ar[i * d + j];
            mm(&ar_f, &ad)
        };
        let n = mm(&ad, &av);
        let n_f = |i: usize, j: usize| n[i * d + j];
        let nr = mm(&n_f, &r);
        let rn = mm(&r, &n_f);
        for k in 0..d * d {
            out[k] += (ara[k] * 2.0 - nr[k] - rn[k]) * (0.5 * gamma);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ChainState, TwoModeState};
    use crate::hamiltonians::two_mode_hamiltonian;

    #[test]
    fn sparse_rhs_matches_dense() {
        let p = ShapingParams::new(C64::new(0.3, -0.2), 0.9, 2, 1.0);
        let sig: Vec<C64> = (0..4).map(|k| C64::new(1.0 / (k + 1) as f64, 0.1 * k as f64)).collect();
        let idl: Vec<C64> = (0..3).map(|k| C64::new(0.5, -0.2 * k as f64)).collect();
        let psi = TwoModeState::product(&sig, &idl).unwrap();
        let rho = TwoModeDensityMatrix::from_pure(&psi);
        let h = two_mode_hamiltonian(&p, 3, 2, 0.37);
        let mut sparse = vec![C64::new(0.0, 0.0); rho.dim() * rho.dim()];
        lindblad_rhs(rho.entries(), &h, 0.7, &mut sparse);
        let dense = dense_rhs(rho.entries(), &h, 0.7);
        for (a, b) in sparse.iter().zip(&dense) {
            assert!((a - b).norm() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn coherent_photon_number_decays() {
        let chain = ChainState::coherent(C64::new(1.0, 0.0), 10).unwrap();
        let rho = TwoModeDensityMatrix::from_pure(&TwoModeState::embed_chain(&chain));
        let p = ShapingParams::new(C64::new(0.0, 0.0), 0.9, 2, 1.0);
        let loss = LossConfig::new(0.5, 200);
        let n0 = rho.mean_total_photons();
        let mut last_purity = 1.0;
        let out = evolve_lindblad_observed(&rho, &p, &loss, |_, _, r| {
            let pu = r.purity();
            assert!(pu <= last_purity + 1e-12);
            last_purity = pu;
            Ok(())
        })
        .unwrap();
        let expect = n0 * (-0.5_f64).exp();
        assert!((out.mean_total_photons() - expect).abs() < 1e-8 * n0.max(1.0));
        assert!((out.trace().re - 1.0).abs() < 1e-10);
        assert!(out.min_eigenvalue() > -1e-8);
    }

    #[test]
    fn rejects_negative_loss() {
        let chain = ChainState::fock(0, 2).unwrap();
        let rho = TwoModeDensityMatrix::from_pure(&TwoModeState::embed_chain(&chain));
        let p = ShapingParams::new(C64::new(0.1, 0.0), 0.9, 2, 1.0);
        assert!(evolve_lindblad(&rho, &p, &LossConfig::new(-1.0, 10)).is_err());
    }
}
