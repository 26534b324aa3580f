//! Spectral oracle for chain evolution.
//!
//! The chain couplings have time-independent magnitudes `(m+1)|Ξ|`, only
//! their phases rotate. A diagonal unitary gauge `D(t)` therefore maps the
//! midpoint Hamiltonian onto one fixed real symmetric tridiagonal matrix
//! `T`, `H(t) = D T D†`, so `e^{−iH dt} = D V e^{−iΛ dt} Vᵀ D†` with a single
//! eigendecomposition `T = V Λ Vᵀ` for the whole run.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{segment_steps, EvolveConfig, Guard};
use crate::fock::ChainState;
use crate::hamiltonians::ShapingParams;
use crate::{Error, Result, C64};

const MAX_DIM: usize = 257;

pub fn evolve_chain_exact(
    state: &ChainState,
    params: &ShapingParams,
    cfg: &EvolveConfig,
) -> Result<ChainState> {
    params.validate()?;
    let n = state.amplitudes().len();
    if n > MAX_DIM {
        return Err(Error::SizeGuard(format!(
            "dense oracle limited to M ≤ {}, got {}",
            MAX_DIM - 1,
            n - 1
        )));
    }
    let total = cfg.steps_for(params, n - 1)?;
    let t_mat = DMatrix::from_fn(n, n, |r, c| {
        if r + 1 == c {
            c as f64 * params.xi.norm()
        } else if c + 1 == r {
            r as f64 * params.xi.norm()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t_mat);
    let v = &eig.eigenvectors;
    let lam = &eig.eigenvalues;

    let mut amps = state.amplitudes().to_vec();
    let mut guard = Guard::new(cfg, state.norm_sqr());
    guard.observe(&amps)?;
    let mut gauge = vec![C64::new(1.0, 0.0); n];
    let mut work = vec![C64::new(0.0, 0.0); n];
    let times = params.segment_times();
    for w in times.windows(2) {
        let steps = segment_steps(total, w[1] - w[0], params.tau);
        let dt = (w[1] - w[0]) / steps as f64;
        let prop: Vec<C64> = lam.iter().map(|l| C64::from_polar(1.0, -l * dt)).collect();
        for k in 0..steps {
            let tm = w[0] + (k as f64 + 0.5) * dt;
            for m in 0..n - 1 {
                let u = params.chain_coupling(m, tm);
                let un = u.norm();
                gauge[m + 1] = if un > 0.0 { gauge[m] * (u / un).conj() } else { gauge[m] };
            }
            // work = Vᵀ D† ψ
            for (j, wj) in work.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..n {
                    acc += gauge[m].conj() * amps[m] * v[(m, j)];
                }
                *wj = acc * prop[j];
            }
            // ψ = D V work
            for (m, a) in amps.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, wj) in work.iter().enumerate() {
                    acc += wj * v[(m, j)];
                }
                *a = gauge[m] * acc;
            }
            guard.observe(&amps)?;
        }
    }
    guard.finish(&amps)?;
    Ok(ChainState::from_normalized(amps))
}
