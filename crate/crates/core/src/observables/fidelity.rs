use nalgebra::{DMatrix, SymmetricEigen};

use crate::fock::{ln_factorials, ChainState, TwoModeDensityMatrix, TwoModeState};
use crate::{Error, Result, C64};

/// `|⟨b|a⟩|²` for chain states.
pub fn fidelity(a: &ChainState, b: &ChainState) -> Result<f64> {
    Ok(b.inner(a)?.norm_sqr().min(1.0))
}

/// `⟨b|ρ|b⟩` with `b` placed on the diagonal of the two-mode space.
pub fn fidelity_mixed(rho: &TwoModeDensityMatrix, b: &ChainState) -> Result<f64> {
    let (ms, mi) = rho.truncations();
    if ms != mi || ms != b.truncation() {
        return Err(Error::ShapeMismatch(format!(
            "density truncations ({ms}, {mi}) vs chain truncation {}",
            b.truncation()
        )));
    }
    Ok(rho.expectation_pure(&TwoModeState::embed_chain(b))?.clamp(0.0, 1.0))
}

/// `Tr(ρ²)`.
pub fn purity(rho: &TwoModeDensityMatrix) -> f64 {
    rho.purity()
}

/// `exp{−|α_si/(4 s α_Σ)|²}`.
pub fn purity_estimate(alpha_si: C64, alpha_pump: C64, spacing: f64) -> Result<f64> {
    if alpha_pump.norm() == 0.0 || spacing == 0.0 || !spacing.is_finite() {
        return Err(Error::Domain("purity estimate needs α_Σ ≠ 0 and finite s ≠ 0".into()));
    }
    let r = alpha_si.norm() / (4.0 * spacing.abs() * alpha_pump.norm());
    Ok((-r * r).exp())
}

/// Trace distance `½‖ρ − |β⟩⟨β|‖₁` between a pump density matrix on the Fock
/// window `[p_lo, p_lo + dim)` and the coherent state `|β⟩` (restricted to
/// the same window).
pub fn trace_distance_to_coherent(rho: &DMatrix<C64>, p_lo: usize, beta: C64) -> Result<f64> {
    let n = rho.nrows();
    if rho.ncols() != n || n == 0 {
        return Err(Error::ShapeMismatch("pump density must be square".into()));
    }
    let lnf = ln_factorials(p_lo + n);
    let r = beta.norm();
    let coh: Vec<C64> = (p_lo..p_lo + n)
        .map(|p| {
            if r == 0.0 {
                return C64::new(if p == 0 { 1.0 } else { 0.0 }, 0.0);
            }
            let lm = p as f64 * r.ln() - 0.5 * lnf[p] - 0.5 * r * r;
            C64::from_polar(lm.exp(), p as f64 * beta.arg())
        })
        .collect();
    let diff = DMatrix::from_fn(n, n, |a, b| {
        let d = rho[(a, b)] - coh[a] * coh[b].conj();
        let d_t = rho[(b, a)].conj() - coh[a] * coh[b].conj();
        (d + d_t) * 0.5
    });
    let eig = SymmetricEigen::new(diff);
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pure_fidelities() {
        let c = ChainState::coherent(C64::new(1.2, 0.3), 15).unwrap();
        assert_abs_diff_eq!(fidelity(&c, &c).unwrap(), 1.0, epsilon = 1e-14);
        let a = ChainState::fock(1, 4).unwrap();
        let b = ChainState::fock(2, 4).unwrap();
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        assert!(fidelity(&a, &ChainState::fock(1, 5).unwrap()).is_err());
    }

    #[test]
    fn mixed_fidelity_and_purity() {
        let a = ChainState::fock(1, 3).unwrap();
        let b = ChainState::fock(2, 3).unwrap();
        let ra = TwoModeDensityMatrix::from_pure(&TwoModeState::embed_chain(&a));
        let rb = TwoModeDensityMatrix::from_pure(&TwoModeState::embed_chain(&b));
        let mix: Vec<C64> = ra.entries().iter().zip(rb.entries()).map(|(x, y)| (x + y) * 0.5).collect();
        let mix = TwoModeDensityMatrix::from_entries(3, 3, mix).unwrap();
        assert_abs_diff_eq!(purity(&mix), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(purity(&ra), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fidelity_mixed(&mix, &a).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn purity_estimate_examples() {
        let one = C64::new(1.0, 0.0);
        assert_eq!(purity_estimate(C64::new(0.0, 0.0), one, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(purity_estimate(C64::new(4.0, 0.0), one, 1.0).unwrap(), 0.36788, epsilon = 1e-5);
        let a = purity_estimate(C64::new(3.0, 0.0), one, 1.0).unwrap();
        let b = purity_estimate(C64::new(3.0, 0.0), one * 2.0, 1.0).unwrap();
        let c = purity_estimate(C64::new(3.0, 0.0), one, 2.0).unwrap();
        assert!(b > a && c > a);
        assert!(purity_estimate(one, C64::new(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn coherent_trace_distance_zero() {
        let beta = C64::new(2.0, 0.5);
        let n = 30;
        let lnf = ln_factorials(n);
        let v: Vec<C64> = (0..n)
            .map(|p| C64::from_polar((p as f64 * beta.norm().ln() - 0.5 * lnf[p] - 0.5 * beta.norm_sqr()).exp(), p as f64 * beta.arg()))
            .collect();
        let rho = DMatrix::from_fn(n, n, |a, b| v[a] * v[b].conj());
        assert!(trace_distance_to_coherent(&rho, 0, beta).unwrap() < 1e-8);
        assert!(trace_distance_to_coherent(&rho, 0, -beta).unwrap() > 0.9);
    }
}
