//! State representations on the truncated Fock space.
//!
//! The OPO interaction creates and destroys signal/idler photons in pairs, so
//! a state that starts with `N_s = N_i` stays on the "chain" of equal photon
//! numbers. [`ChainState`] stores that subspace directly; [`TwoModeState`]
//! and [`TwoModeDensityMatrix`] cover the full signal⊗idler space needed once
//! loss breaks the pairing. [`ThreeModeState`] keeps the pump quantum and is
//! only used as a validation oracle.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{norm_sqr, Error, Result, C64};

/// Tail mass above which a truncated constructor refuses to build a state.
pub const TAIL_ERROR: f64 = 1e-6;
/// Tail mass above which a truncated constructor logs a warning.
pub const TAIL_WARN: f64 = 1e-8;

pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

fn check_tail(tail: f64) -> Result<()> {
    if tail > TAIL_ERROR {
        return Err(Error::TruncationTooSmall { tail, limit: TAIL_ERROR });
    }
    if tail > TAIL_WARN {
        log::warn!("truncated tail mass {tail:.2e} exceeds {TAIL_WARN:.0e}");
    }
    Ok(())
}

fn normalize(amps: &mut [C64]) -> Result<()> {
    let n = norm_sqr(amps).sqrt();
    if !n.is_finite() || n == 0.0 {
        return Err(Error::Domain("state has zero or non-finite norm".into()));
    }
    amps.iter_mut().for_each(|c| *c /= n);
    Ok(())
}

/// Amplitudes `c_m` on the correlated chain `|m⟩_s|m⟩_i`, `m = 0..=M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    amps: Vec<C64>,
}

impl ChainState {
    /// Builds a state from raw amplitudes, renormalizing them.
    pub fn new(mut amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidTruncation(format!(
                "chain needs at least 2 amplitudes, got {}",
                amps.len()
            )));
        }
        normalize(&mut amps)?;
        Ok(Self { amps })
    }

    /// Internal constructor for amplitudes already known to be normalized.
    pub(crate) fn from_normalized(amps: Vec<C64>) -> Self {
        debug_assert!(amps.len() >= 2);
        Self { amps }
    }

    /// Equal real amplitudes `1/√(M+1)`.
    pub fn uniform(truncation: usize) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::InvalidTruncation("M must be at least 1".into()));
        }
        let c = C64::new(1.0 / ((truncation + 1) as f64).sqrt(), 0.0);
        Ok(Self { amps: vec![c; truncation + 1] })
    }

    /// Fock state `|n⟩` on the chain.
    pub fn fock(n: usize, truncation: usize) -> Result<Self> {
        if truncation < 1 || n > truncation {
            return Err(Error::InvalidTruncation(format!(
                "Fock index {n} outside chain of truncation {truncation}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); truncation + 1];
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Poissonian chain amplitudes `e^{-|α|²/2} α^m / √(m!)`, truncated and
    /// renormalized.
    pub fn coherent(alpha: C64, truncation: usize) -> Result<Self> {
        Self::coherent_with_tail_limit(alpha, truncation, TAIL_ERROR)
    }

    /// As [`ChainState::coherent`] with an explicit limit on the discarded
    /// Poisson tail.
    pub fn coherent_with_tail_limit(alpha: C64, truncation: usize, tail_limit: f64) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::InvalidTruncation("M must be at least 1".into()));
        }
        let r = alpha.norm();
        let mut amps = vec![C64::new(0.0, 0.0); truncation + 1];
        if r == 0.0 {
            amps[0] = C64::new(1.0, 0.0);
            return Ok(Self { amps });
        }
        let lnf = ln_factorials(truncation);
        let theta = alpha.arg();
        let lnr = r.ln();
        for (m, c) in amps.iter_mut().enumerate() {
            let mf = m as f64;
            let ln_mag = mf * lnr - 0.5 * lnf[m] - 0.5 * r * r;
            *c = C64::from_polar(ln_mag.exp(), mf * theta);
        }
        let tail = (1.0 - norm_sqr(&amps)).max(0.0);
        if tail > tail_limit {
            return Err(Error::TruncationTooSmall { tail, limit: tail_limit });
        }
        check_tail(tail.min(TAIL_ERROR))?;
        normalize(&mut amps)?;
        Ok(Self { amps })
    }

    /// Two-mode squeezed vacuum Schmidt coefficients `tanh^m(r)/cosh(r)`.
    pub fn squeezed_vacuum(r: f64, truncation: usize) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::InvalidTruncation("M must be at least 1".into()));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("squeezing r must be finite and ≥ 0, got {r}")));
        }
        let t = r.tanh();
        let tail = (t * t).powi(truncation as i32 + 1);
        check_tail(tail)?;
        let c0 = 1.0 / r.cosh();
        let mut amps: Vec<C64> = (0..=truncation)
            .map(|m| C64::new(c0 * t.powi(m as i32), 0.0))
            .collect();
        normalize(&mut amps)?;
        Ok(Self { amps })
    }

    pub fn truncation(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn mean_index(&self) -> f64 {
        self.amps.iter().enumerate().map(|(m, c)| m as f64 * c.norm_sqr()).sum()
    }

    /// Population of the highest retained chain index.
    pub fn boundary_mass(&self) -> f64 {
        self.amps[self.amps.len() - 1].norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &ChainState) -> Result<C64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::ShapeMismatch(format!(
                "chain truncations differ: {} vs {}",
                self.truncation(),
                other.truncation()
            )));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }
}

/// Pure state on the full `(M_s+1)×(M_i+1)` signal⊗idler space, stored row
/// major with index `n_s·(M_i+1) + n_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoModeState {
    ms: usize,
    mi: usize,
    amps: Vec<C64>,
}

impl TwoModeState {
    pub fn new(ms: usize, mi: usize, mut amps: Vec<C64>) -> Result<Self> {
        if ms < 1 || mi < 1 {
            return Err(Error::InvalidTruncation("two-mode truncations must be ≥ 1".into()));
        }
        if amps.len() != (ms + 1) * (mi + 1) {
            return Err(Error::ShapeMismatch(format!(
                "expected {} amplitudes, got {}",
                (ms + 1) * (mi + 1),
                amps.len()
            )));
        }
        normalize(&mut amps)?;
        Ok(Self { ms, mi, amps })
    }

    /// Product of two single-mode states given by their Fock amplitudes.
    pub fn product(signal: &[C64], idler: &[C64]) -> Result<Self> {
        let amps = signal
            .iter()
            .flat_map(|s| idler.iter().map(move |i| s * i))
            .collect();
        Self::new(signal.len().saturating_sub(1), idler.len().saturating_sub(1), amps)
    }

    pub fn truncations(&self) -> (usize, usize) {
        (self.ms, self.mi)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn index(&self, ns: usize, ni: usize) -> usize {
        ns * (self.mi + 1) + ni
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn get(&self, ns: usize, ni: usize) -> C64 {
        self.amps[self.index(ns, ni)]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Places the chain amplitudes on the `n_s = n_i` diagonal.
    pub fn embed_chain(chain: &ChainState) -> Self {
        let m = chain.truncation();
        let mut amps = vec![C64::new(0.0, 0.0); (m + 1) * (m + 1)];
        for (k, c) in chain.amplitudes().iter().enumerate() {
            amps[k * (m + 1) + k] = *c;
        }
        Self { ms: m, mi: m, amps }
    }

    /// Recovers the chain from a state supported on `n_s = n_i`.
    pub fn extract_chain(&self) -> Result<ChainState> {
        if self.ms != self.mi {
            return Err(Error::ShapeMismatch(format!(
                "chain extraction needs M_s = M_i, got {} and {}",
                self.ms, self.mi
            )));
        }
        let mut diag = Vec::with_capacity(self.ms + 1);
        let mut off = 0.0;
        for ns in 0..=self.ms {
            for ni in 0..=self.mi {
                let c = self.get(ns, ni);
                if ns == ni {
                    diag.push(c);
                } else {
                    off += c.norm_sqr();
                }
            }
        }
        if off > 1e-12 {
            return Err(Error::Domain(format!("state has off-diagonal mass {off:.3e}")));
        }
        Ok(ChainState::from_normalized(diag))
    }

    /// Distribution of `N_s − N_i`, indexed by `d + M_i` for `d ∈ [−M_i, M_s]`.
    pub fn number_difference_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.ms + self.mi + 1];
        for ns in 0..=self.ms {
            for ni in 0..=self.mi {
                out[ns + self.mi - ni] += self.get(ns, ni).norm_sqr();
            }
        }
        out
    }
}

/// Density operator on the two-mode space, row-major `dim × dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoModeDensityMatrix {
    ms: usize,
    mi: usize,
    data: Vec<C64>,
}

impl TwoModeDensityMatrix {
    /// Wraps raw entries. Hermiticity and trace are checked loosely.
    pub fn from_entries(ms: usize, mi: usize, data: Vec<C64>) -> Result<Self> {
        let dim = (ms + 1) * (mi + 1);
        if data.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {} density entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        let rho = Self { ms, mi, data };
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-6 {
            return Err(Error::Domain(format!("density matrix trace {tr} is not 1")));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &TwoModeState) -> Self {
        let a = state.amplitudes();
        let dim = a.len();
        let mut data = Vec::with_capacity(dim * dim);
        for x in a {
            for y in a {
                data.push(x * y.conj());
            }
        }
        let (ms, mi) = state.truncations();
        Self { ms, mi, data }
    }

    pub fn truncations(&self) -> (usize, usize) {
        (self.ms, self.mi)
    }

    pub fn dim(&self) -> usize {
        (self.ms + 1) * (self.mi + 1)
    }

    pub fn index(&self, ns: usize, ni: usize) -> usize {
        ns * (self.mi + 1) + ni
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|k| self.data[k * d + k]).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.data[r * d + c] - self.data[c * d + r].conj()).norm());
            }
        }
        worst
    }

    /// `ρ ← (ρ + ρ†)/2`.
    pub fn hermitize(&mut self) {
        let d = self.dim();
        for r in 0..d {
            self.data[r * d + r].im = 0.0;
            for c in (r + 1)..d {
                let avg = 0.5 * (self.data[r * d + c] + self.data[c * d + r].conj());
                self.data[r * d + c] = avg;
                self.data[c * d + r] = avg.conj();
            }
        }
    }

    /// `Tr(ρ²)`, using Hermiticity: `Σ |ρ_ab|²`.
    pub fn purity(&self) -> f64 {
        norm_sqr(&self.data)
    }

    /// Population of each `(n_s, n_i)` basis state.
    pub fn diagonal(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|k| self.data[k * d + k].re).collect()
    }

    /// Marginal photon-number distribution of the signal mode.
    pub fn signal_distribution(&self) -> Vec<f64> {
        let diag = self.diagonal();
        (0..=self.ms)
            .map(|ns| (0..=self.mi).map(|ni| diag[self.index(ns, ni)]).sum())
            .collect()
    }

    /// Marginal photon-number distribution of the idler mode.
    pub fn idler_distribution(&self) -> Vec<f64> {
        let diag = self.diagonal();
        (0..=self.mi)
            .map(|ni| (0..=self.ms).map(|ns| diag[self.index(ns, ni)]).sum())
            .collect()
    }

    /// Distribution of `N_s − N_i`, indexed by `d + M_i`.
    pub fn number_difference_distribution(&self) -> Vec<f64> {
        let diag = self.diagonal();
        let mut out = vec![0.0; self.ms + self.mi + 1];
        for ns in 0..=self.ms {
            for ni in 0..=self.mi {
                out[ns + self.mi - ni] += diag[self.index(ns, ni)];
            }
        }
        out
    }

    /// `⟨N_s + N_i⟩`.
    pub fn mean_total_photons(&self) -> f64 {
        let diag = self.diagonal();
        let mut acc = 0.0;
        for ns in 0..=self.ms {
            for ni in 0..=self.mi {
                acc += (ns + ni) as f64 * diag[self.index(ns, ni)];
            }
        }
        acc
    }

    /// Largest population on the outer edge `n_s = M_s` or `n_i = M_i`.
    pub fn boundary_mass(&self) -> f64 {
        let diag = self.diagonal();
        let mut mass = 0.0;
        for ns in 0..=self.ms {
            for ni in 0..=self.mi {
                if ns == self.ms || ni == self.mi {
                    mass += diag[self.index(ns, ni)];
                }
            }
        }
        mass
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_pure(&self, psi: &TwoModeState) -> Result<f64> {
        if psi.truncations() != self.truncations() {
            return Err(Error::ShapeMismatch(format!(
                "density truncations {:?} vs state {:?}",
                self.truncations(),
                psi.truncations()
            )));
        }
        let d = self.dim();
        let a = psi.amplitudes();
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..d {
            if a[r] == C64::new(0.0, 0.0) {
                continue;
            }
            let row = &self.data[r * d..(r + 1) * d];
            let s: C64 = row.iter().zip(a).map(|(x, y)| x * y).sum();
            acc += a[r].conj() * s;
        }
        Ok(acc.re)
    }

    /// Smallest eigenvalue of the Hermitian part.
    /// Smallest eigenvalue of the Hermitian part. Identically zero rows are
    /// split off first (each contributes an exact 0); the dense solver
    /// misbehaves on large rank-deficient inputs otherwise.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let live: Vec<usize> = (0..d)
            .filter(|&r| (0..d).any(|c| self.data[r * d + c] != C64::new(0.0, 0.0)))
            .collect();
        let floor = if live.len() < d { 0.0 } else { f64::INFINITY };
        let n = live.len();
        if n == 0 {
            return 0.0;
        }
        let m = DMatrix::from_fn(n, n, |r, c| {
            let (r, c) = (live[r], live[c]);
            0.5 * (self.data[r * d + c] + self.data[c * d + r].conj())
        });
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .cloned()
            .fold(floor, f64::min)
    }
}

/// Pump ⊗ chain amplitudes `c_{p,m}` with the pump photon number restricted
/// to the window `[p_lo, p_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeModeState {
    p_lo: usize,
    p_hi: usize,
    m_max: usize,
    amps: Vec<C64>,
}

impl ThreeModeState {
    pub fn new(p_lo: usize, p_hi: usize, m_max: usize, mut amps: Vec<C64>) -> Result<Self> {
        if p_hi < p_lo {
            return Err(Error::InvalidTruncation(format!("empty pump window [{p_lo}, {p_hi}]")));
        }
        if m_max < 1 {
            return Err(Error::InvalidTruncation("chain truncation must be ≥ 1".into()));
        }
        let n = (p_hi - p_lo + 1) * (m_max + 1);
        if amps.len() != n {
            return Err(Error::ShapeMismatch(format!("expected {n} amplitudes, got {}", amps.len())));
        }
        normalize(&mut amps)?;
        Ok(Self { p_lo, p_hi, m_max, amps })
    }

    /// Pump-number window `[⌊|α|² − 6|α|⌋, ⌈|α|² + 6|α|⌉]`, clamped at zero.
    pub fn pump_window(alpha_pump: C64) -> (usize, usize) {
        let r = alpha_pump.norm();
        let lo = (r * r - 6.0 * r).floor().max(0.0) as usize;
        let hi = (r * r + 6.0 * r).ceil().max(1.0) as usize;
        (lo, hi)
    }

    /// Coherent pump `|α_Σ⟩` (restricted to its window) times a chain state.
    pub fn coherent_pump(alpha_pump: C64, chain: &ChainState) -> Result<Self> {
        let (lo, hi) = Self::pump_window(alpha_pump);
        let lnf = ln_factorials(hi);
        let r = alpha_pump.norm();
        let pump: Vec<C64> = (lo..=hi)
            .map(|p| {
                if r == 0.0 {
                    return if p == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                }
                let pf = p as f64;
                let ln_mag = pf * r.ln() - 0.5 * lnf[p] - 0.5 * r * r;
                C64::from_polar(ln_mag.exp(), pf * alpha_pump.arg())
            })
            .collect();
        let amps = pump
            .iter()
            .flat_map(|a| chain.amplitudes().iter().map(move |c| a * c))
            .collect();
        Self::new(lo, hi, chain.truncation(), amps)
    }

    pub fn pump_range(&self) -> (usize, usize) {
        (self.p_lo, self.p_hi)
    }

    pub fn chain_truncation(&self) -> usize {
        self.m_max
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn index(&self, p: usize, m: usize) -> usize {
        (p - self.p_lo) * (self.m_max + 1) + m
    }

    pub fn get(&self, p: usize, m: usize) -> C64 {
        self.amps[self.index(p, m)]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Reduced signal/idler (chain) density matrix, tracing out the pump.
    pub fn chain_density(&self) -> DMatrix<C64> {
        let n = self.m_max + 1;
        let mut rho = DMatrix::zeros(n, n);
        for p in self.p_lo..=self.p_hi {
            for a in 0..n {
                let ca = self.get(p, a);
                if ca == C64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..n {
                    rho[(a, b)] += ca * self.get(p, b).conj();
                }
            }
        }
        rho
    }

    /// Reduced pump density matrix over the window.
    pub fn pump_density(&self) -> DMatrix<C64> {
        let n = self.p_hi - self.p_lo + 1;
        let mut rho = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                rho[(a, b)] = (0..=self.m_max)
                    .map(|m| {
                        self.get(a + self.p_lo, m) * self.get(b + self.p_lo, m).conj()
                    })
                    .sum();
            }
        }
        rho
    }

    /// `Tr(ρ_si²)` of the signal/idler reduced state.
    pub fn chain_purity(&self) -> f64 {
        self.chain_density().iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨a_Σ⟩` over the window.
    pub fn pump_mean_field(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for p in (self.p_lo + 1)..=self.p_hi {
            let s = (p as f64).sqrt();
            for m in 0..=self.m_max {
                acc += self.get(p - 1, m).conj() * self.get(p, m) * s;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_small_and_large() {
        let s = ChainState::uniform(1).unwrap();
        for c in s.amplitudes() {
            assert_abs_diff_eq!(c.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-8);
            assert_eq!(c.im, 0.0);
        }
        let s = ChainState::uniform(120).unwrap();
        assert!(s.amplitudes().iter().all(|c| (c.re - 1.0 / 11.0).abs() < 1e-15));
        let s = ChainState::uniform(3).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-15);
        assert!(matches!(ChainState::uniform(0), Err(Error::InvalidTruncation(_))));
    }

    #[test]
    fn coherent_vacuum_and_poisson() {
        let v = ChainState::coherent(C64::new(0.0, 0.0), 5).unwrap();
        assert_eq!(v.amplitudes()[0], C64::new(1.0, 0.0));
        assert!(v.amplitudes()[1..].iter().all(|c| c.norm() == 0.0));

        let s = ChainState::coherent(C64::new(7.0, 0.0), 110).unwrap();
        assert_abs_diff_eq!(s.mean_index(), 49.0, epsilon = 0.01);

        // e^{-4} 4^2 / 2!
        let p2 = (-4.0_f64).exp() * 16.0 / 2.0;
        let s = ChainState::coherent_with_tail_limit(C64::new(2.0, 0.0), 12, 1e-3).unwrap();
        assert_abs_diff_eq!(s.probabilities()[2], p2, epsilon = 2e-4);
        // 0.2707 = e^{-2}·2²/2! belongs to |α|² = 2.
        let s = ChainState::coherent(C64::new(2.0_f64.sqrt(), 0.0), 12).unwrap();
        assert_abs_diff_eq!(s.probabilities()[2], 0.2707, epsilon = 1e-4);
    }

    #[test]
    fn coherent_rejects_short_truncation() {
        let err = ChainState::coherent(C64::new(7.0, 0.0), 60).unwrap_err();
        assert!(matches!(err, Error::TruncationTooSmall { .. }));
        assert!(ChainState::coherent(C64::new(2.0, 0.0), 12).is_err());
    }

    #[test]
    fn coherent_poisson_moments() {
        for &a in &[1.5_f64, 3.0, 5.0] {
            let m = (a * a + 6.0 * a).ceil() as usize + 2;
            let s = ChainState::coherent(C64::new(a, 0.0), m).unwrap();
            let p = s.probabilities();
            let mean = s.mean_index();
            let var: f64 = p.iter().enumerate().map(|(k, q)| (k as f64 - mean).powi(2) * q).sum();
            assert!((mean - a * a).abs() / (a * a) < 0.01);
            assert!((var - a * a).abs() / (a * a) < 0.01);
        }
    }

    #[test]
    fn squeezed_vacuum_geometric() {
        let v = ChainState::squeezed_vacuum(0.0, 4).unwrap();
        assert_eq!(v.probabilities()[0], 1.0);
        let s = ChainState::squeezed_vacuum(1.0, 60).unwrap();
        let p = s.probabilities();
        let ratio = 1.0_f64.tanh().powi(2);
        assert_abs_diff_eq!(ratio, 0.5800, epsilon = 1e-4);
        for m in 0..60 {
            if p[m] > 1e-12 {
                assert!(p[m + 1] < p[m]);
                assert_abs_diff_eq!(p[m + 1] / p[m], ratio, epsilon = 1e-10);
            }
        }
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
        assert!(ChainState::squeezed_vacuum(2.0, 10).is_err());
    }

    #[test]
    fn embed_extract_round_trip() {
        let c = ChainState::coherent_with_tail_limit(C64::new(2.0, 0.0), 12, 1e-3).unwrap();
        let two = TwoModeState::embed_chain(&c);
        for ns in 0..=12 {
            for ni in 0..=12 {
                let expect = if ns == ni { c.amplitudes()[ns] } else { C64::new(0.0, 0.0) };
                assert_eq!(two.get(ns, ni), expect);
            }
        }
        let back = two.extract_chain().unwrap();
        for (a, b) in back.amplitudes().iter().zip(c.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        let vac = TwoModeState::embed_chain(&ChainState::fock(0, 3).unwrap());
        assert_eq!(vac.get(0, 0), C64::new(1.0, 0.0));
    }

    #[test]
    fn extract_rejects_off_diagonal() {
        let sig = [C64::new(0.6, 0.0), C64::new(0.8, 0.0)];
        let idl = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let s = TwoModeState::product(&sig, &idl).unwrap();
        assert!(s.extract_chain().is_err());
    }

    #[test]
    fn pure_density_properties() {
        let vac = TwoModeState::embed_chain(&ChainState::fock(0, 2).unwrap());
        let rho = TwoModeDensityMatrix::from_pure(&vac);
        let nonzero: Vec<_> = rho.entries().iter().filter(|c| c.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(*nonzero[0], C64::new(1.0, 0.0));

        let c = ChainState::coherent_with_tail_limit(C64::new(2.0, 0.0), 12, 1e-3).unwrap();
        let rho = TwoModeDensityMatrix::from_pure(&TwoModeState::embed_chain(&c));
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
        let p = c.probabilities();
        for ns in 0..=12 {
            for ni in 0..=12 {
                let expect = if ns == ni { p[ns] } else { 0.0 };
                let k = rho.index(ns, ni);
                assert_abs_diff_eq!(rho.get(k, k).re, expect, epsilon = 1e-15);
            }
        }
        let lo = rho.min_eigenvalue();
        assert!(lo > -1e-10, "{lo}");
    }

    #[test]
    fn three_mode_window_and_purity() {
        let chain = ChainState::coherent(C64::new(1.0, 0.0), 10).unwrap();
        let s = ThreeModeState::coherent_pump(C64::new(4.0, 0.0), &chain).unwrap();
        assert_eq!(s.pump_range(), (0, 40));
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.chain_purity(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.pump_mean_field().re, 4.0, epsilon = 1e-6);
        assert_eq!(ThreeModeState::pump_window(C64::new(8.0, 0.0)), (16, 112));
    }
}
