//! Kerr frequencies, detuning weights and the NSOPO interaction Hamiltonians.
//!
//! Modes are indexed `Σ = 0`, `s = 1`, `i = 2` throughout. All Hamiltonians
//! are returned divided by ħ, i.e. in units of angular frequency.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64, HBAR};

pub const SUM: usize = 0;
pub const SIGNAL: usize = 1;
pub const IDLER: usize = 2;

/// Symmetric 3×3 matrix of Kerr frequencies `g_jk`, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KerrMatrix {
    g: [[f64; 3]; 3],
}

impl KerrMatrix {
    pub fn new(g_pp: f64, g_ss: f64, g_ii: f64, g_ps: f64, g_pi: f64, g_si: f64) -> Self {
        Self {
            g: [[g_pp, g_ps, g_pi], [g_ps, g_ss, g_si], [g_pi, g_si, g_ii]],
        }
    }

    /// Only the signal/idler self- and cross-phase terms.
    pub fn signal_idler(g_ss: f64, g_ii: f64, g_si: f64) -> Self {
        Self::new(0.0, g_ss, g_ii, 0.0, 0.0, g_si)
    }

    /// Builds from a full matrix, rejecting asymmetric input.
    pub fn from_matrix(g: [[f64; 3]; 3]) -> Result<Self> {
        for j in 0..3 {
            for k in 0..3 {
                if g[j][k] != g[k][j] {
                    return Err(Error::InvalidParameter(format!(
                        "Kerr matrix not symmetric at ({j},{k})"
                    )));
                }
            }
        }
        Ok(Self { g })
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.g[j][k]
    }

    pub fn as_array(&self) -> [[f64; 3]; 3] {
        self.g
    }
}

/// Static detuning and the per-mode detuning weights, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningWeights {
    pub delta: f64,
    pub g_sum: f64,
    pub g_signal: f64,
    pub g_idler: f64,
    pub gamma: f64,
}

/// Physical-layer description of the three cavity modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KerrSystem {
    pub omega: [f64; 3],
    pub zeta: [f64; 3],
    pub g: KerrMatrix,
    pub length: f64,
    pub area: f64,
}

impl KerrSystem {
    /// Derives `g_jk` from Γ⁽³⁾ (symmetric, Gaussian units).
    pub fn from_susceptibility(
        omega: [f64; 3],
        zeta: [f64; 3],
        gamma3: [[f64; 3]; 3],
        area: f64,
        length: f64,
    ) -> Result<Self> {
        if omega.iter().any(|w| !(*w > 0.0)) || zeta.iter().any(|z| !(*z > 0.0)) {
            return Err(Error::Domain("mode frequencies and ζ must be positive".into()));
        }
        let mut g = [[0.0; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                g[j][k] = kerr_frequency(zeta[j], zeta[k], gamma3[j][k], area, length)?;
            }
        }
        Ok(Self {
            omega,
            zeta,
            g: KerrMatrix::from_matrix(g)?,
            length,
            area,
        })
    }

    pub fn detuning_weights(&self) -> DetuningWeights {
        detuning_weights(self.omega, &self.g)
    }
}

/// One piece of a piecewise-constant detuning schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSegment {
    pub duration: f64,
    /// Added to `Δ(n′)` while the segment is active, rad/s.
    #[serde(default)]
    pub delta_offset: f64,
}

/// The dynamical knobs of a shaping run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapingParams {
    pub xi: C64,
    pub gamma: f64,
    pub n_center: usize,
    #[serde(default)]
    pub delta_center: f64,
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<ScheduleSegment>>,
}

impl ShapingParams {
    pub fn new(xi: C64, gamma: f64, n_center: usize, tau: f64) -> Self {
        Self {
            xi,
            gamma,
            n_center,
            delta_center: 0.0,
            tau,
            schedule: None,
        }
    }

    pub fn with_delta_center(mut self, delta: f64) -> Self {
        self.delta_center = delta;
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<ScheduleSegment>) -> Result<Self> {
        self.schedule = Some(schedule);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.xi.re.is_finite()
            && self.xi.im.is_finite()
            && self.gamma.is_finite()
            && self.delta_center.is_finite();
        if !finite {
            return Err(Error::InvalidParameter("shaping parameters must be finite".into()));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!("τ must be positive, got {}", self.tau)));
        }
        if let Some(segs) = &self.schedule {
            if segs.is_empty() {
                return Err(Error::InvalidParameter("schedule has no segments".into()));
            }
            if segs.iter().any(|s| !(s.duration > 0.0) || !s.delta_offset.is_finite()) {
                return Err(Error::InvalidParameter(
                    "schedule durations must be positive and offsets finite".into(),
                ));
            }
            let total: f64 = segs.iter().map(|s| s.duration).sum();
            if (total - self.tau).abs() > 1e-9 * self.tau {
                return Err(Error::InvalidParameter(format!(
                    "schedule durations sum to {total}, expected τ = {}",
                    self.tau
                )));
            }
        }
        Ok(())
    }

    /// Accumulated phase `∫₀ᵗ δ_offset(t′) dt′` from the schedule.
    pub fn offset_phase(&self, t: f64) -> f64 {
        let Some(segs) = &self.schedule else {
            return 0.0;
        };
        let mut start = 0.0;
        let mut acc = 0.0;
        for s in segs {
            if t <= start {
                break;
            }
            acc += s.delta_offset * (t - start).min(s.duration);
            start += s.duration;
        }
        // Past the end the last offset keeps running.
        if t > start {
            if let Some(last) = segs.last() {
                acc += last.delta_offset * (t - start);
            }
        }
        acc
    }

    /// Segment boundaries `[0, t₁, …, τ]`.
    pub fn segment_times(&self) -> Vec<f64> {
        match &self.schedule {
            None => vec![0.0, self.tau],
            Some(segs) => {
                let mut out = vec![0.0];
                let mut t = 0.0;
                for s in segs {
                    t += s.duration;
                    out.push(t);
                }
                out
            }
        }
    }

    /// Chain coupling `⟨m|H|m+1⟩ = −i(m+1)Ξ e^{iφ_m(t)}`.
    pub fn chain_coupling(&self, m: usize, t: f64) -> C64 {
        let phase = (self.gamma * (self.n_center as f64 - m as f64) + self.delta_center) * t
            + self.offset_phase(t);
        C64::new(0.0, -((m + 1) as f64)) * self.xi * C64::from_polar(1.0, phase)
    }
}

/// Coherent pump description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpModel {
    pub alpha: C64,
    pub edge_fraction: f64,
}

impl PumpModel {
    pub fn new(alpha: C64, edge_fraction: f64) -> Result<Self> {
        if !(edge_fraction > 0.0 && edge_fraction < 1.0) {
            return Err(Error::Domain(format!(
                "spectral edge fraction must lie in (0,1), got {edge_fraction}"
            )));
        }
        Ok(Self { alpha, edge_fraction })
    }
}

/// `g_ij = (24π A L/ħ) ζ_i² ζ_j² Γ⁽³⁾_ij`.
pub fn kerr_frequency(zeta_i: f64, zeta_j: f64, gamma3: f64, area: f64, length: f64) -> Result<f64> {
    if !(area > 0.0) || !(length > 0.0) {
        return Err(Error::Domain(format!(
            "area and length must be positive, got A={area}, L={length}"
        )));
    }
    Ok(24.0 * std::f64::consts::PI * area * length / HBAR
        * zeta_i.powi(2)
        * zeta_j.powi(2)
        * gamma3)
}

/// `δ`, `G_Σ`, `G_s`, `G_i` and `γ = G_s + G_i`.
pub fn detuning_weights(omega: [f64; 3], g: &KerrMatrix) -> DetuningWeights {
    let gg = |j, k| g.get(j, k);
    let delta = omega[SUM] - omega[SIGNAL] - omega[IDLER]
        + 2.0 * (gg(SIGNAL, SIGNAL) + gg(IDLER, IDLER) - gg(SUM, SUM));
    let g_sum = gg(SUM, SIGNAL) + gg(SUM, IDLER) - 2.0 * gg(SUM, SUM);
    let g_signal = 2.0 * gg(SIGNAL, SIGNAL) + gg(IDLER, SIGNAL) - gg(SUM, SIGNAL);
    let g_idler = 2.0 * gg(IDLER, IDLER) + gg(SIGNAL, IDLER) - gg(SUM, IDLER);
    DetuningWeights {
        delta,
        g_sum,
        g_signal,
        g_idler,
        gamma: g_signal + g_idler,
    }
}

/// `Ξ = (12π A L/ħ) ζ_Σ ζ_s ζ_i Γ⁽²⁾ α_Σ*`.
pub fn xi_parameter(zeta: [f64; 3], gamma2: f64, alpha_pump: C64, area: f64, length: f64) -> C64 {
    let pref = 12.0 * std::f64::consts::PI * area * length / HBAR
        * zeta[SUM]
        * zeta[SIGNAL]
        * zeta[IDLER]
        * gamma2;
    alpha_pump.conj() * pref
}

/// Fock-basis eigenvalue of `H₀/ħ` with constant offsets dropped.
pub fn h0_diagonal(omega: [f64; 3], g: &KerrMatrix, n: [i64; 3]) -> Result<f64> {
    if n.iter().any(|&k| k < 0) {
        return Err(Error::Domain(format!("negative occupation {n:?}")));
    }
    let nf = n.map(|k| k as f64);
    let mut e = 0.0;
    for j in 0..3 {
        let (k, l) = others(j);
        let lin = g.get(j, j) + 0.5 * g.get(j, k) + 0.5 * g.get(j, l);
        e += (omega[j] - lin) * nf[j] - g.get(j, j) * nf[j] * nf[j];
    }
    e -= g.get(SUM, SIGNAL) * nf[SUM] * nf[SIGNAL]
        + g.get(SUM, IDLER) * nf[SUM] * nf[IDLER]
        + g.get(SIGNAL, IDLER) * nf[SIGNAL] * nf[IDLER];
    Ok(e)
}

/// Phase frequency of `ξ_j`, so that `a_j(t) = e^{−i f(N) t} a_j`, with the
/// occupations `n` those of the state *after* the annihilation.
///
/// Equals `E(n + e_j) − E(n)` of [`h0_diagonal`]; in particular the
/// cross-Kerr terms enter with a minus sign.
pub fn xi_frequency(mode: usize, omega: [f64; 3], g: &KerrMatrix, n: [i64; 3]) -> f64 {
    let (k, l) = others(mode);
    let nf = n.map(|x| x as f64);
    omega[mode]
        - (g.get(mode, mode) + 0.5 * g.get(mode, k) + 0.5 * g.get(mode, l))
        - g.get(mode, mode) * (2.0 * nf[mode] + 1.0)
        - g.get(mode, k) * nf[k]
        - g.get(mode, l) * nf[l]
}

fn others(j: usize) -> (usize, usize) {
    match j {
        SUM => (SIGNAL, IDLER),
        SIGNAL => (SUM, IDLER),
        _ => (SUM, SIGNAL),
    }
}

/// Tridiagonal chain Hamiltonian; only the upper diagonal is stored, the
/// lower one being its conjugate and the diagonal zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainHamiltonian {
    pub upper: Vec<C64>,
}

impl ChainHamiltonian {
    pub fn dim(&self) -> usize {
        self.upper.len() + 1
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let n = self.dim();
        let mut h = vec![vec![C64::new(0.0, 0.0); n]; n];
        for (m, u) in self.upper.iter().enumerate() {
            h[m][m + 1] = *u;
            h[m + 1][m] = u.conj();
        }
        h
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = self.dim();
        for k in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            if k + 1 < n {
                acc += self.upper[k] * x[k + 1];
            }
            if k > 0 {
                acc += self.upper[k - 1].conj() * x[k - 1];
            }
            y[k] = acc;
        }
    }
}

/// Chain-form interaction Hamiltonian at time `t` on `m = 0..=M`.
pub fn chain_hamiltonian(params: &ShapingParams, truncation: usize, t: f64) -> ChainHamiltonian {
    ChainHamiltonian {
        upper: (0..truncation).map(|m| params.chain_coupling(m, t)).collect(),
    }
}

/// Two-mode interaction Hamiltonian. Entry `up[a]` couples basis state `a =
/// (n_s, n_i)` to `(n_s+1, n_i+1)`; states on the outer edge have none.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeHamiltonian {
    pub ms: usize,
    pub mi: usize,
    pub up: Vec<C64>,
}

impl TwoModeHamiltonian {
    pub fn dim(&self) -> usize {
        (self.ms + 1) * (self.mi + 1)
    }

    pub fn index(&self, ns: usize, ni: usize) -> usize {
        ns * (self.mi + 1) + ni
    }

    /// Index of `(n_s+1, n_i+1)`, if inside the truncation.
    pub fn up_index(&self, a: usize) -> Option<usize> {
        let (ns, ni) = (a / (self.mi + 1), a % (self.mi + 1));
        (ns < self.ms && ni < self.mi).then(|| a + self.mi + 2)
    }

    /// Index of `(n_s−1, n_i−1)`, if both are positive.
    pub fn down_index(&self, a: usize) -> Option<usize> {
        let (ns, ni) = (a / (self.mi + 1), a % (self.mi + 1));
        (ns > 0 && ni > 0).then(|| a - self.mi - 2)
    }

    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let n = self.dim();
        let mut h = vec![vec![C64::new(0.0, 0.0); n]; n];
        for a in 0..n {
            if let Some(b) = self.up_index(a) {
                h[a][b] = self.up[a];
                h[b][a] = self.up[a].conj();
            }
        }
        h
    }
}

/// Two-mode Hamiltonian with the default split `G_s = G_i = γ/2`.
pub fn two_mode_hamiltonian(
    params: &ShapingParams,
    ms: usize,
    mi: usize,
    t: f64,
) -> TwoModeHamiltonian {
    two_mode_hamiltonian_split(params, 0.5 * params.gamma, 0.5 * params.gamma, ms, mi, t)
}

/// Two-mode Hamiltonian with explicit weights. The phase uses the lower of
/// the two coupled states, `Δ = Δ(n′) + G_s(n′−n_s) + G_i(n′−n_i)`, which
/// reduces to the chain form on `n_s = n_i` whenever `G_s + G_i = γ`.
pub fn two_mode_hamiltonian_split(
    params: &ShapingParams,
    g_signal: f64,
    g_idler: f64,
    ms: usize,
    mi: usize,
    t: f64,
) -> TwoModeHamiltonian {
    let dim = (ms + 1) * (mi + 1);
    let nc = params.n_center as f64;
    let base = params.delta_center * t + params.offset_phase(t);
    let mut up = vec![C64::new(0.0, 0.0); dim];
    for ns in 0..ms {
        for ni in 0..mi {
            let phase = base + (g_signal * (nc - ns as f64) + g_idler * (nc - ni as f64)) * t;
            let amp = (((ns + 1) * (ni + 1)) as f64).sqrt();
            up[ns * (mi + 1) + ni] =
                C64::new(0.0, -amp) * params.xi * C64::from_polar(1.0, phase);
        }
    }
    TwoModeHamiltonian { ms, mi, up }
}

/// Chain phases `e^{+iθm²}` with `θ = (g_ss + g_ii + g_is) t`.
pub fn kerr_rotation_phases(g_ss: f64, g_ii: f64, g_is: f64, t: f64, truncation: usize) -> Vec<C64> {
    let theta = (g_ss + g_ii + g_is) * t;
    (0..=truncation)
        .map(|m| {
            let m2 = (m * m) as f64;
            C64::from_polar(1.0, (theta * m2).rem_euclid(std::f64::consts::TAU))
        })
        .collect()
}
