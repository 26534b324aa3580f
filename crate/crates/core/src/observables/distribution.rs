use serde::{Deserialize, Serialize};

use crate::fock::{ChainState, TwoModeDensityMatrix};
use crate::{Error, Result};

/// Photon-number probabilities `P_m`, `m = 0..=M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberDistribution {
    probs: Vec<f64>,
}

impl NumberDistribution {
    /// Wraps probabilities, checking positivity and unit sum (1e−9).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("empty distribution".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::Domain("distribution has negative or non-finite entries".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("distribution sums to {total}")));
        }
        Ok(Self { probs })
    }

    /// Normalizes arbitrary non-negative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Domain("weights have no positive mass".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, m: usize) -> f64 {
        self.probs.get(m).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (m, p) in self.probs.iter().enumerate() {
            if *p > self.probs[best] {
                best = m;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMode {
    Signal,
    Idler,
    /// Diagonal `n_s = n_i` populations only (not normalized to the chain).
    Chain,
}

pub fn number_distribution(state: &ChainState) -> NumberDistribution {
    NumberDistribution { probs: state.probabilities() }
}

pub fn number_distribution_density(rho: &TwoModeDensityMatrix, mode: DensityMode) -> Result<NumberDistribution> {
    let probs = match mode {
        DensityMode::Signal => rho.signal_distribution(),
        DensityMode::Idler => rho.idler_distribution(),
        DensityMode::Chain => {
            let (ms, mi) = rho.truncations();
            if ms != mi {
                return Err(Error::ShapeMismatch("chain marginal needs M_s = M_i".into()));
            }
            let diag = rho.diagonal();
            let probs: Vec<f64> = (0..=ms).map(|m| diag[rho.index(m, m)]).collect();
            return Ok(NumberDistribution { probs });
        }
    };
    NumberDistribution::new(probs.into_iter().map(|p| p.max(0.0)).collect())
}
