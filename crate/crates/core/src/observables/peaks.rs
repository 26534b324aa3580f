use serde::{Deserialize, Serialize};

use super::NumberDistribution;
use crate::{Error, Result};

pub const DEFAULT_PEAK_THRESHOLD: f64 = 0.15;

/// Relative tolerance under which neighbouring probabilities form a plateau.
const PLATEAU_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub locations: Vec<usize>,
    pub spacings: Vec<usize>,
    pub heights: Vec<f64>,
}

/// Strict interior local maxima with `P ≥ fraction·max P`.
///
/// A flat run of equal values bounded by strictly smaller neighbours counts
/// as one peak, placed at the upper-middle index of the run.
pub fn detect_peaks(dist: &NumberDistribution, min_height_fraction: f64) -> Result<PeakReport> {
    if !(min_height_fraction > 0.0 && min_height_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "peak threshold must lie in (0,1), got {min_height_fraction}"
        )));
    }
    let p = dist.probabilities();
    let pmax = p.iter().cloned().fold(0.0, f64::max);
    let tol = PLATEAU_RTOL * pmax;
    let cut = min_height_fraction * pmax;
    let mut locations = Vec::new();
    let mut heights = Vec::new();
    let mut k = 1;
    while k + 1 < p.len() {
        let mut end = k;
        while end + 1 < p.len() && (p[end + 1] - p[k]).abs() <= tol {
            end += 1;
        }
        if end + 1 < p.len() && p[k - 1] < p[k] - tol && p[end + 1] < p[k] - tol && p[k] >= cut {
            locations.push((k + end).div_ceil(2));
            heights.push(p[k]);
        }
        k = end + 1;
    }
    let spacings = locations.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(PeakReport { locations, spacings, heights })
}

/// `P(m)` strictly exceeds both neighbours.
pub fn is_local_max(dist: &NumberDistribution, m: usize) -> bool {
    let p = dist.probabilities();
    m > 0 && m + 1 < p.len() && p[m] > p[m - 1] && p[m] > p[m + 1]
}

/// `P(m)` is strictly below both neighbours.
pub fn is_local_min(dist: &NumberDistribution, m: usize) -> bool {
    let p = dist.probabilities();
    m > 0 && m + 1 < p.len() && p[m] < p[m - 1] && p[m] < p[m + 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ChainState;
    use crate::observables::number_distribution;
    use crate::C64;

    #[test]
    fn poisson_single_peak() {
        let c = ChainState::coherent(C64::new(7.0, 0.0), 110).unwrap();
        let r = detect_peaks(&number_distribution(&c), 0.15).unwrap();
        assert_eq!(r.locations, vec![49]);
        assert!(r.spacings.is_empty());
    }

    #[test]
    fn period_two_comb() {
        let w: Vec<f64> = (0..40).map(|m| if m % 2 == 0 { 1.0 } else { 0.1 }).collect();
        let d = NumberDistribution::from_weights(w).unwrap();
        let r = detect_peaks(&d, 0.15).unwrap();
        assert!(r.spacings.iter().all(|&s| s == 2));
        assert_eq!(r.locations.first(), Some(&2));
    }

    #[test]
    fn threshold_filters_small_peaks() {
        let d = NumberDistribution::from_weights(vec![0.0, 1.0, 0.0, 0.1, 0.0]).unwrap();
        assert_eq!(detect_peaks(&d, 0.15).unwrap().locations, vec![1]);
        assert_eq!(detect_peaks(&d, 0.05).unwrap().locations, vec![1, 3]);
        assert!(detect_peaks(&d, 1.5).is_err());
        assert!(is_local_max(&d, 1));
        assert!(is_local_min(&d, 2));
        assert!(!is_local_min(&d, 0));
    }
}
