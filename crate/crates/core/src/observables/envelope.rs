use std::f64::consts::FRAC_PI_2;

use super::NumberDistribution;
use crate::Result;

/// `s = 2π/(γt)`; `+∞` when `γt = 0`.
pub fn predicted_spacing(gamma: f64, t: f64) -> f64 {
    let gt = gamma * t;
    if gt == 0.0 {
        f64::INFINITY
    } else {
        std::f64::consts::TAU / gt.abs()
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// First-order shaping envelope
/// `∝ sinc(γ(n′−m)τ + arg Ξ + π/2)·(m+1)τ + 1`, normalized to unit sum.
///
/// Where the first-order expression goes negative it is clipped to zero.
pub fn sinc_envelope(
    truncation: usize,
    n_center: usize,
    gamma: f64,
    tau: f64,
    arg_xi: f64,
) -> Result<NumberDistribution> {
    let w = (0..=truncation)
        .map(|m| {
            let x = gamma * (n_center as f64 - m as f64) * tau + arg_xi + FRAC_PI_2;
            (sinc(x) * (m + 1) as f64 * tau + 1.0).max(0.0)
        })
        .collect();
    NumberDistribution::from_weights(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::detect_peaks;
    use std::f64::consts::PI;

    #[test]
    fn spacing_examples() {
        assert!((predicted_spacing(PI, 0.08) - 25.0).abs() < 1e-12);
        assert!((predicted_spacing(1.0, PI / 2.0) - 4.0).abs() < 1e-12);
        assert!((predicted_spacing(2.0 * PI, 1.0) - 1.0).abs() < 1e-12);
        assert!(predicted_spacing(0.0, 3.0).is_infinite());
    }

    #[test]
    fn envelope_centered_for_minus_i() {
        // The (m+1) tilt pulls the central maximum one photon above n′.
        let e = sinc_envelope(120, 60, PI, 0.08, -FRAC_PI_2).unwrap();
        assert!((e.argmax() as i64 - 60).abs() <= 1);
        let t = sinc_envelope(120, 60, PI, 0.08, FRAC_PI_2).unwrap();
        assert!(t.get(60) < e.get(60));
    }

    #[test]
    fn envelope_far_lobes_spaced_by_s() {
        let e = sinc_envelope(400, 60, PI, 0.08, -FRAC_PI_2).unwrap();
        let r = detect_peaks(&e, 0.01).unwrap();
        let far: Vec<_> = r.spacings.iter().rev().take(4).collect();
        assert!(far.iter().all(|&&s| (s as i64 - 25).abs() <= 1), "{:?}", r.locations);
    }

    #[test]
    fn flat_limit() {
        let e = sinc_envelope(10, 5, 0.0, 1e-9, -FRAC_PI_2).unwrap();
        let p = e.probabilities();
        assert!(p.iter().all(|x| (x - p[0]).abs() < 1e-6));
    }
}
