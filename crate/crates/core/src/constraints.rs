//! Material feasibility layer, Gaussian (CGS) units throughout.
//!
//! A [`MaterialSpec`] describes the cavity and its susceptibilities;
//! [`full_report`] maps it through `χ → Γ → ζ → g → (γ, Ξ)` and evaluates the
//! five NSOPO constraints. "Much less than" is taken as a factor of ten.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::hamiltonians::{detuning_weights, kerr_frequency, xi_parameter, KerrMatrix, SIGNAL, SUM};
use crate::{Error, Result, C64, C_LIGHT, HBAR};

/// Factor used to quantify "≪".
pub const MUCH_LESS: f64 = 10.0;
/// Useful range of `Ξ/γ`.
pub const XI_OVER_GAMMA_RANGE: (f64, f64) = (0.1, 10.0);

fn default_infidelity() -> f64 {
    0.01
}

/// Cavity, susceptibilities and operating point. Mode arrays are ordered
/// `[Σ, s, i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub chi1: f64,
    pub chi2: f64,
    pub chi3: f64,
    pub refractive_index: [f64; 3],
    /// Defaults to `n²` per mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<[f64; 3]>,
    /// cm/s.
    pub group_velocity: [f64; 3],
    /// rad/s; either this or `wavelength` must be present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<[f64; 3]>,
    /// Vacuum wavelengths, cm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<[f64; 3]>,
    /// cm.
    pub length: f64,
    /// cm².
    pub area: f64,
    pub q_factor: f64,
    pub alpha_pump: C64,
    pub edge_fraction: f64,
    /// Nonlinear index, s·cm²/erg; derived from χ⁽³⁾ when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<f64>,
    /// Signal/idler amplitude being shaped.
    pub alpha_si: C64,
    /// Target peak spacing `s`.
    pub spacing: f64,
    /// Typical signal photon number of the shaped state.
    pub n_signal_typical: f64,
    /// Acceptable infidelity `1 − F_acc`.
    #[serde(default = "default_infidelity")]
    pub acceptable_infidelity: f64,
}

impl MaterialSpec {
    /// Collects every problem with the spec into one error.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.omega.is_none() && self.wavelength.is_none() {
            problems.push("one of `omega` or `wavelength` is required".to_string());
        }
        for (name, v) in [("length", self.length), ("area", self.area), ("q_factor", self.q_factor)] {
            if !(v > 0.0) || !v.is_finite() {
                problems.push(format!("`{name}` must be positive, got {v}"));
            }
        }
        if self.refractive_index.iter().any(|n| !(*n > 0.0)) {
            problems.push("`refractive_index` entries must be positive".into());
        }
        if self.group_velocity.iter().any(|v| !(*v > 0.0)) {
            problems.push("`group_velocity` entries must be positive".into());
        }
        if let Some(w) = self.omega.or(self.wavelength) {
            if w.iter().any(|x| !(*x > 0.0)) {
                problems.push("mode frequencies / wavelengths must be positive".into());
            }
        }
        if !(self.edge_fraction > 0.0 && self.edge_fraction < 1.0) {
            problems.push(format!("`edge_fraction` must lie in (0,1), got {}", self.edge_fraction));
        }
        if !(self.spacing > 0.0) {
            problems.push(format!("`spacing` must be positive, got {}", self.spacing));
        }
        if !(self.acceptable_infidelity > 0.0 && self.acceptable_infidelity < 1.0) {
            problems.push(format!(
                "`acceptable_infidelity` must lie in (0,1), got {}",
                self.acceptable_infidelity
            ));
        }
        if let Some(eps) = self.epsilon {
            for (j, (e, n)) in eps.iter().zip(&self.refractive_index).enumerate() {
                if (e - n * n).abs() > 1e-6 * (n * n).max(1.0) {
                    problems.push(format!("mode {j}: ε = {e} inconsistent with n² = {}", n * n));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(problems.join("; ")))
        }
    }

    pub fn volume(&self) -> f64 {
        self.area * self.length
    }

    pub fn omegas(&self) -> [f64; 3] {
        match (self.omega, self.wavelength) {
            (Some(w), _) => w,
            (None, Some(l)) => l.map(|x| 2.0 * PI * C_LIGHT / x),
            (None, None) => [f64::NAN; 3],
        }
    }

    pub fn epsilons(&self) -> [f64; 3] {
        self.epsilon.unwrap_or(self.refractive_index.map(|n| n * n))
    }

    /// The given `n₂` or `24π²χ⁽³⁾/(c n_s²)`.
    pub fn n2(&self) -> f64 {
        self.n2
            .unwrap_or_else(|| n2_from_chi3(self.chi3, self.refractive_index[SIGNAL]))
    }

    /// Same spec with every length scaled by `k` (areas by `k²`).
    pub fn scaled_lengths(&self, k: f64) -> Self {
        let mut s = self.clone();
        s.length *= k;
        s.area *= k * k;
        s
    }
}

/// `Γ⁽¹⁾ = χ⁽¹⁾/ε`, `Γ⁽²⁾ = χ⁽²⁾/ε³`, `Γ⁽³⁾ = χ⁽³⁾/ε⁴ − 8π(χ⁽²⁾)²/ε⁵`.
pub fn gamma_from_chi(chi1: f64, chi2: f64, chi3: f64, eps: f64) -> Result<(f64, f64, f64)> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε must be positive, got {eps}")));
    }
    Ok((
        chi1 / eps,
        chi2 / eps.powi(3),
        chi3 / eps.powi(4) - 8.0 * PI * chi2 * chi2 / eps.powi(5),
    ))
}

/// Single-photon field amplitude `√(ħω v_g n³/(2ALc))`.
pub fn zeta(omega: f64, v_g: f64, n: f64, area: f64, length: f64) -> f64 {
    (HBAR * omega * v_g * n.powi(3) / (2.0 * area * length * C_LIGHT)).sqrt()
}

/// Photon-blockade limit `√((1−f)ω/g)`; infinite when `g ≤ 0`.
pub fn n_max(f: f64, omega: f64, g: f64) -> Result<f64> {
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Domain(format!("spectral edge fraction must lie in (0,1), got {f}")));
    }
    if g <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(((1.0 - f) * omega / g).sqrt())
}

/// `n₂ = 24π²χ⁽³⁾/(c n²)`.
pub fn n2_from_chi3(chi3: f64, n: f64) -> f64 {
    24.0 * PI * PI * chi3 / (C_LIGHT * n * n)
}

pub fn chi3_from_n2(n2: f64, n: f64) -> f64 {
    n2 * C_LIGHT * n * n / (24.0 * PI * PI)
}

/// `n₂` of non-interacting emitters scales linearly with their density.
pub fn scale_n2_by_density(n2: f64, density_from: f64, density_to: f64) -> f64 {
    n2 * (density_to / density_from)
}

/// JSON has no infinities; non-finite floats travel as `"inf"`, `"-inf"`
/// or `"nan"`.
mod ext_float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(x: f64) -> Repr {
        if x.is_finite() {
            Repr::Num(x)
        } else if x.is_nan() {
            Repr::Text("nan".into())
        } else if x > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("not a number: {other:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod triple {
        use super::*;

        pub fn serialize<S: Serializer>(x: &[f64; 3], s: S) -> Result<S::Ok, S::Error> {
            [to_repr(x[0]), to_repr(x[1]), to_repr(x[2])].serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 3], D::Error> {
            let [a, b, c] = <[Repr; 3]>::deserialize(d)?;
            Ok([from_repr(a)?, from_repr(b)?, from_repr(c)?])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintEntry {
    pub name: String,
    #[serde(with = "ext_float")]
    pub value: f64,
    #[serde(with = "ext_float")]
    pub bound: f64,
    pub pass: bool,
    /// Ratio to the bound, oriented so that `> 1` means satisfied.
    #[serde(with = "ext_float")]
    pub margin: f64,
}

fn below(name: &str, value: f64, bound: f64) -> ConstraintEntry {
    let margin = if value <= 0.0 { f64::INFINITY } else { bound / value };
    ConstraintEntry {
        name: name.into(),
        value,
        bound,
        pass: value < bound,
        margin,
    }
}

/// `g_ΣΣ < ω_Σ/(4|α_Σ|⁴)`; negative `g_ΣΣ` always passes.
pub fn check_blockade(omega_sum: f64, alpha_pump: C64, g_pp: f64) -> ConstraintEntry {
    below("photon blockade", g_pp, omega_sum / (4.0 * alpha_pump.norm().powi(4)))
}

/// `|α_si|/(4|α_Σ|) < s/10`.
pub fn check_purity_bound(alpha_si: C64, alpha_pump: C64, spacing: f64) -> ConstraintEntry {
    let value = alpha_si.norm() / (4.0 * alpha_pump.norm());
    below("pump dephasing", value, spacing / MUCH_LESS)
}

/// The closed-form `Ξ/γ` estimate for `g_ss = g_ii = g_is`, `g_ΣΣ = 0`,
/// evaluated at the signal frequency.
pub fn xi_over_gamma(spec: &MaterialSpec) -> Result<f64> {
    if spec.chi3 == 0.0 {
        return Err(Error::Domain("Ξ/γ estimate needs χ⁽³⁾ ≠ 0".into()));
    }
    let w = spec.omegas()[SIGNAL];
    let [vp, vs, vi] = spec.group_velocity;
    let [np, ns, ni] = spec.refractive_index;
    Ok((spec.length * spec.area / (18.0 * HBAR * w)).sqrt()
        * (C_LIGHT * vp / (vs * vi)).sqrt()
        * (1.0 / (np * ns * ni)).sqrt()
        * spec.chi2
        * spec.alpha_pump.norm()
        / spec.chi3)
}

pub fn check_xi_over_gamma(ratio: f64) -> ConstraintEntry {
    let (lo, hi) = XI_OVER_GAMMA_RANGE;
    let margin = if ratio > 0.0 { (ratio / lo).min(hi / ratio) } else { 0.0 };
    ConstraintEntry {
        name: "Ξ/γ window".into(),
        value: ratio,
        bound: hi,
        pass: ratio.is_finite() && (lo..=hi).contains(&ratio),
        margin,
    }
}

/// `|2g_ΣΣ − g_Σs − g_Σi| |α_Σ|² < |γ| N_s / 10`.
pub fn check_pump_weight(g: &KerrMatrix, alpha_pump: C64, gamma: f64, n_signal: f64) -> ConstraintEntry {
    let lhs = (2.0 * g.get(0, 0) - g.get(0, 1) - g.get(0, 2)).abs() * alpha_pump.norm_sqr();
    below("pump detuning weight", lhs, gamma.abs() * n_signal / MUCH_LESS)
}

/// `γ/Γ_cav = 72πQ (ħω/V)(v_g²/c²)(χ⁽³⁾/n²)` at the signal mode.
pub fn strength_to_loss(spec: &MaterialSpec) -> f64 {
    let w = spec.omegas()[SIGNAL];
    let vg = spec.group_velocity[SIGNAL];
    let n = spec.refractive_index[SIGNAL];
    72.0 * PI * spec.q_factor * (HBAR * w / spec.volume()) * (vg * vg / (C_LIGHT * C_LIGHT)) * spec.chi3
        / (n * n)
}

/// `𝓕 = Qħω v_g² n₂/(πVc)` at the signal mode, and the implied infidelity
/// `1/𝓕`.
pub fn figure_of_merit(spec: &MaterialSpec) -> (f64, f64) {
    let w = spec.omegas()[SIGNAL];
    let vg = spec.group_velocity[SIGNAL];
    let f = spec.q_factor * HBAR * w * vg * vg * spec.n2() / (PI * spec.volume() * C_LIGHT);
    (f, 1.0 / f)
}

/// Quantities derived on the way to the constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub omega: [f64; 3],
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub zeta: [f64; 3],
    pub kerr: [[f64; 3]; 3],
    pub gamma: f64,
    pub xi: C64,
    #[serde(with = "ext_float")]
    pub xi_over_gamma_direct: f64,
    #[serde(with = "ext_float::triple")]
    pub n_max: [f64; 3],
    pub n2: f64,
    #[serde(with = "ext_float")]
    pub strength_to_loss: f64,
    #[serde(with = "ext_float")]
    pub figure_of_merit: f64,
    #[serde(with = "ext_float")]
    pub implied_infidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub constraints: Vec<ConstraintEntry>,
    pub derived: Derived,
    pub overall_pass: bool,
}

impl ConstraintReport {
    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<4} {:<22} {:>12} {:>12} {:>12}  result", "#", "constraint", "value", "bound", "margin");
        for (k, c) in self.constraints.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:<4} {:<22} {:>12.4e} {:>12.4e} {:>12.4e}  {}",
                k + 1,
                c.name,
                c.value,
                c.bound,
                c.margin,
                if c.pass { "PASS" } else { "FAIL" }
            );
        }
        let d = &self.derived;
        let _ = writeln!(out);
        let _ = writeln!(out, "gamma (rad/s)          {:.4e}", d.gamma);
        let _ = writeln!(out, "|Xi| (rad/s)           {:.4e}", d.xi.norm());
        let _ = writeln!(out, "|Xi|/gamma (direct)    {:.4e}", d.xi_over_gamma_direct);
        let _ = writeln!(out, "n2 (s cm^2/erg)        {:.4e}", d.n2);
        let _ = writeln!(out, "gamma/Gamma_cav        {:.4e}", d.strength_to_loss);
        let _ = writeln!(out, "figure of merit F      {:.4e}", d.figure_of_merit);
        let _ = writeln!(out, "implied infidelity 1/F {:.4e}", d.implied_infidelity);
        let _ = writeln!(out, "overall                {}", if self.overall_pass { "PASS" } else { "FAIL" });
        out
    }
}

/// Evaluates all five constraints.
pub fn full_report(spec: &MaterialSpec) -> Result<ConstraintReport> {
    spec.validate()?;
    let omega = spec.omegas();
    let eps = spec.epsilons()[SIGNAL];
    let (gamma1, gamma2, gamma3) = gamma_from_chi(spec.chi1, spec.chi2, spec.chi3, eps)?;
    let mut zeta_m = [0.0; 3];
    for j in 0..3 {
        zeta_m[j] = zeta(omega[j], spec.group_velocity[j], spec.refractive_index[j], spec.area, spec.length);
    }
    let mut kerr = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            kerr[j][k] = kerr_frequency(zeta_m[j], zeta_m[k], gamma3, spec.area, spec.length)?;
        }
    }
    let g = KerrMatrix::from_matrix(kerr)?;
    let weights = detuning_weights(omega, &g);
    let xi = xi_parameter(zeta_m, gamma2, spec.alpha_pump, spec.area, spec.length);
    let mut nmax = [0.0; 3];
    for j in 0..3 {
        nmax[j] = n_max(spec.edge_fraction, omega[j], kerr[j][j])?;
    }
    let (fom, inf) = figure_of_merit(spec);
    let stl = strength_to_loss(spec);

    let c3 = match xi_over_gamma(spec) {
        Ok(r) => check_xi_over_gamma(r),
        Err(_) => check_xi_over_gamma(f64::NAN),
    };
    let c5 = {
        let value = fom * spec.acceptable_infidelity;
        ConstraintEntry {
            name: "figure of merit".into(),
            value: fom,
            bound: 1.0 / spec.acceptable_infidelity,
            pass: value >= 1.0,
            margin: value,
        }
    };
    let constraints = vec![
        check_blockade(omega[SUM], spec.alpha_pump, kerr[SUM][SUM]),
        check_purity_bound(spec.alpha_si, spec.alpha_pump, spec.spacing),
        c3,
        check_pump_weight(&g, spec.alpha_pump, weights.gamma, spec.n_signal_typical),
        c5,
    ];
    let overall_pass = constraints.iter().all(|c| c.pass);
    let direct = if weights.gamma != 0.0 { xi.norm() / weights.gamma.abs() } else { f64::INFINITY };
    Ok(ConstraintReport {
        constraints,
        derived: Derived {
            omega,
            gamma1,
            gamma2,
            gamma3,
            zeta: zeta_m,
            kerr,
            gamma: weights.gamma,
            xi,
            xi_over_gamma_direct: direct,
            n_max: nmax,
            n2: spec.n2(),
            strength_to_loss: stl,
            figure_of_merit: fom,
            implied_infidelity: inf,
        },
        overall_pass,
    })
}

/// The plausibility scenario: λ_s = λ_i = 1 µm, a 1 µm × 1 µm
/// cross-section, `L = 10λ`, `v_g = c`, `n₂ = 5×10⁻³ s·cm²/erg`, `Q = 10⁴`.
///
/// χ⁽²⁾ is not part of the scenario; it is set so that the `Ξ/γ` estimate
/// sits at 1.
pub fn appendix_spec() -> MaterialSpec {
    let lambda = 1e-4;
    let n2 = 5e-3;
    let mut spec = MaterialSpec {
        chi1: 0.0,
        chi2: 0.0,
        chi3: chi3_from_n2(n2, 1.0),
        refractive_index: [1.0; 3],
        epsilon: None,
        group_velocity: [C_LIGHT; 3],
        omega: None,
        wavelength: Some([lambda / 2.0, lambda, lambda]),
        length: 10.0 * lambda,
        area: lambda * lambda,
        q_factor: 1e4,
        alpha_pump: C64::new(100.0, 0.0),
        edge_fraction: 0.75,
        n2: Some(n2),
        alpha_si: C64::new(2.0, 0.0),
        spacing: 7.0,
        n_signal_typical: 5.0,
        acceptable_infidelity: 0.01,
    };
    spec.chi2 = 1.0;
    let unit = xi_over_gamma(&spec).unwrap_or(1.0);
    spec.chi2 = 1.0 / unit;
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gamma_from_chi_examples() {
        let (_, _, g3) = gamma_from_chi(0.0, 0.0, 2.0, 1.5).unwrap();
        assert_abs_diff_eq!(g3, 2.0 / 1.5_f64.powi(4), epsilon = 1e-15);
        let (_, _, g3) = gamma_from_chi(0.0, 0.3, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(g3, 2.0 - 8.0 * PI * 0.09, epsilon = 1e-14);
        assert_eq!(gamma_from_chi(0.0, 0.0, 0.0, 2.0).unwrap(), (0.0, 0.0, 0.0));
        assert!(gamma_from_chi(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn zeta_examples() {
        let z = zeta(1.0, 1.0, 1.0, 1.0, 1.0);
        assert_abs_diff_eq!(z, (HBAR / (2.0 * C_LIGHT)).sqrt(), epsilon = 1e-30);
        assert_abs_diff_eq!(zeta(2.0, 1.0, 1.0, 1.0, 1.0) / z, 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(zeta(1.0, 0.01, 1.0, 1.0, 1.0) / z, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn n_max_examples() {
        assert_abs_diff_eq!(n_max(0.75, 8.0, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n_max(0.75, 100.0, 1.0).unwrap(), (100.0_f64 / 4.0).sqrt(), epsilon = 1e-12);
        assert!(n_max(0.75, 1.0, 0.0).unwrap().is_infinite());
        assert!(n_max(1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn simple_checks() {
        let a = C64::new(3.0, 0.0);
        assert!(check_blockade(10.0, a, 0.0).pass);
        assert!(!check_blockade(10.0, a, 10.0 / (2.0 * 81.0)).pass);
        assert!(check_blockade(10.0, a, -5.0).pass);

        assert!(check_purity_bound(C64::new(0.0, 0.0), a, 2.0).pass);
        assert!(!check_purity_bound(a * 8.0, a, 2.0).pass);
        assert!(check_purity_bound(a * 4.0 * 2.0 / 20.0, a, 2.0).pass);

        assert!(check_xi_over_gamma(1.0).pass);
        assert!(!check_xi_over_gamma(0.0).pass);
        assert!(!check_xi_over_gamma(11.0).pass);

        let gamma = 2.0;
        let ns = 5.0;
        assert!(check_pump_weight(&KerrMatrix::signal_idler(1.0, 1.0, 1.0), a, gamma, ns).pass);
        // |2g_ΣΣ||α|² = γN_s
        let g = KerrMatrix::new(gamma * ns / (2.0 * 9.0), 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(!check_pump_weight(&g, a, gamma, ns).pass);
        let g = KerrMatrix::new(gamma * ns / (200.0 * 9.0), 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(check_pump_weight(&g, a, gamma, ns).pass);
    }

    #[test]
    fn scaling_laws() {
        let s = appendix_spec();
        let r0 = strength_to_loss(&s);
        let mut q = s.clone();
        q.q_factor *= 2.0;
        assert_abs_diff_eq!(strength_to_loss(&q) / r0, 2.0, epsilon = 1e-12);
        let mut v = s.clone();
        v.length *= 0.5;
        assert_abs_diff_eq!(strength_to_loss(&v) / r0, 2.0, epsilon = 1e-12);
        let mut g = s.clone();
        g.group_velocity[SIGNAL] /= 10.0;
        assert_abs_diff_eq!(strength_to_loss(&g) / r0, 0.01, epsilon = 1e-14);

        let mut a = s.clone();
        let x0 = xi_over_gamma(&a).unwrap();
        a.alpha_pump *= 2.0;
        assert_abs_diff_eq!(xi_over_gamma(&a).unwrap() / x0, 2.0, epsilon = 1e-12);
        a.chi2 = 0.0;
        assert_eq!(xi_over_gamma(&a).unwrap(), 0.0);
        assert!(!check_xi_over_gamma(0.0).pass);

        let mut z = s.clone();
        z.n2 = Some(0.0);
        assert_eq!(figure_of_merit(&z).0, 0.0);
    }

    #[test]
    fn n2_round_trip() {
        let chi3 = 3.7e-9;
        let n = 1.4;
        let back = chi3_from_n2(n2_from_chi3(chi3, n), n);
        assert!((back - chi3).abs() < 1e-12 * chi3);
        let (_, _, g3) = gamma_from_chi(0.0, 0.0, chi3, n * n).unwrap();
        assert!((g3 * (n * n).powi(4) - chi3).abs() < 1e-12 * chi3);
        assert_eq!(scale_n2_by_density(5e-13, 1e8, 1e18), 5e-3);
    }

    #[test]
    fn appendix_report() {
        let s = appendix_spec();
        let r = full_report(&s).unwrap();
        let f = r.derived.figure_of_merit;
        assert!((f.log10() - 10.0).abs() <= 1.0, "F = {f:e}");
        assert!(r.constraints[4].pass);
        assert_abs_diff_eq!(r.constraints[2].value, 1.0, epsilon = 1e-9);
        assert_eq!(r.overall_pass, r.constraints.iter().all(|c| c.pass));
        let json = serde_json::to_string(&r).unwrap();
        let back: ConstraintReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(r.to_table().contains("figure of merit"));
    }

    #[test]
    fn zero_nonlinearity_fails_3_and_5() {
        let mut s = appendix_spec();
        s.chi2 = 0.0;
        s.chi3 = 0.0;
        s.n2 = None;
        let r = full_report(&s).unwrap();
        assert!(!r.constraints[2].pass);
        assert!(!r.constraints[4].pass);
        assert!(!r.overall_pass);
    }

    #[test]
    fn validation_lists_problems() {
        let mut s = appendix_spec();
        s.wavelength = None;
        s.length = -1.0;
        s.epsilon = Some([2.0, 1.0, 1.0]);
        let msg = s.validate().unwrap_err().to_string();
        assert!(msg.contains("omega") && msg.contains("length") && msg.contains("ε"));
    }

    #[test]
    fn length_scaling() {
        let s = appendix_spec();
        let k = 3.0;
        let t = s.scaled_lengths(k);
        let (f0, _) = figure_of_merit(&s);
        let (f1, _) = figure_of_merit(&t);
        assert_abs_diff_eq!(f1 / f0, k.powi(-3), epsilon = 1e-12);
        let w = s.omegas()[SIGNAL];
        let z0 = zeta(w, C_LIGHT, 1.0, s.area, s.length);
        let z1 = zeta(w, C_LIGHT, 1.0, t.area, t.length);
        assert_abs_diff_eq!((z1 / z0).powi(2), k.powi(-3), epsilon = 1e-12);
    }
}
