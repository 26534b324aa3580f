//! Single-mode Wigner function on a rectangular grid.
//!
//! Convention: `A = (x + ip)/√2`, vacuum `W(0,0) = 1/π`, unit integral, so a
//! coherent state `|α⟩` sits at `(√2 Re α, √2 Im α)`.
//!
//! `W(A) = (1/π) Σ_{k≥0} Σ_n (−1)^n √(n!/(n+k)!) |2A|^k e^{−2|A|²}
//! L_n^{(k)}(4|A|²) · w_k Re(ρ_{n+k,n} e^{−ikθ})`, with `w_0 = 1`, `w_k = 2`.
//! The prefactor is accumulated in log space and the Laguerre polynomials by
//! forward recurrence in `n`; both stay finite for `M ≈ 100` and `|A| ≈ 20`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::fock::ln_factorials;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    /// Square grid `[−half, half]²` with the given spacing.
    pub fn square(half_width: f64, step: f64) -> Self {
        let n = (2.0 * half_width / step).round() as usize + 1;
        Self { x_min: -half_width, x_max: half_width, p_min: -half_width, p_max: half_width, nx: n, np: n }
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.np < 2 || !(self.x_max > self.x_min) || !(self.p_max > self.p_min) {
            return Err(Error::InvalidParameter("Wigner grid needs ≥ 2 points per axis and positive extent".into()));
        }
        Ok(())
    }
}

/// `values[ip·nx + ix] = W(xs[ix], ps[ip])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn cell_area(&self) -> f64 {
        (self.xs[1] - self.xs[0]) * (self.ps[1] - self.ps[0])
    }

    pub fn get(&self, ix: usize, ip: usize) -> f64 {
        self.values[ip * self.xs.len() + ix]
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest |W| on the grid border.
    pub fn boundary_max(&self) -> f64 {
        let (nx, np) = (self.xs.len(), self.ps.len());
        let mut m = 0.0_f64;
        for ip in 0..np {
            for ix in 0..nx {
                if ix == 0 || ip == 0 || ix + 1 == nx || ip + 1 == np {
                    m = m.max(self.get(ix, ip).abs());
                }
            }
        }
        m
    }
}

/// Wigner function of a pure single-mode state with Fock amplitudes `amps`.
pub fn wigner(amps: &[C64], grid: &GridSpec) -> Result<WignerGrid> {
    let n = amps.len();
    let rho = move |a: usize, b: usize| amps[a] * amps[b].conj();
    wigner_impl(n, &rho, grid)
}

/// Wigner function of a single-mode density matrix given row-major.
pub fn wigner_from_density(rho: &[C64], dim: usize, grid: &GridSpec) -> Result<WignerGrid> {
    if rho.len() != dim * dim {
        return Err(Error::ShapeMismatch(format!("density has {} entries, expected {}", rho.len(), dim * dim)));
    }
    let f = move |a: usize, b: usize| rho[a * dim + b];
    wigner_impl(dim, &f, grid)
}

fn wigner_impl(dim: usize, rho: &(dyn Fn(usize, usize) -> C64 + Sync), grid: &GridSpec) -> Result<WignerGrid> {
    grid.validate()?;
    if dim == 0 {
        return Err(Error::Domain("empty state".into()));
    }
    let xs = GridSpec::axis(grid.x_min, grid.x_max, grid.nx);
    let ps = GridSpec::axis(grid.p_min, grid.p_max, grid.np);
    let lnf = ln_factorials(dim);
    // Off-diagonals ρ_{n+k,n}, stored per k.
    let bands: Vec<Vec<C64>> = (0..dim).map(|k| (0..dim - k).map(|n| rho(n + k, n)).collect()).collect();

    let rows: Vec<Vec<f64>> = ps
        .par_iter()
        .map(|&p| {
            let mut lag = vec![0.0; dim];
            xs.iter()
                .map(|&x| point(x, p, &bands, &lnf, &mut lag))
                .collect()
        })
        .collect();
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Wigner evaluation"));
    }
    let out = WignerGrid { xs, ps, values };
    let edge = out.boundary_max();
    let peak = out.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if edge > 1e-4 * peak {
        log::warn!("Wigner grid may not cover the state: border |W| {edge:.2e} vs peak {peak:.2e}");
    }
    Ok(out)
}

fn point(x: f64, p: f64, bands: &[Vec<C64>], lnf: &[f64], lag: &mut [f64]) -> f64 {
    let a2 = 0.5 * (x * x + p * p);
    let r = a2.sqrt();
    let theta = p.atan2(x);
    let big_x = 4.0 * a2;
    let ln2r = (2.0 * r).ln();
    let mut total = 0.0;
    for (k, band) in bands.iter().enumerate() {
        if k > 0 && r == 0.0 {
            break;
        }
        let len = band.len();
        let kf = k as f64;
        // L_n^{(k)}(X), n = 0..len
        lag[0] = 1.0;
        if len > 1 {
            lag[1] = 1.0 + kf - big_x;
        }
        for n in 2..len {
            let nf = n as f64;
            lag[n] = ((2.0 * nf - 1.0 + kf - big_x) * lag[n - 1] - (nf - 1.0 + kf) * lag[n - 2]) / nf;
        }
        let phase = C64::from_polar(1.0, -kf * theta);
        let kterm = if k == 0 { 0.0 } else { kf * ln2r };
        let weight = if k == 0 { 1.0 } else { 2.0 };
        let mut acc = 0.0;
        for (n, rho_nk) in band.iter().enumerate() {
            if *rho_nk == C64::new(0.0, 0.0) {
                continue;
            }
            let lp = 0.5 * (lnf[n] - lnf[n + k]) + kterm - 2.0 * a2;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let re = if k == 0 { rho_nk.re } else { (rho_nk * phase).re };
            acc += sign * lp.exp() * lag[n] * re;
        }
        total += weight * acc;
    }
    total / PI
}

/// Positive Wigner mass in the four angular sectors of width π/2 centered on
/// `offset + jπ/2`, `j = 0..3`.
pub fn quadrant_weights(w: &WignerGrid, offset: f64) -> [f64; 4] {
    sector_sums(w, offset, |v| v.max(0.0))
}

/// Signed Wigner integral over the same four sectors. Sums to the total
/// integral; fringes that straddle a sector border still bias it.
pub fn sector_integrals(w: &WignerGrid, offset: f64) -> [f64; 4] {
    sector_sums(w, offset, |v| v)
}

fn sector_sums(w: &WignerGrid, offset: f64, f: impl Fn(f64) -> f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    let area = w.cell_area();
    for (ip, &p) in w.ps.iter().enumerate() {
        for (ix, &x) in w.xs.iter().enumerate() {
            let v = f(w.get(ix, ip)) * area;
            if v == 0.0 {
                continue;
            }
            if x == 0.0 && p == 0.0 {
                out.iter_mut().for_each(|o| *o += 0.25 * v);
                continue;
            }
            let s = (p.atan2(x) - offset) / FRAC_PI_2;
            let lo = s.floor();
            let sector = |f: f64| f.rem_euclid(4.0) as usize;
            if (s - lo - 0.5).abs() < 1e-9 {
                // Points on a sector border are shared evenly.
                out[sector(lo)] += 0.5 * v;
                out[sector(lo + 1.0)] += 0.5 * v;
            } else {
                out[sector(s.round())] += v;
            }
        }
    }
    out
}
