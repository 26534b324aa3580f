use super::Guard;
use crate::hamiltonians::ShapingParams;
use crate::{Error, Result, C64};

/// Thomas algorithm for `A x = d` with `A` tridiagonal: `sub[k] = A[k+1][k]`,
/// `diag[k] = A[k][k]`, `sup[k] = A[k][k+1]`. `d` is overwritten by `x`.
pub fn solve_tridiagonal(sub: &[C64], diag: &[C64], sup: &[C64], d: &mut [C64]) -> Result<()> {
    let n = diag.len();
    if d.len() != n || sub.len() + 1 != n || sup.len() + 1 != n {
        return Err(Error::ShapeMismatch("tridiagonal band lengths".into()));
    }
    let mut c = vec![C64::new(0.0, 0.0); n];
    let mut piv = diag[0];
    if piv.norm() == 0.0 {
        return Err(Error::NonFinite("tridiagonal solve (zero pivot)"));
    }
    if n > 1 {
        c[0] = sup[0] / piv;
    }
    d[0] /= piv;
    for k in 1..n {
        piv = diag[k] - sub[k - 1] * c[k - 1];
        if piv.norm() == 0.0 {
            return Err(Error::NonFinite("tridiagonal solve (zero pivot)"));
        }
        if k + 1 < n {
            c[k] = sup[k] / piv;
        }
        d[k] = (d[k] - sub[k - 1] * d[k - 1]) / piv;
    }
    for k in (0..n - 1).rev() {
        let next = d[k + 1];
        d[k] -= c[k] * next;
    }
    Ok(())
}

/// One CN step `(1 + i dt H/2) ψ′ = (1 − i dt H/2) ψ` for a Hermitian
/// tridiagonal `H` with zero diagonal, given its upper band.
pub fn cn_step_tridiagonal(upper: &[C64], dt: f64, psi: &mut [C64]) -> Result<()> {
    let n = psi.len();
    debug_assert_eq!(upper.len() + 1, n);
    let h = C64::new(0.0, 0.5 * dt);
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let mut hx = C64::new(0.0, 0.0);
        if k + 1 < n {
            hx += upper[k] * psi[k + 1];
        }
        if k > 0 {
            hx += upper[k - 1].conj() * psi[k - 1];
        }
        rhs[k] = psi[k] - h * hx;
    }
    let sup: Vec<C64> = upper.iter().map(|u| h * u).collect();
    let sub: Vec<C64> = upper.iter().map(|u| h * u.conj()).collect();
    let diag = vec![C64::new(1.0, 0.0); n];
    solve_tridiagonal(&sub, &diag, &sup, &mut rhs)?;
    psi.copy_from_slice(&rhs);
    Ok(())
}

/// Runs `steps` CN steps over `[t0, t1]` of the interaction-picture clock.
pub(crate) fn evolve_segment(
    amps: &mut [C64],
    params: &ShapingParams,
    t0: f64,
    t1: f64,
    steps: usize,
    guard: &mut Guard,
) -> Result<()> {
    let dt = (t1 - t0) / steps as f64;
    let m = amps.len() - 1;
    let mut upper = vec![C64::new(0.0, 0.0); m];
    for k in 0..steps {
        let tm = t0 + (k as f64 + 0.5) * dt;
        for (j, u) in upper.iter_mut().enumerate() {
            *u = params.chain_coupling(j, tm);
        }
        cn_step_tridiagonal(&upper, dt, amps)?;
        guard.observe(amps)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_dense_solution() {
        let sub = vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.2)];
        let diag = vec![C64::new(4.0, 0.0), C64::new(3.0, 1.0), C64::new(5.0, -1.0)];
        let sup = vec![C64::new(0.5, -0.5), C64::new(1.0, 0.0)];
        let x = vec![C64::new(1.0, 2.0), C64::new(-1.0, 0.5), C64::new(0.25, -3.0)];
        let mut d = vec![
            diag[0] * x[0] + sup[0] * x[1],
            sub[0] * x[0] + diag[1] * x[1] + sup[1] * x[2],
            sub[1] * x[1] + diag[2] * x[2],
        ];
        solve_tridiagonal(&sub, &diag, &sup, &mut d).unwrap();
        for (a, b) in d.iter().zip(&x) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn cn_step_preserves_norm() {
        let upper: Vec<C64> = (0..30).map(|k| C64::new(0.1 * k as f64, -0.3)).collect();
        let mut psi: Vec<C64> = (0..31).map(|k| C64::new((k as f64).sin(), 0.2)).collect();
        let n0 = crate::norm_sqr(&psi);
        for _ in 0..1000 {
            cn_step_tridiagonal(&upper, 0.05, &mut psi).unwrap();
        }
        assert!((crate::norm_sqr(&psi) - n0).abs() < 1e-11 * n0);
    }
}
