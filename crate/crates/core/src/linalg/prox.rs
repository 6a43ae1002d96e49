use nalgebra::DMatrix;

use super::svd::{recompose, thin_svd_na};
use super::DenseMatrix;
use crate::error::{Error, Result};

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("threshold must be a finite non-negative number, got {tau}")));
    }
    Ok(())
}

/// Proximal map of `tau·|x|`: `sign(m)·max(|m| − tau, 0)`.
#[inline]
pub fn soft_threshold_value(m: f64, tau: f64) -> f64 {
    let mag = m.abs() - tau;
    if mag > 0.0 {
        mag.copysign(m)
    } else {
        0.0
    }
}

/// Entrywise soft-thresholding. Entries with `|m| ≤ tau` become exact zeros.
pub fn soft_threshold(m: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    let mut out = m.as_nalgebra().clone();
    soft_threshold_in_place(&mut out, tau);
    Ok(DenseMatrix::from_na_unchecked(out))
}

pub(crate) fn soft_threshold_in_place(m: &mut DMatrix<f64>, tau: f64) {
    for v in m.iter_mut() {
        *v = soft_threshold_value(*v, tau);
    }
}

/// Singular value thresholding, the proximal map of `tau·‖·‖_*`.
pub fn svt(m: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    let (left, sigma, right) = thin_svd_na(m.as_nalgebra())?;
    let shrunk: Vec<f64> = sigma.iter().map(|s| (s - tau).max(0.0)).collect();
    Ok(DenseMatrix::from_na_unchecked(recompose(&left, &shrunk, &right)))
}

/// Shrinks one singular value under the log-determinant penalty: the
/// minimiser over `x ≥ 0` of `½(x − sigma)² + tau·ln(1 + x)`.
///
/// The candidate is the larger stationary point
/// `(sigma − 1)/2 + sqrt((1 + sigma)²/4 − tau)`, which exists only when
/// `(1 + sigma)² > 4·tau`; it is clamped at zero and kept only if it does not
/// score worse than `x = 0` (ties keep the candidate).
pub fn ld_shrink_value(sigma: f64, tau: f64) -> f64 {
    if tau == 0.0 {
        return sigma;
    }
    let one_plus = 1.0 + sigma;
    if one_plus * one_plus <= 4.0 * tau {
        return 0.0;
    }
    let xi = ((sigma - 1.0) / 2.0 + (one_plus * one_plus / 4.0 - tau).sqrt()).max(0.0);
    let objective = |x: f64| 0.5 * (x - sigma) * (x - sigma) + tau * x.ln_1p();
    if objective(xi) <= objective(0.0) {
        xi
    } else {
        0.0
    }
}

/// The log-determinant shrinkage `D_tau(D) = P(D)·diag(σ*)·Q(D)ᵀ` with σ*
/// from [`ld_shrink_value`]. `tau = 0` returns `D` unchanged.
pub fn ld_shrink(d: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    let mut out = d.as_nalgebra().clone();
    ld_shrink_in_place(&mut out, tau)?;
    Ok(DenseMatrix::from_na_unchecked(out))
}

/// Returns whether an SVD was computed (it is skipped for `tau = 0`).
pub(crate) fn ld_shrink_in_place(d: &mut DMatrix<f64>, tau: f64) -> Result<bool> {
    if tau == 0.0 {
        return Ok(false);
    }
    let (left, sigma, right) = thin_svd_na(d)?;
    let shrunk: Vec<f64> = sigma.iter().map(|&s| ld_shrink_value(s, tau)).collect();
    *d = recompose(&left, &shrunk, &right);
    Ok(true)
}

/// `log det(I + (CᵀC)^½) = Σ ln(1 + σ_i(C))`.
pub fn log_det_surrogate(c: &DenseMatrix) -> Result<f64> {
    let (_, sigma, _) = thin_svd_na(c.as_nalgebra())?;
    Ok(sigma.iter().map(|s| s.ln_1p()).sum())
}
