use std::time::Instant;

use nalgebra::DMatrix;

use super::{IterationStats, Method, SolveReport, SolverConfig, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{soft_threshold_value, thin_svd_na, DenseMatrix};

/// Convex RPCA, `min ‖L‖_* + λ‖S‖_1` s.t. `X = L + S`, by inexact ALM.
///
/// Each iteration takes a full thin SVD of the d×n matrix `X − S + Θ/ρ`.
/// `λ` defaults to `1/sqrt(max(d, n))`; `cfg.k` is ignored.
pub fn solve_ialm(x: &DenseMatrix, cfg: &SolverConfig) -> Result<(DenseMatrix, DenseMatrix, SolveReport)> {
    let start = Instant::now();
    cfg.validate()?;
    let xm = x.as_nalgebra();
    let (d, n) = xm.shape();
    let lambda = cfg.lambda.unwrap_or(1.0 / (d.max(n) as f64).sqrt());
    if lambda <= 0.0 {
        return Err(Error::InvalidArgument("IALM needs a positive lambda".into()));
    }

    let xnorm = xm.norm();
    let scale = if xnorm > 0.0 { xnorm } else { 1.0 };

    let mut low = DMatrix::<f64>::zeros(d, n);
    let mut s = DMatrix::<f64>::zeros(d, n);
    let mut theta = DMatrix::<f64>::zeros(d, n);
    let mut work = DMatrix::<f64>::zeros(d, n);
    let mut rho = cfg.rho0;
    let mut shrunk = Vec::new();
    let mut per_iter = Vec::new();
    let mut converged = false;

    for iteration in 1..=cfg.max_iter {
        let inv_rho = 1.0 / rho;

        for (((w, &xv), &sv), &tv) in work.iter_mut().zip(xm.iter()).zip(s.iter()).zip(theta.iter()) {
            *w = xv - sv + tv * inv_rho;
        }
        let (left, sigma, right) = thin_svd_na(&work)?;
        shrunk = sigma.iter().map(|v| (v - inv_rho).max(0.0)).collect();
        let kept = shrunk.iter().take_while(|&&v| v > 0.0).count();
        low = if kept == 0 {
            DMatrix::zeros(d, n)
        } else {
            let mut scaled = left.columns(0, kept).into_owned();
            for (j, v) in shrunk[..kept].iter().enumerate() {
                scaled.column_mut(j).scale_mut(*v);
            }
            scaled * right.columns(0, kept).transpose()
        };

        let sparse_tau = lambda * inv_rho;
        for (((sv, &xv), &lv), &tv) in s.iter_mut().zip(xm.iter()).zip(low.iter()).zip(theta.iter()) {
            *sv = soft_threshold_value(xv - lv + tv * inv_rho, sparse_tau);
        }

        let mut residual_sq = 0.0;
        for (((tv, &xv), &lv), &sv) in theta.iter_mut().zip(xm.iter()).zip(low.iter()).zip(s.iter()) {
            let r = xv - lv - sv;
            residual_sq += r * r;
            *tv += rho * r;
        }
        let residual = residual_sq.sqrt() / scale;
        if !residual.is_finite() {
            return Err(Error::Divergence { iteration, what: "residual is not finite".into() });
        }
        per_iter.push(IterationStats { residual, rho, svd_calls: 1, u_orthonormality: None, v_orthonormality: None });
        rho = (rho * cfg.kappa).min(cfg.rho_cap);

        if residual <= cfg.tol && !cfg.run_to_max_iter {
            converged = true;
            break;
        }
    }

    // Singular values of L are exactly the shrunk spectrum.
    let top = shrunk.first().copied().unwrap_or(0.0);
    let final_rank = if top > 0.0 { shrunk.iter().filter(|&&v| v > DEFAULT_RANK_TOL * top).count() } else { 0 };
    let nuclear: f64 = shrunk.iter().sum();
    let low = DenseMatrix::from_na_unchecked(low);
    let sparse = DenseMatrix::from_na_unchecked(s);
    let per_iter_residual: Vec<f64> = per_iter.iter().map(|it| it.residual).collect();
    let report = SolveReport {
        method: Method::Ialm,
        iterations: per_iter.len(),
        converged,
        svd_count: per_iter.len(),
        final_residual: *per_iter_residual.last().expect("at least one iteration"),
        per_iter_residual,
        per_iter,
        final_rank,
        sparsity_ratio: sparse.count_above(0.0) as f64 / (d * n) as f64,
        wall_time: start.elapsed().as_secs_f64(),
        final_objective: nuclear + lambda * sparse.l1_norm(),
        lambda: Some(lambda),
    };
    Ok((low, sparse, report))
}
