use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::init::init_factors_na;
use super::{FactoredLowRank, IterationStats, Method, SolveReport, SolverConfig, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ld_shrink_in_place, orthonormality_error, polar_na, soft_threshold_value, DenseMatrix};

/// Fixed-rank factorized RPCA: `min ‖S‖_1` s.t. `X = U·C·Vᵀ + S`,
/// `UᵀU = VᵀV = I`.
pub fn solve_fffp(x: &DenseMatrix, cfg: &SolverConfig) -> Result<(FactoredLowRank, DenseMatrix, SolveReport)> {
    run(x, cfg, None)
}

/// Unfixed-rank factorized RPCA: adds `λ·‖C‖_ld` and shrinks the core matrix
/// with the log-determinant operator at `λ/ρ` every iteration.
pub fn solve_uffp(x: &DenseMatrix, cfg: &SolverConfig) -> Result<(FactoredLowRank, DenseMatrix, SolveReport)> {
    let lambda = cfg.lambda.ok_or_else(|| Error::InvalidArgument("U-FFP needs an explicit lambda".into()))?;
    run(x, cfg, Some(lambda))
}

fn run(
    x: &DenseMatrix,
    cfg: &SolverConfig,
    lambda: Option<f64>,
) -> Result<(FactoredLowRank, DenseMatrix, SolveReport)> {
    let start = Instant::now();
    let xm = x.as_nalgebra();
    let (d, n) = xm.shape();
    cfg.validate_factorization(d, n)?;
    let method = if lambda.is_some() { Method::Uffp } else { Method::Fffp };

    let xnorm = xm.norm();
    let scale = if xnorm > 0.0 { xnorm } else { 1.0 };

    let (mut u, mut c, mut v) = init_factors_na(xm, cfg.k, cfg.init, cfg.seed)?;
    let mut s = DMatrix::<f64>::zeros(d, n);
    let mut theta = DMatrix::<f64>::zeros(d, n);
    // X − S + Θ/ρ, the target every factor update fits.
    let mut target = DMatrix::<f64>::zeros(d, n);
    // One column of L = U·C·Vᵀ at a time; L itself is never stored.
    let mut low_col = vec![0.0; d];
    let mut rho = cfg.rho0;

    let mut check_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_c4ec);
    let mut per_iter = Vec::new();
    let mut svd_count = 0;
    let mut converged = false;

    for iteration in 1..=cfg.max_iter {
        let inv_rho = 1.0 / rho;
        let mut svd_calls = 0;

        // S-update (entrywise prox of ‖·‖_1 at 1/ρ) fused with forming the target.
        let uc = &u * &c;
        for j in 0..n {
            low_column(&uc, &v, j, &mut low_col);
            let range = j * d..(j + 1) * d;
            let cols = s.as_mut_slice()[range.clone()]
                .iter_mut()
                .zip(&mut target.as_mut_slice()[range.clone()])
                .zip(&xm.as_slice()[range.clone()])
                .zip(&theta.as_slice()[range]);
            for ((((sv, mv), &xv), &tv), &lv) in cols.zip(&low_col) {
                let shifted = tv * inv_rho;
                *sv = soft_threshold_value(xv - lv + shifted, inv_rho);
                *mv = xv - *sv + shifted;
            }
        }
        if cfg!(debug_assertions) {
            check_s_minimality(xm, &uc, &v, &theta, &s, rho, &mut check_rng);
        }

        // V-update: orthogonal Procrustes against Mᵀ·U·C.
        let a = target.tr_mul(&uc);
        let v_next = polar_na(&a)?;
        svd_calls += 1;
        debug_assert!(
            trace_tr_mul(&v_next, &a) >= trace_tr_mul(&v, &a) - 1e-9 * (1.0 + trace_tr_mul(&v, &a).abs()),
            "V-update decreased the Procrustes objective"
        );
        v = v_next;

        // U-update against M·V·Cᵀ.
        let b = &target * (&v * c.transpose());
        let u_next = polar_na(&b)?;
        svd_calls += 1;
        debug_assert!(
            trace_tr_mul(&u_next, &b) >= trace_tr_mul(&u, &b) - 1e-9 * (1.0 + trace_tr_mul(&u, &b).abs()),
            "U-update decreased the Procrustes objective"
        );
        u = u_next;

        c = u.tr_mul(&target) * &v;
        if let Some(lambda) = lambda {
            if ld_shrink_in_place(&mut c, lambda / rho)? {
                svd_calls += 1;
            }
        }

        let u_orth = orthonormality_error(&u);
        let v_orth = orthonormality_error(&v);
        debug_assert!(u_orth <= 1e-8 && v_orth <= 1e-8, "factor orthonormality lost: {u_orth:e} {v_orth:e}");

        // Multiplier step. With M = X − S + Θ/ρ, Θ + ρ(X − L − S) = ρ(M − L).
        let uc = &u * &c;
        let mut residual_sq = 0.0;
        for j in 0..n {
            low_column(&uc, &v, j, &mut low_col);
            let range = j * d..(j + 1) * d;
            let cols = theta.as_mut_slice()[range.clone()].iter_mut().zip(&target.as_slice()[range]);
            for ((tv, &mv), &lv) in cols.zip(&low_col) {
                let r = mv - lv - *tv * inv_rho;
                residual_sq += r * r;
                *tv = rho * (mv - lv);
            }
        }
        let residual = residual_sq.sqrt() / scale;
        if !residual.is_finite() {
            return Err(Error::Divergence { iteration, what: "residual is not finite".into() });
        }

        svd_count += svd_calls;
        per_iter.push(IterationStats {
            residual,
            rho,
            svd_calls,
            u_orthonormality: Some(u_orth),
            v_orthonormality: Some(v_orth),
        });
        rho = (rho * cfg.kappa).min(cfg.rho_cap);

        if residual <= cfg.tol && !cfg.run_to_max_iter {
            converged = true;
            break;
        }
    }

    let factors = FactoredLowRank {
        u: DenseMatrix::from_na_unchecked(u),
        c: DenseMatrix::from_na_unchecked(c),
        v: DenseMatrix::from_na_unchecked(v),
    };
    let sparse = DenseMatrix::from_na_unchecked(s);
    let l1 = sparse.l1_norm();
    let final_objective = match lambda {
        Some(lambda) => l1 + lambda * crate::linalg::log_det_surrogate(&factors.c)?,
        None => l1,
    };
    let per_iter_residual: Vec<f64> = per_iter.iter().map(|it| it.residual).collect();
    let report = SolveReport {
        method,
        iterations: per_iter.len(),
        converged,
        svd_count,
        final_residual: *per_iter_residual.last().expect("at least one iteration"),
        per_iter_residual,
        per_iter,
        final_rank: factors.rank(DEFAULT_RANK_TOL),
        sparsity_ratio: sparse.count_above(0.0) as f64 / (d * n) as f64,
        wall_time: start.elapsed().as_secs_f64(),
        final_objective,
        lambda,
    };
    Ok((factors, sparse, report))
}

fn trace_tr_mul(w: &DMatrix<f64>, a: &DMatrix<f64>) -> f64 {
    w.iter().zip(a.iter()).map(|(p, q)| p * q).sum()
}

/// Column `j` of `uc·vᵀ` into `out`.
fn low_column(uc: &DMatrix<f64>, v: &DMatrix<f64>, j: usize, out: &mut [f64]) {
    out.fill(0.0);
    for t in 0..uc.ncols() {
        let w = v[(j, t)];
        for (o, &x) in out.iter_mut().zip(uc.column(t).iter()) {
            *o += w * x;
        }
    }
}

/// Perturbs a few entries of the fresh S by ±1e-3 and checks that the
/// S-part of the augmented Lagrangian, `|s| + ρ/2·(a − s)²` with
/// `a = X − L + Θ/ρ`, never decreases.
fn check_s_minimality(
    x: &DMatrix<f64>,
    uc: &DMatrix<f64>,
    v: &DMatrix<f64>,
    theta: &DMatrix<f64>,
    s: &DMatrix<f64>,
    rho: f64,
    rng: &mut ChaCha8Rng,
) {
    let len = s.len();
    for _ in 0..10 {
        let idx = rng.random_range(0..len);
        let (i, j) = (idx % x.nrows(), idx / x.nrows());
        let low = uc.row(i).dot(&v.row(j));
        let a = x[idx] - low + theta[idx] / rho;
        let value = |sv: f64| sv.abs() + 0.5 * rho * (a - sv) * (a - sv);
        let base = value(s[idx]);
        for delta in [1e-3, -1e-3] {
            let moved = value(s[idx] + delta);
            assert!(
                moved >= base - 1e-9 * (1.0 + base.abs()),
                "S-update is not a minimiser at entry {idx}: {moved} < {base}"
            );
        }
    }
}
