//! Robust PCA solvers.
//!
//! * [`solve_fffp`] fits `X = U·C·Vᵀ + S` with a fixed factor width `k` and an
//!   ℓ1 penalty on `S`.
//! * [`solve_uffp`] adds `λ·Σ ln(1 + σ_i(C))` so that `k` only needs to be an
//!   upper bound on the rank.
//! * [`solve_ialm`] is the convex nuclear-norm baseline.
//!
//! All three run an augmented Lagrangian loop with multiplier `Θ` and a
//! penalty `ρ` that grows by `κ` each iteration, and stop once
//! `‖X − L − S‖_F / ‖X‖_F ≤ tol`.

mod ffp;
mod ialm;
mod init;
mod sweep;

pub use ffp::{solve_fffp, solve_uffp};
pub use ialm::solve_ialm;
pub use init::init_factors;
pub use sweep::{
    default_lambda_grid, sweep_lambda, LambdaSweep, SweepEntry, COLLAPSE_SPARSITY, GRID_STEPS_PER_DECADE,
    REFERENCE_LAMBDA_GRID,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthonormality_error, DenseMatrix};

/// Relative cutoff used when reporting the rank of a recovered low-rank part.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

/// Low-rank part held as `U·C·Vᵀ` with orthonormal `U` (d×k) and `V` (n×k).
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredLowRank {
    pub u: DenseMatrix,
    pub c: DenseMatrix,
    pub v: DenseMatrix,
}

impl FactoredLowRank {
    pub fn k(&self) -> usize {
        self.c.rows()
    }

    /// Materializes `L = U·C·Vᵀ`.
    pub fn to_dense(&self) -> DenseMatrix {
        let (u, c, v) = (self.u.as_nalgebra(), self.c.as_nalgebra(), self.v.as_nalgebra());
        DenseMatrix::from_na_unchecked((u * c) * v.transpose())
    }

    /// Rank of `L`, read off the core matrix since `U` and `V` are orthonormal.
    pub fn rank(&self, rel_tol: f64) -> usize {
        crate::analysis::numerical_rank(&self.c, rel_tol)
    }

    /// `(‖UᵀU − I‖_F, ‖VᵀV − I‖_F)`.
    pub fn orthonormality(&self) -> (f64, f64) {
        (orthonormality_error(self.u.as_nalgebra()), orthonormality_error(self.v.as_nalgebra()))
    }
}

/// How the factors `U`, `V` (and `C`) are seeded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// Top-k singular triplets of `X`.
    #[default]
    TruncatedSvd,
    /// Orthonormalized seeded Gaussian `U`, `V` with `C = UᵀXV`.
    RandomOrthonormal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fffp,
    Uffp,
    Ialm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Fffp => "F-FFP",
            Method::Uffp => "U-FFP",
            Method::Ialm => "IALM",
        })
    }
}

/// Solver tunables. The defaults are `ρ0 = 1e-4`, `κ = 1.5`, `tol = 1e-3`
/// and 200 iterations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Factor width; an upper bound on the recovered rank. Unused by IALM.
    pub k: usize,
    /// Low-rank weight. Required for U-FFP; IALM falls back to
    /// `1/sqrt(max(d, n))` on the sparse term; F-FFP ignores it.
    pub lambda: Option<f64>,
    pub rho0: f64,
    pub kappa: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub rho_cap: f64,
    pub init: Init,
    pub seed: u64,
    /// Run exactly `max_iter` iterations regardless of `tol`.
    #[serde(default)]
    pub run_to_max_iter: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            k: 1,
            lambda: None,
            rho0: 1e-4,
            kappa: 1.5,
            tol: 1e-3,
            max_iter: 200,
            rho_cap: 1e10,
            init: Init::TruncatedSvd,
            seed: 0,
            run_to_max_iter: false,
        }
    }
}

impl SolverConfig {
    pub fn with_k(k: usize) -> Self {
        Self { k, ..Self::default() }
    }

    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    /// Checks everything that does not depend on the data shape.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.k == 0 {
            return bad("k must be positive".into());
        }
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return bad(format!("rho0 must be positive, got {}", self.rho0));
        }
        if !(self.kappa > 1.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must exceed 1, got {}", self.kappa));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if !(self.rho_cap >= self.rho0 && self.rho_cap.is_finite()) {
            return bad(format!("rho_cap must be finite and at least rho0, got {}", self.rho_cap));
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return bad(format!("lambda must be finite and non-negative, got {l}"));
            }
        }
        Ok(())
    }

    fn validate_factorization(&self, rows: usize, cols: usize) -> Result<()> {
        self.validate()?;
        if self.k > rows.min(cols) {
            return Err(Error::InvalidArgument(format!(
                "k = {} exceeds min(d, n) = {} for a {rows}x{cols} matrix",
                self.k,
                rows.min(cols)
            )));
        }
        Ok(())
    }
}

/// Statistics for one solver iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub residual: f64,
    /// Penalty in effect during the iteration.
    pub rho: f64,
    pub svd_calls: usize,
    /// `‖UᵀU − I‖_F` after the U-update (factorized solvers only).
    pub u_orthonormality: Option<f64>,
    pub v_orthonormality: Option<f64>,
}

/// Outcome of a solve: the quantities a results table would list plus the
/// per-iteration trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    pub iterations: usize,
    /// True when the stopping tolerance was met before the iteration cap.
    pub converged: bool,
    pub svd_count: usize,
    pub per_iter_residual: Vec<f64>,
    pub per_iter: Vec<IterationStats>,
    pub final_rank: usize,
    pub sparsity_ratio: f64,
    pub final_residual: f64,
    /// Seconds.
    pub wall_time: f64,
    /// `‖S‖_1` (F-FFP), `‖S‖_1 + λ‖C‖_ld` (U-FFP), `‖L‖_* + λ‖S‖_1` (IALM).
    pub final_objective: f64,
    /// The λ actually used (None for F-FFP).
    pub lambda: Option<f64>,
}

impl SolveReport {
    /// Largest per-iteration `(‖UᵀU − I‖_F, ‖VᵀV − I‖_F)`.
    pub fn max_orthonormality_error(&self) -> (f64, f64) {
        self.per_iter.iter().fold((0.0f64, 0.0f64), |(u, v), it| {
            (u.max(it.u_orthonormality.unwrap_or(0.0)), v.max(it.v_orthonormality.unwrap_or(0.0)))
        })
    }
}

/// `‖X − L − S‖_F / ‖X‖_F`.
pub fn relative_residual(x: &DenseMatrix, l: &DenseMatrix, s: &DenseMatrix) -> Result<f64> {
    if x.shape() != l.shape() || x.shape() != s.shape() {
        return Err(Error::InvalidArgument(format!(
            "shape mismatch: X {:?}, L {:?}, S {:?}",
            x.shape(),
            l.shape(),
            s.shape()
        )));
    }
    let xnorm = x.frobenius_norm();
    if xnorm == 0.0 {
        return Err(Error::ZeroData);
    }
    let r = x.as_nalgebra() - l.as_nalgebra() - s.as_nalgebra();
    Ok(r.norm() / xnorm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_cases() {
        let x = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let z = DenseMatrix::zeros(2, 2);
        let half = x.scale(0.5).unwrap();
        assert_eq!(relative_residual(&x, &half, &half).unwrap(), 0.0);
        assert_eq!(relative_residual(&x, &x, &z).unwrap(), 0.0);
        assert_eq!(relative_residual(&x, &z, &z).unwrap(), 1.0);
        assert!(matches!(relative_residual(&z, &z, &z), Err(Error::ZeroData)));
        assert!(relative_residual(&x, &DenseMatrix::zeros(1, 2), &z).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = [
            SolverConfig { k: 0, ..Default::default() },
            SolverConfig { kappa: 1.0, ..Default::default() },
            SolverConfig { tol: 1.0, ..Default::default() },
            SolverConfig { tol: 0.0, ..Default::default() },
            SolverConfig { rho0: -1.0, ..Default::default() },
            SolverConfig { max_iter: 0, ..Default::default() },
            SolverConfig { lambda: Some(-1.0), ..Default::default() },
            SolverConfig { rho_cap: 1e-6, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(SolverConfig::with_k(4).validate_factorization(3, 10).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = SolverConfig { init: Init::RandomOrthonormal, ..SolverConfig::with_k(3).lambda(2.0) };
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("random-orthonormal"));
        assert_eq!(serde_json::from_str::<SolverConfig>(&text).unwrap(), cfg);
    }
}
