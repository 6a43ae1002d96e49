//! Post-hoc metrics, column-norm anomaly scoring and the scaling benchmark.

mod bench;

pub use bench::{linear_fit, scaling_benchmark, Axis, BenchParams, BenchRow, LinearFit};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{thin_svd_na, DenseMatrix};
use crate::solvers::relative_residual;

/// Entries of `S` with `|s| > DEFAULT_ABS_TOL` count as nonzero: the solvers'
/// shrinkage steps produce exact zeros.
pub const DEFAULT_ABS_TOL: f64 = 0.0;

/// Count of singular values above `rel_tol · σ_1`; zero for the zero matrix.
pub fn numerical_rank(m: &DenseMatrix, rel_tol: f64) -> usize {
    let (_, sigma, _) = thin_svd_na(m.as_nalgebra()).expect("DenseMatrix entries are finite");
    match sigma.first() {
        Some(&top) if top > 0.0 => sigma.iter().filter(|&&s| s > rel_tol * top).count(),
        _ => 0,
    }
}

/// `‖S‖_0 / (dn)` counting entries with `|s| > abs_tol`.
pub fn sparsity_ratio(s: &DenseMatrix, abs_tol: f64) -> f64 {
    s.count_above(abs_tol) as f64 / (s.rows() * s.cols()) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rank_l: usize,
    pub sparsity_ratio: f64,
    pub residual: f64,
    /// `‖L − L*‖_F / ‖L*‖_F` when the ground truth is known.
    pub recovery_error: Option<f64>,
}

impl Metrics {
    pub fn compute(
        x: &DenseMatrix,
        l: &DenseMatrix,
        s: &DenseMatrix,
        l_star: Option<&DenseMatrix>,
        rank_tol: f64,
        abs_tol: f64,
    ) -> Result<Self> {
        let recovery_error = l_star.map(|t| recovery_error(l, t)).transpose()?;
        Ok(Self {
            rank_l: numerical_rank(l, rank_tol),
            sparsity_ratio: sparsity_ratio(s, abs_tol),
            residual: relative_residual(x, l, s)?,
            recovery_error,
        })
    }
}

/// `‖L − L*‖_F / ‖L*‖_F`.
pub fn recovery_error(l: &DenseMatrix, l_star: &DenseMatrix) -> Result<f64> {
    let diff = l.sub(l_star)?;
    let denom = l_star.frobenius_norm();
    if denom == 0.0 {
        return Ok(diff.frobenius_norm());
    }
    Ok(diff.frobenius_norm() / denom)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnomalyResult {
    /// ℓ2 norm of each column of `S`.
    pub scores: Vec<f64>,
    /// Ascending column indices.
    pub flagged: Vec<usize>,
}

impl AnomalyResult {
    /// Indices of the `m` highest non-zero scores, ascending (ties keep the
    /// lower index). A column whose sparse part is exactly zero is never
    /// reported.
    pub fn top(&self, m: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).filter(|&j| self.scores[j] > 0.0).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        order.truncate(m);
        order.sort_unstable();
        order
    }
}

/// Scores every column of `S` by its ℓ2 norm and flags those `≥ threshold`.
pub fn anomaly_detect(s: &DenseMatrix, threshold: f64) -> AnomalyResult {
    let scores: Vec<f64> = s.as_nalgebra().column_iter().map(|c| c.norm()).collect();
    let flagged = scores.iter().enumerate().filter(|(_, &v)| v >= threshold).map(|(j, _)| j).collect();
    AnomalyResult { scores, flagged }
}
