use serde::{Deserialize, Serialize};

use super::{solve_uffp, FactoredLowRank, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// λ values for 8-bit video frames as quoted in the literature. On data of
/// unit scale every one of them shrinks the core to zero, so they are kept
/// for reference only.
pub const REFERENCE_LAMBDA_GRID: [f64; 4] = [1e6, 1e7, 1e8, 1e9];

/// Steps per decade of [`default_lambda_grid`].
pub const GRID_STEPS_PER_DECADE: u32 = 8;

/// Log-spaced λ from `0.1·rms` to `1000·rms`, where `rms = ‖X‖_F/√(dn)`.
pub fn default_lambda_grid(x: &DenseMatrix) -> Vec<f64> {
    let rms = x.frobenius_norm() / ((x.rows() * x.cols()) as f64).sqrt();
    let steps = GRID_STEPS_PER_DECADE as i32;
    (-steps..=3 * steps).map(|e| rms * 10f64.powf(f64::from(e) / f64::from(steps))).collect()
}

/// Runs whose sparse part has more nonzeros than this fraction are treated as
/// collapsed (the low-rank part was shrunk away and S absorbed X).
pub const COLLAPSE_SPARSITY: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub final_rank: usize,
    pub sparsity_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaSweep {
    pub entries: Vec<SweepEntry>,
    /// Index into `entries` of the run that was kept.
    pub selected: usize,
}

/// Runs U-FFP once per λ in `grid` and keeps the largest λ whose run is
/// usable: residual within tolerance, `0 < rank < k`, and S not collapsed
/// (see [`COLLAPSE_SPARSITY`]). When no run qualifies, the rank and
/// saturation conditions are dropped in turn; as a last resort the run with
/// the smallest residual is kept.
///
/// `jobs > 1` solves independent λ values on separate threads. Only the
/// reports are held during the sweep; the selected λ is solved again to
/// return its factors.
pub fn sweep_lambda(
    x: &DenseMatrix,
    cfg: &SolverConfig,
    grid: &[f64],
    jobs: usize,
) -> Result<(FactoredLowRank, DenseMatrix, SolveReport, LambdaSweep)> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("lambda grid is empty".into()));
    }
    let run_one = |lambda: f64| solve_uffp(x, &cfg.clone().lambda(lambda)).map(|(_, _, r)| r);
    let jobs = jobs.clamp(1, grid.len());
    let results: Vec<Result<SolveReport>> = if jobs == 1 {
        grid.iter().map(|&l| run_one(l)).collect()
    } else {
        let chunk = grid.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = grid
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|&l| run_one(l)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
        })
    };
    let reports = results.into_iter().collect::<Result<Vec<_>>>()?;

    let entries: Vec<SweepEntry> = grid
        .iter()
        .zip(&reports)
        .map(|(&lambda, r)| SweepEntry {
            lambda,
            iterations: r.iterations,
            converged: r.converged,
            final_residual: r.final_residual,
            final_rank: r.final_rank,
            sparsity_ratio: r.sparsity_ratio,
        })
        .collect();

    let selected = select(&entries, cfg.tol, cfg.k);
    log::info!("lambda sweep kept lambda={:e} (rank {})", entries[selected].lambda, entries[selected].final_rank);
    let (factors, sparse, report) = solve_uffp(x, &cfg.clone().lambda(entries[selected].lambda))?;
    Ok((factors, sparse, report, LambdaSweep { entries, selected }))
}

fn select(entries: &[SweepEntry], tol: f64, k: usize) -> usize {
    let feasible = |e: &SweepEntry| e.final_residual <= tol;
    let sparse = |e: &SweepEntry| e.sparsity_ratio <= COLLAPSE_SPARSITY && e.final_rank > 0;
    let unsaturated = |e: &SweepEntry| e.final_rank < k;
    let largest = |keep: &dyn Fn(&SweepEntry) -> bool| {
        entries
            .iter()
            .enumerate()
            .filter(|(_, e)| keep(e))
            .max_by(|a, b| a.1.lambda.total_cmp(&b.1.lambda))
            .map(|(i, _)| i)
    };
    largest(&|e| feasible(e) && sparse(e) && unsaturated(e))
        .or_else(|| largest(&|e| feasible(e) && sparse(e)))
        .or_else(|| largest(&feasible))
        .unwrap_or_else(|| {
            entries
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.final_residual.total_cmp(&b.1.final_residual))
                .map(|(i, _)| i)
                .expect("grid is non-empty")
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_scales_with_rms() {
        let x = DenseMatrix::from_row_major(2, 2, vec![2.0, -2.0, 2.0, 2.0]).unwrap();
        let grid = default_lambda_grid(&x);
        assert_eq!(grid.len(), 33);
        assert!((grid[0] - 0.2).abs() < 1e-12);
        assert!((grid[8] - 2.0).abs() < 1e-12);
        assert!((grid[32] - 2000.0).abs() < 1e-9);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn empty_grid_is_rejected() {
        let x = DenseMatrix::identity(3);
        assert!(sweep_lambda(&x, &SolverConfig::with_k(1), &[], 1).is_err());
    }

    #[test]
    fn parallel_sweep_matches_sequential() {
        let x = DenseMatrix::from_fn(20, 16, |i, j| ((i * 3 + j) % 5) as f64 + if i == j { 9.0 } else { 0.0 }).unwrap();
        let cfg = SolverConfig::with_k(4);
        let grid = [0.01, 0.1, 1.0];
        let (_, s1, r1, w1) = sweep_lambda(&x, &cfg, &grid, 1).unwrap();
        let (_, s2, r2, w2) = sweep_lambda(&x, &cfg, &grid, 3).unwrap();
        assert_eq!(w1, w2);
        assert_eq!(s1, s2);
        assert_eq!(r1.per_iter_residual, r2.per_iter_residual);
        assert_eq!(w1.entries.len(), 3);
        assert_eq!(r1.lambda, Some(w1.entries[w1.selected].lambda));
    }

    fn entry(lambda: f64, rank: usize, residual: f64, sparsity: f64) -> SweepEntry {
        SweepEntry {
            lambda,
            iterations: 10,
            converged: residual <= 1e-3,
            final_residual: residual,
            final_rank: rank,
            sparsity_ratio: sparsity,
        }
    }

    #[test]
    fn selection_skips_collapsed_and_saturated_runs() {
        let entries = [
            entry(1.0, 25, 5e-4, 0.05),
            entry(10.0, 5, 5e-4, 0.05),
            entry(30.0, 2, 5e-4, 0.98),
            entry(100.0, 0, 5e-4, 0.98),
            entry(300.0, 4, 2e-2, 0.05),
        ];
        assert_eq!(select(&entries, 1e-3, 25), 1);
        // only saturated runs are usable
        assert_eq!(select(&entries[..1], 1e-3, 25), 0);
        // only collapsed runs meet the tolerance: the largest λ wins
        assert_eq!(select(&entries[2..], 1e-3, 25), 1);
        // nothing meets the tolerance
        let bad = [entry(1.0, 3, 5e-2, 0.1), entry(2.0, 3, 2e-2, 0.1)];
        assert_eq!(select(&bad, 1e-3, 25), 1);
    }
}
