use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::datagen::make_problem;
use crate::error::{Error, Result};
use crate::solvers::{solve_fffp, solve_ialm, solve_uffp, Init, Method, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Scale the number of columns `n`.
    Samples,
    /// Scale the number of rows `d`.
    Dimension,
}

/// Base problem and solver for [`scaling_benchmark`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchParams {
    pub d: usize,
    pub n: usize,
    pub rank: usize,
    pub fraction: f64,
    pub magnitude: f64,
    pub seed: u64,
    pub method: Method,
    pub config: SolverConfig,
    /// Timed runs per size; the median is reported.
    pub repeats: usize,
}

impl Default for BenchParams {
    fn default() -> Self {
        Self {
            d: 1000,
            n: 1000,
            rank: 5,
            fraction: 0.05,
            magnitude: 10.0,
            seed: 0,
            method: Method::Fffp,
            // Random init keeps the whole timed section O(dnk).
            config: SolverConfig { init: Init::RandomOrthonormal, ..SolverConfig::with_k(5) },
            repeats: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub factor: f64,
    pub rows: usize,
    pub cols: usize,
    /// The scaled dimension (`n` or `d`).
    pub size: usize,
    pub seconds: f64,
}

/// Times the solver for exactly `iters` iterations on a synthetic problem
/// whose `n` (or `d`) is scaled by each factor in turn, and reports the
/// median of `repeats` timings per size. Problem generation is outside the
/// timed section.
///
/// Repeats are taken round-robin over the sizes (all sizes once, then all
/// again) so that slow drifts in machine speed spread over every size rather
/// than inflating whichever sizes happened to run during them.
pub fn scaling_benchmark(params: &BenchParams, axis: Axis, factors: &[f64], iters: usize) -> Result<Vec<BenchRow>> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("no scale factors given".into()));
    }
    if factors.iter().any(|f| !(*f > 0.0 && f.is_finite())) || factors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("scale factors must be positive and strictly ascending".into()));
    }
    if iters == 0 || params.repeats == 0 {
        return Err(Error::InvalidArgument("iteration and repeat counts must be positive".into()));
    }
    let base = SolverConfig { max_iter: iters, run_to_max_iter: true, ..params.config.clone() };

    let mut cases = Vec::with_capacity(factors.len());
    for &factor in factors {
        let scaled = |b: usize| ((b as f64 * factor).round() as usize).max(1);
        let (d, n) = match axis {
            Axis::Samples => (params.d, scaled(params.n)),
            Axis::Dimension => (scaled(params.d), params.n),
        };
        let rank = params.rank.min(d.min(n));
        let x = make_problem(d, n, rank, params.fraction, params.magnitude, params.seed)?.x;
        let cfg = SolverConfig { k: base.k.min(d.min(n)), ..base.clone() };
        cases.push((factor, d, n, x, cfg));
    }

    let mut times = vec![Vec::with_capacity(params.repeats); cases.len()];
    for _ in 0..params.repeats {
        for ((_, _, _, x, cfg), t) in cases.iter().zip(times.iter_mut()) {
            let start = Instant::now();
            match params.method {
                Method::Fffp => drop(solve_fffp(x, cfg)?),
                Method::Uffp => drop(solve_uffp(x, cfg)?),
                Method::Ialm => drop(solve_ialm(x, cfg)?),
            }
            t.push(start.elapsed().as_secs_f64());
        }
    }

    let rows = cases
        .iter()
        .zip(times.iter_mut())
        .map(|((factor, d, n, _, _), t)| {
            t.sort_by(f64::total_cmp);
            let size = match axis {
                Axis::Samples => *n,
                Axis::Dimension => *d,
            };
            BenchRow { factor: *factor, rows: *d, cols: *n, size, seconds: t[t.len() / 2] }
        })
        .collect();
    Ok(rows)
}

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("linear fit needs at least two paired points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("linear fit needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchParams {
        BenchParams {
            d: 40,
            n: 40,
            rank: 2,
            repeats: 1,
            config: SolverConfig { init: Init::RandomOrthonormal, ..SolverConfig::with_k(2) },
            ..Default::default()
        }
    }

    #[test]
    fn single_factor_gives_one_row() {
        let rows = scaling_benchmark(&small(), Axis::Samples, &[1.0], 3).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].rows, rows[0].cols, rows[0].size), (40, 40, 40));
    }

    #[test]
    fn axes_scale_the_right_dimension() {
        let rows = scaling_benchmark(&small(), Axis::Dimension, &[0.5, 1.0], 2).unwrap();
        assert_eq!((rows[0].rows, rows[0].cols), (20, 40));
        let rows = scaling_benchmark(&small(), Axis::Samples, &[0.5, 1.0], 2).unwrap();
        assert_eq!((rows[0].rows, rows[0].cols), (40, 20));
    }

    #[test]
    fn bad_factor_lists_are_rejected() {
        assert!(scaling_benchmark(&small(), Axis::Samples, &[], 2).is_err());
        assert!(scaling_benchmark(&small(), Axis::Samples, &[1.0, 0.5], 2).is_err());
        assert!(scaling_benchmark(&small(), Axis::Samples, &[0.0, 0.5], 2).is_err());
    }

    #[test]
    fn fit_recovers_a_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
    }
}
