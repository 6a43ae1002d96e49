//! Seeded synthetic low-rank-plus-sparse problems with ground truth.
//!
//! Every generator is a pure function of its arguments; the same seed always
//! produces the same matrices.

use nalgebra::DMatrix;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// `X = L* + S*` with the generating parts kept for scoring.
#[derive(Clone, Debug)]
pub struct SyntheticProblem {
    pub x: DenseMatrix,
    pub l_star: DenseMatrix,
    pub s_star: DenseMatrix,
    pub true_rank: usize,
    pub corruption_fraction: f64,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `scale · A·Bᵀ` with i.i.d. standard Gaussian `A` (d×r) and `B` (n×r).
/// `r = 0` yields the zero matrix.
pub fn gen_low_rank(d: usize, n: usize, r: usize, scale: f64, seed: u64) -> Result<DenseMatrix> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("dimensions must be positive, got {d}x{n}")));
    }
    if r > d.min(n) {
        return Err(Error::InvalidArgument(format!("rank {r} exceeds min(d, n) = {}", d.min(n))));
    }
    if r == 0 {
        return Ok(DenseMatrix::zeros(d, n));
    }
    let mut rng = rng_for(seed, 0);
    let a = DMatrix::<f64>::from_fn(d, r, |_, _| StandardNormal.sample(&mut rng));
    let b = DMatrix::<f64>::from_fn(n, r, |_, _| StandardNormal.sample(&mut rng));
    DenseMatrix::from_nalgebra((a * b.transpose()) * scale)
}

/// Exactly `round(fraction·d·n)` non-zeros at uniformly random positions,
/// values uniform on `[−magnitude, magnitude]`.
pub fn gen_sparse(d: usize, n: usize, fraction: f64, magnitude: f64, seed: u64) -> Result<DenseMatrix> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("dimensions must be positive, got {d}x{n}")));
    }
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!("corruption fraction must lie in [0, 1), got {fraction}")));
    }
    let count = (fraction * (d * n) as f64).round() as usize;
    if count > 0 && !(magnitude > 0.0 && magnitude.is_finite()) {
        return Err(Error::InvalidArgument(format!("magnitude must be positive, got {magnitude}")));
    }
    let mut rng = rng_for(seed, 1);
    let mut m = DMatrix::<f64>::zeros(d, n);
    let positions = index::sample(&mut rng, d * n, count);
    for pos in positions.iter() {
        let value = loop {
            let v = rng.random_range(-magnitude..=magnitude);
            if v != 0.0 {
                break v;
            }
        };
        m[pos] = value;
    }
    DenseMatrix::from_nalgebra(m)
}

/// A `d×n` rank-`r` problem with unit-RMS `L*` entries and a fraction of
/// entries corrupted by values uniform on `[−magnitude, magnitude]`.
///
/// `S*` is stored as `X − L*`, so `X − L* − S*` is exactly zero in floating
/// point.
pub fn make_problem(
    d: usize,
    n: usize,
    r: usize,
    fraction: f64,
    magnitude: f64,
    seed: u64,
) -> Result<SyntheticProblem> {
    let scale = if r > 0 { 1.0 / (r as f64).sqrt() } else { 1.0 };
    let l_star = gen_low_rank(d, n, r, scale, seed)?;
    let raw = gen_sparse(d, n, fraction, magnitude, seed)?;
    let x = l_star.add(&raw)?;
    let s_star = x.sub(&l_star)?;
    Ok(SyntheticProblem { x, l_star, s_star, true_rank: r, corruption_fraction: fraction })
}

/// Columns of a rank-one "dominant class" with a few unrelated columns mixed
/// in, the layout of a digit-outlier experiment.
#[derive(Clone, Debug)]
pub struct OutlierProblem {
    pub x: DenseMatrix,
    /// Sorted column indices of the planted outliers.
    pub outliers: Vec<usize>,
}

/// `inliers` columns `w_j·u` sharing one non-negative profile `u` and
/// `outliers` columns drawn independently, all with entries in `[0, 1]`
/// scale, in a seeded random column order.
pub fn make_outlier_problem(d: usize, inliers: usize, outliers: usize, seed: u64) -> Result<OutlierProblem> {
    let n = inliers + outliers;
    if d == 0 || n == 0 || inliers == 0 {
        return Err(Error::InvalidArgument("need a positive dimension and at least one inlier column".into()));
    }
    let mut rng = rng_for(seed, 2);
    let profile: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut columns: Vec<(bool, Vec<f64>)> = Vec::with_capacity(n);
    for _ in 0..inliers {
        let w = rng.random_range(0.5..1.5);
        columns.push((false, profile.iter().map(|p| w * p).collect()));
    }
    for _ in 0..outliers {
        columns.push((true, (0..d).map(|_| rng.random_range(0.0..1.0)).collect()));
    }
    columns.shuffle(&mut rng);
    let outlier_idx = columns.iter().enumerate().filter(|(_, (o, _))| *o).map(|(j, _)| j).collect();
    let cols: Vec<Vec<f64>> = columns.into_iter().map(|(_, c)| c).collect();
    Ok(OutlierProblem { x: DenseMatrix::from_columns(&cols)?, outliers: outlier_idx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::numerical_rank;

    #[test]
    fn low_rank_cases() {
        assert_eq!(gen_low_rank(4, 5, 0, 1.0, 1).unwrap().count_above(0.0), 0);
        let l = gen_low_rank(50, 50, 3, 1.0, 9).unwrap();
        assert_eq!(numerical_rank(&l, 1e-6), 3);
        assert_eq!(l, gen_low_rank(50, 50, 3, 1.0, 9).unwrap());
        assert_ne!(l, gen_low_rank(50, 50, 3, 1.0, 10).unwrap());
        assert!(gen_low_rank(5, 4, 5, 1.0, 0).is_err());
    }

    #[test]
    fn sparse_cases() {
        assert_eq!(gen_sparse(10, 10, 0.0, 1.0, 0).unwrap().count_above(0.0), 0);
        let s = gen_sparse(100, 100, 0.05, 2.0, 3).unwrap();
        assert_eq!(s.count_above(0.0), 500);
        assert!(s.as_nalgebra().iter().all(|v| v.abs() <= 2.0));
        assert_eq!(s, gen_sparse(100, 100, 0.05, 2.0, 3).unwrap());
        assert!(gen_sparse(3, 3, 1.0, 1.0, 0).is_err());
        assert!(gen_sparse(3, 3, -0.1, 1.0, 0).is_err());
    }

    #[test]
    fn sparse_values_are_uniform() {
        // Kolmogorov–Smirnov distance against U[-1, 1] over 1e5 samples.
        let s = gen_sparse(500, 400, 0.5, 1.0, 21).unwrap();
        let mut values: Vec<f64> = s.as_nalgebra().iter().copied().filter(|v| *v != 0.0).collect();
        assert_eq!(values.len(), 100_000);
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let ks = values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let cdf = (v + 1.0) / 2.0;
                (cdf - i as f64 / n).abs().max((cdf - (i + 1) as f64 / n).abs())
            })
            .fold(0.0f64, f64::max);
        // 1% critical value is 1.63/sqrt(n).
        assert!(ks < 1.63 / n.sqrt(), "KS statistic {ks}");
    }

    #[test]
    fn problem_invariants() {
        let p = make_problem(60, 40, 4, 0.05, 10.0, 5).unwrap();
        let diff = p.x.as_nalgebra() - p.l_star.as_nalgebra() - p.s_star.as_nalgebra();
        assert!(diff.iter().all(|v| *v == 0.0));
        assert_eq!(numerical_rank(&p.l_star, 1e-6), 4);
        let frac = p.s_star.count_above(0.0) as f64 / (60.0 * 40.0);
        assert!((frac - 0.05).abs() <= 0.005);
        let rms = p.l_star.frobenius_norm() / (2400f64).sqrt();
        assert!((0.7..1.4).contains(&rms), "rms {rms}");
    }

    #[test]
    fn clean_and_full_rank_problems() {
        let p = make_problem(50, 50, 2, 0.0, 1.0, 1).unwrap();
        assert_eq!(p.x, p.l_star);
        assert_eq!(p.s_star.count_above(0.0), 0);
        let full = make_problem(50, 50, 50, 0.05, 10.0, 1).unwrap();
        assert_eq!(full.true_rank, 50);
    }

    #[test]
    fn outlier_layout() {
        let p = make_outlier_problem(32, 19, 3, 4).unwrap();
        assert_eq!(p.x.shape(), (32, 22));
        assert_eq!(p.outliers.len(), 3);
        let inlier_cols: Vec<usize> = (0..22).filter(|j| !p.outliers.contains(j)).collect();
        let inliers =
            DenseMatrix::from_columns(&inlier_cols.iter().map(|&j| p.x.column(j)).collect::<Vec<_>>()).unwrap();
        assert_eq!(numerical_rank(&inliers, 1e-9), 1);
    }
}
