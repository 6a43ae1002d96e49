use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{FactoredLowRank, Init};
use crate::error::{Error, Result};
use crate::linalg::{thin_svd_na, DenseMatrix};

/// Seeds `(U, C, V)` for the factorized solvers.
pub fn init_factors(x: &DenseMatrix, k: usize, strategy: Init, seed: u64) -> Result<FactoredLowRank> {
    let (u, c, v) = init_factors_na(x.as_nalgebra(), k, strategy, seed)?;
    Ok(FactoredLowRank {
        u: DenseMatrix::from_na_unchecked(u),
        c: DenseMatrix::from_na_unchecked(c),
        v: DenseMatrix::from_na_unchecked(v),
    })
}

pub(crate) fn init_factors_na(
    x: &DMatrix<f64>,
    k: usize,
    strategy: Init,
    seed: u64,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let (d, n) = x.shape();
    if k == 0 || k > d.min(n) {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={}", d.min(n))));
    }
    match strategy {
        Init::TruncatedSvd => {
            let (left, sigma, right) = thin_svd_na(x)?;
            let u = left.columns(0, k).into_owned();
            let v = right.columns(0, k).into_owned();
            let c = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&sigma[..k]));
            Ok((u, c, v))
        }
        Init::RandomOrthonormal => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut gaussian = |rows: usize| DMatrix::from_fn(rows, k, |_, _| StandardNormal.sample(&mut rng));
            let u = gaussian(d).qr().q();
            let v = gaussian(n).qr().q();
            let c = u.tr_mul(x) * &v;
            Ok((u, c, v))
        }
    }
}
