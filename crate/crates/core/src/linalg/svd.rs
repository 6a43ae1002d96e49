use nalgebra::DMatrix;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Economy-size SVD `A = left · diag(sigma) · rightᵀ` with `p = min(m, n)`
/// singular triplets, sorted by non-increasing `sigma`.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    /// m×p, orthonormal columns.
    pub left: DenseMatrix,
    pub sigma: Vec<f64>,
    /// n×p, orthonormal columns.
    pub right: DenseMatrix,
}

impl ThinSvd {
    /// `left · diag(sigma) · rightᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let (l, r) = (self.left.as_nalgebra(), self.right.as_nalgebra());
        DenseMatrix::from_na_unchecked(recompose(l, &self.sigma, r))
    }
}

/// Thin SVD with a deterministic sign convention: every left singular vector
/// is flipped so that its largest-magnitude entry (first one on ties) is
/// positive, and its right partner is flipped with it.
pub fn thin_svd(a: &DenseMatrix) -> Result<ThinSvd> {
    let (left, sigma, right) = thin_svd_na(a.as_nalgebra())?;
    Ok(ThinSvd { left: DenseMatrix::from_na_unchecked(left), sigma, right: DenseMatrix::from_na_unchecked(right) })
}

/// Orthonormal polar factor `P(A)·Q(A)ᵀ` of an m×p matrix with m ≥ p: the
/// maximiser of `trace(Wᵀ A)` over matrices with orthonormal columns.
pub fn polar_orthogonal(a: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() < a.cols() {
        return Err(Error::InvalidArgument(format!(
            "polar factor needs at least as many rows as columns, got {:?}",
            a.shape()
        )));
    }
    polar_na(a.as_nalgebra()).map(DenseMatrix::from_na_unchecked)
}

/// Returns `(left, sigma, right)` with `right` stored n×p (not transposed).
pub(crate) fn thin_svd_na(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("thin SVD of a matrix with non-finite entries".into()));
    }
    let (m, n) = a.shape();
    let p = m.min(n);
    // faer rather than nalgebra: nalgebra's implicit-shift SVD can return a
    // visibly wrong factorization for rank-deficient inputs.
    let fa = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)]);
    let svd = fa.thin_svd().map_err(|e| Error::InvalidInput(format!("SVD did not converge: {e:?}")))?;
    let u = DMatrix::from_fn(m, p, |i, j| svd.U()[(i, j)]);
    let v = DMatrix::from_fn(n, p, |i, j| svd.V()[(i, j)]);
    let raw: Vec<f64> = (0..p).map(|i| svd.S()[i]).collect();

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]));

    let mut left = DMatrix::zeros(m, p);
    let mut right = DMatrix::zeros(n, p);
    let mut sigma = Vec::with_capacity(p);
    for (dst, &src) in order.iter().enumerate() {
        let ucol = u.column(src);
        let mut pivot = 0;
        for (i, x) in ucol.iter().enumerate() {
            if x.abs() > ucol[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if ucol[pivot] < 0.0 { -1.0 } else { 1.0 };
        left.set_column(dst, &(ucol * sign));
        right.set_column(dst, &(v.column(src) * sign));
        sigma.push(raw[src].max(0.0));
    }
    Ok((left, sigma, right))
}

pub(crate) fn polar_na(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (left, _, right) = thin_svd_na(a)?;
    Ok(left * right.transpose())
}

pub(crate) fn recompose(left: &DMatrix<f64>, sigma: &[f64], right: &DMatrix<f64>) -> DMatrix<f64> {
    let mut scaled = left.clone();
    for (j, s) in sigma.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*s);
    }
    scaled * right.transpose()
}

/// `‖WᵀW − I‖_F`.
pub(crate) fn orthonormality_error(w: &DMatrix<f64>) -> f64 {
    let gram = w.tr_mul(w);
    (gram - DMatrix::identity(w.ncols(), w.ncols())).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
    }

    fn random_orthonormal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        gaussian(rows, cols, rng).qr().q()
    }

    #[test]
    fn rank_deficient_tall_matrix_is_reconstructed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = gaussian(400, 5, &mut rng) * gaussian(5, 25, &mut rng) * 1e3;
            let (l, s, r) = thin_svd_na(&a).unwrap();
            assert!((recompose(&l, &s, &r) - &a).norm() <= 1e-12 * a.norm());
            let total: f64 = s.iter().sum();
            let p = polar_na(&a).unwrap();
            assert!((p.dot(&a) - total).abs() <= 1e-10 * total);
        }
    }

    #[test]
    fn identity_decomposes_to_itself() {
        let svd = thin_svd(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(svd.sigma, vec![1.0, 1.0, 1.0]);
        assert!((svd.left.as_nalgebra() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-12);
        assert!((svd.right.as_nalgebra() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let svd = thin_svd(&DenseMatrix::diagonal(&[2.0, 3.0]).unwrap()).unwrap();
        assert!((svd.sigma[0] - 3.0).abs() < 1e-14);
        assert!((svd.sigma[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn random_tall_and_wide_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (m, n) in [(5, 3), (3, 5), (7, 7), (40, 4)] {
            let a = DenseMatrix::from_nalgebra(gaussian(m, n, &mut rng)).unwrap();
            let svd = thin_svd(&a).unwrap();
            let p = m.min(n);
            assert_eq!(svd.left.shape(), (m, p));
            assert_eq!(svd.right.shape(), (n, p));
            let err = (svd.reconstruct().as_nalgebra() - a.as_nalgebra()).norm();
            assert!(err <= 1e-12 * a.frobenius_norm(), "{m}x{n}: {err}");
            assert!(orthonormality_error(svd.left.as_nalgebra()) <= 1e-10);
            assert!(orthonormality_error(svd.right.as_nalgebra()) <= 1e-10);
            assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
            for j in 0..p {
                let col = svd.left.column(j);
                let big = col.iter().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { *x } else { acc });
                assert!(big > 0.0);
            }
        }
    }

    #[test]
    fn zero_matrix_still_has_orthonormal_factors() {
        let svd = thin_svd(&DenseMatrix::zeros(4, 2)).unwrap();
        assert_eq!(svd.sigma, vec![0.0, 0.0]);
        assert!(orthonormality_error(svd.left.as_nalgebra()) <= 1e-10);
        let w = polar_orthogonal(&DenseMatrix::zeros(4, 2)).unwrap();
        assert!(orthonormality_error(w.as_nalgebra()) <= 1e-10);
    }

    #[test]
    fn sign_convention_is_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DenseMatrix::from_nalgebra(gaussian(6, 4, &mut rng)).unwrap();
        let first = thin_svd(&a).unwrap();
        let flipped = thin_svd(&a.scale(1.0).unwrap()).unwrap();
        assert_eq!(first.left, flipped.left);
        assert_eq!(first.right, flipped.right);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let a = DMatrix::from_element(2, 2, f64::INFINITY);
        assert!(matches!(thin_svd_na(&a), Err(Error::InvalidInput(_))));
        assert!(polar_na(&a).is_err());
    }

    #[test]
    fn polar_of_orthonormal_is_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_orthonormal(6, 3, &mut rng);
        let w = polar_na(&q).unwrap();
        assert!((w - q).norm() < 1e-12);
    }

    #[test]
    fn polar_of_positive_diagonal_is_identity() {
        let w = polar_orthogonal(&DenseMatrix::diagonal(&[2.0, 3.0]).unwrap()).unwrap();
        assert!((w.as_nalgebra() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn polar_rejects_wide_input() {
        assert!(polar_orthogonal(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn polar_beats_random_orthonormal_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = gaussian(6, 2, &mut rng);
        let w = polar_na(&a).unwrap();
        assert!(orthonormality_error(&w) <= 1e-10);
        let best = w.tr_mul(&a).trace();
        for _ in 0..1000 {
            let r = random_orthonormal(6, 2, &mut rng);
            assert!(best >= r.tr_mul(&a).trace());
        }
    }

    #[test]
    fn rank_deficient_polar_is_orthonormal() {
        let col = DMatrix::from_column_slice(5, 1, &[1.0, 2.0, 0.0, -1.0, 3.0]);
        let a = &col * DMatrix::from_row_slice(1, 3, &[1.0, -2.0, 0.5]);
        let w = polar_na(&a).unwrap();
        assert!(orthonormality_error(&w) <= 1e-10);
    }
}
