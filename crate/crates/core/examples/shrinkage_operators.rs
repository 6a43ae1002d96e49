//! The proximal building blocks: entrywise soft thresholding, singular value
//! thresholding, the log-determinant shrinkage and the Procrustes polar factor.
//!
//!     cargo run --example shrinkage_operators

use ffp::linalg::{ld_shrink, ld_shrink_value, log_det_surrogate, polar_orthogonal, soft_threshold, svt, thin_svd};
use ffp::DenseMatrix;

fn main() -> ffp::Result<()> {
    let m = DenseMatrix::from_row_major(2, 3, vec![3.0, -0.4, 1.2, -2.5, 0.9, 0.1])?;
    println!("soft_threshold(M, 1):\n{:.4}", soft_threshold(&m, 1.0)?.as_nalgebra());

    let sigma = thin_svd(&m)?.sigma;
    let shrunk = thin_svd(&svt(&m, 1.0)?)?.sigma;
    println!("svt at 1: singular values {sigma:.4?} -> {shrunk:.4?}");

    // Scalar map of the log-det shrinkage: small singular values drop to
    // zero, large ones move by roughly tau / (1 + sigma).
    println!("\n sigma   tau=0.5   tau=2     tau=8");
    for s in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        println!(
            "{s:6.1}  {:8.4}  {:8.4}  {:8.4}",
            ld_shrink_value(s, 0.5),
            ld_shrink_value(s, 2.0),
            ld_shrink_value(s, 8.0)
        );
    }

    let core = DenseMatrix::diagonal(&[20.0, 6.0, 1.5, 0.2])?;
    let after = ld_shrink(&core, 4.0)?;
    println!(
        "\nld_shrink(diag(20, 6, 1.5, 0.2), 4) = diag{:.4?}; surrogate {:.3} -> {:.3}",
        (0..4).map(|i| after.get(i, i)).collect::<Vec<_>>(),
        log_det_surrogate(&core)?,
        log_det_surrogate(&after)?
    );

    let a = DenseMatrix::from_row_major(4, 2, vec![2.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.3, 3.0])?;
    let p = polar_orthogonal(&a)?;
    let gram = p.transpose().matmul(&p)?;
    println!("\npolar factor of a 4x2 matrix:\n{:.4}PᵀP =\n{:.4}", p.as_nalgebra(), gram.as_nalgebra());
    Ok(())
}
