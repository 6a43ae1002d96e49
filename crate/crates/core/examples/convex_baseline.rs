//! The convex IALM baseline next to F-FFP, on a well-spread low-rank matrix
//! and on one whose column space sits on a handful of coordinates.
//!
//!     cargo run --release --example convex_baseline

use ffp::analysis::recovery_error;
use ffp::datagen::{gen_sparse, make_problem};
use ffp::solvers::{solve_fffp, solve_ialm, SolverConfig};
use ffp::DenseMatrix;

fn compare(name: &str, x: &DenseMatrix, l_star: &DenseMatrix, r: usize) -> ffp::Result<()> {
    let (l, _, ialm) = solve_ialm(x, &SolverConfig::default())?;
    let (f, _, fffp) = solve_fffp(x, &SolverConfig::with_k(r))?;
    println!("{name}");
    for (label, rank, err, secs) in [
        ("IALM ", ialm.final_rank, recovery_error(&l, l_star)?, ialm.wall_time),
        ("F-FFP", fffp.final_rank, recovery_error(&f.to_dense(), l_star)?, fffp.wall_time),
    ] {
        println!("  {label}  rank {rank:>3}  error {err:.2e}  {secs:.2} s");
    }
    Ok(())
}

fn main() -> ffp::Result<()> {
    let (d, n, r) = (200, 200, 5);
    let p = make_problem(d, n, r, 0.05, 10.0, 2)?;
    compare("spread-out rank-5 matrix", &p.x, &p.l_star, r)?;

    let coherent = DenseMatrix::from_fn(d, n, |i, j| if i < 20 { p.l_star.get(i, j) } else { 0.0 })?;
    let rms = coherent.frobenius_norm() / ((d * n) as f64).sqrt();
    let x = coherent.add(&gen_sparse(d, n, 0.05, 10.0 * rms, 102)?)?;
    compare("rank-5 matrix living on 20 of 200 rows", &x, &coherent, r)
}
