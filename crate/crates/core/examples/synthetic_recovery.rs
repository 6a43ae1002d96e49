//! Fixed-rank recovery of a corrupted low-rank matrix with F-FFP.
//!
//!     cargo run --release --example synthetic_recovery -- [d] [n] [rank] [fraction]

use ffp::analysis::recovery_error;
use ffp::datagen::make_problem;
use ffp::solvers::{solve_fffp, SolverConfig};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> ffp::Result<()> {
    let (d, n, r, fraction) = (arg(1, 400), arg(2, 400), arg(3, 5), arg(4, 0.05));
    let problem = make_problem(d, n, r, fraction, 10.0, 7)?;
    println!("{d}x{n}, rank {r}, {:.0}% of entries corrupted", 100.0 * fraction);

    let (factors, sparse, report) = solve_fffp(&problem.x, &SolverConfig::with_k(r))?;
    for (i, res) in report.per_iter_residual.iter().enumerate().step_by(5) {
        println!("  iter {:>3}  residual {res:.3e}", i + 1);
    }
    println!(
        "{} iterations ({}), {:.3} s, {} thin SVDs",
        report.iterations,
        if report.converged { "converged" } else { "hit the cap" },
        report.wall_time,
        report.svd_count
    );
    println!(
        "rank(L) = {}, ‖L−L*‖/‖L*‖ = {:.2e}",
        report.final_rank,
        recovery_error(&factors.to_dense(), &problem.l_star)?
    );
    let planted = problem.s_star.count_above(0.0);
    println!("nonzeros in S: {} (planted {planted})", sparse.count_above(0.0));
    Ok(())
}
