//! Unknown rank: U-FFP with an over-sized factor width and a λ sweep.
//!
//!     cargo run --release --example rank_selection -- [true_rank] [k]

use ffp::analysis::recovery_error;
use ffp::datagen::make_problem;
use ffp::solvers::{default_lambda_grid, sweep_lambda, SolverConfig};

fn main() -> ffp::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let r = args.next().flatten().unwrap_or(5);
    let k = args.next().flatten().unwrap_or(25);
    let problem = make_problem(200, 200, r, 0.05, 10.0, 7)?;

    let grid = default_lambda_grid(&problem.x);
    let (factors, _, report, sweep) = sweep_lambda(&problem.x, &SolverConfig::with_k(k), &grid, 1)?;
    println!("   lambda    rank  sparsity  residual");
    for (i, e) in sweep.entries.iter().enumerate() {
        let mark = if i == sweep.selected { "  <- kept" } else { "" };
        println!("{:9.3e}  {:>5}  {:8.3}  {:.2e}{mark}", e.lambda, e.final_rank, e.sparsity_ratio, e.final_residual);
    }
    println!(
        "true rank {r}, k = {k}: kept rank {}, recovery error {:.2e}",
        report.final_rank,
        recovery_error(&factors.to_dense(), &problem.l_star)?
    );
    Ok(())
}
