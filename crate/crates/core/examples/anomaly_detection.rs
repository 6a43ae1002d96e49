//! Outlier columns: one dominant rank-one class with a few unrelated columns
//! mixed in. The column norms of the sparse part single out the intruders.
//!
//!     cargo run --release --example anomaly_detection -- [seed]

use ffp::analysis::anomaly_detect;
use ffp::datagen::make_outlier_problem;
use ffp::solvers::{solve_fffp, SolverConfig};

fn main() -> ffp::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let problem = make_outlier_problem(256, 190, 10, seed)?;
    let (_, sparse, report) = solve_fffp(&problem.x, &SolverConfig { seed, ..SolverConfig::with_k(1) })?;
    println!("F-FFP k=1 on 256x200: {} iterations", report.iterations);

    let result = anomaly_detect(&sparse, f64::INFINITY);
    let mut ranked: Vec<usize> = (0..result.scores.len()).collect();
    ranked.sort_by(|&a, &b| result.scores[b].total_cmp(&result.scores[a]));
    println!("highest scores:");
    for &j in &ranked[..14] {
        let tag = if problem.outliers.contains(&j) { "planted" } else { "" };
        println!("  column {j:>3}  {:8.3}  {tag}", result.scores[j]);
    }
    let flagged = result.top(10);
    println!(
        "top-10 flags {:?}\nplanted      {:?}\nexact match: {}",
        flagged,
        problem.outliers,
        flagged == problem.outliers
    );
    Ok(())
}
