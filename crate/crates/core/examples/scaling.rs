//! Per-iteration cost against problem size: fixed 50 iterations while one
//! dimension grows, then a least-squares line through the timings.
//!
//!     cargo run --release --example scaling -- [base] [samples|dimension]

use ffp::analysis::{linear_fit, scaling_benchmark, Axis, BenchParams};

fn main() -> ffp::Result<()> {
    let base = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(600);
    let axis = match std::env::args().nth(2).as_deref() {
        Some("dimension") => Axis::Dimension,
        _ => Axis::Samples,
    };
    let params = BenchParams { d: base, n: base, ..BenchParams::default() };
    let factors: Vec<f64> = (1..=8).map(|i| f64::from(i) / 8.0).collect();
    let rows = scaling_benchmark(&params, axis, &factors, 50)?;
    println!("{axis:?} axis, {}x{} base, F-FFP k={}", base, base, params.config.k);
    for r in &rows {
        println!("  {:>4}x{:<4}  {:7.3} s", r.rows, r.cols, r.seconds);
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.seconds).collect();
    let fit = linear_fit(&xs, &ys)?;
    println!("seconds ≈ {:.3e}·size + {:.3e}, R² = {:.4}", fit.slope, fit.intercept, fit.r_squared);
    Ok(())
}
