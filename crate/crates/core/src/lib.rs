//! Factorization-based robust PCA.
//!
//! Splits a data matrix `X` into a low-rank part `L = U·C·Vᵀ` (orthonormal
//! `U`, `V`, small core `C`) and a sparse part `S`. Every iteration of the
//! factorized solvers costs `O(d·n·k)` and only takes SVDs of d×k, n×k and
//! k×k matrices.
//!
//! ```no_run
//! use ffp::datagen::make_problem;
//! use ffp::solvers::{solve_fffp, SolverConfig};
//!
//! let problem = make_problem(200, 200, 5, 0.05, 10.0, 7)?;
//! let (factors, sparse, report) = solve_fffp(&problem.x, &SolverConfig::with_k(5))?;
//! println!("rank {} after {} iterations", report.final_rank, report.iterations);
//! # Ok::<(), ffp::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod datagen;
pub mod dataio;
pub mod error;
pub mod linalg;
pub mod solvers;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
