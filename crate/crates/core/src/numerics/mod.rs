//! Self-contained dense numerical kernels.

mod linalg;
mod optimize;
mod quadrature;

pub use linalg::{
    back_transform, cholesky, cholesky_with_threshold, gen_sym_eigen_max,
    gen_sym_eigen_max_factored, sym_eigen, CholeskyFactor, SymEigen, SymMatrix,
    DEFAULT_PIVOT_TOL, MAX_ORDER,
};
pub use optimize::golden_refine;
pub use quadrature::{gauss_legendre, GaussRule, MAX_GAUSS_POINTS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("Gauss-Legendre rule size {requested} outside 1..={max}")]
    RuleSize { requested: usize, max: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix order {order} exceeds the dense limit {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    Asymmetric { row: usize, col: usize, gap: f64 },
    #[error("matrix is not positive definite: pivot {index} is {pivot:e} (threshold {threshold:e})")]
    NotPositiveDefinite {
        index: usize,
        pivot: f64,
        threshold: f64,
    },
}
