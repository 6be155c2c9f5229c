//! Right inverses of `T_λ` on finitely supported vectors.

mod bounds;
mod matrix;
mod solve;

pub use bounds::{eval_f, eval_g, inverse_entry_log_bound, BoundEval, BoundKind};
pub use matrix::{minor, permutation_det, TriMatrix, ORACLE_MAX_DIM};
pub use solve::{apply_s_lambda_pow, iterate_dimension, solve_right_inverse};
