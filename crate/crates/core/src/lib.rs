//! Separable low-rank approximation of bivariate functions.
//!
//! The pipeline has two stages. A tensorized empirical interpolation runs a
//! greedy EIM in each direction, giving Lagrange bases `q_i(x)`, `s_j(y)`
//! and magic points `x_i`, `y_j`, so that
//!
//! ```text
//! I^{m,n} f(x, y) = Σ_ij f(x_i, y_j) q_i(x) s_j(y) = q(x)ᵀ F s(y).
//! ```
//!
//! The collocation matrix `F` is then decomposed as `U Σ Vᵀ` and truncated
//! to `f̃^(K)(x, y) = Σ_{k ≤ K} σ_k φ_k(x) ψ_k(y)`.
//!
//! ```
//! use septensor_core::{Domain, FunctionSource, lowrank, tensor};
//!
//! let f = FunctionSource::builtin("paper-f", Domain::unit_square())?;
//! let interp = tensor::teim(&f, 10, 10, 101)?;
//! let factors = lowrank::svd_decompose(interp.values())?;
//! let approx = lowrank::truncate(&interp, &factors, 2)?;
//! let err = (approx.evaluate(0.3, 0.6)? - f.eval(0.3, 0.6)?).abs();
//! assert!(err < 0.1);
//! # Ok::<(), septensor_core::Error>(())
//! ```

pub mod diag;
pub mod eim;
pub mod error;
pub mod export;
pub mod expr;
pub mod gridfn;
pub mod lowrank;
pub mod tensor;

pub use diag::{BoundCheck, CheckStatus, DiagConfig, DiagnosticsReport, verify_bounds};
pub use eim::{DirectionalBasis, Direction, EimConfig, run_directional_eim};
pub use error::{Error, ErrorClass, Result};
pub use expr::{Expr, SyntaxError};
pub use gridfn::{Builtin, Domain, FunctionSource, Grid, Interval, Surrogate, Table, builtin_registry};
pub use lowrank::{LowRankApprox, SvdFactors, frobenius_tail, svd_decompose, truncate};
pub use tensor::{MagicPoints, TensorInterpolant, build_tensor_interpolant};
