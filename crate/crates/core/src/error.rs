use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group orders {orders:?}: every order must be >= 1")]
    InvalidOrders { orders: Vec<usize> },

    #[error("group mismatch: operands live on different groups ({left:?} vs {right:?})")]
    GroupMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("algebra element mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("operator is not invertible (sigma_min = {sigma_min:.3e}, sigma_max = {sigma_max:.3e})")]
    NotInvertible { sigma_min: f64, sigma_max: f64 },

    #[error("matrix is not in the algebra span (relative residual = {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("atoms do not form a dual pair (residual = {residual:.3e})")]
    NotDualPair { residual: f64 },

    #[error("the two canonical-dual routes disagree (residual = {residual:.3e})")]
    DualRouteMismatch { residual: f64 },

    #[error("phase space too large for exhaustive enumeration (|G|^2 = {size} > {limit}); sample subgroups instead")]
    PhaseSpaceTooLarge { size: usize, limit: usize },

    #[error("signal length {got} does not match group order {expected}")]
    SignalLength { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
