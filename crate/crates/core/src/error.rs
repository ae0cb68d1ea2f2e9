use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("gram matrix is not Hermitian (max asymmetry {0:.3e})")]
    GramNotHermitian(f64),

    #[error("gram matrix is not positive definite")]
    GramNotPositive,

    #[error("operator is not self-adjoint for the given metric (max asymmetry {0:.3e})")]
    NotSelfAdjoint(f64),

    #[error("matrix is not an orthogonal projection (residual {0:.3e})")]
    NotProjection(f64),

    #[error("differentials do not compose to zero at degree {degree} (residual {residual:.3e})")]
    NotComplex { degree: i64, residual: f64 },

    #[error("complex is not exact at degree {0}")]
    NotExact(i64),

    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: &'static str, detail: String },

    #[error("parity check failed: chi'(C12) - chi'(C1,bd) - chi'(C2,bd) = {0} is odd")]
    Parity(i64),

    #[error("spectrum is not closed under conjugation (mismatch {0:.3e})")]
    NotConjugationClosed(f64),

    #[error("argument out of range: {0}")]
    Domain(String),

    #[error("branch tracking ambiguous near lambda = {lambda}: phase jump {jump:.3} (use a finer grid)")]
    BranchJump { lambda: f64, jump: f64 },

    #[error("root solver did not converge in [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64 },

    #[error("refinement precondition fails: residual {residual:.3e} >= |v| = {norm:.3e}")]
    Precondition { residual: f64, norm: f64 },

    #[error("eigen-solver failed: {0}")]
    Eigen(&'static str),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invariant(name: &'static str, detail: impl Into<String>) -> Error {
    Error::Invariant { name, detail: detail.into() }
}
