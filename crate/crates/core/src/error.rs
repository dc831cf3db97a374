use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not hermitian (max |a_ij - conj(a_ji)| = {0:e})")]
    NotHermitian(f64),

    #[error("jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("matrix has eigenvalue {0:e} below the positivity tolerance")]
    NotPositive(f64),

    #[error("subset {subset:?} is not contained in units 1..={n_units}")]
    InvalidSubset { subset: Vec<usize>, n_units: usize },

    #[error("family of subsets is not closed under taking subsets; call closure() first")]
    NotClosed,

    #[error("parameter {name} = {value} outside of {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("special parameter ({0}); the kernel dimension changes")]
    SpecialParameter(&'static str),

    #[error("objective vector is zero")]
    ZeroObjective,

    #[error("spectrahedron has no coordinates (m = 0)")]
    EmptySpectrahedron,

    #[error("point lies outside the spectrahedron (lambda_min = {0:e})")]
    Infeasible(f64),

    #[error("projector must satisfy 0 < rank < {0}")]
    TrivialProjector(usize),

    #[error("matrix does not lie in the local space (residual {0:e})")]
    NotInSpace(f64),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
