use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    #[error("matrix is not on the Stiefel manifold (orthonormality defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("vector is not tangent at its base point (defect {defect:.3e})")]
    NotTangent { defect: f64 },

    #[error("tangent vectors are anchored at different base points")]
    Anchor,

    #[error("alpha = {0} does not define a metric")]
    Metric(f64),

    #[error("cannot normalize a zero tangent vector")]
    DegenerateTangent,

    #[error("{name} = {value} is outside {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("series of length {len} is too short (need at least {required})")]
    Length { len: usize, required: usize },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("{what}: got {found}, need at least {required}")]
    Size {
        what: &'static str,
        found: usize,
        required: usize,
    },

    #[error("singular value decomposition failed")]
    Svd,

    #[error("eigendecomposition failed")]
    Eigen,

    #[error("truncated singular values are ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("data has numerical rank {found}, below the requested {required}")]
    Rank { found: usize, required: usize },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("solver did not converge within {0} iterations")]
    Convergence(usize),
}

impl Error {
    pub(crate) fn dims(expected: (usize, usize), found: (usize, usize)) -> Self {
        Error::Dimension {
            expected: format!("{}x{}", expected.0, expected.1),
            found: format!("{}x{}", found.0, found.1),
        }
    }
}
