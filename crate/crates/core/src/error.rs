use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("elements belong to different algebras: {left} vs {right}")]
    ParentMismatch { left: String, right: String },
    #[error("algebra {0} is not commutative")]
    NotCommutative(String),
    #[error("bad group multiplication table: {0}")]
    BadGroupTable(String),
    #[error("not a group action: {0}")]
    NotAnAction(String),
    #[error("Haar weights are not constant on orbits: objects {a} and {b}")]
    WeightNotOrbitConstant { a: String, b: String },
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("tensor form is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    FormNotPsd { min_eigenvalue: f64 },
    #[error("operator is not adjointable (residual {residual:.3e})")]
    NotAdjointable { residual: f64 },
    #[error("map is not faithful (min Gram eigenvalue {min_eigenvalue:.3e})")]
    NotFaithful { min_eigenvalue: f64 },
    #[error("left action is not adjointable (residual {residual:.3e})")]
    LeftActionNotAdjointable { residual: f64 },
    #[error("base algebra is not one-dimensional")]
    NotGroupMode,
    #[error("representation and dual are built on different groupoids")]
    GroupoidMismatch,
    #[error("corepresentations live over different bases: {0}")]
    BaseMismatch(String),
    #[error("corepresentation codomain form is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    CodomainFormNotPsd { min_eigenvalue: f64 },
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("word-span closure did not stabilize within {cap} steps")]
    WordCapExceeded { cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
