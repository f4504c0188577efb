use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("level mismatch: {0}")]
    Level(String),

    #[error("derivative order exhausted for coefficient `{coefficient}`")]
    DerivativeOrderExhausted { coefficient: String },

    #[error("singular point at {point}: {reason}")]
    SingularPoint { point: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("missing face data for simplex {0:?}")]
    MissingFace(Vec<usize>),

    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("degree constraint violated: {0}")]
    DegreeConstraint(String),

    #[error("oracle rejected: {0}")]
    OracleRejected(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn fmt_point(z: &[num_complex::Complex64]) -> String {
    let parts: Vec<String> = z.iter().map(|c| format!("{:.4}{:+.4}i", c.re, c.im)).collect();
    format!("({})", parts.join(", "))
}
