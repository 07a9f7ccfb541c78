use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {found_rows}x{found_cols} but the shape expects {expected_rows}x{expected_cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        found_rows: usize,
        found_cols: usize,
    },

    #[error("requested {n}x{m} submatrix does not fit in a {rows}x{cols} matrix")]
    SubmatrixTooLarge {
        rows: usize,
        cols: usize,
        n: usize,
        m: usize,
    },

    /// Row/col are 1-based, matching the on-disk CSV convention.
    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate shape: {0}")]
    DegenerateShape(String),

    #[error("beta = {beta:.6} is not in (1/2, 1): the dense boundary term applies instead")]
    DenseRegime { beta: f64 },

    #[error("enumeration budget exceeded: {count} candidate supports > budget {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("index out of bounds: {0}")]
    IndexOutOfBounds(String),

    #[error("adaptive grid has no (n, m) pairs")]
    EmptyGrid,

    #[error("rectangle grid infeasible: {0}")]
    GridInfeasible(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("matrix has no nonzero entry")]
    AllZero,

    /// Row/col are 1-based.
    #[error("value {value} at row {row}, column {col} is outside the support of the {law} law")]
    SupportViolation {
        law: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("alternating search exceeded max_iterations = {max_iterations} in restart {restart}")]
    MaxIterationsExceeded { restart: usize, max_iterations: usize },

    #[error("unknown detector '{0}'")]
    UnknownDetector(String),

    #[error("unknown law '{0}'")]
    UnknownLaw(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Line/field are 1-based positions in the offending file.
    #[error("parse error at line {line}, field {field}: {message}")]
    Parse {
        line: usize,
        field: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
