//! Log-combinatorial quantities, scan thresholds, and the closed-form
//! detection boundaries.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::model::ProblemShape;

/// Which term of the detection boundary is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Dense,
    Sparse,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Dense => write!(f, "dense"),
            Regime::Sparse => write!(f, "sparse"),
        }
    }
}

/// Both boundary terms, their minimum, and the active regime.
///
/// The dense term 1/sqrt(nmpq) is where the linear test starts to win; the
/// sparse term sqrt(2(n log(1/p) + m log(1/q))/(nm)) is where the scan test
/// does. The simulator uses the regime to know which component should drive
/// power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryReport {
    pub dense_term: f64,
    pub sparse_term: f64,
    pub a_star: f64,
    pub regime: Regime,
}

/// ln C(n, k) via log-gamma. C(500, 250) overflows every fixed-width integer,
/// and thresholds only ever need the log.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::OutOfRange(format!(
            "binomial coefficient C({n}, {k}) requires k <= n"
        )));
    }
    // Canonical k makes the symmetry C(n, k) = C(n, n - k) exact, not just
    // up to rounding.
    let k = k.min(n - k);
    if k == 0 {
        return Ok(0.0);
    }
    Ok(ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
}

/// ln G_nm = ln C(N, n) + ln C(M, m), the log of the number of candidate
/// product supports.
pub fn log_submatrix_count(shape: &ProblemShape) -> Result<f64> {
    Ok(log_binomial(shape.rows as u64, shape.sub_rows as u64)?
        + log_binomial(shape.cols as u64, shape.sub_cols as u64)?)
}

/// Scan threshold sqrt((2 + delta) ln G_nm). delta = 0 is the known-variance
/// Gaussian threshold; the studentized, exponential-family, and two-sided
/// tests inflate it by a small delta > 0.
pub fn scan_threshold(shape: &ProblemShape, delta: f64) -> Result<f64> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::OutOfRange(format!(
            "threshold inflation delta must be >= 0, got {delta}"
        )));
    }
    Ok(((2.0 + delta) * log_submatrix_count(shape)?).sqrt())
}

/// Adaptive threshold V_nm = sqrt(2 ln(N M G_nm)).
pub fn adaptive_threshold(shape: &ProblemShape) -> Result<f64> {
    let ln_g = log_submatrix_count(shape)?;
    Ok((2.0 * ((shape.rows as f64).ln() + (shape.cols as f64).ln() + ln_g)).sqrt())
}

/// The sharp detection boundary a* = min(dense, sparse) for product supports
/// of known size.
pub fn detection_boundary(shape: &ProblemShape) -> Result<BoundaryReport> {
    let p = shape.row_fraction();
    let q = shape.col_fraction();
    if p >= 1.0 || q >= 1.0 {
        return Err(Error::DegenerateShape(format!(
            "boundary needs p < 1 and q < 1, got p = {p}, q = {q}"
        )));
    }
    let n = shape.sub_rows as f64;
    let m = shape.sub_cols as f64;
    let dense_term = 1.0 / (n * m * p * q).sqrt();
    let sparse_term = (2.0 * (n * (1.0 / p).ln() + m * (1.0 / q).ln()) / (n * m)).sqrt();
    // Ties go dense so the output is deterministic.
    let (a_star, regime) = if dense_term <= sparse_term {
        (dense_term, Regime::Dense)
    } else {
        (sparse_term, Regime::Sparse)
    };
    Ok(BoundaryReport {
        dense_term,
        sparse_term,
        a_star,
        regime,
    })
}

/// The unstructured-sparsity rate function:
/// phi(beta) = sqrt(2 beta - 1) on (1/2, 3/4], sqrt(2)(1 - sqrt(1 - beta)) on
/// (3/4, 1). Continuous at 3/4.
pub fn phi_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.5 && beta < 1.0) {
        return Err(Error::OutOfRange(format!(
            "phi(beta) is defined on (1/2, 1), got {beta}"
        )));
    }
    if beta <= 0.75 {
        Ok((2.0 * beta - 1.0).sqrt())
    } else {
        Ok(std::f64::consts::SQRT_2 * (1.0 - (1.0 - beta).sqrt()))
    }
}

/// Boundary for alternatives with no product structure, treating the matrix
/// as a sparse vector of length NM: phi(beta) sqrt(ln(NM)) with
/// beta = 1 - ln(nm)/ln(NM). Signals the dense regime when beta <= 1/2.
pub fn no_structure_boundary(shape: &ProblemShape) -> Result<f64> {
    let ln_total = ((shape.rows as f64) * (shape.cols as f64)).ln();
    let ln_cells = ((shape.sub_rows as f64) * (shape.sub_cols as f64)).ln();
    let beta = 1.0 - ln_cells / ln_total;
    if beta <= 0.5 {
        return Err(Error::DenseRegime { beta });
    }
    if beta >= 1.0 {
        return Err(Error::OutOfRange(format!(
            "beta = {beta} is not in (1/2, 1); nm must exceed 1"
        )));
    }
    Ok(phi_beta(beta)? * ln_total.sqrt())
}

/// Boundary for contiguous rectangular supports:
/// sqrt(2(log(1/p) + log(1/q))/(nm)).
pub fn rectangle_boundary(shape: &ProblemShape) -> Result<f64> {
    let p = shape.row_fraction();
    let q = shape.col_fraction();
    if p >= 1.0 || q >= 1.0 {
        return Err(Error::DegenerateShape(format!(
            "boundary needs p < 1 and q < 1, got p = {p}, q = {q}"
        )));
    }
    let cells = shape.cells() as f64;
    Ok((2.0 * ((1.0 / p).ln() + (1.0 / q).ln()) / cells).sqrt())
}

/// C(n, k) in exact integer arithmetic, `None` once the running value exceeds
/// `cap`. Used for enumeration budgeting.
pub fn binomial_capped(n: u64, k: u64, cap: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Multiply before dividing keeps the intermediate integral:
        // acc * (n - i) is always divisible by (i + 1) here.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}
