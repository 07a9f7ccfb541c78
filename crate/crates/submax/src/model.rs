//! Domain types shared by every detector and the simulator.
//!
//! All indices are 0-based in memory; file formats and error messages use
//! 1-based indices.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::fsum;

/// Dense real-valued observation matrix, row-major, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl ObservationMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::OutOfRange(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::OutOfRange(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: k / cols + 1,
                col: k % cols + 1,
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0.0; rows * cols]).expect("positive dims")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Applies `f` to every entry. Fails if the image is non-finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.entries.iter().map(|&v| f(v)).collect())
    }

    /// Exact sum of all entries (order-independent).
    pub fn total(&self) -> f64 {
        fsum(self.entries.iter().copied())
    }

    /// Reads the no-header CSV matrix format: one row per line,
    /// comma-separated decimal values.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = Vec::new();
        let mut cols = 0usize;
        let mut rows = 0usize;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: "<matrix csv>".into(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let mut this_row = 0usize;
            for (fieldno, field) in line.split(',').enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    field: fieldno + 1,
                    message: format!("expected a decimal number, got '{}'", field.trim()),
                })?;
                entries.push(v);
                this_row += 1;
            }
            if rows == 0 {
                cols = this_row;
            } else if this_row != cols {
                return Err(Error::Parse {
                    line: lineno + 1,
                    field: this_row,
                    message: format!("row has {this_row} fields, expected {cols}"),
                });
            }
            rows += 1;
        }
        if rows == 0 {
            return Err(Error::Parse {
                line: 1,
                field: 1,
                message: "empty matrix file".into(),
            });
        }
        Self::new(rows, cols, entries)
    }

    pub fn read_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// Writes the matrix in the same CSV format `read_csv` accepts. The
    /// shortest round-trip decimal form is used, so write-then-read is lossless.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let io = |source| Error::Io {
            path: "<matrix csv>".into(),
            source,
        };
        for i in 0..self.rows {
            let row = self.row(i);
            let mut first = true;
            for v in row {
                if !first {
                    write!(w, ",").map_err(io)?;
                }
                write!(w, "{v}").map_err(io)?;
                first = false;
            }
            writeln!(w).map_err(io)?;
        }
        Ok(())
    }
}

/// A candidate product support C = A x B: strictly increasing row and column
/// index sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubmatrixSupport {
    row_set: Vec<usize>,
    col_set: Vec<usize>,
}

impl SubmatrixSupport {
    pub fn new(row_set: Vec<usize>, col_set: Vec<usize>) -> Result<Self> {
        if row_set.is_empty() || col_set.is_empty() {
            return Err(Error::OutOfRange("support index sets must be nonempty".into()));
        }
        if !row_set.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::OutOfRange("row indices must be strictly increasing".into()));
        }
        if !col_set.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::OutOfRange("column indices must be strictly increasing".into()));
        }
        Ok(Self { row_set, col_set })
    }

    /// Contiguous block anchored at (row0, col0).
    pub fn block(row0: usize, col0: usize, n: usize, m: usize) -> Result<Self> {
        Self::new((row0..row0 + n).collect(), (col0..col0 + m).collect())
    }

    pub fn rows(&self) -> &[usize] {
        &self.row_set
    }

    pub fn cols(&self) -> &[usize] {
        &self.col_set
    }

    pub fn n(&self) -> usize {
        self.row_set.len()
    }

    pub fn m(&self) -> usize {
        self.col_set.len()
    }

    pub fn cells(&self) -> usize {
        self.n() * self.m()
    }

    /// Checks every index against the matrix dimensions.
    pub fn check_within(&self, matrix: &ObservationMatrix) -> Result<()> {
        if let Some(&i) = self.row_set.iter().find(|&&i| i >= matrix.rows()) {
            return Err(Error::IndexOutOfBounds(format!(
                "row index {} exceeds matrix rows {}",
                i + 1,
                matrix.rows()
            )));
        }
        if let Some(&j) = self.col_set.iter().find(|&&j| j >= matrix.cols()) {
            return Err(Error::IndexOutOfBounds(format!(
                "column index {} exceeds matrix columns {}",
                j + 1,
                matrix.cols()
            )));
        }
        Ok(())
    }

    /// Support file format: two lines of comma-separated 1-based indices,
    /// rows first, then columns.
    pub fn read_lines<R: BufRead>(reader: R) -> Result<Self> {
        let mut sets = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: "<support file>".into(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let mut set = Vec::new();
            for (fieldno, field) in line.split(',').enumerate() {
                let v: usize = field.trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    field: fieldno + 1,
                    message: format!("expected a 1-based index, got '{}'", field.trim()),
                })?;
                if v == 0 {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        field: fieldno + 1,
                        message: "indices are 1-based; 0 is not valid".into(),
                    });
                }
                set.push(v - 1);
            }
            sets.push(set);
        }
        if sets.len() != 2 {
            return Err(Error::Parse {
                line: sets.len(),
                field: 1,
                message: format!("support file needs exactly 2 lines, found {}", sets.len()),
            });
        }
        let cols = sets.pop().unwrap();
        let rows = sets.pop().unwrap();
        Self::new(rows, cols)
    }

    pub fn write_lines<W: Write>(&self, w: &mut W) -> Result<()> {
        let io = |source| Error::Io {
            path: "<support file>".into(),
            source,
        };
        let fmt = |set: &[usize]| {
            set.iter()
                .map(|&i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(w, "{}", fmt(&self.row_set)).map_err(io)?;
        writeln!(w, "{}", fmt(&self.col_set)).map_err(io)?;
        Ok(())
    }
}

/// Ambient and planted dimensions (N, M, n, m) with the derived fractions
/// p = n/N and q = m/M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemShape {
    pub rows: usize,
    pub cols: usize,
    pub sub_rows: usize,
    pub sub_cols: usize,
}

impl ProblemShape {
    pub fn new(rows: usize, cols: usize, sub_rows: usize, sub_cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || sub_rows == 0 || sub_cols == 0 {
            return Err(Error::OutOfRange(
                "all of N, M, n, m must be positive".into(),
            ));
        }
        if sub_rows > rows || sub_cols > cols {
            return Err(Error::SubmatrixTooLarge {
                rows,
                cols,
                n: sub_rows,
                m: sub_cols,
            });
        }
        Ok(Self {
            rows,
            cols,
            sub_rows,
            sub_cols,
        })
    }

    /// p = n/N.
    pub fn row_fraction(&self) -> f64 {
        self.sub_rows as f64 / self.rows as f64
    }

    /// q = m/M.
    pub fn col_fraction(&self) -> f64 {
        self.sub_cols as f64 / self.cols as f64
    }

    pub fn cells(&self) -> usize {
        self.sub_rows * self.sub_cols
    }

    /// Shape with the row and column roles exchanged.
    pub fn transposed(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            sub_rows: self.sub_cols,
            sub_cols: self.sub_rows,
        }
    }
}

/// Checks that a matrix matches the ambient dimensions of a shape.
pub fn validate_shape(matrix: &ObservationMatrix, shape: &ProblemShape) -> Result<()> {
    if matrix.rows() != shape.rows || matrix.cols() != shape.cols {
        return Err(Error::DimensionMismatch {
            expected_rows: shape.rows,
            expected_cols: shape.cols,
            found_rows: matrix.rows(),
            found_cols: matrix.cols(),
        });
    }
    // n <= N and m <= M are enforced at ProblemShape construction; entries are
    // finite by ObservationMatrix construction.
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

/// The planted mean matrix S: values on a product support, zero elsewhere.
#[derive(Debug, Clone)]
pub struct SignalSpec {
    support: SubmatrixSupport,
    amplitude: f64,
    sidedness: Sidedness,
    /// Row-major over the support; `None` means the constant `amplitude`.
    per_cell_values: Option<Vec<f64>>,
}

impl SignalSpec {
    /// Constant signal s_ij = a on the support.
    pub fn constant(support: SubmatrixSupport, amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() || amplitude <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "amplitude must be a positive real, got {amplitude}"
            )));
        }
        Ok(Self {
            support,
            amplitude,
            sidedness: Sidedness::OneSided,
            per_cell_values: None,
        })
    }

    /// Two-sided signal with independently drawn signs: s_ij = +/- a.
    pub fn two_sided_signs<R: rand::Rng>(
        support: SubmatrixSupport,
        amplitude: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !amplitude.is_finite() || amplitude <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "amplitude must be a positive real, got {amplitude}"
            )));
        }
        let values = (0..support.cells())
            .map(|_| if rng.random_bool(0.5) { amplitude } else { -amplitude })
            .collect();
        Self::with_values(support, amplitude, Sidedness::TwoSided, values)
    }

    /// Explicit per-cell values (row-major over the support). One-sided specs
    /// require every value >= a; two-sided specs require |value| >= a.
    pub fn with_values(
        support: SubmatrixSupport,
        amplitude: f64,
        sidedness: Sidedness,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !amplitude.is_finite() || amplitude <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "amplitude must be a positive real, got {amplitude}"
            )));
        }
        if values.len() != support.cells() {
            return Err(Error::OutOfRange(format!(
                "expected {} per-cell values, got {}",
                support.cells(),
                values.len()
            )));
        }
        let ok = match sidedness {
            Sidedness::OneSided => values.iter().all(|&v| v >= amplitude),
            Sidedness::TwoSided => values.iter().all(|&v| v.abs() >= amplitude),
        };
        if !ok {
            return Err(Error::OutOfRange(
                "per-cell values must dominate the amplitude on the support".into(),
            ));
        }
        Ok(Self {
            support,
            amplitude,
            sidedness,
            per_cell_values: Some(values),
        })
    }

    pub fn support(&self) -> &SubmatrixSupport {
        &self.support
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    /// Value at the k-th support cell (row-major over the support).
    pub fn value_at(&self, k: usize) -> f64 {
        match &self.per_cell_values {
            Some(v) => v[k],
            None => self.amplitude,
        }
    }

    /// The full N x M mean matrix: s_ij on the support, exactly 0 elsewhere.
    pub fn materialize(&self, rows: usize, cols: usize) -> Result<ObservationMatrix> {
        let mut entries = vec![0.0; rows * cols];
        let m = self.support.m();
        for (ri, &i) in self.support.rows().iter().enumerate() {
            if i >= rows {
                return Err(Error::IndexOutOfBounds(format!(
                    "support row {} exceeds {} rows",
                    i + 1,
                    rows
                )));
            }
            for (cj, &j) in self.support.cols().iter().enumerate() {
                if j >= cols {
                    return Err(Error::IndexOutOfBounds(format!(
                        "support column {} exceeds {} columns",
                        j + 1,
                        cols
                    )));
                }
                entries[i * cols + j] = self.value_at(ri * m + cj);
            }
        }
        ObservationMatrix::new(rows, cols, entries)
    }
}

/// Whether a report's threshold came from a closed form or from simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    Analytic,
    Empirical,
}

impl fmt::Display for ThresholdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdKind::Analytic => write!(f, "analytic"),
            ThresholdKind::Empirical => write!(f, "empirical"),
        }
    }
}

/// One named sub-statistic of a composite test.
#[derive(Debug, Clone)]
pub struct StatComponent {
    pub label: String,
    pub statistic: f64,
    pub threshold: f64,
}

/// Outcome of one detector run. `reject` is always `statistic > threshold`;
/// composite detectors encode their decision as a margin against 0.
#[derive(Debug, Clone)]
pub struct TestReport {
    pub detector_name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    pub located_support: Option<SubmatrixSupport>,
    pub components: Vec<StatComponent>,
    pub threshold_kind: ThresholdKind,
}

impl TestReport {
    pub fn new(detector_name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            detector_name: detector_name.into(),
            statistic,
            threshold,
            reject: statistic > threshold,
            located_support: None,
            components: Vec::new(),
            threshold_kind: ThresholdKind::Analytic,
        }
    }

    pub fn with_support(mut self, support: SubmatrixSupport) -> Self {
        self.located_support = Some(support);
        self
    }

    pub fn with_component(mut self, label: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        self.components.push(StatComponent {
            label: label.into(),
            statistic,
            threshold,
        });
        self
    }

    pub fn with_threshold_kind(mut self, kind: ThresholdKind) -> Self {
        self.threshold_kind = kind;
        self
    }
}
