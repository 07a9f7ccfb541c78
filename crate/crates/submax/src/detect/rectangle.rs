//! Scan over a coarse grid of contiguous n x m rectangles. The grid steps by
//! floor(n*eta) rows and floor(m*eta) columns, enough that any true rectangle
//! overlaps some grid block in all but an eta-fraction of each side, while
//! keeping the number of blocks polynomial.

use crate::detect::{Detector, DetectorConfig};
use crate::error::{Error, Result};
use crate::model::{
    validate_shape, ObservationMatrix, ProblemShape, SubmatrixSupport, TestReport, ThresholdKind,
};
use crate::search::submatrix_score;

/// Anchor offsets n_k = (k-1) floor(n eta) for k = 1..K, where K is the
/// smallest count whose last anchor reaches N - n(1+eta), and symmetrically
/// for columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangleGrid {
    pub eta: f64,
    pub row_anchors: Vec<usize>,
    pub col_anchors: Vec<usize>,
}

fn anchors_for(ambient: usize, block: usize, eta: f64) -> Result<Vec<usize>> {
    let step = ((block as f64 * eta).floor() as usize).max(1);
    let max_offset = ambient - block;
    // Coverage condition: the last anchor must land in
    // [N - n(1+eta), N - n].
    let lower = ambient as f64 - block as f64 * (1.0 + eta);
    let last = if lower <= 0.0 {
        0
    } else {
        let k = (lower / step as f64).ceil() as usize;
        let k = k.min(max_offset / step);
        k * step
    };
    if (last as f64) < lower || last > max_offset {
        return Err(Error::GridInfeasible(format!(
            "no anchor multiple of {step} lies in [{lower}, {max_offset}]"
        )));
    }
    Ok((0..=last / step).map(|k| k * step).collect())
}

impl RectangleGrid {
    pub fn new(shape: &ProblemShape, eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 || eta >= 1.0 {
            return Err(Error::OutOfRange(format!(
                "eta must be in (0, 1), got {eta}"
            )));
        }
        Ok(Self {
            eta,
            row_anchors: anchors_for(shape.rows, shape.sub_rows, eta)?,
            col_anchors: anchors_for(shape.cols, shape.sub_cols, eta)?,
        })
    }

    pub fn block_count(&self) -> usize {
        self.row_anchors.len() * self.col_anchors.len()
    }

    /// sqrt(2 ln(KL)).
    pub fn threshold(&self) -> f64 {
        (2.0 * (self.block_count() as f64).ln()).sqrt()
    }
}

/// Exact maximum of the block score over the K x L anchored rectangles (the
/// grid is polynomial, so no heuristic is involved), rejecting above
/// sqrt(2 ln(KL)).
pub fn rectangle_scan_test(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    eta: f64,
) -> Result<TestReport> {
    let grid = RectangleGrid::new(shape, eta)?;
    rectangle_scan_with_threshold(matrix, shape, &grid, grid.threshold(), ThresholdKind::Analytic)
}

fn rectangle_scan_with_threshold(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    grid: &RectangleGrid,
    threshold: f64,
    kind: ThresholdKind,
) -> Result<TestReport> {
    validate_shape(matrix, shape)?;
    let (rows, cols) = (matrix.rows(), matrix.cols());
    // Prefix sums: pre[i][j] = sum of the leading i x j corner.
    let width = cols + 1;
    let mut pre = vec![0.0; (rows + 1) * width];
    for i in 0..rows {
        let mut run = 0.0;
        let row = matrix.row(i);
        for j in 0..cols {
            run += row[j];
            pre[(i + 1) * width + (j + 1)] = pre[i * width + (j + 1)] + run;
        }
    }
    let (n, m) = (shape.sub_rows, shape.sub_cols);
    let norm = (shape.cells() as f64).sqrt();
    let mut best = f64::NEG_INFINITY;
    let mut best_anchor = (0usize, 0usize);
    for &a in &grid.row_anchors {
        for &b in &grid.col_anchors {
            let sum = pre[(a + n) * width + (b + m)] - pre[a * width + (b + m)]
                - pre[(a + n) * width + b]
                + pre[a * width + b];
            let score = sum / norm;
            // Strict improvement keeps the first anchor in row-major order.
            if score > best {
                best = score;
                best_anchor = (a, b);
            }
        }
    }
    let support = SubmatrixSupport::block(best_anchor.0, best_anchor.1, n, m)?;
    // Canonical re-score so the reported statistic is order-exact.
    let statistic = submatrix_score(matrix, &support)?;
    Ok(TestReport::new("rectangle", statistic, threshold)
        .with_support(support)
        .with_threshold_kind(kind))
}

#[derive(Debug, Clone)]
pub struct RectangleDetector {
    shape: ProblemShape,
    grid: RectangleGrid,
    threshold: f64,
    kind: ThresholdKind,
}

impl RectangleDetector {
    pub fn new(shape: ProblemShape, eta: f64) -> Result<Self> {
        let grid = RectangleGrid::new(&shape, eta)?;
        let threshold = grid.threshold();
        Ok(Self {
            shape,
            grid,
            threshold,
            kind: ThresholdKind::Analytic,
        })
    }
}

impl Detector for RectangleDetector {
    fn name(&self) -> &'static str {
        "rectangle"
    }

    fn run(&self, matrix: &ObservationMatrix) -> Result<TestReport> {
        rectangle_scan_with_threshold(matrix, &self.shape, &self.grid, self.threshold, self.kind)
    }

    fn statistic(&self, matrix: &ObservationMatrix) -> Result<f64> {
        Ok(self.run(matrix)?.statistic)
    }

    fn with_threshold(&self, threshold: f64) -> Box<dyn Detector> {
        Box::new(Self {
            threshold,
            kind: ThresholdKind::Empirical,
            ..self.clone()
        })
    }
}

pub(super) fn build(cfg: &DetectorConfig) -> Result<Box<dyn Detector>> {
    let shape = cfg.require_shape("rectangle")?;
    let mut det = RectangleDetector::new(shape, cfg.eta)?;
    if let Some(t) = cfg.scan_threshold {
        det.threshold = t;
        det.kind = ThresholdKind::Empirical;
    }
    Ok(Box::new(det))
}
