//! Linear test: t_lin = sum of all entries / sqrt(NM), rejecting above H.
//! Powerful in the dense regime, where the planted block is large enough for
//! its total mass to move the global sum.

use crate::detect::{Detector, DetectorConfig};
use crate::error::Result;
use crate::model::{ObservationMatrix, TestReport, ThresholdKind};

/// t_lin. The sum is exact, so the statistic is invariant under any
/// permutation of the entries.
pub fn linear_statistic(matrix: &ObservationMatrix) -> f64 {
    matrix.total() / ((matrix.rows() * matrix.cols()) as f64).sqrt()
}

pub fn linear_test(matrix: &ObservationMatrix, h: f64) -> TestReport {
    TestReport::new("linear", linear_statistic(matrix), h)
}

#[derive(Debug, Clone)]
pub struct LinearDetector {
    threshold: f64,
    kind: ThresholdKind,
}

impl LinearDetector {
    pub fn new(threshold: f64) -> Self {
        Self {
            threshold,
            kind: ThresholdKind::Analytic,
        }
    }
}

impl Detector for LinearDetector {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn run(&self, matrix: &ObservationMatrix) -> Result<TestReport> {
        Ok(linear_test(matrix, self.threshold).with_threshold_kind(self.kind))
    }

    fn statistic(&self, matrix: &ObservationMatrix) -> Result<f64> {
        Ok(linear_statistic(matrix))
    }

    fn with_threshold(&self, threshold: f64) -> Box<dyn Detector> {
        Box::new(Self {
            threshold,
            kind: ThresholdKind::Empirical,
        })
    }
}

pub(super) fn build(cfg: &DetectorConfig) -> Result<Box<dyn Detector>> {
    Ok(Box::new(LinearDetector::new(cfg.linear_threshold()?)))
}
