//! The combined procedure: reject as soon as the linear or the scan test
//! rejects. Near the boundary each component covers the regime the other
//! misses.

use crate::combin::scan_threshold;
use crate::detect::linear::linear_statistic;
use crate::detect::scan::run_scan;
use crate::detect::{Detector, DetectorConfig, ScanMode};
use crate::error::Result;
use crate::model::{ObservationMatrix, ProblemShape, TestReport, ThresholdKind};

/// Builds the margin-encoded report shared by every linear + scan composite:
/// statistic = max(t_lin - H, t_scan - T) against threshold 0, so
/// reject <=> either component exceeds its own threshold.
pub(super) fn composite_report(
    name: &'static str,
    lin: f64,
    h: f64,
    scan: f64,
    t: f64,
) -> TestReport {
    let margin = (lin - h).max(scan - t);
    TestReport::new(name, margin, 0.0)
        .with_component("linear", lin, h)
        .with_component("scan", scan, t)
}

pub fn combined_test(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    h: f64,
    t: f64,
    mode: &ScanMode,
) -> Result<TestReport> {
    let lin = linear_statistic(matrix);
    let found = run_scan(matrix, shape, mode)?;
    Ok(composite_report("combined", lin, h, found.score, t).with_support(found.support))
}

#[derive(Debug, Clone)]
pub struct CombinedDetector {
    shape: ProblemShape,
    linear_threshold: f64,
    scan_threshold: f64,
    kind: ThresholdKind,
    mode: ScanMode,
}

impl CombinedDetector {
    pub fn new(shape: ProblemShape, h: f64, t: f64, mode: ScanMode) -> Self {
        Self {
            shape,
            linear_threshold: h,
            scan_threshold: t,
            kind: ThresholdKind::Analytic,
            mode,
        }
    }
}

impl Detector for CombinedDetector {
    fn name(&self) -> &'static str {
        "combined"
    }

    fn run(&self, matrix: &ObservationMatrix) -> Result<TestReport> {
        Ok(combined_test(
            matrix,
            &self.shape,
            self.linear_threshold,
            self.scan_threshold,
            &self.mode,
        )?
        .with_threshold_kind(self.kind))
    }

    fn statistic(&self, matrix: &ObservationMatrix) -> Result<f64> {
        Ok(run_scan(matrix, &self.shape, &self.mode)?.score)
    }

    fn with_threshold(&self, threshold: f64) -> Box<dyn Detector> {
        Box::new(Self {
            scan_threshold: threshold,
            kind: ThresholdKind::Empirical,
            ..self.clone()
        })
    }
}

pub(super) fn build(cfg: &DetectorConfig) -> Result<Box<dyn Detector>> {
    let shape = cfg.require_shape("combined")?;
    let mode = cfg.scan_mode("combined")?;
    let h = cfg.linear_threshold()?;
    let mut det = CombinedDetector::new(
        shape,
        h,
        match cfg.scan_threshold {
            Some(t) => t,
            None => scan_threshold(&shape, 0.0)?,
        },
        mode,
    );
    if cfg.scan_threshold.is_some() {
        det.kind = ThresholdKind::Empirical;
    }
    Ok(Box::new(det))
}
