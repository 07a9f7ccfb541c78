//! Scan test: t_max = max_C Y_C over all n x m product supports, rejecting
//! above T_nm = sqrt(2 log G_nm) (or a calibrated threshold).

use crate::combin::scan_threshold;
use crate::detect::{Detector, DetectorConfig, ScanMode};
use crate::error::Result;
use crate::model::{ObservationMatrix, ProblemShape, TestReport, ThresholdKind};
use crate::search::{alternating_search, brute_force_max, SearchResult};

pub(super) fn run_scan(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    mode: &ScanMode,
) -> Result<SearchResult> {
    match mode {
        ScanMode::Heuristic(cfg) => alternating_search(matrix, shape, cfg),
        ScanMode::Exact { budget } => brute_force_max(matrix, shape, *budget),
    }
}

pub fn scan_test(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    threshold: f64,
    mode: &ScanMode,
) -> Result<TestReport> {
    let found = run_scan(matrix, shape, mode)?;
    Ok(TestReport::new("scan", found.score, threshold).with_support(found.support))
}

#[derive(Debug, Clone)]
pub struct ScanDetector {
    shape: ProblemShape,
    threshold: f64,
    kind: ThresholdKind,
    mode: ScanMode,
}

impl ScanDetector {
    pub fn new(shape: ProblemShape, threshold: f64, mode: ScanMode) -> Self {
        Self {
            shape,
            threshold,
            kind: ThresholdKind::Analytic,
            mode,
        }
    }
}

impl Detector for ScanDetector {
    fn name(&self) -> &'static str {
        "scan"
    }

    fn run(&self, matrix: &ObservationMatrix) -> Result<TestReport> {
        Ok(scan_test(matrix, &self.shape, self.threshold, &self.mode)?
            .with_threshold_kind(self.kind))
    }

    fn statistic(&self, matrix: &ObservationMatrix) -> Result<f64> {
        Ok(run_scan(matrix, &self.shape, &self.mode)?.score)
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
    let shape = cfg.require_shape("scan")?;
    let mode = cfg.scan_mode("scan")?;
    let mut det = ScanDetector::new(
        shape,
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
