//! Unknown-variance variant: estimate sigma^2 by the mean of squares, divide
//! the data by sigma-hat, and run the combined test with the scan threshold
//! inflated to sqrt((2 + delta) log G_nm).

use crate::combin::scan_threshold;
use crate::detect::combined::composite_report;
use crate::detect::linear::linear_statistic;
use crate::detect::scan::run_scan;
use crate::detect::{Detector, DetectorConfig, ScanMode};
use crate::error::{Error, Result};
use crate::model::{ObservationMatrix, ProblemShape, TestReport, ThresholdKind};
use crate::numeric::fsum;

/// sigma-hat^2 = (1/NM) sum Y_ij^2; unbiased for sigma^2 under the null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub sigma2_hat: f64,
}

impl VarianceEstimate {
    pub fn sigma_hat(&self) -> f64 {
        self.sigma2_hat.sqrt()
    }
}

pub fn estimate_variance(matrix: &ObservationMatrix) -> Result<VarianceEstimate> {
    let sum_sq = fsum(matrix.entries().iter().map(|&v| v * v));
    let sigma2_hat = sum_sq / (matrix.rows() * matrix.cols()) as f64;
    if sigma2_hat == 0.0 {
        return Err(Error::AllZero);
    }
    Ok(VarianceEstimate { sigma2_hat })
}

/// Runs linear and scan on Y / sigma-hat. Operating on the rescaled matrix
/// rather than rescaling scores keeps one code path; the argmax is
/// scale-invariant so the two are equivalent.
pub fn studentized_combined_test(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    h: f64,
    delta: f64,
    mode: &ScanMode,
) -> Result<TestReport> {
    let t = scan_threshold(shape, delta)?;
    studentized_with_thresholds(matrix, shape, h, t, mode, ThresholdKind::Analytic)
}

fn rescaled(matrix: &ObservationMatrix) -> Result<ObservationMatrix> {
    let sigma_hat = estimate_variance(matrix)?.sigma_hat();
    matrix.map(|v| v / sigma_hat)
}

fn studentized_with_thresholds(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    h: f64,
    t: f64,
    mode: &ScanMode,
    kind: ThresholdKind,
) -> Result<TestReport> {
    let scaled = rescaled(matrix)?;
    let lin = linear_statistic(&scaled);
    let found = run_scan(&scaled, shape, mode)?;
    Ok(composite_report("studentized", lin, h, found.score, t)
        .with_support(found.support)
        .with_threshold_kind(kind))
}

#[derive(Debug, Clone)]
pub struct StudentizedDetector {
    shape: ProblemShape,
    linear_threshold: f64,
    scan_threshold: f64,
    kind: ThresholdKind,
    mode: ScanMode,
}

impl StudentizedDetector {
    pub fn new(shape: ProblemShape, h: f64, delta: f64, mode: ScanMode) -> Result<Self> {
        Ok(Self {
            shape,
            linear_threshold: h,
            scan_threshold: scan_threshold(&shape, delta)?,
            kind: ThresholdKind::Analytic,
            mode,
        })
    }
}

impl Detector for StudentizedDetector {
    fn name(&self) -> &'static str {
        "studentized"
    }

    fn run(&self, matrix: &ObservationMatrix) -> Result<TestReport> {
        studentized_with_thresholds(
            matrix,
            &self.shape,
            self.linear_threshold,
            self.scan_threshold,
            &self.mode,
            self.kind,
        )
    }

    fn statistic(&self, matrix: &ObservationMatrix) -> Result<f64> {
        let scaled = rescaled(matrix)?;
        Ok(run_scan(&scaled, &self.shape, &self.mode)?.score)
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
    let shape = cfg.require_shape("studentized")?;
    let mode = cfg.scan_mode("studentized")?;
    let mut det = StudentizedDetector::new(shape, cfg.linear_threshold()?, cfg.delta, mode)?;
    if let Some(t) = cfg.scan_threshold {
        det.scan_threshold = t;
        det.kind = ThresholdKind::Empirical;
    }
    Ok(Box::new(det))
}
