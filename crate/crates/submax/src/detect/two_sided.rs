//! Two-sided alternative |s_ij| >= a: chi-square style statistics built from
//! Y^2 - 1, insensitive to the sign pattern of the planted block.

use crate::combin::scan_threshold;
use crate::detect::combined::composite_report;
use crate::detect::scan::run_scan;
use crate::detect::{Detector, DetectorConfig, ScanMode};
use crate::error::Result;
use crate::model::{ObservationMatrix, ProblemShape, TestReport, ThresholdKind};
use crate::numeric::fsum;

/// Thresholds for the two-sided pair: H for z_lin and the inflation delta for
/// the z_max scan threshold sqrt((2 + delta) log G_nm).
#[derive(Debug, Clone, Copy)]
pub struct TwoSidedConfig {
    pub h: f64,
    pub delta: f64,
}

impl TwoSidedConfig {
    fn validate(&self) -> crate::error::Result<()> {
        if !self.delta.is_finite() || self.delta <= 0.0 {
            return Err(crate::error::Error::OutOfRange(format!(
                "two-sided threshold inflation delta must be > 0, got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// z_lin = (1/sqrt(2NM)) sum (Y_ij^2 - 1). Zero mean and unit variance under
/// the null.
pub fn two_sided_linear(matrix: &ObservationMatrix) -> f64 {
    let total = fsum(matrix.entries().iter().map(|&v| v * v - 1.0));
    total / (2.0 * (matrix.rows() * matrix.cols()) as f64).sqrt()
}

/// The entrywise transform whose block scores are the Z_C statistics.
fn chi_square_transform(matrix: &ObservationMatrix) -> ObservationMatrix {
    matrix
        .map(|v| (v * v - 1.0) / std::f64::consts::SQRT_2)
        .expect("squares of finite entries are finite")
}

/// z^ = max(z_lin - H, z_max - T) > 0, where z_max is the scan over
/// Z_C = (1/sqrt(2nm)) sum_C (Y^2 - 1), computed by searching the transformed
/// matrix.
pub fn two_sided_test(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    cfg: &TwoSidedConfig,
    mode: &ScanMode,
) -> Result<TestReport> {
    cfg.validate()?;
    let t = scan_threshold(shape, cfg.delta)?;
    two_sided_with_thresholds(matrix, shape, cfg.h, t, mode, ThresholdKind::Analytic)
}

fn two_sided_with_thresholds(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    h: f64,
    t: f64,
    mode: &ScanMode,
    kind: ThresholdKind,
) -> Result<TestReport> {
    let z_lin = two_sided_linear(matrix);
    let transformed = chi_square_transform(matrix);
    let found = run_scan(&transformed, shape, mode)?;
    Ok(composite_report("two-sided", z_lin, h, found.score, t)
        .with_support(found.support)
        .with_threshold_kind(kind))
}

#[derive(Debug, Clone)]
pub struct TwoSidedDetector {
    shape: ProblemShape,
    linear_threshold: f64,
    scan_threshold: f64,
    kind: ThresholdKind,
    mode: ScanMode,
}

impl TwoSidedDetector {
    pub fn new(shape: ProblemShape, cfg: TwoSidedConfig, mode: ScanMode) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            shape,
            linear_threshold: cfg.h,
            scan_threshold: scan_threshold(&shape, cfg.delta)?,
            kind: ThresholdKind::Analytic,
            mode,
        })
    }
}

impl Detector for TwoSidedDetector {
    fn name(&self) -> &'static str {
        "two-sided"
    }

    fn run(&self, matrix: &ObservationMatrix) -> Result<TestReport> {
        two_sided_with_thresholds(
            matrix,
            &self.shape,
            self.linear_threshold,
            self.scan_threshold,
            &self.mode,
            self.kind,
        )
    }

    fn statistic(&self, matrix: &ObservationMatrix) -> Result<f64> {
        let transformed = chi_square_transform(matrix);
        Ok(run_scan(&transformed, &self.shape, &self.mode)?.score)
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
    let shape = cfg.require_shape("two-sided")?;
    let mode = cfg.scan_mode("two-sided")?;
    let mut det = TwoSidedDetector::new(
        shape,
        TwoSidedConfig {
            h: cfg.linear_threshold()?,
            delta: cfg.delta,
        },
        mode,
    )?;
    if let Some(t) = cfg.scan_threshold {
        det.scan_threshold = t;
        det.kind = ThresholdKind::Empirical;
    }
    Ok(Box::new(det))
}
