//! Exponential-family variant: standardize the observations to mean zero and
//! unit variance under the null parameter, then run the combined test with an
//! inflated scan threshold.

use crate::combin::scan_threshold;
use crate::detect::combined::composite_report;
use crate::detect::linear::linear_statistic;
use crate::detect::scan::run_scan;
use crate::detect::{Detector, DetectorConfig, ScanMode};
use crate::error::{Error, Result};
use crate::law::{standardize_observations, LawDescriptor};
use crate::model::{ObservationMatrix, ProblemShape, TestReport, ThresholdKind};

pub fn expfam_combined_test(
    raw: &ObservationMatrix,
    law: &LawDescriptor,
    shape: &ProblemShape,
    h: f64,
    delta: f64,
    mode: &ScanMode,
) -> Result<TestReport> {
    let t = scan_threshold(shape, delta)?;
    expfam_with_thresholds(raw, law, shape, h, t, mode, ThresholdKind::Analytic)
}

fn expfam_with_thresholds(
    raw: &ObservationMatrix,
    law: &LawDescriptor,
    shape: &ProblemShape,
    h: f64,
    t: f64,
    mode: &ScanMode,
    kind: ThresholdKind,
) -> Result<TestReport> {
    let standardized = standardize_observations(raw, law)?;
    let lin = linear_statistic(&standardized);
    let found = run_scan(&standardized, shape, mode)?;
    Ok(composite_report("expfam", lin, h, found.score, t)
        .with_support(found.support)
        .with_threshold_kind(kind))
}

#[derive(Debug, Clone)]
pub struct ExpfamDetector {
    law: LawDescriptor,
    shape: ProblemShape,
    linear_threshold: f64,
    scan_threshold: f64,
    kind: ThresholdKind,
    mode: ScanMode,
}

impl ExpfamDetector {
    pub fn new(
        law: LawDescriptor,
        shape: ProblemShape,
        h: f64,
        delta: f64,
        mode: ScanMode,
    ) -> Result<Self> {
        Ok(Self {
            law,
            shape,
            linear_threshold: h,
            scan_threshold: scan_threshold(&shape, delta)?,
            kind: ThresholdKind::Analytic,
            mode,
        })
    }
}

impl Detector for ExpfamDetector {
    fn name(&self) -> &'static str {
        "expfam"
    }

    fn run(&self, matrix: &ObservationMatrix) -> Result<TestReport> {
        expfam_with_thresholds(
            matrix,
            &self.law,
            &self.shape,
            self.linear_threshold,
            self.scan_threshold,
            &self.mode,
            self.kind,
        )
    }

    fn statistic(&self, matrix: &ObservationMatrix) -> Result<f64> {
        let standardized = standardize_observations(matrix, &self.law)?;
        Ok(run_scan(&standardized, &self.shape, &self.mode)?.score)
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
    let shape = cfg.require_shape("expfam")?;
    let law = cfg.law.ok_or_else(|| {
        Error::InvalidConfig("detector 'expfam' needs a law (name and theta0)".into())
    })?;
    let mode = cfg.scan_mode("expfam")?;
    let mut det = ExpfamDetector::new(law, shape, cfg.linear_threshold()?, cfg.delta, mode)?;
    if let Some(t) = cfg.scan_threshold {
        det.scan_threshold = t;
        det.kind = ThresholdKind::Empirical;
    }
    Ok(Box::new(det))
}
