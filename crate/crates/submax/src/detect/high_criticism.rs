//! High-criticism test over exceedance counts, the reference procedure for
//! sparse alternatives without product structure.
//!
//! L(t) = (#{Y_ij > t} - NM Phi(-t)) / sqrt(NM Phi(t) Phi(-t)), maximized over
//! t in {t0} and the distinct observed values above t0. Between consecutive
//! order statistics the count is constant, so this grid maximization is the
//! implementation of the sup, not an approximation of it.

use crate::detect::{Detector, DetectorConfig};
use crate::error::{Error, Result};
use crate::model::{ObservationMatrix, TestReport, ThresholdKind};
use crate::numeric::std_normal_cdf;

/// The t with NM Phi(-t) = 1, returned negated for direct comparison.
fn std_normal_cdf_inverse_of_count(total: usize) -> f64 {
    crate::numeric::std_normal_quantile(1.0 / total as f64)
}

fn l_statistic(count_above: usize, total: usize, t: f64) -> Result<f64> {
    let nm = total as f64;
    let upper = std_normal_cdf(-t);
    let lower = std_normal_cdf(t);
    let denom = (nm * lower * upper).sqrt();
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateInput(format!(
            "normalization NM Phi(t) Phi(-t) vanishes at t = {t}"
        )));
    }
    Ok((count_above as f64 - nm * upper) / denom)
}

/// Runs the high-criticism test with grid start t0 > 0 and threshold
/// sqrt(c ln ln(NM)), c > 2.
pub fn high_criticism_test(matrix: &ObservationMatrix, t0: f64, c: f64) -> Result<TestReport> {
    let threshold = hc_threshold(matrix, t0, c)?;
    hc_with_threshold(matrix, t0, threshold, ThresholdKind::Analytic)
}

fn hc_threshold(matrix: &ObservationMatrix, t0: f64, c: f64) -> Result<f64> {
    let total = matrix.rows() * matrix.cols();
    if total < 16 {
        return Err(Error::OutOfRange(format!(
            "high criticism needs NM >= 16, got {total}"
        )));
    }
    if !t0.is_finite() || t0 <= 0.0 {
        return Err(Error::OutOfRange(format!("t0 must be > 0, got {t0}")));
    }
    if !c.is_finite() || c <= 2.0 {
        return Err(Error::OutOfRange(format!("c must be > 2, got {c}")));
    }
    Ok((c * (total as f64).ln().ln()).sqrt())
}

fn hc_with_threshold(
    matrix: &ObservationMatrix,
    t0: f64,
    threshold: f64,
    kind: ThresholdKind,
) -> Result<TestReport> {
    let total = matrix.rows() * matrix.cols();
    if !t0.is_finite() || t0 <= 0.0 {
        return Err(Error::OutOfRange(format!("t0 must be > 0, got {t0}")));
    }

    // Order statistics above t0. L is evaluated with the strict exceedance
    // count, at t0 itself and at every distinct observed value above it.
    // The grid stops where the expected null exceedance count NM Phi(-t)
    // drops below one: past that point the normalization is vacuous and the
    // statistic's null tail is unstable at finite NM.
    let mut above: Vec<f64> = matrix.entries().iter().copied().filter(|&v| v > t0).collect();
    above.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let t_cap = -std_normal_cdf_inverse_of_count(total);

    let mut best = l_statistic(above.len(), total, t0)?;
    let mut k = 0;
    while k < above.len() {
        let value = above[k];
        // Skip duplicates: the exceedance count at `value` excludes ties.
        let mut end = k + 1;
        while end < above.len() && above[end] == value {
            end += 1;
        }
        if value <= t_cap {
            let stat = l_statistic(above.len() - end, total, value)?;
            if stat > best {
                best = stat;
            }
        }
        k = end;
    }

    Ok(TestReport::new("high-criticism", best, threshold).with_threshold_kind(kind))
}

#[derive(Debug, Clone)]
pub struct HighCriticismDetector {
    t0: f64,
    c: f64,
    threshold: Option<f64>,
}

impl HighCriticismDetector {
    pub fn new(t0: f64, c: f64) -> Self {
        Self { t0, c, threshold: None }
    }
}

impl Detector for HighCriticismDetector {
    fn name(&self) -> &'static str {
        "high-criticism"
    }

    fn run(&self, matrix: &ObservationMatrix) -> Result<TestReport> {
        match self.threshold {
            Some(t) => hc_with_threshold(matrix, self.t0, t, ThresholdKind::Empirical),
            None => high_criticism_test(matrix, self.t0, self.c),
        }
    }

    fn statistic(&self, matrix: &ObservationMatrix) -> Result<f64> {
        Ok(self.run(matrix)?.statistic)
    }

    fn with_threshold(&self, threshold: f64) -> Box<dyn Detector> {
        Box::new(Self {
            threshold: Some(threshold),
            ..*self
        })
    }
}

pub(super) fn build(cfg: &DetectorConfig) -> Result<Box<dyn Detector>> {
    let mut det = HighCriticismDetector::new(cfg.t0, cfg.hc_c);
    if let Some(t) = cfg.scan_threshold {
        det.threshold = Some(t);
    }
    Ok(Box::new(det))
}
