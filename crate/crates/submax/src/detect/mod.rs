//! Detector strategies.
//!
//! Every test procedure implements [`Detector`] and is registered by name, so
//! the CLI and the simulation harness select variants at runtime. Composite
//! tests (linear + scan) report their decision as a margin against zero and
//! carry the sub-statistics as components.

pub mod adaptive;
pub mod combined;
pub mod expfam;
pub mod high_criticism;
pub mod linear;
pub mod rectangle;
pub mod scan;
pub mod studentized;
pub mod two_sided;

pub use adaptive::{adaptive_scan_test, AdaptiveGrid};
pub use combined::combined_test;
pub use expfam::expfam_combined_test;
pub use high_criticism::high_criticism_test;
pub use linear::{linear_statistic, linear_test};
pub use rectangle::{rectangle_scan_test, RectangleGrid};
pub use scan::scan_test;
pub use studentized::{estimate_variance, studentized_combined_test, VarianceEstimate};
pub use two_sided::{two_sided_linear, two_sided_test, TwoSidedConfig};

use crate::error::{Error, Result};
use crate::law::LawDescriptor;
use crate::model::{ObservationMatrix, ProblemShape, TestReport};
use crate::numeric::std_normal_quantile;
use crate::search::{SearchConfig, DEFAULT_BUDGET};

/// How scan statistics locate the maximizing support.
#[derive(Debug, Clone)]
pub enum ScanMode {
    /// Alternating maximization with random restarts.
    Heuristic(SearchConfig),
    /// Full enumeration, limited to `budget` candidate supports.
    Exact { budget: u128 },
}

/// A test procedure: consumes a matrix, produces a [`TestReport`].
pub trait Detector: Send + Sync {
    fn name(&self) -> &'static str;

    fn run(&self, matrix: &ObservationMatrix) -> Result<TestReport>;

    /// The scalar that empirical calibration quantiles. For composite tests
    /// this is the scan-side statistic; the linear side keeps its Gaussian
    /// quantile, matching how the simulation protocol calibrates.
    fn statistic(&self, matrix: &ObservationMatrix) -> Result<f64>;

    /// A copy of this detector with the calibratable threshold replaced by an
    /// empirical value.
    fn with_threshold(&self, threshold: f64) -> Box<dyn Detector>;
}

/// Everything the registry needs to build any detector. Strategies read the
/// fields they understand and reject configurations missing required parts.
#[derive(Debug, Clone)]
pub struct DetectorConfig {
    /// (N, M, n, m); required by every scan-family detector.
    pub shape: Option<ProblemShape>,
    /// Target level for analytic linear thresholds H = Phi^-1(1 - alpha).
    pub alpha: f64,
    /// Override for the linear threshold H.
    pub linear_threshold: Option<f64>,
    /// Override for the scan-side threshold (e.g. from `calibrate`).
    pub scan_threshold: Option<f64>,
    /// Inflation delta for the studentized / exponential-family / two-sided
    /// scan thresholds.
    pub delta: f64,
    /// Exact enumeration instead of the search heuristic.
    pub exact: bool,
    pub budget: u128,
    /// Search configuration; required whenever the heuristic runs.
    pub search: Option<SearchConfig>,
    /// (n, m) pairs for the adaptive detector; `None` picks the dyadic default.
    pub grid: Option<Vec<(usize, usize)>>,
    /// Rectangle grid step fraction.
    pub eta: f64,
    /// High-criticism grid start t0 > 0.
    pub t0: f64,
    /// High-criticism threshold constant c > 2. The asymptotics allow any
    /// c > 2; 4.0 keeps the desk-scale null level in check.
    pub hc_c: f64,
    /// Observation law for the exponential-family detector.
    pub law: Option<LawDescriptor>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            shape: None,
            alpha: 0.01,
            linear_threshold: None,
            scan_threshold: None,
            delta: 0.1,
            exact: false,
            budget: DEFAULT_BUDGET,
            search: None,
            grid: None,
            eta: 0.5,
            t0: 0.5,
            hc_c: 4.0,
            law: None,
        }
    }
}

impl DetectorConfig {
    pub fn with_shape(mut self, shape: ProblemShape) -> Self {
        self.shape = Some(shape);
        self
    }

    pub fn with_search(mut self, search: SearchConfig) -> Self {
        self.search = Some(search);
        self
    }

    /// H: explicit override, else the Gaussian quantile at 1 - alpha.
    pub fn linear_threshold(&self) -> Result<f64> {
        if let Some(h) = self.linear_threshold {
            return Ok(h);
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(std_normal_quantile(1.0 - self.alpha))
    }

    pub fn require_shape(&self, detector: &str) -> Result<ProblemShape> {
        self.shape.ok_or_else(|| {
            Error::InvalidConfig(format!(
                "detector '{detector}' needs a problem shape (N, M, n, m)"
            ))
        })
    }

    pub fn scan_mode(&self, detector: &str) -> Result<ScanMode> {
        if self.exact {
            Ok(ScanMode::Exact { budget: self.budget })
        } else {
            let search = self.search.clone().ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "detector '{detector}' needs a seeded search configuration"
                ))
            })?;
            search.validate()?;
            Ok(ScanMode::Heuristic(search))
        }
    }
}

type BuildFn = fn(&DetectorConfig) -> Result<Box<dyn Detector>>;

/// Name -> constructor table. Order is the order `detector_names` reports.
const REGISTRY: &[(&str, BuildFn)] = &[
    ("linear", linear::build),
    ("scan", scan::build),
    ("combined", combined::build),
    ("adaptive", adaptive::build),
    ("rectangle", rectangle::build),
    ("high-criticism", high_criticism::build),
    ("studentized", studentized::build),
    ("expfam", expfam::build),
    ("two-sided", two_sided::build),
];

/// Builds a registered detector by name.
pub fn build_detector(name: &str, cfg: &DetectorConfig) -> Result<Box<dyn Detector>> {
    match REGISTRY.iter().find(|(n, _)| *n == name) {
        Some((_, build)) => build(cfg),
        None => Err(Error::UnknownDetector(name.to_string())),
    }
}

pub fn detector_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProblemShape;

    #[test]
    fn registry_knows_every_strategy() {
        let names = detector_names();
        for expected in [
            "linear",
            "scan",
            "combined",
            "adaptive",
            "rectangle",
            "high-criticism",
            "studentized",
            "expfam",
            "two-sided",
        ] {
            assert!(names.contains(&expected), "missing {expected}");
        }
        assert!(matches!(
            build_detector("nonesuch", &DetectorConfig::default()),
            Err(Error::UnknownDetector(_))
        ));
    }

    #[test]
    fn every_registered_detector_builds_and_runs() {
        let shape = ProblemShape::new(8, 8, 2, 2).unwrap();
        let cfg = DetectorConfig::default()
            .with_shape(shape)
            .with_search(SearchConfig::new(7).with_restarts(10));
        let cfg = DetectorConfig {
            law: Some(crate::law::LawDescriptor::new(crate::law::Law::Poisson, 4.0).unwrap()),
            ..cfg
        };
        // A Poisson-valued matrix keeps the expfam detector in-support; the
        // others are happy with any finite data.
        let data: Vec<f64> = (0..64).map(|k| (k % 7) as f64).collect();
        let matrix = ObservationMatrix::new(8, 8, data).unwrap();
        for name in detector_names() {
            let det = build_detector(name, &cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(det.name(), name);
            let report = det.run(&matrix).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(report.reject, report.statistic > report.threshold, "{name}");
            det.statistic(&matrix).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn missing_requirements_are_invalid_config() {
        // Scan without a shape.
        let cfg = DetectorConfig {
            search: Some(SearchConfig::new(1)),
            ..DetectorConfig::default()
        };
        assert!(matches!(
            build_detector("scan", &cfg),
            Err(Error::InvalidConfig(_))
        ));
        // Scan with a shape but no search and no exact flag.
        let cfg = DetectorConfig::default().with_shape(ProblemShape::new(8, 8, 2, 2).unwrap());
        assert!(matches!(
            build_detector("scan", &cfg),
            Err(Error::InvalidConfig(_))
        ));
        // Expfam without a law.
        let cfg = DetectorConfig::default()
            .with_shape(ProblemShape::new(8, 8, 2, 2).unwrap())
            .with_search(SearchConfig::new(1));
        assert!(matches!(
            build_detector("expfam", &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn calibrated_copies_flip_the_threshold_kind() {
        use crate::model::ThresholdKind;
        let shape = ProblemShape::new(8, 8, 2, 2).unwrap();
        let cfg = DetectorConfig::default()
            .with_shape(shape)
            .with_search(SearchConfig::new(7).with_restarts(5));
        let matrix = ObservationMatrix::zeros(8, 8);
        for name in ["scan", "combined", "two-sided", "studentized"] {
            let det = build_detector(name, &cfg).unwrap();
            let calibrated = det.with_threshold(123.0);
            let report = if name == "studentized" {
                // The studentized detector rejects an all-zero matrix.
                let data: Vec<f64> = (0..64).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
                let m = ObservationMatrix::new(8, 8, data).unwrap();
                calibrated.run(&m).unwrap()
            } else {
                calibrated.run(&matrix).unwrap()
            };
            assert_eq!(report.threshold_kind, ThresholdKind::Empirical, "{name}");
            assert!(!report.reject, "{name} must not reject at threshold 123");
        }
    }
}
