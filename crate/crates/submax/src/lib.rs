//! Detection of an elevated-mean n x m submatrix planted in an N x M noisy
//! matrix.
//!
//! The crate provides:
//!
//! - the family of test procedures (linear, scan, combined, adaptive,
//!   rectangle-grid, high-criticism, plus studentized, exponential-family and
//!   two-sided variants), each behind the [`detect::Detector`] trait and
//!   selectable by name from [`detect::build_detector`];
//! - closed-form thresholds and detection boundaries ([`combin`]);
//! - the randomized alternating search for the scan statistic with an exact
//!   enumeration oracle ([`search`]);
//! - a Monte Carlo harness for calibration and power curves, and the exact
//!   likelihood-ratio probe for below-boundary indistinguishability ([`sim`]).
//!
//! All randomness is seeded and counter-based: identical inputs give
//! bit-identical outputs at any worker count.
//!
//! ```
//! use submax::{
//!     build_detector, detection_boundary, generate_null, plant_signal, DetectorConfig,
//!     NoiseModel, ProblemShape, SearchConfig, SignalSpec, SubmatrixSupport,
//! };
//!
//! let shape = ProblemShape::new(60, 60, 6, 6)?;
//! let boundary = detection_boundary(&shape)?;
//! assert!(boundary.a_star > 0.0);
//!
//! // Plant a block well above the boundary and detect it.
//! let null = generate_null(60, 60, &NoiseModel::standard_gaussian(), 7)?;
//! let support = SubmatrixSupport::block(10, 20, 6, 6)?;
//! let spec = SignalSpec::constant(support, 3.0 * boundary.a_star)?;
//! let observed = plant_signal(&null, &spec)?;
//!
//! let config = DetectorConfig::default()
//!     .with_shape(shape)
//!     .with_search(SearchConfig::new(42).with_restarts(300));
//! let detector = build_detector("combined", &config)?;
//! let report = detector.run(&observed)?;
//! assert!(report.reject);
//! # Ok::<(), submax::Error>(())
//! ```

pub mod combin;
pub mod detect;
pub mod error;
pub mod law;
pub mod model;
pub mod numeric;
pub mod rng;
pub mod search;
pub mod sim;

pub use combin::{
    adaptive_threshold, detection_boundary, log_binomial, log_submatrix_count,
    no_structure_boundary, phi_beta, rectangle_boundary, scan_threshold, BoundaryReport, Regime,
};
pub use detect::{build_detector, detector_names, Detector, DetectorConfig, ScanMode};
pub use error::{Error, Result};
pub use law::{fisher_boundary, standardize_observations, Law, LawDescriptor};
pub use model::{
    validate_shape, ObservationMatrix, ProblemShape, Sidedness, SignalSpec, SubmatrixSupport,
    TestReport, ThresholdKind,
};
pub use search::{
    alternating_search, brute_force_max, submatrix_score, SearchConfig, SearchResult,
    DEFAULT_BUDGET,
};
pub use sim::{
    calibrate_threshold, estimate_power, exact_likelihood_ratio, generate_null,
    indistinguishability_probe, plant_parameter_shift, plant_signal, random_block_support,
    Calibration, ExperimentPlan, NoiseModel, PowerCurve, PowerPoint, ProbeSummary,
};
