//! Data generation, empirical calibration, power estimation, and the exact
//! likelihood-ratio probe.
//!
//! Everything here is deterministic in the plan seed: replications,
//! calibration samples, and search restarts all draw from derived
//! counter-based streams, and reductions run in a fixed order, so results are
//! bit-identical regardless of worker count.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::combin::detection_boundary;
use crate::detect::{build_detector, Detector, DetectorConfig};
use crate::error::{Error, Result};
use crate::law::{fisher_boundary, LawDescriptor};
use crate::model::{ObservationMatrix, ProblemShape, SignalSpec, SubmatrixSupport};
use crate::numeric::{fsum, std_normal_quantile, wilson_interval};
use crate::rng::{derive_seed, stream_rng, StreamKind};
use crate::search::{count_supports, for_each_support};

/// Null observation law.
#[derive(Debug, Clone)]
pub enum NoiseModel {
    Gaussian { sigma: f64 },
    Law(LawDescriptor),
}

impl NoiseModel {
    pub fn standard_gaussian() -> Self {
        NoiseModel::Gaussian { sigma: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if let NoiseModel::Gaussian { sigma } = self {
            if !sigma.is_finite() || *sigma <= 0.0 {
                return Err(Error::OutOfRange(format!(
                    "noise scale sigma must be positive, got {sigma}"
                )));
            }
        }
        Ok(())
    }
}

/// An i.i.d. null matrix, deterministic in the seed.
pub fn generate_null(
    rows: usize,
    cols: usize,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ObservationMatrix> {
    noise.validate()?;
    let mut rng = stream_rng(derive_seed(seed, StreamKind::NullData, 0), 0);
    let total = rows * cols;
    let entries: Vec<f64> = match noise {
        NoiseModel::Gaussian { sigma } => (0..total)
            .map(|_| {
                let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
                sigma * z
            })
            .collect(),
        NoiseModel::Law(law) => {
            let mut out = Vec::with_capacity(total);
            for _ in 0..total {
                out.push(law.sample_null(&mut rng)?);
            }
            out
        }
    };
    ObservationMatrix::new(rows, cols, entries)
}

/// Adds the signal values on the support (the additive Gaussian alternative).
pub fn plant_signal(matrix: &ObservationMatrix, spec: &SignalSpec) -> Result<ObservationMatrix> {
    spec.support().check_within(matrix)?;
    let cols = matrix.cols();
    let mut entries = matrix.entries().to_vec();
    let m = spec.support().m();
    for (ri, &i) in spec.support().rows().iter().enumerate() {
        for (cj, &j) in spec.support().cols().iter().enumerate() {
            entries[i * cols + j] += spec.value_at(ri * m + cj);
        }
    }
    ObservationMatrix::new(matrix.rows(), cols, entries)
}

/// Exponential-family alternative: in-support cells are regenerated from the
/// shifted parameter theta0 + d instead of shifted additively.
pub fn plant_parameter_shift(
    matrix: &ObservationMatrix,
    support: &SubmatrixSupport,
    law: &LawDescriptor,
    d: f64,
    seed: u64,
) -> Result<ObservationMatrix> {
    support.check_within(matrix)?;
    if !d.is_finite() || d < 0.0 {
        return Err(Error::OutOfRange(format!(
            "parameter shift d must be >= 0, got {d}"
        )));
    }
    let mut rng = stream_rng(derive_seed(seed, StreamKind::LawShift, 0), 0);
    let theta = law.theta0 + d;
    let cols = matrix.cols();
    let mut entries = matrix.entries().to_vec();
    for &i in support.rows() {
        for &j in support.cols() {
            entries[i * cols + j] = law.sample_at(theta, &mut rng)?;
        }
    }
    ObservationMatrix::new(matrix.rows(), cols, entries)
}

/// Empirical (1 - alpha)-quantile of the detector statistic over simulated
/// null matrices, taken at the conservative ceiling rank so the empirical
/// type-I error on the calibration sample is at most alpha.
pub fn calibrate_threshold(
    detector: &dyn Detector,
    rows: usize,
    cols: usize,
    noise: &NoiseModel,
    samples: usize,
    alpha: f64,
    seed: u64,
) -> Result<f64> {
    if samples < 20 {
        return Err(Error::OutOfRange(format!(
            "calibration needs at least 20 samples, got {samples}"
        )));
    }
    if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
        return Err(Error::OutOfRange(format!(
            "alpha must be in (0, 1], got {alpha}"
        )));
    }
    let mut stats = (0..samples)
        .into_par_iter()
        .map(|i| {
            let null = generate_null(
                rows,
                cols,
                noise,
                derive_seed(seed, StreamKind::Calibration, i as u64),
            )?;
            detector.statistic(&null)
        })
        .collect::<Result<Vec<f64>>>()?;
    stats.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((1.0 - alpha) * samples as f64).ceil() as usize;
    let rank = rank.clamp(1, samples);
    Ok(stats[rank - 1])
}

/// How the scan-side threshold is chosen for a power experiment.
#[derive(Debug, Clone, Copy)]
pub enum Calibration {
    /// Keep the detector's closed-form threshold.
    Analytic,
    /// Replace it with the empirical null quantile from this many samples.
    Empirical { samples: usize },
}

/// Full description of one power experiment.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub shape: ProblemShape,
    /// Strictly increasing signal amplitudes (theta shifts for law noise).
    /// An amplitude of 0 runs the null.
    pub amplitudes: Vec<f64>,
    /// Replications per amplitude.
    pub replications: usize,
    pub calibration: Calibration,
    pub alpha: f64,
    pub seed: u64,
    /// Registry name of the detector.
    pub detector: String,
    pub config: DetectorConfig,
    pub noise: NoiseModel,
    /// Worker threads; `None` uses the ambient pool. Output is identical
    /// either way.
    pub workers: Option<usize>,
    /// Place the planted block uniformly at random instead of the upper-left
    /// corner.
    pub random_placement: bool,
}

impl ExperimentPlan {
    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if self.amplitudes.is_empty() {
            return Err(Error::InvalidConfig("amplitude grid is empty".into()));
        }
        if !self.amplitudes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig(
                "amplitude grid must be strictly increasing".into(),
            ));
        }
        if self.amplitudes.iter().any(|&a| a < 0.0 || !a.is_finite()) {
            return Err(Error::InvalidConfig(
                "amplitudes must be finite and >= 0".into(),
            ));
        }
        self.noise.validate()
    }
}

#[derive(Debug, Clone)]
pub struct PowerPoint {
    pub amplitude: f64,
    pub rejects: usize,
    pub reps: usize,
    pub power: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_statistic: f64,
}

/// Estimated power across the amplitude grid, annotated with the relevant
/// detection boundary.
#[derive(Debug, Clone)]
pub struct PowerCurve {
    pub detector: String,
    pub shape: ProblemShape,
    pub a_star: f64,
    pub seed: u64,
    pub points: Vec<PowerPoint>,
}

impl PowerCurve {
    pub const CSV_HEADER: &'static str = "detector,N,M,n,m,a,a_star,power,ci_lo,ci_hi,reps,seed";

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let io = |source| Error::Io {
            path: "<power csv>".into(),
            source,
        };
        writeln!(w, "{}", Self::CSV_HEADER).map_err(io)?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                self.detector,
                self.shape.rows,
                self.shape.cols,
                self.shape.sub_rows,
                self.shape.sub_cols,
                p.amplitude,
                self.a_star,
                p.power,
                p.ci_lo,
                p.ci_hi,
                p.reps,
                self.seed
            )
            .map_err(io)?;
        }
        Ok(())
    }
}

/// A contiguous n x m block placed uniformly at random, deterministic in the
/// seed.
pub fn random_block_support(
    rows: usize,
    cols: usize,
    sub_rows: usize,
    sub_cols: usize,
    seed: u64,
) -> Result<SubmatrixSupport> {
    if sub_rows > rows || sub_cols > cols {
        return Err(Error::SubmatrixTooLarge {
            rows,
            cols,
            n: sub_rows,
            m: sub_cols,
        });
    }
    let mut rng = stream_rng(derive_seed(seed, StreamKind::Placement, 0), 0);
    let row0 = rng.random_range(0..=rows - sub_rows);
    let col0 = rng.random_range(0..=cols - sub_cols);
    SubmatrixSupport::block(row0, col0, sub_rows, sub_cols)
}

fn planted_support(plan: &ExperimentPlan, global_rep: u64) -> Result<SubmatrixSupport> {
    let (n, m) = (plan.shape.sub_rows, plan.shape.sub_cols);
    if plan.random_placement {
        random_block_support(
            plan.shape.rows,
            plan.shape.cols,
            n,
            m,
            derive_seed(plan.seed, StreamKind::Placement, global_rep),
        )
    } else {
        // Upper-left block, the placement used throughout the simulation
        // study; the statistics are permutation invariant so this is cosmetic.
        SubmatrixSupport::block(0, 0, n, m)
    }
}

fn one_replication(
    plan: &ExperimentPlan,
    detector: &dyn Detector,
    amplitude: f64,
    global_rep: u64,
) -> Result<(bool, f64)> {
    let data_seed = derive_seed(plan.seed, StreamKind::NullData, global_rep);
    let null = generate_null(plan.shape.rows, plan.shape.cols, &plan.noise, data_seed)?;
    let observed = if amplitude == 0.0 {
        null
    } else {
        let support = planted_support(plan, global_rep)?;
        match &plan.noise {
            NoiseModel::Gaussian { .. } => {
                let spec = SignalSpec::constant(support, amplitude)?;
                plant_signal(&null, &spec)?
            }
            NoiseModel::Law(law) => plant_parameter_shift(
                &null,
                &support,
                law,
                amplitude,
                derive_seed(plan.seed, StreamKind::LawShift, global_rep),
            )?,
        }
    };
    let report = detector.run(&observed)?;
    Ok((report.reject, report.statistic))
}

/// Runs the plan: optional empirical calibration, then `replications`
/// independent planted matrices per amplitude.
pub fn estimate_power(plan: &ExperimentPlan) -> Result<PowerCurve> {
    plan.validate()?;
    match plan.workers {
        Some(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            pool.install(|| estimate_power_inner(plan))
        }
        None => estimate_power_inner(plan),
    }
}

fn estimate_power_inner(plan: &ExperimentPlan) -> Result<PowerCurve> {
    let mut detector = build_detector(&plan.detector, &plan.config)?;
    if let Calibration::Empirical { samples } = plan.calibration {
        let threshold = calibrate_threshold(
            detector.as_ref(),
            plan.shape.rows,
            plan.shape.cols,
            &plan.noise,
            samples,
            plan.alpha,
            plan.seed,
        )?;
        detector = detector.with_threshold(threshold);
    }

    let a_star = match &plan.noise {
        NoiseModel::Gaussian { sigma } => sigma * detection_boundary(&plan.shape)?.a_star,
        NoiseModel::Law(law) => fisher_boundary(law, &plan.shape)?,
    };

    let z95 = std_normal_quantile(0.975);
    let reps = plan.replications;
    let mut points = Vec::with_capacity(plan.amplitudes.len());
    for (ai, &amplitude) in plan.amplitudes.iter().enumerate() {
        let outcomes = (0..reps)
            .into_par_iter()
            .map(|r| {
                let global_rep = (ai * reps + r) as u64;
                one_replication(plan, detector.as_ref(), amplitude, global_rep)
            })
            .collect::<Result<Vec<(bool, f64)>>>()?;
        // Sequential reduction in replication order keeps the output
        // bit-identical across worker counts.
        let rejects = outcomes.iter().filter(|(r, _)| *r).count();
        let mean_statistic = fsum(outcomes.iter().map(|&(_, s)| s)) / reps as f64;
        let power = rejects as f64 / reps as f64;
        let (ci_lo, ci_hi) = wilson_interval(rejects, reps, z95);
        points.push(PowerPoint {
            amplitude,
            rejects,
            reps,
            power,
            ci_lo,
            ci_hi,
            mean_statistic,
        });
    }
    Ok(PowerCurve {
        detector: plan.detector.clone(),
        shape: plan.shape,
        a_star,
        seed: plan.seed,
        points,
    })
}

/// The exact mixture likelihood ratio over the uniform prior on supports:
/// L = G^-1 sum_C exp(-b^2/2 + b Y_C) with b = a sqrt(nm), evaluated in
/// log-space by full enumeration.
pub fn exact_likelihood_ratio(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    a: f64,
    budget: u128,
) -> Result<f64> {
    if !a.is_finite() || a < 0.0 {
        return Err(Error::OutOfRange(format!(
            "signal amplitude a must be >= 0, got {a}"
        )));
    }
    let count = count_supports(shape, budget)? as f64;
    let b = a * (shape.cells() as f64).sqrt();
    let norm = (shape.cells() as f64).sqrt();
    // Online max-shifted sum of exponentials.
    let mut max_exp = f64::NEG_INFINITY;
    let mut scaled_sum = 0.0;
    for_each_support(matrix, shape, budget, |block_sum, _, _| {
        let e = -b * b / 2.0 + b * (block_sum / norm);
        if e > max_exp {
            scaled_sum = scaled_sum * (max_exp - e).exp() + 1.0;
            max_exp = e;
        } else {
            scaled_sum += (e - max_exp).exp();
        }
    })?;
    Ok((max_exp + scaled_sum.ln() - count.ln()).exp())
}

/// Distribution summary of L over simulated nulls. Below the boundary the
/// ratio degenerates at 1; far above it the variance blows up.
#[derive(Debug, Clone)]
pub struct ProbeSummary {
    pub reps: usize,
    pub mean: f64,
    pub variance: f64,
    /// Fraction of ratios inside [1 - epsilon, 1 + epsilon].
    pub frac_within: f64,
    pub epsilon: f64,
}

pub fn indistinguishability_probe(
    shape: &ProblemShape,
    a: f64,
    reps: usize,
    seed: u64,
    budget: u128,
    epsilon: f64,
) -> Result<ProbeSummary> {
    if reps == 0 {
        return Err(Error::OutOfRange("probe needs reps >= 1".into()));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let noise = NoiseModel::standard_gaussian();
    let ratios = (0..reps)
        .into_par_iter()
        .map(|r| {
            let null = generate_null(
                shape.rows,
                shape.cols,
                &noise,
                derive_seed(seed, StreamKind::NullData, r as u64),
            )?;
            exact_likelihood_ratio(&null, shape, a, budget)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = fsum(ratios.iter().copied()) / reps as f64;
    let variance = fsum(ratios.iter().map(|&x| (x - mean) * (x - mean))) / reps as f64;
    let within = ratios
        .iter()
        .filter(|&&x| (x - 1.0).abs() <= epsilon)
        .count();
    Ok(ProbeSummary {
        reps,
        mean,
        variance,
        frac_within: within as f64 / reps as f64,
        epsilon,
    })
}
