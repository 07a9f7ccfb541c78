//! Finding the maximizing submatrix score t_max = max_C Y_C.
//!
//! Two routes: randomized alternating maximization with restarts (scales to
//! large matrices, lower-bounds the true max) and exhaustive enumeration
//! (exact, budget-limited, the small-instance oracle).

use rayon::prelude::*;

use crate::combin::binomial_capped;
use crate::error::{Error, Result};
use crate::model::{validate_shape, ObservationMatrix, ProblemShape, SubmatrixSupport};
use crate::numeric::fsum;
use crate::rng::{derive_seed, stream_rng, StreamKind};

/// Default enumeration budget: number of candidate supports.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Number of random restarts K.
    pub restarts: usize,
    /// Guard on alternating iterations per restart. Termination is guaranteed
    /// by monotone bounded block sums, so hitting this is an error.
    pub max_iterations: usize,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            restarts: 1000,
            max_iterations: 1000,
            seed,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be >= 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub support: SubmatrixSupport,
    /// Y_C at the reported support, recomputed with the canonical
    /// (order-independent) summation.
    pub score: f64,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Y_C = sum of the support's entries divided by sqrt(nm). The sum is exact,
/// so the score does not depend on index order.
pub fn submatrix_score(matrix: &ObservationMatrix, support: &SubmatrixSupport) -> Result<f64> {
    support.check_within(matrix)?;
    let sum = fsum(
        support
            .rows()
            .iter()
            .flat_map(|&i| support.cols().iter().map(move |&j| matrix.get(i, j))),
    );
    Ok(sum / (support.cells() as f64).sqrt())
}

/// Column sums restricted to `rows`.
fn col_sums(matrix: &ObservationMatrix, rows: &[usize], out: &mut [f64]) {
    out.fill(0.0);
    for &i in rows {
        for (acc, v) in out.iter_mut().zip(matrix.row(i)) {
            *acc += v;
        }
    }
}

/// Row sums restricted to `cols`, for every row.
fn row_sums(matrix: &ObservationMatrix, cols: &[usize], out: &mut [f64]) {
    for (i, acc) in out.iter_mut().enumerate() {
        let row = matrix.row(i);
        *acc = cols.iter().map(|&j| row[j]).sum();
    }
}

/// Indices of the k largest sums, ties to the lowest index, returned sorted.
/// Partial selection, O(len) expected.
fn top_k(sums: &[f64], k: usize) -> Vec<usize> {
    debug_assert!(k >= 1 && k <= sums.len());
    let mut idx: Vec<usize> = (0..sums.len()).collect();
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, |&a, &b| {
            sums[b].partial_cmp(&sums[a]).unwrap().then(a.cmp(&b))
        });
        idx.truncate(k);
    }
    idx.sort_unstable();
    idx
}

struct RestartOutcome {
    restart: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    block_sum: f64,
}

fn run_restart(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    cfg: &SearchConfig,
    restart: usize,
    search_seed: u64,
) -> Result<RestartOutcome> {
    let mut rng = stream_rng(search_seed, restart as u64);
    let mut rows: Vec<usize> =
        rand::seq::index::sample(&mut rng, matrix.rows(), shape.sub_rows).into_vec();
    rows.sort_unstable();

    let mut col_acc = vec![0.0; matrix.cols()];
    let mut row_acc = vec![0.0; matrix.rows()];
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..cfg.max_iterations {
        col_sums(matrix, &rows, &mut col_acc);
        let cols = top_k(&col_acc, shape.sub_cols);
        row_sums(matrix, &cols, &mut row_acc);
        rows = top_k(&row_acc, shape.sub_rows);
        let block_sum: f64 = rows.iter().map(|&i| row_acc[i]).sum();
        // Each half-step maximizes the block sum given the other side, so the
        // sum cannot decrease (up to float noise in the re-accumulation).
        debug_assert!(
            block_sum >= prev - 1e-9 * (1.0 + prev.abs()),
            "alternating step decreased the block sum: {prev} -> {block_sum}"
        );
        if block_sum > prev {
            prev = block_sum;
        } else {
            return Ok(RestartOutcome {
                restart,
                rows,
                cols,
                block_sum,
            });
        }
    }
    Err(Error::MaxIterationsExceeded {
        restart,
        max_iterations: cfg.max_iterations,
    })
}

/// Prefer higher block sum; break ties toward the earlier restart so the
/// reduction is scheduling-independent.
fn better(a: RestartOutcome, b: RestartOutcome) -> RestartOutcome {
    if (b.block_sum, a.restart) > (a.block_sum, b.restart) {
        b
    } else {
        a
    }
}

/// Randomized alternating maximization of Y_C with K restarts.
///
/// Each restart draws n rows uniformly at random, then alternates between
/// selecting the m columns with the largest column sums over the current rows
/// and the n rows with the largest row sums over the current columns, until
/// the block sum stops strictly increasing. Restarts run in parallel on
/// independent counter-based streams; the result is deterministic in the seed.
pub fn alternating_search(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    validate_shape(matrix, shape)?;
    cfg.validate()?;
    let search_seed = derive_seed(cfg.seed, StreamKind::SearchRestart, 0);
    let best = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(matrix, shape, cfg, r, search_seed))
        .try_reduce_with(|a, b| Ok(better(a, b)))
        .expect("restarts >= 1")?;
    let support = SubmatrixSupport::new(best.rows, best.cols)?;
    let score = submatrix_score(matrix, &support)?;
    Ok(SearchResult {
        support,
        score,
        restarts_used: cfg.restarts,
        converged: true,
    })
}

fn first_combination(k: usize) -> Vec<usize> {
    (0..k).collect()
}

/// Advances `combo` to the next k-combination of {0..n-1} in lexicographic
/// order. Returns false after the last one.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] != i + n - k {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Number of candidate supports C(N, n) * C(M, m), or BudgetExceeded.
pub fn count_supports(shape: &ProblemShape, budget: u128) -> Result<u128> {
    let over = || Error::BudgetExceeded {
        count: u128::MAX,
        budget,
    };
    let rows = binomial_capped(shape.rows as u64, shape.sub_rows as u64, u128::MAX).ok_or_else(over)?;
    let cols = binomial_capped(shape.cols as u64, shape.sub_cols as u64, u128::MAX).ok_or_else(over)?;
    let count = rows.checked_mul(cols).ok_or_else(over)?;
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    Ok(count)
}

/// Visits every candidate support in lexicographic (rows, cols) order with
/// its fast block sum. Shared by the exact scan and the likelihood ratio.
pub(crate) fn for_each_support(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    budget: u128,
    mut visit: impl FnMut(f64, &[usize], &[usize]),
) -> Result<()> {
    validate_shape(matrix, shape)?;
    count_supports(shape, budget)?;

    let mut rows = first_combination(shape.sub_rows);
    let mut col_acc = vec![0.0; matrix.cols()];
    loop {
        col_sums(matrix, &rows, &mut col_acc);
        let mut cols = first_combination(shape.sub_cols);
        loop {
            let block_sum: f64 = cols.iter().map(|&j| col_acc[j]).sum();
            visit(block_sum, &rows, &cols);
            if !next_combination(&mut cols, matrix.cols()) {
                break;
            }
        }
        if !next_combination(&mut rows, matrix.rows()) {
            break;
        }
    }
    Ok(())
}

/// Exact maximizer of Y_C by full enumeration, ties broken lowest-index-first.
pub fn brute_force_max(
    matrix: &ObservationMatrix,
    shape: &ProblemShape,
    budget: u128,
) -> Result<SearchResult> {
    let mut best_sum = f64::NEG_INFINITY;
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    for_each_support(matrix, shape, budget, |sum, rows, cols| {
        // Strict improvement keeps the lexicographically first maximizer.
        if sum > best_sum {
            best_sum = sum;
            best = Some((rows.to_vec(), cols.to_vec()));
        }
    })?;
    let (rows, cols) = best.expect("at least one support");
    let support = SubmatrixSupport::new(rows, cols)?;
    let score = submatrix_score(matrix, &support)?;
    Ok(SearchResult {
        support,
        score,
        restarts_used: 0,
        converged: true,
    })
}
