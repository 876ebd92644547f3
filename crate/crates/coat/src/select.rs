//! Tuning-parameter selection by V-fold cross-validation, with an optional
//! positive-definiteness constraint.
//!
//! The CV error for a grid point is the mean over folds of the squared
//! Frobenius distance between the thresholded training estimate and the
//! held-out fold's sample covariance. The held-out covariance uses the same
//! divisor-`n` convention as everything else; a single-sample fold would
//! yield a zero matrix, which the `n >= 2V` precondition rules out.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::composition::CompositionMatrix;
use crate::eigen;
use crate::error::{CoatError, Result};
use crate::mat::Mat;
use crate::num::{c, Real};
use crate::stats;
use crate::threshold::ThresholdRule;

/// Outcome of a cross-validation run over a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult<F> {
    /// The grid searched, strictly increasing.
    pub grid: Vec<F>,
    /// Mean CV error per grid point.
    pub errors: Vec<F>,
    /// Selected tuning parameter; ties break toward the larger value.
    pub chosen_lambda: F,
    /// Fold id of every sample.
    pub fold_assignment: Vec<usize>,
    /// Seed the fold shuffle was derived from.
    pub seed: u64,
    /// Set when the positive-definiteness constraint could not be met and
    /// the fallback (largest minimum eigenvalue) was used instead.
    pub pd_unattained: bool,
}

/// Default threshold grid for a composition: geometric between the 10th
/// percentile and just past the maximum of the threshold-normalized
/// magnitudes `|gamma_ij| / sqrt(theta_ij)` over `i < j`, plus the point 0.
pub fn default_lambda_grid<F: Real>(x: &CompositionMatrix<F>, size: usize) -> Vec<F> {
    let scores = x.clr_scores();
    lambda_grid_for_scores(&scores, size)
}

/// Grid recipe shared by every estimator flavor (see [`default_lambda_grid`]).
pub(crate) fn lambda_grid_for_scores<F: Real>(scores: &Mat<F>, size: usize) -> Vec<F> {
    let (s, theta) = stats::cov_and_theta_n(scores);
    let p = s.rows();
    let mut ratios = Vec::with_capacity(p * (p - 1) / 2);
    for i in 0..p {
        for j in (i + 1)..p {
            let th = theta[(i, j)];
            if th > F::zero() {
                let r = s[(i, j)].abs() / th.sqrt();
                if r.is_finite() && r > F::zero() {
                    ratios.push(r);
                }
            }
        }
    }
    if ratios.is_empty() || size == 0 {
        return vec![F::zero()];
    }
    let lo = stats::quantile(&ratios, 0.10);
    let hi = ratios.iter().fold(F::zero(), |a, &b| a.max(b)) * c::<F>(1.01);
    let lo = if lo > F::zero() { lo } else { hi * c::<F>(1e-3) };

    let mut grid = vec![F::zero()];
    if size == 1 || lo >= hi {
        grid.push(hi);
    } else {
        let log_lo = lo.ln();
        let step = (hi.ln() - log_lo) / c::<F>((size - 1) as f64);
        for k in 0..size {
            grid.push((log_lo + step * c::<F>(k as f64)).exp());
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup();
    grid
}

/// V-fold cross-validation of the thresholding estimator on a composition.
pub fn cross_validate<F: Real>(
    x: &CompositionMatrix<F>,
    grid: &[F],
    folds: usize,
    rule: ThresholdRule,
    seed: u64,
) -> Result<CvResult<F>> {
    cross_validate_rows(&x.clr_scores(), grid, folds, rule, seed)
}

/// Cross-validation over an arbitrary score matrix (one row per sample).
///
/// The clr transform is per-row, so restricting clr scores to a fold equals
/// computing them on the fold alone; the same engine therefore serves the
/// oracle and naive estimators in the simulation bench.
pub(crate) fn cross_validate_rows<F: Real>(
    scores: &Mat<F>,
    grid: &[F],
    folds: usize,
    rule: ThresholdRule,
    seed: u64,
) -> Result<CvResult<F>> {
    rule.validate()?;
    validate_grid(grid)?;
    let n = scores.rows();
    if folds < 2 {
        return Err(CoatError::Config(format!(
            "cross-validation needs at least 2 folds, got {folds}"
        )));
    }
    if n < 2 * folds {
        return Err(CoatError::Config(format!(
            "cross-validation with {folds} folds needs at least {} samples, got {n}",
            2 * folds
        )));
    }

    let fold_assignment = assign_folds(n, folds, seed);
    let fold_indices: Vec<Vec<usize>> = (0..folds)
        .map(|v| {
            (0..n)
                .filter(|&k| fold_assignment[k] == v)
                .collect::<Vec<_>>()
        })
        .collect();

    // Per-fold error curves computed independently, then reduced in fold
    // order so the result does not depend on scheduling.
    let per_fold: Vec<Vec<F>> = fold_indices
        .par_iter()
        .map(|test_idx| {
            let train_idx: Vec<usize> = (0..n).filter(|k| !test_idx.contains(k)).collect();
            let train = scores.select_rows(&train_idx);
            let test = scores.select_rows(test_idx);
            let (s_train, theta_train) = stats::cov_and_theta_n(&train);
            let s_test = stats::cov_n(&test);
            grid.iter()
                .map(|&lambda| {
                    let (omega, _) =
                        crate::estimator::threshold_matrix(&s_train, &theta_train, lambda, rule, false);
                    omega.sub(&s_test).norm_fro_sq()
                })
                .collect()
        })
        .collect();

    let inv_v = F::one() / c::<F>(folds as f64);
    let mut errors = vec![F::zero(); grid.len()];
    for fold_errors in &per_fold {
        for (e, &fe) in errors.iter_mut().zip(fold_errors) {
            *e += fe;
        }
    }
    for e in &mut errors {
        *e *= inv_v;
    }

    let chosen_lambda = argmin_prefer_larger(grid, &errors);
    Ok(CvResult {
        grid: grid.to_vec(),
        errors,
        chosen_lambda,
        fold_assignment,
        seed,
        pd_unattained: false,
    })
}

/// Cross-validation restricted to grid points whose full-data estimate is
/// positive definite.
///
/// When no grid point qualifies, falls back to the point with the largest
/// minimum eigenvalue and sets `pd_unattained`.
pub fn select_lambda_pd<F: Real>(
    x: &CompositionMatrix<F>,
    grid: &[F],
    folds: usize,
    rule: ThresholdRule,
    seed: u64,
) -> Result<CvResult<F>> {
    let mut cv = cross_validate(x, grid, folds, rule, seed)?;
    let scores = x.clr_scores();
    let (s_full, theta_full) = stats::cov_and_theta_n(&scores);

    let min_eigs: Vec<F> = grid
        .par_iter()
        .map(|&lambda| {
            let (omega, _) =
                crate::estimator::threshold_matrix(&s_full, &theta_full, lambda, rule, false);
            eigen::sym_eigenvalues(&omega).map(|v| v[0])
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(usize, F)> = None;
    for (idx, (&err, &me)) in cv.errors.iter().zip(&min_eigs).enumerate() {
        if me > F::zero() {
            let better = match best {
                None => true,
                Some((_, best_err)) => err <= best_err,
            };
            if better {
                best = Some((idx, err));
            }
        }
    }

    match best {
        Some((idx, _)) => {
            cv.chosen_lambda = grid[idx];
            cv.pd_unattained = false;
        }
        None => {
            let mut idx = 0;
            for k in 1..grid.len() {
                if min_eigs[k] >= min_eigs[idx] {
                    idx = k;
                }
            }
            cv.chosen_lambda = grid[idx];
            cv.pd_unattained = true;
        }
    }
    Ok(cv)
}

fn validate_grid<F: Real>(grid: &[F]) -> Result<()> {
    if grid.is_empty() {
        return Err(CoatError::Config("threshold grid is empty".into()));
    }
    for (k, &g) in grid.iter().enumerate() {
        if !(g >= F::zero()) || !g.is_finite() {
            return Err(CoatError::Config(format!(
                "grid point {k} is not a nonnegative finite number"
            )));
        }
        if k > 0 && !(g > grid[k - 1]) {
            return Err(CoatError::Config(
                "threshold grid must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

/// Seeded shuffle, then contiguous split as equal as possible; the first
/// `n mod folds` folds take the extra sample.
fn assign_folds(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let base = n / folds;
    let extra = n % folds;
    let mut assignment = vec![0usize; n];
    let mut pos = 0;
    for v in 0..folds {
        let size = base + usize::from(v < extra);
        for _ in 0..size {
            assignment[order[pos]] = v;
            pos += 1;
        }
    }
    assignment
}

fn argmin_prefer_larger<F: Real>(grid: &[F], errors: &[F]) -> F {
    let mut best_idx = 0;
    for k in 1..grid.len() {
        if errors[k] <= errors[best_idx] {
            best_idx = k;
        }
    }
    grid[best_idx]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::{clr_cov_direct, CompositionMatrix};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn random_composition(n: usize, p: usize, seed: u64) -> CompositionMatrix<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let values = Mat::from_fn(n, p, |_, _| rng.random_range(0.05..1.0));
        CompositionMatrix::normalize_unlabeled(values).unwrap()
    }

    #[test]
    fn folds_partition_every_sample() {
        let assignment = assign_folds(23, 5, 7);
        assert_eq!(assignment.len(), 23);
        let mut counts = [0usize; 5];
        for &v in &assignment {
            counts[v] += 1;
        }
        assert_eq!(counts.iter().sum::<usize>(), 23);
        assert_eq!(counts.iter().max().unwrap() - counts.iter().min().unwrap(), 1);
    }

    #[test]
    fn zero_grid_selects_zero_and_matches_unthresholded_error() {
        let x = random_composition(24, 5, 3);
        let cv = cross_validate(&x, &[0.0], 4, ThresholdRule::Hard, 11).unwrap();
        assert_eq!(cv.chosen_lambda, 0.0);

        // With lambda = 0 the training estimate is the training clr
        // covariance itself; recompute the error by hand.
        let scores = x.clr_scores();
        let n = x.n_samples();
        let mut expected = 0.0;
        for v in 0..4 {
            let test_idx: Vec<usize> = (0..n).filter(|&k| cv.fold_assignment[k] == v).collect();
            let train_idx: Vec<usize> = (0..n).filter(|&k| cv.fold_assignment[k] != v).collect();
            let s_train = stats::cov_n(&scores.select_rows(&train_idx));
            let s_test = stats::cov_n(&scores.select_rows(&test_idx));
            expected += s_train.sub(&s_test).norm_fro_sq();
        }
        expected /= 4.0;
        assert_relative_eq!(cv.errors[0], expected, epsilon = 1e-12);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let x = random_composition(30, 6, 4);
        let grid = default_lambda_grid(&x, 10);
        let a = cross_validate(&x, &grid, 5, ThresholdRule::Soft, 42).unwrap();
        let b = cross_validate(&x, &grid, 5, ThresholdRule::Soft, 42).unwrap();
        assert_eq!(a, b);
        let c = cross_validate(&x, &grid, 5, ThresholdRule::Soft, 43).unwrap();
        assert_ne!(a.fold_assignment, c.fold_assignment);
    }

    #[test]
    fn rejects_undersized_data() {
        let x = random_composition(10, 4, 5);
        assert!(matches!(
            cross_validate(&x, &[0.0], 6, ThresholdRule::Hard, 0),
            Err(CoatError::Config(_))
        ));
    }

    #[test]
    fn rejects_bad_grids() {
        let x = random_composition(20, 4, 5);
        let empty: [f64; 0] = [];
        assert!(cross_validate(&x, &empty, 2, ThresholdRule::Hard, 0).is_err());
        assert!(cross_validate(&x, &[0.1, 0.1], 2, ThresholdRule::Hard, 0).is_err());
        assert!(cross_validate(&x, &[-0.1, 0.1], 2, ThresholdRule::Hard, 0).is_err());
    }

    #[test]
    fn cv_errors_are_nonnegative() {
        let x = random_composition(40, 6, 8);
        let grid = default_lambda_grid(&x, 12);
        let cv = cross_validate(&x, &grid, 5, ThresholdRule::Hard, 2).unwrap();
        assert!(cv.errors.iter().all(|&e| e >= 0.0));
        assert!(cv.grid.contains(&cv.chosen_lambda));
    }

    #[test]
    fn default_grid_spans_empty_to_full_support() {
        let x = random_composition(40, 8, 9);
        let grid = default_lambda_grid(&x, 20);
        assert_eq!(grid[0], 0.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        // The top grid point zeroes every off-diagonal entry.
        let fit = crate::estimator::coat(&x, *grid.last().unwrap(), ThresholdRule::Hard).unwrap();
        assert_eq!(fit.nnz_offdiag, 0);
        // Lambda 0 keeps the dense clr covariance.
        let dense = crate::estimator::coat(&x, grid[0], ThresholdRule::Hard).unwrap();
        let gamma = clr_cov_direct(&x).unwrap();
        assert!(dense.omega_hat.values().max_abs_diff(gamma.values()) < 1e-15);
    }

    #[test]
    fn pd_selection_excludes_fully_thresholded_estimate() {
        let x = random_composition(60, 5, 10);
        let grid = default_lambda_grid(&x, 15);
        let cv = select_lambda_pd(&x, &grid, 5, ThresholdRule::Hard, 3).unwrap();
        // The zero matrix at the top of the grid has minimum eigenvalue 0,
        // so it can never be chosen while any PD candidate exists.
        if !cv.pd_unattained {
            let fit = crate::estimator::coat(&x, cv.chosen_lambda, ThresholdRule::Hard).unwrap();
            assert!(fit.omega_hat.min_eigenvalue().unwrap() > 0.0);
        }
    }

    #[test]
    fn pd_fallback_picks_largest_min_eigenvalue() {
        // Constant compositions: the clr covariance is exactly zero, so no
        // grid point is PD and the fallback fires; ties resolve to the
        // largest grid point.
        let row = vec![0.25, 0.25, 0.25, 0.25];
        let values = Mat::from_rows(&vec![row; 12]).unwrap();
        let x = CompositionMatrix::normalize_unlabeled(values).unwrap();
        let cv = select_lambda_pd(&x, &[0.0, 0.5, 1.0], 3, ThresholdRule::Hard, 3).unwrap();
        assert!(cv.pd_unattained);
        assert_eq!(cv.chosen_lambda, 1.0);
    }
}
