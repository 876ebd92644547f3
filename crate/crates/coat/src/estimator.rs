//! The composition-adjusted thresholding estimator.
//!
//! The estimator thresholds the sample clr covariance entry-wise with
//! adaptive thresholds `lambda * sqrt(theta_ij)`, where `theta_ij` is the
//! divisor-`n` dispersion of the products entering each covariance entry.

use crate::composition::{CompositionMatrix, CovKind, CovMatrix};
use crate::error::Result;
use crate::mat::Mat;
use crate::num::Real;
use crate::stats;
use crate::threshold::ThresholdRule;

/// Entry-wise dispersion estimates `theta_ij` used to scale thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix<F> {
    values: Mat<F>,
}

impl<F: Real> ThetaMatrix<F> {
    pub(crate) fn from_mat(values: Mat<F>) -> Self {
        debug_assert!(values.is_square());
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.rows()
    }

    pub fn values(&self) -> &Mat<F> {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.values[(i, j)]
    }
}

/// Result of one thresholding fit.
#[derive(Debug, Clone)]
pub struct CoatEstimate<F> {
    /// The sparse basis-covariance estimate.
    pub omega_hat: CovMatrix<F>,
    /// Tuning parameter the thresholds were scaled by.
    pub lambda: F,
    pub rule: ThresholdRule,
    /// Dispersions that defined the entry-wise thresholds.
    pub theta: ThetaMatrix<F>,
    /// Nonzero off-diagonal entries in the estimate.
    pub nnz_offdiag: usize,
}

/// Estimator switches beyond the tuning parameter.
#[derive(Debug, Clone, Copy, Default)]
pub struct CoatOptions {
    /// Exempt the diagonal from thresholding. Off by default: the estimator
    /// definition thresholds every entry, diagonal included.
    pub preserve_diagonal: bool,
}

/// Dispersion of the clr covariance summands:
/// `theta_ij = mean_k((g_kij - gamma_ij)^2)` with
/// `g_kij = (g_ki - gbar_i)(g_kj - gbar_j)`, divisor `n`.
pub fn estimate_theta<F: Real>(x: &CompositionMatrix<F>) -> ThetaMatrix<F> {
    let scores = x.clr_scores();
    let (_, theta) = stats::cov_and_theta_n(&scores);
    ThetaMatrix::from_mat(theta)
}

/// The full estimator: threshold the sample clr covariance at
/// `lambda * sqrt(theta_ij)`.
pub fn coat<F: Real>(
    x: &CompositionMatrix<F>,
    lambda: F,
    rule: ThresholdRule,
) -> Result<CoatEstimate<F>> {
    coat_with_options(x, lambda, rule, CoatOptions::default())
}

/// [`coat`] with explicit options.
pub fn coat_with_options<F: Real>(
    x: &CompositionMatrix<F>,
    lambda: F,
    rule: ThresholdRule,
    options: CoatOptions,
) -> Result<CoatEstimate<F>> {
    rule.validate()?;
    if lambda < F::zero() {
        return Err(crate::error::CoatError::Config(format!(
            "tuning parameter must be nonnegative, got {lambda}"
        )));
    }
    let scores = x.clr_scores();
    let (gamma, theta) = stats::cov_and_theta_n(&scores);
    let (omega, nnz) = threshold_matrix(&gamma, &theta, lambda, rule, options.preserve_diagonal);
    Ok(CoatEstimate {
        omega_hat: CovMatrix::new(omega, CovKind::Basis)?,
        lambda,
        rule,
        theta: ThetaMatrix::from_mat(theta),
        nnz_offdiag: nnz,
    })
}

/// Threshold a symmetric estimate entry-wise at `lambda * sqrt(theta_ij)`.
///
/// Returns the thresholded matrix and its off-diagonal nonzero count.
/// A zero dispersion leaves the entry untouched: its threshold is zero.
pub(crate) fn threshold_matrix<F: Real>(
    estimate: &Mat<F>,
    theta: &Mat<F>,
    lambda: F,
    rule: ThresholdRule,
    preserve_diagonal: bool,
) -> (Mat<F>, usize) {
    let p = estimate.rows();
    let mut out = Mat::zeros(p, p);
    let mut nnz = 0;
    for i in 0..p {
        for j in i..p {
            let v = if preserve_diagonal && i == j {
                estimate[(i, j)]
            } else {
                rule.apply(estimate[(i, j)], lambda * theta[(i, j)].sqrt())
            };
            out[(i, j)] = v;
            out[(j, i)] = v;
            if i != j && v != F::zero() {
                nnz += 2;
            }
        }
    }
    (out, nnz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::{clr_cov_direct, CompositionMatrix};
    use crate::mat::Mat;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_composition(n: usize, p: usize, seed: u64) -> CompositionMatrix<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let values = Mat::from_fn(n, p, |_, _| rng.random_range(0.05..1.0));
        CompositionMatrix::normalize_unlabeled(values).unwrap()
    }

    #[test]
    fn theta_zero_for_identical_rows() {
        let values = Mat::from_rows(&[vec![0.25, 0.25, 0.5], vec![0.25, 0.25, 0.5]]).unwrap();
        let x = CompositionMatrix::normalize_unlabeled(values).unwrap();
        let theta = estimate_theta(&x);
        assert!(theta.values().norm_max() < 1e-15);
    }

    #[test]
    fn theta_invariant_under_sample_permutation() {
        let x = random_composition(12, 4, 9);
        let theta = estimate_theta(&x);
        let reversed: Vec<usize> = (0..12).rev().collect();
        let y = x.select_samples(&reversed).unwrap();
        let theta_rev = estimate_theta(&y);
        assert!(theta.values().max_abs_diff(theta_rev.values()) < 1e-12);
    }

    // For n=2 each centered score is +/- half the sample difference, so the
    // products are identical across k and theta must vanish; checked against
    // the same quantity enumerated by hand.
    #[test]
    fn theta_matches_hand_enumeration_for_two_samples() {
        let x = random_composition(2, 3, 4);
        let theta = estimate_theta(&x);
        let scores = x.clr_scores();
        for i in 0..3 {
            for j in 0..3 {
                let a1 = (scores[(0, i)] - scores[(1, i)]) / 2.0;
                let b1 = (scores[(0, j)] - scores[(1, j)]) / 2.0;
                // products are a1*b1 for k=0 and (-a1)(-b1) for k=1: equal.
                let gamma = a1 * b1;
                let dev0 = a1 * b1 - gamma;
                assert_relative_eq!(theta.get(i, j), dev0 * dev0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn zero_lambda_reproduces_clr_covariance() {
        let x = random_composition(20, 6, 1);
        let fit = coat(&x, 0.0, ThresholdRule::Hard).unwrap();
        let gamma = clr_cov_direct(&x).unwrap();
        assert!(fit.omega_hat.values().max_abs_diff(gamma.values()) < 1e-15);
    }

    #[test]
    fn huge_lambda_zeroes_everything() {
        let x = random_composition(20, 6, 2);
        let fit = coat(&x, 1e12, ThresholdRule::Hard).unwrap();
        assert_eq!(fit.omega_hat.values().norm_max(), 0.0);
        assert_eq!(fit.nnz_offdiag, 0);
    }

    #[test]
    fn sparsity_monotone_in_lambda() {
        let x = random_composition(40, 10, 3);
        let mut prev = usize::MAX;
        for lambda in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 4.0] {
            let fit = coat(&x, lambda, ThresholdRule::Soft).unwrap();
            assert!(fit.nnz_offdiag <= prev);
            prev = fit.nnz_offdiag;
        }
    }

    #[test]
    fn support_identical_across_rules() {
        let x = random_composition(40, 8, 5);
        let lambda = 0.3;
        let rules = [
            ThresholdRule::Hard,
            ThresholdRule::Soft,
            ThresholdRule::adaptive_lasso(2.0).unwrap(),
        ];
        let supports: Vec<Vec<bool>> = rules
            .iter()
            .map(|&rule| {
                let fit = coat(&x, lambda, rule).unwrap();
                let m = fit.omega_hat.values();
                let p = m.rows();
                let mut s = Vec::new();
                for i in 0..p {
                    for j in 0..p {
                        s.push(m[(i, j)] != 0.0);
                    }
                }
                s
            })
            .collect();
        assert_eq!(supports[0], supports[1]);
        assert_eq!(supports[0], supports[2]);
    }

    #[test]
    fn shrinkage_bounded_by_max_threshold() {
        let x = random_composition(30, 7, 6);
        let lambda = 0.4;
        for rule in [
            ThresholdRule::Hard,
            ThresholdRule::Soft,
            ThresholdRule::adaptive_lasso(3.0).unwrap(),
        ] {
            let fit = coat(&x, lambda, rule).unwrap();
            let gamma = clr_cov_direct(&x).unwrap();
            let max_theta = fit.theta.values().norm_max();
            let bound = lambda * max_theta.sqrt();
            let dev = fit.omega_hat.values().max_abs_diff(gamma.values());
            assert!(dev <= bound + 1e-12, "dev {dev} > bound {bound}");
        }
    }

    #[test]
    fn preserve_diagonal_option_keeps_variances() {
        let x = random_composition(20, 5, 7);
        let gamma = clr_cov_direct(&x).unwrap();
        let fit = coat_with_options(
            &x,
            1e12,
            ThresholdRule::Hard,
            CoatOptions {
                preserve_diagonal: true,
            },
        )
        .unwrap();
        for i in 0..5 {
            assert_relative_eq!(fit.omega_hat.get(i, i), gamma.get(i, i), epsilon = 1e-15);
        }
        assert_eq!(fit.nnz_offdiag, 0);
    }
}
