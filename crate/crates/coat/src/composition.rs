//! Compositional data types and the transforms between basis, composition,
//! log-ratio, and centered log-ratio representations.
//!
//! The centered log-ratio (clr) covariance can be built two ways: directly
//! as the sample covariance of clr scores, or by projecting the sample
//! variation matrix onto the subspace spanned by `alpha 1^T + 1 alpha^T` and
//! negating half the residual. Both routes agree entry-wise (to rounding)
//! because every variance here uses divisor `n`. Logs are natural logs; the
//! identities hold in any base but reported variances depend on this choice.

use crate::error::{CoatError, Result};
use crate::mat::Mat;
use crate::num::{c, Real};
use crate::stats;

/// Tag describing what a [`CovMatrix`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovKind {
    /// Covariance of the log-basis (the estimation target).
    Basis,
    /// Centered log-ratio covariance.
    Clr,
    /// Variation matrix of pairwise log-ratio variances.
    Variation,
    /// No structural guarantees beyond symmetry.
    Generic,
}

/// Observed compositions: `n` strictly positive rows on the unit simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionMatrix<F> {
    values: Mat<F>,
    sample_ids: Vec<String>,
    taxon_ids: Vec<String>,
}

impl<F: Real> CompositionMatrix<F> {
    /// Validate and wrap a matrix of proportions.
    ///
    /// Requires `n >= 2`, `p >= 2`, strictly positive entries, and rows
    /// summing to one within tolerance.
    pub fn new(values: Mat<F>, sample_ids: Vec<String>, taxon_ids: Vec<String>) -> Result<Self> {
        let (n, p) = (values.rows(), values.cols());
        if n < 2 || p < 2 {
            return Err(CoatError::Dimension(format!(
                "compositions need at least 2 samples and 2 taxa, got {n}x{p}"
            )));
        }
        if sample_ids.len() != n || taxon_ids.len() != p {
            return Err(CoatError::Dimension(format!(
                "id lengths ({}, {}) do not match data shape {n}x{p}",
                sample_ids.len(),
                taxon_ids.len()
            )));
        }
        let row_tol = F::scaled_tol(1e-12);
        for i in 0..n {
            let mut sum = F::zero();
            for j in 0..p {
                let v = values[(i, j)];
                if !(v > F::zero()) || !v.is_finite() {
                    return Err(CoatError::NonPositiveEntry {
                        row: i,
                        col: j,
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
                sum += v;
            }
            if (sum - F::one()).abs() > row_tol {
                return Err(CoatError::RowSumInvalid {
                    row: i,
                    sum: sum.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self {
            values,
            sample_ids,
            taxon_ids,
        })
    }

    /// Normalize each row to unit sum, then validate.
    ///
    /// Rejects rows containing non-positive entries before dividing.
    pub fn normalize(values: Mat<F>, sample_ids: Vec<String>, taxon_ids: Vec<String>) -> Result<Self> {
        let (n, p) = (values.rows(), values.cols());
        let mut normalized = values;
        for i in 0..n {
            let mut sum = F::zero();
            for j in 0..p {
                let v = normalized[(i, j)];
                if !(v > F::zero()) || !v.is_finite() {
                    return Err(CoatError::NonPositiveEntry {
                        row: i,
                        col: j,
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
                sum += v;
            }
            for j in 0..p {
                normalized[(i, j)] = normalized[(i, j)] / sum;
            }
        }
        Self::new(normalized, sample_ids, taxon_ids)
    }

    /// Normalize with generated `sample_k` / `taxon_j` labels.
    pub fn normalize_unlabeled(values: Mat<F>) -> Result<Self> {
        let (n, p) = (values.rows(), values.cols());
        Self::normalize(values, default_sample_ids(n), default_taxon_ids(p))
    }

    pub fn n_samples(&self) -> usize {
        self.values.rows()
    }

    pub fn n_taxa(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Mat<F> {
        &self.values
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn taxon_ids(&self) -> &[String] {
        &self.taxon_ids
    }

    /// Centered log-ratio scores: `log x_kj` minus the row mean of logs.
    ///
    /// The geometric mean enters as `exp(mean of logs)`, so only the mean
    /// is ever formed; no product can overflow.
    pub fn clr_scores(&self) -> Mat<F> {
        let (n, p) = (self.values.rows(), self.values.cols());
        let inv_p = F::one() / c::<F>(p as f64);
        let mut scores = Mat::zeros(n, p);
        for k in 0..n {
            let mut mean_log = F::zero();
            for j in 0..p {
                let l = self.values[(k, j)].ln();
                scores[(k, j)] = l;
                mean_log += l;
            }
            mean_log *= inv_p;
            for j in 0..p {
                scores[(k, j)] -= mean_log;
            }
        }
        scores
    }

    /// Natural log of every entry.
    pub fn log_values(&self) -> Mat<F> {
        self.values.map(|v| v.ln())
    }

    /// New composition keeping the listed samples, in order.
    pub fn select_samples(&self, indices: &[usize]) -> Result<Self> {
        let values = self.values.select_rows(indices);
        let sample_ids = indices.iter().map(|&i| self.sample_ids[i].clone()).collect();
        Self::new(values, sample_ids, self.taxon_ids.clone())
    }
}

pub(crate) fn default_sample_ids(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("sample_{k}")).collect()
}

pub(crate) fn default_taxon_ids(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("taxon_{j}")).collect()
}

/// Symmetric `p x p` covariance-like matrix with a structural tag.
///
/// Construction validates symmetry (then symmetrizes exactly), and per-kind
/// structure: variation matrices have a zero diagonal and nonnegative
/// entries, clr covariances have zero row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix<F> {
    values: Mat<F>,
    kind: CovKind,
}

impl<F: Real> CovMatrix<F> {
    pub fn new(mut values: Mat<F>, kind: CovKind) -> Result<Self> {
        if !values.is_square() {
            return Err(CoatError::Dimension(format!(
                "covariance matrix must be square, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        if !values.all_finite() {
            return Err(CoatError::Domain("non-finite covariance entry".into()));
        }
        let p = values.rows();
        let sym_tol = F::scaled_tol(1e-10) * F::one().max(values.norm_max());
        for i in 0..p {
            for j in (i + 1)..p {
                let delta = (values[(i, j)] - values[(j, i)]).abs();
                if delta > sym_tol {
                    return Err(CoatError::NotSymmetric {
                        i,
                        j,
                        delta: delta.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        values.symmetrize();

        match kind {
            CovKind::Variation => {
                let tol = F::scaled_tol(1e-10) * F::one().max(values.norm_max());
                for i in 0..p {
                    for j in 0..p {
                        let v = values[(i, j)];
                        if i == j {
                            if v.abs() > tol {
                                return Err(CoatError::Domain(format!(
                                    "variation matrix diagonal entry [{i}] = {v} is not zero"
                                )));
                            }
                            values[(i, j)] = F::zero();
                        } else if v < -tol {
                            return Err(CoatError::Domain(format!(
                                "variation matrix entry [{i}][{j}] = {v} is negative"
                            )));
                        } else if v < F::zero() {
                            values[(i, j)] = F::zero();
                        }
                    }
                }
            }
            CovKind::Clr => {
                let tol = F::scaled_tol(1e-8) * F::one().max(values.norm_max());
                for i in 0..p {
                    let sum: F = (0..p).map(|j| values[(i, j)]).sum();
                    if sum.abs() > tol {
                        return Err(CoatError::Domain(format!(
                            "clr covariance row {i} sums to {sum}, expected zero"
                        )));
                    }
                }
            }
            CovKind::Basis | CovKind::Generic => {}
        }

        Ok(Self { values, kind })
    }

    pub fn dim(&self) -> usize {
        self.values.rows()
    }

    pub fn kind(&self) -> CovKind {
        self.kind
    }

    pub fn values(&self) -> &Mat<F> {
        &self.values
    }

    pub fn into_values(self) -> Mat<F> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.values[(i, j)]
    }

    /// Smallest eigenvalue, via the Jacobi solver.
    pub fn min_eigenvalue(&self) -> Result<F> {
        crate::eigen::min_eigenvalue(&self.values)
    }
}

/// The length-`p` vector `alpha` defining the rank-2 component
/// `alpha 1^T + 1 alpha^T` extracted from a variation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank2Component<F> {
    pub alpha: Vec<F>,
}

impl<F: Real> Rank2Component<F> {
    /// Materialize `alpha 1^T + 1 alpha^T` (symmetric by construction).
    pub fn induced(&self) -> Mat<F> {
        let p = self.alpha.len();
        Mat::from_fn(p, p, |i, j| self.alpha[i] + self.alpha[j])
    }
}

/// Sample clr covariance: `gamma_ij = mean_k((g_ki - gbar_i)(g_kj - gbar_j))`
/// over the clr scores `g`, with divisor `n`.
pub fn clr_cov_direct<F: Real>(x: &CompositionMatrix<F>) -> Result<CovMatrix<F>> {
    let scores = x.clr_scores();
    CovMatrix::new(stats::cov_n(&scores), CovKind::Clr)
}

/// Sample variation matrix: for each pair, the divisor-`n` variance of the
/// pairwise log-ratios `log(x_ki / x_kj)` across samples.
pub fn variation_matrix<F: Real>(x: &CompositionMatrix<F>) -> Result<CovMatrix<F>> {
    let logs = x.log_values();
    let (n, p) = (logs.rows(), logs.cols());
    let inv_n = F::one() / c::<F>(n as f64);
    let mut t = Mat::zeros(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let mut mean = F::zero();
            for k in 0..n {
                mean += logs[(k, i)] - logs[(k, j)];
            }
            mean *= inv_n;
            let mut var = F::zero();
            for k in 0..n {
                let d = logs[(k, i)] - logs[(k, j)] - mean;
                var += d * d;
            }
            var *= inv_n;
            t[(i, j)] = var;
            t[(j, i)] = var;
        }
    }
    CovMatrix::new(t, CovKind::Variation)
}

/// Project a variation matrix onto the rank-2 subspace:
/// `alpha_i = (row mean)_i - (grand mean) / 2`.
pub fn rank2_project<F: Real>(t: &CovMatrix<F>) -> Result<Rank2Component<F>> {
    if t.kind() != CovKind::Variation {
        return Err(CoatError::Domain(format!(
            "rank-2 projection expects a variation matrix, got {:?}",
            t.kind()
        )));
    }
    let p = t.dim();
    let inv_p = F::one() / c::<F>(p as f64);
    let row_means: Vec<F> = (0..p)
        .map(|i| (0..p).map(|j| t.get(i, j)).sum::<F>() * inv_p)
        .collect();
    let grand = row_means.iter().copied().sum::<F>() * inv_p;
    let half = c::<F>(0.5);
    let alpha = row_means.iter().map(|&m| m - grand * half).collect();
    Ok(Rank2Component { alpha })
}

/// Residual of the rank-2 projection, negated and halved:
/// `gamma_ij = -(tau_ij - alpha_i - alpha_j) / 2`.
pub fn clr_from_variation<F: Real>(
    t: &CovMatrix<F>,
    alpha: &Rank2Component<F>,
) -> Result<CovMatrix<F>> {
    let p = t.dim();
    if alpha.alpha.len() != p {
        return Err(CoatError::Dimension(format!(
            "alpha has length {}, expected {p}",
            alpha.alpha.len()
        )));
    }
    let neg_half = -c::<F>(0.5);
    let gamma = Mat::from_fn(p, p, |i, j| {
        (t.get(i, j) - alpha.alpha[i] - alpha.alpha[j]) * neg_half
    });
    CovMatrix::new(gamma, CovKind::Clr)
}

/// The clr covariance obtained through the variation matrix.
///
/// Agrees with [`clr_cov_direct`] entry-wise up to rounding.
pub fn clr_cov_via_variation<F: Real>(x: &CompositionMatrix<F>) -> Result<CovMatrix<F>> {
    let t = variation_matrix(x)?;
    let alpha = rank2_project(&t)?;
    clr_from_variation(&t, &alpha)
}

/// Population transform from a basis covariance to its clr counterpart:
/// `gamma_ij = omega_ij - rowmean_i - rowmean_j + grandmean`.
pub fn basis_to_clr_population<F: Real>(omega: &CovMatrix<F>) -> Result<CovMatrix<F>> {
    let p = omega.dim();
    let inv_p = F::one() / c::<F>(p as f64);
    let row_means: Vec<F> = (0..p)
        .map(|i| (0..p).map(|j| omega.get(i, j)).sum::<F>() * inv_p)
        .collect();
    let grand = row_means.iter().copied().sum::<F>() * inv_p;
    let gamma = Mat::from_fn(p, p, |i, j| {
        omega.get(i, j) - row_means[i] - row_means[j] + grand
    });
    CovMatrix::new(gamma, CovKind::Clr)
}

/// Population variation matrix of a basis covariance:
/// `tau_ij = omega_ii + omega_jj - 2 omega_ij`, zero diagonal.
pub fn variation_matrix_population<F: Real>(omega: &CovMatrix<F>) -> Result<CovMatrix<F>> {
    let p = omega.dim();
    let two = c::<F>(2.0);
    let t = Mat::from_fn(p, p, |i, j| {
        if i == j {
            F::zero()
        } else {
            omega.get(i, i) + omega.get(j, j) - two * omega.get(i, j)
        }
    });
    CovMatrix::new(t, CovKind::Variation)
}

/// Pair of distinct basis covariances sharing one variation matrix.
///
/// Block construction with `p1 = floor((p-1)/2)`, `p2 = p - 1 - p1`: the
/// first matrix couples coordinate 0 to the first block with weight `c`,
/// the second couples it to the second block with weight `-c`. Requires
/// `p >= 5` and `0 < |c| < 1`; the two matrices differ by `2c` in max norm
/// yet map to exactly equal variation matrices, which is why basis
/// covariances are unidentifiable without a sparsity cap.
pub fn prop2_counterexample<F: Real>(p: usize, coupling: F) -> Result<(CovMatrix<F>, CovMatrix<F>)> {
    if p < 5 {
        return Err(CoatError::Domain(format!(
            "counterexample construction requires p >= 5, got {p}"
        )));
    }
    if !(coupling.abs() > F::zero() && coupling.abs() < F::one()) {
        return Err(CoatError::Domain(format!(
            "coupling must satisfy 0 < |c| < 1, got {coupling}"
        )));
    }
    let p1 = (p - 1) / 2;
    // Block 1 occupies columns 1..=p1, block 2 the rest.
    let omega1 = Mat::from_fn(p, p, |i, j| {
        if i == j {
            if i == 0 {
                F::one() + coupling
            } else {
                F::one()
            }
        } else if (i == 0 && (1..=p1).contains(&j)) || (j == 0 && (1..=p1).contains(&i)) {
            coupling
        } else {
            F::zero()
        }
    });
    let omega2 = Mat::from_fn(p, p, |i, j| {
        if i == j {
            if i == 0 {
                F::one() - coupling
            } else {
                F::one()
            }
        } else if (i == 0 && j > p1) || (j == 0 && i > p1) {
            -coupling
        } else {
            F::zero()
        }
    });
    Ok((
        CovMatrix::new(omega1, CovKind::Basis)?,
        CovMatrix::new(omega2, CovKind::Basis)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    pub(crate) fn random_composition(n: usize, p: usize, seed: u64) -> CompositionMatrix<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let values = Mat::from_fn(n, p, |_, _| rng.random_range(0.05..1.0));
        CompositionMatrix::normalize_unlabeled(values).unwrap()
    }

    #[test]
    fn rejects_non_positive_entries() {
        let values = Mat::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        let err = CompositionMatrix::new(
            values,
            default_sample_ids(2),
            default_taxon_ids(2),
        )
        .unwrap_err();
        match err {
            CoatError::NonPositiveEntry { row, col, .. } => {
                assert_eq!((row, col), (1, 0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_row_sums() {
        let values = Mat::from_rows(&[vec![0.5, 0.6], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            CompositionMatrix::new(values, default_sample_ids(2), default_taxon_ids(2)),
            Err(CoatError::RowSumInvalid { row: 0, .. })
        ));
    }

    #[test]
    fn identical_rows_give_zero_clr_covariance() {
        let row = vec![0.2, 0.3, 0.5];
        let values = Mat::from_rows(&[row.clone(), row]).unwrap();
        let x = CompositionMatrix::new(values, default_sample_ids(2), default_taxon_ids(3)).unwrap();
        let gamma = clr_cov_direct(&x).unwrap();
        assert!(gamma.values().norm_max() < 1e-15);
        let t = variation_matrix(&x).unwrap();
        assert!(t.values().norm_max() < 1e-15);
    }

    // For p = 2 the clr covariance collapses to a single log-ratio variance:
    // gamma_11 = gamma_22 = -gamma_12 = var_n(log(x1/x2)) / 4.
    #[test]
    fn two_taxa_clr_matches_scalar_expansion() {
        let x = random_composition(7, 2, 11);
        let gamma = clr_cov_direct(&x).unwrap();
        let n = x.n_samples();
        let ratios: Vec<f64> = (0..n)
            .map(|k| (x.values()[(k, 0)] / x.values()[(k, 1)]).ln())
            .collect();
        let mean = ratios.iter().sum::<f64>() / n as f64;
        let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64;
        assert_relative_eq!(gamma.get(0, 0), var / 4.0, epsilon = 1e-12);
        assert_relative_eq!(gamma.get(1, 1), var / 4.0, epsilon = 1e-12);
        assert_relative_eq!(gamma.get(0, 1), -var / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn two_taxa_variation_matches_scalar_variance() {
        // Log-ratios {0, 2}: divisor-2 variance is 1.
        let e2 = 2.0_f64.exp();
        let values = Mat::from_rows(&[
            vec![0.5, 0.5],
            vec![e2 / (1.0 + e2), 1.0 / (1.0 + e2)],
        ])
        .unwrap();
        let x = CompositionMatrix::new(values, default_sample_ids(2), default_taxon_ids(2)).unwrap();
        let t = variation_matrix(&x).unwrap();
        assert_relative_eq!(t.get(0, 1), 1.0, epsilon = 1e-12);
        assert_eq!(t.get(0, 0), 0.0);
    }

    #[test]
    fn route_equivalence_on_seeded_data() {
        let x = random_composition(50, 10, 42);
        let direct = clr_cov_direct(&x).unwrap();
        let via = clr_cov_via_variation(&x).unwrap();
        assert!(direct.values().max_abs_diff(via.values()) < 1e-10);
    }

    #[test]
    fn clr_rows_sum_to_zero() {
        let x = random_composition(30, 8, 7);
        let gamma = clr_cov_direct(&x).unwrap();
        let p = gamma.dim();
        for i in 0..p {
            let sum: f64 = (0..p).map(|j| gamma.get(i, j)).sum();
            assert!(sum.abs() < 1e-12, "row {i} sums to {sum}");
        }
    }

    #[test]
    fn rank2_of_zero_matrix_is_zero() {
        let t = CovMatrix::new(Mat::zeros(4, 4), CovKind::Variation).unwrap();
        let alpha = rank2_project(&t).unwrap();
        assert!(alpha.alpha.iter().all(|&a| a == 0.0));
    }

    // Constant off-diagonal c: row mean c(p-1)/p, grand mean c(p-1)/p,
    // so alpha_i = c(p-1)/(2p) for every i.
    #[test]
    fn rank2_of_constant_offdiagonal_has_closed_form() {
        let p = 6;
        let cval = 1.7;
        let t = CovMatrix::new(
            Mat::from_fn(p, p, |i, j| if i == j { 0.0 } else { cval }),
            CovKind::Variation,
        )
        .unwrap();
        let alpha = rank2_project(&t).unwrap();
        let expected = cval * (p as f64 - 1.0) / (2.0 * p as f64);
        for a in alpha.alpha {
            assert_relative_eq!(a, expected, epsilon = 1e-14);
        }
    }

    // The residual -(T - alpha 1^T - 1 alpha^T)/2 has zero row sums, so it is
    // Frobenius-orthogonal to every matrix of the form beta 1^T + 1 beta^T.
    #[test]
    fn rank2_residual_is_orthogonal_to_subspace() {
        let x = random_composition(25, 9, 3);
        let t = variation_matrix(&x).unwrap();
        let alpha = rank2_project(&t).unwrap();
        let residual = clr_from_variation(&t, &alpha).unwrap();
        let p = t.dim();
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for _ in 0..20 {
            let beta: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut inner = 0.0;
            for i in 0..p {
                for j in 0..p {
                    inner += (beta[i] + beta[j]) * residual.get(i, j);
                }
            }
            assert!(inner.abs() < 1e-9, "inner product {inner}");
        }
    }

    #[test]
    fn population_clr_of_identity_shifts_by_inverse_p() {
        for p in [4, 10, 50] {
            let omega = CovMatrix::new(Mat::identity(p), CovKind::Basis).unwrap();
            let gamma = basis_to_clr_population(&omega).unwrap();
            let gap = omega.values().max_abs_diff(gamma.values());
            assert_relative_eq!(gap, 1.0 / p as f64, epsilon = 1e-14);
        }
    }

    #[test]
    fn population_clr_annihilates_constant_matrix() {
        let p = 8;
        let omega = CovMatrix::new(Mat::from_fn(p, p, |_, _| 1.0), CovKind::Basis).unwrap();
        let gamma = basis_to_clr_population(&omega).unwrap();
        assert!(gamma.values().norm_max() < 1e-14);
    }

    #[test]
    fn population_variation_of_identity() {
        let omega = CovMatrix::new(Mat::identity(5), CovKind::Basis).unwrap();
        let t = variation_matrix_population(&omega).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expected = if i == j { 0.0 } else { 2.0 };
                assert_eq!(t.get(i, j), expected);
            }
        }
    }

    #[test]
    fn population_variation_of_diagonal() {
        let omega = CovMatrix::new(
            Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 4.0]]).unwrap(),
            CovKind::Basis,
        )
        .unwrap();
        let t = variation_matrix_population(&omega).unwrap();
        assert_eq!(t.get(0, 1), 5.0);
    }

    #[test]
    fn counterexample_pair_shares_variation_matrix() {
        for (p, cval) in [(7usize, 0.5), (5, 0.9)] {
            let (o1, o2) = prop2_counterexample::<f64>(p, cval).unwrap();
            let t1 = variation_matrix_population(&o1).unwrap();
            let t2 = variation_matrix_population(&o2).unwrap();
            assert!(t1.values().max_abs_diff(t2.values()) < 1e-14);
            let gap = o1.values().max_abs_diff(o2.values());
            assert_relative_eq!(gap, 2.0 * cval, epsilon = 1e-14);
        }
    }

    #[test]
    fn counterexample_rejects_small_p() {
        assert!(matches!(
            prop2_counterexample::<f64>(4, 0.5),
            Err(CoatError::Domain(_))
        ));
    }

    #[test]
    fn clr_invariant_under_row_rescaling() {
        let x = random_composition(20, 6, 5);
        let gamma = clr_cov_direct(&x).unwrap();
        // Scale each raw row by an arbitrary positive factor, renormalize.
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let scaled = Mat::from_fn(20, 6, |k, j| x.values()[(k, j)]);
        let mut scaled = scaled;
        for k in 0..20 {
            let f: f64 = rng.random_range(0.1..10.0);
            for j in 0..6 {
                scaled[(k, j)] *= f;
            }
        }
        let y = CompositionMatrix::normalize_unlabeled(scaled).unwrap();
        let gamma2 = clr_cov_direct(&y).unwrap();
        assert!(gamma.values().max_abs_diff(gamma2.values()) < 1e-10);
    }

    #[test]
    fn clr_equivariant_under_taxon_permutation() {
        let x = random_composition(15, 5, 23);
        let gamma = clr_cov_direct(&x).unwrap();
        let perm = [3usize, 0, 4, 1, 2];
        let permuted = Mat::from_fn(15, 5, |k, j| x.values()[(k, perm[j])]);
        let y = CompositionMatrix::normalize_unlabeled(permuted).unwrap();
        let gamma_p = clr_cov_direct(&y).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_relative_eq!(
                    gamma_p.get(i, j),
                    gamma.get(perm[i], perm[j]),
                    epsilon = 1e-12
                );
            }
        }
    }
}
