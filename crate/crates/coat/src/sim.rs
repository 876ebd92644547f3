//! Monte Carlo benchmark: data generators, competing estimators, loss and
//! support metrics, ROC curves, and the spurious-correlation study.
//!
//! Replications are independent jobs keyed by `(seed, rep)`: each draws its
//! randomness from its own ChaCha stream, so results are identical for any
//! thread count and aggregation happens in replication order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::composition::{CompositionMatrix, CovKind, CovMatrix};
use crate::eigen;
use crate::error::{CoatError, Result};
use crate::mat::Mat;
use crate::num::{c, Real};
use crate::select::{cross_validate_rows, lambda_grid_for_scores};
use crate::stats;
use crate::threshold::ThresholdRule;

/// Shape of the true basis covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovModel {
    /// Identity covariance; every off-diagonal correlation is spurious.
    Identity,
    /// Two-block sparse covariance: a random sparse block of size
    /// `floor(2 sqrt(p))` made positive definite, then `4 I` for the rest.
    SparseBlock,
}

/// Distribution of the log-basis draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseDist {
    Normal,
    /// Scaled gamma factors: skewed marginals with the same covariance.
    Gamma,
}

/// One benchmark scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub model: CovModel,
    pub dist: BaseDist,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub reps: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(CoatError::Config(format!(
                "need at least 2 samples, got {}",
                self.n
            )));
        }
        if self.p < 5 {
            return Err(CoatError::Config(format!(
                "need at least 5 taxa, got {}",
                self.p
            )));
        }
        if self.reps < 1 {
            return Err(CoatError::Config("need at least 1 replication".into()));
        }
        Ok(())
    }
}

/// Competing estimators in the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Thresholded clr covariance (the estimator under study).
    Coat,
    /// Thresholded covariance of the latent log-basis.
    Oracle,
    /// Thresholded covariance of `log X`, ignoring the simplex constraint.
    LogNaive,
    /// Thresholded covariance of the raw proportions.
    RawNaive,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Coat,
        Method::Oracle,
        Method::LogNaive,
        Method::RawNaive,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::Coat => "coat",
            Method::Oracle => "oracle",
            Method::LogNaive => "log_naive",
            Method::RawNaive => "raw_naive",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Performance measures recorded per replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    L1,
    Spectral,
    Frobenius,
    Tpr,
    Fpr,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::L1,
        Metric::Spectral,
        Metric::Frobenius,
        Metric::Tpr,
        Metric::Fpr,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Metric::L1 => "l1",
            Metric::Spectral => "spectral",
            Metric::Frobenius => "frobenius",
            Metric::Tpr => "tpr",
            Metric::Fpr => "fpr",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// True/false positive rates over off-diagonal upper-triangle support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportMetrics<F> {
    pub tpr: F,
    pub fpr: F,
}

/// Matrix losses of an estimate against the truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport<F> {
    pub l1: F,
    pub spectral: F,
    pub frobenius: F,
}

/// The two thresholding estimators that ignore compositionality.
#[derive(Debug, Clone)]
pub struct NaiveEstimates<F> {
    /// Thresholded sample covariance of `log X`.
    pub omega_l: CovMatrix<F>,
    /// Thresholded sample covariance of `X`.
    pub omega_c: CovMatrix<F>,
}

/// Draw the true basis covariance for a model.
pub fn generate_omega0<F: Real>(model: CovModel, p: usize, seed: u64) -> Result<CovMatrix<F>> {
    if p < 5 {
        return Err(CoatError::Config(format!("need at least 5 taxa, got {p}")));
    }
    match model {
        CovModel::Identity => CovMatrix::new(Mat::identity(p), CovKind::Basis),
        CovModel::SparseBlock => {
            let p1 = (2.0 * (p as f64).sqrt()).floor() as usize;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut b = Mat::<F>::zeros(p1, p1);
            for i in 1..p1 {
                for j in 0..i {
                    if F::sample_uniform(&mut rng, F::zero(), F::one()) < c::<F>(0.2) {
                        let magnitude = F::sample_uniform(&mut rng, c::<F>(0.5), F::one());
                        let value = if rng.random_bool(0.5) {
                            magnitude
                        } else {
                            -magnitude
                        };
                        b[(i, j)] = value;
                        b[(j, i)] = value;
                    }
                }
            }
            let min_eig = eigen::sym_eigenvalues(&b)?[0];
            let eps = (-min_eig).max(F::zero()) + c::<F>(0.01);
            let four = c::<F>(4.0);
            let omega = Mat::from_fn(p, p, |i, j| {
                if i < p1 && j < p1 {
                    if i == j {
                        b[(i, j)] + eps
                    } else {
                        b[(i, j)]
                    }
                } else if i == j {
                    four
                } else {
                    F::zero()
                }
            });
            CovMatrix::new(omega, CovKind::Basis)
        }
    }
}

/// Draw `n` log-basis vectors with covariance `omega0`.
///
/// Both distributions go through the factor `F = Q S^{1/2}` from the
/// symmetric eigendecomposition: normal draws use iid standard normals,
/// gamma draws use iid Gamma(10, 1) factors scaled by `1/sqrt(10)` so the
/// covariance is unchanged. When `mu` is `None`, its components are drawn
/// uniformly from `[0, 10]`.
pub fn sample_bases<F: Real>(
    n: usize,
    mu: Option<&[F]>,
    omega0: &CovMatrix<F>,
    dist: BaseDist,
    seed: u64,
) -> Result<Mat<F>> {
    let p = omega0.dim();
    if let Some(m) = mu {
        if m.len() != p {
            return Err(CoatError::Dimension(format!(
                "mean vector has length {}, expected {p}",
                m.len()
            )));
        }
    }
    let eig = eigen::sym_eigen(omega0.values())?;
    if eig.values[0] <= F::zero() {
        return Err(CoatError::Domain(format!(
            "basis covariance is not positive definite (min eigenvalue {})",
            eig.values[0]
        )));
    }
    // factor F = Q S^{1/2}: column j of Q scaled by sqrt(values[j])
    let sqrt_vals: Vec<F> = eig.values.iter().map(|&v| v.sqrt()).collect();
    let factor = Mat::from_fn(p, p, |i, j| eig.vectors[(i, j)] * sqrt_vals[j]);

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mu_vec: Vec<F> = match mu {
        Some(m) => m.to_vec(),
        None => (0..p)
            .map(|_| F::sample_uniform(&mut rng, F::zero(), c::<F>(10.0)))
            .collect(),
    };

    let inv_sqrt10 = F::one() / c::<F>(10.0).sqrt();
    let mut y = Mat::zeros(n, p);
    let mut u = vec![F::zero(); p];
    for k in 0..n {
        match dist {
            BaseDist::Normal => {
                for uj in u.iter_mut() {
                    *uj = F::standard_normal(&mut rng);
                }
            }
            BaseDist::Gamma => {
                for uj in u.iter_mut() {
                    *uj = F::sample_gamma(&mut rng, 10.0, 1.0) * inv_sqrt10;
                }
            }
        }
        for i in 0..p {
            let mut acc = F::zero();
            for (j, &uj) in u.iter().enumerate() {
                acc += factor[(i, j)] * uj;
            }
            y[(k, i)] = mu_vec[i] + acc;
        }
    }
    Ok(y)
}

/// Exponentiate and normalize log-bases into compositions.
///
/// The row maximum is subtracted before exponentiating; the composition is
/// unchanged and no entry can overflow.
pub fn bases_to_composition<F: Real>(y: &Mat<F>) -> Result<CompositionMatrix<F>> {
    let (n, p) = (y.rows(), y.cols());
    let mut x = Mat::zeros(n, p);
    for k in 0..n {
        let row = y.row(k);
        let max = row.iter().fold(F::neg_infinity(), |a, &b| a.max(b));
        let mut sum = F::zero();
        for j in 0..p {
            let w = (row[j] - max).exp();
            x[(k, j)] = w;
            sum += w;
        }
        for j in 0..p {
            x[(k, j)] = x[(k, j)] / sum;
        }
    }
    CompositionMatrix::new(
        x,
        crate::composition::default_sample_ids(n),
        crate::composition::default_taxon_ids(p),
    )
}

/// Adaptive thresholding of the sample covariance of arbitrary score rows.
pub(crate) fn threshold_cov_of_rows<F: Real>(
    rows: &Mat<F>,
    lambda: F,
    rule: ThresholdRule,
) -> Result<CovMatrix<F>> {
    rule.validate()?;
    let (s, theta) = stats::cov_and_theta_n(rows);
    let (omega, _) = crate::estimator::threshold_matrix(&s, &theta, lambda, rule, false);
    CovMatrix::new(omega, CovKind::Basis)
}

/// The two naive estimators: adaptive thresholding applied to the sample
/// covariances of `log X` and of `X`, each with its own dispersion scale.
pub fn naive_estimators<F: Real>(
    x: &CompositionMatrix<F>,
    lambda: F,
    rule: ThresholdRule,
) -> Result<NaiveEstimates<F>> {
    Ok(NaiveEstimates {
        omega_l: threshold_cov_of_rows(&x.log_values(), lambda, rule)?,
        omega_c: threshold_cov_of_rows(x.values(), lambda, rule)?,
    })
}

/// The oracle: adaptive thresholding applied to the sample covariance of
/// the latent log-basis itself.
pub fn oracle_estimator<F: Real>(
    y: &Mat<F>,
    lambda: F,
    rule: ThresholdRule,
) -> Result<CovMatrix<F>> {
    threshold_cov_of_rows(y, lambda, rule)
}

/// Support recovery rates over off-diagonal upper-triangle pairs.
///
/// Conventions for empty denominators: TPR is 1 when the truth has no
/// edges, FPR is 0 when the truth has no zeros.
pub fn support_metrics<F: Real>(
    estimate: &CovMatrix<F>,
    truth: &CovMatrix<F>,
) -> Result<SupportMetrics<F>> {
    if estimate.dim() != truth.dim() {
        return Err(CoatError::Dimension(format!(
            "estimate is {}x{0}, truth is {1}x{1}",
            estimate.dim(),
            truth.dim()
        )));
    }
    let p = truth.dim();
    let (mut tp, mut fp, mut true_nz, mut true_z) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..p {
        for j in (i + 1)..p {
            let truth_nz = truth.get(i, j) != F::zero();
            let est_nz = estimate.get(i, j) != F::zero();
            if truth_nz {
                true_nz += 1;
                if est_nz {
                    tp += 1;
                }
            } else {
                true_z += 1;
                if est_nz {
                    fp += 1;
                }
            }
        }
    }
    let tpr = if true_nz == 0 {
        F::one()
    } else {
        c::<F>(tp as f64) / c::<F>(true_nz as f64)
    };
    let fpr = if true_z == 0 {
        F::zero()
    } else {
        c::<F>(fp as f64) / c::<F>(true_z as f64)
    };
    Ok(SupportMetrics { tpr, fpr })
}

/// Matrix `L_1`, spectral, and Frobenius losses of `estimate - truth`.
pub fn matrix_losses<F: Real>(
    estimate: &CovMatrix<F>,
    truth: &CovMatrix<F>,
) -> Result<LossReport<F>> {
    if estimate.dim() != truth.dim() {
        return Err(CoatError::Dimension(
            "loss of differently sized matrices".into(),
        ));
    }
    let diff = estimate.values().sub(truth.values());
    let values = eigen::sym_eigenvalues(&diff)?;
    let spectral = values
        .first()
        .map(|v| v.abs())
        .unwrap_or(F::zero())
        .max(values.last().map(|v| v.abs()).unwrap_or(F::zero()));
    Ok(LossReport {
        l1: diff.norm_l1(),
        spectral,
        frobenius: diff.norm_fro(),
    })
}

/// One point of an ROC curve, tagged with the threshold that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint<F> {
    pub lambda: F,
    pub fpr: F,
    pub tpr: F,
}

/// ROC curve of the thresholding estimator built from the given score rows.
///
/// With `grid = None`, thresholds are the exact knots where the support
/// changes (the distinct values of `|s_ij| / sqrt(theta_ij)`), capped at
/// 2000 by uniform subsampling, plus the point 0. Thresholds are processed
/// in decreasing order, so the curve runs from (0, 0) toward (1, 1) and is
/// monotone in both coordinates. The support, and hence the curve, does not
/// depend on the thresholding rule.
pub fn roc_curve<F: Real>(
    scores: &Mat<F>,
    truth: &CovMatrix<F>,
    rule: ThresholdRule,
    grid: Option<&[F]>,
) -> Result<Vec<RocPoint<F>>> {
    rule.validate()?;
    let (s, theta) = stats::cov_and_theta_n(scores);
    let p = s.rows();
    if truth.dim() != p {
        return Err(CoatError::Dimension(
            "truth dimension does not match scores".into(),
        ));
    }

    let mut knots: Vec<F> = match grid {
        Some(g) => g.to_vec(),
        None => {
            let mut ratios: Vec<F> = Vec::new();
            for i in 0..p {
                for j in (i + 1)..p {
                    let th = theta[(i, j)];
                    if th > F::zero() {
                        let r = s[(i, j)].abs() / th.sqrt();
                        if r.is_finite() {
                            ratios.push(r);
                        }
                    }
                }
            }
            ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
            ratios.dedup();
            if ratios.len() > 2000 {
                let m = ratios.len();
                ratios = (0..2000)
                    .map(|k| ratios[k * (m - 1) / 1999])
                    .collect();
                ratios.dedup();
            }
            ratios.push(F::zero());
            ratios
        }
    };
    knots.sort_by(|a, b| b.partial_cmp(a).expect("finite knots"));

    let (mut true_nz, mut true_z) = (0usize, 0usize);
    for i in 0..p {
        for j in (i + 1)..p {
            if truth.get(i, j) != F::zero() {
                true_nz += 1;
            } else {
                true_z += 1;
            }
        }
    }

    let mut points = Vec::with_capacity(knots.len());
    for &lambda in &knots {
        let (mut tp, mut fp) = (0usize, 0usize);
        for i in 0..p {
            for j in (i + 1)..p {
                let est = rule.apply(s[(i, j)], lambda * theta[(i, j)].sqrt());
                if est != F::zero() {
                    if truth.get(i, j) != F::zero() {
                        tp += 1;
                    } else {
                        fp += 1;
                    }
                }
            }
        }
        let tpr = if true_nz == 0 {
            F::one()
        } else {
            c::<F>(tp as f64) / c::<F>(true_nz as f64)
        };
        let fpr = if true_z == 0 {
            F::zero()
        } else {
            c::<F>(fp as f64) / c::<F>(true_z as f64)
        };
        points.push(RocPoint { lambda, fpr, tpr });
    }
    Ok(points)
}

/// Area under an ROC curve by the trapezoid rule.
///
/// Points must be ordered with nondecreasing FPR, as produced by
/// [`roc_curve`].
pub fn roc_auc<F: Real>(points: &[RocPoint<F>]) -> F {
    let half = c::<F>(0.5);
    let mut auc = F::zero();
    for w in points.windows(2) {
        auc += (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) * half;
    }
    auc
}

/// Score rows for each competing estimator, derived from one dataset.
pub fn method_scores<F: Real>(
    method: Method,
    y: &Mat<F>,
    x: &CompositionMatrix<F>,
) -> Mat<F> {
    match method {
        Method::Coat => x.clr_scores(),
        Method::Oracle => y.clone(),
        Method::LogNaive => x.log_values(),
        Method::RawNaive => x.values().clone(),
    }
}

/// Off-diagonal sample correlations of one dataset under each transform.
#[derive(Debug, Clone)]
pub struct SpuriousSample<F> {
    /// Correlations of the latent log-basis (the unbiased reference).
    pub log_basis: Vec<F>,
    /// Correlations of the clr scores.
    pub clr: Vec<F>,
    /// Correlations of `log X`.
    pub log_x: Vec<F>,
    /// Correlations of the raw proportions.
    pub raw_x: Vec<F>,
}

impl<F: Real> SpuriousSample<F> {
    pub fn transforms(&self) -> [(&'static str, &[F]); 4] {
        [
            ("log_basis", &self.log_basis),
            ("clr", &self.clr),
            ("log_x", &self.log_x),
            ("raw_x", &self.raw_x),
        ]
    }
}

/// Collect off-diagonal correlations from an already generated dataset.
pub fn spurious_from_data<F: Real>(y: &Mat<F>, x: &CompositionMatrix<F>) -> SpuriousSample<F> {
    let corr = |rows: &Mat<F>| stats::upper_offdiag(&stats::correlation(rows));
    SpuriousSample {
        log_basis: corr(y),
        clr: corr(&x.clr_scores()),
        log_x: corr(&x.log_values()),
        raw_x: corr(x.values()),
    }
}

/// Generate an identity-covariance dataset and collect the spurious
/// correlations under each transform.
pub fn spurious_correlation_study<F: Real>(
    n: usize,
    p: usize,
    dist: BaseDist,
    seed: u64,
) -> Result<SpuriousSample<F>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let omega0 = generate_omega0::<F>(CovModel::Identity, p, rng.next_u64())?;
    let mu: Vec<F> = (0..p)
        .map(|_| F::sample_uniform(&mut rng, F::zero(), c::<F>(10.0)))
        .collect();
    let y = sample_bases(n, Some(&mu), &omega0, dist, rng.next_u64())?;
    let x = bases_to_composition(&y)?;
    Ok(spurious_from_data(&y, &x))
}

/// Knobs of the benchmark harness that are not part of the scenario.
#[derive(Debug, Clone)]
pub struct BenchSettings {
    pub folds: usize,
    pub grid_size: usize,
    pub rules: Vec<ThresholdRule>,
}

impl Default for BenchSettings {
    fn default() -> Self {
        Self {
            folds: 10,
            grid_size: 50,
            rules: vec![ThresholdRule::Hard, ThresholdRule::Soft],
        }
    }
}

/// One measured value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRecord<F> {
    pub rep: usize,
    pub method: Method,
    pub rule: ThresholdRule,
    pub metric: Metric,
    pub value: F,
}

/// Aggregated mean and standard error for one cell of the results table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow<F> {
    pub method: Method,
    pub rule: ThresholdRule,
    pub metric: Metric,
    pub mean: F,
    pub se: F,
}

/// Full benchmark output.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutput<F> {
    pub records: Vec<BenchRecord<F>>,
    /// Per-replication spurious correlations; populated for the identity
    /// model only.
    pub spurious: Vec<SpuriousRow<F>>,
}

/// Boxplot-style quantiles of one transform's correlations in one rep.
#[derive(Debug, Clone, PartialEq)]
pub struct SpuriousRow<F> {
    pub rep: usize,
    pub transform: &'static str,
    pub quantiles: [F; 5],
}

const SPURIOUS_QS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Run the benchmark: per replication, generate a dataset, tune every
/// method by cross-validation, and record losses and support metrics.
pub fn run_benchmark<F: Real>(cfg: &SimConfig, settings: &BenchSettings) -> Result<BenchOutput<F>> {
    cfg.validate()?;
    for rule in &settings.rules {
        rule.validate()?;
    }
    if settings.rules.is_empty() {
        return Err(CoatError::Config("no thresholding rules configured".into()));
    }

    let reps: Vec<(Vec<BenchRecord<F>>, Vec<SpuriousRow<F>>)> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| run_rep(cfg, settings, rep))
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut spurious = Vec::new();
    for (r, s) in reps {
        records.extend(r);
        spurious.extend(s);
    }
    Ok(BenchOutput { records, spurious })
}

fn run_rep<F: Real>(
    cfg: &SimConfig,
    settings: &BenchSettings,
    rep: usize,
) -> Result<(Vec<BenchRecord<F>>, Vec<SpuriousRow<F>>)> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1 + rep as u64);

    let omega0 = generate_omega0::<F>(cfg.model, cfg.p, rng.next_u64())?;
    let mu: Vec<F> = (0..cfg.p)
        .map(|_| F::sample_uniform(&mut rng, F::zero(), c::<F>(10.0)))
        .collect();
    let y = sample_bases(cfg.n, Some(&mu), &omega0, cfg.dist, rng.next_u64())?;
    let x = bases_to_composition(&y)?;
    let cv_seed = rng.next_u64();

    let mut records = Vec::new();
    for method in Method::ALL {
        let scores = method_scores(method, &y, &x);
        let grid = lambda_grid_for_scores(&scores, settings.grid_size);
        let (s, theta) = stats::cov_and_theta_n(&scores);
        for &rule in &settings.rules {
            let cv = cross_validate_rows(&scores, &grid, settings.folds, rule, cv_seed)?;
            let (omega, _) = crate::estimator::threshold_matrix(
                &s,
                &theta,
                cv.chosen_lambda,
                rule,
                false,
            );
            let estimate = CovMatrix::new(omega, CovKind::Basis)?;
            let losses = matrix_losses(&estimate, &omega0)?;
            let support = support_metrics(&estimate, &omega0)?;
            for metric in Metric::ALL {
                let value = match metric {
                    Metric::L1 => losses.l1,
                    Metric::Spectral => losses.spectral,
                    Metric::Frobenius => losses.frobenius,
                    Metric::Tpr => support.tpr,
                    Metric::Fpr => support.fpr,
                };
                records.push(BenchRecord {
                    rep,
                    method,
                    rule,
                    metric,
                    value,
                });
            }
        }
    }

    let mut spurious = Vec::new();
    if cfg.model == CovModel::Identity {
        let sample = spurious_from_data(&y, &x);
        for (transform, values) in sample.transforms() {
            let mut quantiles = [F::zero(); 5];
            for (slot, &q) in quantiles.iter_mut().zip(&SPURIOUS_QS) {
                *slot = stats::quantile(values, q);
            }
            spurious.push(SpuriousRow {
                rep,
                transform,
                quantiles,
            });
        }
    }
    Ok((records, spurious))
}

/// Mean and standard error per (method, rule, metric) cell, in fixed order.
pub fn summarize<F: Real>(
    records: &[BenchRecord<F>],
    rules: &[ThresholdRule],
) -> Vec<SummaryRow<F>> {
    let mut rows = Vec::new();
    for method in Method::ALL {
        for &rule in rules {
            for metric in Metric::ALL {
                let values: Vec<F> = records
                    .iter()
                    .filter(|r| r.method == method && r.rule == rule && r.metric == metric)
                    .map(|r| r.value)
                    .collect();
                if values.is_empty() {
                    continue;
                }
                let nf = c::<F>(values.len() as f64);
                let mean = values.iter().copied().sum::<F>() / nf;
                let se = if values.len() < 2 {
                    F::zero()
                } else {
                    let var = values
                        .iter()
                        .map(|&v| (v - mean) * (v - mean))
                        .sum::<F>()
                        / c::<F>((values.len() - 1) as f64);
                    (var / nf).sqrt()
                };
                rows.push(SummaryRow {
                    method,
                    rule,
                    metric,
                    mean,
                    se,
                });
            }
        }
    }
    rows
}

/// Per-replication records as CSV (`rep,method,rule,metric,value`).
pub fn records_to_csv<F: Real>(records: &[BenchRecord<F>]) -> String {
    let mut out = String::from("rep,method,rule,metric,value\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.rep, r.method, r.rule, r.metric, r.value
        ));
    }
    out
}

/// Summary table as CSV (`method,rule,metric,mean,se`).
pub fn summary_to_csv<F: Real>(rows: &[SummaryRow<F>]) -> String {
    let mut out = String::from("method,rule,metric,mean,se\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.method, r.rule, r.metric, r.mean, r.se
        ));
    }
    out
}

/// ROC curves as CSV (`method,lambda,fpr,tpr`).
pub fn roc_to_csv<F: Real>(curves: &[(Method, Vec<RocPoint<F>>)]) -> String {
    let mut out = String::from("method,lambda,fpr,tpr\n");
    for (method, points) in curves {
        for pt in points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                method, pt.lambda, pt.fpr, pt.tpr
            ));
        }
    }
    out
}

/// Spurious-correlation quantiles as CSV
/// (`rep,transform,q05,q25,q50,q75,q95`).
pub fn spurious_to_csv<F: Real>(rows: &[SpuriousRow<F>]) -> String {
    let mut out = String::from("rep,transform,q05,q25,q50,q75,q95\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.rep,
            r.transform,
            r.quantiles[0],
            r.quantiles[1],
            r.quantiles[2],
            r.quantiles[3],
            r.quantiles[4]
        ));
    }
    out
}
