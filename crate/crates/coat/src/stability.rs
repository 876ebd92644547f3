//! Bootstrap edge-stability analysis of thresholded correlation networks.
//!
//! The base network is the off-diagonal support of the cross-validation
//! tuned estimate on the full data, selected under the positive-definiteness
//! constraint so edge correlations are well defined. Each bootstrap
//! replicate resamples rows with replacement, re-tunes, re-estimates, and
//! reports which base edges it reproduces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composition::CompositionMatrix;
use crate::error::{CoatError, Result};
use crate::num::{c, Real};
use crate::select::{cross_validate_rows, lambda_grid_for_scores, select_lambda_pd};
use crate::stats;
use crate::threshold::ThresholdRule;

/// One undirected edge of the base network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityEdge<F> {
    /// Smaller taxon index.
    pub i: usize,
    /// Larger taxon index.
    pub j: usize,
    /// Correlation from the base estimate.
    pub correlation: F,
    /// Number of bootstrap replicates reproducing the edge.
    pub frequency: usize,
}

/// Bootstrap-annotated correlation network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityNetwork<F> {
    /// Every edge of the base network with its reproduction frequency.
    pub edges: Vec<StabilityEdge<F>>,
    /// Bootstrap replicate count.
    #[serde(rename = "B")]
    pub b: usize,
    /// Frequency needed for an edge to be retained.
    pub retain: usize,
    /// Mean fraction of base edges reproduced per replicate; `None` when
    /// the base network is empty (undefined, not zero).
    pub stability: Option<F>,
    /// Taxon labels indexed by edge endpoints.
    pub labels: Vec<String>,
    /// Base edges discarded because an endpoint variance was not positive.
    pub dropped_nonpositive_diag: usize,
}

impl<F: Real> StabilityNetwork<F> {
    /// Edges meeting the retention threshold.
    pub fn retained_edges(&self) -> Vec<&StabilityEdge<F>> {
        self.edges
            .iter()
            .filter(|e| e.frequency >= self.retain)
            .collect()
    }
}

/// Switches for the bootstrap procedure.
#[derive(Debug, Clone)]
pub struct StabilityOptions {
    /// Cross-validation folds for both the base fit and each replicate.
    pub folds: usize,
    /// Grid size fed to the default grid recipe.
    pub grid_size: usize,
    /// Reuse the base tuning parameter in every replicate instead of
    /// re-tuning. Off by default: each replicate re-runs cross-validation.
    pub fixed_lambda: bool,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            folds: 10,
            grid_size: 50,
            fixed_lambda: false,
        }
    }
}

/// Counts of retained edges by correlation sign; zero counts as positive.
pub fn edge_sign_split<F: Real>(net: &StabilityNetwork<F>) -> (usize, usize) {
    let mut positives = 0;
    let mut negatives = 0;
    for e in net.retained_edges() {
        if e.correlation < F::zero() {
            negatives += 1;
        } else {
            positives += 1;
        }
    }
    (positives, negatives)
}

/// Run the bootstrap stability analysis.
pub fn bootstrap_stability<F: Real>(
    x: &CompositionMatrix<F>,
    rule: ThresholdRule,
    folds: usize,
    b: usize,
    retain: usize,
    seed: u64,
) -> Result<StabilityNetwork<F>> {
    bootstrap_stability_with_options(
        x,
        rule,
        b,
        retain,
        seed,
        &StabilityOptions {
            folds,
            ..StabilityOptions::default()
        },
    )
}

/// [`bootstrap_stability`] with explicit options.
pub fn bootstrap_stability_with_options<F: Real>(
    x: &CompositionMatrix<F>,
    rule: ThresholdRule,
    b: usize,
    retain: usize,
    seed: u64,
    options: &StabilityOptions,
) -> Result<StabilityNetwork<F>> {
    let n = x.n_samples();
    let resampler = move |r: usize| -> Vec<usize> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        // Stream 0 is reserved for the base fit's cross-validation.
        rng.set_stream(1 + r as u64);
        (0..n).map(|_| rng.random_range(0..n)).collect()
    };
    bootstrap_stability_impl(x, rule, b, retain, seed, options, &resampler)
}

pub(crate) fn bootstrap_stability_impl<F: Real>(
    x: &CompositionMatrix<F>,
    rule: ThresholdRule,
    b: usize,
    retain: usize,
    seed: u64,
    options: &StabilityOptions,
    resampler: &(dyn Fn(usize) -> Vec<usize> + Sync),
) -> Result<StabilityNetwork<F>> {
    rule.validate()?;
    if b < 1 {
        return Err(CoatError::Config("need at least one bootstrap replicate".into()));
    }
    if retain > b {
        return Err(CoatError::Config(format!(
            "retention threshold {retain} exceeds replicate count {b}"
        )));
    }

    let p = x.n_taxa();
    let scores = x.clr_scores();
    let grid = lambda_grid_for_scores(&scores, options.grid_size);
    let base_cv = select_lambda_pd(x, &grid, options.folds, rule, seed)?;
    let base_fit = crate::estimator::coat(x, base_cv.chosen_lambda, rule)?;
    let base = base_fit.omega_hat.values();

    // Base edge list with correlations; endpoints with nonpositive variance
    // cannot carry a correlation and are dropped (counted).
    let mut edges: Vec<StabilityEdge<F>> = Vec::new();
    let mut dropped = 0usize;
    for i in 0..p {
        for j in (i + 1)..p {
            if base[(i, j)] != F::zero() {
                let dii = base[(i, i)];
                let djj = base[(j, j)];
                if dii > F::zero() && djj > F::zero() {
                    let corr = base[(i, j)] / (dii * djj).sqrt();
                    let corr = corr.max(-F::one()).min(F::one());
                    edges.push(StabilityEdge {
                        i,
                        j,
                        correlation: corr,
                        frequency: 0,
                    });
                } else {
                    dropped += 1;
                }
            }
        }
    }

    if edges.is_empty() {
        return Ok(StabilityNetwork {
            edges,
            b,
            retain,
            stability: None,
            labels: x.taxon_ids().to_vec(),
            dropped_nonpositive_diag: dropped,
        });
    }

    // Each replicate reports which base edges it reproduces.
    let replicate_hits: Vec<Vec<bool>> = (0..b)
        .into_par_iter()
        .map(|r| -> Result<Vec<bool>> {
            let indices = resampler(r);
            let boot_scores = scores.select_rows(&indices);
            let lambda = if options.fixed_lambda {
                base_cv.chosen_lambda
            } else {
                let boot_grid = lambda_grid_for_scores(&boot_scores, options.grid_size);
                let mut cv_rng = ChaCha20Rng::seed_from_u64(seed);
                cv_rng.set_stream(1 + b as u64 + r as u64);
                cross_validate_rows(&boot_scores, &boot_grid, options.folds, rule, cv_rng.next_u64())?
                    .chosen_lambda
            };
            let (s, theta) = stats::cov_and_theta_n(&boot_scores);
            let (omega, _) = crate::estimator::threshold_matrix(&s, &theta, lambda, rule, false);
            let hits = edges
                .iter()
                .map(|e| omega[(e.i, e.j)] != F::zero())
                .collect();
            Ok(hits)
        })
        .collect::<Result<_>>()?;

    let mut total_hits = 0usize;
    for hits in &replicate_hits {
        for (e, &hit) in edges.iter_mut().zip(hits) {
            if hit {
                e.frequency += 1;
                total_hits += 1;
            }
        }
    }

    let stability =
        Some(c::<F>(total_hits as f64) / (c::<F>(b as f64) * c::<F>(edges.len() as f64)));

    Ok(StabilityNetwork {
        edges,
        b,
        retain,
        stability,
        labels: x.taxon_ids().to_vec(),
        dropped_nonpositive_diag: dropped,
    })
}

/// Output encodings of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeCsv,
    Json,
}

/// Serialize a network to bytes in the requested format.
pub fn export_network<F: Real + Serialize>(
    net: &StabilityNetwork<F>,
    format: ExportFormat,
) -> Result<Vec<u8>> {
    match format {
        ExportFormat::EdgeCsv => Ok(to_edge_csv(net).into_bytes()),
        ExportFormat::Json => {
            let mut s = serde_json::to_string_pretty(net)
                .map_err(|e| CoatError::Data(format!("network serialization failed: {e}")))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
    }
}

/// Edge list as CSV: `source,target,correlation,frequency,retained`, with
/// correlations printed to six decimals.
pub fn to_edge_csv<F: Real>(net: &StabilityNetwork<F>) -> String {
    let mut out = String::from("source,target,correlation,frequency,retained\n");
    for e in &net.edges {
        out.push_str(&format!(
            "{},{},{:.6},{},{}\n",
            net.labels[e.i],
            net.labels[e.j],
            e.correlation,
            e.frequency,
            e.frequency >= net.retain
        ));
    }
    out
}

/// Parse a network back from its JSON encoding.
pub fn network_from_json<F: Real + for<'de> Deserialize<'de>>(
    bytes: &[u8],
) -> Result<StabilityNetwork<F>> {
    serde_json::from_slice(bytes).map_err(|e| CoatError::Data(format!("invalid network json: {e}")))
}
