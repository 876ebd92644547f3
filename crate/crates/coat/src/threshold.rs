//! Generalized thresholding functions.
//!
//! Every rule satisfies the two defining conditions: it vanishes whenever
//! `|z| <= lambda`, and it never moves a value by more than `lambda`. The
//! zero pattern of a thresholded matrix therefore depends only on the
//! thresholds, not on the rule.

use serde::{Deserialize, Serialize};

use crate::error::{CoatError, Result};
use crate::num::{c, Real};

/// Thresholding rule applied entry-wise to covariance estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ThresholdRule {
    /// Keep the value when it clears the threshold, else zero.
    Hard,
    /// Shrink toward zero by the threshold.
    Soft,
    /// `z (1 - |lambda/z|^eta)_+`; `eta = 1` reproduces soft thresholding,
    /// larger `eta` approaches hard.
    AdaptiveLasso { eta: f64 },
}

impl ThresholdRule {
    /// Build an adaptive-lasso rule, rejecting `eta < 1`.
    pub fn adaptive_lasso(eta: f64) -> Result<Self> {
        let rule = ThresholdRule::AdaptiveLasso { eta };
        rule.validate()?;
        Ok(rule)
    }

    /// Parameter check: adaptive lasso needs `eta >= 1`.
    pub fn validate(&self) -> Result<()> {
        if let ThresholdRule::AdaptiveLasso { eta } = self {
            if !(*eta >= 1.0) {
                return Err(CoatError::Config(format!(
                    "adaptive lasso exponent must be >= 1, got {eta}"
                )));
            }
        }
        Ok(())
    }

    /// Apply the rule; assumes `lambda >= 0` and a validated rule.
    pub fn apply<F: Real>(&self, z: F, lambda: F) -> F {
        match *self {
            ThresholdRule::Hard => {
                if z.abs() > lambda {
                    z
                } else {
                    F::zero()
                }
            }
            ThresholdRule::Soft => {
                let shrunk = z.abs() - lambda;
                if shrunk > F::zero() {
                    z.signum() * shrunk
                } else {
                    F::zero()
                }
            }
            ThresholdRule::AdaptiveLasso { eta } => {
                if z == F::zero() {
                    return F::zero();
                }
                let ratio = (lambda / z.abs()).powf(c::<F>(eta));
                let keep = F::one() - ratio;
                if keep > F::zero() {
                    z * keep
                } else {
                    F::zero()
                }
            }
        }
    }

    /// Short name used in CSV output and CLI flags.
    pub fn tag(&self) -> &'static str {
        match self {
            ThresholdRule::Hard => "hard",
            ThresholdRule::Soft => "soft",
            ThresholdRule::AdaptiveLasso { .. } => "al",
        }
    }
}

impl std::fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Validated entry point: checks `lambda >= 0` and the rule parameters.
pub fn apply_threshold<F: Real>(z: F, lambda: F, rule: ThresholdRule) -> Result<F> {
    if lambda < F::zero() {
        return Err(CoatError::Config(format!(
            "threshold level must be nonnegative, got {lambda}"
        )));
    }
    rule.validate()?;
    Ok(rule.apply(z, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn hard_rule_keeps_or_kills() {
        assert_eq!(apply_threshold(5.0, 2.0, ThresholdRule::Hard).unwrap(), 5.0);
        assert_eq!(apply_threshold(1.5, 2.0, ThresholdRule::Hard).unwrap(), 0.0);
    }

    #[test]
    fn soft_rule_shrinks() {
        assert_eq!(apply_threshold(5.0, 2.0, ThresholdRule::Soft).unwrap(), 3.0);
        assert_eq!(apply_threshold(-3.0, 2.0, ThresholdRule::Soft).unwrap(), -1.0);
    }

    #[test]
    fn adaptive_lasso_with_unit_exponent_equals_soft() {
        let rule = ThresholdRule::adaptive_lasso(1.0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let z: f64 = rng.random_range(-10.0..10.0);
            let lambda: f64 = rng.random_range(0.0..5.0);
            let al = rule.apply(z, lambda);
            let soft = ThresholdRule::Soft.apply(z, lambda);
            assert!((al - soft).abs() <= 1e-14, "z={z} lambda={lambda}");
        }
    }

    #[test]
    fn zero_lambda_is_identity_for_all_rules() {
        let rules = [
            ThresholdRule::Hard,
            ThresholdRule::Soft,
            ThresholdRule::adaptive_lasso(2.0).unwrap(),
        ];
        for rule in rules {
            assert_eq!(rule.apply(3.25_f64, 0.0), 3.25);
            assert_eq!(rule.apply(0.0_f64, 0.0), 0.0);
        }
    }

    #[test]
    fn rejects_eta_below_one() {
        assert!(ThresholdRule::adaptive_lasso(0.5).is_err());
        assert!(apply_threshold(1.0, 1.0, ThresholdRule::AdaptiveLasso { eta: 0.9 }).is_err());
    }

    #[test]
    fn rejects_negative_lambda() {
        assert!(apply_threshold(1.0, -0.1, ThresholdRule::Hard).is_err());
    }
}
