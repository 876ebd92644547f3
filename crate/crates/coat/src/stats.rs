//! Moment computations shared by the estimator, model selection, and the
//! simulation bench.
//!
//! All variances here use divisor `n`, matching the estimator definitions;
//! the route equivalence between the direct and variation-matrix
//! constructions holds only under that convention.

use crate::mat::Mat;
use crate::num::{c, Real};

/// Column means of a row-sample matrix.
pub(crate) fn column_means<F: Real>(rows: &Mat<F>) -> Vec<F> {
    let n = rows.rows();
    let p = rows.cols();
    let inv_n = F::one() / c::<F>(n as f64);
    let mut means = vec![F::zero(); p];
    for k in 0..n {
        let r = rows.row(k);
        for j in 0..p {
            means[j] += r[j];
        }
    }
    for m in &mut means {
        *m *= inv_n;
    }
    means
}

/// Rows centered by their column means.
pub(crate) fn center_rows<F: Real>(rows: &Mat<F>) -> Mat<F> {
    let means = column_means(rows);
    Mat::from_fn(rows.rows(), rows.cols(), |k, j| rows[(k, j)] - means[j])
}

/// Sample covariance of the rows with divisor `n`, exactly symmetric.
pub(crate) fn cov_n<F: Real>(rows: &Mat<F>) -> Mat<F> {
    let centered = center_rows(rows);
    cov_of_centered(&centered)
}

fn cov_of_centered<F: Real>(centered: &Mat<F>) -> Mat<F> {
    let n = centered.rows();
    let p = centered.cols();
    let inv_n = F::one() / c::<F>(n as f64);
    let mut s = Mat::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let mut acc = F::zero();
            for k in 0..n {
                acc += centered[(k, i)] * centered[(k, j)];
            }
            let v = acc * inv_n;
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Sample covariance plus the per-entry dispersion of its summands.
///
/// For centered scores `a`, returns `s_ij = mean_k(a_ki a_kj)` and
/// `theta_ij = mean_k((a_ki a_kj - s_ij)^2)`, both with divisor `n` and
/// exactly symmetric.
pub(crate) fn cov_and_theta_n<F: Real>(rows: &Mat<F>) -> (Mat<F>, Mat<F>) {
    let centered = center_rows(rows);
    let s = cov_of_centered(&centered);
    let n = centered.rows();
    let p = centered.cols();
    let inv_n = F::one() / c::<F>(n as f64);
    let mut theta = Mat::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let sij = s[(i, j)];
            let mut acc = F::zero();
            for k in 0..n {
                let d = centered[(k, i)] * centered[(k, j)] - sij;
                acc += d * d;
            }
            let v = acc * inv_n;
            theta[(i, j)] = v;
            theta[(j, i)] = v;
        }
    }
    (s, theta)
}

/// Pearson correlation matrix of the rows (the divisor cancels).
pub(crate) fn correlation<F: Real>(rows: &Mat<F>) -> Mat<F> {
    let s = cov_n(rows);
    let p = s.rows();
    Mat::from_fn(p, p, |i, j| {
        let denom = (s[(i, i)] * s[(j, j)]).sqrt();
        if denom > F::zero() {
            s[(i, j)] / denom
        } else if i == j {
            F::one()
        } else {
            F::zero()
        }
    })
}

/// Off-diagonal upper-triangle entries of a square matrix, row-major order.
pub(crate) fn upper_offdiag<F: Real>(m: &Mat<F>) -> Vec<F> {
    let p = m.rows();
    let mut out = Vec::with_capacity(p * (p - 1) / 2);
    for i in 0..p {
        for j in (i + 1)..p {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile<F: Real>(values: &[F], q: f64) -> F {
    assert!(!values.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&q), "quantile level out of range");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = c::<F>(h - lo as f64);
        sorted[lo] + (sorted[hi] - sorted[lo]) * w
    }
}

/// Median shorthand.
pub fn median<F: Real>(values: &[F]) -> F {
    quantile(values, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cov_uses_divisor_n() {
        // Var of {0, 2} with divisor n=2 is 1, not 2.
        let rows = Mat::from_rows(&[vec![0.0_f64], vec![2.0]]).unwrap();
        let s = cov_n(&rows);
        assert_relative_eq!(s[(0, 0)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn theta_matches_scalar_enumeration_for_two_samples() {
        // Centered scores for n=2 are (d/2, -d/2) per column, so the
        // products a_ki a_kj are equal across k and theta must vanish.
        let rows = Mat::from_rows(&[vec![1.0_f64, 3.0], vec![2.0, 1.0]]).unwrap();
        let (s, theta) = cov_and_theta_n(&rows);
        assert_relative_eq!(s[(0, 1)], 0.5 * (0.5 * -1.0 + -0.5 * 1.0), epsilon = 1e-15);
        assert_relative_eq!(theta[(0, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn theta_matches_scalar_enumeration_for_three_samples() {
        let rows = Mat::from_rows(&[vec![1.0_f64, 0.0], vec![2.0, 3.0], vec![6.0, 0.0]]).unwrap();
        let (s, theta) = cov_and_theta_n(&rows);
        // Hand enumeration: means are (3, 1); centered products over k:
        // (-2)(-1)=2, (-1)(2)=-2, (3)(-1)=-3 -> mean -1, squared devs 9,1,4 -> mean 14/3.
        assert_relative_eq!(s[(0, 1)], -1.0, epsilon = 1e-14);
        assert_relative_eq!(theta[(0, 1)], 14.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn quantile_interpolates() {
        let v = vec![1.0_f64, 2.0, 3.0, 4.0];
        assert_relative_eq!(quantile(&v, 0.5), 2.5);
        assert_relative_eq!(quantile(&v, 0.0), 1.0);
        assert_relative_eq!(quantile(&v, 1.0), 4.0);
    }

    #[test]
    fn correlation_of_identical_columns_is_one() {
        let rows = Mat::from_rows(&[vec![1.0_f64, 1.0], vec![2.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let r = correlation(&rows);
        assert_relative_eq!(r[(0, 1)], 1.0, epsilon = 1e-14);
    }
}
