//! Symmetric eigenvalue decomposition by cyclic Jacobi rotations.
//!
//! Deterministic for a fixed input: the sweep order is fixed and no
//! pivot search depends on floating-point ties. Accuracy is ample for the
//! dimensions this crate works at (p up to a few hundred).

use crate::error::{CoatError, Result};
use crate::mat::Mat;
use crate::num::{c, Real};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a symmetric matrix: `A = V diag(values) V^T`.
///
/// Eigenvalues are sorted ascending; column `j` of `vectors` pairs with
/// `values[j]`.
#[derive(Debug, Clone)]
pub struct SymEigen<F> {
    pub values: Vec<F>,
    pub vectors: Mat<F>,
}

/// Full decomposition of a symmetric matrix.
pub fn sym_eigen<F: Real>(m: &Mat<F>) -> Result<SymEigen<F>> {
    jacobi(m, true)
}

/// Eigenvalues only, sorted ascending.
pub fn sym_eigenvalues<F: Real>(m: &Mat<F>) -> Result<Vec<F>> {
    Ok(jacobi(m, false)?.values)
}

/// Smallest eigenvalue of a symmetric matrix.
///
/// Rejects non-square or materially asymmetric input.
pub fn min_eigenvalue<F: Real>(m: &Mat<F>) -> Result<F> {
    check_symmetric(m)?;
    let values = sym_eigenvalues(m)?;
    Ok(values[0])
}

/// Error unless `m` is square and symmetric within the crate tolerance.
pub fn check_symmetric<F: Real>(m: &Mat<F>) -> Result<()> {
    if !m.is_square() {
        return Err(CoatError::Dimension(format!(
            "expected square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let tol = F::scaled_tol(1e-10) * F::one().max(m.norm_max());
    for i in 0..m.rows() {
        for j in (i + 1)..m.cols() {
            let delta = (m[(i, j)] - m[(j, i)]).abs();
            if delta > tol {
                return Err(CoatError::NotSymmetric {
                    i,
                    j,
                    delta: delta.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(())
}

fn jacobi<F: Real>(m: &Mat<F>, want_vectors: bool) -> Result<SymEigen<F>> {
    debug_assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return Err(CoatError::Dimension("empty matrix".into()));
    }

    let mut a = m.clone();
    a.symmetrize();
    let mut v = if want_vectors {
        Mat::identity(n)
    } else {
        Mat::zeros(0, 0)
    };

    let mut d: Vec<F> = (0..n).map(|i| a[(i, i)]).collect();
    let mut b = d.clone();
    let mut z = vec![F::zero(); n];

    let hundred = c::<F>(100.0);
    let half = c::<F>(0.5);

    for sweep in 0..MAX_SWEEPS {
        let mut off = F::zero();
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                off += a[(p, q)].abs();
            }
        }
        if off == F::zero() {
            return Ok(finish(d, v, want_vectors));
        }

        let tresh = if sweep < 3 {
            c::<F>(0.2) * off / c::<F>((n * n) as f64)
        } else {
            F::zero()
        };

        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let g = hundred * a[(p, q)].abs();
                // Once small relative to both diagonals, the entry is noise.
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[(p, q)] = F::zero();
                } else if a[(p, q)].abs() > tresh {
                    let mut h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        a[(p, q)] / h
                    } else {
                        let theta = half * h / a[(p, q)];
                        let mut t = F::one() / (theta.abs() + (F::one() + theta * theta).sqrt());
                        if theta < F::zero() {
                            t = -t;
                        }
                        t
                    };
                    let cth = F::one() / (F::one() + t * t).sqrt();
                    let s = t * cth;
                    let tau = s / (F::one() + cth);
                    h = t * a[(p, q)];
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[(p, q)] = F::zero();
                    for j in 0..p {
                        rotate(&mut a, s, tau, j, p, j, q);
                    }
                    for j in (p + 1)..q {
                        rotate(&mut a, s, tau, p, j, j, q);
                    }
                    for j in (q + 1)..n {
                        rotate(&mut a, s, tau, p, j, q, j);
                    }
                    if want_vectors {
                        for j in 0..n {
                            rotate(&mut v, s, tau, j, p, j, q);
                        }
                    }
                }
            }
        }

        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = F::zero();
        }
    }

    Err(CoatError::EigenNoConverge)
}

#[inline]
fn rotate<F: Real>(
    a: &mut Mat<F>,
    s: F,
    tau: F,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) {
    let g = a[(i, j)];
    let h = a[(k, l)];
    a[(i, j)] = g - s * (h + g * tau);
    a[(k, l)] = h + s * (g - h * tau);
}

fn finish<F: Real>(d: Vec<F>, v: Mat<F>, want_vectors: bool) -> SymEigen<F> {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));

    let values: Vec<F> = order.iter().map(|&i| d[i]).collect();
    let vectors = if want_vectors {
        Mat::from_fn(n, n, |i, j| v[(i, order[j])])
    } else {
        v
    };
    SymEigen { values, vectors }
}
