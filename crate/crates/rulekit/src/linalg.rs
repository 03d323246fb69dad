//! Dense symmetric linear-algebra kernels shared by the numeric front-ends:
//! a cyclic Jacobi eigensolver and a Cholesky-based SPD inverse diagonal.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Returns eigenvalues in descending order and the orthonormal matrix whose
/// columns are the matching eigenvectors. The input is symmetrized first, so
/// small asymmetries from accumulated rounding are tolerated.
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Data(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut m = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (a[[i, j]] + a[[j, i]]));
    let mut v: Array2<f64> = Array2::eye(n);
    if n <= 1 {
        let values = Array1::from_iter((0..n).map(|i| m[[i, i]]));
        return Ok((values, v));
    }

    for sweep in 0..MAX_SWEEPS {
        let off: f64 = upper_off_diagonal_abs_sum(&m);
        if off == 0.0 {
            break;
        }
        // Rotate only above a shrinking threshold in the first sweeps
        // (classic Jacobi schedule); afterwards rotate on any nonzero entry.
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[[p, q]];
                let g = 100.0 * apq.abs();
                // Entries negligible against both diagonals are flushed to
                // zero once the process has settled.
                if sweep >= 4
                    && m[[p, p]].abs() + g == m[[p, p]].abs()
                    && m[[q, q]].abs() + g == m[[q, q]].abs()
                {
                    m[[p, q]] = 0.0;
                    m[[q, p]] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh || apq == 0.0 {
                    continue;
                }
                let diff = m[[q, q]] - m[[p, p]];
                let t = if diff.abs() + g == diff.abs() {
                    apq / diff
                } else {
                    let theta = 0.5 * diff / apq;
                    let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        t = -t;
                    }
                    t
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                m[[p, p]] -= h;
                m[[q, q]] += h;
                m[[p, q]] = 0.0;
                m[[q, p]] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let mrp = m[[r, p]];
                        let mrq = m[[r, q]];
                        m[[r, p]] = mrp - s * (mrq + tau * mrp);
                        m[[r, q]] = mrq + s * (mrp - tau * mrq);
                        m[[p, r]] = m[[r, p]];
                        m[[q, r]] = m[[r, q]];
                    }
                }
                for r in 0..n {
                    let vrp = v[[r, p]];
                    let vrq = v[[r, q]];
                    v[[r, p]] = vrp - s * (vrq + tau * vrp);
                    v[[r, q]] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
        if sweep + 1 == MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (off-diagonal mass {off:e})"
            )));
        }
    }

    // Sort eigenpairs by descending eigenvalue.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].partial_cmp(&m[[i, i]]).unwrap());
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    Ok((values, vectors))
}

fn upper_off_diagonal_abs_sum(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    let mut sum = 0.0;
    for p in 0..n - 1 {
        for q in p + 1..n {
            sum += m[[p, q]].abs();
        }
    }
    sum
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Data(format!(
            "Cholesky needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::Numeric(format!(
                        "matrix is not positive definite (pivot {sum:e} at {i})"
                    )));
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    Ok(l)
}

/// Diagonal of the inverse of a symmetric positive-definite matrix.
///
/// With A = L Lᵀ and M = L⁻¹, (A⁻¹)ᵢᵢ = Σⱼ M²ⱼᵢ, so only the triangular
/// inverse is formed.
pub fn spd_inverse_diagonal(a: &Array2<f64>) -> Result<Vec<f64>> {
    let l = cholesky(a)?;
    let n = l.nrows();
    // Column i of M solves L x = e_i; x is zero above row i.
    let mut diag = vec![0.0; n];
    let mut x = vec![0.0; n];
    for i in 0..n {
        for item in x.iter_mut().take(n).skip(i) {
            *item = 0.0;
        }
        x[i] = 1.0 / l[[i, i]];
        for r in i + 1..n {
            let mut sum = 0.0;
            for k in i..r {
                sum += l[[r, k]] * x[k];
            }
            x[r] = -sum / l[[r, r]];
        }
        diag[i] = x[i..n].iter().map(|v| v * v).sum();
    }
    Ok(diag)
}
