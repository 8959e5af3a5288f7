//! Dense symmetric eigensolver (cyclic Jacobi) and small helpers shared by
//! the spectral and certification code.

use nalgebra::{DMatrix, DVector, SMatrix};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a real symmetric matrix.
///
/// `values` are sorted non-increasing; column `j` of `vectors` is the unit
/// eigenvector for `values[j]`, signed so that its first entry with
/// magnitude above `1e-12` is positive.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

/// Cyclic-by-row Jacobi rotations until the off-diagonal Frobenius norm drops
/// below `eps * ||A||_F`.
///
/// Only the upper triangle is trusted; the input is symmetrized first.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: a.ncols(),
        });
    }
    let mut m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = DMatrix::<f64>::identity(n, n);

    let scale = m.norm();
    let target = f64::EPSILON * scale;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= target || scale == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // Rutishauser's stable rotation.
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps Jacobi's index order among exact ties
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut vec = v.column(src).into_owned();
        if let Some(first) = vec.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                vec.neg_mut();
            }
        }
        vectors.set_column(col, &vec);
    }
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

fn rotate(m: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let n = m.nrows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    // the rotation annihilates the pair exactly in exact arithmetic
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn off_diagonal_norm(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)] * m[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// Largest eigenvalue and its unit eigenvector of a small symmetric matrix.
pub fn max_eigenpair<const N: usize>(m: &SMatrix<f64, N, N>) -> Result<(f64, SMatrix<f64, N, 1>)> {
    let dm = DMatrix::from_column_slice(N, N, m.as_slice());
    let eig = jacobi_eigen(&dm)?;
    let v = SMatrix::<f64, N, 1>::from_iterator(eig.vectors.column(0).iter().copied());
    Ok((eig.values[0], v))
}

/// Extreme eigenvalues `(min, max)` of a small symmetric matrix.
pub fn eigen_range<const N: usize>(m: &SMatrix<f64, N, N>) -> Result<(f64, f64)> {
    let dm = DMatrix::from_column_slice(N, N, m.as_slice());
    let eig = jacobi_eigen(&dm)?;
    Ok((eig.values[N - 1], eig.values[0]))
}
