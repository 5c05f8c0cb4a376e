use super::NumericsError;
use crate::Real;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<T>>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Cyclic Jacobi rotations on a dense symmetric matrix (row-major, `k × k`).
///
/// Stops once the off-diagonal Frobenius norm drops below `rel_tol·‖M‖_F`
/// or after `max_sweeps` full sweeps.
pub fn symmetric_eigen<T: Real>(matrix: &[Vec<T>], rel_tol: T, max_sweeps: usize) -> SymmetricEigen<T> {
    let k = matrix.len();
    let mut a: Vec<Vec<T>> = matrix.to_vec();
    let mut v: Vec<Vec<T>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let norm = a.iter().flatten().map(|x| *x * *x).sum::<T>().sqrt();
    let threshold = rel_tol * norm;
    let off = |a: &Vec<Vec<T>>| {
        let mut s = T::zero();
        for i in 0..k {
            for j in (i + 1)..k {
                s = s + T::lit(2.0) * a[i][j] * a[i][j];
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    let mut converged = off(&a) <= threshold;
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for r in 0..k {
                    let arp = a[r][p];
                    let arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[p][r];
                    let aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
        converged = off(&a) <= threshold;
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..k).map(|r| v[r][i]).collect()).collect();
    SymmetricEigen { values, vectors, sweeps, converged }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear<T: Real>(a: &[Vec<T>], b: &[T]) -> Result<Vec<T>, NumericsError> {
    let n = b.len();
    let mut m: Vec<Vec<T>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    let scale = a.iter().flatten().fold(T::zero(), |acc, x| acc.max(x.abs()));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col].abs() <= T::epsilon() * T::lit(1e3) * scale {
            return Err(NumericsError::Singular);
        }
        m.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = m[row][col] / m[col][col];
            for c in col..=n {
                let delta = factor * m[col][c];
                m[row][c] = m[row][c] - delta;
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = m[row][n];
        for c in (row + 1)..n {
            acc = acc - m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}
