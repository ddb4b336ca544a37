//! Exact LU decomposition with partial pivoting, plus inverse and rank.

use crate::error::{Error, Result};
use crate::scalar::Field;

use super::Mat;

/// `P A = L U` with unit lower triangular `L`.
#[derive(Debug, Clone)]
pub struct LuFactors<T> {
    /// `perm[k]` is the original row sitting at position `k`.
    pub perm: Vec<usize>,
    pub l: Mat<T>,
    pub u: Mat<T>,
}

impl<T: Field> LuFactors<T> {
    /// Solves `A x = rhs` column by column.
    pub fn solve(&self, rhs: &Mat<T>) -> Result<Mat<T>> {
        let n = self.l.rows();
        assert_eq!(rhs.rows(), n, "rhs row count");
        let m = rhs.cols();
        let mut x = Mat::<T>::zeros(n, m);
        for col in 0..m {
            // forward: L y = P rhs
            let mut y = vec![T::zero(); n];
            for i in 0..n {
                let mut acc = rhs[(self.perm[i], col)].clone();
                for j in 0..i {
                    acc = acc - self.l[(i, j)].clone() * y[j].clone();
                }
                y[i] = acc;
            }
            // backward: U x = y
            for i in (0..n).rev() {
                let mut acc = y[i].clone();
                for j in i + 1..n {
                    acc = acc - self.u[(i, j)].clone() * x[(j, col)].clone();
                }
                let piv = self.u[(i, i)].inv().ok_or(Error::Singular { rank: i, dim: n })?;
                x[(i, col)] = acc * piv;
            }
        }
        Ok(x)
    }
}

/// Exact `P A = L U` with partial pivoting on the largest remaining column
/// entry. Singular input is reported with its exact rank.
pub fn lu_decompose<T: Field>(a: &Mat<T>) -> Result<LuFactors<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "LU needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut u = a.clone();
    let mut l = Mat::<T>::identity(n);
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        // pivot: largest magnitude in column k at or below the diagonal
        let mut p = k;
        for i in k + 1..n {
            if u[(i, k)].abs_cmp(&u[(p, k)]) == std::cmp::Ordering::Greater {
                p = i;
            }
        }
        if u[(p, k)].is_zero() {
            return Err(Error::Singular { rank: rank(a), dim: n });
        }
        if p != k {
            for j in 0..n {
                let tmp = u[(k, j)].clone();
                u[(k, j)] = u[(p, j)].clone();
                u[(p, j)] = tmp;
            }
            for j in 0..k {
                let tmp = l[(k, j)].clone();
                l[(k, j)] = l[(p, j)].clone();
                l[(p, j)] = tmp;
            }
            perm.swap(k, p);
        }
        let piv_inv = u[(k, k)].inv().expect("nonzero pivot");
        for i in k + 1..n {
            let factor = u[(i, k)].clone() * piv_inv.clone();
            l[(i, k)] = factor.clone();
            u[(i, k)] = T::zero();
            if factor.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let term = factor.clone() * u[(k, j)].clone();
                u[(i, j)] = u[(i, j)].clone() - term;
            }
        }
    }
    Ok(LuFactors { perm, l, u })
}

/// Exact inverse; `M * M^{-1} = I` exactly.
pub fn invert<T: Field>(a: &Mat<T>) -> Result<Mat<T>> {
    let f = lu_decompose(a)?;
    f.solve(&Mat::identity(a.rows()))
}

/// Exact rank by elimination with full pivoting (rectangular allowed).
pub fn rank<T: Field>(a: &Mat<T>) -> usize {
    let mut w = a.clone();
    let (rows, cols) = (w.rows(), w.cols());
    let mut r = 0usize;
    let mut used_cols = vec![false; cols];
    while r < rows {
        // find any pivot of largest magnitude in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in r..rows {
            for j in 0..cols {
                if used_cols[j] || w[(i, j)].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some((i, j)),
                    Some((bi, bj)) => {
                        if w[(i, j)].abs_cmp(&w[(bi, bj)]) == std::cmp::Ordering::Greater {
                            Some((i, j))
                        } else {
                            Some((bi, bj))
                        }
                    }
                };
            }
        }
        let Some((pi, pj)) = best else { break };
        // swap row pi up to r
        if pi != r {
            for j in 0..cols {
                let tmp = w[(r, j)].clone();
                w[(r, j)] = w[(pi, j)].clone();
                w[(pi, j)] = tmp;
            }
        }
        used_cols[pj] = true;
        let piv_inv = w[(r, pj)].inv().expect("nonzero pivot");
        for i in r + 1..rows {
            if w[(i, pj)].is_zero() {
                continue;
            }
            let factor = w[(i, pj)].clone() * piv_inv.clone();
            for j in 0..cols {
                let term = factor.clone() * w[(r, j)].clone();
                w[(i, j)] = w[(i, j)].clone() - term;
            }
        }
        r += 1;
    }
    r
}

/// Basis of the right nullspace by reduced row echelon form; one basis
/// vector per free column.
pub fn nullspace<T: Field>(a: &Mat<T>) -> Vec<Vec<T>> {
    let mut w = a.clone();
    let (rows, cols) = (w.rows(), w.cols());
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let mut p = row;
        for i in row + 1..rows {
            if w[(i, col)].abs_cmp(&w[(p, col)]) == std::cmp::Ordering::Greater {
                p = i;
            }
        }
        if w[(p, col)].is_zero() {
            continue;
        }
        if p != row {
            for j in 0..cols {
                let tmp = w[(row, j)].clone();
                w[(row, j)] = w[(p, j)].clone();
                w[(p, j)] = tmp;
            }
        }
        let inv = w[(row, col)].inv().expect("nonzero pivot");
        for j in 0..cols {
            w[(row, j)] = w[(row, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i == row || w[(i, col)].is_zero() {
                continue;
            }
            let f = w[(i, col)].clone();
            for j in 0..cols {
                let t = f.clone() * w[(row, j)].clone();
                w[(i, j)] = w[(i, j)].clone() - t;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let mut basis = Vec::new();
    for f in 0..cols {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut x = vec![T::zero(); cols];
        x[f] = T::one();
        for (i, &pc) in pivot_cols.iter().enumerate() {
            x[pc] = -w[(i, f)].clone();
        }
        basis.push(x);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn mr(rows: Vec<Vec<i64>>) -> Mat<Scalar> {
        Mat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Scalar::from_int).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_trivial() {
        let id = Mat::<Scalar>::identity(3);
        let f = lu_decompose(&id).unwrap();
        assert_eq!(f.l, id);
        assert_eq!(f.u, id);
        assert_eq!(f.perm, vec![0, 1, 2]);
    }

    #[test]
    fn singular_reports_rank() {
        let a = mr(vec![vec![1, 1], vec![1, 1]]);
        match lu_decompose(&a) {
            Err(Error::Singular { rank, dim }) => {
                assert_eq!(rank, 1);
                assert_eq!(dim, 2);
            }
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn inverse_small() {
        let a = mr(vec![vec![1, 1], vec![0, 1]]);
        let inv = invert(&a).unwrap();
        assert_eq!(inv, mr(vec![vec![1, -1], vec![0, 1]]));
        let g = Mat::diag(vec![
            Scalar::ratio(2, 5),
            Scalar::ratio(20, 29),
            Scalar::ratio(5, 11),
        ]);
        let gi = invert(&g).unwrap();
        assert_eq!(
            gi,
            Mat::diag(vec![
                Scalar::ratio(5, 2),
                Scalar::ratio(29, 20),
                Scalar::ratio(11, 5),
            ])
        );
        assert_eq!(g.matmul(&gi), Mat::identity(3));
    }

    #[test]
    fn lu_reconstructs() {
        let a = mr(vec![vec![0, 2, 1], vec![1, 3, 7], vec![5, 1, 2]]);
        let f = lu_decompose(&a).unwrap();
        let pa = Mat::from_fn(3, 3, |i, j| a[(f.perm[i], j)].clone());
        assert_eq!(f.l.matmul(&f.u), pa);
    }

    #[test]
    fn rank_rectangular() {
        let a = mr(vec![vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(rank(&a), 1);
        let b = mr(vec![vec![1, 0, 0], vec![0, 0, 1]]);
        assert_eq!(rank(&b), 2);
    }
}
