//! Small dense eigenvalue solver: complex Hessenberg reduction followed by
//! explicitly shifted QR with Wilkinson shifts. Strictly advisory; no
//! certification path consumes these values.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::Mat;

const EPS: f64 = 2.2e-16;

/// Eigenvalues of a real matrix.
pub fn eig_f64(m: &Mat<f64>) -> Result<Vec<Complex64>> {
    eig_complex(&m.to_complex())
}

/// Eigenvalues of a complex matrix by Hessenberg + shifted QR.
pub fn eig_complex(m: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    assert!(m.is_square(), "eigenvalues need a square matrix");
    let n = m.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    qr_eigenvalues(&mut h)
}

fn hessenberg(h: &mut Mat<Complex64>) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        // Householder vector annihilating column k below the subdiagonal
        let mut norm2 = 0.0f64;
        for i in k + 1..n {
            norm2 += h[(i, k)].norm_sqr();
        }
        if norm2 == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let alpha = if x0.norm() == 0.0 {
            Complex64::new(-norm2.sqrt(), 0.0)
        } else {
            -x0 / x0.norm() * norm2.sqrt()
        };
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H := (I - 2 v v*/|v|^2) H from the left (rows k+1..n)
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..v.len() {
                dot += v[i].conj() * h[(k + 1 + i, j)];
            }
            let scale = dot * (2.0 / vnorm2);
            for i in 0..v.len() {
                let t = scale * v[i];
                h[(k + 1 + i, j)] -= t;
            }
        }
        // H := H (I - 2 v v*/|v|^2) from the right (cols k+1..n)
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for j in 0..v.len() {
                dot += h[(i, k + 1 + j)] * v[j];
            }
            let scale = dot * (2.0 / vnorm2);
            for j in 0..v.len() {
                let t = scale * v[j].conj();
                h[(i, k + 1 + j)] -= t;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(h: &Mat<Complex64>, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_eigenvalues(h: &mut Mat<Complex64>) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut eigs = vec![Complex64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter_in_window = 0usize;
    let max_per_eig = 120usize;

    loop {
        // deflate tiny subdiagonals
        for i in 1..=hi {
            let s = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
            if h[(i, i - 1)].norm() <= EPS * s.max(1e-300) {
                h[(i, i - 1)] = Complex64::new(0.0, 0.0);
            }
        }
        // pull off converged eigenvalues from the bottom
        while hi > 0 && h[(hi, hi - 1)].norm() == 0.0 {
            eigs[hi] = h[(hi, hi)];
            hi -= 1;
            iter_in_window = 0;
        }
        if hi == 0 {
            eigs[0] = h[(0, 0)];
            return Ok(eigs);
        }
        // find the window start
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)].norm() != 0.0 {
            lo -= 1;
        }
        iter_in_window += 1;
        if iter_in_window > max_per_eig {
            return Err(Error::EigNonConvergence);
        }
        let shift = if iter_in_window % 16 == 0 {
            // exceptional shift to break symmetry cycles
            h[(hi, hi)] + Complex64::new(1.5 * h[(hi, hi - 1)].norm(), 0.5)
        } else {
            wilkinson_shift(h, hi)
        };
        qr_step(h, lo, hi, shift);
    }
}

/// One explicit shifted QR sweep on the active window via Givens rotations.
fn qr_step(h: &mut Mat<Complex64>, lo: usize, hi: usize, shift: Complex64) {
    let n = h.rows();
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    // QR by Givens on successive subdiagonals; remember rotations
    let mut rot: Vec<(Complex64, Complex64)> = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let a = h[(i, i)];
        let b = h[(i + 1, i)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if r == 0.0 {
            rot.push((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
            continue;
        }
        let c = a / r;
        let s = b / r;
        // rows i, i+1: [c* s*; -s c] [row_i; row_i+1]
        for j in i..n {
            let x = h[(i, j)];
            let y = h[(i + 1, j)];
            h[(i, j)] = c.conj() * x + s.conj() * y;
            h[(i + 1, j)] = -s * x + c * y;
        }
        rot.push((c, s));
    }
    // multiply R by the rotations from the right: columns i, i+1
    for (idx, (c, s)) in rot.iter().enumerate() {
        let i = lo + idx;
        for r in 0..=(i + 1).min(hi) {
            let x = h[(r, i)];
            let y = h[(r, i + 1)];
            h[(r, i)] = x * c + y * s;
            h[(r, i + 1)] = -x * s.conj() + y * c.conj();
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Largest eigenvalue (by real part) of a Hermitian matrix; imaginary parts
/// are discarded after a sanity bound.
pub fn hermitian_max_eig(m: &Mat<Complex64>) -> Result<f64> {
    let eigs = eig_complex(m)?;
    Ok(eigs.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Floating rank with a relative pivot threshold (row echelon, partial
/// pivoting). Heuristic, used only by the advisory validation layer.
pub fn rank_complex_f64(m: &Mat<Complex64>, rel_tol: f64) -> usize {
    let mut w = m.clone();
    let (rows, cols) = (w.rows(), w.cols());
    let scale = w.max_abs_complex().max(1e-300);
    let mut r = 0usize;
    for j in 0..cols {
        if r >= rows {
            break;
        }
        let mut p = r;
        for i in r + 1..rows {
            if w[(i, j)].norm() > w[(p, j)].norm() {
                p = i;
            }
        }
        if w[(p, j)].norm() <= rel_tol * scale {
            continue;
        }
        if p != r {
            for c in 0..cols {
                let tmp = w[(r, c)];
                w[(r, c)] = w[(p, c)];
                w[(p, c)] = tmp;
            }
        }
        for i in r + 1..rows {
            let f = w[(i, j)] / w[(r, j)];
            for c in 0..cols {
                let t = f * w[(r, c)];
                w[(i, c)] -= t;
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sort_by_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v
    }

    #[test]
    fn identity_eigs() {
        let m = Mat::<f64>::identity(4);
        let e = eig_f64(&m).unwrap();
        for x in e {
            assert!((x - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn known_spectrum() {
        // companion matrix of (x-1)(x-2)(x-3)
        let m = Mat::from_rows(vec![
            vec![0.0, 0.0, 6.0],
            vec![1.0, 0.0, -11.0],
            vec![0.0, 1.0, 6.0],
        ]);
        let e = sort_by_re(eig_f64(&m).unwrap());
        let want = [1.0, 2.0, 3.0];
        for (x, w) in e.iter().zip(want) {
            assert!((x.re - w).abs() < 1e-12 && x.im.abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn complex_rotation_spectrum() {
        // [[0,-1],[1,0]] has eigenvalues +/- i
        let m = Mat::from_rows(vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
        let mut e = eig_f64(&m).unwrap();
        e.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((e[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn defective_jordan_block() {
        let m = Mat::from_rows(vec![vec![2.0, 1.0], vec![0.0, 2.0]]);
        let e = eig_f64(&m).unwrap();
        for x in e {
            assert!((x.re - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_float() {
        let m = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).to_complex();
        assert_eq!(rank_complex_f64(&m, 1e-10), 1);
    }
}
