//! Operator calculus on symmetric matrices for a nilpotent seed `E`:
//! the maps `L_E`, `P_E`, their bridge `Phi_E` with inverse `Psi_E`,
//! kernel bases, and pre-images under `P_E`.
//!
//! All maps are exact over an exact field and work verbatim over `f64`
//! for the floating reconstruction path.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::peer::{e_tilde, exp_nilpotent};
use crate::scalar::{Field, Rational};

/// `L_E : X -> X E + E^T X`.
pub fn map_l<T: Field>(e: &Mat<T>, x: &Mat<T>) -> Mat<T> {
    &x.matmul(e) + &e.transpose().matmul(x)
}

/// `P_E : X -> Theta^T X Theta - X` with `Theta = exp(E)` (finite series).
pub fn map_p<T: Field>(e: &Mat<T>, x: &Mat<T>) -> Mat<T> {
    let theta = exp_nilpotent(e);
    &theta.transpose().matmul(x).matmul(&theta) - x
}

/// `Phi_E(X) = sum_k X_k / (k+1)!` with `X_0 = X`, `X_k = L_E(X_{k-1})`.
/// The recursion terminates: `X_{2s-1} = 0` for s-dimensional `E`.
pub fn map_phi<T: Field>(e: &Mat<T>, x: &Mat<T>) -> Mat<T> {
    let s = e.rows();
    let mut acc = Mat::zeros(x.rows(), x.cols());
    let mut xk = x.clone();
    let mut coeff = T::one(); // 1/(k+1)!
    for k in 0..=(2 * s).saturating_sub(2) {
        coeff = coeff * T::from_ratio(1, (k + 1) as u64);
        if xk.is_zero() {
            break;
        }
        acc = &acc + &xk.scale(&coeff);
        xk = map_l(e, &xk);
    }
    acc
}

/// `Psi_E(X) = -L_E(X)/2 + X - sum_{k>=1} (-1)^k beta_k L_E^{2k}(X) / (2k)!`,
/// the inverse of `Phi_E`: `Phi_E(Psi_E(X)) = X` exactly.
pub fn map_psi<T: Field>(e: &Mat<T>, x: &Mat<T>) -> Mat<T> {
    let s = e.rows();
    let kmax = s.saturating_sub(1); // L_E^{2k}(X) = 0 once 2k >= 2s-1
    let betas = bernoulli_beta_in::<T>(kmax);
    let mut acc = x - &map_l(e, x).scale(&T::from_ratio(1, 2));
    let mut l2k = x.clone();
    let mut inv_fact = T::one(); // 1/(2k)!
    for (k, beta) in betas.iter().enumerate() {
        let k = k + 1;
        l2k = map_l(e, &map_l(e, &l2k));
        inv_fact = inv_fact * T::from_ratio(1, ((2 * k - 1) * 2 * k) as u64);
        if l2k.is_zero() {
            break;
        }
        let sign: T = if k % 2 == 0 { T::one() } else { -T::one() };
        let coeff = sign * beta.clone() * inv_fact.clone();
        acc = &acc - &l2k.scale(&coeff);
    }
    acc
}

/// Bernoulli coefficients `beta_k = |B_{2k}|` for the series of
/// `psi(z) = z / (e^z - 1) = 1 - z/2 + z^2/12 - z^4/720 + ...`
///
/// Computed in-field through the standard recurrence
/// `B_n = -1/(n+1) * sum_{j<n} C(n+1, j) B_j`.
pub fn bernoulli_beta_in<T: Field>(kmax: usize) -> Vec<T> {
    let nmax = 2 * kmax;
    let mut b: Vec<T> = Vec::with_capacity(nmax + 1);
    b.push(T::one());
    for n in 1..=nmax {
        let mut acc = T::zero();
        for (j, bj) in b.iter().enumerate() {
            let c = binomial_u128(n as u64 + 1, j as u64);
            acc = acc + int_in::<T>(c) * bj.clone();
        }
        b.push(-(acc * T::from_ratio(1, n as u64 + 1)));
    }
    (1..=kmax)
        .map(|k| {
            let v = b[2 * k].clone();
            // B_{2k} alternates sign starting positive at k=1
            if k % 2 == 1 {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Bernoulli table over the exact rationals (beta_k = |B_{2k}|).
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    pub beta: Vec<Rational>,
}

impl BernoulliTable {
    pub fn up_to(kmax: usize) -> Self {
        let betas = bernoulli_beta_in::<crate::scalar::Scalar>(kmax);
        let beta = betas
            .into_iter()
            .map(|s| match s {
                crate::scalar::Scalar::Rat(r) => r,
                crate::scalar::Scalar::Quad(_) => unreachable!("Bernoulli numbers are rational"),
            })
            .collect();
        BernoulliTable { beta }
    }
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

fn int_in<T: Field>(v: u128) -> T {
    if v <= i64::MAX as u128 {
        T::from_ratio(v as i64, 1)
    } else {
        int_in::<T>(v >> 1) * T::from_ratio(2, 1) + T::from_ratio((v & 1) as i64, 1)
    }
}

/// Basis of the symmetric kernel `{K : K E + E^T K = 0}`.
#[derive(Debug, Clone)]
pub struct KernelBasis<T = crate::scalar::Scalar> {
    pub matrices: Vec<Mat<T>>,
}

impl<T: Field> KernelBasis<T> {
    pub fn dimension(&self) -> usize {
        self.matrices.len()
    }

    pub fn combination(&self, coeffs: &[T]) -> Mat<T> {
        assert_eq!(coeffs.len(), self.matrices.len());
        let s = self.matrices[0].rows();
        let mut acc = Mat::zeros(s, s);
        for (c, k) in coeffs.iter().zip(&self.matrices) {
            acc = &acc + &k.scale(c);
        }
        acc
    }
}

/// Kernel basis for the scaled shift matrix `e_tilde(s)`: one element per
/// even antidiagonal `i + j > s` (1-based), filled by the one-step recursion
/// `(j-1) x_{i,j-1} + (i-1) x_{i-1,j} = 0` along the antidiagonal.
/// Dimension is `floor((s+1)/2)`.
pub fn kernel_basis_tilde<T: Field>(s: usize) -> KernelBasis<T> {
    let mut matrices = Vec::new();
    let mut t = 2 * s;
    while t > s {
        let mut k = Mat::<T>::zeros(s, s);
        // 1-based antidiagonal i + j = t, seed at the last column
        let i0 = t - s;
        k[(i0 - 1, s - 1)] = T::one();
        let mut a = i0;
        while a + 1 <= t - 1 && a + 1 <= s {
            // x_{a+1, t-a-1} = -(a) / (t-a-1) * x_{a, t-a}  (1-based)
            let prev = k[(a - 1, t - a - 1)].clone();
            let coeff = T::from_ratio(-(a as i64), (t - a - 1) as u64);
            k[(a, t - a - 2)] = coeff * prev;
            a += 1;
        }
        debug_assert!(k.is_symmetric());
        matrices.push(k);
        t -= 2;
    }
    matrices.reverse();
    KernelBasis { matrices }
}

/// Kernel basis of `L_E` for `E = U Etilde U^{-1}`: elements transform by
/// the congruence `U^{-T} Ktilde U^{-1}`.
pub fn kernel_basis_for<T: Field>(u: &Mat<T>) -> Result<KernelBasis<T>> {
    let s = u.rows();
    let u_inv = u.inverse()?;
    let tilde = kernel_basis_tilde::<T>(s);
    let matrices = tilde
        .matrices
        .into_iter()
        .map(|k| u_inv.transpose().matmul(&k).matmul(&u_inv))
        .collect();
    Ok(KernelBasis { matrices })
}

/// Symmetric pre-image with its free kernel coordinates.
#[derive(Debug, Clone)]
pub struct Preimage<T> {
    pub x: Mat<T>,
    /// 0-based symmetric positions left free by the elimination (set to the
    /// pin value or zero); these parameterize the kernel.
    pub free_positions: Vec<(usize, usize)>,
}

/// Solves `P_E(X) = U` for symmetric `X`.
///
/// Unknowns are eliminated in antidiagonal order (off-diagonal entries
/// first), so the free parameters land on the diagonal positions of the
/// even antidiagonals - the kernel coordinates. Optional `pins` fix chosen
/// entries of `X` exactly. An inconsistent right-hand side is reported with
/// its residual.
pub fn preimage_p<T: Field>(
    e: &Mat<T>,
    u: &Mat<T>,
    pins: &[((usize, usize), T)],
    residual_tol: f64,
) -> Result<Preimage<T>> {
    if !u.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    solve_symmetric_map(|x| map_p(e, x), e.rows(), u, pins, residual_tol)
}

/// Solves `L_E(X) = U` for symmetric `X` (same elimination as `preimage_p`).
pub fn preimage_l<T: Field>(
    e: &Mat<T>,
    u: &Mat<T>,
    pins: &[((usize, usize), T)],
    residual_tol: f64,
) -> Result<Preimage<T>> {
    if !u.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    solve_symmetric_map(|x| map_l(e, x), e.rows(), u, pins, residual_tol)
}

/// Symmetric positions ordered by antidiagonal, off-diagonal entries first
/// within each antidiagonal.
fn sym_positions(s: usize) -> Vec<(usize, usize)> {
    let mut pos: Vec<(usize, usize)> = (0..s)
        .flat_map(|i| (i..s).map(move |j| (i, j)))
        .collect();
    pos.sort_by_key(|&(i, j)| (i + j, i)); // larger j-i first within antidiagonal
    pos
}

fn basis_matrix<T: Field>(s: usize, (i, j): (usize, usize)) -> Mat<T> {
    let mut m = Mat::zeros(s, s);
    m[(i, j)] = T::one();
    if i != j {
        m[(j, i)] = T::one();
    }
    m
}

fn solve_symmetric_map<T: Field>(
    op: impl Fn(&Mat<T>) -> Mat<T>,
    s: usize,
    u: &Mat<T>,
    pins: &[((usize, usize), T)],
    residual_tol: f64,
) -> Result<Preimage<T>> {
    let cols = sym_positions(s);
    let ncols = cols.len();
    let col_of: std::collections::HashMap<(usize, usize), usize> =
        cols.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();

    // rows: image equations per symmetric position, then pin equations
    let nrows = ncols + pins.len();
    let mut a = Mat::<T>::zeros(nrows, ncols);
    let mut rhs = vec![T::zero(); nrows];
    for (cidx, &p) in cols.iter().enumerate() {
        let img = op(&basis_matrix::<T>(s, p));
        for (ridx, &(ri, rj)) in cols.iter().enumerate() {
            a[(ridx, cidx)] = img[(ri, rj)].clone();
        }
    }
    for (ridx, &(ri, rj)) in cols.iter().enumerate() {
        rhs[ridx] = u[(ri, rj)].clone();
    }
    for (k, ((pi, pj), val)) in pins.iter().enumerate() {
        let key = if pi <= pj { (*pi, *pj) } else { (*pj, *pi) };
        let cidx = *col_of.get(&key).ok_or_else(|| {
            Error::Dimension(format!("pin position ({pi},{pj}) out of range"))
        })?;
        a[(ncols + k, cidx)] = T::one();
        rhs[ncols + k] = val.clone();
    }

    // magnitude floor for float pivots
    let scale = {
        let mut sc = T::one();
        for i in 0..nrows {
            for j in 0..ncols {
                if a[(i, j)].abs_cmp(&sc) == std::cmp::Ordering::Greater {
                    sc = a[(i, j)].clone();
                }
            }
        }
        sc
    };
    let negligible = |x: &T| -> bool {
        if T::EXACT {
            x.is_zero()
        } else {
            let t = scale.clone() * T::from_ratio(1, 1_000_000_000_000);
            x.abs_cmp(&t) != std::cmp::Ordering::Greater
        }
    };

    // column-ordered Gaussian elimination with row pivoting
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut used_row = vec![false; nrows];
    for c in 0..ncols {
        let mut best: Option<usize> = None;
        for r in 0..nrows {
            if used_row[r] || negligible(&a[(r, c)]) {
                continue;
            }
            best = match best {
                None => Some(r),
                Some(b) => {
                    if a[(r, c)].abs_cmp(&a[(b, c)]) == std::cmp::Ordering::Greater {
                        Some(r)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let Some(pr) = best else { continue };
        used_row[pr] = true;
        pivot_row_of_col[c] = Some(pr);
        let inv = a[(pr, c)].inv().expect("nonzero pivot");
        for r in 0..nrows {
            if r == pr || a[(r, c)].is_zero() {
                continue;
            }
            let f = a[(r, c)].clone() * inv.clone();
            for cc in 0..ncols {
                let t = f.clone() * a[(pr, cc)].clone();
                a[(r, cc)] = a[(r, cc)].clone() - t;
            }
            let t = f * rhs[pr].clone();
            rhs[r] = rhs[r].clone() - t;
        }
    }

    // consistency: unused rows must have vanished
    for r in 0..nrows {
        if used_row[r] {
            continue;
        }
        let row_zero = (0..ncols).all(|c| negligible(&a[(r, c)]));
        if row_zero {
            let resid = &rhs[r];
            let bad = if T::EXACT {
                !resid.is_zero()
            } else {
                let t = T::from_ratio((residual_tol * 1e15) as i64, 1_000_000_000_000_000);
                resid.abs_cmp(&t) == std::cmp::Ordering::Greater
            };
            if bad {
                return Err(Error::InconsistentSystem(format!("{resid}")));
            }
        }
    }

    let mut x = Mat::<T>::zeros(s, s);
    let mut free = Vec::new();
    for (c, &pos) in cols.iter().enumerate() {
        match pivot_row_of_col[c] {
            Some(pr) => {
                let v = rhs[pr].clone() * a[(pr, c)].inv().expect("pivot");
                x[(pos.0, pos.1)] = v.clone();
                x[(pos.1, pos.0)] = v;
            }
            None => free.push(pos),
        }
    }
    Ok(Preimage { x, free_positions: free })
}

/// Nilpotency index data: the terminating recursion `X_k = L_E(X_{k-1})`
/// reaches zero at `k = 2s-1` for every symmetric `X`.
pub fn l_power_termination<T: Field>(e: &Mat<T>, x: &Mat<T>) -> usize {
    let mut xk = x.clone();
    let mut k = 0usize;
    while !xk.is_zero() {
        xk = map_l(e, &xk);
        k += 1;
        if k > 2 * e.rows() + 2 {
            break;
        }
    }
    k
}

/// Convenience: kernel dimension formula `floor((s+1)/2)`.
pub fn kernel_dimension(s: usize) -> usize {
    (s + 1) / 2
}

/// `e_tilde` re-export used by callers that pair the kernel with the map.
pub fn nordsieck_seed<T: Field>(s: usize) -> Mat<T> {
    e_tilde(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn sym_rand(s: usize, seed: &mut u64) -> Mat<Scalar> {
        let mut next = || {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 33) % 19) as i64 - 9
        };
        let mut m = Mat::zeros(s, s);
        for i in 0..s {
            for j in i..s {
                let v = Scalar::ratio(next(), 1 + (next().unsigned_abs() % 4) as i64);
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn map_l_basics() {
        let e: Mat<Scalar> = e_tilde(2);
        let img = map_l(&e, &Mat::identity(2));
        let want = Mat::from_rows(vec![
            vec![Scalar::zero(), Scalar::one()],
            vec![Scalar::one(), Scalar::zero()],
        ]);
        assert_eq!(img, want);
        // e_s e_s^T is in the kernel
        let mut es = Mat::<Scalar>::zeros(3, 3);
        es[(2, 2)] = Scalar::one();
        assert!(map_l(&e_tilde::<Scalar>(3), &es).is_zero());
        // E = 0 annihilates everything
        let z = Mat::<Scalar>::zeros(3, 3);
        let mut seed = 7u64;
        assert!(map_l(&z, &sym_rand(3, &mut seed)).is_zero());
    }

    #[test]
    fn map_p_basics() {
        let e: Mat<Scalar> = e_tilde(2);
        let img = map_p(&e, &Mat::identity(2));
        // Theta = [[1,1],[0,1]]: Theta^T Theta - I = [[0,1],[1,1]]
        let want = Mat::from_rows(vec![
            vec![Scalar::zero(), Scalar::one()],
            vec![Scalar::one(), Scalar::one()],
        ]);
        assert_eq!(img, want);
        // kernel of L is kernel of P
        let e3: Mat<Scalar> = e_tilde(3);
        for k in kernel_basis_tilde::<Scalar>(3).matrices {
            assert!(map_p(&e3, &k).is_zero());
        }
        let z = Mat::<Scalar>::zeros(2, 2);
        assert!(map_p(&z, &Mat::identity(2)).is_zero());
    }

    #[test]
    fn map_phi_nodes_01() {
        // E for nodes (0,1); Phi_E(I) computed by the hand recursion
        let e = Mat::from_rows(vec![
            vec![Scalar::from_int(-1), Scalar::from_int(1)],
            vec![Scalar::from_int(-1), Scalar::from_int(1)],
        ]);
        let phi = map_phi(&e, &Mat::identity(2));
        let want = Mat::from_rows(vec![
            vec![Scalar::ratio(2, 3), Scalar::ratio(-2, 3)],
            vec![Scalar::ratio(-2, 3), Scalar::ratio(8, 3)],
        ]);
        assert_eq!(phi, want);
        // kernel fixed point
        let e3: Mat<Scalar> = e_tilde(3);
        for k in kernel_basis_tilde::<Scalar>(3).matrices {
            assert_eq!(map_phi(&e3, &k), k);
        }
        // E = 0 is the identity map
        let z = Mat::<Scalar>::zeros(3, 3);
        let mut seed = 3u64;
        let x = sym_rand(3, &mut seed);
        assert_eq!(map_phi(&z, &x), x);
    }

    #[test]
    fn map_psi_inverse_of_phi() {
        let e: Mat<Scalar> = e_tilde(2);
        let psi = map_psi(&e, &Mat::identity(2));
        let want = Mat::from_rows(vec![
            vec![Scalar::one(), Scalar::ratio(-1, 2)],
            vec![Scalar::ratio(-1, 2), Scalar::ratio(7, 6)],
        ]);
        assert_eq!(psi, want);
        assert_eq!(map_phi(&e, &psi), Mat::identity(2));
        let mut seed = 11u64;
        for s in 1..=5usize {
            let es: Mat<Scalar> = e_tilde(s);
            let x = sym_rand(s, &mut seed);
            assert_eq!(map_phi(&es, &map_psi(&es, &x)), x);
        }
    }

    #[test]
    fn bernoulli_values() {
        let t = BernoulliTable::up_to(4);
        assert_eq!(t.beta[0], Rational::new(1.into(), 6.into()));
        assert_eq!(t.beta[1], Rational::new(1.into(), 30.into()));
        assert_eq!(t.beta[2], Rational::new(1.into(), 42.into()));
        assert_eq!(t.beta[3], Rational::new(1.into(), 30.into()));
    }

    #[test]
    fn kernel_dimensions_and_membership() {
        for s in 1..=6usize {
            let basis = kernel_basis_tilde::<Scalar>(s);
            assert_eq!(basis.dimension(), kernel_dimension(s), "s = {s}");
            let e: Mat<Scalar> = e_tilde(s);
            for k in &basis.matrices {
                assert!(k.is_symmetric());
                assert!(map_l(&e, k).is_zero());
            }
        }
        // s=3 explicit span: e3 e3^T and [[0,0,1],[0,-1/2,0],[1,0,0]]
        let b3 = kernel_basis_tilde::<Scalar>(3);
        let k_anti = Mat::from_rows(vec![
            vec![Scalar::zero(), Scalar::zero(), Scalar::one()],
            vec![Scalar::zero(), Scalar::ratio(-1, 2), Scalar::zero()],
            vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
        ]);
        assert!(b3.matrices.contains(&k_anti));
        let mut es = Mat::<Scalar>::zeros(3, 3);
        es[(2, 2)] = Scalar::one();
        assert!(b3.matrices.contains(&es));
    }

    #[test]
    fn preimage_matches_closed_form_s4() {
        // u33, u34, u44 nonzero (1-based); kernel parameters default to zero
        let s = 4;
        let mut u = Mat::<Scalar>::zeros(s, s);
        u[(2, 2)] = Scalar::from_int(4); // u33
        u[(2, 3)] = Scalar::from_int(-6); // u34
        u[(3, 2)] = Scalar::from_int(-6);
        u[(3, 3)] = Scalar::from_int(12); // u44
        let e: Mat<Scalar> = e_tilde(s);
        let pre = preimage_p(&e, &u, &[], 0.0).unwrap();
        // x14 = -3/4 u33, x23 = 1/4 u33, x24 = -3/2 x33 - 3/4 u33 + 1/2 u34,
        // x34 = 1/4 u33 - 1/2 u34 + 1/6 u44 (verified against map_p below)
        assert_eq!(pre.x[(0, 3)], Scalar::from_int(-3));
        assert_eq!(pre.x[(1, 2)], Scalar::from_int(1));
        assert_eq!(pre.x[(1, 3)], Scalar::from_int(-6));
        assert_eq!(pre.x[(2, 3)], Scalar::from_int(6));
        assert_eq!(pre.x[(2, 2)], Scalar::zero());
        assert_eq!(pre.x[(3, 3)], Scalar::zero());
        assert_eq!(pre.free_positions, vec![(2, 2), (3, 3)]);
        assert_eq!(map_p(&e, &pre.x), u);
    }

    #[test]
    fn preimage_zero_gives_kernel_parameterization() {
        let s = 3;
        let e: Mat<Scalar> = e_tilde(s);
        let pre = preimage_p(&e, &Mat::zeros(s, s), &[], 0.0).unwrap();
        assert!(pre.x.is_zero());
        assert_eq!(pre.free_positions.len(), kernel_dimension(s));
    }

    #[test]
    fn preimage_with_pins() {
        let s = 3;
        let e: Mat<Scalar> = e_tilde(s);
        let mut u = Mat::<Scalar>::zeros(s, s);
        u[(2, 2)] = Scalar::from_int(4);
        let pins = [((1usize, 1usize), Scalar::from_int(7))];
        let pre = preimage_p(&e, &u, &pins, 0.0).unwrap();
        assert_eq!(pre.x[(1, 1)], Scalar::from_int(7));
        assert_eq!(map_p(&e, &pre.x), u);
    }

    #[test]
    fn preimage_inconsistent_reports() {
        let s = 3;
        let e: Mat<Scalar> = e_tilde(s);
        // u11 != 0 is never in the range
        let mut u = Mat::<Scalar>::zeros(s, s);
        u[(0, 0)] = Scalar::one();
        assert!(matches!(
            preimage_p(&e, &u, &[], 0.0),
            Err(Error::InconsistentSystem(_))
        ));
    }

    #[test]
    fn termination_at_2s_minus_1() {
        let mut seed = 23u64;
        for s in 1..=5usize {
            let e: Mat<Scalar> = e_tilde(s);
            let x = sym_rand(s, &mut seed);
            assert!(l_power_termination(&e, &x) <= 2 * s - 1, "s = {s}");
        }
    }
}
