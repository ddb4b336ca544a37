//! A-stability certification: the three test-matrix forms, exact PSD
//! certification, the block decomposition of the Nordsieck form, and the
//! constructive directions (generic constructor, slack parametrization,
//! Z-free seeds, zero-slack weight recovery for a given method).

use crate::error::{Error, Result};
use crate::linalg::{nullspace, psd_check, Mat, PdCheck, PsdCertificate, Verdict};
use crate::maps::{kernel_basis_for, map_l, map_p, map_phi, map_psi, preimage_p, KernelBasis};
use crate::peer::{
    assemble_order_sm1, build_e_theta, e_tilde, vandermonde, NodeSet, PeerMethod,
    Representation, WeightPair,
};
use crate::scalar::{Field, FieldSpec, Scalar};

/// Certification outcome for one test-matrix form.
#[derive(Debug, Clone)]
pub struct TestMatrixReport {
    pub form: Representation,
    pub matrix: Mat<Scalar>,
    pub certificate: PsdCertificate,
    /// Number of leading rows/columns that vanish identically (Nordsieck
    /// form only; zero otherwise).
    pub block_defect: usize,
    /// The trailing nontrivial block of the Nordsieck decomposition.
    pub nontrivial_block: Option<Mat<Scalar>>,
    pub a_stable: bool,
    pub z_verdict: Verdict,
    pub w_verdict: Verdict,
    pub warnings: Vec<String>,
}

/// Slack data for the parametrized constructor: a PSD block `M11`
/// (with the structural zero pattern), an off-diagonal block `M12`,
/// and coefficients over the kernel basis.
#[derive(Debug, Clone)]
pub struct SlackSpec {
    pub m11: Mat<Scalar>,
    pub m12: Mat<Scalar>,
    pub kernel_coeffs: Vec<Scalar>,
}

impl SlackSpec {
    pub fn zero(s: usize, kernel_dim: usize) -> Self {
        SlackSpec {
            m11: Mat::zeros(s, s),
            m12: Mat::zeros(s, s),
            kernel_coeffs: vec![Scalar::zero(); kernel_dim],
        }
    }
}

fn ones<T: Field>(s: usize) -> Vec<T> {
    vec![T::one(); s]
}

/// Original-form test matrix
/// `[[G^T Z + Z G - W, -G^T Z B], [-B^T Z G, W]]`.
/// Only stiffly accurate methods (`A = 0`) are covered.
pub fn build_test_original<T: Field>(m: &PeerMethod<T>, w: &WeightPair<T>) -> Result<Mat<T>> {
    if w.representation != Representation::Original {
        return Err(Error::Precondition(format!(
            "expected original-form weights, got {}",
            w.representation
        )));
    }
    if !m.a.is_zero() {
        return Err(Error::Precondition(
            "certification covers stiffly accurate methods only (A = 0)".into(),
        ));
    }
    if w.z.rows() != m.s {
        return Err(Error::Dimension("weights do not match the stage count".into()));
    }
    let gt_z = m.g.transpose().matmul(&w.z);
    let m11 = &(&gt_z + &w.z.matmul(&m.g)) - &w.w;
    let m12 = -&gt_z.matmul(&m.b);
    let m21 = m12.transpose();
    Ok(Mat::block2(&m11, &m12, &m21, &w.w))
}

/// Generic-form test matrix for the quadruple `(E, H, What, Zhat)`:
/// `[[L_E(Zhat) - P_E(What), What - Zhat (H - E)], [sym, What]]`.
pub fn build_test_generic<T: Field>(
    e: &Mat<T>,
    h: &Mat<T>,
    what: &Mat<T>,
    zhat: &Mat<T>,
) -> Mat<T> {
    let m11 = &map_l(e, zhat) - &map_p(e, what);
    let m12 = what - &zhat.matmul(&(h - e));
    let m21 = m12.transpose();
    Mat::block2(&m11, &m12, &m21, what)
}

/// Hat-form test matrix; needs nonsingular `G` (it is the generic form at
/// `H = G^{-1}` with the method's differentiation matrix).
pub fn build_test_hat(m: &PeerMethod<Scalar>, w: &WeightPair<Scalar>) -> Result<Mat<Scalar>> {
    if w.representation != Representation::Hat {
        return Err(Error::Precondition(format!(
            "expected hat-form weights, got {}",
            w.representation
        )));
    }
    if !m.a.is_zero() {
        return Err(Error::Precondition(
            "certification covers stiffly accurate methods only (A = 0)".into(),
        ));
    }
    let (e, _) = build_e_theta(&m.nodes)?;
    let h = m.g.inverse()?;
    Ok(build_test_generic(&e, &h, &w.w, &w.z))
}

/// Nordsieck-form test matrix: the generic form at the scaled shift seed
/// with `Htilde = V^{-1} G^{-1} V`.
pub fn build_test_nordsieck(
    m: &PeerMethod<Scalar>,
    w: &WeightPair<Scalar>,
) -> Result<Mat<Scalar>> {
    if w.representation != Representation::Nordsieck {
        return Err(Error::Precondition(format!(
            "expected nordsieck-form weights, got {}",
            w.representation
        )));
    }
    if !m.a.is_zero() {
        return Err(Error::Precondition(
            "certification covers stiffly accurate methods only (A = 0)".into(),
        ));
    }
    let v = vandermonde(&m.nodes);
    let v_inv = v.inverse()?;
    let h = m.g.inverse()?;
    let h_tilde = v_inv.matmul(&h).matmul(&v);
    let e_t: Mat<Scalar> = e_tilde(m.s);
    Ok(build_test_generic(&e_t, &h_tilde, &w.w, &w.z))
}

/// Exact residuals of the necessary conditions
/// `(B^T - I) Z G 1 = 0` and `W 1 = B^T Z G 1` (original-form weights).
pub fn necessary_conditions(
    m: &PeerMethod<Scalar>,
    w: &WeightPair<Scalar>,
) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    if w.representation != Representation::Original {
        return Err(Error::Precondition("necessary conditions use original weights".into()));
    }
    let one = ones::<Scalar>(m.s);
    let zg1 = w.z.matmul(&m.g).matvec(&one);
    let bt = m.b.transpose();
    let r1: Vec<Scalar> = bt
        .matvec(&zg1)
        .into_iter()
        .zip(&zg1)
        .map(|(a, b)| a - b.clone())
        .collect();
    let w1 = w.w.matvec(&one);
    let btzg1 = bt.matvec(&zg1);
    let r2: Vec<Scalar> = w1
        .into_iter()
        .zip(btzg1)
        .map(|(a, b)| a - b)
        .collect();
    Ok((r1, r2))
}

/// Checks the exact order-(s-1) coupling `B = (I - G E) Theta`.
pub fn order_coupling_holds(m: &PeerMethod<Scalar>) -> Result<bool> {
    let (e, theta) = build_e_theta(&m.nodes)?;
    let want = (&Mat::identity(m.s) - &m.g.matmul(&e)).matmul(&theta);
    Ok(want == m.b)
}

/// Certifies A-stability from scratch: builds the test matrix in the pair's
/// representation, runs the exact PSD check, verifies the definiteness of
/// the weights, and (in Nordsieck form) the explicit `0_k (+) M_D` block
/// decomposition with `k = floor((s+1)/2)`.
pub fn certify(m: &PeerMethod<Scalar>, w: &WeightPair<Scalar>) -> Result<TestMatrixReport> {
    if !m.a.is_zero() {
        return Err(Error::Precondition(
            "certification covers stiffly accurate methods only (A = 0)".into(),
        ));
    }
    if w.z.rows() != m.s {
        return Err(Error::Dimension("weights do not match the stage count".into()));
    }
    if !matches!(w.representation, Representation::Original) && !order_coupling_holds(m)? {
        return Err(Error::Precondition(
            "hat/nordsieck forms assume the exact order coupling B = (I - G E) Theta".into(),
        ));
    }

    let mut warnings = Vec::new();
    let z_verdict = psd_check(&w.z)?.verdict;
    let w_cert = psd_check(&w.w)?;
    let w_verdict = w_cert.verdict;
    if w.w.is_zero() {
        warnings.push("W = 0 is degenerate; the bound rests on Z alone".into());
    }
    if z_verdict != Verdict::PositiveDefinite {
        warnings.push("Z is not positive definite".into());
    }
    if w_verdict == Verdict::Indefinite {
        warnings.push("W is not positive semidefinite".into());
    }

    let matrix = match w.representation {
        Representation::Original => build_test_original(m, w)?,
        Representation::Hat => build_test_hat(m, w)?,
        Representation::Nordsieck => build_test_nordsieck(m, w)?,
    };
    let certificate = psd_check(&matrix)?;

    let a_stable = certificate.is_psd()
        && z_verdict == Verdict::PositiveDefinite
        && w_verdict != Verdict::Indefinite;

    let (block_defect, nontrivial_block) = if w.representation == Representation::Nordsieck
        && certificate.is_psd()
    {
        let k = (m.s + 1) / 2;
        let n = matrix.rows();
        for i in 0..k {
            for j in 0..n {
                if !matrix[(i, j)].is_zero() {
                    return Err(Error::Precondition(format!(
                        "PSD nordsieck test matrix must have zero row {i}, found {} at column {j}",
                        matrix[(i, j)]
                    )));
                }
            }
        }
        (k, Some(matrix.sub_block(k, k, n - k, n - k)))
    } else {
        (0, None)
    };

    Ok(TestMatrixReport {
        form: w.representation,
        matrix,
        certificate,
        block_defect,
        nontrivial_block,
        a_stable,
        z_verdict,
        w_verdict,
        warnings,
    })
}

fn infer_field(mats: &[&Mat<Scalar>]) -> FieldSpec {
    for m in mats {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if let Some(d) = m[(i, j)].surd_index() {
                    return FieldSpec::Quadratic(d);
                }
            }
        }
    }
    FieldSpec::Rational
}

/// Existence constructor: from distinct nodes and a positive definite seed
/// `What0`, produces a certified A-stable stiffly accurate method of order
/// s-1 with hat weights `(Zhat, What0)`:
/// `Zhat = Phi_E(What0)`, `H = E + Zhat^{-1} What0`, `G = H^{-1}`,
/// `B = (I - G E) Theta`. The test matrix has only the `What0` block.
pub fn construct_general(
    nodes: &NodeSet<Scalar>,
    what0: &Mat<Scalar>,
) -> Result<(PeerMethod<Scalar>, WeightPair<Scalar>)> {
    if !what0.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if psd_check(what0)?.verdict != Verdict::PositiveDefinite {
        return Err(Error::NotPositiveDefinite("seed weight matrix".into()));
    }
    let (e, _) = build_e_theta(nodes)?;
    let zhat = map_phi(&e, what0);
    let h = &e + &zhat.inverse()?.matmul(what0);
    let g = h.inverse()?;
    let nodes_mat = Mat::from_rows(vec![nodes.as_slice().to_vec()]);
    let field = infer_field(&[&g, what0, &nodes_mat]);
    let method = assemble_order_sm1(nodes, g, field)?;
    let pair = WeightPair::new(zhat, what0.clone(), Representation::Hat)?;
    Ok((method, pair))
}

/// Parametrized constructor: for nilpotent `E`, PD seed `What0`, and slack
/// data, builds `Zhat = Phi_E(What0)`, `What = What0 - K - N` (with
/// `P_E(N) = M11` and `K` the kernel combination), and
/// `H = E + Zhat^{-1}(What + M12)`. The assembled test matrix is
/// re-certified, not assumed.
pub fn construct_param(
    e: &Mat<Scalar>,
    what0: &Mat<Scalar>,
    slack: &SlackSpec,
) -> Result<(Mat<Scalar>, WeightPair<Scalar>)> {
    if psd_check(what0)?.verdict != Verdict::PositiveDefinite {
        return Err(Error::NotPositiveDefinite("seed weight matrix".into()));
    }
    if psd_check(&slack.m11)?.verdict == Verdict::Indefinite {
        return Err(Error::Precondition("slack block M11 must be PSD".into()));
    }
    let n = preimage_p(e, &slack.m11, &[], 0.0)?.x;
    let kernel = kernel_of(e)?;
    if slack.kernel_coeffs.len() != kernel.dimension() {
        return Err(Error::Dimension(format!(
            "expected {} kernel coefficients, got {}",
            kernel.dimension(),
            slack.kernel_coeffs.len()
        )));
    }
    let k = kernel.combination(&slack.kernel_coeffs);
    let what = &(what0 - &k) - &n;
    if psd_check(&what)?.verdict != Verdict::PositiveDefinite {
        return Err(Error::NotPositiveDefinite(
            "What0 - K - N lost definiteness (slack incompatible)".into(),
        ));
    }
    let zhat = map_phi(e, what0);
    let h = &e.clone() + &zhat.inverse()?.matmul(&(&what + &slack.m12));
    let test = build_test_generic(e, &h, &what, &zhat);
    let cert = psd_check(&test)?;
    if !cert.is_psd() {
        let witness = cert
            .witness
            .map(|w| w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            .unwrap_or_default();
        return Err(Error::NotPositiveSemidefinite(format!(
            "assembled test matrix is indefinite; witness [{witness}]"
        )));
    }
    let pair = WeightPair::new(zhat, what, Representation::Hat)?;
    Ok((h, pair))
}

/// Symmetric kernel of `L_E` for an arbitrary nilpotent `E`, by solving the
/// homogeneous system directly.
pub fn kernel_of(e: &Mat<Scalar>) -> Result<KernelBasis<Scalar>> {
    let s = e.rows();
    let zero = Mat::<Scalar>::zeros(s, s);
    let probe = crate::maps::preimage_l(e, &zero, &[], 0.0)?;
    let mut matrices = Vec::new();
    for &pos in &probe.free_positions {
        let pins: Vec<((usize, usize), Scalar)> = probe
            .free_positions
            .iter()
            .map(|&p| (p, if p == pos { Scalar::one() } else { Scalar::zero() }))
            .collect();
        let sol = crate::maps::preimage_l(e, &zero, &pins, 0.0)?;
        matrices.push(sol.x);
    }
    Ok(KernelBasis { matrices })
}

/// Z-free seed: `Wcheck = Psi_E(I) + Kcheck` (must verify PD) and
/// `Hcheck = E + Wcheck`. The skew part of `Hcheck` equals the skew part of
/// `E`; the test matrix `MG(E, Hcheck, Wcheck, I)` has zero 11/12 blocks.
pub fn construct_zfree<T: PdCheck>(e: &Mat<T>, k: &Mat<T>) -> Result<(Mat<T>, Mat<T>)> {
    if !k.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let wcheck = &map_psi(e, &Mat::identity(e.rows())) + k;
    if !T::is_pd(&wcheck) {
        return Err(Error::NotPositiveDefinite("Wcheck = Psi_E(I) + K".into()));
    }
    let hcheck = e + &wcheck;
    Ok((hcheck, wcheck))
}

/// Searches the zero-slack family for weights certifying a GIVEN method:
/// solves the exact linear system
/// `Zhat = Phi_E(Zhat (H - E)) + K`, `What := Zhat (H - E)` symmetric,
/// then samples the solution space on a fixed lattice looking for
/// `Zhat` PD and `What` PSD. `None` is inconclusive, not a disproof.
pub fn find_weights_zero_slack(
    nodes: &NodeSet<Scalar>,
    g: &Mat<Scalar>,
) -> Result<Option<WeightPair<Scalar>>> {
    let s = nodes.len();
    let h = g.inverse()?;
    let (e, _) = build_e_theta(nodes)?;
    let v = vandermonde(nodes);
    let kernel = kernel_basis_for(&v)?;
    let kdim = kernel.dimension();

    // symmetric unknown positions for Zhat
    let sym_pos: Vec<(usize, usize)> =
        (0..s).flat_map(|i| (i..s).map(move |j| (i, j))).collect();
    let nz = sym_pos.len();
    let ncols = nz + kdim;
    let hme = &h - &e;

    // rows: strict-upper symmetry defects of Zhat (H - E), then the
    // symmetric entries of Zhat - Phi_E(Zhat (H - E)) - K
    let n_sym_rows = s * (s - 1) / 2;
    let nrows = n_sym_rows + nz;
    let mut a = Mat::<Scalar>::zeros(nrows, ncols);
    for (cidx, &(p, q)) in sym_pos.iter().enumerate() {
        let mut basis = Mat::<Scalar>::zeros(s, s);
        basis[(p, q)] = Scalar::one();
        basis[(q, p)] = Scalar::one();
        let w_img = basis.matmul(&hme);
        let phi_img = map_phi(&e, &w_img);
        let mut r = 0usize;
        for i in 0..s {
            for j in i + 1..s {
                a[(r, cidx)] = w_img[(i, j)].clone() - w_img[(j, i)].clone();
                r += 1;
            }
        }
        for (k2, &(i, j)) in sym_pos.iter().enumerate() {
            a[(n_sym_rows + k2, cidx)] = basis[(i, j)].clone() - phi_img[(i, j)].clone();
        }
    }
    for (t, kmat) in kernel.matrices.iter().enumerate() {
        for (k2, &(i, j)) in sym_pos.iter().enumerate() {
            a[(n_sym_rows + k2, nz + t)] = -kmat[(i, j)].clone();
        }
    }

    let basis = nullspace(&a);
    if basis.is_empty() {
        return Ok(None);
    }
    let mdim = basis.len();

    // lattice over the free coefficients
    let points_per_dim: i64 = if mdim <= 3 {
        11
    } else if mdim <= 5 {
        5
    } else {
        3
    };
    let half = points_per_dim / 2;
    let mut combo = vec![-half; mdim];
    let mut tried = 0usize;
    'outer: loop {
        tried += 1;
        if tried > 20000 {
            break;
        }
        if combo.iter().any(|&c| c != 0) {
            let coeffs: Vec<Scalar> = combo
                .iter()
                .map(|&c| Scalar::ratio(c, half.max(1)))
                .collect();
            if let Some(pair) = try_zero_slack_candidate(&sym_pos, &basis, &coeffs, s, &hme)? {
                // final gate: full certification of the assembled pair
                let field = infer_field(&[g, &pair.z]);
                let method = assemble_order_sm1(nodes, g.clone(), field)?;
                if certify(&method, &pair)?.a_stable {
                    return Ok(Some(pair));
                }
            }
        }
        // advance the multi-index
        for d in 0..mdim {
            combo[d] += 1;
            if combo[d] <= half {
                continue 'outer;
            }
            combo[d] = -half;
        }
        break;
    }
    Ok(None)
}

fn try_zero_slack_candidate(
    sym_pos: &[(usize, usize)],
    basis: &[Vec<Scalar>],
    coeffs: &[Scalar],
    s: usize,
    hme: &Mat<Scalar>,
) -> Result<Option<WeightPair<Scalar>>> {
    let nz = sym_pos.len();
    let mut zvec = vec![Scalar::zero(); nz];
    for (b, c) in basis.iter().zip(coeffs) {
        for (i, zi) in zvec.iter_mut().enumerate() {
            *zi = zi.clone() + b[i].clone() * c.clone();
        }
    }
    let mut zhat = Mat::<Scalar>::zeros(s, s);
    for (k, &(i, j)) in sym_pos.iter().enumerate() {
        zhat[(i, j)] = zvec[k].clone();
        zhat[(j, i)] = zvec[k].clone();
    }
    // quick rejections before the expensive full certification
    if psd_check(&zhat)?.verdict != Verdict::PositiveDefinite {
        // the negated candidate may be the definite one
        zhat = -&zhat;
        if psd_check(&zhat)?.verdict != Verdict::PositiveDefinite {
            return Ok(None);
        }
    }
    let what = zhat.matmul(hme);
    if !what.is_symmetric() {
        return Ok(None);
    }
    if psd_check(&what)?.verdict == Verdict::Indefinite {
        return Ok(None);
    }
    Ok(Some(WeightPair::new(zhat, what, Representation::Hat)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn nodes(vals: &[(i64, i64)]) -> NodeSet<Scalar> {
        NodeSet::new(vals.iter().map(|&(n, d)| Scalar::ratio(n, d)).collect()).unwrap()
    }

    #[test]
    fn construct_general_nodes_01_identity_seed() {
        let n = nodes(&[(0, 1), (1, 1)]);
        let (method, pair) = construct_general(&n, &Mat::identity(2)).unwrap();
        let zhat_want = Mat::from_rows(vec![
            vec![Scalar::ratio(2, 3), Scalar::ratio(-2, 3)],
            vec![Scalar::ratio(-2, 3), Scalar::ratio(8, 3)],
        ]);
        assert_eq!(pair.z, zhat_want);
        let g_want = Mat::from_rows(vec![
            vec![Scalar::ratio(2, 3), Scalar::ratio(-2, 3)],
            vec![Scalar::ratio(2, 9), Scalar::ratio(4, 9)],
        ]);
        assert_eq!(method.g, g_want);
        let report = certify(&method, &pair).unwrap();
        assert!(report.a_stable);
        // only the What block is nonzero
        let m = &report.matrix;
        for i in 0..2 {
            for j in 0..4 {
                assert!(m[(i, j)].is_zero(), "11/12 blocks must vanish");
            }
        }
    }

    #[test]
    fn construct_general_single_stage() {
        let n = nodes(&[(1, 1)]);
        let w0 = Mat::diag(vec![Scalar::ratio(3, 7)]);
        let (method, pair) = construct_general(&n, &w0).unwrap();
        assert_eq!(pair.z, w0);
        assert_eq!(method.g, Mat::identity(1));
        assert!(certify(&method, &pair).unwrap().a_stable);
    }

    #[test]
    fn degenerate_zero_weights() {
        let n = nodes(&[(0, 1), (2, 1), (1, 1)]);
        let g = Mat::diag(vec![
            Scalar::ratio(2, 5),
            Scalar::ratio(20, 29),
            Scalar::ratio(5, 11),
        ]);
        let m = assemble_order_sm1(&n, g, FieldSpec::Rational).unwrap();
        let pair = WeightPair::new(
            Mat::zeros(3, 3),
            Mat::zeros(3, 3),
            Representation::Original,
        )
        .unwrap();
        let t = build_test_original(&m, &pair).unwrap();
        assert!(t.is_zero());
        let report = certify(&m, &pair).unwrap();
        assert!(report.certificate.is_psd());
        assert!(!report.a_stable, "Z not PD must block the verdict");
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn certify_rejects_nonzero_a() {
        let n = nodes(&[(0, 1), (1, 1)]);
        let (mut method, pair) = construct_general(&n, &Mat::identity(2)).unwrap();
        method.a[(0, 0)] = Scalar::one();
        assert!(matches!(
            certify(&method, &pair),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn construct_param_zero_slack_reduces_to_general() {
        let n = nodes(&[(0, 1), (1, 2), (1, 1)]);
        let (e, _) = build_e_theta(&n).unwrap();
        let w0 = Mat::identity(3);
        let slack = SlackSpec::zero(3, 2);
        let (h, pair) = construct_param(&e, &w0, &slack).unwrap();
        let (method, pair_gen) = construct_general(&n, &w0).unwrap();
        assert_eq!(h, method.g.inverse().unwrap());
        assert_eq!(pair.z, pair_gen.z);
        assert_eq!(pair.w, pair_gen.w);
    }

    #[test]
    fn construct_param_rejects_huge_kernel_term() {
        let n = nodes(&[(0, 1), (1, 2), (1, 1)]);
        let (e, _) = build_e_theta(&n).unwrap();
        let w0 = Mat::identity(3);
        let mut slack = SlackSpec::zero(3, 2);
        slack.kernel_coeffs[0] = Scalar::from_int(1000);
        slack.kernel_coeffs[1] = Scalar::from_int(1000);
        assert!(construct_param(&e, &w0, &slack).is_err());
    }

    #[test]
    fn zfree_zero_seed() {
        let e = Mat::<Scalar>::zeros(3, 3);
        let mut k = Mat::<Scalar>::zeros(3, 3);
        k[(2, 2)] = Scalar::ratio(1, 2);
        let (h, w) = construct_zfree(&e, &k).unwrap();
        let want = &Mat::identity(3) + &k;
        assert_eq!(h, want);
        assert_eq!(w, want);
    }

    #[test]
    fn zfree_skew_part_identity() {
        let e = Mat::from_rows(vec![
            vec![Scalar::zero(), Scalar::ratio(3, 2), Scalar::ratio(-1, 3)],
            vec![Scalar::zero(), Scalar::zero(), Scalar::ratio(7, 5)],
            vec![Scalar::zero(), Scalar::zero(), Scalar::zero()],
        ]);
        let k = Mat::<Scalar>::zeros(3, 3);
        let (h, _) = construct_zfree(&e, &k).unwrap();
        let half = Scalar::ratio(1, 2);
        let h_skew = (&h - &h.transpose()).scale(&half);
        let e_skew = (&e - &e.transpose()).scale(&half);
        assert_eq!(h_skew, e_skew);
    }

    #[test]
    fn kernel_of_matches_tilde() {
        let e: Mat<Scalar> = e_tilde(4);
        let k = kernel_of(&e).unwrap();
        assert_eq!(k.dimension(), 2);
        for m in &k.matrices {
            assert!(map_l(&e, m).is_zero());
            assert!(m.is_symmetric());
        }
    }

    #[test]
    fn zero_slack_recovers_weights_for_constructed_method() {
        let n = nodes(&[(0, 1), (1, 1)]);
        let (method, _) = construct_general(&n, &Mat::identity(2)).unwrap();
        let found = find_weights_zero_slack(&n, &method.g).unwrap();
        let pair = found.expect("zero-slack family contains the seed weights");
        assert!(certify(&method, &pair).unwrap().a_stable);
    }

    #[test]
    fn zero_slack_rejects_negated_g() {
        let n = nodes(&[(0, 1), (1, 1)]);
        let g = -&Mat::identity(2);
        let found = find_weights_zero_slack(&n, &g).unwrap();
        assert!(found.is_none(), "negative-spectrum G admits no PD weights");
    }

    #[test]
    fn necessary_conditions_generic_failure() {
        let n = nodes(&[(0, 1), (1, 1)]);
        let (method, _) = construct_general(&n, &Mat::identity(2)).unwrap();
        let pair = WeightPair::new(
            Mat::identity(2),
            Mat::identity(2),
            Representation::Original,
        )
        .unwrap();
        let (r1, r2) = necessary_conditions(&method, &pair).unwrap();
        let nonzero = r1.iter().chain(&r2).any(|x| !x.is_zero());
        assert!(nonzero, "arbitrary weights should violate the necessary conditions");
    }
}
