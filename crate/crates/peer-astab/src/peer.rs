//! Peer two-step method structure: nodes, Vandermonde machinery, the shifted
//! differentiation matrix and its exponential, order-(s-1) assembly, the
//! stability matrix, and exact transforms between weight representations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Field, FieldSpec, RealField, Scalar};

/// Distinct collocation nodes. By convention the last node is 1, but any
/// pairwise distinct values are accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet<T = Scalar>(Vec<T>);

impl<T: Field> NodeSet<T> {
    pub fn new(nodes: Vec<T>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Dimension("need at least one node".into()));
        }
        for i in 0..nodes.len() {
            for j in 0..i {
                if nodes[i] == nodes[j] {
                    return Err(Error::DuplicateNodes(format!(
                        "nodes {j} and {i} coincide ({})",
                        nodes[i]
                    )));
                }
            }
        }
        Ok(NodeSet(nodes))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

/// Weight-matrix representation tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Original,
    Hat,
    Nordsieck,
}

impl Representation {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Representation::Original),
            "hat" => Ok(Representation::Hat),
            "nordsieck" => Ok(Representation::Nordsieck),
            other => Err(Error::Parse(format!("unknown representation `{other}`"))),
        }
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Representation::Original => "original",
            Representation::Hat => "hat",
            Representation::Nordsieck => "nordsieck",
        };
        write!(f, "{s}")
    }
}

/// An s-stage peer two-step method with coefficients (A, B, G).
///
/// `A` stays zero for everything the certification layer accepts
/// (stiffly accurate methods).
#[derive(Debug, Clone)]
pub struct PeerMethod<T = Scalar> {
    pub s: usize,
    pub nodes: NodeSet<T>,
    pub g: Mat<T>,
    pub b: Mat<T>,
    pub a: Mat<T>,
    pub field: FieldSpec,
    /// Set when `b` was assembled as `(I - G E) Theta`.
    pub stiffly_accurate_order_sm1: bool,
}

impl<T: Field> PeerMethod<T> {
    pub fn is_stiffly_accurate(&self) -> bool {
        self.a.is_zero()
    }
}

/// Vandermonde matrix `V[i][j] = c_i^j` (0-based exponents).
pub fn vandermonde<T: Field>(nodes: &NodeSet<T>) -> Mat<T> {
    let s = nodes.len();
    Mat::from_fn(s, s, |i, j| {
        let mut p = T::one();
        for _ in 0..j {
            p = p * nodes.as_slice()[i].clone();
        }
        p
    })
}

/// The scaled shift matrix with superdiagonal 1, 2, ..., s-1.
pub fn e_tilde<T: Field>(s: usize) -> Mat<T> {
    let mut m = Mat::zeros(s, s);
    for i in 0..s.saturating_sub(1) {
        m[(i, i + 1)] = T::from_ratio((i + 1) as i64, 1);
    }
    m
}

/// The shift matrix with superdiagonal ones.
pub fn f0<T: Field>(s: usize) -> Mat<T> {
    let mut m = Mat::zeros(s, s);
    for i in 0..s.saturating_sub(1) {
        m[(i, i + 1)] = T::one();
    }
    m
}

/// Exponential of a nilpotent matrix by its terminating series,
/// accumulating `E^k / k!` incrementally.
pub fn exp_nilpotent<T: Field>(e: &Mat<T>) -> Mat<T> {
    let n = e.rows();
    let mut acc = Mat::<T>::identity(n);
    let mut term = Mat::<T>::identity(n);
    for k in 1..=n {
        term = term.matmul(e).scale(&T::from_ratio(1, k as u64));
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    acc
}

/// Triangular Pascal matrix, `exp` of the scaled shift; entries are binomial
/// coefficients C(j, i) (0-based).
pub fn pascal<T: Field>(s: usize) -> Mat<T> {
    exp_nilpotent(&e_tilde::<T>(s))
}

/// Differentiation and extrapolation matrices for the given nodes:
/// `E = V Etilde V^-1`, `Theta = V P V^-1 = exp(E)`, both exact.
pub fn build_e_theta<T: Field>(nodes: &NodeSet<T>) -> Result<(Mat<T>, Mat<T>)> {
    let s = nodes.len();
    let v = vandermonde(nodes);
    let v_inv = v.inverse()?;
    let e = v.matmul(&e_tilde::<T>(s)).matmul(&v_inv);
    let theta = v.matmul(&pascal::<T>(s)).matmul(&v_inv);
    Ok((e, theta))
}

/// Closed-form LU factors of the Vandermonde matrix (Newton interpolation):
/// returns `(L_V, U_V)` with `V = L_V U_V` exactly. The inverse factors have
/// explicit entries: divided-difference products in `L_V^-1`, signed
/// elementary symmetric functions in `U_V^-1`.
pub fn vdm_lu_factors<T: Field>(nodes: &NodeSet<T>) -> Result<(Mat<T>, Mat<T>)> {
    let li = vdm_l_inverse(nodes)?;
    let ui = vdm_u_inverse(nodes);
    Ok((li.inverse()?, ui.inverse()?))
}

/// `(L_V^{-1})[i][j] = prod_{k<=i, k!=j} 1/(c_j - c_k)` (0-based, j <= i).
pub fn vdm_l_inverse<T: Field>(nodes: &NodeSet<T>) -> Result<Mat<T>> {
    let s = nodes.len();
    let c = nodes.as_slice();
    let mut m = Mat::zeros(s, s);
    for i in 0..s {
        for j in 0..=i {
            let mut prod = T::one();
            for (k, ck) in c.iter().enumerate().take(i + 1) {
                if k == j {
                    continue;
                }
                let diff = c[j].clone() - ck.clone();
                let inv = diff.inv().ok_or_else(|| {
                    Error::DuplicateNodes(format!("nodes {j} and {k} coincide"))
                })?;
                prod = prod * inv;
            }
            m[(i, j)] = prod;
        }
    }
    Ok(m)
}

/// `(U_V^{-1})[i][j] = (-1)^{j-i} e_{j-i}(c_0, ..., c_{j-1})` (0-based),
/// with `e_k` the elementary symmetric polynomials.
pub fn vdm_u_inverse<T: Field>(nodes: &NodeSet<T>) -> Mat<T> {
    let s = nodes.len();
    let c = nodes.as_slice();
    let mut m = Mat::zeros(s, s);
    for j in 0..s {
        let e = elementary_symmetric(&c[..j]);
        for i in 0..=j {
            let k = j - i;
            if k >= e.len() {
                continue;
            }
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            m[(i, j)] = sign * e[k].clone();
        }
    }
    m
}

fn elementary_symmetric<T: Field>(vals: &[T]) -> Vec<T> {
    let mut e = vec![T::zero(); vals.len() + 1];
    e[0] = T::one();
    for (idx, v) in vals.iter().enumerate() {
        for k in (1..=idx + 1).rev() {
            let add = e[k - 1].clone() * v.clone();
            e[k] = e[k].clone() + add;
        }
    }
    e
}

/// Assembles the stiffly accurate method of order s-1 for the given nodes
/// and coefficient matrix: `B = (I - G E) Theta`, `A = 0`.
pub fn assemble_order_sm1<T: Field>(nodes: &NodeSet<T>, g: Mat<T>, field: FieldSpec) -> Result<PeerMethod<T>> {
    let s = nodes.len();
    if g.rows() != s || g.cols() != s {
        return Err(Error::Dimension(format!(
            "G must be {s}x{s}, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let (e, theta) = build_e_theta(nodes)?;
    let b = (&Mat::identity(s) - &g.matmul(&e)).matmul(&theta);
    Ok(PeerMethod {
        s,
        nodes: nodes.clone(),
        g,
        b,
        a: Mat::zeros(s, s),
        field,
        stiffly_accurate_order_sm1: true,
    })
}

/// Stability matrix `M(z) = (I - z G)^{-1} (B + z A)` in floating complex
/// arithmetic. `z` at (or numerically near) a pole is reported.
pub fn stability_matrix<T: RealField>(m: &PeerMethod<T>, z: Complex64) -> Result<Mat<Complex64>> {
    let s = m.s;
    let g = m.g.to_f64().to_complex();
    let b = m.b.to_f64().to_complex();
    let a = m.a.to_f64().to_complex();
    let lhs = Mat::from_fn(s, s, |i, j| {
        let id = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        id - z * g[(i, j)]
    });
    let rhs = Mat::from_fn(s, s, |i, j| b[(i, j)] + z * a[(i, j)]);
    // detect poles through the pivot scale of the complex LU
    let scale = lhs.max_abs_complex().max(1.0);
    match crate::linalg::lu_decompose(&lhs) {
        Ok(f) => {
            for k in 0..s {
                if f.u[(k, k)].norm() <= 1e-13 * scale {
                    return Err(Error::Pole(format!("{z}")));
                }
            }
            f.solve(&rhs)
        }
        Err(_) => Err(Error::Pole(format!("{z}"))),
    }
}

/// Weight-matrix pair in one of the three representations. In hat form the
/// fields hold `(Zhat, What)`, in Nordsieck form `(Ztilde, Wtilde)`.
#[derive(Debug, Clone)]
pub struct WeightPair<T = Scalar> {
    pub z: Mat<T>,
    pub w: Mat<T>,
    pub representation: Representation,
}

impl<T: Field> WeightPair<T> {
    pub fn new(z: Mat<T>, w: Mat<T>, representation: Representation) -> Result<Self> {
        if !z.is_symmetric() || !w.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if z.rows() != w.rows() {
            return Err(Error::Dimension("Z and W must have equal size".into()));
        }
        Ok(WeightPair { z, w, representation })
    }
}

/// Exact change of representation for a weight pair:
/// original <-> hat via `Zhat = G^T Z G`, `What = Theta^-T W Theta^-1`,
/// hat <-> nordsieck via congruence with the Vandermonde matrix.
pub fn transform_weights(
    m: &PeerMethod<Scalar>,
    w: &WeightPair<Scalar>,
    to: Representation,
) -> Result<WeightPair<Scalar>> {
    if w.representation == to {
        return Ok(w.clone());
    }
    // route through the hat representation
    let hat = match w.representation {
        Representation::Hat => w.clone(),
        Representation::Original => {
            let (_, theta) = build_e_theta(&m.nodes)?;
            let theta_inv = theta.inverse()?;
            let zhat = m.g.transpose().matmul(&w.z).matmul(&m.g);
            let what = theta_inv.transpose().matmul(&w.w).matmul(&theta_inv);
            WeightPair { z: zhat, w: what, representation: Representation::Hat }
        }
        Representation::Nordsieck => {
            let v = vandermonde(&m.nodes);
            let v_inv = v.inverse()?;
            let zhat = v_inv.transpose().matmul(&w.z).matmul(&v_inv);
            let what = v_inv.transpose().matmul(&w.w).matmul(&v_inv);
            WeightPair { z: zhat, w: what, representation: Representation::Hat }
        }
    };
    match to {
        Representation::Hat => Ok(hat),
        Representation::Original => {
            let (_, theta) = build_e_theta(&m.nodes)?;
            let h = m.g.inverse()?;
            let z = h.transpose().matmul(&hat.z).matmul(&h);
            let w = theta.transpose().matmul(&hat.w).matmul(&theta);
            Ok(WeightPair { z, w, representation: Representation::Original })
        }
        Representation::Nordsieck => {
            let v = vandermonde(&m.nodes);
            let z = v.transpose().matmul(&hat.z).matmul(&v);
            let w = v.transpose().matmul(&hat.w).matmul(&v);
            Ok(WeightPair { z, w, representation: Representation::Nordsieck })
        }
    }
}
