//! Exact scalar tower: arbitrary-precision rationals and the real quadratic
//! extension `a + b*sqrt(d)`, with exact sign determination and a controlled
//! conversion to `f64`.
//!
//! Exact and floating-point worlds meet only through [`Scalar::to_f64`];
//! there is no implicit float contagion anywhere in the crate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator (enforced by `num_rational`).
pub type Rational = BigRational;

/// Element `a + b*sqrt(d)` of the real quadratic field Q(sqrt(d)).
///
/// `d` is a square-free integer >= 2. Two values with different `d` never
/// combine arithmetically; attempting to do so is a programming error and
/// panics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExt {
    pub a: Rational,
    pub b: Rational,
    pub d: u64,
}

/// Field descriptor for matrices and method files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSpec {
    Rational,
    Quadratic(u64),
    Float64,
}

impl FieldSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "rational" {
            return Ok(FieldSpec::Rational);
        }
        if t == "float64" {
            return Ok(FieldSpec::Float64);
        }
        if let Some(rest) = t.strip_prefix("quadratic(") {
            if let Some(num) = rest.strip_suffix(')') {
                let d: u64 = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad surd index in `{t}`")))?;
                if d < 2 || !is_square_free(d) {
                    return Err(Error::Parse(format!("{d} is not square-free >= 2")));
                }
                return Ok(FieldSpec::Quadratic(d));
            }
        }
        Err(Error::Parse(format!("unknown field spec `{t}`")))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, FieldSpec::Float64)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "rational"),
            FieldSpec::Quadratic(d) => write!(f, "quadratic({d})"),
            FieldSpec::Float64 => write!(f, "float64"),
        }
    }
}

pub fn is_square_free(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Exact scalar: a rational or an element of Q(sqrt(d)).
///
/// Values are kept normalized: a quadratic element whose surd coefficient is
/// zero collapses to the rational variant, so equality is field equality.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rat(Rational),
    Quad(QuadExt),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rat(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rat(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `a + b*sqrt(d)`, normalized.
    pub fn quad(a: Rational, b: Rational, d: u64) -> Self {
        assert!(is_square_free(d), "surd index {d} must be square-free >= 2");
        if b.is_zero() {
            Scalar::Rat(a)
        } else {
            Scalar::Quad(QuadExt { a, b, d })
        }
    }

    /// Convenience: `(an/ad) + (bn/bd)*sqrt(d)`.
    pub fn quad_ratio(an: i64, ad: i64, bn: i64, bd: i64, d: u64) -> Self {
        Scalar::quad(
            Rational::new(BigInt::from(an), BigInt::from(ad)),
            Rational::new(BigInt::from(bn), BigInt::from(bd)),
            d,
        )
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            // normalized Quad has b != 0, and a + b*sqrt(d) = 0 with b != 0
            // would force sqrt(d) rational
            Scalar::Quad(_) => false,
        }
    }

    pub fn surd_index(&self) -> Option<u64> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Quad(q) => Some(q.d),
        }
    }

    /// Exact sign: -1, 0 or +1.
    pub fn sign(&self) -> i8 {
        match self {
            Scalar::Rat(r) => rational_sign(r),
            Scalar::Quad(q) => {
                let sa = rational_sign(&q.a);
                let sb = rational_sign(&q.b);
                if sa == 0 {
                    return sb;
                }
                if sb == 0 || sa == sb {
                    return sa;
                }
                // opposite signs: compare a^2 with b^2 d; the larger magnitude
                // term decides
                let a2 = &q.a * &q.a;
                let b2d = &q.b * &q.b * Rational::from_integer(BigInt::from(q.d));
                match a2.cmp(&b2d) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => 0, // impossible for square-free d unless a=b=0
                }
            }
        }
    }

    /// Exact total order on the real line.
    pub fn cmp_real(&self, other: &Scalar) -> Ordering {
        let diff = self.clone() - other.clone();
        match diff.sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.sign() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
            Scalar::Quad(q) => {
                // (a + b sqrt d)^-1 = (a - b sqrt d) / (a^2 - b^2 d)
                let denom =
                    &q.a * &q.a - &q.b * &q.b * Rational::from_integer(BigInt::from(q.d));
                debug_assert!(!denom.is_zero());
                Scalar::quad(&q.a / &denom, -(&q.b / &denom), q.d)
            }
        })
    }

    /// Nearest `f64` (non-certifying; used only by the floating validation
    /// layer). Exponent overflow is reported.
    pub fn to_f64(&self) -> Result<f64> {
        let v = match self {
            Scalar::Rat(r) => rational_to_f64(r)?,
            Scalar::Quad(q) => {
                rational_to_f64(&q.a)? + rational_to_f64(&q.b)? * (q.d as f64).sqrt()
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow(format!("{self} exceeds f64 range")))
        }
    }

    /// Field of the value itself (rationals embed in any quadratic field).
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Rational,
            Scalar::Quad(q) => FieldSpec::Quadratic(q.d),
        }
    }

    /// Checks membership in `field` (rationals belong to every exact field).
    pub fn belongs_to(&self, field: &FieldSpec) -> bool {
        match (self, field) {
            (_, FieldSpec::Float64) => false,
            (Scalar::Rat(_), _) => true,
            (Scalar::Quad(q), FieldSpec::Quadratic(d)) => q.d == *d,
            (Scalar::Quad(_), FieldSpec::Rational) => false,
        }
    }
}

fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn rational_to_f64(r: &Rational) -> Result<f64> {
    r.to_f64()
        .ok_or_else(|| Error::Overflow("rational exceeds f64 range".into()))
}

fn with_same_field(x: &Scalar, y: &Scalar) -> (QuadExt, QuadExt) {
    // Promote rationals into the partner's quadratic field. Mixing two
    // distinct surds is a hard error by design.
    match (x, y) {
        (Scalar::Quad(a), Scalar::Quad(b)) => {
            assert!(
                a.d == b.d,
                "cannot combine elements of Q(sqrt({})) and Q(sqrt({}))",
                a.d,
                b.d
            );
            (a.clone(), b.clone())
        }
        (Scalar::Quad(a), Scalar::Rat(r)) => (
            a.clone(),
            QuadExt { a: r.clone(), b: Rational::zero(), d: a.d },
        ),
        (Scalar::Rat(r), Scalar::Quad(b)) => (
            QuadExt { a: r.clone(), b: Rational::zero(), d: b.d },
            b.clone(),
        ),
        _ => unreachable!(),
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        match (&self, &rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => {
                let (x, y) = with_same_field(&self, &rhs);
                Scalar::quad(&x.a + &y.a, &x.b + &y.b, x.d)
            }
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self + (-rhs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Quad(q) => Scalar::Quad(QuadExt { a: -q.a, b: -q.b, d: q.d }),
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        match (&self, &rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => {
                let (x, y) = with_same_field(&self, &rhs);
                let d = Rational::from_integer(BigInt::from(x.d));
                Scalar::quad(
                    &x.a * &y.a + &x.b * &y.b * &d,
                    &x.a * &y.b + &x.b * &y.a,
                    x.d,
                )
            }
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero");
        self * inv
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Quad(q) => {
                if q.a.is_zero() {
                    write!(f, "{}*sqrt({})", q.b, q.d)
                } else if q.b.is_positive() {
                    write!(f, "{}+{}*sqrt({})", q.a, q.b, q.d)
                } else {
                    write!(f, "{}-{}*sqrt({})", q.a, -&q.b, q.d)
                }
            }
        }
    }
}

/// Parses the exact scalar grammar: `INT`, `INT/POSINT`, optionally a
/// `+/- INT[/POSINT]*sqrt(POSINT)` tail, or a bare surd term.
///
/// The declared field is enforced: a surd term must match the field's `d`,
/// and `float64` inputs are not exact scalars (parse those as `f64`).
pub fn parse_scalar(text: &str, field: &FieldSpec) -> Result<Scalar> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    if let FieldSpec::Float64 = field {
        return Err(Error::FieldMismatch(
            "float64 matrices hold f64 values, not exact scalars".into(),
        ));
    }

    // split an optional surd tail: ...*sqrt(D)
    let (rat_part, surd_part) = match t.find("sqrt(") {
        None => (t.as_str(), None),
        Some(pos) => {
            let inner = &t[pos + 5..];
            let close = inner
                .find(')')
                .ok_or_else(|| Error::Parse(format!("missing `)` in `{text}`")))?;
            if close + 1 != inner.len() {
                return Err(Error::Parse(format!("trailing garbage in `{text}`")));
            }
            let d: u64 = inner[..close]
                .parse()
                .map_err(|_| Error::Parse(format!("bad surd index in `{text}`")))?;
            // the coefficient is everything before `*sqrt(`
            let head = &t[..pos];
            let coeff_str = head
                .strip_suffix('*')
                .ok_or_else(|| Error::Parse(format!("expected `*sqrt(...)` in `{text}`")))?;
            // find where the coefficient begins: after the previous +/- that is
            // not a leading sign of the whole string
            let mut split = 0usize;
            for (i, c) in coeff_str.char_indices().skip(1) {
                if c == '+' || c == '-' {
                    // sign following an exponent or digit boundary: rationals here
                    // contain no exponents, so any later +/- separates the parts
                    split = i;
                }
            }
            if split == 0 {
                ("", Some((coeff_str.to_string(), d)))
            } else {
                let (head_rat, coeff) = coeff_str.split_at(split);
                // keep the sign with the coefficient
                (head_rat, Some((coeff.to_string(), d)))
            }
        }
    };

    let a = if rat_part.is_empty() {
        Rational::zero()
    } else {
        parse_rational(rat_part)?
    };

    match surd_part {
        None => {
            let v = Scalar::Rat(a);
            match field {
                FieldSpec::Rational | FieldSpec::Quadratic(_) => Ok(v),
                FieldSpec::Float64 => unreachable!(),
            }
        }
        Some((coeff, d)) => {
            if !is_square_free(d) || d < 2 {
                return Err(Error::Parse(format!("{d} is not square-free >= 2")));
            }
            match field {
                FieldSpec::Quadratic(fd) if *fd == d => {}
                FieldSpec::Quadratic(fd) => {
                    return Err(Error::FieldMismatch(format!(
                        "sqrt({d}) does not belong to quadratic({fd})"
                    )))
                }
                _ => {
                    return Err(Error::FieldMismatch(format!(
                        "sqrt({d}) does not belong to {field}"
                    )))
                }
            }
            let b = match coeff.as_str() {
                "" | "+" => Rational::one(),
                "-" => -Rational::one(),
                c => parse_rational(c)?,
            };
            Ok(Scalar::quad(a, b, d))
        }
    }
}

fn parse_rational(text: &str) -> Result<Rational> {
    let (num_str, den_str) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer `{num_str}`")))?;
    let den: BigInt = den_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer `{den_str}`")))?;
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    if den.is_negative() {
        return Err(Error::Parse("denominator must be positive".into()));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form; `parse_scalar` of the output returns the value.
pub fn render_scalar(x: &Scalar) -> String {
    x.to_string()
}

// ---------------------------------------------------------------------------
// generic field abstraction for the dense linear algebra
// ---------------------------------------------------------------------------

/// Field operations needed by the generic dense kernels. Implemented by the
/// exact [`Scalar`], by `f64` and by `Complex64`.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: u64) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Compares magnitudes, for pivot selection.
    fn abs_cmp(&self, other: &Self) -> Ordering;
}

/// Real-valued fields: exact signs (or float signs) and a lossy f64 view.
pub trait RealField: Field {
    fn sign_i8(&self) -> i8;
    fn to_f64_lossy(&self) -> f64;
    fn cmp_real(&self, other: &Self) -> Ordering;
}

impl Field for Scalar {
    const EXACT: bool = true;
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn from_ratio(num: i64, den: u64) -> Self {
        Scalar::ratio(num, den as i64)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        Scalar::inv(self)
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.abs().cmp_real(&other.abs())
    }
}

impl RealField for Scalar {
    fn sign_i8(&self) -> i8 {
        self.sign()
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn cmp_real(&self, other: &Self) -> Ordering {
        Scalar::cmp_real(self, other)
    }
}

impl Field for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.abs().partial_cmp(&other.abs()).unwrap_or(Ordering::Equal)
    }
}

impl RealField for f64 {
    fn sign_i8(&self) -> i8 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
    fn cmp_real(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_ratio(num: i64, den: u64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn inv(&self) -> Option<Self> {
        if self.re == 0.0 && self.im == 0.0 {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.norm_sqr()
            .partial_cmp(&other.norm_sqr())
            .unwrap_or(Ordering::Equal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(an: i64, ad: i64, bn: i64, bd: i64, d: u64) -> Scalar {
        Scalar::quad_ratio(an, ad, bn, bd, d)
    }

    #[test]
    fn sign_zero_case() {
        assert_eq!(q(0, 1, 0, 1, 65).sign(), 0);
    }

    #[test]
    fn sign_mixed_terms() {
        // -3 + sqrt(65): 9 < 65 so the surd wins
        assert_eq!(q(-3, 1, 1, 1, 65).sign(), 1);
        // 8 - sqrt(65): 64 < 65 so the surd wins
        assert_eq!(q(8, 1, -1, 1, 65).sign(), -1);
        // 9 - sqrt(65): 81 > 65
        assert_eq!(q(9, 1, -1, 1, 65).sign(), 1);
    }

    #[test]
    fn to_f64_values() {
        assert_eq!(Scalar::ratio(1, 2).to_f64().unwrap(), 0.5);
        let s = q(0, 1, 1, 1, 65).to_f64().unwrap();
        assert!((s - 65f64.sqrt()).abs() < 1e-14);
        assert!((Scalar::ratio(-5, 22).to_f64().unwrap() + 0.22727272727272727).abs() < 1e-15);
    }

    #[test]
    fn to_f64_overflow_reported() {
        let huge = Scalar::Rat(Rational::from_integer(BigInt::from(10).pow(400)));
        assert!(huge.to_f64().is_err());
    }

    #[test]
    fn parse_basics() {
        let f = FieldSpec::Rational;
        assert_eq!(parse_scalar("20/29", &f).unwrap(), Scalar::ratio(20, 29));
        assert_eq!(parse_scalar("0", &f).unwrap(), Scalar::zero());
        assert_eq!(parse_scalar("-5/22", &f).unwrap(), Scalar::ratio(-5, 22));
    }

    #[test]
    fn parse_quadratic() {
        let f = FieldSpec::Quadratic(65);
        let v = parse_scalar("207/500+3/100*sqrt(65)", &f).unwrap();
        assert_eq!(v, q(207, 500, 3, 100, 65));
        let w = parse_scalar("-3/14*sqrt(65)", &f).unwrap();
        assert_eq!(w, q(0, 1, -3, 14, 65));
        let u = parse_scalar("1-1/2*sqrt(65)", &f).unwrap();
        assert_eq!(u, q(1, 1, -1, 2, 65));
        assert!(parse_scalar("1+1*sqrt(3)", &f).is_err()); // d mismatch
    }

    #[test]
    fn render_round_trip() {
        let cases = vec![
            Scalar::ratio(-7, 3),
            Scalar::zero(),
            q(207, 500, 3, 100, 65),
            q(0, 1, -24, 35, 35),
            q(1, 1, -1, 2, 65),
        ];
        for c in cases {
            let field = match c.surd_index() {
                Some(d) => FieldSpec::Quadratic(d),
                None => FieldSpec::Rational,
            };
            let text = render_scalar(&c);
            assert_eq!(parse_scalar(&text, &field).unwrap(), c, "render `{text}`");
        }
    }

    #[test]
    fn quad_inverse() {
        let x = q(3, 1, -1, 2, 65);
        let prod = x.clone() * x.inv().unwrap();
        assert_eq!(prod, Scalar::one());
    }

    #[test]
    #[should_panic(expected = "cannot combine")]
    fn mixed_surds_panic() {
        let _ = q(1, 1, 1, 1, 2) + q(1, 1, 1, 1, 3);
    }

    #[test]
    fn square_free_check() {
        assert!(is_square_free(65));
        assert!(is_square_free(91));
        assert!(!is_square_free(12));
        assert!(!is_square_free(1));
    }
}
