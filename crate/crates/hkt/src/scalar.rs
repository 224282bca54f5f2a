//! Scalar fields used by every geometric computation.
//!
//! Two implementations of [`Scalar`] are provided:
//!
//! * [`Exact`] — elements `a + b·√d` of a real quadratic field ℚ(√d) with
//!   arbitrary-precision rational parts. The radicand is attached to each
//!   value; combining two values with different non-trivial radicands is a
//!   hard error (it would leave the field). `d = 0` marks a plain rational.
//! * [`Float`] — `f64` with a process-wide comparison tolerance
//!   (default `1e-9`): `x == y` iff `|x − y| ≤ tol·max(1, |x|, |y|)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn rsign(r: &BigRational) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Field operations plus the comparison and conversion hooks the geometry
/// layer needs.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    /// Embeds an exact field element.
    fn from_exact(x: &Exact) -> Self;
    /// Zero test (exact, or within tolerance in floating mode).
    fn is_zero(&self) -> bool;
    /// Equality (exact, or relative-tolerance in floating mode).
    fn approx_eq(&self, other: &Self) -> bool;
    /// Absolute value as `f64`, used for residual reporting and pivoting.
    fn magnitude(&self) -> f64;
    /// Sign of the value; zero per [`Scalar::is_zero`].
    fn sign(&self) -> Ordering;
    /// Square root inside the field, if it exists.
    fn sqrt(&self) -> Option<Self>;
    /// True for the exact field.
    fn is_exact() -> bool;
    /// Nearest `f64` value.
    fn to_f64(&self) -> f64;

    fn is_one(&self) -> bool {
        self.approx_eq(&Self::one())
    }
    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

// ---------------------------------------------------------------------------
// Exact quadratic-field scalars
// ---------------------------------------------------------------------------

/// An element `a + b·√d` of ℚ(√d). Invariant: `b == 0` iff `d == 0`, and a
/// non-zero `d` is square-free and greater than 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exact {
    a: BigRational,
    b: BigRational,
    d: u64,
}

impl Exact {
    pub fn rational(r: BigRational) -> Self {
        Exact {
            a: r,
            b: BigRational::zero(),
            d: 0,
        }
    }

    pub fn int(v: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `a + b·√d`; `d` is reduced to its square-free part.
    pub fn quadratic(a: BigRational, b: BigRational, d: u64) -> Self {
        let (k, m) = squarefree_split(d);
        let b = b * BigRational::from_integer(BigInt::from(k));
        Self::normalized(a, b, m)
    }

    /// `√d` for a non-negative integer `d`.
    pub fn sqrt_int(d: u64) -> Self {
        Self::quadratic(BigRational::zero(), BigRational::one(), d)
    }

    fn normalized(a: BigRational, b: BigRational, d: u64) -> Self {
        if b.is_zero() || d == 0 {
            Exact {
                a,
                b: BigRational::zero(),
                d: 0,
            }
        } else if d == 1 {
            Exact {
                a: a + b,
                b: BigRational::zero(),
                d: 0,
            }
        } else {
            Exact { a, b, d }
        }
    }

    /// Rational part.
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of √d.
    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    /// Radicand (0 for a rational value).
    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.d == 0
    }

    /// Value as `f64`.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.d == 0 {
            a
        } else {
            a + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
        }
    }

    fn common_radicand(x: u64, y: u64) -> u64 {
        match (x, y) {
            (0, d) | (d, 0) => d,
            (p, q) if p == q => p,
            (p, q) => panic!("incompatible quadratic extensions: sqrt({p}) and sqrt({q})"),
        }
    }

    /// `a² − d·b²`, the field norm.
    pub fn norm(&self) -> BigRational {
        let d = BigRational::from_integer(BigInt::from(self.d));
        &self.a * &self.a - d * &self.b * &self.b
    }
}

/// Writes `n = k²·m` with `m` square-free; returns `(k, m)`.
fn squarefree_split(n: u64) -> (u64, u64) {
    if n == 0 {
        return (1, 0);
    }
    let mut k = 1u64;
    let mut m = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        k *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= p;
        }
        p += 1;
    }
    m *= rest;
    (k, m)
}

/// Exact square root of a non-negative rational, possibly irrational.
fn rational_sqrt(r: &BigRational) -> Option<Exact> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Exact::int(0));
    }
    // √(p/q) = √(p·q)/q
    let pq = r.numer() * r.denom();
    let root = pq.sqrt();
    if &root * &root == pq {
        return Some(Exact::rational(BigRational::new(root, r.denom().clone())));
    }
    let pq = pq.to_u64()?;
    let (k, m) = squarefree_split(pq);
    let coeff = BigRational::new(BigInt::from(k), r.denom().clone());
    Some(Exact::normalized(BigRational::zero(), coeff, m))
}

fn rational_square_root(r: &BigRational) -> Option<BigRational> {
    match rational_sqrt(r) {
        Some(x) if x.is_rational() => Some(x.a),
        _ => None,
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, o: Exact) -> Exact {
        let d = Exact::common_radicand(self.d, o.d);
        Exact::normalized(self.a + o.a, self.b + o.b, d)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, o: Exact) -> Exact {
        let d = Exact::common_radicand(self.d, o.d);
        Exact::normalized(self.a - o.a, self.b - o.b, d)
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, o: Exact) -> Exact {
        if self.d == 0 && o.d == 0 {
            return Exact::rational(self.a * o.a);
        }
        let d = Exact::common_radicand(self.d, o.d);
        let dd = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &o.a + dd * &self.b * &o.b;
        let b = &self.a * &o.b + &self.b * &o.a;
        Exact::normalized(a, b, d)
    }
}

impl Div for Exact {
    type Output = Exact;
    fn div(self, o: Exact) -> Exact {
        assert!(!o.a.is_zero() || !o.b.is_zero(), "division by zero");
        if o.d == 0 {
            return Exact::normalized(&self.a / &o.a, &self.b / &o.a, self.d);
        }
        let n = o.norm();
        let conj = Exact::normalized(&o.a / &n, -(&o.b / &n), o.d);
        self * conj
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact::normalized(-self.a, -self.b, self.d)
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        Exact::int(0)
    }
    fn one() -> Self {
        Exact::int(1)
    }
    fn from_i64(v: i64) -> Self {
        Exact::int(v)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Exact::ratio(num, den)
    }
    fn from_exact(x: &Exact) -> Self {
        x.clone()
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    fn sign(&self) -> Ordering {
        let sa = rsign(&self.a);
        let sb = rsign(&self.b);
        let ord = |s: Sign| match s {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        };
        if self.d == 0 || sb == Sign::NoSign {
            return ord(sa);
        }
        if sa == Sign::NoSign || sa == sb {
            return ord(sb);
        }
        // opposite signs: compare a² with d·b²
        let d = BigRational::from_integer(BigInt::from(self.d));
        let a2 = &self.a * &self.a;
        let db2 = d * &self.b * &self.b;
        match a2.cmp(&db2) {
            Ordering::Greater => ord(sa),
            Ordering::Less => ord(sb),
            Ordering::Equal => Ordering::Equal,
        }
    }
    fn sqrt(&self) -> Option<Self> {
        if self.d == 0 {
            return rational_sqrt(&self.a);
        }
        if self.sign() == Ordering::Less {
            return None;
        }
        // (x + y√d)² = a + b√d  ⇔  x² + d y² = a, 2xy = b
        let r = rational_square_root(&self.norm())?;
        let two = BigRational::from_integer(BigInt::from(2));
        for cand in [(&self.a + &r) / &two, (&self.a - &r) / &two] {
            if let Some(x) = rational_square_root(&cand) {
                if x.is_zero() {
                    continue;
                }
                let y = &self.b / (&two * &x);
                let root = Exact::normalized(x, y, self.d);
                if root.clone() * root.clone() == *self {
                    return Some(if root.sign() == Ordering::Less { -root } else { root });
                }
            }
        }
        None
    }
    fn is_exact() -> bool {
        true
    }

    fn to_f64(&self) -> f64 {
        Exact::to_f64(self)
    }
}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).sign())
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 0 {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let irr = if self.b.is_one() {
            format!("sqrt({})", self.d)
        } else if (-self.b.clone()).is_one() {
            format!("-sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", fmt_rational(&self.b), self.d)
        };
        if self.a.is_zero() {
            write!(f, "{irr}")
        } else if irr.starts_with('-') {
            write!(f, "{}{}", fmt_rational(&self.a), irr)
        } else {
            write!(f, "{}+{}", fmt_rational(&self.a), irr)
        }
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Error produced when a scalar literal cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid scalar literal `{0}` (expected forms like `3`, `-1/2`, `sqrt(3)/2`, `1/2+3/4*sqrt(5)`)")]
pub struct ParseScalarError(pub String);

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(BigRational::new(p, q))
    } else {
        Some(BigRational::from_integer(s.parse().ok()?))
    }
}

/// Parses one signed term: a rational, optionally multiplied by `sqrt(d)`,
/// optionally divided by an integer.
fn parse_term(t: &str) -> Option<Exact> {
    let t = t.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    let value = if let Some(pos) = body.find("sqrt(") {
        let close = body[pos..].find(')')? + pos;
        let d: u64 = body[pos + 5..close].trim().parse().ok()?;
        let coeff_str = body[..pos].trim().trim_end_matches('*').trim();
        let coeff = if coeff_str.is_empty() {
            BigRational::one()
        } else {
            parse_rational(coeff_str)?
        };
        let tail = body[close + 1..].trim();
        let coeff = if tail.is_empty() {
            coeff
        } else {
            let den = parse_rational(tail.strip_prefix('/')?)?;
            if den.is_zero() {
                return None;
            }
            coeff / den
        };
        Exact::quadratic(BigRational::zero(), coeff, d)
    } else {
        Exact::rational(parse_rational(body)?)
    };
    Some(if neg { -value } else { value })
}

impl FromStr for Exact {
    type Err = ParseScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseScalarError(s.to_string());
        let s = s.trim();
        if s.is_empty() {
            return Err(err());
        }
        // split into terms at top-level + or − (not the leading sign)
        let bytes: Vec<char> = s.chars().collect();
        let mut terms = Vec::new();
        let mut start = 0;
        let mut depth = 0i32;
        for (i, c) in bytes.iter().enumerate() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 && i > start => {
                    let prev = bytes[..i].iter().rev().find(|c| !c.is_whitespace());
                    if !matches!(prev, Some('*') | Some('/')) {
                        terms.push(bytes[start..i].iter().collect::<String>());
                        start = i;
                    }
                }
                _ => {}
            }
        }
        terms.push(bytes[start..].iter().collect::<String>());
        let mut acc = Exact::int(0);
        for t in terms {
            let v = parse_term(&t).ok_or_else(err)?;
            if acc.d != 0 && v.d != 0 && acc.d != v.d {
                return Err(err());
            }
            acc = acc + v;
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Floating scalars
// ---------------------------------------------------------------------------

static FLOAT_TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Default comparison tolerance of floating mode.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Sets the process-wide tolerance used by [`Float`] comparisons.
pub fn set_float_tolerance(tol: f64) {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    FLOAT_TOLERANCE_BITS.store(tol.to_bits(), AtomicOrdering::Relaxed);
}

/// Current floating-mode tolerance.
pub fn float_tolerance() -> f64 {
    f64::from_bits(FLOAT_TOLERANCE_BITS.load(AtomicOrdering::Relaxed))
}

/// `f64` scalar compared with the global relative tolerance.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Float(pub f64);

impl Add for Float {
    type Output = Float;
    fn add(self, o: Float) -> Float {
        Float(self.0 + o.0)
    }
}
impl Sub for Float {
    type Output = Float;
    fn sub(self, o: Float) -> Float {
        Float(self.0 - o.0)
    }
}
impl Mul for Float {
    type Output = Float;
    fn mul(self, o: Float) -> Float {
        Float(self.0 * o.0)
    }
}
impl Div for Float {
    type Output = Float;
    fn div(self, o: Float) -> Float {
        Float(self.0 / o.0)
    }
}
impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float(-self.0)
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.0)
    }
}
impl fmt::Debug for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Scalar for Float {
    fn zero() -> Self {
        Float(0.0)
    }
    fn one() -> Self {
        Float(1.0)
    }
    fn from_i64(v: i64) -> Self {
        Float(v as f64)
    }
    fn from_exact(x: &Exact) -> Self {
        Float(x.to_f64())
    }
    fn is_zero(&self) -> bool {
        self.0.abs() <= float_tolerance()
    }
    fn approx_eq(&self, other: &Self) -> bool {
        let scale = 1f64.max(self.0.abs()).max(other.0.abs());
        (self.0 - other.0).abs() <= float_tolerance() * scale
    }
    fn magnitude(&self) -> f64 {
        self.0.abs()
    }
    fn sign(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.0 > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn sqrt(&self) -> Option<Self> {
        if self.0 < 0.0 && !self.is_zero() {
            None
        } else {
            Some(Float(self.0.max(0.0).sqrt()))
        }
    }
    fn is_exact() -> bool {
        false
    }

    fn to_f64(&self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Exact {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "3", "-1/2", "sqrt(3)", "-sqrt(3)", "1/2*sqrt(3)", "1/2+3/4*sqrt(5)", "2-sqrt(2)"] {
            let x = q(s);
            assert_eq!(q(&x.to_string()), x, "{s}");
        }
        assert_eq!(q("sqrt(3)/2"), q("1/2*sqrt(3)"));
        assert_eq!(q("sqrt(12)"), q("2*sqrt(3)"));
        assert_eq!(q("sqrt(4)"), q("2"));
        assert!("1/0".parse::<Exact>().is_err());
        assert!("sqrt(2)+sqrt(3)".parse::<Exact>().is_err());
        assert!("abc".parse::<Exact>().is_err());
    }

    #[test]
    fn field_arithmetic() {
        let s3 = Exact::sqrt_int(3);
        assert_eq!(s3.clone() * s3.clone(), Exact::int(3));
        let x = q("1+sqrt(3)");
        let y = x.clone() / x.clone();
        assert_eq!(y, Exact::one());
        let inv = Exact::one() / x.clone();
        assert_eq!(inv * x, Exact::one());
    }

    #[test]
    fn signs() {
        assert_eq!(q("1-sqrt(2)").sign(), Ordering::Less);
        assert_eq!(q("2-sqrt(3)").sign(), Ordering::Greater);
        assert_eq!(q("-2+sqrt(3)").sign(), Ordering::Less);
        assert_eq!(q("0").sign(), Ordering::Equal);
    }

    #[test]
    fn square_roots() {
        assert_eq!(q("9/4").sqrt(), Some(q("3/2")));
        assert_eq!(q("3/4").sqrt(), Some(q("sqrt(3)/2")));
        assert_eq!(q("4+2*sqrt(3)").sqrt(), Some(q("1+sqrt(3)")));
        assert_eq!(q("-1").sqrt(), None);
    }

    #[test]
    #[should_panic(expected = "incompatible quadratic extensions")]
    fn mixing_radicands_is_fatal() {
        let _ = Exact::sqrt_int(2) + Exact::sqrt_int(3);
    }

    #[test]
    fn float_tolerance_comparison() {
        assert!(Float(1.0).approx_eq(&Float(1.0 + 1e-12)));
        assert!(!Float(1.0).approx_eq(&Float(1.0 + 1e-6)));
        assert!(Float(1e12).approx_eq(&Float(1e12 + 1.0)));
        assert!((float_tolerance() - DEFAULT_TOLERANCE).abs() < 1e-24);
    }
}
