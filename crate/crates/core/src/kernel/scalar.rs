//! Number types the kernel is generic over.
//!
//! Two implementations exist: [`Rational`] (arbitrary precision, every
//! comparison decided exactly) and `f64` (every comparison made against an
//! absolute tolerance supplied by the caller). Exact arithmetic ignores the
//! tolerance argument everywhere.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Default absolute tolerance for floating point computations.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "approx" => Ok(Mode::Approx),
            other => Err(format!("unknown mode {other:?} (expected \"exact\" or \"approx\")")),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Converts a finite float. Exact mode keeps the binary value exactly.
    fn from_f64(v: f64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    fn to_f64(&self) -> f64;
    fn to_rational(&self) -> Rational;
    fn from_rational(r: &Rational) -> Self;
    fn abs(&self) -> Self;

    /// Sign of `self`, treating `|self| <= tol` as zero in approx mode.
    fn sign_tol(&self, tol: f64) -> Ordering;

    fn is_zero_tol(&self, tol: f64) -> bool {
        self.sign_tol(tol) == Ordering::Equal
    }

    fn cmp_tol(&self, other: &Self, tol: f64) -> Ordering {
        (self.clone() - other.clone()).sign_tol(tol)
    }

    fn dot(a: &[Self], b: &[Self]) -> Self {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .fold(Self::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    }

    /// Rescales a nonzero vector by a positive factor into a canonical size:
    /// primitive integer vector (exact) or unit max-norm (approx).
    fn normalize_ray(v: &mut [Self]);

    fn parse_json(v: &Value) -> Result<Self, String>;
    fn to_json(&self) -> Value;
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        self.to_f64_lossy()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn sign_tol(&self, _tol: f64) -> Ordering {
        self.numer().sign().cmp(&num::bigint::Sign::NoSign)
    }

    fn cmp_tol(&self, other: &Self, _tol: f64) -> Ordering {
        self.cmp(other)
    }

    fn dot(a: &[Self], b: &[Self]) -> Self {
        debug_assert_eq!(a.len(), b.len());
        let mut acc = <BigRational as Zero>::zero();
        for (x, y) in a.iter().zip(b) {
            if !x.is_zero() && !y.is_zero() {
                acc += x * y;
            }
        }
        acc
    }

    fn normalize_ray(v: &mut [Self]) {
        let mut lcm = BigInt::one();
        for x in v.iter() {
            lcm = lcm.lcm(x.denom());
        }
        let mut gcd = BigInt::zero();
        for x in v.iter() {
            let scaled = x.numer() * (&lcm / x.denom());
            gcd = gcd.gcd(&scaled);
        }
        if gcd.is_zero() {
            return;
        }
        for x in v.iter_mut() {
            let scaled = x.numer() * (&lcm / x.denom());
            *x = BigRational::from_integer(scaled / &gcd);
        }
    }

    fn parse_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::from_i64(i))
                } else {
                    Err(format!("exact scalar {n} must be an integer or a \"p/q\" string"))
                }
            }
            other => Err(format!("expected a \"p/q\" string, found {other}")),
        }
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

trait ToF64Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl ToF64Lossy for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        if let (Some(n), Some(d)) = (self.numer().to_f64(), self.denom().to_f64()) {
            if n.is_finite() && d.is_finite() && d != 0.0 {
                return n / d;
            }
        }
        // Huge numerator or denominator: shift both down before dividing.
        let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(1000);
        let n = (self.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (self.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    }
}

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let numer = BigInt::from_str(&digits).map_err(|e| format!("bad decimal {s:?}: {e}"))?;
        let denom = num::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(numer, denom);
        return Ok(if negative { -r } else { r });
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|e| format!("bad rational {s:?}: {e}"))
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Approx;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        BigRational::from_float(*self).expect("finite float")
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64_lossy()
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sign_tol(&self, tol: f64) -> Ordering {
        if *self > tol {
            Ordering::Greater
        } else if *self < -tol {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn normalize_ray(v: &mut [Self]) {
        let m = v.iter().fold(0.0_f64, |m, x| m.max(f64::abs(*x)));
        if m > 0.0 {
            for x in v.iter_mut() {
                *x /= m;
            }
        }
    }

    fn parse_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| format!("bad number {n}")),
            Value::String(s) => {
                if s.contains('/') {
                    parse_rational(s).map(|r| r.to_f64_lossy())
                } else {
                    s.trim().parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))
                }
            }
            other => Err(format!("expected a number, found {other}")),
        }
        .and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err("non-finite number".to_string())
            }
        })
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

/// Lexicographic comparison of two vectors under a tolerance.
pub fn lex_cmp_tol<F: Scalar>(a: &[F], b: &[F], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp_tol(y, tol) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub fn vec_eq_tol<F: Scalar>(a: &[F], b: &[F], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.cmp_tol(y, tol) == Ordering::Equal)
}

/// Converts a vector between number types (exact → approx rounds).
pub fn convert_vec<A: Scalar, B: Scalar>(v: &[A]) -> Vec<B> {
    v.iter().map(|x| B::from_rational(&x.to_rational())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), q(-7, 1));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn normalize_exact_gives_primitive_integers() {
        let mut v = vec![q(1, 2), q(-3, 4), q(0, 1)];
        Rational::normalize_ray(&mut v);
        assert_eq!(v, vec![q(2, 1), q(-3, 1), q(0, 1)]);
    }

    #[test]
    fn approx_comparisons_respect_tolerance() {
        assert!(1e-12_f64.is_zero_tol(1e-9));
        assert!(!1e-6_f64.is_zero_tol(1e-9));
        assert_eq!(1.0_f64.cmp_tol(&(1.0 + 1e-11), 1e-9), Ordering::Equal);
        assert_eq!(q(1, 3).cmp_tol(&q(1, 3), 1.0), Ordering::Equal);
        assert_eq!(q(1, 3).cmp_tol(&q(1, 2), 1.0), Ordering::Less);
    }

    #[test]
    fn json_scalars() {
        let r = Rational::parse_json(&Value::String("5/10".into())).unwrap();
        assert_eq!(r.to_json(), Value::String("1/2".into()));
        assert!(f64::parse_json(&serde_json::json!("1/4")).unwrap() == 0.25);
        assert!(Rational::parse_json(&serde_json::json!(0.5)).is_err());
    }
}
