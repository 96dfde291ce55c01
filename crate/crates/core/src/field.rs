//! Scalar fields the rest of the crate is generic over: complex doubles,
//! exact Gaussian rationals, and (via `puiseux`) truncated Puiseux series.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Field operations plus the norm data the geometry needs.
///
/// `log_abs` returns the natural logarithm of the field norm (`-inf` for
/// zero). For exact fields it is only used for pivoting and normalization
/// heuristics, never on an exact code path.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic in this field is exact (no rounding).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn log_abs(&self) -> f64;

    /// Field division. Errors on division by zero, or (for truncated series)
    /// by something indistinguishable from zero at the current precision.
    fn try_div(&self, rhs: &Self) -> Result<Self>;

    /// Compares field norms. Exact for exact fields (used for pivoting and
    /// normalization, where a rounding-based pick would break invariants).
    fn cmp_abs(&self, other: &Self) -> std::cmp::Ordering;

    /// An element with the same norm as `self`, such that `self / normalizer`
    /// has norm one and the division is exact. Must not be called on zero.
    fn normalizer(&self) -> Self {
        self.clone()
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn log_abs(&self) -> f64 {
        // norm_sqr under/overflows long before the true log does
        let m = self.re.abs().max(self.im.abs());
        if m == 0.0 {
            return f64::NEG_INFINITY;
        }
        let r = self.re / m;
        let i = self.im / m;
        m.ln() + 0.5 * (r * r + i * i).ln()
    }
    fn try_div(&self, rhs: &Self) -> Result<Self> {
        if Scalar::is_zero(rhs) {
            return Err(Error::Numerical("complex division by zero".into()));
        }
        Ok(self / rhs)
    }
    fn cmp_abs(&self, other: &Self) -> std::cmp::Ordering {
        self.log_abs()
            .partial_cmp(&other.log_abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
    fn normalizer(&self) -> Self {
        Complex64::new(self.log_abs().exp(), 0.0)
    }
}

/// Exact element of the field of Gaussian rationals `Q(i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRational {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRational {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn conj(&self) -> Self {
        GaussRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |z|^2 as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}*i", self.re, self.im)
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for GaussRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussRational {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for GaussRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussRational {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for GaussRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        GaussRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for GaussRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Div for GaussRational {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.try_div(&rhs).expect("division by zero in Q(i)")
    }
}

impl Scalar for GaussRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        GaussRational::from_ints(0, 0)
    }
    fn one() -> Self {
        GaussRational::from_ints(1, 0)
    }
    fn from_i64(n: i64) -> Self {
        GaussRational::from_ints(n, 0)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn log_abs(&self) -> f64 {
        if Scalar::is_zero(self) {
            f64::NEG_INFINITY
        } else {
            self.to_complex().log_abs()
        }
    }
    fn try_div(&self, rhs: &Self) -> Result<Self> {
        if Scalar::is_zero(rhs) {
            return Err(Error::Numerical("division by zero in Q(i)".into()));
        }
        let n = rhs.norm_sqr();
        let num = self.clone() * rhs.conj();
        Ok(GaussRational {
            re: num.re / &n,
            im: num.im / n,
        })
    }
    fn cmp_abs(&self, other: &Self) -> std::cmp::Ordering {
        self.norm_sqr().cmp(&other.norm_sqr())
    }
}

/// Parses `a/b`, `a/b*i`, `a/b+c/d*i`, `a/b-c/d*i` (integer parts allowed).
impl FromStr for GaussRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Invalid("empty Gaussian rational".into()));
        }
        let parse_rat = |tok: &str| -> Result<BigRational> {
            let tok = tok.strip_prefix('+').unwrap_or(tok);
            BigRational::from_str(tok)
                .map_err(|e| Error::Invalid(format!("bad rational `{tok}`: {e}")))
        };
        // split into real and imaginary summands at a +/- that is not leading
        // and not part of a fraction
        let bytes = s.as_bytes();
        let mut split = None;
        for (k, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[k - 1] != b'/' {
                split = Some(k);
            }
        }
        let (re_tok, im_tok) = match split {
            Some(k) => (&s[..k], &s[k..]),
            None => {
                return if let Some(body) = s.strip_suffix("*i").or(s.strip_suffix('i')) {
                    let body = match body {
                        "" | "+" => "1",
                        "-" => "-1",
                        other => other,
                    };
                    Ok(GaussRational::new(BigRational::zero(), parse_rat(body)?))
                } else {
                    Ok(GaussRational::new(parse_rat(&s)?, BigRational::zero()))
                };
            }
        };
        let im_body = im_tok
            .strip_suffix("*i")
            .or(im_tok.strip_suffix('i'))
            .ok_or_else(|| Error::Invalid(format!("expected imaginary part in `{s}`")))?;
        let im_body = match im_body {
            "+" => "1",
            "-" => "-1",
            other => other,
        };
        Ok(GaussRational::new(parse_rat(re_tok)?, parse_rat(im_body)?))
    }
}

/// Continued-fraction rationalization of a float, with denominator cap.
/// Returns `None` when no convergent with denominator <= `max_den` lands
/// within `tol` of `x`.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::from(1), BigInt::from(0), BigInt::from(0), BigInt::from(1));
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e18 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p0 + &p1;
        let q2 = &ai * &q0 + &q1;
        if q2.to_u64().map(|q| q > max_den).unwrap_or(true) && !q2.is_zero() && q2 > BigInt::from(1) {
            break;
        }
        p1 = std::mem::replace(&mut p0, p2);
        q1 = std::mem::replace(&mut q0, q2);
        let frac = v - a;
        let approx = BigRational::new(p0.clone(), q0.clone()).to_f64().unwrap_or(f64::NAN);
        if (approx - x).abs() <= tol {
            return Some(BigRational::new(p0, q0));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    let cand = BigRational::new(p0, q0);
    let approx = cand.to_f64().unwrap_or(f64::NAN);
    if (approx - x).abs() <= tol {
        Some(cand)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rational_roundtrip() {
        for s in ["3/4+1/2*i", "-2", "i", "-i", "5/3-7/11*i", "0"] {
            let g: GaussRational = s.parse().unwrap();
            let back: GaussRational = g.to_string().parse().unwrap();
            assert_eq!(g, back, "roundtrip of {s}");
        }
    }

    #[test]
    fn gauss_division() {
        let a = GaussRational::from_ints(1, 1);
        let b = GaussRational::from_ints(0, 1);
        let q = a.try_div(&b).unwrap();
        // (1+i)/i = 1 - i
        assert_eq!(q, GaussRational::from_ints(1, -1));
    }

    #[test]
    fn rationalize_simple() {
        let r = rationalize(0.5, 100, 1e-12).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(1), BigInt::from(2)));
        let r = rationalize(-2.0 / 3.0, 100, 1e-9).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(-2), BigInt::from(3)));
        assert!(rationalize(std::f64::consts::PI, 2, 1e-12).is_none());
    }
}
