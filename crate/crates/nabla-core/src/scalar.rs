//! Two-backend scalar numbers: exact rationals and 64-bit floats.
//!
//! Every number flowing through the engine is a [`Scalar`]. Identity
//! verification runs on the exact-rational backend; fractional-order and
//! ODE applications, whose gamma-function values are irrational, run on
//! the float backend. The two never mix: value-level operators panic on a
//! mixed pair (a programming error), and the container types (jets,
//! polynomials, series) validate backends up front and return [`Error`]s.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Which number system a scalar (and everything built from it) lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Arbitrary-precision rationals, always in lowest terms.
    Rational,
    /// IEEE 754 binary64.
    Float64,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Rational => "rational",
            Backend::Float64 => "float64",
        }
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Backend::Rational),
            "float64" => Ok(Backend::Float64),
            other => Err(Error::Parse(format!("unknown backend {other:?}"))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A number in one of the two backends.
///
/// Rational values are kept in lowest terms with positive denominator
/// (enforced by `BigRational` itself).
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Rational(_) => Backend::Rational,
            Scalar::Float(_) => Backend::Float64,
        }
    }

    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Rational => Scalar::Rational(BigRational::zero()),
            Backend::Float64 => Scalar::Float(0.0),
        }
    }

    pub fn one(backend: Backend) -> Self {
        match backend {
            Backend::Rational => Scalar::Rational(BigRational::one()),
            Backend::Float64 => Scalar::Float(1.0),
        }
    }

    pub fn from_i64(value: i64, backend: Backend) -> Self {
        match backend {
            Backend::Rational => Scalar::Rational(BigRational::from_integer(value.into())),
            Backend::Float64 => Scalar::Float(value as f64),
        }
    }

    pub fn from_bigint(value: &BigInt, backend: Backend) -> Self {
        match backend {
            Backend::Rational => Scalar::Rational(BigRational::from_integer(value.clone())),
            Backend::Float64 => Scalar::Float(value.to_f64().unwrap_or(f64::NAN)),
        }
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Scalar::Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    /// True when the value is an integer (exactly, in either backend).
    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_integer(),
            Scalar::Float(x) => x.is_finite() && x.fract() == 0.0,
        }
    }

    /// The value as an `i64` if it is an integer in range.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    r.to_integer().to_i64()
                } else {
                    None
                }
            }
            Scalar::Float(x) => {
                if x.is_finite() && x.fract() == 0.0 && x.abs() < 2f64.powi(53) {
                    Some(*x as i64)
                } else {
                    None
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    /// Exact division; rejects a zero divisor.
    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.clone() / rhs.clone())
    }

    /// Converts to the float backend (identity on floats).
    pub fn to_float_backend(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    /// Parses a scalar in the textual convention of the given backend:
    /// `"p/q"` or `"p"` for rationals, a decimal literal for floats.
    pub fn parse(text: &str, backend: Backend) -> Result<Scalar> {
        let text = text.trim();
        match backend {
            Backend::Rational => BigRational::from_str(text)
                .map(Scalar::Rational)
                .map_err(|e| Error::Parse(format!("bad rational {text:?}: {e}"))),
            Backend::Float64 => f64::from_str(text)
                .map(Scalar::Float)
                .map_err(|e| Error::Parse(format!("bad float {text:?}: {e}"))),
        }
    }

    fn assert_same_backend(&self, other: &Scalar) {
        if self.backend() != other.backend() {
            panic!(
                "scalar backend mismatch: {} vs {}",
                self.backend(),
                other.backend()
            );
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // BigRational prints "p/q", or just "p" when the denominator is 1.
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.partial_cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.assert_same_backend(&rhs);
                match (self, rhs) {
                    (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.$method(b)),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a.$method(b)),
                    _ => unreachable!(),
                }
            }
        }

        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                self.clone().$method(rhs.clone())
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self.assert_same_backend(&rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => {
                assert!(!b.is_zero(), "rational division by zero");
                Scalar::Rational(a / b)
            }
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a / b),
            _ => unreachable!(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

/// Checks that two backends agree, for use at container boundaries.
pub(crate) fn require_same_backend(a: Backend, b: Backend) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::BackendMismatch(a.name(), b.name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_lowest_terms() {
        let s = Scalar::ratio(4, 6);
        assert_eq!(s.to_string(), "2/3");
        let s = Scalar::ratio(3, -9);
        assert_eq!(s.to_string(), "-1/3");
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["0", "7", "-3", "3/2", "-5/7"] {
            let s = Scalar::parse(text, Backend::Rational).unwrap();
            assert_eq!(s.to_string(), text);
        }
        for text in ["0", "1.5", "-0.25", "1e-9"] {
            let s = Scalar::parse(text, Backend::Float64).unwrap();
            let back = Scalar::parse(&s.to_string(), Backend::Float64).unwrap();
            assert_eq!(s, back);
        }
    }

    #[test]
    fn integer_detection() {
        assert!(Scalar::ratio(6, 3).is_integer());
        assert_eq!(Scalar::ratio(6, 3).as_integer(), Some(2));
        assert!(!Scalar::ratio(1, 2).is_integer());
        assert_eq!(Scalar::Float(-4.0).as_integer(), Some(-4));
        assert_eq!(Scalar::Float(0.5).as_integer(), None);
    }

    #[test]
    #[should_panic(expected = "backend mismatch")]
    fn mixed_backend_panics() {
        let _ = Scalar::from_i64(1, Backend::Rational) + Scalar::Float(1.0);
    }

    #[test]
    fn checked_div_rejects_zero() {
        let one = Scalar::one(Backend::Rational);
        let zero = Scalar::zero(Backend::Rational);
        assert_eq!(one.checked_div(&zero), Err(Error::DivisionByZero));
    }
}
