//! Exact rational scalars. Every coefficient in the crate is a `Ratio`;
//! floating point only appears in report rendering.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced, denominator positive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(BigRational);

impl Ratio {
    pub fn zero() -> Self {
        Ratio(BigRational::zero())
    }

    pub fn one() -> Self {
        Ratio(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Ratio(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n/d`, reduced. Errors on a zero denominator.
    pub fn new(n: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in {n}/{d}")));
        }
        Ok(Ratio(BigRational::new(BigInt::from(n), BigInt::from(d))))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Ratio(BigRational::from_integer(n))
    }

    pub fn from_big(n: BigInt, d: BigInt) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Ratio(BigRational::new(n, d)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Ratio(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(Ratio(self.0.recip()))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Ratio::one();
        for _ in 0..exp {
            out *= self.clone();
        }
        out
    }

    /// Exact square root if both numerator and denominator are perfect squares.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.0.numer().sqrt();
        let d = self.0.denom().sqrt();
        if &(&n * &n) == self.0.numer() && &(&d * &d) == self.0.denom() {
            Some(Ratio(BigRational::new(n, d)))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            self.0.numer().to_f64().unwrap_or(f64::NAN) / self.0.denom().to_f64().unwrap_or(f64::NAN)
        })
    }
}

impl fmt::Display for Ratio {
    /// `p` for integers, `p/q` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid rational {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Ratio(BigRational::new(n, d)))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Ratio(BigRational::from_integer(n)))
            }
        }
    }
}

impl serde::Serialize for Ratio {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Ratio {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Ratio {
            type Output = Ratio;
            fn $method(self, rhs: Ratio) -> Ratio {
                Ratio((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Ratio> for &'a Ratio {
            type Output = Ratio;
            fn $method(self, rhs: &'a Ratio) -> Ratio {
                Ratio((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Ratio {
    type Output = Ratio;
    fn div(self, rhs: Ratio) -> Ratio {
        assert!(!rhs.is_zero(), "division by zero Ratio");
        Ratio(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Ratio> for &'a Ratio {
    type Output = Ratio;
    fn div(self, rhs: &'a Ratio) -> Ratio {
        assert!(!rhs.is_zero(), "division by zero Ratio");
        Ratio(&self.0 / &rhs.0)
    }
}

impl Neg for Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio(-self.0)
    }
}

impl<'a> Neg for &'a Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio(-self.0.clone())
    }
}

impl AddAssign for Ratio {
    fn add_assign(&mut self, rhs: Ratio) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Ratio {
    fn sub_assign(&mut self, rhs: Ratio) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Ratio {
    fn mul_assign(&mut self, rhs: Ratio) {
        self.0 *= rhs.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let r: Ratio = "3/6".parse().unwrap();
        assert_eq!(r, Ratio::new(1, 2).unwrap());
        assert_eq!(r.to_string(), "1/2");
        assert_eq!("3".parse::<Ratio>().unwrap().to_string(), "3");
        assert_eq!("-4/2".parse::<Ratio>().unwrap().to_string(), "-2");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!("1/0".parse::<Ratio>().is_err());
        assert!(Ratio::new(1, 0).is_err());
    }

    #[test]
    fn sqrt_exact_cases() {
        assert_eq!(Ratio::new(9, 4).unwrap().sqrt_exact(), Some(Ratio::new(3, 2).unwrap()));
        assert_eq!(Ratio::from_int(2).sqrt_exact(), None);
        assert_eq!(Ratio::from_int(-1).sqrt_exact(), None);
    }
}
