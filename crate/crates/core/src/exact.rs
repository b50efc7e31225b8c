//! Arbitrary-precision signed volumes.
//!
//! Coordinates are `i64`, so a single product of `d` side lengths already
//! overflows machine words for moderate inputs; every volume in this crate
//! is therefore carried as a big integer and all identities hold exactly.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use crate::error::Error;

/// Exact signed volume (units: product of coordinate units).
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactVolume(BigInt);

impl ExactVolume {
    pub fn zero() -> Self {
        ExactVolume(BigInt::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn pow(&self, exp: u32) -> Self {
        ExactVolume((&self.0).pow(exp))
    }

    pub fn as_bigint(&self) -> &BigInt {
        &self.0
    }

    pub fn into_bigint(self) -> BigInt {
        self.0
    }
}

impl From<BigInt> for ExactVolume {
    fn from(v: BigInt) -> Self {
        ExactVolume(v)
    }
}

impl From<i64> for ExactVolume {
    fn from(v: i64) -> Self {
        ExactVolume(BigInt::from(v))
    }
}

impl From<i128> for ExactVolume {
    fn from(v: i128) -> Self {
        ExactVolume(BigInt::from(v))
    }
}

impl fmt::Display for ExactVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for ExactVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactVolume({})", self.0)
    }
}

impl FromStr for ExactVolume {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        BigInt::from_str(s)
            .map(ExactVolume)
            .map_err(|e| Error::Malformed(format!("not a decimal integer {s:?}: {e}")))
    }
}

impl Add for ExactVolume {
    type Output = ExactVolume;
    fn add(self, rhs: ExactVolume) -> ExactVolume {
        ExactVolume(self.0 + rhs.0)
    }
}

impl Sub for ExactVolume {
    type Output = ExactVolume;
    fn sub(self, rhs: ExactVolume) -> ExactVolume {
        ExactVolume(self.0 - rhs.0)
    }
}

impl Neg for ExactVolume {
    type Output = ExactVolume;
    fn neg(self) -> ExactVolume {
        ExactVolume(-self.0)
    }
}

impl AddAssign for ExactVolume {
    fn add_assign(&mut self, rhs: ExactVolume) {
        self.0 += rhs.0;
    }
}

impl SubAssign for ExactVolume {
    fn sub_assign(&mut self, rhs: ExactVolume) {
        self.0 -= rhs.0;
    }
}

impl Mul for ExactVolume {
    type Output = ExactVolume;
    fn mul(self, rhs: ExactVolume) -> ExactVolume {
        ExactVolume(self.0 * rhs.0)
    }
}

impl Mul<i64> for ExactVolume {
    type Output = ExactVolume;
    fn mul(self, rhs: i64) -> ExactVolume {
        ExactVolume(self.0 * BigInt::from(rhs))
    }
}

impl Sum for ExactVolume {
    fn sum<I: Iterator<Item = ExactVolume>>(iter: I) -> ExactVolume {
        iter.fold(ExactVolume::zero(), |acc, v| acc + v)
    }
}
