//! Arbitrary-precision rationals with an `i64` fast path.
//!
//! Almost every entry that shows up in the complexes is a small integer, so
//! values are kept as `Ratio<i64>` and only promoted to `BigRational` when a
//! checked operation overflows. A value that fits in `i64` is always stored
//! in the small form, which keeps `Eq` and `Hash` structural.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub enum Rat {
    Small(Ratio<i64>),
    Big(BigRational),
}

impl Rat {
    pub fn int(n: i64) -> Rat {
        Rat::Small(Ratio::from_integer(n))
    }

    /// `num / den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::Small(Ratio::new(num, den))
    }

    fn big(&self) -> BigRational {
        match self {
            Rat::Small(r) => BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Rat::Big(b) => b.clone(),
        }
    }

    fn from_big(b: BigRational) -> Rat {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) => Rat::Small(Ratio::new_raw(n, d)),
            _ => Rat::Big(b),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_zero(),
            Rat::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_one(),
            Rat::Big(b) => b.is_one(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_negative(),
            Rat::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_integer(),
            Rat::Big(b) => b.is_integer(),
        }
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Rat::Small(r) => match r.numer().checked_abs() {
                Some(_) => Rat::Small(r.recip()),
                None => Rat::from_big(self.big().recip()),
            },
            Rat::Big(b) => Rat::from_big(b.recip()),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rat::Small(r) if r.is_integer() => Some(*r.numer()),
            _ => None,
        }
    }
}

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $checked:ident, $op:tt) => {
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                if let (Rat::Small(a), Rat::Small(b)) = (self, rhs) {
                    if let Some(c) = a.$checked(b) {
                        return Rat::Small(c);
                    }
                }
                Rat::from_big(self.big() $op rhs.big())
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                (&self).$method(rhs)
            }
        }
    };
}

checked_binop!(Add, add, checked_add, +);
checked_binop!(Sub, sub, checked_sub, -);
checked_binop!(Mul, mul, checked_mul, *);

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn div(self, rhs: &'a Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        if let (Rat::Small(a), Rat::Small(b)) = (self, rhs) {
            if let Some(c) = a.checked_div(b) {
                return Rat::Small(c);
            }
        }
        Rat::from_big(self.big() / rhs.big())
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        &self / &rhs
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(r) if *r.numer() != i64::MIN => Rat::Small(-r),
            _ => Rat::from_big(-self.big()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = &*self * rhs;
    }
}

impl Zero for Rat {
    fn zero() -> Rat {
        Rat::int(0)
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
}

impl One for Rat {
    fn one() -> Rat {
        Rat::int(1)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (self, other) {
            (Rat::Small(a), Rat::Small(b)) => a == b,
            (Rat::Big(a), Rat::Big(b)) => a == b,
            // normalized: a small value never equals a big one
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rat::Small(r) => {
                0u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Rat::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (self, other) {
            (Rat::Small(a), Rat::Small(b)) => a.cmp(b),
            _ => self.big().cmp(&other.big()),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(r) => write!(f, "{r}"),
            Rat::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational `{0}`")]
pub struct ParseRatError(pub String);

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `"-2"`, `"3/4"`, `" 7 / -14 "`; integers may be arbitrarily long.
    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let err = || ParseRatError(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rat::from_big(BigRational::new(n, d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!("3/4".parse::<Rat>().unwrap(), Rat::new(3, 4));
        assert_eq!("-2".parse::<Rat>().unwrap(), Rat::int(-2));
        assert_eq!("6/-8".parse::<Rat>().unwrap().to_string(), "-3/4");
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::int(i64::MAX);
        let sum = &big + &Rat::int(1);
        assert!(matches!(sum, Rat::Big(_)));
        let back = &sum - &Rat::int(1);
        assert!(matches!(back, Rat::Small(_)));
        assert_eq!(back, big);
        let sq = &big * &big;
        assert_eq!(&sq / &big, big);
    }

    #[test]
    fn ordering_across_representations() {
        let big = &Rat::int(i64::MAX) * &Rat::int(4);
        assert!(Rat::int(3) < big);
        assert!(-&big < Rat::int(-5));
        assert_eq!("18446744073709551616".parse::<Rat>().unwrap().to_string(), "18446744073709551616");
    }
}
