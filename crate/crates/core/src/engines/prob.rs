use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// An exact probability in `[0, 1]`, kept reduced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(BigRational);

impl ExactProb {
    /// # Panics
    /// If `value` lies outside `[0, 1]`.
    pub fn new(value: BigRational) -> Self {
        assert!(
            !(value < BigRational::zero() || value > BigRational::one()),
            "probability {value} outside [0, 1]"
        );
        ExactProb(value)
    }

    pub fn from_counts(hits: BigUint, total: BigUint) -> Self {
        ExactProb::new(BigRational::new(BigInt::from(hits), BigInt::from(total)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        ExactProb::new(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        ExactProb(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactProb(BigRational::one())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_value(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }

    /// `P(self) / P(given)`, for conditioning on an event of positive
    /// probability.
    pub fn conditional_on(&self, given: &ExactProb) -> ExactProb {
        ExactProb::new(&self.0 / &given.0)
    }

    pub fn complement(&self) -> ExactProb {
        ExactProb(BigRational::one() - &self.0)
    }

    /// Whether the denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        let d = self.0.denom();
        d.bits() > 0 && d.trailing_zeros() == Some(d.bits() - 1)
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `num/den` with the `/1` kept, so values always read as fractions.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Serialises a rational as `{"num", "den", "float"}`.
pub struct RationalJson<'a>(pub &'a BigRational);

impl Serialize for RationalJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 3)?;
        st.serialize_field("num", &self.0.numer().to_string())?;
        st.serialize_field("den", &self.0.denom().to_string())?;
        st.serialize_field("float", &rational_to_f64(self.0))?;
        st.end()
    }
}

impl Serialize for ExactProb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalJson(&self.0).serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let p = ExactProb::ratio(5, 128);
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["num"], "5");
        assert_eq!(v["den"], "128");
        assert_eq!(v["float"], 0.0390625);
    }

    #[test]
    fn dyadic_detection() {
        assert!(ExactProb::ratio(7, 16).is_dyadic());
        assert!(ExactProb::one().is_dyadic());
        assert!(!ExactProb::ratio(1, 3).is_dyadic());
    }

    #[test]
    fn complement_and_conditioning() {
        let p = ExactProb::ratio(1, 64);
        assert_eq!(p.complement(), ExactProb::ratio(63, 64));
        assert_eq!(ExactProb::ratio(1, 128).conditional_on(&p), ExactProb::ratio(1, 2));
    }

    #[test]
    #[should_panic]
    fn rejects_above_one() {
        ExactProb::ratio(3, 2);
    }
}
