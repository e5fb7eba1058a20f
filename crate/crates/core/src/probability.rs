use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A probability held as an exact rational (always in lowest terms with a
/// positive denominator) or as a float.
#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    Float(f64),
}

impl Probability {
    pub fn ratio(numer: u64, denom: u64) -> Probability {
        Probability::Exact(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn zero_like(&self) -> Probability {
        match self {
            Probability::Exact(_) => Probability::Exact(BigRational::zero()),
            Probability::Float(_) => Probability::Float(0.0),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Probability::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Probability::Exact(r) => Some(r),
            Probability::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Probability::Float(v) => *v,
        }
    }

    /// `"p/q"` for exact values.
    pub fn rational_string(&self) -> Option<alloc::string::String> {
        self.as_rational()
            .map(|r| alloc::format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn in_unit_interval(&self) -> bool {
        match self {
            Probability::Exact(r) => !r.is_negative() && *r <= BigRational::one(),
            Probability::Float(v) => (0.0..=1.0).contains(v),
        }
    }

    /// Orders exact values exactly and anything involving a float by value.
    pub fn compare(&self, other: &Probability) -> Ordering {
        match (self, other) {
            (Probability::Exact(a), Probability::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Probability::Float(v) => write!(f, "{v}"),
        }
    }
}
