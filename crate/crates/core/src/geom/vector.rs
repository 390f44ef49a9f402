use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, format_rational, parse_rational, Rational};

/// A homology class in `H_1(Σ_g; Q) ≅ Q^{2g}`, stored exactly.
///
/// Ordering is lexicographic on coordinates, which is the canonical vertex
/// order used by [`super::RationalPolytope`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HomologyVector(Vec<Rational>);

impl HomologyVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![Rational::zero(); dim])
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self(coords.iter().map(|&c| crate::rational::int(c)).collect())
    }

    /// Unit vector `e_index` (0-based) in dimension `dim`.
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[index] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self(self.0.iter().map(|a| a * factor).collect())
    }

    pub fn dot(&self, other: &Self) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// `self + t·(other − self)`.
    pub fn lerp(&self, other: &Self, t: &Rational) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + (b - a) * t).collect())
    }

    /// The primitive integer vector positively parallel to `self`, or `None`
    /// for the zero vector.
    pub fn primitive_direction(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let den = common_denominator(&self.0);
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)).abs();
        Some(Self(ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()))
    }
}

impl fmt::Debug for HomologyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for HomologyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", format_rational(c))?;
        }
        write!(f, ")")
    }
}

impl Serialize for HomologyVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for HomologyVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn primitive_direction_clears_denominators() {
        let v = HomologyVector::new(vec![frac(2, 3), frac(-4, 3), frac(0, 1)]);
        assert_eq!(v.primitive_direction().unwrap(), HomologyVector::from_ints(&[1, -2, 0]));
        assert!(HomologyVector::zeros(3).primitive_direction().is_none());
    }

    #[test]
    fn serializes_as_strings() {
        let v = HomologyVector::new(vec![frac(1, 2), frac(-3, 1)]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"["1/2","-3"]"#);
        let back: HomologyVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<HomologyVector>(r#"["1/0"]"#).is_err());
        assert!(serde_json::from_str::<HomologyVector>("[0.5]").is_err());
    }
}
