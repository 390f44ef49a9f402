use serde::{Deserialize, Serialize};

use super::linalg::rank;
use super::{HomologyVector, RationalPolytope};

/// A linear subspace of `H_1(Σ; Q)` given by a basis (possibly empty).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubspaceBasis {
    pub basis: Vec<HomologyVector>,
}

impl SubspaceBasis {
    pub fn new(basis: Vec<HomologyVector>) -> Self {
        Self { basis }
    }

    pub fn rank(&self) -> usize {
        rank(&self.basis)
    }

    pub fn is_independent(&self) -> bool {
        self.rank() == self.basis.len()
    }

    /// Basis of `self + other` (concatenation; may be dependent).
    pub fn sum<'a, I: IntoIterator<Item = &'a SubspaceBasis>>(parts: I) -> Self {
        Self {
            basis: parts.into_iter().flat_map(|s| s.basis.iter().cloned()).collect(),
        }
    }

    pub fn contains_vector(&self, v: &HomologyVector) -> bool {
        let r = self.rank();
        rank(self.basis.iter().chain(std::iter::once(v))) == r
    }

    /// `dim(self ∩ other)` by `dim U + dim W − dim(U + W)`.
    pub fn intersection_rank(&self, other: &Self) -> usize {
        let joint = rank(self.basis.iter().chain(&other.basis));
        self.rank() + other.rank() - joint
    }
}

/// True iff every vertex of `p` lies in the span of `s`.
pub fn in_span(s: &SubspaceBasis, p: &RationalPolytope) -> bool {
    first_outside_span(s, p).is_none()
}

/// The first vertex of `p` outside the span of `s`, if any.
pub fn first_outside_span<'a>(s: &SubspaceBasis, p: &'a RationalPolytope) -> Option<&'a HomologyVector> {
    p.vertices().iter().find(|v| !s.contains_vector(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> HomologyVector {
        HomologyVector::from_ints(xs)
    }

    #[test]
    fn in_span_examples() {
        let s = SubspaceBasis::new(vec![v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0])]);
        let tri = RationalPolytope::hull([v(&[0, 0, 0, 0]), v(&[1, 0, 0, 0]), v(&[1, 1, 0, 0])]).unwrap();
        assert!(in_span(&s, &tri));
        let off = RationalPolytope::point(v(&[0, 0, 1, 0]));
        assert!(!in_span(&s, &off));
        assert_eq!(first_outside_span(&s, &off), Some(&v(&[0, 0, 1, 0])));
        let empty = SubspaceBasis::default();
        assert!(in_span(&empty, &RationalPolytope::point(v(&[0, 0, 0, 0]))));
    }

    #[test]
    fn intersection_rank_of_coordinate_planes() {
        let a = SubspaceBasis::new(vec![v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let b = SubspaceBasis::new(vec![v(&[0, 1, 0]), v(&[0, 0, 1])]);
        assert_eq!(a.intersection_rank(&b), 1);
        assert!(!SubspaceBasis::new(vec![v(&[1, 1]), v(&[2, 2])]).is_independent());
    }
}
