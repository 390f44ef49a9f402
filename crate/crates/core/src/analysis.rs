//! Decision procedures on computed rotation data: chain classification,
//! star shape about the origin, a certified convexity probe for unions of
//! polytopes, and the full-dimensional block check.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::conley::Block;
use crate::error::{Error, Result};
use crate::exec::{self, Parallelism};
use crate::geom::{rank, uncovered_gaps, Halfspace, HomologyVector, ParamGap, RationalPolytope};
use crate::rational::{frac, Rational};

pub const DEFAULT_PROBE_DENSITY: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ChainClass {
    /// The chain set contains the origin.
    CaseA,
    /// The chain set lies on a ray `⟨direction⟩ − {0}`.
    CaseB { direction: HomologyVector },
    /// Neither; a maximal chain should never land here.
    Inconsistent,
}

pub fn classify_chain(p: &RationalPolytope) -> ChainClass {
    if p.contains_origin() {
        return ChainClass::CaseA;
    }
    if rank(p.vertices()) == 1 {
        let direction = p.vertices()[0]
            .primitive_direction()
            .expect("a nonzero vertex exists when the origin is outside");
        return ChainClass::CaseB { direction };
    }
    ChainClass::Inconsistent
}

fn check_common_dim(union: &[RationalPolytope]) -> Result<usize> {
    let first = union.first().ok_or(Error::EmptyPointSet)?;
    for p in union {
        if p.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: p.dim(),
            });
        }
    }
    Ok(first.dim())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarWitness {
    /// Endpoint of the segment from the origin that leaves the union.
    pub point: HomologyVector,
    /// First uncovered parameter interval of `t ↦ t·point`.
    pub gap: ParamGap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarShape {
    pub holds: bool,
    pub segments_tested: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<StarWitness>,
}

pub fn star_shape_check(union: &[RationalPolytope]) -> Result<StarShape> {
    star_shape_check_with(union, Parallelism::Sequential)
}

/// Tests `[0, v]` for every vertex `v` of every member and for the midpoint
/// of every vertex pair within a member.
pub fn star_shape_check_with(union: &[RationalPolytope], par: Parallelism) -> Result<StarShape> {
    let dim = check_common_dim(union)?;
    let mut targets: Vec<HomologyVector> = Vec::new();
    let mut seen = BTreeSet::new();
    let half = frac(1, 2);
    for p in union {
        let vs = p.vertices();
        for (i, a) in vs.iter().enumerate() {
            if seen.insert(a.clone()) {
                targets.push(a.clone());
            }
            for b in &vs[i + 1..] {
                let mid = a.lerp(b, &half);
                if seen.insert(mid.clone()) {
                    targets.push(mid);
                }
            }
        }
    }
    let origin = HomologyVector::zeros(dim);
    let gaps = exec::try_map(par, &targets, |t| {
        if t.is_zero() {
            return Ok(Vec::new());
        }
        uncovered_gaps(&origin, t, union)
    })?;
    let witness = targets
        .iter()
        .zip(gaps)
        .find_map(|(t, g)| g.into_iter().next().map(|gap| StarWitness { point: t.clone(), gap }));
    Ok(StarShape {
        holds: witness.is_none(),
        segments_tested: targets.len(),
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityWitness {
    /// A point of the hull of the union that lies in no member.
    pub point: HomologyVector,
    /// One separating halfspace per member, in member order.
    pub separations: Vec<Halfspace>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityProbe {
    /// `false` only with a certified witness; `true` means no counterexample
    /// at this density.
    pub convex: bool,
    pub density: usize,
    pub points_tested: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ConvexityWitness>,
}

pub fn convexity_probe(union: &[RationalPolytope], density: usize) -> Result<ConvexityProbe> {
    convexity_probe_with(union, density, usize::MAX, Parallelism::Sequential)
}

/// Number of points `Σ k_i/q · h_i` with `Σ k_i = q` for `q = 1..=density`
/// over `m` vertices, saturating.
fn grid_size(m: usize, density: usize) -> u128 {
    let mut total: u128 = 0;
    for q in 1..=density as u128 {
        // C(q + m − 1, m − 1)
        let mut c: u128 = 1;
        for i in 1..m as u128 {
            c = match c.checked_mul(q + i) {
                Some(x) => x / i,
                None => return u128::MAX,
            };
        }
        total = total.saturating_add(c);
    }
    total
}

fn for_each_composition(q: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(left: usize, slot: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if slot + 1 == buf.len() {
            buf[slot] = left;
            f(buf);
            return;
        }
        for k in 0..=left {
            buf[slot] = k;
            rec(left - k, slot + 1, buf, f);
        }
    }
    let mut buf = vec![0; parts];
    rec(q, 0, &mut buf, f);
}

/// Probes the rational barycentric grid of the union's hull, denominators
/// `1..=density`, plus all pairwise vertex midpoints. The reported witness
/// is the lexicographically least uncovered grid point.
pub fn convexity_probe_with(
    union: &[RationalPolytope],
    density: usize,
    cap: usize,
    par: Parallelism,
) -> Result<ConvexityProbe> {
    check_common_dim(union)?;
    if density == 0 {
        return Err(Error::InvalidArgument("probe density must be at least 1".into()));
    }
    let hull = RationalPolytope::hull_of_union(union)?;
    if union.contains(&hull) {
        return Ok(ConvexityProbe {
            convex: true,
            density,
            points_tested: 0,
            witness: None,
        });
    }
    let hv = hull.vertices();
    let size = grid_size(hv.len(), density.max(2));
    if size > cap as u128 {
        return Err(Error::ResourceCap {
            what: "convexity probe grid points".into(),
            cap,
        });
    }
    let mut points: BTreeSet<HomologyVector> = BTreeSet::new();
    let dim = hull.dim();
    let mut add = |q: usize, ks: &[usize]| {
        let qr = Rational::from_integer(q.into());
        let mut acc = vec![Rational::zero(); dim];
        for (k, h) in ks.iter().zip(hv) {
            if *k == 0 {
                continue;
            }
            let w = Rational::from_integer((*k).into()) / &qr;
            for (a, c) in acc.iter_mut().zip(h.coords()) {
                *a += &w * c;
            }
        }
        points.insert(HomologyVector::new(acc));
    };
    for q in 1..=density {
        for_each_composition(q, hv.len(), &mut |ks| add(q, ks));
    }
    if density < 2 {
        for_each_composition(2, hv.len(), &mut |ks| add(2, ks));
    }
    // Vertices of members are covered by definition.
    for p in union {
        for v in p.vertices() {
            points.remove(v);
        }
    }
    let points: Vec<HomologyVector> = points.into_iter().collect();
    let covered = |x: &HomologyVector| -> Result<bool> {
        for p in union {
            if p.contains(x)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let first_bad = exec::try_position(par, &points, |x| covered(x).map(|c| !c))?;
    let witness = match first_bad {
        None => None,
        Some(i) => {
            let point = points[i].clone();
            let separations = union
                .iter()
                .map(|p| p.separate(&point).map(|h| h.expect("uncovered point separates")))
                .collect::<Result<Vec<_>>>()?;
            Some(ConvexityWitness { point, separations })
        }
    };
    Ok(ConvexityProbe {
        convex: witness.is_none(),
        density,
        points_tested: points.len(),
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteriorVerdict {
    Convex,
    NotApplicable,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteriorReport {
    pub verdict: InteriorVerdict,
    /// Index of the full-dimensional block tested against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_block: Option<usize>,
    /// A vertex of another block outside the full-dimensional one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stray: Option<StrayVertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrayVertex {
    pub block: usize,
    pub vertex: HomologyVector,
}

/// If a block has affine dimension `2g`, every other block must sit inside it.
pub fn interior_check(blocks: &[Block], genus: usize) -> Result<InteriorReport> {
    let Some(full) = blocks.iter().position(|b| b.polytope.affine_dim() == 2 * genus) else {
        return Ok(InteriorReport {
            verdict: InteriorVerdict::NotApplicable,
            full_block: None,
            stray: None,
        });
    };
    let big = &blocks[full].polytope;
    for (i, b) in blocks.iter().enumerate() {
        if i == full {
            continue;
        }
        for v in b.polytope.vertices() {
            if !big.contains(v)? {
                return Ok(InteriorReport {
                    verdict: InteriorVerdict::Violation,
                    full_block: Some(full),
                    stray: Some(StrayVertex {
                        block: i,
                        vertex: v.clone(),
                    }),
                });
            }
        }
    }
    Ok(InteriorReport {
        verdict: InteriorVerdict::Convex,
        full_block: Some(full),
        stray: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conley::{MarkedSupport, Marking};

    fn v(xs: &[i64]) -> HomologyVector {
        HomologyVector::from_ints(xs)
    }

    fn poly(pts: &[&[i64]]) -> RationalPolytope {
        RationalPolytope::hull(pts.iter().map(|p| v(p))).unwrap()
    }

    fn block(p: RationalPolytope) -> Block {
        Block {
            key: MarkedSupport::new(["S"], Marking::Zero, Marking::Zero),
            polytope: p,
            chains: vec![0],
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_chain(&poly(&[&[0, 0], &[1, 0], &[1, 1]])), ChainClass::CaseA);
        assert_eq!(
            classify_chain(&poly(&[&[1, 0], &[2, 0]])),
            ChainClass::CaseB { direction: v(&[1, 0]) }
        );
        assert_eq!(classify_chain(&poly(&[&[1, 0], &[1, 1]])), ChainClass::Inconsistent);
        assert_eq!(
            classify_chain(&poly(&[&[-2, -4], &[-1, -2]])),
            ChainClass::CaseB {
                direction: v(&[-1, -2])
            }
        );
    }

    #[test]
    fn star_shape_examples() {
        let tri = poly(&[&[0, 0], &[1, 0], &[1, 1]]);
        let seg = poly(&[&[-1, 0], &[0, 0]]);
        assert!(star_shape_check(&[tri, seg]).unwrap().holds);

        let far = poly(&[&[1, 0], &[2, 0]]);
        let r = star_shape_check(&[far]).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.point, v(&[1, 0]));
        assert_eq!(
            w.gap,
            ParamGap {
                start: Rational::zero(),
                end: frac(1, 1),
                includes_start: true,
                includes_end: false,
            }
        );
    }

    #[test]
    fn star_shape_checks_midpoints() {
        // Every vertex ray is covered by a segment, but not the ray through
        // the midpoint of (0,2) and (3,3).
        let tri = poly(&[&[2, 0], &[0, 2], &[3, 3]]);
        let union = [
            tri,
            poly(&[&[0, 0], &[2, 0]]),
            poly(&[&[0, 0], &[0, 2]]),
            poly(&[&[0, 0], &[3, 3]]),
        ];
        let r = star_shape_check(&union).unwrap();
        assert!(!r.holds);
        assert_eq!(
            r.witness.unwrap().point,
            HomologyVector::new(vec![frac(3, 2), frac(5, 2)])
        );
    }

    #[test]
    fn star_shape_rejects_mixed_dimensions() {
        let err = star_shape_check(&[poly(&[&[0, 0]]), poly(&[&[0, 0, 0]])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn complementary_triangles_are_not_convex() {
        let a = poly(&[&[0, 0, 0, 0], &[1, 0, 0, 0], &[1, 1, 0, 0]]);
        let b = poly(&[&[0, 0, 0, 0], &[0, 0, 1, 0], &[0, 0, 1, 1]]);
        let r = convexity_probe(&[a.clone(), b.clone()], 2).unwrap();
        assert!(!r.convex);
        let w = r.witness.unwrap();
        assert!(!a.contains(&w.point).unwrap());
        assert!(!b.contains(&w.point).unwrap());
        for (h, p) in w.separations.iter().zip([&a, &b]) {
            assert!(!h.contains(&w.point));
            assert!(p.vertices().iter().all(|x| h.contains(x)));
        }
    }

    #[test]
    fn convex_unions_pass() {
        let segs = [poly(&[&[0, 0], &[1, 0]]), poly(&[&[1, 0], &[2, 0]])];
        for d in 1..=5 {
            assert!(convexity_probe(&segs, d).unwrap().convex);
        }
        assert!(
            convexity_probe(&[poly(&[&[0, 0], &[1, 0], &[1, 1]])], 4)
                .unwrap()
                .convex
        );
    }

    #[test]
    fn probe_cap_is_enforced() {
        let a = poly(&[&[0, 0, 0, 0], &[1, 0, 0, 0], &[1, 1, 0, 0]]);
        let b = poly(&[&[0, 0, 0, 0], &[0, 0, 1, 0], &[0, 0, 1, 1]]);
        let err = convexity_probe_with(&[a, b], 4, 10, Parallelism::Sequential).unwrap_err();
        assert!(err.is_resource_cap());
    }

    #[test]
    fn grid_size_counts_compositions() {
        // m = 3, q = 1..2: 3 + 6
        assert_eq!(grid_size(3, 2), 9);
        assert_eq!(grid_size(1, 4), 4);
    }

    #[test]
    fn interior_examples() {
        let cube = poly(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]);
        let r = interior_check(&[block(cube.clone())], 1).unwrap();
        assert_eq!(r.verdict, InteriorVerdict::Convex);

        let tri = poly(&[&[0, 0, 0, 0], &[1, 0, 0, 0], &[1, 1, 0, 0]]);
        let r = interior_check(&[block(tri)], 2).unwrap();
        assert_eq!(r.verdict, InteriorVerdict::NotApplicable);

        let r = interior_check(&[block(cube), block(poly(&[&[5, 5]]))], 1).unwrap();
        assert_eq!(r.verdict, InteriorVerdict::Violation);
        assert_eq!(
            r.stray,
            Some(StrayVertex {
                block: 1,
                vertex: v(&[5, 5])
            })
        );
    }
}
