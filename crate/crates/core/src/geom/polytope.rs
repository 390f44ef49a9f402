use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize};

use super::linalg::{affine_pivots, inverse};
use super::lp::{solve, LpOutcome};
use super::HomologyVector;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A rational polytope in V-representation.
///
/// The vertex list is irredundant and sorted lexicographically, so two
/// polytopes are geometrically equal iff they compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RationalPolytope {
    dim: usize,
    vertices: Vec<HomologyVector>,
}

/// An affine functional separating a point from a polytope:
/// `normal·v ≤ offset` on every vertex, `normal·x > offset` at the point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: HomologyVector,
    #[serde(with = "crate::rational::serde_rational")]
    pub offset: Rational,
}

impl Halfspace {
    pub fn contains(&self, x: &HomologyVector) -> bool {
        self.normal.dot(x) <= self.offset
    }
}

impl RationalPolytope {
    pub fn point(p: HomologyVector) -> Self {
        Self {
            dim: p.dim(),
            vertices: vec![p],
        }
    }

    pub fn hull<I: IntoIterator<Item = HomologyVector>>(points: I) -> Result<Self> {
        extreme_points(points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[HomologyVector] {
        &self.vertices
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn contains(&self, x: &HomologyVector) -> Result<bool> {
        contains_point(self, x)
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&HomologyVector::zeros(self.dim))
            .expect("origin has the ambient dimension")
    }

    /// True iff every vertex of `other` lies in `self`.
    pub fn contains_polytope(&self, other: &Self) -> Result<bool> {
        for v in other.vertices() {
            if !self.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn affine_dim(&self) -> usize {
        affine_dim(self)
    }

    /// `conv(self ∪ {0})`.
    pub fn coned(&self) -> Self {
        let mut pts = self.vertices.clone();
        pts.push(HomologyVector::zeros(self.dim));
        extreme_points(pts).expect("nonempty and uniform")
    }

    /// Hull of the union of the given polytopes' vertices.
    pub fn hull_of_union<'a, I>(polytopes: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a RationalPolytope>,
    {
        extreme_points(polytopes.into_iter().flat_map(|p| p.vertices.iter().cloned()))
    }

    /// A separating halfspace when `x ∉ self`, from the LP's Farkas
    /// certificate.
    pub fn separate(&self, x: &HomologyVector) -> Result<Option<Halfspace>> {
        x.check_dim(self.dim)?;
        let cols: Vec<&HomologyVector> = self.vertices.iter().collect();
        Ok(match membership_lp(&cols, x) {
            LpOutcome::Infeasible(y) => {
                let (normal, y0) = y.split_at(self.dim);
                Some(Halfspace {
                    normal: HomologyVector::new(normal.to_vec()),
                    offset: -y0[0].clone(),
                })
            }
            _ => None,
        })
    }
}

impl<'de> Deserialize<'de> for RationalPolytope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            vertices: Vec<HomologyVector>,
        }
        let raw = Raw::deserialize(d)?;
        if let Some(bad) = raw.vertices.iter().find(|v| v.dim() != raw.dim) {
            return Err(D::Error::custom(format!(
                "vertex {bad} does not have dimension {}",
                raw.dim
            )));
        }
        extreme_points(raw.vertices).map_err(D::Error::custom)
    }
}

/// Feasibility of `Σ λ_j c_j = x, Σ λ_j = 1, λ ≥ 0`.
fn membership_lp(cols: &[&HomologyVector], x: &HomologyVector) -> LpOutcome {
    let d = x.dim();
    let mut a: Vec<Vec<Rational>> = (0..d)
        .map(|i| cols.iter().map(|c| c.coords()[i].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); cols.len()]);
    let mut b = x.coords().to_vec();
    b.push(Rational::one());
    solve(&a, &b, None)
}

fn check_uniform(points: &[HomologyVector]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyPointSet)?;
    let d = first.dim();
    for p in points {
        p.check_dim(d)?;
    }
    Ok(d)
}

/// The irredundant vertex set of `conv(points)`.
///
/// Points are projected onto coordinates that are injective over their affine
/// hull, so the hull is found in full dimension. Vertices are discovered from
/// Farkas certificates: whenever a point is not in the hull of the vertices
/// found so far, the certificate's normal direction is maximized over all
/// points and the lexicographically greatest maximizer is a new vertex.
pub fn extreme_points<I: IntoIterator<Item = HomologyVector>>(points: I) -> Result<RationalPolytope> {
    let pts: Vec<HomologyVector> = points.into_iter().collect();
    let dim = check_uniform(&pts)?;
    let pts: Vec<HomologyVector> = pts.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    if pts.len() == 1 {
        return Ok(RationalPolytope { dim, vertices: pts });
    }
    let pivots = affine_pivots(&pts);
    let proj: Vec<HomologyVector> = pts
        .iter()
        .map(|p| HomologyVector::new(pivots.iter().map(|&c| p.coords()[c].clone()).collect()))
        .collect();
    let keep = hull_indices(&proj);
    Ok(RationalPolytope {
        dim,
        vertices: keep.into_iter().map(|i| pts[i].clone()).collect(),
    })
}

const SIMPLEX_CACHE: usize = 16;

struct CachedSimplex {
    inv: Vec<Vec<Rational>>,
}

impl CachedSimplex {
    fn contains(&self, p: &HomologyVector) -> bool {
        let r = p.dim();
        self.inv.iter().all(|row| {
            let mut acc = row[r].clone();
            for (a, x) in row[..r].iter().zip(p.coords()) {
                if !x.is_zero() {
                    acc += a * x;
                }
            }
            !acc.is_negative()
        })
    }
}

/// Vertex indices of a full-dimensional point set sorted lexicographically
/// by its original coordinates (index order).
fn hull_indices(proj: &[HomologyVector]) -> Vec<usize> {
    let n = proj.len();
    let r = proj[0].dim();
    let mut is_vertex = vec![false; n];
    // The lexicographic minimum is always a vertex.
    is_vertex[0] = true;
    let mut found = vec![0usize];
    let mut cache: Vec<CachedSimplex> = Vec::new();

    for i in 1..n {
        while !is_vertex[i] {
            if let Some(pos) = cache.iter().position(|s| s.contains(&proj[i])) {
                let hit = cache.remove(pos);
                cache.insert(0, hit);
                break;
            }
            let cols: Vec<&HomologyVector> = found.iter().map(|&k| &proj[k]).collect();
            match membership_lp(&cols, &proj[i]) {
                LpOutcome::Optimal { basis, .. } => {
                    if basis.len() == r + 1 {
                        let m: Vec<Vec<Rational>> = (0..=r)
                            .map(|row| {
                                basis
                                    .iter()
                                    .map(|&b| {
                                        if row < r {
                                            cols[b].coords()[row].clone()
                                        } else {
                                            Rational::one()
                                        }
                                    })
                                    .collect()
                            })
                            .collect();
                        if let Some(inv) = inverse(&m) {
                            cache.insert(0, CachedSimplex { inv });
                            cache.truncate(SIMPLEX_CACHE);
                        }
                    }
                    break;
                }
                LpOutcome::Infeasible(y) => {
                    let normal = HomologyVector::new(y[..r].to_vec());
                    let mut best = 0;
                    let mut best_val = normal.dot(&proj[0]);
                    for (j, p) in proj.iter().enumerate().skip(1) {
                        let v = normal.dot(p);
                        if v >= best_val {
                            best = j;
                            best_val = v;
                        }
                    }
                    debug_assert!(!is_vertex[best]);
                    is_vertex[best] = true;
                    found.push(best);
                }
                LpOutcome::Unbounded => unreachable!("feasibility problem"),
            }
        }
    }
    (0..n).filter(|&i| is_vertex[i]).collect()
}

/// Exact membership of `x` in `p`.
pub fn contains_point(p: &RationalPolytope, x: &HomologyVector) -> Result<bool> {
    x.check_dim(p.dim)?;
    if p.vertices.binary_search(x).is_ok() {
        return Ok(true);
    }
    if p.is_point() {
        return Ok(false);
    }
    let cols: Vec<&HomologyVector> = p.vertices.iter().collect();
    Ok(matches!(membership_lp(&cols, x), LpOutcome::Optimal { .. }))
}

/// Whether `x` is a convex combination of `points`, without computing the
/// hull first. The points need not be irredundant.
pub fn in_convex_hull(points: &[HomologyVector], x: &HomologyVector) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    x.check_dim(check_uniform(points)?)?;
    let cols: Vec<&HomologyVector> = points.iter().collect();
    Ok(matches!(membership_lp(&cols, x), LpOutcome::Optimal { .. }))
}

/// Rank of `{v − v_0}` over the rationals.
pub fn affine_dim(p: &RationalPolytope) -> usize {
    affine_pivots(&p.vertices).len()
}

/// A maximal sub-interval of `[0, 1]` not covered by a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamGap {
    #[serde(with = "crate::rational::serde_rational")]
    pub start: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub end: Rational,
    pub includes_start: bool,
    pub includes_end: bool,
}

/// `{t ∈ [0,1] : a + t(b − a) ∈ p}` as a closed interval, or `None`.
pub fn segment_parameters(
    p: &RationalPolytope,
    a: &HomologyVector,
    b: &HomologyVector,
) -> Result<Option<(Rational, Rational)>> {
    a.check_dim(p.dim)?;
    b.check_dim(p.dim)?;
    if a == b {
        return Ok(contains_point(p, a)?.then(|| (Rational::zero(), Rational::one())));
    }
    let k = p.vertices.len();
    let d = p.dim;
    let dir = b.sub(a);
    // Columns: λ_1..λ_k, t, slack s with t + s = 1.
    let mut rows: Vec<Vec<Rational>> = (0..d)
        .map(|i| {
            let mut row: Vec<Rational> = p.vertices.iter().map(|v| v.coords()[i].clone()).collect();
            row.push(-dir.coords()[i].clone());
            row.push(Rational::zero());
            row
        })
        .collect();
    let mut sum_row = vec![Rational::one(); k];
    sum_row.extend([Rational::zero(), Rational::zero()]);
    rows.push(sum_row);
    let mut t_row = vec![Rational::zero(); k];
    t_row.extend([Rational::one(), Rational::one()]);
    rows.push(t_row);
    let mut rhs = a.coords().to_vec();
    rhs.extend([Rational::one(), Rational::one()]);

    let mut cost = vec![Rational::zero(); k + 2];
    cost[k] = Rational::one();
    let lo = match solve(&rows, &rhs, Some(&cost)) {
        LpOutcome::Optimal { value, .. } => value,
        LpOutcome::Infeasible(_) => return Ok(None),
        LpOutcome::Unbounded => unreachable!("t is bounded"),
    };
    cost[k] = -Rational::one();
    let hi = match solve(&rows, &rhs, Some(&cost)) {
        LpOutcome::Optimal { value, .. } => -value,
        _ => unreachable!("feasible and bounded"),
    };
    Ok(Some((lo, hi)))
}

/// Sub-intervals of `[0,1]` whose points `a + t(b − a)` lie in no member.
pub fn uncovered_gaps(a: &HomologyVector, b: &HomologyVector, family: &[RationalPolytope]) -> Result<Vec<ParamGap>> {
    if b.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut intervals = Vec::new();
    for p in family {
        if let Some(iv) = segment_parameters(p, a, b)? {
            intervals.push(iv);
        }
    }
    intervals.sort();
    let mut merged: Vec<(Rational, Rational)> = Vec::new();
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => merged.push((lo, hi)),
        }
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let mut gaps = Vec::new();
    let Some(first) = merged.first() else {
        return Ok(vec![ParamGap {
            start: zero,
            end: one,
            includes_start: true,
            includes_end: true,
        }]);
    };
    if first.0 > zero {
        gaps.push(ParamGap {
            start: zero,
            end: first.0.clone(),
            includes_start: true,
            includes_end: false,
        });
    }
    for w in merged.windows(2) {
        gaps.push(ParamGap {
            start: w[0].1.clone(),
            end: w[1].0.clone(),
            includes_start: false,
            includes_end: false,
        });
    }
    let last = merged.last().expect("nonempty");
    if last.1 < one {
        gaps.push(ParamGap {
            start: last.1.clone(),
            end: one,
            includes_start: false,
            includes_end: true,
        });
    }
    Ok(gaps)
}

/// True iff the segment `[a, b]` lies in the union of `family`.
pub fn segment_covered(a: &HomologyVector, b: &HomologyVector, family: &[RationalPolytope]) -> Result<bool> {
    Ok(uncovered_gaps(a, b, family)?.is_empty())
}
