mod common;

use common::{config, int_vector, point_set, vector};
use proptest::prelude::*;
use rotset_core::analysis::{
    classify_chain, convexity_probe, convexity_probe_with, star_shape_check, star_shape_check_with, ChainClass,
};
use rotset_core::exec::Parallelism;
use rotset_core::geom::{extreme_points, rank, uncovered_gaps, HomologyVector, RationalPolytope};
use rotset_core::rational::frac;

/// Two or three small polytopes in a common dimension `2..=3`.
fn family() -> impl Strategy<Value = Vec<RationalPolytope>> {
    (2usize..=3).prop_flat_map(|d| {
        prop::collection::vec(prop::collection::vec(int_vector(d, 3), 1..=3), 2..=3)
            .prop_map(|sets| sets.into_iter().map(|s| extreme_points(s).unwrap()).collect())
    })
}

proptest! {
    #![proptest_config(config(96))]

    /// Adding a member that contains the origin keeps a star-shaped union
    /// star-shaped. Without the origin condition the implication fails:
    /// `[0, e1]` alone is star-shaped, `[0, e1] ∪ [e2, 2e2]` is not.
    #[test]
    fn star_shape_is_monotone_under_origin_members(mut fam in family(), extra in prop::collection::vec(int_vector(3, 3), 1..=3)) {
        let d = fam[0].dim();
        let before = star_shape_check(&fam).unwrap();
        let mut pts: Vec<HomologyVector> = extra.iter().map(|v| HomologyVector::new(v.coords()[..d].to_vec())).collect();
        pts.push(HomologyVector::zeros(d));
        fam.push(extreme_points(pts).unwrap());
        if before.holds {
            prop_assert!(star_shape_check(&fam).unwrap().holds);
        }
    }

    #[test]
    fn star_witness_is_uncovered(fam in family()) {
        let s = star_shape_check(&fam).unwrap();
        prop_assert_eq!(s.holds, s.witness.is_none());
        if let Some(w) = s.witness {
            let origin = HomologyVector::zeros(w.point.dim());
            let gaps = uncovered_gaps(&origin, &w.point, &fam).unwrap();
            prop_assert_eq!(gaps.first(), Some(&w.gap));
            let t = (&w.gap.start + &w.gap.end) * frac(1, 2);
            let x = w.point.scale(&t);
            prop_assert!(fam.iter().all(|p| !p.contains(&x).unwrap()));
        }
    }

    #[test]
    fn convexity_witness_is_certified(fam in family(), density in 1usize..=4) {
        let probe = convexity_probe(&fam, density).unwrap();
        prop_assert_eq!(probe.convex, probe.witness.is_none());
        if let Some(w) = probe.witness {
            let hull = RationalPolytope::hull_of_union(&fam).unwrap();
            prop_assert!(hull.contains(&w.point).unwrap());
            prop_assert_eq!(w.separations.len(), fam.len());
            for (p, h) in fam.iter().zip(&w.separations) {
                prop_assert!(!p.contains(&w.point).unwrap());
                prop_assert!(!h.contains(&w.point));
                prop_assert!(p.vertices().iter().all(|v| h.contains(v)));
            }
        }
    }

    #[test]
    fn a_single_polytope_is_convex((_, pts) in point_set(3, 5), density in 1usize..=4) {
        let p = extreme_points(pts).unwrap();
        prop_assert!(convexity_probe(&[p], density).unwrap().convex);
    }

    #[test]
    fn case_b_direction_survives_positive_scaling(
        u in int_vector(4, 3),
        ts in prop::collection::vec((1i64..=6, 1i64..=4), 1..=4),
        s in (1i64..=5, 1i64..=5),
    ) {
        prop_assume!(!u.is_zero());
        let on_ray: Vec<HomologyVector> = ts.iter().map(|&(p, q)| u.scale(&frac(p, q))).collect();
        let p = extreme_points(on_ray.clone()).unwrap();
        let scaled = extreme_points(on_ray.iter().map(|v| v.scale(&frac(s.0, s.1)))).unwrap();
        let (ChainClass::CaseB { direction: a }, ChainClass::CaseB { direction: b }) =
            (classify_chain(&p), classify_chain(&scaled))
        else {
            return Err(TestCaseError::fail("expected a ray"));
        };
        prop_assert_eq!(rank([&a, &b]), 1);
        prop_assert!(a.dot(&b) > frac(0, 1));
        prop_assert!(a.dot(&u) > frac(0, 1));
    }

    #[test]
    fn origin_members_classify_as_case_a(v in prop::collection::vec(vector(3), 0..4)) {
        let mut pts = v;
        pts.push(HomologyVector::zeros(3));
        prop_assert_eq!(classify_chain(&extreme_points(pts).unwrap()), ChainClass::CaseA);
    }

    #[test]
    fn execution_strategy_does_not_change_results(fam in family()) {
        prop_assert_eq!(
            star_shape_check_with(&fam, Parallelism::Sequential).unwrap(),
            star_shape_check_with(&fam, Parallelism::Parallel).unwrap()
        );
        prop_assert_eq!(
            convexity_probe_with(&fam, 3, usize::MAX, Parallelism::Sequential).unwrap(),
            convexity_probe_with(&fam, 3, usize::MAX, Parallelism::Parallel).unwrap()
        );
    }
}

#[test]
fn member_missing_the_origin_can_break_star_shape() {
    let seg =
        |a: &[i64], b: &[i64]| extreme_points([HomologyVector::from_ints(a), HomologyVector::from_ints(b)]).unwrap();
    let one = [seg(&[0, 0], &[1, 0])];
    assert!(star_shape_check(&one).unwrap().holds);
    let two = [seg(&[0, 0], &[1, 0]), seg(&[0, 1], &[0, 2])];
    let s = star_shape_check(&two).unwrap();
    assert!(!s.holds);
    assert_eq!(s.witness.unwrap().point, HomologyVector::from_ints(&[0, 1]));
}
