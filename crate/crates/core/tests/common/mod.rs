#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rotset_core::geom::HomologyVector;
use rotset_core::markov::{BasicPieceModel, MarkovGraph, MarkovNode};
use rotset_core::rational::{frac, Rational};

/// Fixed seed so every run explores the same cases.
pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed_2024),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| frac(p, q))
}

pub fn vector(d: usize) -> impl Strategy<Value = HomologyVector> {
    prop::collection::vec(rational(), d).prop_map(HomologyVector::new)
}

pub fn int_vector(d: usize, r: i64) -> impl Strategy<Value = HomologyVector> {
    prop::collection::vec(-r..=r, d).prop_map(|xs| HomologyVector::from_ints(&xs))
}

/// `(d, points)` with `d` in `2..=max_d` and `1..=max_n` points.
pub fn point_set(max_d: usize, max_n: usize) -> impl Strategy<Value = (usize, Vec<HomologyVector>)> {
    (2..=max_d).prop_flat_map(move |d| (Just(d), prop::collection::vec(vector(d), 1..=max_n)))
}

/// Convex weights with denominator `den` spread by `picks`.
pub fn combination(vs: &[HomologyVector], den: u64, picks: &[usize]) -> HomologyVector {
    let mut units = vec![0i64; vs.len()];
    for k in 0..den as usize {
        units[picks[k % picks.len()] % vs.len()] += 1;
    }
    units
        .iter()
        .zip(vs)
        .fold(HomologyVector::zeros(vs[0].dim()), |acc, (u, v)| {
            acc.add(&v.scale(&frac(*u, den as i64)))
        })
}

/// A strongly connected graph on `n` nodes: the cycle `0 → 1 → … → 0`
/// plus the extra edges selected by `mask`.
pub fn graph(displacements: Vec<HomologyVector>, mask: &[bool]) -> MarkovGraph {
    let n = displacements.len();
    let id = |i: usize| format!("n{i}");
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if b == (a + 1) % n || mask[a * n + b] {
                edges.push((id(a), id(b)));
            }
        }
    }
    let nodes = displacements
        .into_iter()
        .enumerate()
        .map(|(i, displacement)| MarkovNode {
            id: id(i),
            displacement,
        })
        .collect();
    MarkovGraph::new(nodes, edges)
}

/// Random strongly connected curved piece in `Q^d` with up to `max_n` nodes.
pub fn piece(d: usize, max_n: usize) -> impl Strategy<Value = BasicPieceModel> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec(int_vector(d, 3), n),
                prop::collection::vec(any::<bool>(), n * n),
            )
        })
        .prop_map(|(ds, mask)| BasicPieceModel::curved("P", graph(ds, &mask)))
}
