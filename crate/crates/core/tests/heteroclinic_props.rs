mod common;

use std::collections::BTreeSet;

use common::{config, int_vector};
use proptest::prelude::*;
use rotset_core::config::EngineConfig;
use rotset_core::heteroclinic::{
    chain_rotation_set, global_rotation_union, rotation_table, Chain, HeteroclinicPoset, OrderIndex, Relation,
};
use rotset_core::markov::{BasicPieceModel, MarkovGraph};

#[derive(Clone, Debug)]
struct Dag {
    pieces: Vec<BasicPieceModel>,
    poset: HeteroclinicPoset,
    /// `reach[i][j]`: `p{i} ≺ p{j}` in the transitive closure.
    reach: Vec<Vec<bool>>,
}

/// Pieces `p0..p{n-1}` with relations only from lower to higher index, so
/// the relation is acyclic; some pieces are trivial single points.
fn dag() -> impl Strategy<Value = Dag> {
    (2usize..=6)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((any::<bool>(), prop::collection::vec(int_vector(2, 2), 1..=3)), n),
                prop::collection::vec(prop::bool::weighted(0.35), n * n),
            )
        })
        .prop_map(|(specs, mask)| {
            let n = specs.len();
            let pieces = specs
                .into_iter()
                .enumerate()
                .map(|(i, (trivial, ds))| {
                    if trivial {
                        BasicPieceModel::trivial(format!("p{i}"), MarkovGraph::complete(vec![ds[0].clone()]))
                    } else {
                        BasicPieceModel::curved(format!("p{i}"), MarkovGraph::complete(ds))
                    }
                })
                .collect();
            let mut reach = vec![vec![false; n]; n];
            let mut relations = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if mask[i * n + j] {
                        relations.push(Relation::new(format!("p{i}"), format!("p{j}")));
                        reach[i][j] = true;
                    }
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if reach[i][k] && reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
            Dag {
                pieces,
                poset: HeteroclinicPoset::new(relations),
                reach,
            }
        })
}

fn index(id: &str) -> usize {
    id[1..].parse().unwrap()
}

impl Dag {
    fn nontrivial(&self) -> Vec<usize> {
        (0..self.pieces.len())
            .filter(|&i| !self.pieces[i].is_trivial())
            .collect()
    }

    fn comparable(&self, a: usize, b: usize) -> bool {
        self.reach[a][b] || self.reach[b][a]
    }

    fn chains(&self) -> Vec<Chain> {
        OrderIndex::build(&self.pieces, &self.poset)
            .unwrap()
            .maximal_nontrivial_chains(EngineConfig::default().chain_cap)
            .unwrap()
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn chains_are_totally_ordered_and_maximal(m in dag()) {
        let chains = m.chains();
        for c in &chains {
            let ids: Vec<usize> = c.pieces().iter().map(|s| index(s)).collect();
            for w in ids.windows(2) {
                prop_assert!(m.reach[w[0]][w[1]], "{} is not increasing", c);
            }
            for x in m.nontrivial() {
                if ids.contains(&x) {
                    continue;
                }
                prop_assert!(
                    !ids.iter().all(|&y| m.comparable(x, y)),
                    "p{} extends {}", x, c
                );
            }
        }
        let sorted: Vec<Chain> = chains.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        prop_assert_eq!(sorted, chains);
    }

    #[test]
    fn every_chain_lies_in_a_maximal_one(m in dag()) {
        let chains = m.chains();
        let sets: Vec<BTreeSet<usize>> =
            chains.iter().map(|c| c.pieces().iter().map(|s| index(s)).collect()).collect();
        let table = rotation_table(&m.pieces, &EngineConfig::default()).unwrap();
        let polys: Vec<_> = chains.iter().map(|c| chain_rotation_set(c, &table).unwrap()).collect();
        let nt = m.nontrivial();
        for mask in 1u32..(1 << nt.len()) {
            let sub: Vec<usize> = nt.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i).collect();
            if !sub.iter().all(|&a| sub.iter().all(|&b| a == b || m.comparable(a, b))) {
                continue;
            }
            let at = sets.iter().position(|s| sub.iter().all(|i| s.contains(i)));
            prop_assert!(at.is_some(), "chain {:?} is in no maximal chain", sub);
            let sub_chain = Chain::new(sub.iter().map(|i| format!("p{i}")));
            let p = chain_rotation_set(&sub_chain, &table).unwrap();
            prop_assert!(polys[at.unwrap()].contains_polytope(&p).unwrap());
        }
    }

    #[test]
    fn chain_sets_contain_their_pieces(m in dag()) {
        let table = rotation_table(&m.pieces, &EngineConfig::default()).unwrap();
        for (c, p) in global_rotation_union(&m.pieces, &m.poset, &EngineConfig::default()).unwrap() {
            for id in c.pieces() {
                prop_assert!(p.contains_polytope(&table[id]).unwrap());
            }
        }
    }

    #[test]
    fn origin_in_a_piece_reaches_the_union(m in dag()) {
        let union = global_rotation_union(&m.pieces, &m.poset, &EngineConfig::default()).unwrap();
        let table = rotation_table(&m.pieces, &EngineConfig::default()).unwrap();
        let origin_piece = m.nontrivial().into_iter().any(|i| table[&format!("p{i}")].contains_origin());
        if origin_piece {
            prop_assert!(union.iter().any(|(_, p)| p.contains_origin()));
        }
    }
}
