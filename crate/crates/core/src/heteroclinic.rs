//! The heteroclinic order on basic pieces and its chains.
//!
//! The input relation is closed transitively before trivial pieces are
//! dropped, so an order that passes through a trivial piece survives in the
//! restricted poset. Maximal chains are the maximal paths of the restricted
//! Hasse diagram.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::exec;
use crate::geom::RationalPolytope;
use crate::markov::{piece_rotation_set_with_cap, BasicPieceModel, Classification};
use crate::validation::Violation;

/// Side of an annulus from which a connection leaves or arrives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// A direct heteroclinic connection `from ≺ to`.
///
/// `source_marks` records `≺_L`/`≺_R` (meaningful when `from` is annular);
/// `target_marks` records `≺^L`/`≺^R` (meaningful when `to` is annular).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub source_marks: BTreeSet<Side>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub target_marks: BTreeSet<Side>,
}

impl Relation {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            source_marks: BTreeSet::new(),
            target_marks: BTreeSet::new(),
        }
    }

    pub fn with_source_marks(mut self, marks: impl IntoIterator<Item = Side>) -> Self {
        self.source_marks = marks.into_iter().collect();
        self
    }

    pub fn with_target_marks(mut self, marks: impl IntoIterator<Item = Side>) -> Self {
        self.target_marks = marks.into_iter().collect();
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeteroclinicPoset {
    pub relations: Vec<Relation>,
}

impl HeteroclinicPoset {
    pub fn new(relations: Vec<Relation>) -> Self {
        Self { relations }
    }
}

/// Piece ids in increasing heteroclinic order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chain(pub Vec<String>);

impl Chain {
    pub fn new<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Self {
        Self(ids.into_iter().map(Into::into).collect())
    }

    pub fn pieces(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for Chain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0.join(" < "))
    }
}

/// Rotation polytope of every piece, keyed by piece id.
pub type RotationTable = BTreeMap<String, RationalPolytope>;

/// Indexed order over all pieces (trivial included), ids sorted.
pub struct OrderIndex<'a> {
    pub ids: Vec<&'a str>,
    index: HashMap<&'a str, usize>,
    classification: Vec<Classification>,
    relations: Vec<(usize, usize, &'a Relation)>,
    closure: Vec<Vec<bool>>,
}

impl<'a> OrderIndex<'a> {
    pub fn build(pieces: &'a [BasicPieceModel], poset: &'a HeteroclinicPoset) -> Result<Self> {
        let mut sorted: Vec<&BasicPieceModel> = pieces.iter().collect();
        sorted.sort_by(|a, b| a.id.cmp(&b.id));
        let ids: Vec<&str> = sorted.iter().map(|p| p.id.as_str()).collect();
        let classification = sorted.iter().map(|p| p.classification).collect();
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let n = ids.len();
        let mut relations = Vec::with_capacity(poset.relations.len());
        let mut succ = vec![Vec::new(); n];
        for r in &poset.relations {
            let a = *index
                .get(r.from.as_str())
                .ok_or_else(|| Error::UnknownPiece(r.from.clone()))?;
            let b = *index
                .get(r.to.as_str())
                .ok_or_else(|| Error::UnknownPiece(r.to.clone()))?;
            relations.push((a, b, r));
            succ[a].push(b);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        if let Some(cycle) = find_cycle(&succ) {
            return Err(Error::CyclicRelation(
                cycle.into_iter().map(|i| ids[i].to_string()).collect(),
            ));
        }
        let mut closure = vec![vec![false; n]; n];
        for (a, outs) in succ.iter().enumerate() {
            for &b in outs {
                closure[a][b] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if closure[i][k] {
                    let (row_k, row_i) = if i < k {
                        let (lo, hi) = closure.split_at_mut(k);
                        (&hi[0], &mut lo[i])
                    } else {
                        let (lo, hi) = closure.split_at_mut(i);
                        (&lo[k], &mut hi[0])
                    };
                    for (x, &y) in row_i.iter_mut().zip(row_k.iter()) {
                        *x |= y;
                    }
                }
            }
        }
        Ok(Self {
            ids,
            index,
            classification,
            relations,
            closure,
        })
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// `a ≺ b` in the transitive closure.
    pub fn precedes(&self, a: &str, b: &str) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(i), Some(j)) => self.closure[i][j],
            _ => false,
        }
    }

    fn nontrivial(&self, i: usize) -> bool {
        self.classification[i] != Classification::Trivial
    }

    /// Union of `≺_L/≺_R` marks on direct relations that start an order path
    /// from `a` to `b`.
    pub fn source_marks(&self, a: &str, b: &str) -> BTreeSet<Side> {
        let (Some(ia), Some(ib)) = (self.position(a), self.position(b)) else {
            return BTreeSet::new();
        };
        self.relations
            .iter()
            .filter(|(f, t, _)| *f == ia && (*t == ib || self.closure[*t][ib]))
            .flat_map(|(_, _, r)| r.source_marks.iter().copied())
            .collect()
    }

    /// Union of `≺^L/≺^R` marks on direct relations that end an order path
    /// from `a` to `b`.
    pub fn target_marks(&self, a: &str, b: &str) -> BTreeSet<Side> {
        let (Some(ia), Some(ib)) = (self.position(a), self.position(b)) else {
            return BTreeSet::new();
        };
        self.relations
            .iter()
            .filter(|(f, t, _)| *t == ib && (*f == ia || self.closure[ia][*f]))
            .flat_map(|(_, _, r)| r.target_marks.iter().copied())
            .collect()
    }

    /// Checks that a chain lists known, distinct, strictly increasing pieces.
    pub fn check_chain(&self, chain: &Chain) -> Result<()> {
        if chain.is_empty() {
            return Err(Error::InvalidChain("empty chain".into()));
        }
        for id in chain.pieces() {
            if self.position(id).is_none() {
                return Err(Error::UnknownPiece(id.clone()));
            }
        }
        for w in chain.pieces().windows(2) {
            if !self.precedes(&w[0], &w[1]) {
                return Err(Error::InvalidChain(format!("{} does not precede {}", w[0], w[1])));
            }
        }
        Ok(())
    }

    /// Maximal chains of the order restricted to non-trivial pieces, sorted
    /// lexicographically by id sequence.
    pub fn maximal_nontrivial_chains(&self, cap: usize) -> Result<Vec<Chain>> {
        let nt: Vec<usize> = (0..self.ids.len()).filter(|&i| self.nontrivial(i)).collect();
        let lt = |a: usize, b: usize| self.closure[a][b];
        let covers: Vec<Vec<usize>> = nt
            .iter()
            .map(|&a| {
                nt.iter()
                    .copied()
                    .filter(|&b| lt(a, b) && !nt.iter().any(|&c| lt(a, c) && lt(c, b)))
                    .collect()
            })
            .collect();
        let slot: HashMap<usize, usize> = nt.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut chains = Vec::new();
        let mut path = Vec::new();
        for (k, &a) in nt.iter().enumerate() {
            if nt.iter().any(|&c| lt(c, a)) {
                continue;
            }
            self.extend_chain(k, &nt, &covers, &slot, &mut path, &mut chains, cap)?;
        }
        chains.sort();
        Ok(chains)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_chain(
        &self,
        k: usize,
        nt: &[usize],
        covers: &[Vec<usize>],
        slot: &HashMap<usize, usize>,
        path: &mut Vec<usize>,
        out: &mut Vec<Chain>,
        cap: usize,
    ) -> Result<()> {
        path.push(nt[k]);
        if covers[k].is_empty() {
            if out.len() == cap {
                return Err(Error::ResourceCap {
                    what: "maximal chains".into(),
                    cap,
                });
            }
            out.push(Chain(path.iter().map(|&i| self.ids[i].to_string()).collect()));
        } else {
            for &b in &covers[k] {
                self.extend_chain(slot[&b], nt, covers, slot, path, out, cap)?;
            }
        }
        path.pop();
        Ok(())
    }
}

/// A directed cycle in `succ`, first vertex repeated at the end.
fn find_cycle(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    fn dfs(u: usize, succ: &[Vec<usize>], mark: &mut [Mark], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        mark[u] = Mark::Open;
        stack.push(u);
        for &w in &succ[u] {
            match mark[w] {
                Mark::Open => {
                    let start = stack.iter().position(|&x| x == w).expect("on stack");
                    let mut cycle = stack[start..].to_vec();
                    cycle.push(w);
                    return Some(cycle);
                }
                Mark::New => {
                    if let Some(c) = dfs(w, succ, mark, stack) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        mark[u] = Mark::Done;
        None
    }
    let mut mark = vec![Mark::New; succ.len()];
    let mut stack = Vec::new();
    (0..succ.len()).find_map(|u| {
        if mark[u] == Mark::New {
            dfs(u, succ, &mut mark, &mut stack)
        } else {
            None
        }
    })
}

/// Violations (hard) and warnings (advisory) of a heteroclinic relation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PosetValidation {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

/// Checks references, acyclicity, mark placement and connectivity. Paths are
/// relative to the poset value.
pub fn validate_poset(pieces: &[BasicPieceModel], poset: &HeteroclinicPoset) -> PosetValidation {
    let mut out = PosetValidation::default();
    let by_id: HashMap<&str, &BasicPieceModel> = pieces.iter().map(|p| (p.id.as_str(), p)).collect();
    for (i, r) in poset.relations.iter().enumerate() {
        let path = format!("/relations/{i}");
        for (end, id) in [("from", &r.from), ("to", &r.to)] {
            if !by_id.contains_key(id.as_str()) {
                out.violations.push(Violation::reference(
                    format!("{path}/{end}"),
                    "unknown piece",
                    format!("relation references unknown piece `{id}`"),
                ));
            }
        }
        let annular = |id: &str| by_id.get(id).is_some_and(|p| p.is_annular());
        if !r.source_marks.is_empty() && !annular(&r.from) {
            out.violations.push(Violation::invariant(
                format!("{path}/source_marks"),
                "mark on non-annular endpoint",
                format!("source marks on {} -> {} but `{}` is not annular", r.from, r.to, r.from),
            ));
        }
        if !r.target_marks.is_empty() && !annular(&r.to) {
            out.violations.push(Violation::invariant(
                format!("{path}/target_marks"),
                "mark on non-annular endpoint",
                format!("target marks on {} -> {} but `{}` is not annular", r.from, r.to, r.to),
            ));
        }
    }
    if !out.violations.is_empty() {
        return out;
    }
    if let Err(Error::CyclicRelation(cycle)) = OrderIndex::build(pieces, poset) {
        out.violations.push(Violation::invariant(
            "/relations",
            "cyclic relation",
            format!("heteroclinic relation has a cycle: {}", cycle.join(" -> ")),
        ));
        return out;
    }

    // Connectivity of the underlying undirected graph.
    let ids: Vec<&str> = pieces.iter().map(|p| p.id.as_str()).collect();
    let pos: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in &poset.relations {
        let (a, b) = (
            root(&mut parent, pos[r.from.as_str()]),
            root(&mut parent, pos[r.to.as_str()]),
        );
        parent[a] = b;
    }
    let components: BTreeSet<usize> = (0..ids.len()).map(|i| root(&mut parent, i)).collect();
    if components.len() > 1 {
        out.warnings.push(Violation::invariant(
            "/relations",
            "disconnected relation",
            format!(
                "the relation splits the pieces into {} classes; a complete model connects them through trivial pieces",
                components.len()
            ),
        ));
    }
    out
}

/// Rotation polytope of every piece.
pub fn rotation_table(pieces: &[BasicPieceModel], config: &EngineConfig) -> Result<RotationTable> {
    let sets = exec::try_map(config.parallelism, pieces, |p| {
        piece_rotation_set_with_cap(p, config.cycle_cap)
    })?;
    Ok(pieces.iter().map(|p| p.id.clone()).zip(sets).collect())
}

/// Maximal chains of non-trivial pieces.
pub fn maximal_nontrivial_chains(pieces: &[BasicPieceModel], poset: &HeteroclinicPoset) -> Result<Vec<Chain>> {
    OrderIndex::build(pieces, poset)?.maximal_nontrivial_chains(EngineConfig::default().chain_cap)
}

/// `conv(⋃ ρ_Λ)` over the chain's pieces.
pub fn chain_rotation_set(chain: &Chain, table: &RotationTable) -> Result<RationalPolytope> {
    if chain.is_empty() {
        return Err(Error::InvalidChain("empty chain".into()));
    }
    let sets = chain
        .pieces()
        .iter()
        .map(|id| table.get(id).ok_or_else(|| Error::UnknownPiece(id.clone())))
        .collect::<Result<Vec<_>>>()?;
    RationalPolytope::hull_of_union(sets)
}

/// `ρ(f)` as the list of maximal-chain polytopes (union semantics).
pub fn global_rotation_union(
    pieces: &[BasicPieceModel],
    poset: &HeteroclinicPoset,
    config: &EngineConfig,
) -> Result<Vec<(Chain, RationalPolytope)>> {
    let table = rotation_table(pieces, config)?;
    let chains = OrderIndex::build(pieces, poset)?.maximal_nontrivial_chains(config.chain_cap)?;
    chain_polytopes(chains, &table, config)
}

pub(crate) fn chain_polytopes(
    chains: Vec<Chain>,
    table: &RotationTable,
    config: &EngineConfig,
) -> Result<Vec<(Chain, RationalPolytope)>> {
    let sets = exec::try_map(config.parallelism, &chains, |c| chain_rotation_set(c, table))?;
    Ok(chains.into_iter().zip(sets).collect())
}
