//! Basic pieces as displacement-labeled digraphs.
//!
//! Each node is an element of a rotational Markov partition and carries the
//! integer deck translation `T_i ∈ Z^{2g}` of its image; edges are the
//! allowed transitions of the subshift. The rotation set of a piece is the
//! convex hull of periodic-orbit means, and its extreme points are already
//! realized by elementary circuits.

mod cycles;

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use cycles::visit_simple_cycles;

use crate::error::{Error, Result};
use crate::geom::{extreme_points, HomologyVector, RationalPolytope};
use crate::rational::Rational;
use crate::validation::{pointer_token, Violation, ViolationKind};

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Trivial,
    Annular,
    Curved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillBehavior {
    Attracting,
    Repelling,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovNode {
    pub id: String,
    pub displacement: HomologyVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovGraph {
    pub nodes: Vec<MarkovNode>,
    pub edges: Vec<(String, String)>,
}

impl MarkovGraph {
    pub fn new(nodes: Vec<MarkovNode>, edges: Vec<(String, String)>) -> Self {
        Self { nodes, edges }
    }

    /// Complete digraph with self-loops on nodes `n0, n1, …` with the given
    /// displacements.
    pub fn complete(displacements: Vec<HomologyVector>) -> Self {
        let ids: Vec<String> = (0..displacements.len()).map(|i| format!("n{i}")).collect();
        let edges = ids
            .iter()
            .flat_map(|a| ids.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        let nodes = ids
            .into_iter()
            .zip(displacements)
            .map(|(id, displacement)| MarkovNode { id, displacement })
            .collect();
        Self { nodes, edges }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicPieceModel {
    pub id: String,
    pub classification: Classification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub package: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fill_behavior: Option<FillBehavior>,
    pub graph: MarkovGraph,
}

impl BasicPieceModel {
    pub fn curved(id: impl Into<String>, graph: MarkovGraph) -> Self {
        Self {
            id: id.into(),
            classification: Classification::Curved,
            package: None,
            fill_behavior: None,
            graph,
        }
    }

    pub fn trivial(id: impl Into<String>, graph: MarkovGraph) -> Self {
        Self {
            classification: Classification::Trivial,
            ..Self::curved(id, graph)
        }
    }

    pub fn annular(id: impl Into<String>, package: impl Into<String>, fill: FillBehavior, graph: MarkovGraph) -> Self {
        Self {
            id: id.into(),
            classification: Classification::Annular,
            package: Some(package.into()),
            fill_behavior: Some(fill),
            graph,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.classification == Classification::Trivial
    }

    pub fn is_annular(&self) -> bool {
        self.classification == Classification::Annular
    }

    pub fn dim(&self) -> Option<usize> {
        self.graph.nodes.first().map(|n| n.displacement.dim())
    }
}

/// A periodic itinerary, listed once around its cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PeriodicWord(pub Vec<String>);

impl PeriodicWord {
    pub fn new<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Self {
        Self(ids.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same cycle started `k` letters later.
    pub fn rotated(&self, k: usize) -> Self {
        let mut w = self.0.clone();
        if !w.is_empty() {
            let k = k % w.len();
            w.rotate_left(k);
        }
        Self(w)
    }
}

/// Index-based view of a piece's graph.
pub(crate) struct IndexedGraph<'a> {
    pub piece: &'a BasicPieceModel,
    pub index: HashMap<&'a str, usize>,
    pub succ: Vec<Vec<usize>>,
}

impl<'a> IndexedGraph<'a> {
    pub fn build(piece: &'a BasicPieceModel) -> Result<Self> {
        let index: HashMap<&str, usize> = piece
            .graph
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let mut succ = vec![Vec::new(); piece.graph.nodes.len()];
        for (a, b) in &piece.graph.edges {
            let lookup = |id: &String| {
                index.get(id.as_str()).copied().ok_or_else(|| Error::UnknownNode {
                    piece: piece.id.clone(),
                    node: id.clone(),
                })
            };
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            succ[ia].push(ib);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Ok(Self { piece, index, succ })
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn displacement(&self, i: usize) -> &HomologyVector {
        &self.piece.graph.nodes[i].displacement
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    fn reachable(&self, from: usize, reverse: bool) -> Vec<bool> {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for (a, outs) in self.succ.iter().enumerate() {
            for &b in outs {
                if reverse {
                    adj[b].push(a);
                } else {
                    adj[a].push(b);
                }
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.len() > 0
            && self.reachable(0, false).into_iter().all(|x| x)
            && self.reachable(0, true).into_iter().all(|x| x)
    }

    /// Mean displacement along a cycle of node indices.
    pub fn cycle_mean(&self, cycle: &[usize]) -> HomologyVector {
        let dim = self.displacement(cycle[0]).dim();
        let sum = cycle
            .iter()
            .fold(HomologyVector::zeros(dim), |acc, &i| acc.add(self.displacement(i)));
        sum.scale(&Rational::new(BigInt::from(1), BigInt::from(cycle.len())))
    }

    /// Node indices of `word`, checking every transition including the
    /// closing one.
    pub fn resolve_word(&self, word: &PeriodicWord) -> Result<Vec<usize>> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        let idx = word
            .0
            .iter()
            .map(|id| {
                self.index.get(id.as_str()).copied().ok_or_else(|| Error::UnknownNode {
                    piece: self.piece.id.clone(),
                    node: id.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let p = idx.len();
        for j in 0..p {
            let (a, b) = (idx[j], idx[(j + 1) % p]);
            if !self.has_edge(a, b) {
                return Err(Error::InadmissibleWord {
                    piece: self.piece.id.clone(),
                    from: word.0[j].clone(),
                    to: word.0[(j + 1) % p].clone(),
                    position: j,
                });
            }
        }
        Ok(idx)
    }
}

/// Structural invariants of a piece; an empty list means the piece is valid.
pub fn validate_piece(piece: &BasicPieceModel) -> Vec<Violation> {
    validate_piece_with_cap(piece, DEFAULT_CYCLE_CAP)
}

pub fn validate_piece_with_cap(piece: &BasicPieceModel, cycle_cap: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let annular = piece.is_annular();
    match (annular, piece.package.is_some()) {
        (true, false) => out.push(Violation::invariant(
            "/package",
            "annular piece without package",
            format!("annular piece `{}` must name its annular package", piece.id),
        )),
        (false, true) => out.push(Violation::invariant(
            "/package",
            "package on non-annular piece",
            format!("piece `{}` is not annular but names a package", piece.id),
        )),
        _ => {}
    }
    match (annular, piece.fill_behavior.is_some()) {
        (true, false) => out.push(Violation::invariant(
            "/fill_behavior",
            "annular piece without fill behavior",
            format!("annular piece `{}` must state its fill behavior", piece.id),
        )),
        (false, true) => out.push(Violation::invariant(
            "/fill_behavior",
            "fill behavior on non-annular piece",
            format!("piece `{}` is not annular but states a fill behavior", piece.id),
        )),
        _ => {}
    }

    let nodes = &piece.graph.nodes;
    if nodes.is_empty() {
        out.push(Violation::invariant(
            "/graph/nodes",
            "empty graph",
            "a piece needs at least one node",
        ));
        return out;
    }
    let mut seen = BTreeSet::new();
    let dim = nodes[0].displacement.dim();
    for (i, n) in nodes.iter().enumerate() {
        let path = format!("/graph/nodes/{i}");
        if !seen.insert(n.id.as_str()) {
            out.push(Violation::invariant(
                &path,
                "duplicate node id",
                format!("node id `{}` repeats", n.id),
            ));
        }
        if n.displacement.dim() != dim {
            out.push(Violation::new(
                ViolationKind::Schema,
                format!("{path}/displacement"),
                "displacement dimension",
                format!("expected {dim} coordinates, found {}", n.displacement.dim()),
            ));
        }
        if !n.displacement.is_integral() {
            out.push(Violation::invariant(
                format!("{path}/displacement"),
                "non-integer displacement",
                format!("displacement {} of node `{}` is not integral", n.displacement, n.id),
            ));
        }
    }
    for (i, (a, b)) in piece.graph.edges.iter().enumerate() {
        for id in [a, b] {
            if !seen.contains(id.as_str()) {
                out.push(Violation::reference(
                    format!("/graph/edges/{i}"),
                    "unknown node",
                    format!("edge references unknown node `{}`", pointer_token(id)),
                ));
            }
        }
    }
    if !out.is_empty() {
        return out;
    }

    let g = IndexedGraph::build(piece).expect("references checked");
    let mut has_in = vec![false; g.len()];
    for outs in &g.succ {
        for &b in outs {
            has_in[b] = true;
        }
    }
    for (i, n) in nodes.iter().enumerate() {
        if g.succ[i].is_empty() {
            out.push(Violation::invariant(
                format!("/graph/nodes/{i}"),
                "node without outgoing edge",
                format!("node `{}` has no outgoing edge", n.id),
            ));
        }
        if !has_in[i] {
            out.push(Violation::invariant(
                format!("/graph/nodes/{i}"),
                "node without incoming edge",
                format!("node `{}` has no incoming edge", n.id),
            ));
        }
    }
    if !g.is_strongly_connected() {
        out.push(Violation::invariant(
            "/graph",
            "not strongly connected",
            format!("the graph of piece `{}` is not strongly connected", piece.id),
        ));
    }
    if out.is_empty() && piece.is_trivial() {
        match piece_rotation_set_with_cap(piece, cycle_cap) {
            Ok(p) if !p.is_point() => out.push(Violation::invariant(
                "/graph",
                "trivial piece with non-singleton rotation set",
                format!(
                    "trivial piece `{}` has a rotation polytope with {} vertices",
                    piece.id,
                    p.vertices().len()
                ),
            )),
            Ok(_) => {}
            Err(e) => out.push(Violation::new(
                ViolationKind::Resource,
                "/graph",
                "cycle cap exceeded",
                e.to_string(),
            )),
        }
    }
    out
}

/// `(1/p) Σ_j T(w_j)` for an admissible periodic word.
pub fn word_rotation_vector(piece: &BasicPieceModel, w: &PeriodicWord) -> Result<HomologyVector> {
    let g = IndexedGraph::build(piece)?;
    let idx = g.resolve_word(w)?;
    Ok(g.cycle_mean(&idx))
}

/// Rotation polytope of a piece: the hull of its elementary-circuit means.
pub fn piece_rotation_set(piece: &BasicPieceModel) -> Result<RationalPolytope> {
    piece_rotation_set_with_cap(piece, DEFAULT_CYCLE_CAP)
}

pub fn piece_rotation_set_with_cap(piece: &BasicPieceModel, cycle_cap: usize) -> Result<RationalPolytope> {
    let g = IndexedGraph::build(piece)?;
    let mut means = BTreeSet::new();
    let mut count = 0usize;
    let complete = visit_simple_cycles(&g.succ, |cycle| {
        count += 1;
        if count > cycle_cap {
            return ControlFlow::Break(());
        }
        means.insert(g.cycle_mean(cycle));
        ControlFlow::Continue(())
    });
    if !complete {
        return Err(Error::ResourceCap {
            what: format!("simple cycles in piece `{}`", piece.id),
            cap: cycle_cap,
        });
    }
    extreme_points(means)
}

/// Elementary circuits of a piece as periodic words.
pub fn simple_cycle_words(piece: &BasicPieceModel, cycle_cap: usize) -> Result<Vec<PeriodicWord>> {
    let g = IndexedGraph::build(piece)?;
    let mut words = Vec::new();
    let complete = visit_simple_cycles(&g.succ, |cycle| {
        if words.len() == cycle_cap {
            return ControlFlow::Break(());
        }
        words.push(PeriodicWord::new(
            cycle.iter().map(|&i| piece.graph.nodes[i].id.clone()),
        ));
        ControlFlow::Continue(())
    });
    if !complete {
        return Err(Error::ResourceCap {
            what: format!("simple cycles in piece `{}`", piece.id),
            cap: cycle_cap,
        });
    }
    Ok(words)
}
