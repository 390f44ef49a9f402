//! Essential decomposition bookkeeping: supports and marked supports of
//! chains, block assembly, and the structural checks on the result.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{convexity_probe_with, ConvexityProbe};
use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::exec;
use crate::geom::{first_outside_span, rank, HomologyVector, RationalPolytope, SubspaceBasis};
use crate::heteroclinic::{Chain, HeteroclinicPoset, OrderIndex, Side};
use crate::markov::{BasicPieceModel, Classification, FillBehavior};
use crate::model::ModelDocument;
use crate::validation::{pointer_token, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsurfaceKind {
    Annulus,
    CurvedSurface,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsurface {
    pub id: String,
    pub kind: SubsurfaceKind,
    /// Homology of the subsurface inside `H_1(Σ; Q)`.
    #[serde(default)]
    pub subspace: SubspaceBasis,
}

impl Subsurface {
    pub fn new(id: impl Into<String>, kind: SubsurfaceKind, basis: Vec<HomologyVector>) -> Self {
        Self {
            id: id.into(),
            kind,
            subspace: SubspaceBasis::new(basis),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionModel {
    pub subsurfaces: Vec<Subsurface>,
    /// Non-trivial piece id to subsurface id.
    pub assignment: BTreeMap<String, String>,
}

impl DecompositionModel {
    pub fn subsurface(&self, id: &str) -> Option<&Subsurface> {
        self.subsurfaces.iter().find(|s| s.id == id)
    }

    /// Sum of the subspaces of the given subsurfaces.
    pub fn support_subspace<'a>(&self, support: impl IntoIterator<Item = &'a String>) -> Result<SubspaceBasis> {
        let parts = support
            .into_iter()
            .map(|id| {
                self.subsurface(id)
                    .map(|s| &s.subspace)
                    .ok_or_else(|| Error::UnknownSubsurface(id.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubspaceBasis::sum(parts))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Marking {
    L,
    #[serde(rename = "0")]
    Zero,
    R,
}

impl From<Side> for Marking {
    fn from(s: Side) -> Self {
        match s {
            Side::L => Marking::L,
            Side::R => Marking::R,
        }
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Marking::L => "L",
            Marking::Zero => "0",
            Marking::R => "R",
        })
    }
}

/// `(supp(C), X_C, Y_C)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MarkedSupport {
    pub support: BTreeSet<String>,
    pub x: Marking,
    pub y: Marking,
}

impl MarkedSupport {
    pub fn new<S: Into<String>>(support: impl IntoIterator<Item = S>, x: Marking, y: Marking) -> Self {
        Self {
            support: support.into_iter().map(Into::into).collect(),
            x,
            y,
        }
    }
}

/// Renders as `A+S|L|0`.
impl fmt::Display for MarkedSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<&str> = self.support.iter().map(String::as_str).collect();
        write!(f, "{}|{}|{}", ids.join("+"), self.x, self.y)
    }
}

/// `C_{A,X,Y}` as the hull of its coned member chain sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub key: MarkedSupport,
    pub polytope: RationalPolytope,
    /// Indices of contributing chains in the chain list.
    pub chains: Vec<usize>,
}

/// Lookup tables shared by support computations on one model.
pub struct SupportContext<'a> {
    pieces: HashMap<&'a str, &'a BasicPieceModel>,
    order: OrderIndex<'a>,
    decomposition: &'a DecompositionModel,
}

impl<'a> SupportContext<'a> {
    pub fn new(
        pieces: &'a [BasicPieceModel],
        poset: &'a HeteroclinicPoset,
        decomposition: &'a DecompositionModel,
    ) -> Result<Self> {
        Ok(Self {
            pieces: pieces.iter().map(|p| (p.id.as_str(), p)).collect(),
            order: OrderIndex::build(pieces, poset)?,
            decomposition,
        })
    }

    pub fn order(&self) -> &OrderIndex<'a> {
        &self.order
    }

    fn piece(&self, id: &str) -> Result<&'a BasicPieceModel> {
        self.pieces
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownPiece(id.to_string()))
    }

    pub fn support(&self, chain: &Chain) -> Result<BTreeSet<String>> {
        chain
            .pieces()
            .iter()
            .map(|id| {
                let s = self
                    .decomposition
                    .assignment
                    .get(id)
                    .ok_or_else(|| Error::UnassignedPiece(id.clone()))?;
                if self.decomposition.subsurface(s).is_none() {
                    return Err(Error::UnknownSubsurface(s.clone()));
                }
                Ok(s.clone())
            })
            .collect()
    }

    /// All marked supports of a valid non-trivial chain: `X` ranges over the
    /// source marks of the first pair when the first piece fills to a
    /// repelling annulus and the chain leaves it, `Y` likewise at the end.
    pub fn marked_supports(&self, chain: &Chain) -> Result<Vec<MarkedSupport>> {
        self.order.check_chain(chain)?;
        for id in chain.pieces() {
            if self.piece(id)?.classification == Classification::Trivial {
                return Err(Error::InvalidChain(format!("trivial piece `{id}` in chain")));
            }
        }
        let support = self.support(chain)?;
        let ids = chain.pieces();
        let n = ids.len();
        let fills = |id: &str, fill: FillBehavior| -> Result<bool> {
            let p = self.piece(id)?;
            Ok(p.is_annular() && p.fill_behavior == Some(fill))
        };
        let xs: Vec<Marking> = if support.len() >= 2 && fills(&ids[0], FillBehavior::Repelling)? {
            let marks = self.order.source_marks(&ids[0], &ids[1]);
            if marks.is_empty() {
                return Err(Error::MissingMark {
                    from: ids[0].clone(),
                    to: ids[1].clone(),
                    detail: "a repelling annulus starts the chain but the connection carries no source mark".into(),
                });
            }
            marks.into_iter().map(Marking::from).collect()
        } else {
            vec![Marking::Zero]
        };
        let ys: Vec<Marking> = if support.len() >= 2 && fills(&ids[n - 1], FillBehavior::Attracting)? {
            let marks = self.order.target_marks(&ids[n - 2], &ids[n - 1]);
            if marks.is_empty() {
                return Err(Error::MissingMark {
                    from: ids[n - 2].clone(),
                    to: ids[n - 1].clone(),
                    detail: "an attracting annulus ends the chain but the connection carries no target mark".into(),
                });
            }
            marks.into_iter().map(Marking::from).collect()
        } else {
            vec![Marking::Zero]
        };
        Ok(xs
            .iter()
            .flat_map(|&x| {
                let support = &support;
                ys.iter().map(move |&y| MarkedSupport {
                    support: support.clone(),
                    x,
                    y,
                })
            })
            .collect())
    }

    /// Groups chains by marked support; each block is the hull of the origin
    /// and its member chain sets. Sorted by key.
    pub fn assemble_blocks(&self, chains: &[(Chain, RationalPolytope)], config: &EngineConfig) -> Result<Vec<Block>> {
        let mut groups: BTreeMap<MarkedSupport, Vec<usize>> = BTreeMap::new();
        for (i, (chain, _)) in chains.iter().enumerate() {
            for key in self.marked_supports(chain)? {
                groups.entry(key).or_default().push(i);
            }
        }
        let groups: Vec<(MarkedSupport, Vec<usize>)> = groups.into_iter().collect();
        exec::try_map(config.parallelism, &groups, |(key, members)| {
            let dim = chains[members[0]].1.dim();
            let pts = std::iter::once(HomologyVector::zeros(dim))
                .chain(members.iter().flat_map(|&i| chains[i].1.vertices().iter().cloned()));
            Ok(Block {
                key: key.clone(),
                polytope: RationalPolytope::hull(pts)?,
                chains: members.clone(),
            })
        })
    }
}

pub fn chain_marked_support(chain: &Chain, model: &ModelDocument) -> Result<Vec<MarkedSupport>> {
    SupportContext::new(&model.pieces, &model.heteroclinic, &model.decomposition)?.marked_supports(chain)
}

/// Blocks of a model from scratch.
pub fn enumerate_blocks(model: &ModelDocument, config: &EngineConfig) -> Result<Vec<Block>> {
    let ctx = SupportContext::new(&model.pieces, &model.heteroclinic, &model.decomposition)?;
    let chains = crate::heteroclinic::global_rotation_union(&model.pieces, &model.heteroclinic, config)?;
    ctx.assemble_blocks(&chains, config)
}

/// `4·2^{5g−5}`, or `None` when it overflows `u128`.
pub fn block_bound(genus: usize) -> Option<u128> {
    if genus < 1 {
        return None;
    }
    let shift = 5 * genus as u32 - 3;
    1u128.checked_shl(shift).filter(|_| shift < 128)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub genus: usize,
    /// Decimal string; the bound outgrows 64 bits at genus 14.
    pub bound: String,
    pub blocks: usize,
    pub passed: bool,
}

pub fn check_bound(genus: usize, blocks: &[Block]) -> BoundCheck {
    let bound = block_bound(genus);
    BoundCheck {
        genus,
        bound: bound.map_or_else(|| "overflow".into(), |b| b.to_string()),
        blocks: blocks.len(),
        passed: bound.is_none_or(|b| blocks.len() as u128 <= b),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantCheck {
    pub support: BTreeSet<String>,
    pub variants: usize,
    pub passed: bool,
}

/// Number of `(X, Y)` variants per support; at most four.
pub fn check_variants(blocks: &[Block]) -> Vec<VariantCheck> {
    let mut counts: BTreeMap<&BTreeSet<String>, usize> = BTreeMap::new();
    for b in blocks {
        *counts.entry(&b.key.support).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(support, variants)| VariantCheck {
            support: support.clone(),
            variants,
            passed: variants <= 4,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanFailure {
    pub block: usize,
    pub vertex: HomologyVector,
}

/// Blocks with a vertex outside the sum of their support's subspaces.
pub fn check_spans(blocks: &[Block], decomposition: &DecompositionModel) -> Result<Vec<SpanFailure>> {
    let mut out = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let span = decomposition.support_subspace(&b.key.support)?;
        if let Some(v) = first_outside_span(&span, &b.polytope) {
            out.push(SpanFailure {
                block: i,
                vertex: v.clone(),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentFailure {
    pub chain: usize,
    pub block: usize,
    pub vertex: HomologyVector,
}

/// Chain vertices missing from a block the chain contributes to.
pub fn check_containment(chains: &[(Chain, RationalPolytope)], blocks: &[Block]) -> Result<Vec<ContainmentFailure>> {
    let mut out = Vec::new();
    for (bi, b) in blocks.iter().enumerate() {
        for &ci in &b.chains {
            let Some((_, p)) = chains.get(ci) else {
                return Err(Error::InvalidArgument(format!("block {bi} references chain {ci}")));
            };
            for v in p.vertices() {
                if !b.polytope.contains(v)? {
                    out.push(ContainmentFailure {
                        chain: ci,
                        block: bi,
                        vertex: v.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockConvexity {
    pub block: usize,
    pub probe: ConvexityProbe,
}

/// Probes whether the union of a block's coned member chain sets is convex,
/// i.e. equal to the block's hull.
pub fn check_block_convexity(
    chains: &[(Chain, RationalPolytope)],
    blocks: &[Block],
    density: usize,
    config: &EngineConfig,
) -> Result<Vec<BlockConvexity>> {
    let mut out = Vec::with_capacity(blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let members: Vec<RationalPolytope> = b.chains.iter().map(|&c| chains[c].1.coned()).collect();
        let probe = convexity_probe_with(&members, density, config.probe_cap, config.parallelism)?;
        out.push(BlockConvexity { block: i, probe });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub bound: BoundCheck,
    pub variants: Vec<VariantCheck>,
    pub span_failures: Vec<SpanFailure>,
    pub containment_failures: Vec<ContainmentFailure>,
    pub convexity: Vec<BlockConvexity>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.bound.passed
            && self.variants.iter().all(|v| v.passed)
            && self.span_failures.is_empty()
            && self.containment_failures.is_empty()
            && self.convexity.iter().all(|c| c.probe.convex)
    }
}

/// Runs every structural check. Only a probe over its cap is an error.
pub fn verify_structure(
    genus: usize,
    decomposition: &DecompositionModel,
    chains: &[(Chain, RationalPolytope)],
    blocks: &[Block],
    density: usize,
    config: &EngineConfig,
) -> Result<StructureReport> {
    Ok(StructureReport {
        bound: check_bound(genus, blocks),
        variants: check_variants(blocks),
        span_failures: check_spans(blocks, decomposition)?,
        containment_failures: check_containment(chains, blocks)?,
        convexity: check_block_convexity(chains, blocks, density, config)?,
    })
}

/// Static checks of a decomposition; paths are relative to it.
pub fn validate_decomposition(genus: usize, pieces: &[BasicPieceModel], d: &DecompositionModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let dim = 2 * genus;
    let mut ids = BTreeSet::new();
    for (i, s) in d.subsurfaces.iter().enumerate() {
        let path = format!("/subsurfaces/{i}");
        if !ids.insert(s.id.as_str()) {
            out.push(Violation::invariant(
                format!("{path}/id"),
                "duplicate subsurface id",
                format!("subsurface id `{}` appears more than once", s.id),
            ));
        }
        let mut dims_ok = true;
        for (j, v) in s.subspace.basis.iter().enumerate() {
            if v.dim() != dim {
                dims_ok = false;
                out.push(Violation::invariant(
                    format!("{path}/subspace/{j}"),
                    "homology dimension",
                    format!("basis vector has {} coordinates, genus {genus} needs {dim}", v.dim()),
                ));
            }
        }
        if !dims_ok {
            continue;
        }
        if !s.subspace.is_independent() {
            out.push(Violation::invariant(
                format!("{path}/subspace"),
                "dependent basis",
                format!("basis of `{}` is linearly dependent", s.id),
            ));
        }
        if s.kind == SubsurfaceKind::Annulus && s.subspace.rank() > 1 {
            out.push(Violation::invariant(
                format!("{path}/subspace"),
                "annulus rank",
                format!("annulus `{}` has a subspace of rank {}", s.id, s.subspace.rank()),
            ));
        }
    }
    if genus >= 2 {
        if d.subsurfaces.len() > 5 * genus - 5 {
            out.push(Violation::invariant(
                "/subsurfaces",
                "subsurface count",
                format!("{} subsurfaces exceed 5g-5 = {}", d.subsurfaces.len(), 5 * genus - 5),
            ));
        }
        let annuli = d
            .subsurfaces
            .iter()
            .filter(|s| s.kind == SubsurfaceKind::Annulus)
            .count();
        if annuli > 3 * genus - 3 {
            out.push(Violation::invariant(
                "/subsurfaces",
                "annulus count",
                format!("{annuli} annuli exceed 3g-3 = {}", 3 * genus - 3),
            ));
        }
    }

    let by_id: HashMap<&str, &BasicPieceModel> = pieces.iter().map(|p| (p.id.as_str(), p)).collect();
    for (piece, sub) in &d.assignment {
        let path = format!("/assignment/{}", pointer_token(piece));
        let Some(p) = by_id.get(piece.as_str()) else {
            out.push(Violation::reference(
                path,
                "unknown piece",
                format!("assignment of unknown piece `{piece}`"),
            ));
            continue;
        };
        if p.is_trivial() {
            out.push(Violation::invariant(
                path,
                "assigned trivial piece",
                format!("trivial piece `{piece}` has no essential subsurface"),
            ));
            continue;
        }
        let Some(s) = d.subsurface(sub) else {
            out.push(Violation::reference(
                path,
                "unknown subsurface",
                format!("piece `{piece}` assigned to unknown subsurface `{sub}`"),
            ));
            continue;
        };
        let expected = if p.is_annular() {
            SubsurfaceKind::Annulus
        } else {
            SubsurfaceKind::CurvedSurface
        };
        if s.kind != expected {
            out.push(Violation::invariant(
                path,
                "subsurface kind",
                format!("piece `{piece}` is {:?} but `{sub}` is {:?}", p.classification, s.kind).to_lowercase(),
            ));
        }
    }
    for p in pieces {
        if !p.is_trivial() && !d.assignment.contains_key(&p.id) {
            out.push(Violation::reference(
                "/assignment",
                "unassigned piece",
                format!("non-trivial piece `{}` is not assigned to a subsurface", p.id),
            ));
        }
    }
    out
}

/// Annulus subspaces that co-occur in a chain's support must be in direct
/// sum. Reports one violation per offending support.
pub fn check_direct_sums(ctx: &SupportContext<'_>, chains: &[Chain]) -> Result<Vec<Violation>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for chain in chains {
        let support = ctx.support(chain)?;
        if !seen.insert(support.clone()) {
            continue;
        }
        let annuli: Vec<&Subsurface> = support
            .iter()
            .filter_map(|id| ctx.decomposition.subsurface(id))
            .filter(|s| s.kind == SubsurfaceKind::Annulus)
            .collect();
        let total: usize = annuli.iter().map(|s| s.subspace.rank()).sum();
        let joint = rank(annuli.iter().flat_map(|s| s.subspace.basis.iter()));
        if joint < total {
            let names: Vec<&str> = annuli.iter().map(|s| s.id.as_str()).collect();
            out.push(Violation::invariant(
                "/decomposition/subsurfaces",
                "annulus direct sum",
                format!(
                    "annuli {} share a chain ({chain}) but their subspaces are not in direct sum",
                    names.join(", ")
                ),
            ));
        }
    }
    Ok(out)
}
