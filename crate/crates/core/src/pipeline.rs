//! End-to-end runs: validation, chain and block computation, requested
//! checks, and the result document.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    classify_chain, convexity_probe_with, interior_check, star_shape_check_with, ChainClass, ConvexityProbe,
    InteriorReport, InteriorVerdict, StarShape,
};
use crate::config::EngineConfig;
use crate::conley::{
    check_block_convexity, check_bound, check_containment, check_direct_sums, check_spans, check_variants, Block,
    BlockConvexity, BoundCheck, ContainmentFailure, MarkedSupport, SpanFailure, SupportContext, VariantCheck,
};
use crate::error::Error;
use crate::geom::{HomologyVector, RationalPolytope};
use crate::heteroclinic::{chain_polytopes, rotation_table, Chain, RotationTable};
use crate::markov::Classification;
use crate::model::{ModelDocument, ValidationReport};
use crate::oracle::sample_chain_with;
use crate::rational::format_rational;
use crate::validation::{Violation, ViolationKind};

pub const ENGINE_NAME: &str = "rotset";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum Failure {
    #[error("model has {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Engine(#[from] Error),
}

impl Failure {
    pub fn is_resource(&self) -> bool {
        match self {
            Failure::Invalid(v) => v.iter().any(|x| x.kind == ViolationKind::Resource),
            Failure::Engine(e) => e.is_resource_cap(),
        }
    }
}

/// Everything computed for a valid model.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub table: RotationTable,
    pub chains: Vec<(Chain, RationalPolytope)>,
    pub supports: Vec<Vec<MarkedSupport>>,
    pub blocks: Vec<Block>,
    pub warnings: Vec<Violation>,
}

impl Analysis {
    pub fn chain_polytopes(&self) -> Vec<RationalPolytope> {
        self.chains.iter().map(|(_, p)| p.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineInfo {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceResult {
    pub id: String,
    pub classification: Classification,
    pub rotation_set: RationalPolytope,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainResult {
    pub id: String,
    pub pieces: Chain,
    pub polytope: RationalPolytope,
    pub class: ChainClass,
    pub marked_supports: Vec<MarkedSupport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockResult {
    pub id: String,
    pub key: MarkedSupport,
    pub label: String,
    pub affine_dim: usize,
    pub polytope: RationalPolytope,
    pub chains: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub star: bool,
    pub bound: bool,
    pub subspace: bool,
    pub convex_density: Option<usize>,
    pub interior: bool,
    pub oracle_samples: Option<usize>,
    pub seed: u64,
}

impl CheckOptions {
    /// Every structural check at the given probe density, no sampling.
    pub fn all(density: usize) -> Self {
        Self {
            star: true,
            bound: true,
            subspace: true,
            convex_density: Some(density),
            interior: true,
            oracle_samples: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSection {
    pub count: BoundCheck,
    pub variants: Vec<VariantCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceSection {
    pub span_failures: Vec<SpanFailure>,
    pub containment_failures: Vec<ContainmentFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexitySection {
    pub density: usize,
    /// Per block, the union of its coned member chain sets.
    pub blocks: Vec<BlockConvexity>,
    /// The union of all chain sets; informational, a non-convex rotation
    /// set is not a failure.
    pub global: ConvexityProbe,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub chain: String,
    pub sample: usize,
    pub point: HomologyVector,
    /// `chain` or a block id.
    pub outside: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSection {
    pub samples_per_chain: usize,
    pub seed: u64,
    pub checked: usize,
    pub failures: Vec<SampleFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star_shape: Option<StarShape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<SubspaceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convexity: Option<ConvexitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior: Option<InteriorReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    pub passed: bool,
}

impl VerificationReport {
    fn evaluate(&mut self) {
        self.passed = self.star_shape.as_ref().is_none_or(|s| s.holds)
            && self
                .bound
                .as_ref()
                .is_none_or(|b| b.count.passed && b.variants.iter().all(|v| v.passed))
            && self
                .subspace
                .as_ref()
                .is_none_or(|s| s.span_failures.is_empty() && s.containment_failures.is_empty())
            && self
                .convexity
                .as_ref()
                .is_none_or(|c| c.blocks.iter().all(|b| b.probe.convex))
            && self
                .interior
                .as_ref()
                .is_none_or(|i| i.verdict != InteriorVerdict::Violation)
            && self.oracle.as_ref().is_none_or(|o| o.failures.is_empty());
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub engine: EngineInfo,
    pub input_digest: String,
    pub genus: usize,
    pub pieces: Vec<PieceResult>,
    pub chains: Vec<ChainResult>,
    pub blocks: Vec<BlockResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    pub warnings: Vec<Violation>,
}

impl ResultDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    /// One row per block vertex: block label, then coordinates as `p/q`.
    pub fn blocks_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        for b in &self.blocks {
            for v in b.polytope.vertices() {
                let mut row = vec![b.label.clone()];
                row.extend(v.coords().iter().map(format_rational));
                w.write_record(&row).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn chain_id(i: usize) -> String {
    format!("C{i}")
}

fn block_id(i: usize) -> String {
    format!("B{i}")
}

pub struct Engine {
    pub config: EngineConfig,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new(EngineConfig::default())
    }
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Self { config }
    }

    /// Static validation plus the checks that need chains: mark presence,
    /// annulus direct sums, the origin and trivial-piece consistency.
    pub fn validate(&self, model: &ModelDocument) -> ValidationReport {
        match self.analyze(model) {
            Ok(a) => ValidationReport {
                violations: Vec::new(),
                warnings: a.warnings,
            },
            Err(Failure::Invalid(violations)) => {
                let mut r = model.validate_structure(self.config.cycle_cap);
                r.violations = violations;
                r
            }
            Err(Failure::Engine(e)) => ValidationReport {
                violations: vec![Violation::new(
                    if e.is_resource_cap() {
                        ViolationKind::Resource
                    } else {
                        ViolationKind::Invariant
                    },
                    "",
                    "engine error",
                    e.to_string(),
                )],
                warnings: Vec::new(),
            },
        }
    }

    pub fn analyze(&self, model: &ModelDocument) -> Result<Analysis, Failure> {
        let cfg = &self.config;
        let structure = model.validate_structure(cfg.cycle_cap);
        if !structure.is_valid() {
            return Err(Failure::Invalid(structure.violations));
        }
        let mut warnings = structure.warnings;
        let table = rotation_table(&model.pieces, cfg)?;
        let ctx = SupportContext::new(&model.pieces, &model.heteroclinic, &model.decomposition)?;
        let chains = ctx.order().maximal_nontrivial_chains(cfg.chain_cap)?;

        let mut violations = check_direct_sums(&ctx, &chains)?;
        let mut supports = Vec::with_capacity(chains.len());
        for c in &chains {
            match ctx.marked_supports(c) {
                Ok(s) => supports.push(s),
                Err(e @ Error::MissingMark { .. }) => {
                    violations.push(Violation::invariant(
                        "/heteroclinic/relations",
                        "missing mark",
                        e.to_string(),
                    ));
                    supports.push(Vec::new());
                }
                Err(e) => return Err(e.into()),
            }
        }
        if !violations.is_empty() {
            return Err(Failure::Invalid(violations));
        }
        let chains = chain_polytopes(chains, &table, cfg)?;
        let blocks = ctx.assemble_blocks(&chains, cfg)?;

        if !chains.is_empty() && !chains.iter().any(|(_, p)| p.contains_origin()) {
            warnings.push(Violation::invariant(
                "",
                "origin missing",
                "no chain rotation set contains 0, so the global union misses it",
            ));
        }
        for (i, p) in model.pieces.iter().enumerate() {
            if p.classification != Classification::Trivial {
                continue;
            }
            let point = &table[&p.id].vertices()[0];
            let order = ctx.order();
            let mut covered = false;
            for (c, poly) in &chains {
                let comparable = c
                    .pieces()
                    .iter()
                    .all(|q| order.precedes(q, &p.id) || order.precedes(&p.id, q));
                if comparable && poly.contains(point)? {
                    covered = true;
                    break;
                }
            }
            if !covered {
                warnings.push(Violation::invariant(
                    format!("/pieces/{i}"),
                    "trivial piece outside chains",
                    format!(
                        "rotation {point} of trivial piece `{}` lies in no chain set comparable with it",
                        p.id
                    ),
                ));
            }
        }
        Ok(Analysis {
            table,
            chains,
            supports,
            blocks,
            warnings,
        })
    }

    pub fn compute(&self, model: &ModelDocument) -> Result<ResultDocument, Failure> {
        let a = self.analyze(model)?;
        Ok(self.document(model, &a, None))
    }

    pub fn check(&self, model: &ModelDocument, opts: &CheckOptions) -> Result<ResultDocument, Failure> {
        let a = self.analyze(model)?;
        let report = self.verify(model, &a, opts)?;
        Ok(self.document(model, &a, Some(report)))
    }

    pub fn verify(
        &self,
        model: &ModelDocument,
        a: &Analysis,
        opts: &CheckOptions,
    ) -> Result<VerificationReport, Failure> {
        let cfg = &self.config;
        let polys = a.chain_polytopes();
        let mut r = VerificationReport {
            star_shape: None,
            bound: None,
            subspace: None,
            convexity: None,
            interior: None,
            oracle: None,
            passed: true,
        };
        if opts.star && !polys.is_empty() {
            r.star_shape = Some(star_shape_check_with(&polys, cfg.parallelism)?);
        }
        if opts.bound {
            r.bound = Some(BoundSection {
                count: check_bound(model.genus, &a.blocks),
                variants: check_variants(&a.blocks),
            });
        }
        if opts.subspace {
            r.subspace = Some(SubspaceSection {
                span_failures: check_spans(&a.blocks, &model.decomposition)?,
                containment_failures: check_containment(&a.chains, &a.blocks)?,
            });
        }
        if let Some(density) = opts.convex_density {
            if !polys.is_empty() {
                r.convexity = Some(ConvexitySection {
                    density,
                    blocks: check_block_convexity(&a.chains, &a.blocks, density, cfg)?,
                    global: convexity_probe_with(&polys, density, cfg.probe_cap, cfg.parallelism)?,
                });
            }
        }
        if opts.interior {
            r.interior = Some(interior_check(&a.blocks, model.genus)?);
        }
        if let Some(n) = opts.oracle_samples {
            r.oracle = Some(self.sample_check(model, a, n, opts.seed)?);
        }
        r.evaluate();
        Ok(r)
    }

    fn sample_check(&self, model: &ModelDocument, a: &Analysis, n: usize, seed: u64) -> Result<OracleSection, Failure> {
        let mut failures = Vec::new();
        let mut checked = 0;
        for (ci, (chain, poly)) in a.chains.iter().enumerate() {
            let owners: Vec<usize> = (0..a.blocks.len())
                .filter(|&b| a.blocks[b].chains.contains(&ci))
                .collect();
            for (si, s) in sample_chain_with(chain, &model.pieces, n, seed, self.config.parallelism)?
                .into_iter()
                .enumerate()
            {
                checked += 1;
                if !poly.contains(&s.average)? {
                    failures.push(SampleFailure {
                        chain: chain_id(ci),
                        sample: si,
                        point: s.average.clone(),
                        outside: "chain".into(),
                    });
                }
                for &b in &owners {
                    if !a.blocks[b].polytope.contains(&s.average)? {
                        failures.push(SampleFailure {
                            chain: chain_id(ci),
                            sample: si,
                            point: s.average.clone(),
                            outside: block_id(b),
                        });
                    }
                }
            }
        }
        Ok(OracleSection {
            samples_per_chain: n,
            seed,
            checked,
            failures,
        })
    }

    fn document(
        &self,
        model: &ModelDocument,
        a: &Analysis,
        verification: Option<VerificationReport>,
    ) -> ResultDocument {
        let mut pieces: Vec<PieceResult> = model
            .pieces
            .iter()
            .map(|p| PieceResult {
                id: p.id.clone(),
                classification: p.classification,
                rotation_set: a.table[&p.id].clone(),
            })
            .collect();
        pieces.sort_by(|x, y| x.id.cmp(&y.id));
        let chains = a
            .chains
            .iter()
            .zip(&a.supports)
            .enumerate()
            .map(|(i, ((c, p), s))| ChainResult {
                id: chain_id(i),
                pieces: c.clone(),
                polytope: p.clone(),
                class: classify_chain(p),
                marked_supports: s.clone(),
            })
            .collect();
        let blocks = a
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| BlockResult {
                id: block_id(i),
                label: b.key.to_string(),
                key: b.key.clone(),
                affine_dim: b.polytope.affine_dim(),
                polytope: b.polytope.clone(),
                chains: b.chains.iter().map(|&c| chain_id(c)).collect(),
            })
            .collect();
        ResultDocument {
            engine: EngineInfo {
                name: ENGINE_NAME.into(),
                version: ENGINE_VERSION.into(),
            },
            input_digest: model.digest(),
            genus: model.genus,
            pieces,
            chains,
            blocks,
            verification,
            warnings: a.warnings.clone(),
        }
    }
}

/// Pairwise intersection ranks of the blocks' support subspaces.
pub fn support_intersection_ranks(
    model: &ModelDocument,
    blocks: &[Block],
) -> Result<Vec<(usize, usize, usize)>, Error> {
    let spaces = blocks
        .iter()
        .map(|b| model.decomposition.support_subspace(&b.key.support))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for i in 0..spaces.len() {
        for j in i + 1..spaces.len() {
            out.push((i, j, spaces[i].intersection_rank(&spaces[j])));
        }
    }
    Ok(out)
}

/// Supports appearing among the blocks.
pub fn supports(blocks: &[Block]) -> BTreeSet<&BTreeSet<String>> {
    blocks.iter().map(|b| &b.key.support).collect()
}
