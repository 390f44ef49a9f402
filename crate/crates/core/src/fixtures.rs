//! Embedded example models.
//!
//! `genus2_nonconvex` and `genus2_full` are two triangle pieces in
//! complementary planes of `Q^4`, unrelated and related. `genus2_blocks`
//! has two overlapping triangles on one plane plus three intervals.
//! `exp_family(k)` is the genus `2k` family whose blocks are the `2^k`
//! coordinate `k`-simplices.

use std::collections::BTreeMap;

use crate::conley::{DecompositionModel, Subsurface, SubsurfaceKind};
use crate::error::{Error, Result};
use crate::geom::HomologyVector;
use crate::heteroclinic::{HeteroclinicPoset, Relation};
use crate::markov::{BasicPieceModel, FillBehavior, MarkovGraph};
use crate::model::{ModelDocument, MAX_GENUS};

pub struct FixtureInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

pub fn catalog() -> Vec<FixtureInfo> {
    vec![
        FixtureInfo {
            name: "genus2_nonconvex",
            summary: "two unrelated curved pieces with triangle rotation sets in complementary planes",
        },
        FixtureInfo {
            name: "genus2_full",
            summary: "genus2_nonconvex with the two pieces related; one full-dimensional block",
        },
        FixtureInfo {
            name: "genus2_blocks",
            summary: "two overlapping curved triangles on one plane and three annular intervals; five blocks",
        },
        FixtureInfo {
            name: "exp_family(k)",
            summary: "genus 2k family with 2^k blocks, each a k-simplex (k = 1..=12)",
        },
    ]
}

/// Every non-parametric fixture plus `exp_family(1..=3)`.
pub fn standard() -> Vec<(String, ModelDocument)> {
    let mut out = vec![
        ("genus2_nonconvex".to_string(), genus2_nonconvex()),
        ("genus2_full".to_string(), genus2_full()),
        ("genus2_blocks".to_string(), genus2_blocks()),
    ];
    for k in 1..=3 {
        out.push((format!("exp_family({k})"), exp_family(k).expect("k in range")));
    }
    out
}

/// Resolves a catalog name; `exp_family(k)` takes its parameter inline.
pub fn fixture(name: &str) -> Result<ModelDocument> {
    match name {
        "genus2_nonconvex" => Ok(genus2_nonconvex()),
        "genus2_full" => Ok(genus2_full()),
        "genus2_blocks" => Ok(genus2_blocks()),
        _ => {
            let k = name
                .strip_prefix("exp_family(")
                .and_then(|s| s.strip_suffix(')'))
                .and_then(|s| s.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("unknown fixture `{name}`")))?;
            exp_family(k)
        }
    }
}

fn unit(dim: usize, i: usize) -> HomologyVector {
    HomologyVector::unit(dim, i)
}

fn ints(xs: &[i64]) -> HomologyVector {
    HomologyVector::from_ints(xs)
}

fn assignment(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

/// Complete digraph with loops, displacements `0, e_a, e_a + e_b`.
fn triangle_piece(id: &str, a: usize, b: usize) -> BasicPieceModel {
    BasicPieceModel::curved(
        id,
        MarkovGraph::complete(vec![ints(&[0; 4]), unit(4, a), unit(4, a).add(&unit(4, b))]),
    )
}

fn triangle_model(related: bool) -> ModelDocument {
    let relations = if related {
        vec![Relation::new("L1", "L2")]
    } else {
        Vec::new()
    };
    ModelDocument {
        genus: 2,
        pieces: vec![triangle_piece("L1", 0, 1), triangle_piece("L2", 2, 3)],
        heteroclinic: HeteroclinicPoset::new(relations),
        decomposition: DecompositionModel {
            subsurfaces: vec![
                Subsurface::new("T1", SubsurfaceKind::CurvedSurface, vec![unit(4, 0), unit(4, 1)]),
                Subsurface::new("T2", SubsurfaceKind::CurvedSurface, vec![unit(4, 2), unit(4, 3)]),
            ],
            assignment: assignment(&[("L1", "T1"), ("L2", "T2")]),
        },
        metadata: BTreeMap::new(),
    }
}

pub fn genus2_nonconvex() -> ModelDocument {
    triangle_model(false)
}

pub fn genus2_full() -> ModelDocument {
    triangle_model(true)
}

pub fn genus2_blocks() -> ModelDocument {
    let complete = |ds: &[&[i64]]| MarkovGraph::complete(ds.iter().map(|d| ints(d)).collect());
    let v_plane = || vec![unit(4, 0), unit(4, 1)];
    let pieces = vec![
        BasicPieceModel::curved("C1", complete(&[&[0, 0, 0, 0], &[2, 0, 0, 0], &[0, 2, 0, 0]])),
        BasicPieceModel::curved("C2", complete(&[&[0, 0, 0, 0], &[2, 1, 0, 0], &[1, 2, 0, 0]])),
        BasicPieceModel::annular(
            "IA",
            "pA",
            FillBehavior::Attracting,
            complete(&[&[-1, 0, 0, 0], &[1, 0, 0, 0]]),
        ),
        BasicPieceModel::annular(
            "IB",
            "pB",
            FillBehavior::Attracting,
            complete(&[&[0, 0, 0, 0], &[0, 1, 0, 0]]),
        ),
        BasicPieceModel::annular(
            "IC",
            "pC",
            FillBehavior::Attracting,
            complete(&[&[0, 0, 0, 0], &[1, 1, 0, 0]]),
        ),
    ];
    let metadata = BTreeMap::from([
        (
            "construction".to_string(),
            "coordinates constructed for the example: C1 = conv{0,(2,0),(0,2)}, C2 = conv{0,(2,1),(1,2)}, \
             I_A = [-e1,e1], I_B = [0,e2], I_C = [0,e1+e2]"
                .to_string(),
        ),
        (
            "interior_witness".to_string(),
            "(1,2/3,0,0) is interior to both C1 and C2 within the plane V; (1,1,0,0) lies in both, on the boundary of C1"
                .to_string(),
        ),
    ]);
    ModelDocument {
        genus: 2,
        pieces,
        heteroclinic: HeteroclinicPoset::default(),
        decomposition: DecompositionModel {
            subsurfaces: vec![
                Subsurface::new("S1", SubsurfaceKind::CurvedSurface, v_plane()),
                Subsurface::new("S2", SubsurfaceKind::CurvedSurface, v_plane()),
                Subsurface::new("AnnA", SubsurfaceKind::Annulus, vec![unit(4, 0)]),
                Subsurface::new("AnnB", SubsurfaceKind::Annulus, vec![unit(4, 1)]),
                Subsurface::new("AnnC", SubsurfaceKind::Annulus, vec![ints(&[1, 1, 0, 0])]),
            ],
            assignment: assignment(&[
                ("C1", "S1"),
                ("C2", "S2"),
                ("IA", "AnnA"),
                ("IB", "AnnB"),
                ("IC", "AnnC"),
            ]),
        },
        metadata,
    }
}

/// Genus `2k`: per level `i`, annular pieces `L{i}_0`, `L{i}_1` with
/// intervals `[0, e_{2i−1}]`, `[0, e_{2i}]` and a zero-rotation annular
/// `L{i}_star`; relations `L{i}_j → L{i}_star → L{i+1}_j`.
pub fn exp_family(k: usize) -> Result<ModelDocument> {
    if k == 0 || 2 * k > MAX_GENUS {
        return Err(Error::InvalidArgument(format!(
            "exp_family needs 1 <= k <= {}, got {k}",
            MAX_GENUS / 2
        )));
    }
    let dim = 4 * k;
    let mut pieces = Vec::new();
    let mut subsurfaces = Vec::new();
    let mut assign = BTreeMap::new();
    let mut relations = Vec::new();
    for i in 1..=k {
        for j in 0..2 {
            let id = format!("L{i}_{j}");
            let e = unit(dim, 2 * (i - 1) + j);
            pieces.push(BasicPieceModel::annular(
                &id,
                format!("P{i}_{j}"),
                FillBehavior::Neither,
                MarkovGraph::complete(vec![HomologyVector::zeros(dim), e.clone()]),
            ));
            subsurfaces.push(Subsurface::new(format!("A{i}_{j}"), SubsurfaceKind::Annulus, vec![e]));
            assign.insert(id.clone(), format!("A{i}_{j}"));
            relations.push(Relation::new(&id, format!("L{i}_star")));
            if i > 1 {
                relations.push(Relation::new(format!("L{}_star", i - 1), &id));
            }
        }
        let star = format!("L{i}_star");
        pieces.push(BasicPieceModel::annular(
            &star,
            format!("P{i}_star"),
            FillBehavior::Neither,
            MarkovGraph::complete(vec![HomologyVector::zeros(dim)]),
        ));
        subsurfaces.push(Subsurface::new(format!("A{i}_star"), SubsurfaceKind::Annulus, vec![]));
        assign.insert(star, format!("A{i}_star"));
    }
    Ok(ModelDocument {
        genus: 2 * k,
        pieces,
        heteroclinic: HeteroclinicPoset::new(relations),
        decomposition: DecompositionModel {
            subsurfaces,
            assignment: assign,
        },
        metadata: BTreeMap::from([("family_parameter".to_string(), k.to_string())]),
    })
}
