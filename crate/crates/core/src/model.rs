//! The model document: loading, aggregated validation, canonical
//! serialization and digest.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::conley::{validate_decomposition, DecompositionModel};
use crate::heteroclinic::{validate_poset, HeteroclinicPoset};
use crate::markov::{validate_piece_with_cap, BasicPieceModel, DEFAULT_CYCLE_CAP};
use crate::validation::{pointer_token, Violation, ViolationKind};

/// Genus range accepted by the engine. The upper end keeps the block bound
/// `2^{5g−3}` inside `u128`.
pub const MIN_GENUS: usize = 2;
pub const MAX_GENUS: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub genus: usize,
    pub pieces: Vec<BasicPieceModel>,
    #[serde(default)]
    pub heteroclinic: HeteroclinicPoset,
    pub decomposition: DecompositionModel,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{}: parse error: {message}", if .path.is_empty() { "/" } else { .path.as_str() })]
    Parse { path: String, message: String },
    #[error("model has {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
}

/// Hard violations and advisory warnings, both located by JSON pointer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_resource_violation(&self) -> bool {
        self.violations.iter().any(|v| v.kind == ViolationKind::Resource)
    }
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&pointer_token(key)),
            Segment::Enum { variant } => out.push_str(&pointer_token(variant)),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

impl ModelDocument {
    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    /// Parses without validating.
    pub fn parse(bytes: &[u8]) -> Result<Self, LoadError> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        serde_path_to_error::deserialize(de).map_err(|e| LoadError::Parse {
            path: pointer(e.path()),
            message: e.inner().to_string(),
        })
    }

    /// Canonical pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// SHA-256 of the canonical compact serialization, hex encoded.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("model serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn piece(&self, id: &str) -> Option<&BasicPieceModel> {
        self.pieces.iter().find(|p| p.id == id)
    }

    /// Checks every static invariant: genus, piece graphs and dimensions,
    /// the relation, and the decomposition.
    pub fn validate_structure(&self, cycle_cap: usize) -> ValidationReport {
        let mut report = ValidationReport::default();
        let v = &mut report.violations;
        if !(MIN_GENUS..=MAX_GENUS).contains(&self.genus) {
            v.push(Violation::invariant(
                "/genus",
                "genus range",
                format!("genus {} is outside {MIN_GENUS}..={MAX_GENUS}", self.genus),
            ));
        }
        let dim = self.dim();
        if self.pieces.is_empty() {
            v.push(Violation::invariant(
                "/pieces",
                "no pieces",
                "a model needs at least one basic piece",
            ));
        }
        let mut ids = BTreeSet::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let prefix = format!("/pieces/{i}");
            if !ids.insert(p.id.as_str()) {
                v.push(Violation::invariant(
                    format!("{prefix}/id"),
                    "duplicate piece id",
                    format!("piece id `{}` appears more than once", p.id),
                ));
            }
            let mut wrong_dim = false;
            for (j, n) in p.graph.nodes.iter().enumerate() {
                if n.displacement.dim() != dim {
                    wrong_dim = true;
                    v.push(Violation::new(
                        ViolationKind::Schema,
                        format!("{prefix}/graph/nodes/{j}/displacement"),
                        "homology dimension",
                        format!(
                            "displacement has {} coordinates, genus {} needs {dim}",
                            n.displacement.dim(),
                            self.genus
                        ),
                    ));
                }
            }
            for x in validate_piece_with_cap(p, cycle_cap) {
                if wrong_dim && x.invariant == "displacement dimension" {
                    continue;
                }
                v.push(x.prefixed(&prefix));
            }
        }
        if ids.len() != self.pieces.len() {
            return report;
        }
        let poset = validate_poset(&self.pieces, &self.heteroclinic);
        v.extend(poset.violations.into_iter().map(|x| x.prefixed("/heteroclinic")));
        report
            .warnings
            .extend(poset.warnings.into_iter().map(|x| x.prefixed("/heteroclinic")));
        report.violations.extend(
            validate_decomposition(self.genus, &self.pieces, &self.decomposition)
                .into_iter()
                .map(|x| x.prefixed("/decomposition")),
        );
        report
    }

    /// Parses and runs the static validation.
    pub fn load_bytes(bytes: &[u8]) -> Result<Self, LoadError> {
        let model = Self::parse(bytes)?;
        let report = model.validate_structure(DEFAULT_CYCLE_CAP);
        if !report.is_valid() {
            return Err(LoadError::Invalid(report.violations));
        }
        Ok(model)
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelDocument, LoadError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    ModelDocument::load_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_round_trip() {
        for (name, m) in fixtures::standard() {
            let back = ModelDocument::load_bytes(m.to_json().as_bytes()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(back, m, "{name}");
            assert_eq!(back.digest(), m.digest());
        }
    }

    #[test]
    fn wrong_vector_length_is_located() {
        let m = fixtures::genus2_nonconvex();
        let mut doc: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        doc["pieces"][1]["graph"]["nodes"][2]["displacement"] = serde_json::json!(["1", "0", "0", "0", "0"]);
        let err = ModelDocument::load_bytes(doc.to_string().as_bytes()).unwrap_err();
        let LoadError::Invalid(v) = err else { panic!("{err}") };
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].path, "/pieces/1/graph/nodes/2/displacement");
    }

    #[test]
    fn cycle_is_named() {
        let m = fixtures::genus2_full();
        let mut doc: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        doc["heteroclinic"]["relations"]
            .as_array_mut()
            .unwrap()
            .push(serde_json::json!({"from": "L2", "to": "L1"}));
        let LoadError::Invalid(v) = ModelDocument::load_bytes(doc.to_string().as_bytes()).unwrap_err() else {
            panic!()
        };
        assert_eq!(v[0].invariant, "cyclic relation");
        assert!(v[0].message.contains("L1 -> L2 -> L1"), "{}", v[0].message);
    }

    #[test]
    fn parse_errors_carry_a_pointer() {
        let m = fixtures::genus2_full();
        let mut doc: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        doc["pieces"][0]["graph"]["nodes"][1]["displacement"][0] = serde_json::json!(0.5);
        match ModelDocument::load_bytes(doc.to_string().as_bytes()).unwrap_err() {
            LoadError::Parse { path, .. } => assert_eq!(path, "/pieces/0/graph/nodes/1/displacement/0"),
            other => panic!("{other}"),
        }
        assert!(matches!(
            ModelDocument::load_bytes(b"{\"genus\": 2"),
            Err(LoadError::Parse { .. })
        ));
    }

    #[test]
    fn unresolved_reference_is_distinguishable() {
        let m = fixtures::genus2_full();
        let mut doc: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        doc["heteroclinic"]["relations"][0]["to"] = serde_json::json!("nowhere");
        let LoadError::Invalid(v) = ModelDocument::load_bytes(doc.to_string().as_bytes()).unwrap_err() else {
            panic!()
        };
        assert_eq!(v[0].kind, ViolationKind::Reference);
        assert_eq!(v[0].path, "/heteroclinic/relations/0/to");
    }

    #[test]
    fn genus_is_bounded() {
        let mut m = fixtures::genus2_full();
        m.genus = 1;
        let r = m.validate_structure(DEFAULT_CYCLE_CAP);
        assert!(r.violations.iter().any(|v| v.path == "/genus"));
    }

    #[test]
    fn missing_file_is_io() {
        assert!(matches!(
            load_model("/nonexistent/model.json"),
            Err(LoadError::Io { .. })
        ));
    }
}
