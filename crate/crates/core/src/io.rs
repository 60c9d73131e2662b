//! JSON interchange for diagrams.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Diagram, VertexId, VertexKind, Violation};
use crate::phase::Phase;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("vertex {id}: {msg}")]
    Vertex { id: usize, msg: String },
    #[error("invalid diagram: {0}")]
    Invalid(#[from] Violation),
}

/// Serialised vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Phase>,
}

/// Serialised diagram with bit-exact field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl From<&Diagram> for DiagramJson {
    fn from(d: &Diagram) -> Self {
        DiagramJson {
            vertices: d
                .vertices()
                .map(|(id, k)| VertexJson { id: id.0, kind: k.code().to_string(), phase: k.phase() })
                .collect(),
            edges: d.edges().into_iter().map(|(a, b)| [a.0, b.0]).collect(),
            inputs: d.inputs().iter().map(|v| v.0).collect(),
            outputs: d.outputs().iter().map(|v| v.0).collect(),
        }
    }
}

impl TryFrom<&DiagramJson> for Diagram {
    type Error = JsonError;
    fn try_from(j: &DiagramJson) -> Result<Diagram, JsonError> {
        let mut vertices = Vec::with_capacity(j.vertices.len());
        for v in &j.vertices {
            let kind = match (v.kind.as_str(), v.phase) {
                ("Z", Some(p)) => VertexKind::Z(p),
                ("X", Some(p)) => VertexKind::X(p),
                ("H", None) => VertexKind::H,
                ("B", None) => VertexKind::B,
                ("Z" | "X", None) => {
                    return Err(JsonError::Vertex { id: v.id, msg: "spider without phase".into() })
                }
                ("H" | "B", Some(_)) => {
                    return Err(JsonError::Vertex { id: v.id, msg: "phase on H or B vertex".into() })
                }
                (other, _) => {
                    return Err(JsonError::Vertex { id: v.id, msg: format!("unknown kind {other:?}") })
                }
            };
            vertices.push((VertexId(v.id), kind));
        }
        let edges = j.edges.iter().map(|&[a, b]| (VertexId(a), VertexId(b)));
        let ids = |xs: &[usize]| xs.iter().map(|&x| VertexId(x)).collect();
        Ok(Diagram::from_parts(vertices, edges, ids(&j.inputs), ids(&j.outputs))?)
    }
}

/// Serialises a diagram to pretty JSON.
pub fn diagram_to_json(d: &Diagram) -> String {
    serde_json::to_string_pretty(&DiagramJson::from(d)).expect("diagram JSON serialises")
}

/// Parses and validates a diagram from JSON text.
pub fn diagram_from_json(text: &str) -> Result<Diagram, JsonError> {
    let j: DiagramJson = serde_json::from_str(text)?;
    Diagram::try_from(&j)
}
