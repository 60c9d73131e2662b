//! Graphviz export.
//!
//! Nodes are named `n<label>` after their canonical labels and emitted in
//! label order, so isomorphic diagrams give identical files.  Spiders are
//! filled circles labelled with their phase, Hadamards squares and
//! boundaries points.  Every node also carries `kind`, `phase`, `role` and
//! `index` attributes, which is enough for [`from_dot`] to rebuild the
//! diagram.

use std::collections::BTreeMap;
use std::fmt::Write;

use redgreen::canon::canonical_form;
use redgreen::phase::Phase;
use redgreen::{Diagram, VertexId, VertexKind};
use thiserror::Error;

const GREEN: &str = "#9fdf9f";
const RED: &str = "#f08080";
const YELLOW: &str = "#ffee88";

fn phase_attr(p: Phase) -> String {
    format!("{}/{}", p.num(), p.den())
}

/// Renders `d` as an undirected DOT graph.
pub fn to_dot(d: &Diagram) -> String {
    let form = canonical_form(d);
    let name = |v: VertexId| format!("n{}", form.labels[&v]);
    let mut out = String::from("graph diagram {\n");
    for &v in &form.order {
        let kind = d.kind(v).expect("vertex exists");
        let attrs = match kind {
            VertexKind::Z(p) | VertexKind::X(p) => {
                let (code, fill) = if matches!(kind, VertexKind::Z(_)) { ("Z", GREEN) } else { ("X", RED) };
                let label = if p.is_zero() { String::new() } else { p.to_string() };
                format!(
                    "shape=circle, style=filled, fillcolor=\"{fill}\", label=\"{label}\", kind=\"{code}\", phase=\"{}\"",
                    phase_attr(p)
                )
            }
            VertexKind::H => format!("shape=square, style=filled, fillcolor=\"{YELLOW}\", label=\"H\", kind=\"H\""),
            VertexKind::B => {
                let (role, index) = match d.inputs().iter().position(|&b| b == v) {
                    Some(i) => ("input", i),
                    None => ("output", d.outputs().iter().position(|&b| b == v).expect("boundary is listed")),
                };
                let tag = if role == "input" { "in" } else { "out" };
                format!("shape=point, xlabel=\"{tag}{index}\", kind=\"B\", role=\"{role}\", index=\"{index}\"")
            }
        };
        writeln!(out, "  {} [{attrs}];", name(v)).expect("writing to a string");
    }
    let mut edges: Vec<(usize, usize)> = d
        .edges()
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (form.labels[&a], form.labels[&b]);
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort_unstable();
    for (a, b) in edges {
        writeln!(out, "  n{a} -- n{b};").expect("writing to a string");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DotError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid diagram: {0}")]
    Invalid(String),
}

fn attributes(body: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut rest = body;
    while let Some(eq) = rest.find('=') {
        let key = rest[..eq].trim().trim_start_matches(',').trim().to_string();
        let after = rest[eq + 1..].trim_start();
        let (value, tail) = if let Some(quoted) = after.strip_prefix('"') {
            let end = quoted.find('"').unwrap_or(quoted.len());
            (quoted[..end].to_string(), &quoted[(end + 1).min(quoted.len())..])
        } else {
            let end = after.find(',').unwrap_or(after.len());
            (after[..end].trim().to_string(), &after[end..])
        };
        out.insert(key, value);
        rest = tail;
    }
    out
}

/// Rebuilds a diagram from the output of [`to_dot`].
pub fn from_dot(text: &str) -> Result<Diagram, DotError> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut ids: BTreeMap<String, VertexId> = BTreeMap::new();
    let mut inputs = BTreeMap::new();
    let mut outputs = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let syntax = |message: &str| DotError::Syntax { line: i + 1, message: message.to_string() };
        if line.is_empty() || line.starts_with("graph ") || line == "}" {
            continue;
        }
        let stmt = line.strip_suffix(';').ok_or_else(|| syntax("missing ';'"))?;
        if let Some((a, b)) = stmt.split_once("--") {
            let end = |s: &str| ids.get(s.trim()).copied().ok_or_else(|| syntax("edge to an undeclared node"));
            edges.push((end(a)?, end(b)?));
            continue;
        }
        let (node, body) = stmt.split_once('[').ok_or_else(|| syntax("expected a node or an edge"))?;
        let attrs = attributes(body.strip_suffix(']').ok_or_else(|| syntax("missing ']'"))?);
        let id = VertexId(ids.len());
        ids.insert(node.trim().to_string(), id);
        let phase = || -> Result<Phase, DotError> {
            let p = attrs.get("phase").ok_or_else(|| syntax("spider without phase"))?;
            let (n, d) = p.split_once('/').ok_or_else(|| syntax("phase must be num/den"))?;
            let parse = |s: &str| s.parse::<i64>().map_err(|_| syntax("phase must be num/den"));
            Phase::new(parse(n)?, parse(d)?).map_err(|e| syntax(&e.to_string()))
        };
        let kind = match attrs.get("kind").map(String::as_str) {
            Some("Z") => VertexKind::Z(phase()?),
            Some("X") => VertexKind::X(phase()?),
            Some("H") => VertexKind::H,
            Some("B") => {
                let index: usize = attrs
                    .get("index")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| syntax("boundary without index"))?;
                match attrs.get("role").map(String::as_str) {
                    Some("input") => inputs.insert(index, id),
                    Some("output") => outputs.insert(index, id),
                    _ => return Err(syntax("boundary without role")),
                };
                VertexKind::B
            }
            _ => return Err(syntax("unknown node kind")),
        };
        vertices.push((id, kind));
    }
    Diagram::from_parts(vertices, edges, inputs.into_values().collect(), outputs.into_values().collect())
        .map_err(|e| DotError::Invalid(e.to_string()))
}
