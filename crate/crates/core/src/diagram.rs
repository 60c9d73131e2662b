//! The open-graph data model for red/green diagrams.
//!
//! A [`Diagram`] is an undirected multigraph whose vertices are green
//! (Z) spiders, red (X) spiders, Hadamard boxes or boundaries.  Parallel edges
//! and self-loops are representable because both arise while rewriting.
//! Boundaries are ordered into an input list and an output list; the order is
//! part of the diagram's identity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase::Phase;

/// Opaque vertex identifier.  Identifiers are never reused within a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Spider colour: green spiders are Z-basis, red spiders X-basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Colour {
    Green,
    Red,
}

impl Colour {
    pub fn flipped(self) -> Colour {
        match self {
            Colour::Green => Colour::Red,
            Colour::Red => Colour::Green,
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Colour::Green => "green",
            Colour::Red => "red",
        })
    }
}

/// What a vertex denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKind {
    /// Green spider with a phase.
    Z(Phase),
    /// Red spider with a phase.
    X(Phase),
    /// Hadamard box (exactly two legs).
    H,
    /// Open wire end (exactly one leg).
    B,
}

impl VertexKind {
    pub fn spider(colour: Colour, phase: Phase) -> VertexKind {
        match colour {
            Colour::Green => VertexKind::Z(phase),
            Colour::Red => VertexKind::X(phase),
        }
    }

    pub fn is_spider(self) -> bool {
        matches!(self, VertexKind::Z(_) | VertexKind::X(_))
    }

    pub fn colour(self) -> Option<Colour> {
        match self {
            VertexKind::Z(_) => Some(Colour::Green),
            VertexKind::X(_) => Some(Colour::Red),
            _ => None,
        }
    }

    pub fn phase(self) -> Option<Phase> {
        match self {
            VertexKind::Z(p) | VertexKind::X(p) => Some(p),
            _ => None,
        }
    }

    /// The same kind with its spider colour swapped; H and B are unchanged.
    pub fn colour_swapped(self) -> VertexKind {
        match self {
            VertexKind::Z(p) => VertexKind::X(p),
            VertexKind::X(p) => VertexKind::Z(p),
            other => other,
        }
    }

    /// Short code used by the JSON format: `Z`, `X`, `H` or `B`.
    pub fn code(self) -> &'static str {
        match self {
            VertexKind::Z(_) => "Z",
            VertexKind::X(_) => "X",
            VertexKind::H => "H",
            VertexKind::B => "B",
        }
    }
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexKind::Z(p) => write!(f, "Z({p})"),
            VertexKind::X(p) => write!(f, "X({p})"),
            VertexKind::H => f.write_str("H"),
            VertexKind::B => f.write_str("B"),
        }
    }
}

/// Number of input and output wires of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n_inputs: usize,
    pub n_outputs: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}→{}", self.n_inputs, self.n_outputs)
    }
}

/// The first broken diagram invariant found by [`Diagram::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("boundary list references unknown vertex {0}")]
    UnknownBoundary(VertexId),
    #[error("vertex {id} is listed as a boundary but has kind {kind}")]
    NotABoundary { id: VertexId, kind: VertexKind },
    #[error("boundary {0} appears more than once in inputs/outputs")]
    BoundaryListedTwice(VertexId),
    #[error("boundary vertex {0} is in neither inputs nor outputs")]
    UnlistedBoundary(VertexId),
    #[error("edge ({a}, {b}) references a missing vertex")]
    DanglingEdge { a: VertexId, b: VertexId },
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("Hadamard degree ≠ 2: vertex {id} has degree {degree}")]
    HadamardDegree { id: VertexId, degree: usize },
    #[error("boundary degree ≠ 1: vertex {id} has degree {degree}")]
    BoundaryDegree { id: VertexId, degree: usize },
}

/// Error raised by sequential composition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompositionError {
    #[error("cannot compose {first} with {second}: {} outputs vs {} inputs", first.n_outputs, second.n_inputs)]
    ArityMismatch { first: Signature, second: Signature },
}

/// An open red/green diagram.
///
/// Equality is structural on ids: same vertices and kinds, the same edge
/// multiset and the same boundary lists.  Use [`crate::canon::isomorphic`]
/// for equality up to renaming.
#[derive(Debug, Clone)]
pub struct Diagram {
    kinds: BTreeMap<VertexId, VertexKind>,
    /// Neighbour multiset per vertex; a self-loop contributes two entries.
    adj: BTreeMap<VertexId, Vec<VertexId>>,
    inputs: Vec<VertexId>,
    outputs: Vec<VertexId>,
    next_id: usize,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.kinds == other.kinds
            && self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.edges() == other.edges()
    }
}

impl Eq for Diagram {}

impl Default for Diagram {
    fn default() -> Self {
        Diagram::empty()
    }
}

impl Diagram {
    /// The empty diagram (no vertices, no wires).
    pub fn empty() -> Diagram {
        Diagram {
            kinds: BTreeMap::new(),
            adj: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            next_id: 0,
        }
    }

    /// Builds a diagram from explicit parts and validates it.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = (VertexId, VertexKind)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
        inputs: Vec<VertexId>,
        outputs: Vec<VertexId>,
    ) -> Result<Diagram, Violation> {
        let d = Diagram::from_parts_unchecked(vertices, edges, inputs, outputs)?;
        d.validate()?;
        Ok(d)
    }

    /// Like [`Diagram::from_parts`] but only checks structural soundness
    /// (unique ids, edge endpoints exist); degree and boundary invariants are
    /// left for [`Diagram::validate`].
    pub fn from_parts_unchecked(
        vertices: impl IntoIterator<Item = (VertexId, VertexKind)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
        inputs: Vec<VertexId>,
        outputs: Vec<VertexId>,
    ) -> Result<Diagram, Violation> {
        let mut d = Diagram::empty();
        for (id, kind) in vertices {
            if d.kinds.insert(id, kind).is_some() {
                return Err(Violation::DuplicateVertex(id));
            }
            d.adj.insert(id, Vec::new());
            d.next_id = d.next_id.max(id.0 + 1);
        }
        for (a, b) in edges {
            if !d.kinds.contains_key(&a) || !d.kinds.contains_key(&b) {
                return Err(Violation::DanglingEdge { a, b });
            }
            d.add_edge(a, b);
        }
        d.inputs = inputs;
        d.outputs = outputs;
        Ok(d)
    }

    /// Checks every diagram invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), Violation> {
        let mut listed = BTreeSet::new();
        for &id in self.inputs.iter().chain(self.outputs.iter()) {
            match self.kinds.get(&id) {
                None => return Err(Violation::UnknownBoundary(id)),
                Some(VertexKind::B) => {}
                Some(&kind) => return Err(Violation::NotABoundary { id, kind }),
            }
            if !listed.insert(id) {
                return Err(Violation::BoundaryListedTwice(id));
            }
        }
        for (&id, &kind) in &self.kinds {
            let degree = self.degree(id);
            match kind {
                VertexKind::H if degree != 2 => {
                    return Err(Violation::HadamardDegree { id, degree })
                }
                VertexKind::B => {
                    if degree != 1 {
                        return Err(Violation::BoundaryDegree { id, degree });
                    }
                    if !listed.contains(&id) {
                        return Err(Violation::UnlistedBoundary(id));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> Signature {
        Signature { n_inputs: self.inputs.len(), n_outputs: self.outputs.len() }
    }

    pub fn inputs(&self) -> &[VertexId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[VertexId] {
        &self.outputs
    }

    pub fn vertex_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(Vec::len).sum::<usize>() / 2
    }

    /// Number of Hadamard boxes.
    pub fn hadamard_count(&self) -> usize {
        self.kinds.values().filter(|k| **k == VertexKind::H).count()
    }

    /// Number of spiders.
    pub fn spider_count(&self) -> usize {
        self.kinds.values().filter(|k| k.is_spider()).count()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.kinds.contains_key(&v)
    }

    pub fn kind(&self, v: VertexId) -> Option<VertexKind> {
        self.kinds.get(&v).copied()
    }

    /// Vertices in id order.
    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, VertexKind)> + '_ {
        self.kinds.iter().map(|(&id, &k)| (id, k))
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.kinds.keys().copied()
    }

    /// Neighbour multiset of `v`; a self-loop lists `v` twice.
    pub fn neighbours(&self, v: VertexId) -> &[VertexId] {
        self.adj.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of edge ends at `v` (a self-loop counts twice).
    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbours(v).len()
    }

    /// Number of self-loops on `v`.
    pub fn self_loops(&self, v: VertexId) -> usize {
        self.neighbours(v).iter().filter(|&&n| n == v).count() / 2
    }

    /// Number of parallel edges joining `a` and `b` (`a ≠ b`).
    pub fn multiplicity(&self, a: VertexId, b: VertexId) -> usize {
        if a == b {
            return self.self_loops(a);
        }
        self.neighbours(a).iter().filter(|&&n| n == b).count()
    }

    /// Neighbours other than `v` itself, with multiplicity.
    pub fn other_neighbours(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.neighbours(v).iter().copied().filter(move |&n| n != v)
    }

    /// All edges as `(a, b)` with `a ≤ b`, sorted, one entry per edge.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (&a, ns) in &self.adj {
            let mut loops = 0;
            for &b in ns {
                if b > a {
                    out.push((a, b));
                } else if b == a {
                    loops += 1;
                }
            }
            for _ in 0..loops / 2 {
                out.push((a, a));
            }
        }
        out.sort_unstable();
        out
    }

    /// True if `v` is a boundary listed in `inputs`.
    pub fn is_input(&self, v: VertexId) -> bool {
        self.inputs.contains(&v)
    }

    /// True if `v` is a boundary listed in `outputs`.
    pub fn is_output(&self, v: VertexId) -> bool {
        self.outputs.contains(&v)
    }

    /// Returns a copy with every spider's colour swapped.
    pub fn colour_swapped(&self) -> Diagram {
        let mut d = self.clone();
        for kind in d.kinds.values_mut() {
            *kind = kind.colour_swapped();
        }
        d
    }

    /// Returns a copy with vertex ids renamed through `mapping`.  Ids missing
    /// from the mapping keep their value; the mapping must be injective on the
    /// diagram's vertices.
    pub fn relabelled(&self, mapping: &BTreeMap<VertexId, VertexId>) -> Diagram {
        let f = |v: VertexId| mapping.get(&v).copied().unwrap_or(v);
        let vertices: Vec<_> = self.vertices().map(|(v, k)| (f(v), k)).collect();
        let edges: Vec<_> = self.edges().into_iter().map(|(a, b)| (f(a), f(b))).collect();
        let inputs = self.inputs.iter().map(|&v| f(v)).collect();
        let outputs = self.outputs.iter().map(|&v| f(v)).collect();
        Diagram::from_parts_unchecked(vertices, edges, inputs, outputs)
            .expect("relabelling with an injective mapping is structurally sound")
    }

    /// Returns a copy whose vertex ids are `0..n` in the current id order.
    pub fn compacted(&self) -> Diagram {
        let mapping = self.vertex_ids().enumerate().map(|(i, v)| (v, VertexId(i))).collect();
        self.relabelled(&mapping)
    }

    /// Vertices of connected components that contain no boundary.  Such
    /// closed components only contribute a global scalar.
    pub fn closed_vertices(&self) -> BTreeSet<VertexId> {
        let mut reached = BTreeSet::new();
        let mut stack: Vec<VertexId> = self.inputs.iter().chain(&self.outputs).copied().collect();
        while let Some(v) = stack.pop() {
            if reached.insert(v) {
                stack.extend(self.neighbours(v).iter().copied());
            }
        }
        self.vertex_ids().filter(|v| !reached.contains(v)).collect()
    }

    /// Returns a copy without its closed components, i.e. the diagram up to
    /// a global scalar (which is zero if a dropped component evaluates to 0).
    pub fn without_scalars(&self) -> Diagram {
        let mut d = self.clone();
        for v in self.closed_vertices() {
            d.remove_vertex(v);
        }
        d
    }

    // ---------------------------------------------------------------
    // Mutation, used by builders and the rewrite engine on private copies.
    // ---------------------------------------------------------------

    pub(crate) fn add_vertex(&mut self, kind: VertexKind) -> VertexId {
        let id = VertexId(self.next_id);
        self.next_id += 1;
        self.kinds.insert(id, kind);
        self.adj.insert(id, Vec::new());
        id
    }

    pub(crate) fn add_edge(&mut self, a: VertexId, b: VertexId) {
        self.adj.get_mut(&a).expect("edge endpoint exists").push(b);
        self.adj.get_mut(&b).expect("edge endpoint exists").push(a);
    }

    /// Removes one edge between `a` and `b`; returns false if none exists.
    pub(crate) fn remove_edge(&mut self, a: VertexId, b: VertexId) -> bool {
        if a == b {
            let ns = self.adj.get_mut(&a).expect("vertex exists");
            if ns.iter().filter(|&&n| n == a).count() < 2 {
                return false;
            }
            for _ in 0..2 {
                let pos = ns.iter().position(|&n| n == a).expect("loop end present");
                ns.remove(pos);
            }
            return true;
        }
        let Some(pos) = self.adj.get(&a).and_then(|ns| ns.iter().position(|&n| n == b)) else {
            return false;
        };
        self.adj.get_mut(&a).expect("vertex exists").remove(pos);
        let nb = self.adj.get_mut(&b).expect("vertex exists");
        let pos = nb.iter().position(|&n| n == a).expect("adjacency is symmetric");
        nb.remove(pos);
        true
    }

    /// Removes `v` and all incident edges.
    pub(crate) fn remove_vertex(&mut self, v: VertexId) {
        let ns = self.adj.remove(&v).unwrap_or_default();
        for n in ns {
            if n != v {
                if let Some(list) = self.adj.get_mut(&n) {
                    if let Some(pos) = list.iter().position(|&x| x == v) {
                        list.remove(pos);
                    }
                }
            }
        }
        self.kinds.remove(&v);
        self.inputs.retain(|&x| x != v);
        self.outputs.retain(|&x| x != v);
    }

    pub(crate) fn set_kind(&mut self, v: VertexId, kind: VertexKind) {
        *self.kinds.get_mut(&v).expect("vertex exists") = kind;
    }

    pub(crate) fn push_input(&mut self, v: VertexId) {
        self.inputs.push(v);
    }

    pub(crate) fn push_output(&mut self, v: VertexId) {
        self.outputs.push(v);
    }

    pub(crate) fn set_boundaries(&mut self, inputs: Vec<VertexId>, outputs: Vec<VertexId>) {
        self.inputs = inputs;
        self.outputs = outputs;
    }

    /// Places a new vertex of `kind` on one `a`–`b` edge, returning it.
    pub(crate) fn subdivide(&mut self, a: VertexId, b: VertexId, kind: VertexKind) -> VertexId {
        let removed = self.remove_edge(a, b);
        debug_assert!(removed, "subdivided edge exists");
        let m = self.add_vertex(kind);
        self.add_edge(a, m);
        self.add_edge(m, b);
        m
    }

    /// Deletes a two-legged vertex and joins its neighbours.  A vertex whose
    /// two legs form a self-loop disappears together with the loop (a closed
    /// circle, which only contributes a scalar).
    pub(crate) fn splice_out(&mut self, v: VertexId) {
        let ns = self.neighbours(v).to_vec();
        debug_assert_eq!(ns.len(), 2, "splice_out needs a two-legged vertex");
        self.remove_vertex(v);
        if ns[0] != v && ns[1] != v {
            self.add_edge(ns[0], ns[1]);
        }
    }

    /// Inserts every vertex and edge of `other` with ids shifted past this
    /// diagram's ids; returns the id translation.  Boundary lists are not
    /// touched.
    fn absorb(&mut self, other: &Diagram) -> BTreeMap<VertexId, VertexId> {
        let offset = self.next_id;
        let map: BTreeMap<_, _> =
            other.vertex_ids().map(|v| (v, VertexId(v.0 + offset))).collect();
        for (v, k) in other.vertices() {
            self.kinds.insert(map[&v], k);
            self.adj.insert(map[&v], Vec::new());
        }
        for (a, b) in other.edges() {
            self.add_edge(map[&a], map[&b]);
        }
        self.next_id = offset + other.next_id;
        map
    }
}

/// Sequential composition `second ∘ first`: the outputs of `first` are glued
/// pairwise, in order, to the inputs of `second`.
pub fn compose_sequential(first: &Diagram, second: &Diagram) -> Result<Diagram, CompositionError> {
    if first.outputs.len() != second.inputs.len() {
        return Err(CompositionError::ArityMismatch {
            first: first.signature(),
            second: second.signature(),
        });
    }
    let mut d = first.clone();
    let map = d.absorb(second);
    let glued: Vec<(VertexId, VertexId)> = first
        .outputs
        .iter()
        .zip(second.inputs.iter())
        .map(|(&o, &i)| (o, map[&i]))
        .collect();
    d.inputs = first.inputs.clone();
    d.outputs = second.outputs.iter().map(|v| map[v]).collect();
    for &(o, i) in &glued {
        d.add_edge(o, i);
    }
    // Each glued boundary now sits mid-wire with two legs; dissolve it.  A
    // wire that closes into a vertex-free circle is kept as a phase-free
    // spider with a self-loop, which has the circle's value (2) exactly.
    for (o, i) in glued {
        for v in [o, i] {
            if !d.contains(v) {
                continue;
            }
            if d.self_loops(v) == 1 {
                d.set_kind(v, VertexKind::Z(Phase::ZERO));
            } else {
                d.splice_out(v);
            }
        }
    }
    Ok(d)
}

/// Parallel composition: disjoint union with concatenated boundary lists.
pub fn compose_parallel(a: &Diagram, b: &Diagram) -> Diagram {
    let mut d = a.clone();
    let map = d.absorb(b);
    d.inputs.extend(b.inputs.iter().map(|v| map[v]));
    d.outputs.extend(b.outputs.iter().map(|v| map[v]));
    d
}

/// Incremental constructor for diagrams.
#[derive(Debug, Clone, Default)]
pub struct DiagramBuilder {
    d: Diagram,
}

impl DiagramBuilder {
    pub fn new() -> DiagramBuilder {
        DiagramBuilder { d: Diagram::empty() }
    }

    pub fn vertex(&mut self, kind: VertexKind) -> VertexId {
        self.d.add_vertex(kind)
    }

    /// Adds a green spider.
    pub fn z(&mut self, phase: Phase) -> VertexId {
        self.vertex(VertexKind::Z(phase))
    }

    /// Adds a red spider.
    pub fn x(&mut self, phase: Phase) -> VertexId {
        self.vertex(VertexKind::X(phase))
    }

    /// Adds a spider of the given colour.
    pub fn spider(&mut self, colour: Colour, phase: Phase) -> VertexId {
        self.vertex(VertexKind::spider(colour, phase))
    }

    /// Adds a Hadamard box.
    pub fn h(&mut self) -> VertexId {
        self.vertex(VertexKind::H)
    }

    /// Adds a boundary vertex and appends it to the inputs.
    pub fn input(&mut self) -> VertexId {
        let v = self.vertex(VertexKind::B);
        self.d.push_input(v);
        v
    }

    /// Adds a boundary vertex and appends it to the outputs.
    pub fn output(&mut self) -> VertexId {
        let v = self.vertex(VertexKind::B);
        self.d.push_output(v);
        v
    }

    /// Adds an edge; both endpoints must have been created by this builder.
    pub fn edge(&mut self, a: VertexId, b: VertexId) -> &mut Self {
        self.d.add_edge(a, b);
        self
    }

    /// Adds a path of edges through the given vertices.
    pub fn path(&mut self, vs: &[VertexId]) -> &mut Self {
        for w in vs.windows(2) {
            self.d.add_edge(w[0], w[1]);
        }
        self
    }

    /// Joins `a` and `b` through a fresh Hadamard box.
    pub fn h_edge(&mut self, a: VertexId, b: VertexId) -> VertexId {
        let h = self.h();
        self.path(&[a, h, b]);
        h
    }

    /// Finishes the diagram, checking every invariant.
    pub fn build(self) -> Result<Diagram, Violation> {
        self.d.validate()?;
        Ok(self.d)
    }

    /// Finishes the diagram without checking degree or boundary invariants.
    pub fn build_unchecked(self) -> Diagram {
        self.d
    }
}
