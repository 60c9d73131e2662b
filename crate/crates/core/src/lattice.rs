//! Cluster-state constructors: graph states, two-colourings and the 3D
//! cluster lattice with its primal/dual site classification.
//!
//! # Coordinates
//!
//! Lattice sites use doubled integer coordinates: one unit cell spans two
//! units along each axis.  A point is a qubit site when exactly two of its
//! coordinates are odd (a *face* site, the centre of a cell face) or exactly
//! one is (an *edge* site, the midpoint of a cell edge).  Face sites belong to
//! the primal lattice and edge sites to the dual lattice: shifting by
//! `(1, 1, 1)` exchanges the two, which is the half-cell self-similarity of
//! the cluster.  A face site is adjacent to the four edge sites at distance 1.
//!
//! # Colourings
//!
//! A graph state is a phase-free green spider per qubit with one open time
//! leg, and a Hadamard box on every graph edge.  Two-colouring applies a
//! colour change to every qubit of one bipartition class: those spiders turn
//! red, the boxes on their graph edges are absorbed and a box appears on
//! their time legs instead.  Under the red-centre convention primal sites are
//! red; under green-centre, dual sites are.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Colour, Diagram, DiagramBuilder, VertexId, VertexKind};
use crate::phase::Phase;
use crate::rewrite::{apply, Match, RuleId};

/// Largest lattice [`tile_lattice`] builds unless told otherwise.
pub const DEFAULT_SITE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a graph state needs at least one qubit")]
    EmptyGraph,
    #[error("edge ({a}, {b}) names a qubit outside 0..{n}")]
    UnknownQubit { a: usize, b: usize, n: usize },
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("qubits {a} and {b} are adjacent but receive the same colour")]
    NotBipartite { a: usize, b: usize },
    #[error("lattice needs at least one cell along every axis, got {0:?}")]
    ZeroCells([usize; 3]),
    #[error("lattice of {sites} sites exceeds the cap of {cap}")]
    CapExceeded { sites: usize, cap: usize },
    #[error("build is already two-coloured")]
    AlreadyColoured,
    #[error("{0} is not a lattice site")]
    NotASite(SiteCoordinate),
    #[error("site {0} is listed twice")]
    DuplicateSite(SiteCoordinate),
}

/// A point of the doubled-coordinate grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct SiteCoordinate {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl From<[i64; 3]> for SiteCoordinate {
    fn from([x, y, z]: [i64; 3]) -> Self {
        SiteCoordinate { x, y, z }
    }
}

impl From<SiteCoordinate> for [i64; 3] {
    fn from(s: SiteCoordinate) -> Self {
        [s.x, s.y, s.z]
    }
}

impl fmt::Display for SiteCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Whether a site sits on a cell face or a cell edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteKind {
    Face,
    Edge,
}

/// The two interleaved sublattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sublattice {
    Primal,
    Dual,
}

impl Sublattice {
    pub fn other(self) -> Sublattice {
        match self {
            Sublattice::Primal => Sublattice::Dual,
            Sublattice::Dual => Sublattice::Primal,
        }
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sublattice::Primal => "primal",
            Sublattice::Dual => "dual",
        })
    }
}

/// Which sublattice is drawn red.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Convention {
    /// Primal (face) sites red, dual (edge) sites green.
    #[default]
    #[serde(rename = "red-centre")]
    RedCentre,
    /// Primal sites green, dual sites red.
    #[serde(rename = "green-centre")]
    GreenCentre,
}

impl Convention {
    /// The colour of sites on `sublattice`.
    pub fn colour_of(self, sublattice: Sublattice) -> Colour {
        match (self, sublattice) {
            (Convention::RedCentre, Sublattice::Primal) | (Convention::GreenCentre, Sublattice::Dual) => Colour::Red,
            _ => Colour::Green,
        }
    }

    pub fn swapped(self) -> Convention {
        match self {
            Convention::RedCentre => Convention::GreenCentre,
            Convention::GreenCentre => Convention::RedCentre,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::RedCentre => "red-centre",
            Convention::GreenCentre => "green-centre",
        }
    }

    pub fn from_name(name: &str) -> Option<Convention> {
        match name {
            "red-centre" => Some(Convention::RedCentre),
            "green-centre" => Some(Convention::GreenCentre),
            _ => None,
        }
    }
}

/// Sublattice and colour of a site under a convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SiteClass {
    pub sublattice: Sublattice,
    pub colour: Colour,
}

impl SiteCoordinate {
    pub const fn new(x: i64, y: i64, z: i64) -> SiteCoordinate {
        SiteCoordinate { x, y, z }
    }

    fn coords(self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }

    fn odd_axes(self) -> usize {
        self.coords().iter().filter(|c| c.rem_euclid(2) == 1).count()
    }

    /// Face or edge site, or `None` for cell corners and centres.
    pub fn kind(self) -> Option<SiteKind> {
        match self.odd_axes() {
            2 => Some(SiteKind::Face),
            1 => Some(SiteKind::Edge),
            _ => None,
        }
    }

    pub fn is_site(self) -> bool {
        self.kind().is_some()
    }

    /// Face sites are primal, edge sites dual.
    pub fn sublattice(self) -> Option<Sublattice> {
        self.kind().map(|k| match k {
            SiteKind::Face => Sublattice::Primal,
            SiteKind::Edge => Sublattice::Dual,
        })
    }

    pub fn class(self, convention: Convention) -> Option<SiteClass> {
        let sublattice = self.sublattice()?;
        Some(SiteClass { sublattice, colour: convention.colour_of(sublattice) })
    }

    pub fn shifted(self, dx: i64, dy: i64, dz: i64) -> SiteCoordinate {
        SiteCoordinate::new(self.x + dx, self.y + dy, self.z + dz)
    }

    /// Adjacent sites in the unbounded lattice: a face site's four edge sites
    /// and an edge site's four face sites, in a fixed order.
    pub fn neighbours(self) -> Vec<SiteCoordinate> {
        let Some(kind) = self.kind() else { return Vec::new() };
        let c = self.coords();
        let mut out = Vec::with_capacity(4);
        for axis in 0..3 {
            let odd = c[axis].rem_euclid(2) == 1;
            // Faces move along an odd axis, edges along an even one.
            if odd == (kind == SiteKind::Face) {
                for delta in [-1, 1] {
                    let mut n = c;
                    n[axis] += delta;
                    out.push(SiteCoordinate::from(n));
                }
            }
        }
        out
    }

    /// The cells of the site's own sublattice that have it as a face, as
    /// integer cell indices of that sublattice.  Dual cells are primal cells
    /// shifted by `(1, 1, 1)`.
    pub fn cells(self) -> Vec<[i64; 3]> {
        let Some(sub) = self.sublattice() else { return Vec::new() };
        let c = match sub {
            Sublattice::Primal => self.coords(),
            Sublattice::Dual => self.shifted(-1, -1, -1).coords(),
        };
        let mut base = [0i64; 3];
        let mut normal = 0;
        for axis in 0..3 {
            if c[axis].rem_euclid(2) == 1 {
                base[axis] = (c[axis] - 1).div_euclid(2);
            } else {
                normal = axis;
            }
        }
        let mut lo = base;
        let mut hi = base;
        lo[normal] = c[normal].div_euclid(2) - 1;
        hi[normal] = c[normal].div_euclid(2);
        vec![lo, hi]
    }
}

/// Lattice description as read from and written to JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub cells: [usize; 3],
    #[serde(default)]
    pub convention: Convention,
}

impl LatticeSpec {
    pub fn new(nx: usize, ny: usize, nz: usize, convention: Convention) -> LatticeSpec {
        LatticeSpec { cells: [nx, ny, nz], convention }
    }

    /// Upper corner of the doubled-coordinate box.
    pub fn extent(&self) -> [i64; 3] {
        self.cells.map(|n| 2 * n as i64)
    }

    /// Whether `s` is a site of this lattice.
    pub fn contains(&self, s: SiteCoordinate) -> bool {
        let e = self.extent();
        s.is_site() && (0..=e[0]).contains(&s.x) && (0..=e[1]).contains(&s.y) && (0..=e[2]).contains(&s.z)
    }

    /// Every site, ordered by `(z, y, x)` so that time layers are contiguous.
    pub fn sites(&self) -> Vec<SiteCoordinate> {
        let e = self.extent();
        let mut out = Vec::new();
        for z in 0..=e[2] {
            for y in 0..=e[1] {
                for x in 0..=e[0] {
                    let s = SiteCoordinate::new(x, y, z);
                    if s.is_site() {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    /// Number of sites, computed without enumerating them.
    pub fn site_count(&self) -> usize {
        // Per axis: n + 1 even coordinates and n odd ones.
        let [(ea, oa), (eb, ob), (ec, oc)] = self.cells.map(|n| (n + 1, n));
        let face = oa * ob * ec + oa * eb * oc + ea * ob * oc;
        let edge = oa * eb * ec + ea * ob * ec + ea * eb * oc;
        face + edge
    }
}

/// A cluster-state diagram together with its qubit bookkeeping.
#[derive(Debug, Clone)]
pub struct ClusterBuild {
    pub diagram: Diagram,
    /// Qubit `i`'s spider.
    pub spiders: Vec<VertexId>,
    /// Qubit `i`'s open time leg (a boundary vertex).
    pub legs: Vec<VertexId>,
    /// The graph edges, as qubit index pairs with `a < b`.
    pub edges: Vec<(usize, usize)>,
    /// Lattice coordinates of the qubits (empty for abstract graph states).
    pub coordinates: Vec<SiteCoordinate>,
    /// The colouring applied, if any.
    pub convention: Option<Convention>,
}

impl ClusterBuild {
    pub fn qubit_count(&self) -> usize {
        self.spiders.len()
    }

    /// Qubit index of a lattice site.
    pub fn qubit_at(&self, s: SiteCoordinate) -> Option<usize> {
        self.coordinates.binary_search_by(|c| layer_order(*c).cmp(&layer_order(s))).ok()
    }

    /// Map from lattice site to spider vertex.
    pub fn site_index(&self) -> BTreeMap<SiteCoordinate, VertexId> {
        self.coordinates.iter().copied().zip(self.spiders.iter().copied()).collect()
    }

    /// Map from spider vertex to the boundary vertex of its time leg.
    pub fn time_legs(&self) -> BTreeMap<VertexId, VertexId> {
        self.spiders.iter().copied().zip(self.legs.iter().copied()).collect()
    }

    /// Neighbouring qubits of `q` in the graph.
    pub fn graph_neighbours(&self, q: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == q { Some(b) } else if b == q { Some(a) } else { None })
            .collect()
    }
}

fn layer_order(s: SiteCoordinate) -> (i64, i64, i64) {
    (s.z, s.y, s.x)
}

/// The graph state of a simple graph on qubits `0..n`: a phase-free green
/// spider per qubit with one open output leg, and one Hadamard box per edge.
pub fn build_graph_state(n: usize, edges: &[(usize, usize)]) -> Result<ClusterBuild, LatticeError> {
    if n == 0 {
        return Err(LatticeError::EmptyGraph);
    }
    let mut seen = BTreeSet::new();
    let mut normalised = Vec::with_capacity(edges.len());
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(LatticeError::UnknownQubit { a, b, n });
        }
        if a == b {
            return Err(LatticeError::SelfLoop(a));
        }
        let e = (a.min(b), a.max(b));
        if !seen.insert(e) {
            return Err(LatticeError::DuplicateEdge(e.0, e.1));
        }
        normalised.push(e);
    }
    let mut b = DiagramBuilder::new();
    let spiders: Vec<VertexId> = (0..n).map(|_| b.z(Phase::ZERO)).collect();
    let legs: Vec<VertexId> = spiders
        .iter()
        .map(|&s| {
            let o = b.output();
            b.edge(s, o);
            o
        })
        .collect();
    for &(x, y) in &normalised {
        b.h_edge(spiders[x], spiders[y]);
    }
    let diagram = b.build().expect("graph state diagrams are valid");
    Ok(ClusterBuild { diagram, spiders, legs, edges: normalised, coordinates: Vec::new(), convention: None })
}

/// Colours per qubit: parity rule for lattice builds, otherwise a
/// breadth-first bipartition in which the lowest-numbered qubit of each
/// connected component takes the "centre" colour (red under red-centre).
fn colouring(build: &ClusterBuild, convention: Convention) -> Vec<Colour> {
    if !build.coordinates.is_empty() {
        return build
            .coordinates
            .iter()
            .map(|s| s.class(convention).expect("lattice qubits are sites").colour)
            .collect();
    }
    let n = build.qubit_count();
    let centre = convention.colour_of(Sublattice::Primal);
    let mut colour: Vec<Option<Colour>> = vec![None; n];
    for start in 0..n {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(centre);
        let mut queue = VecDeque::from([start]);
        while let Some(q) = queue.pop_front() {
            let c = colour[q].expect("queued qubits are coloured");
            for m in build.graph_neighbours(q) {
                if colour[m].is_none() {
                    colour[m] = Some(c.flipped());
                    queue.push_back(m);
                }
            }
        }
    }
    colour.into_iter().map(|c| c.expect("every qubit reached")).collect()
}

/// Two-colours a graph-state build: every qubit of the red class is colour
/// changed, so opposite-colour neighbours meet on plain edges and red
/// qubits carry a Hadamard on their time leg.  The tensor is unchanged.
pub fn two_colour(build: &ClusterBuild, convention: Convention) -> Result<ClusterBuild, LatticeError> {
    if build.convention.is_some() {
        return Err(LatticeError::AlreadyColoured);
    }
    let colours = colouring(build, convention);
    for &(a, b) in &build.edges {
        if colours[a] == colours[b] {
            return Err(LatticeError::NotBipartite { a, b });
        }
    }
    let mut d = build.diagram.clone();
    for (q, &c) in colours.iter().enumerate() {
        if c == Colour::Red {
            d = apply(&d, &Match::new(RuleId::ColorChange, vec![build.spiders[q]]))
                .expect("colour change applies to every spider");
        }
    }
    Ok(ClusterBuild { diagram: d, convention: Some(convention), ..build.clone() })
}

/// Sites and nearest-neighbour pairs of an `nx × ny × nz` lattice.
pub fn lattice_graph(spec: &LatticeSpec) -> (Vec<SiteCoordinate>, Vec<(usize, usize)>) {
    let sites = spec.sites();
    let index: BTreeMap<SiteCoordinate, usize> = sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut edges = Vec::new();
    for (i, s) in sites.iter().enumerate() {
        for n in s.neighbours() {
            if let Some(&j) = index.get(&n) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    (sites, edges)
}

/// The uncoloured graph state of an `nx × ny × nz` block of unit cells,
/// refusing lattices with more than `cap` sites.
pub fn tile_lattice_capped(nx: usize, ny: usize, nz: usize, cap: usize) -> Result<ClusterBuild, LatticeError> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(LatticeError::ZeroCells([nx, ny, nz]));
    }
    let spec = LatticeSpec::new(nx, ny, nz, Convention::default());
    let count = spec.site_count();
    if count > cap {
        return Err(LatticeError::CapExceeded { sites: count, cap });
    }
    let (sites, edges) = lattice_graph(&spec);
    let mut build = build_graph_state(sites.len(), &edges)?;
    build.coordinates = sites;
    Ok(build)
}

/// [`tile_lattice_capped`] with [`DEFAULT_SITE_CAP`].
pub fn tile_lattice(nx: usize, ny: usize, nz: usize) -> Result<ClusterBuild, LatticeError> {
    tile_lattice_capped(nx, ny, nz, DEFAULT_SITE_CAP)
}

/// The 18-site unit cell (uncoloured).
pub fn build_unit_cell() -> ClusterBuild {
    tile_lattice(1, 1, 1).expect("the unit cell is within every cap")
}

/// Tiles and two-colours the lattice described by `spec`.
pub fn build_lattice(spec: &LatticeSpec, cap: usize) -> Result<ClusterBuild, LatticeError> {
    let [nx, ny, nz] = spec.cells;
    let build = tile_lattice_capped(nx, ny, nz, cap)?;
    two_colour(&build, spec.convention)
}

/// The two-coloured graph state on an arbitrary set of lattice sites, with
/// the nearest-neighbour edges among them.  Used for drawn cluster fragments
/// that are not whole blocks of cells.
pub fn build_fragment(sites: &[SiteCoordinate], convention: Convention) -> Result<ClusterBuild, LatticeError> {
    let mut sorted = sites.to_vec();
    sorted.sort_by_key(|&s| layer_order(s));
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(LatticeError::DuplicateSite(w[0]));
        }
    }
    if let Some(&s) = sorted.iter().find(|s| !s.is_site()) {
        return Err(LatticeError::NotASite(s));
    }
    let index: BTreeMap<SiteCoordinate, usize> = sorted.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut edges = Vec::new();
    for (i, s) in sorted.iter().enumerate() {
        for n in s.neighbours() {
            if let Some(&j) = index.get(&n) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    let mut build = build_graph_state(sorted.len(), &edges)?;
    build.coordinates = sorted;
    two_colour(&build, convention)
}

/// Places a two-legged spider of `kind` on qubit `q`'s time leg, next to the
/// boundary (that is, on the physical qubit, beyond any Hadamard on the leg).
pub fn insert_on_leg(build: &ClusterBuild, q: usize, kind: VertexKind) -> ClusterBuild {
    let mut out = build.clone();
    let leg = build.legs[q];
    let inner = build.diagram.neighbours(leg)[0];
    out.diagram.subdivide(inner, leg, kind);
    out
}
