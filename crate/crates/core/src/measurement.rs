//! Measurement patterns on cluster builds: Z-basis defect carving, X-basis
//! bulk measurement with ±1 outcomes, cell parity checks, logical operator
//! insertion, logical-line extraction and boundary regrouping.
//!
//! # Measurements as effects
//!
//! A measured qubit's open time leg is closed by a one-legged spider: a red
//! effect for a Z-basis measurement and a green one for an X-basis
//! measurement, with phase 0 for outcome +1 and π for −1.  Outcomes are
//! post-selected and scalars are discarded.
//!
//! *Carving* a defect site replays the copy rule: the red effect (moved
//! across the site's Hadamard by a colour change when the site is red) is
//! copied through the site spider, which deletes the site, and every copy
//! fuses into the neighbour it lands on.
//!
//! *Bulk measurement* fuses each green effect into its site spider (across
//! the Hadamard for red sites).  This turns the open process into a closed
//! graph with the shape of the physical cluster.  π phases left behind by −1
//! outcomes are then carried along chains of two-legged spiders by π-copy
//! and spider fusion until they meet a partner and cancel.  The full
//! normaliser is left to [`extract_logical`], so that the measured diagram
//! keeps the cluster's shape.
//!
//! # Time layers
//!
//! Unmeasured sites of the first z-layer become the process inputs and all
//! other unmeasured sites (normally those of the last z-layer) its outputs,
//! each in `(z, y, x)` order.
//!
//! # Regrouping
//!
//! A logical qubit leaves several physical boundary legs.  [`group_boundaries`]
//! follows each boundary through two-legged vertices to the first spider
//! with a different degree (its *anchor*).  Inputs sharing an anchor are
//! merged through one encoder spider of the anchor's colour, with a Hadamard
//! on each encoder leg whose path to the anchor crosses an odd number of
//! Hadamards, and likewise for outputs.  The encoder then fuses into the
//! anchor, leaving one wire per logical qubit and side.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Colour, Diagram, VertexId, VertexKind};
use crate::lattice::{
    build_lattice, ClusterBuild, LatticeError, LatticeSpec, SiteCoordinate, Sublattice, DEFAULT_SITE_CAP,
};
use crate::phase::Phase;
use crate::rewrite::{apply_mut, normalize, Match, NormalizeError, Policy, RuleId, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasurementError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("the build has no lattice coordinates")]
    NoCoordinates,
    #[error("{0} is not a lattice site")]
    NotASite(SiteCoordinate),
    #[error("site {0} is not part of the build")]
    UnknownSite(SiteCoordinate),
    #[error("defect strand {0} is empty")]
    EmptyStrand(usize),
    #[error("defect strand {strand}: site {site} is not on the {expected} sublattice")]
    WrongSublattice { strand: usize, site: SiteCoordinate, expected: Sublattice },
    #[error("defect strand {strand}: consecutive sites {a} and {b} share no cell")]
    Disconnected { strand: usize, a: SiteCoordinate, b: SiteCoordinate },
    #[error("site {0} appears more than once among the defect strands")]
    DuplicateDefectSite(SiteCoordinate),
    #[error("pair [{0}, {1}] must name two distinct existing strands")]
    BadPair(usize, usize),
    #[error("strand {0} appears in more than one pair")]
    StrandPairedTwice(usize),
    #[error("paired strands {0} and {1} lie on different sublattices")]
    MixedPair(usize, usize),
    #[error("logical operator {0} has no sites")]
    EmptyOperator(usize),
    #[error("logical operator site {0} lies inside a defect")]
    OperatorOnDefect(SiteCoordinate),
    #[error("site {0} is already measured")]
    AlreadyMeasured(SiteCoordinate),
    #[error("outcome sign {sign} at {site}; expected 1 or -1")]
    BadSign { site: SiteCoordinate, sign: i64 },
    #[error("outcome given for unmeasured site {0}")]
    OutcomeForOpenSite(SiteCoordinate),
    #[error("outcome for {0} given twice")]
    DuplicateOutcome(SiteCoordinate),
    #[error("measured site {0} has no outcome")]
    MissingOutcome(SiteCoordinate),
    #[error("defect site {0} must be carved before the bulk is measured")]
    UncarvedDefect(SiteCoordinate),
}

/// The basis a site is measured in; `Open` sites keep their time leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "Z")]
    Z,
    #[serde(rename = "X")]
    X,
    #[serde(rename = "none")]
    Open,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Z => "Z",
            Basis::X => "X",
            Basis::Open => "none",
        })
    }
}

/// A ±1 measurement result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Outcome {
    #[default]
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> i64 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Outcome> {
        match sign {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }

    /// Phase of the effect recording this outcome.
    pub fn phase(self) -> Phase {
        match self {
            Outcome::Plus => Phase::ZERO,
            Outcome::Minus => Phase::PI,
        }
    }

    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

/// A connected path of sites on one sublattice, measured out in Z.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectStrand {
    pub sublattice: Sublattice,
    pub path: Vec<SiteCoordinate>,
}

impl DefectStrand {
    /// The straight strand of `len` sites from `start` along `axis` (0, 1
    /// or 2), stepping one cell at a time.
    pub fn straight(start: SiteCoordinate, axis: usize, len: usize) -> DefectStrand {
        let path = (0..len as i64)
            .map(|k| {
                let mut d = [0i64; 3];
                d[axis] = 2 * k;
                start.shifted(d[0], d[1], d[2])
            })
            .collect();
        DefectStrand { sublattice: start.sublattice().unwrap_or(Sublattice::Primal), path }
    }
}

/// Defect strands plus their grouping into double-defect logical qubits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectSpec {
    pub strands: Vec<DefectStrand>,
    #[serde(default)]
    pub pairs: Vec<[usize; 2]>,
}

impl DefectSpec {
    pub fn new(strands: Vec<DefectStrand>) -> DefectSpec {
        DefectSpec { strands, pairs: Vec::new() }
    }

    /// Checks strand geometry and pairing.
    pub fn validate(&self) -> Result<(), MeasurementError> {
        let mut seen = BTreeSet::new();
        for (i, strand) in self.strands.iter().enumerate() {
            if strand.path.is_empty() {
                return Err(MeasurementError::EmptyStrand(i));
            }
            for &site in &strand.path {
                let sub = site.sublattice().ok_or(MeasurementError::NotASite(site))?;
                if sub != strand.sublattice {
                    return Err(MeasurementError::WrongSublattice { strand: i, site, expected: strand.sublattice });
                }
                if !seen.insert(site) {
                    return Err(MeasurementError::DuplicateDefectSite(site));
                }
            }
            for w in strand.path.windows(2) {
                let cells: BTreeSet<[i64; 3]> = w[0].cells().into_iter().collect();
                if !w[1].cells().iter().any(|c| cells.contains(c)) {
                    return Err(MeasurementError::Disconnected { strand: i, a: w[0], b: w[1] });
                }
            }
        }
        let mut paired = BTreeSet::new();
        for &[a, b] in &self.pairs {
            if a == b || a >= self.strands.len() || b >= self.strands.len() {
                return Err(MeasurementError::BadPair(a, b));
            }
            for s in [a, b] {
                if !paired.insert(s) {
                    return Err(MeasurementError::StrandPairedTwice(s));
                }
            }
            if self.strands[a].sublattice != self.strands[b].sublattice {
                return Err(MeasurementError::MixedPair(a, b));
            }
        }
        Ok(())
    }

    /// Every defect site.
    pub fn sites(&self) -> BTreeSet<SiteCoordinate> {
        self.strands.iter().flat_map(|s| s.path.iter().copied()).collect()
    }
}

/// Whether an operator encircles a defect or runs alongside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Ring,
    Chain,
}

/// Physical Z operations (green π) on a set of sites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalOperatorSpec {
    pub kind: OperatorKind,
    pub sites: Vec<SiteCoordinate>,
}

/// Where measurement outcomes come from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeSource {
    /// Every measurement gives +1.
    #[default]
    AllPlus,
    /// A reproducible parity-valid random assignment.
    Seed(u64),
    /// `[x, y, z, sign]` entries; unlisted measured sites give +1.
    Explicit(Vec<[i64; 4]>),
}

/// Basis and outcome for every site of a build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementPattern {
    pub basis: BTreeMap<SiteCoordinate, Basis>,
    pub outcomes: BTreeMap<SiteCoordinate, Outcome>,
    pub source: OutcomeSource,
}

impl MeasurementPattern {
    /// The standard pattern on `build`: defect sites in Z, unmeasured sites
    /// on the first and last z-layers, every other site in X.
    ///
    /// Seeded outcomes are generated from cluster stabilisers: a random set
    /// `S` of X-measured sites with no unmeasured neighbour is drawn, and a
    /// site's X outcome is −1 when an odd number of its neighbours lie in
    /// `S`.  Defect outcomes stay +1.  Such assignments satisfy every cell
    /// parity check and leave the post-selected process unchanged.
    pub fn for_build(
        build: &ClusterBuild,
        defects: &DefectSpec,
        source: &OutcomeSource,
    ) -> Result<MeasurementPattern, MeasurementError> {
        if build.coordinates.is_empty() {
            return Err(MeasurementError::NoCoordinates);
        }
        defects.validate()?;
        let present: BTreeSet<SiteCoordinate> = build.coordinates.iter().copied().collect();
        let defect_sites = defects.sites();
        if let Some(&s) = defect_sites.iter().find(|s| !present.contains(s)) {
            return Err(MeasurementError::UnknownSite(s));
        }
        let zmin = build.coordinates.iter().map(|s| s.z).min().expect("non-empty");
        let zmax = build.coordinates.iter().map(|s| s.z).max().expect("non-empty");
        let basis: BTreeMap<SiteCoordinate, Basis> = build
            .coordinates
            .iter()
            .map(|&s| {
                let b = if defect_sites.contains(&s) {
                    Basis::Z
                } else if s.z == zmin || s.z == zmax {
                    Basis::Open
                } else {
                    Basis::X
                };
                (s, b)
            })
            .collect();
        let mut pattern = MeasurementPattern {
            outcomes: basis.iter().filter(|(_, &b)| b != Basis::Open).map(|(&s, _)| (s, Outcome::Plus)).collect(),
            basis,
            source: source.clone(),
        };
        match source {
            OutcomeSource::AllPlus => {}
            OutcomeSource::Seed(seed) => pattern.apply_seed(*seed),
            OutcomeSource::Explicit(entries) => {
                let mut given = BTreeSet::new();
                for &[x, y, z, sign] in entries {
                    let site = SiteCoordinate::new(x, y, z);
                    if !given.insert(site) {
                        return Err(MeasurementError::DuplicateOutcome(site));
                    }
                    let outcome = Outcome::from_sign(sign).ok_or(MeasurementError::BadSign { site, sign })?;
                    pattern.set_outcome(site, outcome)?;
                }
            }
        }
        Ok(pattern)
    }

    fn apply_seed(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eligible: Vec<SiteCoordinate> = self
            .basis
            .iter()
            .filter(|&(s, &b)| {
                b == Basis::X && s.neighbours().iter().all(|n| self.basis.get(n) != Some(&Basis::Open))
            })
            .map(|(&s, _)| s)
            .collect();
        for s in eligible {
            if rng.gen_bool(0.5) {
                for n in s.neighbours() {
                    if self.basis.get(&n) == Some(&Basis::X) {
                        let o = self.outcomes.get_mut(&n).expect("X sites have outcomes");
                        *o = o.flipped();
                    }
                }
            }
        }
    }

    pub fn basis_of(&self, s: SiteCoordinate) -> Option<Basis> {
        self.basis.get(&s).copied()
    }

    pub fn outcome(&self, s: SiteCoordinate) -> Option<Outcome> {
        self.outcomes.get(&s).copied()
    }

    /// Sites measured in `basis`, in coordinate order.
    pub fn sites_in(&self, basis: Basis) -> Vec<SiteCoordinate> {
        self.basis.iter().filter(|(_, &b)| b == basis).map(|(&s, _)| s).collect()
    }

    /// Overrides the outcome of a measured site.
    pub fn set_outcome(&mut self, site: SiteCoordinate, outcome: Outcome) -> Result<(), MeasurementError> {
        match self.basis.get(&site) {
            None => Err(MeasurementError::UnknownSite(site)),
            Some(Basis::Open) => Err(MeasurementError::OutcomeForOpenSite(site)),
            Some(_) => {
                self.outcomes.insert(site, outcome);
                Ok(())
            }
        }
    }

    /// Number of −1 outcomes.
    pub fn minus_count(&self) -> usize {
        self.outcomes.values().filter(|&&o| o == Outcome::Minus).count()
    }
}

/// A cell whose six face outcomes multiply to −1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellReport {
    pub sublattice: Sublattice,
    /// The cell centre in doubled coordinates.
    pub centre: [i64; 3],
    /// How many of the six outcomes are −1 (always odd).
    pub minus: usize,
}

/// Cells of either sublattice whose six face sites are all X-measured and
/// whose outcomes multiply to −1.  A primal cell is centred on a point with
/// three odd coordinates and its faces are primal sites; a dual cell is
/// centred on a point with three even coordinates and its faces are dual
/// sites.
pub fn parity_check(build: &ClusterBuild, pattern: &MeasurementPattern) -> Vec<CellReport> {
    const AXES: [[i64; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let faces = |c: [i64; 3]| -> Vec<SiteCoordinate> {
        AXES.iter()
            .flat_map(|e| [-1, 1].map(|s| SiteCoordinate::new(c[0] + s * e[0], c[1] + s * e[1], c[2] + s * e[2])))
            .collect()
    };
    let mut centres = BTreeSet::new();
    for &s in &build.coordinates {
        if pattern.basis_of(s) != Some(Basis::X) {
            continue;
        }
        let c = [s.x, s.y, s.z];
        for (axis, e) in AXES.iter().enumerate() {
            // The face normal is the axis whose parity differs from the rest.
            let odd = c.iter().filter(|v| v.rem_euclid(2) == 1).count();
            let is_normal = if odd == 2 { c[axis].rem_euclid(2) == 0 } else { c[axis].rem_euclid(2) == 1 };
            if is_normal {
                for sign in [-1, 1] {
                    centres.insert([c[0] + sign * e[0], c[1] + sign * e[1], c[2] + sign * e[2]]);
                }
            }
        }
    }
    let mut reports = Vec::new();
    for centre in centres {
        let fs = faces(centre);
        if !fs.iter().all(|&f| pattern.basis_of(f) == Some(Basis::X)) {
            continue;
        }
        let minus = fs.iter().filter(|&&f| pattern.outcome(f) == Some(Outcome::Minus)).count();
        if minus % 2 == 1 {
            let sublattice = if centre[0].rem_euclid(2) == 1 { Sublattice::Primal } else { Sublattice::Dual };
            reports.push(CellReport { sublattice, centre, minus });
        }
    }
    reports
}

/// How far a site's measurement has progressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WireState {
    Open,
    Carved,
    Measured,
}

/// A site's spider and the boundary vertex of its time leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SiteWire {
    pub spider: VertexId,
    pub leg: VertexId,
    pub state: WireState,
}

/// A cluster diagram being measured, with the vertex bookkeeping of every
/// lattice site.
#[derive(Debug, Clone)]
pub struct Process {
    diagram: Diagram,
    wires: BTreeMap<SiteCoordinate, SiteWire>,
}

impl Process {
    /// Starts from an unmeasured lattice build.
    pub fn new(build: &ClusterBuild) -> Result<Process, MeasurementError> {
        if build.coordinates.is_empty() {
            return Err(MeasurementError::NoCoordinates);
        }
        let wires = build
            .coordinates
            .iter()
            .enumerate()
            .map(|(q, &s)| (s, SiteWire { spider: build.spiders[q], leg: build.legs[q], state: WireState::Open }))
            .collect();
        Ok(Process { diagram: build.diagram.clone(), wires })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn into_diagram(self) -> Diagram {
        self.diagram
    }

    pub fn wire(&self, s: SiteCoordinate) -> Option<SiteWire> {
        self.wires.get(&s).copied()
    }

    /// Sites whose time leg is still open, in `(z, y, x)` order.
    pub fn open_sites(&self) -> Vec<SiteCoordinate> {
        let mut out: Vec<SiteCoordinate> =
            self.wires.iter().filter(|(_, w)| w.state == WireState::Open).map(|(&s, _)| s).collect();
        out.sort_by_key(|s| (s.z, s.y, s.x));
        out
    }

    fn open_wire(&self, s: SiteCoordinate) -> Result<SiteWire, MeasurementError> {
        let w = self.wire(s).ok_or(MeasurementError::UnknownSite(s))?;
        if w.state != WireState::Open {
            return Err(MeasurementError::AlreadyMeasured(s));
        }
        Ok(w)
    }

    /// Turns the boundary `leg` into a one-legged spider of `kind`.
    fn close_leg(&mut self, leg: VertexId, kind: VertexKind) {
        let inputs: Vec<VertexId> = self.diagram.inputs().iter().copied().filter(|&b| b != leg).collect();
        let outputs: Vec<VertexId> = self.diagram.outputs().iter().copied().filter(|&b| b != leg).collect();
        self.diagram.set_boundaries(inputs, outputs);
        self.diagram.set_kind(leg, kind);
    }

    fn rewrite(&mut self, rule: RuleId, anchors: Vec<VertexId>) {
        apply_mut(&mut self.diagram, &Match::new(rule, anchors)).expect("measurement rewrites apply by construction");
    }

    fn sole_neighbour(&self, v: VertexId) -> VertexId {
        self.diagram.neighbours(v)[0]
    }

    /// Measures `site` in Z: a red effect on the leg, copied through the
    /// site spider, with every copy fused into its neighbour.
    fn carve_site(&mut self, site: SiteCoordinate, outcome: Outcome) -> Result<(), MeasurementError> {
        let w = self.open_wire(site)?;
        self.close_leg(w.leg, VertexKind::X(outcome.phase()));
        let effect = w.leg;
        let mut inner = self.sole_neighbour(effect);
        if self.diagram.kind(inner) == Some(VertexKind::H) {
            self.rewrite(RuleId::ColorChange, vec![effect]);
            inner = self.sole_neighbour(effect);
        }
        debug_assert_eq!(inner, w.spider, "defect legs carry no operators");
        let effect_colour = self.diagram.kind(effect).and_then(VertexKind::colour).expect("effect");
        if self.diagram.kind(w.spider).and_then(VertexKind::colour) == Some(effect_colour) {
            // A site of the effect's own colour simply absorbs it.
            self.rewrite(RuleId::SpiderFuse, vec![w.spider, effect]);
        } else {
            let before: BTreeSet<VertexId> = self.diagram.vertex_ids().collect();
            self.rewrite(RuleId::StateCopy, vec![effect, w.spider]);
            let copies: Vec<VertexId> = self.diagram.vertex_ids().filter(|v| !before.contains(v)).collect();
            for c in copies {
                let n = self.sole_neighbour(c);
                if self.diagram.kind(n).and_then(VertexKind::colour) == Some(effect_colour) {
                    self.rewrite(RuleId::SpiderFuse, vec![n, c]);
                }
            }
        }
        self.wires.get_mut(&site).expect("known site").state = WireState::Carved;
        Ok(())
    }

    /// Measures `site` in X: a green effect on the leg, fused with any
    /// operators on the leg and then into the site spider.
    fn measure_site(&mut self, site: SiteCoordinate, outcome: Outcome) -> Result<(), MeasurementError> {
        let w = self.open_wire(site)?;
        self.close_leg(w.leg, VertexKind::Z(outcome.phase()));
        let effect = w.leg;
        loop {
            let inner = self.sole_neighbour(effect);
            let kind = self.diagram.kind(inner).expect("neighbour exists");
            let effect_colour = self.diagram.kind(effect).and_then(VertexKind::colour).expect("effect");
            if kind == VertexKind::H {
                self.rewrite(RuleId::ColorChange, vec![effect]);
            } else if kind.colour() == Some(effect_colour) {
                if inner == w.spider {
                    self.rewrite(RuleId::SpiderFuse, vec![w.spider, effect]);
                    break;
                }
                self.rewrite(RuleId::SpiderFuse, vec![effect, inner]);
            } else {
                // An opposite-colour operator on the leg: leave the rest to
                // the normaliser.
                break;
            }
        }
        self.wires.get_mut(&site).expect("known site").state = WireState::Measured;
        Ok(())
    }

    /// Makes open legs of the first z-layer the inputs and all other open
    /// legs the outputs.
    fn assign_boundaries(&mut self) {
        let zmin = self.wires.keys().map(|s| s.z).min();
        let open = self.open_sites();
        let (first, rest): (Vec<SiteCoordinate>, Vec<SiteCoordinate>) =
            open.into_iter().partition(|s| Some(s.z) == zmin);
        let legs = |sites: Vec<SiteCoordinate>| sites.into_iter().map(|s| self.wires[&s].leg).collect();
        let (inputs, outputs) = (legs(first), legs(rest));
        self.diagram.set_boundaries(inputs, outputs);
    }

    /// Moves π phases along chains of two-legged spiders until they meet a
    /// partner of the same colour, where the two cancel.
    fn transport_pi(&mut self) {
        while let Some(path) = self.find_pi_pair() {
            for pair in path.windows(3).step_by(2) {
                let (p, via, next) = (pair[0], pair[1], pair[2]);
                let before: BTreeSet<VertexId> = self.diagram.vertex_ids().collect();
                self.rewrite(RuleId::PiCopy, vec![p, via]);
                let pushed = self
                    .diagram
                    .vertex_ids()
                    .find(|v| !before.contains(v))
                    .expect("π-copy through a two-legged spider creates one π");
                self.rewrite(RuleId::SpiderFuse, vec![next, pushed]);
            }
        }
    }

    /// A shortest alternating chain `p, g, r, g, …, q` of two-legged spiders
    /// joined by plain edges, where `p` and `q` are distinct same-colour π
    /// spiders.
    fn find_pi_pair(&self) -> Option<Vec<VertexId>> {
        let d = &self.diagram;
        let two_legged = |v: VertexId| d.kind(v).is_some_and(VertexKind::is_spider) && d.degree(v) == 2 && d.self_loops(v) == 0;
        let is_pi = |v: VertexId| d.kind(v).and_then(VertexKind::phase).is_some_and(Phase::is_pi);
        let is_zero = |v: VertexId| d.kind(v).and_then(VertexKind::phase).is_some_and(Phase::is_zero);
        let colour = |v: VertexId| d.kind(v).and_then(VertexKind::colour);
        for start in d.vertex_ids().filter(|&v| two_legged(v) && is_pi(v)) {
            let c = colour(start);
            let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
            let mut queue = VecDeque::from([start]);
            parent.insert(start, start);
            while let Some(v) = queue.pop_front() {
                for &n in d.neighbours(v) {
                    if parent.contains_key(&n) || !two_legged(n) || colour(n) == colour(v) {
                        continue;
                    }
                    if d.multiplicity(v, n) != 1 {
                        continue;
                    }
                    let same = colour(n) == c;
                    if same && !is_pi(n) && !is_zero(n) {
                        continue;
                    }
                    parent.insert(n, v);
                    if same && is_pi(n) {
                        let mut path = vec![n];
                        let mut cur = n;
                        while cur != start {
                            cur = parent[&cur];
                            path.push(cur);
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(n);
                }
            }
        }
        None
    }
}

/// Splices a green π next to the boundary of every listed site's time leg.
pub fn insert_logical_operators(
    process: &Process,
    ops: &[LogicalOperatorSpec],
) -> Result<Process, MeasurementError> {
    let mut out = process.clone();
    for (i, op) in ops.iter().enumerate() {
        if op.sites.is_empty() {
            return Err(MeasurementError::EmptyOperator(i));
        }
        for &site in &op.sites {
            let w = out.open_wire(site)?;
            let inner = out.sole_neighbour(w.leg);
            out.diagram.subdivide(inner, w.leg, VertexKind::Z(Phase::PI));
        }
    }
    Ok(out)
}

/// Measures every Z-basis site of `pattern` out of the process.
pub fn carve_defects(process: &Process, pattern: &MeasurementPattern) -> Result<Process, MeasurementError> {
    let mut out = process.clone();
    for site in pattern.sites_in(Basis::Z) {
        let outcome = pattern.outcome(site).ok_or(MeasurementError::MissingOutcome(site))?;
        out.carve_site(site, outcome)?;
    }
    Ok(out)
}

/// Measures every X-basis site of `pattern`, fixes the process boundaries
/// and cancels π pairs.  Defect sites must already be carved.
pub fn measure_bulk_x(process: &Process, pattern: &MeasurementPattern) -> Result<Process, MeasurementError> {
    let mut out = process.clone();
    for site in pattern.sites_in(Basis::Z) {
        if out.wire(site).is_some_and(|w| w.state == WireState::Open) {
            return Err(MeasurementError::UncarvedDefect(site));
        }
    }
    for site in pattern.sites_in(Basis::X) {
        let outcome = pattern.outcome(site).ok_or(MeasurementError::MissingOutcome(site))?;
        out.measure_site(site, outcome)?;
    }
    out.assign_boundaries();
    out.transport_pi();
    Ok(out)
}

/// Normalises a measured process down to its logical lines.
pub fn extract_logical(d: &Diagram, policy: &Policy) -> Result<(Diagram, Trace), NormalizeError> {
    normalize(d, policy)
}

/// Follows boundary `b` through two-legged vertices to its anchor spider,
/// returning the anchor and whether the path crossed an odd number of
/// Hadamards.  Wires ending on another boundary have no anchor.
fn anchor_of(d: &Diagram, b: VertexId) -> Option<(VertexId, bool)> {
    let mut prev = b;
    let mut cur = d.neighbours(b)[0];
    let mut odd = false;
    for _ in 0..d.vertex_count() {
        match d.kind(cur)? {
            VertexKind::B => return None,
            VertexKind::H => odd = !odd,
            _ if d.degree(cur) != 2 || d.self_loops(cur) > 0 => return Some((cur, odd)),
            _ => {}
        }
        let ns = d.neighbours(cur);
        let next = if ns[0] == prev { ns[1] } else { ns[0] };
        prev = cur;
        cur = next;
    }
    None
}

/// Merges boundary legs that lead to the same anchor spider through an
/// encoder spider (see the module documentation).  Groups keep the position
/// of their first member.
pub fn group_boundaries(d: &Diagram) -> Diagram {
    let auto = |list: &[VertexId]| {
        let mut groups: Vec<(Option<VertexId>, Vec<usize>)> = Vec::new();
        for (i, &b) in list.iter().enumerate() {
            match anchor_of(d, b).map(|(a, _)| a) {
                Some(a) => match groups.iter_mut().find(|(k, _)| *k == Some(a)) {
                    Some((_, members)) => members.push(i),
                    None => groups.push((Some(a), vec![i])),
                },
                None => groups.push((None, vec![i])),
            }
        }
        groups.into_iter().map(|(_, m)| m).collect::<Vec<_>>()
    };
    let (ins, outs) = (auto(d.inputs()), auto(d.outputs()));
    group_legs(d, &ins, &outs).expect("automatic groups partition the boundaries")
}

/// Merges explicitly grouped boundary legs, given as index lists into the
/// inputs and outputs.  Each group becomes one boundary joined to an encoder
/// spider of the colour of its first member's anchor (green when the leg
/// runs straight to another boundary); the groups must partition each side.
pub fn group_legs(
    d: &Diagram,
    input_groups: &[Vec<usize>],
    output_groups: &[Vec<usize>],
) -> Result<Diagram, GroupingError> {
    let mut out = d.clone();
    let mut sides = Vec::with_capacity(2);
    for (list, groups) in [(d.inputs(), input_groups), (d.outputs(), output_groups)] {
        let mut seen = vec![false; list.len()];
        for &i in groups.iter().flatten() {
            if i >= list.len() || std::mem::replace(&mut seen[i], true) {
                return Err(GroupingError::NotAPartition);
            }
        }
        if seen.contains(&false) || groups.iter().any(Vec::is_empty) {
            return Err(GroupingError::NotAPartition);
        }
        let mut merged = Vec::with_capacity(groups.len());
        for group in groups {
            if let [only] = group[..] {
                merged.push(list[only]);
                continue;
            }
            let anchors: Vec<Option<(VertexId, bool)>> = group.iter().map(|&i| anchor_of(d, list[i])).collect();
            let colour = anchors[0]
                .and_then(|(a, _)| d.kind(a).and_then(VertexKind::colour))
                .unwrap_or(Colour::Green);
            let encoder = out.add_vertex(VertexKind::spider(colour, Phase::ZERO));
            let boundary = out.add_vertex(VertexKind::B);
            out.add_edge(boundary, encoder);
            for (&i, anchor) in group.iter().zip(anchors) {
                let b = list[i];
                let n = out.neighbours(b)[0];
                out.remove_vertex(b);
                if anchor.is_some_and(|(_, odd)| odd) {
                    let h = out.add_vertex(VertexKind::H);
                    out.add_edge(encoder, h);
                    out.add_edge(h, n);
                } else {
                    out.add_edge(encoder, n);
                }
            }
            merged.push(boundary);
        }
        sides.push(merged);
    }
    let outputs = sides.pop().expect("two sides");
    let inputs = sides.pop().expect("two sides");
    out.set_boundaries(inputs, outputs);
    debug_assert_eq!(out.validate(), Ok(()));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupingError {
    #[error("boundary groups must partition the inputs and the outputs")]
    NotAPartition,
}

/// The policy that only merges and straightens lines: spider fusion,
/// identity removal and self-loop removal.  It never recolours a spider or
/// moves a Hadamard, so the colours of the logical lines stay those of the
/// lattice sites they came from.
pub fn line_policy(budget: usize) -> Policy {
    Policy::with_priority(vec![RuleId::SpiderFuse, RuleId::IdentityRemove, RuleId::SelfLoopRemove]).budget(budget)
}

/// The logical process: lines are fused under [`line_policy`], boundary
/// legs grouped per logical qubit by [`group_boundaries`], and the result
/// normalised under `policy`.
///
/// Grouping before any colour change matters: the encoder takes the colour
/// of the line, which fixes the logical basis.  A line of red sites reads a
/// green π as its Z and a red π as its X; for a green line the roles swap.
pub fn regroup(d: &Diagram, policy: &Policy) -> Result<Diagram, NormalizeError> {
    let (lines, _) = normalize(d, &line_policy(policy.budget))?;
    Ok(normalize(&group_boundaries(&lines), policy)?.0)
}

/// A pattern file: lattice, defects, logical operators and outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFile {
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub defects: Vec<DefectStrand>,
    #[serde(default)]
    pub pairs: Vec<[usize; 2]>,
    #[serde(default)]
    pub logical_ops: Vec<LogicalOperatorSpec>,
    #[serde(default)]
    pub outcomes: OutcomeSource,
}

impl PatternFile {
    pub fn from_json(text: &str) -> Result<PatternFile, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pattern files serialise")
    }

    pub fn defect_spec(&self) -> DefectSpec {
        DefectSpec { strands: self.defects.clone(), pairs: self.pairs.clone() }
    }
}

/// Knobs for [`compile_pattern`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileOptions {
    pub site_cap: usize,
    pub policy: Policy,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { site_cap: DEFAULT_SITE_CAP, policy: Policy::default() }
    }
}

#[derive(Debug, Clone, Error)]
pub enum CompileError {
    #[error(transparent)]
    Pattern(#[from] MeasurementError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

/// Everything the compile pipeline produces.
#[derive(Debug, Clone)]
pub struct Compilation {
    pub build: ClusterBuild,
    pub pattern: MeasurementPattern,
    /// The measured process before normalisation.
    pub measured: Diagram,
    /// Its normal form.
    pub normal: Diagram,
    pub trace: Trace,
    /// The logical process (see [`regroup`]).
    pub logical: Diagram,
    pub parity_violations: Vec<CellReport>,
}

/// Build → insert operators → carve → measure → extract → regroup.
pub fn compile_pattern(file: &PatternFile, options: &CompileOptions) -> Result<Compilation, CompileError> {
    let build = build_lattice(&file.lattice, options.site_cap).map_err(MeasurementError::from)?;
    let defects = file.defect_spec();
    let pattern = MeasurementPattern::for_build(&build, &defects, &file.outcomes)?;
    for op in &file.logical_ops {
        for &s in &op.sites {
            if pattern.basis_of(s) == Some(Basis::Z) {
                return Err(MeasurementError::OperatorOnDefect(s).into());
            }
        }
    }
    let process = Process::new(&build)?;
    let process = insert_logical_operators(&process, &file.logical_ops)?;
    let process = carve_defects(&process, &pattern)?;
    let process = measure_bulk_x(&process, &pattern)?;
    let parity_violations = parity_check(&build, &pattern);
    let measured = process.into_diagram();
    let (normal, trace) = extract_logical(&measured, &options.policy)?;
    let logical = regroup(&measured, &options.policy)?;
    Ok(Compilation { build, pattern, measured, normal, trace, logical, parity_violations })
}

