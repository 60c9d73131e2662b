//! The rewrite rules, a matcher, a single-step applier and a deterministic
//! normaliser that records an auditable trace.
//!
//! The rule set deliberately has no bialgebra or Hopf rule: [`RuleId`] has no
//! variant for them, so no strategy can ever apply one.
//!
//! # Normalisation
//!
//! Every applied step strictly decreases the lexicographic measure
//! `(heavy, vertices, edges)` where `heavy` counts Hadamard boxes plus spiders
//! of degree ≥ 2 (see [`measure`]).  Rules fall into two groups:
//!
//! * *direct* instances decrease the measure on their own: spider fusion,
//!   identity removal, H–H cancellation, self-loop removal, state copying and
//!   the "absorbing" colour changes (those that remove more Hadamards than
//!   they insert);
//! * *look-ahead* instances — π-copying and Hadamard-neutral colour changes —
//!   never shrink the diagram by themselves but may enable direct steps.  One
//!   is committed only when it, followed by the direct closure, yields a
//!   strictly smaller measure than before.  A neutral colour change of a
//!   two-legged π spider (which moves the π across a Hadamard) may be
//!   followed by one π-copy of that spider before the comparison.
//!
//! Matches are tried in the policy's rule-priority order and, within one
//! rule, in canonical-label order, so the result is independent of vertex ids
//! and reproducible bit for bit.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical_form, CanonicalForm};
use crate::diagram::{Colour, Diagram, VertexId, VertexKind};
use crate::phase::Phase;

/// The rules of the calculus available to the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    /// Two same-colour spiders joined by an edge merge; phases add.
    #[serde(rename = "spider-fuse")]
    SpiderFuse,
    /// A phase-free two-legged spider is a plain wire.
    #[serde(rename = "identity-remove")]
    IdentityRemove,
    /// Two adjacent Hadamard boxes cancel.
    #[serde(rename = "hh-cancel")]
    HHCancel,
    /// A spider changes colour while a Hadamard is toggled on every leg.
    #[serde(rename = "color-change")]
    ColorChange,
    /// A one-legged 0/π spider is copied through an opposite-colour spider.
    #[serde(rename = "state-copy")]
    StateCopy,
    /// A two-legged π spider is pushed through an opposite-colour spider.
    #[serde(rename = "pi-copy")]
    PiCopy,
    /// A plain self-loop on a spider is deleted.
    #[serde(rename = "self-loop-remove")]
    SelfLoopRemove,
}

impl RuleId {
    pub const ALL: [RuleId; 7] = [
        RuleId::SpiderFuse,
        RuleId::IdentityRemove,
        RuleId::HHCancel,
        RuleId::ColorChange,
        RuleId::StateCopy,
        RuleId::PiCopy,
        RuleId::SelfLoopRemove,
    ];

    /// Kebab-case name used in traces and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            RuleId::SpiderFuse => "spider-fuse",
            RuleId::IdentityRemove => "identity-remove",
            RuleId::HHCancel => "hh-cancel",
            RuleId::ColorChange => "color-change",
            RuleId::StateCopy => "state-copy",
            RuleId::PiCopy => "pi-copy",
            RuleId::SelfLoopRemove => "self-loop-remove",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleId> {
        RuleId::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One occurrence of a rule's left-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Match {
    pub rule: RuleId,
    /// Rule-specific anchor vertices (see [`find_matches`]).
    pub anchors: Vec<VertexId>,
    /// The edges the rule consumes, for disambiguation in multigraphs.
    pub edges: Vec<(VertexId, VertexId)>,
}

impl Match {
    /// A match from a rule and anchors; edges are derived from the anchors.
    pub fn new(rule: RuleId, anchors: Vec<VertexId>) -> Match {
        let edges = if anchors.len() == 2 { vec![(anchors[0], anchors[1])] } else { Vec::new() };
        Match { rule, anchors, edges }
    }
}

/// A recorded rewrite step.  Anchors are canonical labels of the diagram
/// before the step, which makes traces independent of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub rule: RuleId,
    pub anchors: Vec<usize>,
    pub before: String,
    pub after: String,
}

/// An ordered list of rewrite steps with a contiguous hash chain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<RewriteStep>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// True if each step's `before` equals the previous step's `after`.
    pub fn is_contiguous(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].after == w[1].before)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialises")
    }

    pub fn from_json(text: &str) -> Result<Trace, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("{rule} does not match at anchors {anchors:?}")]
    StaleMatch { rule: RuleId, anchors: Vec<VertexId> },
}

#[derive(Debug, Clone, Error)]
pub enum NormalizeError {
    #[error("step budget of {budget} exceeded after {} steps", trace.len())]
    BudgetExceeded { budget: usize, diagram: Box<Diagram>, trace: Trace },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {step}: expected diagram hash {expected}, found {found}")]
    HashMismatch { step: usize, expected: String, found: String },
    #[error("step {step}: anchor label {label} out of range")]
    BadAnchor { step: usize, label: usize },
    #[error("step {step}: {source}")]
    Rewrite { step: usize, source: RewriteError },
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

fn spider(d: &Diagram, v: VertexId) -> Option<(Colour, Phase)> {
    let k = d.kind(v)?;
    Some((k.colour()?, k.phase()?))
}

fn is_h(d: &Diagram, v: VertexId) -> bool {
    d.kind(v) == Some(VertexKind::H)
}

/// Legs of `v` that [`RuleId::ColorChange`] toggles, split into those that
/// currently carry a Hadamard (which would be absorbed) and those that do not.
/// Self-loops and Hadamard loops are unaffected by a colour change.
fn colour_change_legs(d: &Diagram, v: VertexId) -> (Vec<VertexId>, Vec<VertexId>) {
    let mut with_h = Vec::new();
    let mut plain = Vec::new();
    for n in d.other_neighbours(v) {
        if is_h(d, n) {
            if d.neighbours(n).iter().all(|&x| x == v) {
                continue; // Hadamard loop on v.
            }
            with_h.push(n);
        } else {
            plain.push(n);
        }
    }
    (with_h, plain)
}

/// Checks whether `m` is a valid occurrence of its rule in `d`.
pub fn matches_at(d: &Diagram, m: &Match) -> bool {
    let a = &m.anchors;
    match (m.rule, a.as_slice()) {
        (RuleId::SpiderFuse, &[x, y]) => {
            x != y
                && matches!((spider(d, x), spider(d, y)), (Some((cx, _)), Some((cy, _))) if cx == cy)
                && d.multiplicity(x, y) >= 1
        }
        (RuleId::IdentityRemove, &[v]) => {
            matches!(spider(d, v), Some((_, p)) if p.is_zero()) && d.degree(v) == 2 && d.self_loops(v) == 0
        }
        (RuleId::HHCancel, &[x, y]) => x != y && is_h(d, x) && is_h(d, y) && d.multiplicity(x, y) >= 1,
        (RuleId::ColorChange, &[v]) => spider(d, v).is_some(),
        (RuleId::StateCopy, &[s, v]) => {
            let (Some((cs, ps)), Some((cv, _))) = (spider(d, s), spider(d, v)) else { return false };
            cs != cv
                && ps.is_pauli()
                && d.degree(s) == 1
                && d.neighbours(s)[0] == v
                && d.self_loops(v) == 0
        }
        (RuleId::PiCopy, &[p, v]) => {
            let (Some((cp, pp)), Some((cv, _))) = (spider(d, p), spider(d, v)) else { return false };
            cp != cv
                && pp.is_pi()
                && d.degree(p) == 2
                && d.self_loops(p) == 0
                && d.multiplicity(p, v) == 1
                && d.self_loops(v) == 0
        }
        (RuleId::SelfLoopRemove, &[v]) => spider(d, v).is_some() && d.self_loops(v) >= 1,
        _ => false,
    }
}

/// All matches of `rule` in `d`, ordered by canonical labels of the anchors.
pub fn find_matches(d: &Diagram, rule: RuleId) -> Vec<Match> {
    let form = canonical_form(d);
    find_matches_ordered(d, rule, &form)
}

fn find_matches_ordered(d: &Diagram, rule: RuleId, form: &CanonicalForm) -> Vec<Match> {
    let label = |v: VertexId| form.labels[&v];
    let mut out: Vec<(Vec<usize>, Match)> = Vec::new();
    let mut push = |anchors: Vec<VertexId>| {
        let key = anchors.iter().map(|&v| label(v)).collect();
        out.push((key, Match::new(rule, anchors)));
    };
    for (v, kind) in d.vertices() {
        match rule {
            RuleId::SpiderFuse => {
                if let Some(c) = kind.colour() {
                    let mut seen = Vec::new();
                    for n in d.other_neighbours(v) {
                        if d.kind(n).and_then(VertexKind::colour) == Some(c)
                            && label(v) < label(n)
                            && !seen.contains(&n)
                        {
                            seen.push(n);
                            push(vec![v, n]);
                        }
                    }
                }
            }
            RuleId::HHCancel => {
                if kind == VertexKind::H {
                    let mut seen = Vec::new();
                    for n in d.other_neighbours(v) {
                        if is_h(d, n) && label(v) < label(n) && !seen.contains(&n) {
                            seen.push(n);
                            push(vec![v, n]);
                        }
                    }
                }
            }
            RuleId::StateCopy | RuleId::PiCopy => {
                if kind.is_spider() {
                    let mut seen = Vec::new();
                    for n in d.other_neighbours(v) {
                        if !seen.contains(&n) {
                            seen.push(n);
                            let m = Match::new(rule, vec![v, n]);
                            if matches_at(d, &m) {
                                push(vec![v, n]);
                            }
                        }
                    }
                }
            }
            RuleId::IdentityRemove | RuleId::ColorChange | RuleId::SelfLoopRemove => {
                if matches_at(d, &Match::new(rule, vec![v])) {
                    push(vec![v]);
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, m)| m).collect()
}

// ---------------------------------------------------------------------------
// Application
// ---------------------------------------------------------------------------

/// Applies one rule instance, returning the rewritten diagram.
///
/// * `SpiderFuse [a, b]` — `b` merges into `a`; phases add; any further
///   parallel `a`–`b` edges become self-loops on the merged spider.
/// * `IdentityRemove [v]` — `v` is deleted and its two neighbours joined.
/// * `HHCancel [h1, h2]` — both boxes are deleted and the outer wires joined.
/// * `ColorChange [v]` — `v` flips colour; a Hadamard is toggled on every leg
///   (an adjacent box is absorbed, a plain leg gains a box).  Self-loops and
///   Hadamard loops are invariant under the change and are left alone.
/// * `StateCopy [s, v]` — `v` is deleted together with the state `s`; every
///   other leg of `v` receives a copy of `s` (phase `0` or `π`).  The phase
///   of `v` only contributes a scalar.
/// * `PiCopy [p, v]` — the π of `p` is pushed through `v`: `p` keeps its place
///   as a phase-free wire, `v`'s phase is negated and every other leg of `v`
///   receives a fresh π spider of `p`'s colour.
/// * `SelfLoopRemove [v]` — one plain self-loop on `v` is deleted.
pub fn apply(d: &Diagram, m: &Match) -> Result<Diagram, RewriteError> {
    if !matches_at(d, m) {
        return Err(RewriteError::StaleMatch { rule: m.rule, anchors: m.anchors.clone() });
    }
    let mut out = d.clone();
    apply_in_place(&mut out, m);
    debug_assert_eq!(out.validate(), Ok(()), "rewrite {m:?} produced an invalid diagram");
    Ok(out)
}

/// [`apply`] on a diagram the caller owns, without cloning it.
pub(crate) fn apply_mut(d: &mut Diagram, m: &Match) -> Result<(), RewriteError> {
    if !matches_at(d, m) {
        return Err(RewriteError::StaleMatch { rule: m.rule, anchors: m.anchors.clone() });
    }
    apply_in_place(d, m);
    debug_assert_eq!(d.validate(), Ok(()), "rewrite {m:?} produced an invalid diagram");
    Ok(())
}

fn apply_in_place(d: &mut Diagram, m: &Match) {
    let a = &m.anchors;
    match m.rule {
        RuleId::SpiderFuse => {
            let (x, y) = (a[0], a[1]);
            let (c, px) = spider(d, x).expect("spider");
            let (_, py) = spider(d, y).expect("spider");
            let links = d.multiplicity(x, y);
            let y_loops = d.self_loops(y);
            let others: Vec<VertexId> = d.other_neighbours(y).filter(|&n| n != x).collect();
            d.remove_vertex(y);
            for n in others {
                d.add_edge(x, n);
            }
            for _ in 0..(links - 1) + y_loops {
                d.add_edge(x, x);
            }
            d.set_kind(x, VertexKind::spider(c, px + py));
        }
        RuleId::IdentityRemove => d.splice_out(a[0]),
        RuleId::HHCancel => {
            let (h1, h2) = (a[0], a[1]);
            let outer = |d: &Diagram, h: VertexId, other: VertexId| {
                let mut ns = d.neighbours(h).to_vec();
                let pos = ns.iter().position(|&n| n == other).expect("adjacent");
                ns.remove(pos);
                ns[0]
            };
            let n1 = outer(d, h1, h2);
            let n2 = outer(d, h2, h1);
            d.remove_vertex(h1);
            d.remove_vertex(h2);
            // A closed H–H loop disappears entirely.
            if n1 != h2 && n2 != h1 {
                d.add_edge(n1, n2);
            }
        }
        RuleId::ColorChange => {
            let v = a[0];
            let (c, p) = spider(d, v).expect("spider");
            let (with_h, plain) = colour_change_legs(d, v);
            for h in with_h {
                // After an earlier absorption on a `v–H–H–v` loop both legs of
                // `h` may end on `v`; the far end is then `v` itself.
                let mut ends = d.neighbours(h).to_vec();
                let pos = ends.iter().position(|&n| n == v).expect("adjacent");
                ends.remove(pos);
                let far = ends[0];
                d.remove_vertex(h);
                d.add_edge(v, far);
            }
            for n in plain {
                d.subdivide(v, n, VertexKind::H);
            }
            d.set_kind(v, VertexKind::spider(c.flipped(), p));
        }
        RuleId::StateCopy => {
            let (s, v) = (a[0], a[1]);
            let kind = d.kind(s).expect("state exists");
            let others: Vec<VertexId> = d.other_neighbours(v).filter(|&n| n != s).collect();
            d.remove_vertex(s);
            d.remove_vertex(v);
            for n in others {
                let copy = d.add_vertex(kind);
                d.add_edge(copy, n);
            }
        }
        RuleId::PiCopy => {
            let (p, v) = (a[0], a[1]);
            let (cp, _) = spider(d, p).expect("spider");
            let (cv, pv) = spider(d, v).expect("spider");
            let others: Vec<VertexId> = {
                let mut ns: Vec<VertexId> = d.other_neighbours(v).collect();
                let pos = ns.iter().position(|&n| n == p).expect("adjacent");
                ns.remove(pos);
                ns
            };
            for n in others {
                d.subdivide(v, n, VertexKind::spider(cp, Phase::PI));
            }
            d.set_kind(p, VertexKind::spider(cp, Phase::ZERO));
            d.set_kind(v, VertexKind::spider(cv, -pv));
        }
        RuleId::SelfLoopRemove => {
            let removed = d.remove_edge(a[0], a[0]);
            debug_assert!(removed);
        }
    }
}

// ---------------------------------------------------------------------------
// Normalisation
// ---------------------------------------------------------------------------

/// The termination measure `(heavy, vertices, edges)`; `heavy` counts
/// Hadamard boxes plus spiders with at least two legs.
pub fn measure(d: &Diagram) -> (usize, usize, usize) {
    let heavy = d
        .vertices()
        .filter(|&(v, k)| k == VertexKind::H || (k.is_spider() && d.degree(v) >= 2))
        .count();
    (heavy, d.vertex_count(), d.edge_count())
}

/// Whether a match decreases [`measure`] on its own.
fn is_direct(d: &Diagram, m: &Match) -> bool {
    match m.rule {
        RuleId::PiCopy => false,
        RuleId::ColorChange => {
            let (with_h, plain) = colour_change_legs(d, m.anchors[0]);
            with_h.len() > plain.len()
        }
        _ => true,
    }
}

/// Whether a non-direct match is worth trying as a look-ahead step.
fn is_lookahead_candidate(d: &Diagram, m: &Match) -> bool {
    match m.rule {
        RuleId::PiCopy => true,
        RuleId::ColorChange => {
            let (with_h, plain) = colour_change_legs(d, m.anchors[0]);
            !with_h.is_empty() && with_h.len() == plain.len()
        }
        _ => false,
    }
}

/// A rewriting strategy: rule priority and step budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub priority: Vec<RuleId>,
    pub budget: usize,
}

/// Default step budget.
pub const DEFAULT_BUDGET: usize = 1_000_000;

impl Policy {
    /// The default size-reducing strategy.
    pub fn shrink() -> Policy {
        Policy {
            priority: vec![
                RuleId::HHCancel,
                RuleId::SelfLoopRemove,
                RuleId::StateCopy,
                RuleId::PiCopy,
                RuleId::SpiderFuse,
                RuleId::IdentityRemove,
                RuleId::ColorChange,
            ],
            budget: DEFAULT_BUDGET,
        }
    }

    /// A strategy with a custom rule priority (rules left out are never used).
    pub fn with_priority(priority: Vec<RuleId>) -> Policy {
        Policy { priority, budget: DEFAULT_BUDGET }
    }

    pub fn budget(mut self, budget: usize) -> Policy {
        self.budget = budget;
        self
    }
}

impl Default for Policy {
    fn default() -> Self {
        Policy::shrink()
    }
}

/// A diagram being rewritten, with its canonical form and trace.
#[derive(Debug, Clone)]
pub struct Session {
    diagram: Diagram,
    form: CanonicalForm,
    hash: String,
    trace: Trace,
}

impl Session {
    pub fn new(d: Diagram) -> Session {
        let form = canonical_form(&d);
        let hash = form.hash();
        Session { diagram: d, form, hash, trace: Trace::default() }
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    /// Canonical hash of the current diagram.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn into_parts(self) -> (Diagram, Trace) {
        (self.diagram, self.trace)
    }

    /// All matches of `rule` on the current diagram in canonical order.
    pub fn matches(&self, rule: RuleId) -> Vec<Match> {
        find_matches_ordered(&self.diagram, rule, &self.form)
    }

    /// Applies `m` and records the step.
    pub fn apply(&mut self, m: &Match) -> Result<(), RewriteError> {
        let next = apply(&self.diagram, m)?;
        let anchors = m.anchors.iter().map(|v| self.form.labels[v]).collect();
        let form = canonical_form(&next);
        let hash = form.hash();
        self.trace.steps.push(RewriteStep {
            rule: m.rule,
            anchors,
            before: std::mem::replace(&mut self.hash, hash.clone()),
            after: hash,
        });
        self.diagram = next;
        self.form = form;
        Ok(())
    }

    /// First direct match under `priority`, if any.
    fn first_direct(&self, priority: &[RuleId]) -> Option<Match> {
        priority.iter().find_map(|&rule| {
            self.matches(rule).into_iter().find(|m| is_direct(&self.diagram, m))
        })
    }

    /// Applies direct steps until none remains or the budget runs out.
    fn direct_closure(&mut self, priority: &[RuleId], budget: usize) -> Result<(), ()> {
        while let Some(m) = self.first_direct(priority) {
            if self.trace.len() >= budget {
                return Err(());
            }
            self.apply(&m).expect("fresh match applies");
        }
        Ok(())
    }

    /// The π-copy that continues a neutral colour change of a two-legged π
    /// spider, if the spider now touches an opposite-colour spider.
    fn follow_up(&self, first: &Match) -> Option<Match> {
        if first.rule != RuleId::ColorChange {
            return None;
        }
        let p = first.anchors[0];
        let (_, phase) = spider(&self.diagram, p)?;
        if !phase.is_pi() || self.diagram.degree(p) != 2 {
            return None;
        }
        self.matches(RuleId::PiCopy).into_iter().find(|m| m.anchors[0] == p)
    }

    /// Normalises under `policy`, continuing the current trace.
    pub fn normalize(&mut self, policy: &Policy) -> Result<(), NormalizeError> {
        let exceeded = |s: &Session| NormalizeError::BudgetExceeded {
            budget: policy.budget,
            diagram: Box::new(s.diagram.clone()),
            trace: s.trace.clone(),
        };
        'outer: loop {
            if self.direct_closure(&policy.priority, policy.budget).is_err() {
                return Err(exceeded(self));
            }
            let current = measure(&self.diagram);
            for &rule in &policy.priority {
                for m in self.matches(rule) {
                    if !is_lookahead_candidate(&self.diagram, &m) {
                        continue;
                    }
                    if self.trace.len() >= policy.budget {
                        return Err(exceeded(self));
                    }
                    let mut trial = self.clone();
                    trial.apply(&m).expect("fresh match applies");
                    let closed = trial.direct_closure(&policy.priority, policy.budget);
                    if measure(&trial.diagram) < current {
                        *self = trial;
                        if closed.is_err() {
                            return Err(exceeded(self));
                        }
                        continue 'outer;
                    }
                    if closed.is_err() {
                        continue;
                    }
                    // A π moved across a Hadamard by a neutral colour change
                    // may then be pushed through the spider it now touches.
                    if let Some(next) = trial.follow_up(&m) {
                        let mut second = trial;
                        second.apply(&next).expect("fresh match applies");
                        let closed = second.direct_closure(&policy.priority, policy.budget);
                        if measure(&second.diagram) < current {
                            *self = second;
                            if closed.is_err() {
                                return Err(exceeded(self));
                            }
                            continue 'outer;
                        }
                    }
                }
            }
            return Ok(());
        }
    }
}

/// Normalises `d` under `policy`.
pub fn normalize(d: &Diagram, policy: &Policy) -> Result<(Diagram, Trace), NormalizeError> {
    let mut s = Session::new(d.clone());
    s.normalize(policy)?;
    Ok(s.into_parts())
}

/// Re-applies a trace to `d`, checking the hash chain at every step.
pub fn replay(d: &Diagram, t: &Trace) -> Result<Diagram, ReplayError> {
    let mut s = Session::new(d.clone());
    for (i, step) in t.steps.iter().enumerate() {
        if s.hash != step.before {
            return Err(ReplayError::HashMismatch { step: i, expected: step.before.clone(), found: s.hash.clone() });
        }
        let mut anchors = Vec::with_capacity(step.anchors.len());
        for &label in &step.anchors {
            let v = *s.form.order.get(label).ok_or(ReplayError::BadAnchor { step: i, label })?;
            anchors.push(v);
        }
        s.apply(&Match::new(step.rule, anchors))
            .map_err(|source| ReplayError::Rewrite { step: i, source })?;
        if s.hash != step.after {
            return Err(ReplayError::HashMismatch { step: i, expected: step.after.clone(), found: s.hash.clone() });
        }
    }
    Ok(s.diagram)
}

/// Groups matches by rule for reporting.
pub fn all_matches(d: &Diagram) -> BTreeMap<RuleId, Vec<Match>> {
    let form = canonical_form(d);
    RuleId::ALL.into_iter().map(|r| (r, find_matches_ordered(d, r, &form))).collect()
}
