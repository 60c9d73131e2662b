//! Canonical labeling, hashing and isomorphism of diagrams.
//!
//! Two diagrams are isomorphic when a bijection of vertices preserves kinds,
//! phases, edge multiplicities and the boundary lists pointwise.  The
//! canonical labeling is computed per connected component by iterated colour
//! refinement (initial colours from kind, phase, boundary position and
//! degree), followed by an individualisation/refinement search over the
//! remaining ties.  The search keeps the lexicographically smallest
//! certificate; automorphisms found along the way (plus interchangeable
//! "twin" vertices) prune symmetric branches.  Component certificates are then
//! sorted, so the result does not depend on vertex ids.
//!
//! Spider colour is deliberately the *last* thing the labeling looks at:
//! refinement runs on colour-blind tags and the certificate lists the
//! colour-blind structure before the colours.  Swapping every colour of a
//! diagram therefore changes its labeling only where the colour-blind
//! structure has a symmetry that colour breaks, which keeps canonical-order
//! strategies (such as the normaliser's) colour-symmetric.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::diagram::{Diagram, VertexId, VertexKind, Violation};

/// A canonical ordering of a diagram's vertices together with the
/// certificate it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// `order[i]` is the vertex with canonical label `i`.
    pub order: Vec<VertexId>,
    /// Vertex → canonical label.
    pub labels: BTreeMap<VertexId, usize>,
    certificate: Vec<u64>,
}

impl CanonicalForm {
    /// The certificate: equal for two diagrams iff they are isomorphic.
    pub fn certificate(&self) -> &[u64] {
        &self.certificate
    }

    /// SHA-256 of the certificate as lowercase hex.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        for word in &self.certificate {
            hasher.update(word.to_le_bytes());
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Canonical hash of a valid diagram.
pub fn canonical_hash(d: &Diagram) -> Result<String, Violation> {
    d.validate()?;
    Ok(canonical_form(d).hash())
}

/// Returns an isomorphism `a → b` when one exists.
pub fn isomorphic(a: &Diagram, b: &Diagram) -> Option<BTreeMap<VertexId, VertexId>> {
    if a.vertex_count() != b.vertex_count()
        || a.edge_count() != b.edge_count()
        || a.signature() != b.signature()
    {
        return None;
    }
    let ca = canonical_form(a);
    let cb = canonical_form(b);
    (ca.certificate == cb.certificate)
        .then(|| ca.order.iter().copied().zip(cb.order.iter().copied()).collect())
}

/// Computes the canonical form of `d` (which need not be validated).
pub fn canonical_form(d: &Diagram) -> CanonicalForm {
    let ids: Vec<VertexId> = d.vertex_ids().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| {
            let mut ns: Vec<usize> = d.neighbours(v).iter().map(|n| index[n]).collect();
            ns.sort_unstable();
            ns
        })
        .collect();
    let tags: Vec<Tag> = ids.iter().map(|&v| vertex_tag(d, v)).collect();
    let hues: Vec<u64> = ids.iter().map(|&v| hue(d, v)).collect();
    let g = Graph { adj: &adj, tags: &tags, hues: &hues };

    let mut components: Vec<(Vec<u64>, Vec<usize>)> = connected_components(&adj)
        .into_iter()
        .map(|comp| canonical_component(&g, &comp))
        .collect();
    components.sort();

    let order_idx: Vec<usize> = components.into_iter().flat_map(|(_, order)| order).collect();
    let certificate = certificate_of(&g, &order_idx);
    let order: Vec<VertexId> = order_idx.iter().map(|&i| ids[i]).collect();
    let labels = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    CanonicalForm { order, labels, certificate }
}

/// Colour-blind kind, phase, boundary role and position, degree.
type Tag = [u64; 6];

/// A diagram in index form: adjacency, colour-blind tags and spider colours.
struct Graph<'a> {
    adj: &'a [Vec<usize>],
    tags: &'a [Tag],
    hues: &'a [u64],
}

/// Spider colour: 0 green, 1 red, 2 for non-spiders.
fn hue(d: &Diagram, v: VertexId) -> u64 {
    match d.kind(v).expect("vertex exists") {
        VertexKind::Z(_) => 0,
        VertexKind::X(_) => 1,
        VertexKind::H | VertexKind::B => 2,
    }
}

fn vertex_tag(d: &Diagram, v: VertexId) -> Tag {
    let kind = d.kind(v).expect("vertex exists");
    let (code, num, den) = match kind {
        VertexKind::Z(p) | VertexKind::X(p) => (0, p.num() as u64, p.den() as u64),
        VertexKind::H => (2, 0, 0),
        VertexKind::B => (3, 0, 0),
    };
    let (role, pos) = if let Some(i) = d.inputs().iter().position(|&x| x == v) {
        (1, i as u64)
    } else if let Some(i) = d.outputs().iter().position(|&x| x == v) {
        (2, i as u64)
    } else {
        (0, 0)
    };
    [code, num, den, role, pos, d.degree(v) as u64]
}

fn connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Serialises the graph induced on `order` (given in global indices) under
/// the labeling `order[i] ↦ i`: colour-blind tags, then edges, then colours.
fn certificate_of(g: &Graph<'_>, order: &[usize]) -> Vec<u64> {
    let mut pos = BTreeMap::new();
    for (i, &v) in order.iter().enumerate() {
        pos.insert(v, i as u64);
    }
    let mut cert = Vec::with_capacity(2 + order.len() * 9);
    cert.push(order.len() as u64);
    for &v in order {
        cert.extend_from_slice(&g.tags[v]);
    }
    let adj = g.adj;
    let mut edges = Vec::new();
    for &v in order {
        let pv = pos[&v];
        for u in &adj[v] {
            let pu = pos[u];
            if pv <= pu {
                edges.push((pv, pu));
            }
        }
    }
    // Self-loops were listed twice (once per end); keep one entry per loop.
    edges.sort_unstable();
    let mut dedup = Vec::with_capacity(edges.len());
    let mut i = 0;
    while i < edges.len() {
        let e = edges[i];
        if e.0 == e.1 {
            let run = edges[i..].iter().take_while(|&&x| x == e).count();
            for _ in 0..run / 2 {
                dedup.push(e);
            }
            i += run;
        } else {
            dedup.push(e);
            i += 1;
        }
    }
    cert.push(dedup.len() as u64);
    for (a, b) in dedup {
        cert.push(a);
        cert.push(b);
    }
    cert.extend(order.iter().map(|&v| g.hues[v]));
    cert
}

/// Canonical certificate and vertex order (global indices) of one component.
fn canonical_component(g: &Graph<'_>, comp: &[usize]) -> (Vec<u64>, Vec<usize>) {
    // Local re-indexing.
    let local: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let ladj: Vec<Vec<usize>> = comp.iter().map(|v| g.adj[*v].iter().map(|u| local[u]).collect()).collect();
    let ltags: Vec<Tag> = comp.iter().map(|&v| g.tags[v]).collect();
    let lhues: Vec<u64> = comp.iter().map(|&v| g.hues[v]).collect();
    let lg = Graph { adj: &ladj, tags: &ltags, hues: &lhues };

    let mut distinct: Vec<Tag> = ltags.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let colours: Vec<u32> =
        ltags.iter().map(|t| distinct.binary_search(t).expect("tag present") as u32).collect();

    let mut search = Search { g: &lg, best: None, automorphisms: twin_transpositions(&lg) };
    let mut prefix = Vec::new();
    search.explore(colours, &mut prefix);
    let (cert, order) = search.best.expect("search visits at least one leaf");
    (cert, order.into_iter().map(|i| comp[i]).collect())
}

/// Transpositions of interchangeable vertices: same tag and colour and the
/// same neighbourhood once each is viewed from the other.
fn twin_transpositions(g: &Graph<'_>) -> Vec<Vec<usize>> {
    let adj = g.adj;
    let n = adj.len();
    let mut by_tag: BTreeMap<(Tag, u64), Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        by_tag.entry((g.tags[v], g.hues[v])).or_default().push(v);
    }
    let mut out = Vec::new();
    let swapped = |ns: &[usize], a: usize, b: usize| {
        let mut s: Vec<usize> = ns
            .iter()
            .map(|&x| if x == a { b } else if x == b { a } else { x })
            .collect();
        s.sort_unstable();
        s
    };
    for group in by_tag.values() {
        let mut linked = vec![false; group.len()];
        for i in 0..group.len() {
            if linked[i] {
                continue;
            }
            for j in i + 1..group.len() {
                if linked[j] {
                    continue;
                }
                let (a, b) = (group[i], group[j]);
                if adj[a].len() != adj[b].len() {
                    continue;
                }
                // The transposition (a b) is an automorphism iff it maps a's
                // neighbourhood onto b's (and, by symmetry of the edge
                // relation, every other vertex's neighbourhood onto itself).
                if swapped(&adj[a], a, b) == adj[b] {
                    let mut perm: Vec<usize> = (0..n).collect();
                    perm.swap(a, b);
                    out.push(perm);
                    linked[j] = true;
                }
            }
        }
    }
    out
}

struct Search<'a> {
    g: &'a Graph<'a>,
    best: Option<(Vec<u64>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn explore(&mut self, mut colours: Vec<u32>, prefix: &mut Vec<usize>) {
        refine(self.g.adj, &mut colours);
        let n = colours.len();
        let Some(cell) = first_nonsingleton_cell(&colours) else {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_unstable_by_key(|&v| colours[v]);
            self.leaf(order);
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&v| colours[v] == cell).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &w in &members {
            if !explored.is_empty() {
                let orbit = self.orbit_ids(prefix);
                if explored.iter().any(|&e| orbit[e] == orbit[w]) {
                    continue;
                }
            }
            let child: Vec<u32> = colours
                .iter()
                .enumerate()
                .map(|(v, &c)| 2 * c + u32::from(v != w && c == cell))
                .collect();
            prefix.push(w);
            self.explore(child, prefix);
            prefix.pop();
            explored.push(w);
        }
    }

    fn leaf(&mut self, order: Vec<usize>) {
        let cert = certificate_of(self.g, &order);
        match &self.best {
            None => self.best = Some((cert, order)),
            Some((best_cert, best_order)) => {
                if cert == *best_cert {
                    let mut perm = vec![0; order.len()];
                    for (i, &v) in order.iter().enumerate() {
                        perm[v] = best_order[i];
                    }
                    self.automorphisms.push(perm);
                } else if cert < *best_cert {
                    self.best = Some((cert, order));
                }
            }
        }
    }

    /// Orbit representative for each vertex under the known automorphisms
    /// that fix `prefix` pointwise.
    fn orbit_ids(&self, prefix: &[usize]) -> Vec<usize> {
        let n = self.g.adj.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for perm in &self.automorphisms {
            if prefix.iter().any(|&p| perm[p] != p) {
                continue;
            }
            for (v, &image) in perm.iter().enumerate() {
                let (a, b) = (find(&mut parent, v), find(&mut parent, image));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }
}

fn first_nonsingleton_cell(colours: &[u32]) -> Option<u32> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in colours {
        *counts.entry(c).or_default() += 1;
    }
    counts.into_iter().find(|&(_, k)| k > 1).map(|(c, _)| c)
}

/// Iterated neighbourhood refinement to an equitable partition.  Colours are
/// re-ranked densely in signature order, so the result depends only on the
/// input colouring and the graph structure.
fn refine(adj: &[Vec<usize>], colours: &mut [u32]) {
    let n = colours.len();
    let mut classes = {
        let mut c = colours.to_vec();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        let mut sigs: Vec<(u32, Vec<u32>, usize)> = (0..n)
            .map(|v| {
                let mut s: Vec<u32> = adj[v].iter().map(|&u| colours[u]).collect();
                s.sort_unstable();
                (colours[v], s, v)
            })
            .collect();
        sigs.sort_unstable_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut rank = 0u32;
        for i in 0..n {
            if i > 0 && (sigs[i].0, &sigs[i].1) != (sigs[i - 1].0, &sigs[i - 1].1) {
                rank += 1;
            }
            colours[sigs[i].2] = rank;
        }
        let new_classes = if n == 0 { 0 } else { rank as usize + 1 };
        if new_classes == classes {
            return;
        }
        classes = new_classes;
    }
}
