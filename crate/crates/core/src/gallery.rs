//! Hand-built diagrams of standard gates and of the logical structures that
//! arise in topological cluster-state computing.  They serve as references
//! for tests and as the seed of the gate library.

use crate::diagram::{Diagram, DiagramBuilder, VertexId};
use crate::lattice::SiteCoordinate;
use crate::phase::Phase;

/// CNOT: a green spider on the control wire joined to a red spider on the
/// target wire.  Inputs `[control, target]`, outputs likewise.
pub fn cnot() -> Diagram {
    let mut b = DiagramBuilder::new();
    let (ci, ti) = (b.input(), b.input());
    let (co, to) = (b.output(), b.output());
    let g = b.z(Phase::ZERO);
    let r = b.x(Phase::ZERO);
    b.path(&[ci, g, co]).path(&[ti, r, to]).edge(g, r);
    b.build().expect("valid")
}

/// CZ in normal form: two green spiders joined through one Hadamard.
pub fn cz() -> Diagram {
    let mut b = DiagramBuilder::new();
    let (ai, bi) = (b.input(), b.input());
    let (ao, bo) = (b.output(), b.output());
    let g1 = b.z(Phase::ZERO);
    let g2 = b.z(Phase::ZERO);
    b.path(&[ai, g1, ao]).path(&[bi, g2, bo]);
    b.h_edge(g1, g2);
    b.build().expect("valid")
}

/// A bare wire.
pub fn wire() -> Diagram {
    let mut b = DiagramBuilder::new();
    let i = b.input();
    let o = b.output();
    b.edge(i, o);
    b.build().expect("valid")
}

/// A wire carrying one spider: green π is the logical Z, red π the logical X.
pub fn wire_with(colour_is_red: bool) -> Diagram {
    let mut b = DiagramBuilder::new();
    let i = b.input();
    let o = b.output();
    let s = if colour_is_red { b.x(Phase::PI) } else { b.z(Phase::PI) };
    b.path(&[i, s, o]);
    b.build().expect("valid")
}

/// Two outputs joined by a wire (the Bell state up to scalar).
pub fn cup() -> Diagram {
    let mut b = DiagramBuilder::new();
    let o1 = b.output();
    let o2 = b.output();
    b.edge(o1, o2);
    b.build().expect("valid")
}

/// The eight sites around one cross-section of a primal defect running
/// along `z` through the cell column at `x = y = 1`: four face sites and
/// four corner edge sites, alternating around the defect.
pub fn x_ring_sites(z: i64) -> Vec<SiteCoordinate> {
    [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)]
        .iter()
        .map(|&(x, y)| SiteCoordinate::new(x, y, z))
        .collect()
}

/// A double defect split from one large defect: two tubes of red spiders,
/// each passing through four green spiders per cross-section, joined at the
/// top where the defect was split.  Each tube ends in four green legs that
/// carry the outputs (first tube, then second).
///
/// With `ring`, the middle greens of the first tube carry green π (a ring of
/// physical Z around one defect); with `chain`, the bottom red of each tube
/// carries red π (a chain of physical Z between the defects).
pub fn double_defect(ring: bool, chain: bool) -> Diagram {
    let mut b = DiagramBuilder::new();
    let bit = |on: bool| if on { Phase::PI } else { Phase::ZERO };
    let mut tops = Vec::new();
    let mut bottoms = Vec::new();
    for first in [true, false] {
        let top = b.x(Phase::ZERO);
        let upper = b.x(Phase::ZERO);
        let lower = b.x(Phase::ZERO);
        let bottom = b.x(bit(chain));
        b.edge(top, upper).edge(lower, bottom);
        for _ in 0..4 {
            let m = b.z(bit(ring && first));
            b.edge(upper, m).edge(m, lower);
        }
        tops.push(top);
        bottoms.push(bottom);
    }
    b.edge(tops[0], tops[1]);
    for bottom in bottoms {
        for _ in 0..4 {
            let leaf = b.z(Phase::ZERO);
            let o = b.output();
            b.path(&[bottom, leaf, o]);
        }
    }
    b.build().expect("valid")
}

/// The proposed logical CNOT of a primal qubit braiding a dual one.  The
/// control enters on four legs through Hadamards into a green spider and
/// leaves the same way; the target enters on four legs into a red spider.
/// The two meet at a red spider joined to the control's middle green and to
/// both target reds.  Inputs: control legs, then target legs; outputs
/// likewise.
pub fn braided_cnot() -> Diagram {
    let mut b = DiagramBuilder::new();
    let control_in: Vec<VertexId> = (0..4).map(|_| b.input()).collect();
    let target_in: Vec<VertexId> = (0..4).map(|_| b.input()).collect();
    let control_out: Vec<VertexId> = (0..4).map(|_| b.output()).collect();
    let target_out: Vec<VertexId> = (0..4).map(|_| b.output()).collect();
    let g_top = b.z(Phase::ZERO);
    let g_mid = b.z(Phase::ZERO);
    let g_bottom = b.z(Phase::ZERO);
    let r_top = b.x(Phase::ZERO);
    let r_mid = b.x(Phase::ZERO);
    let r_bottom = b.x(Phase::ZERO);
    for &i in &control_in {
        b.h_edge(i, g_top);
    }
    for &o in &control_out {
        b.h_edge(g_bottom, o);
    }
    for &i in &target_in {
        b.edge(i, r_top);
    }
    for &o in &target_out {
        b.edge(r_bottom, o);
    }
    b.path(&[g_top, g_mid, g_bottom]);
    b.edge(r_top, r_mid).edge(r_mid, r_bottom).edge(r_mid, g_mid);
    b.build().expect("valid")
}
