mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redgreen::canon::{canonical_hash, isomorphic};
use redgreen::diagram::{Colour, Diagram, DiagramBuilder, VertexKind};
use redgreen::lattice::*;
use redgreen::phase::Phase;
use redgreen::rewrite::{normalize, Policy};
use redgreen::semantics::{equiv_up_to_scalar, evaluate};

fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=max_n);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.4) {
                edges.push((a, b));
            }
        }
    }
    (n, edges)
}

fn bipartite_random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=max_n);
    let side: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if side[a] != side[b] && rng.gen_bool(0.5) {
                edges.push((a, b));
            }
        }
    }
    (n, edges)
}

fn proportional_to(d: &Diagram, m: &Mat) -> bool {
    let t = evaluate(d).expect("within the rank cap");
    equiv_up_to_scalar(&t, &m.to_tensor(), 1e-9).unwrap().equivalent
}

/// The five-qubit plus-shaped cluster: qubit 0 in the centre.
fn plus_edges() -> Vec<(usize, usize)> {
    vec![(0, 1), (0, 2), (0, 3), (0, 4)]
}

/// Hand-built two-coloured plus cluster: a centre spider with a Hadamard on
/// its time leg joined by plain edges to four opposite-colour arms.
fn hand_built_plus(centre: Colour, h_on_centre: bool) -> Diagram {
    let mut b = DiagramBuilder::new();
    let mid = b.spider(centre, Phase::ZERO);
    let arms: Vec<_> = (0..4).map(|_| b.spider(centre.flipped(), Phase::ZERO)).collect();
    let legs: Vec<_> = (0..5).map(|_| b.output()).collect();
    if h_on_centre {
        b.h_edge(mid, legs[0]);
    } else {
        b.edge(mid, legs[0]);
    }
    for (i, &a) in arms.iter().enumerate() {
        b.edge(mid, a);
        if h_on_centre {
            b.edge(a, legs[i + 1]);
        } else {
            b.h_edge(a, legs[i + 1]);
        }
    }
    b.build().unwrap()
}

#[test]
fn single_qubit_graph_state_is_plus_preparation() {
    let build = build_graph_state(1, &[]).unwrap();
    let mut b = DiagramBuilder::new();
    let s = b.z(Phase::ZERO);
    let o = b.output();
    b.edge(s, o);
    assert!(isomorphic(&build.diagram, &b.build().unwrap()).is_some());
    let plus = Mat::real(2, 1, &[1.0, 1.0]);
    assert!(proportional_to(&build.diagram, &plus));
}

#[test]
fn two_qubit_path_is_cz_on_plus_plus() {
    let build = build_graph_state(2, &[(0, 1)]).unwrap();
    let expected = Mat::real(4, 1, &[0.5, 0.5, 0.5, -0.5]);
    assert!(proportional_to(&build.diagram, &expected));
    // Independent route: CZ applied to |+⟩⊗|+⟩.
    let plus = Mat::real(2, 1, &[1.0, 1.0]);
    assert!(proportional_to(&build.diagram, &cz().mul(&plus.kron(&plus))));
}

#[test]
fn graph_state_input_errors() {
    assert_eq!(build_graph_state(0, &[]).unwrap_err(), LatticeError::EmptyGraph);
    assert_eq!(build_graph_state(2, &[(1, 1)]).unwrap_err(), LatticeError::SelfLoop(1));
    assert_eq!(build_graph_state(2, &[(0, 1), (1, 0)]).unwrap_err(), LatticeError::DuplicateEdge(0, 1));
    assert!(matches!(build_graph_state(2, &[(0, 2)]), Err(LatticeError::UnknownQubit { .. })));
}

#[test]
fn graph_state_shape() {
    let build = build_graph_state(5, &plus_edges()).unwrap();
    assert_eq!(build.diagram.validate(), Ok(()));
    assert_eq!(build.diagram.hadamard_count(), 4);
    assert_eq!(build.diagram.signature().n_outputs, 5);
    assert_eq!(build.diagram.signature().n_inputs, 0);
    for (&s, &l) in build.spiders.iter().zip(&build.legs) {
        assert_eq!(build.diagram.kind(s), Some(VertexKind::Z(Phase::ZERO)));
        assert_eq!(build.diagram.neighbours(l), &[s]);
    }
}

#[test]
fn random_graph_states_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let (n, edges) = random_graph(&mut rng, 8);
        let build = build_graph_state(n, &edges).unwrap();
        assert!(proportional_to(&build.diagram, &graph_state_vector(n, &edges)), "n={n} edges={edges:?}");
    }
}

#[test]
fn plus_cluster_colourings_match_the_drawn_renderings() {
    let build = build_graph_state(5, &plus_edges()).unwrap();
    let red = two_colour(&build, Convention::RedCentre).unwrap();
    assert!(isomorphic(&red.diagram, &hand_built_plus(Colour::Red, true)).is_some());
    let green = two_colour(&build, Convention::GreenCentre).unwrap();
    assert!(isomorphic(&green.diagram, &hand_built_plus(Colour::Green, false)).is_some());
    let expected = graph_state_vector(5, &plus_edges());
    assert!(proportional_to(&red.diagram, &expected));
    assert!(proportional_to(&green.diagram, &expected));
}

#[test]
fn single_qubit_colourings() {
    let build = build_graph_state(1, &[]).unwrap();
    let red = two_colour(&build, Convention::RedCentre).unwrap();
    let green = two_colour(&build, Convention::GreenCentre).unwrap();
    assert_eq!(red.diagram.kind(red.spiders[0]).and_then(VertexKind::colour), Some(Colour::Red));
    assert_eq!(green.diagram.kind(green.spiders[0]).and_then(VertexKind::colour), Some(Colour::Green));
    let a = evaluate(&red.diagram).unwrap();
    let b = evaluate(&green.diagram).unwrap();
    assert!(equiv_up_to_scalar(&a, &b, 1e-9).unwrap().equivalent);
}

#[test]
fn odd_cycle_cannot_be_two_coloured() {
    let build = build_graph_state(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    assert!(matches!(two_colour(&build, Convention::RedCentre), Err(LatticeError::NotBipartite { .. })));
}

#[test]
fn colouring_twice_is_rejected() {
    let build = two_colour(&build_graph_state(2, &[(0, 1)]).unwrap(), Convention::RedCentre).unwrap();
    assert_eq!(two_colour(&build, Convention::RedCentre).unwrap_err(), LatticeError::AlreadyColoured);
}

#[test]
fn two_colouring_preserves_semantics_on_random_bipartite_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (n, edges) = bipartite_random_graph(&mut rng, 8);
        let build = build_graph_state(n, &edges).unwrap();
        let expected = graph_state_vector(n, &edges);
        for conv in [Convention::RedCentre, Convention::GreenCentre] {
            let coloured = two_colour(&build, conv).unwrap();
            assert_eq!(coloured.diagram.validate(), Ok(()));
            assert!(proportional_to(&coloured.diagram, &expected), "{conv:?} n={n} edges={edges:?}");
            // Opposite colours meet on plain edges only.
            for &(a, b) in &edges {
                let (sa, sb) = (coloured.spiders[a], coloured.spiders[b]);
                assert_eq!(coloured.diagram.multiplicity(sa, sb), 1);
            }
        }
    }
}

/// Independent enumeration of the unit cell over {0,1,2}³.
fn enumerate_cell() -> (Vec<[i64; 3]>, Vec<[i64; 3]>) {
    let mut faces = Vec::new();
    let mut edges = Vec::new();
    for x in 0..=2i64 {
        for y in 0..=2i64 {
            for z in 0..=2i64 {
                match [x, y, z].iter().filter(|&&v| v == 1).count() {
                    2 => faces.push([x, y, z]),
                    1 => edges.push([x, y, z]),
                    _ => {}
                }
            }
        }
    }
    (faces, edges)
}

#[test]
fn unit_cell_has_eighteen_sites() {
    let (faces, edges) = enumerate_cell();
    assert_eq!((faces.len(), edges.len()), (6, 12));
    let cell = build_unit_cell();
    assert_eq!(cell.qubit_count(), 18);
    let faces_built = cell.coordinates.iter().filter(|s| s.kind() == Some(SiteKind::Face)).count();
    assert_eq!(faces_built, 6);
    // Each face site touches the four edge sites at distance one.
    for f in &faces {
        let q = cell.qubit_at(SiteCoordinate::from(*f)).unwrap();
        let mut ns = cell.graph_neighbours(q);
        ns.sort();
        let expected: Vec<usize> = edges
            .iter()
            .filter(|e| e.iter().zip(f).map(|(a, b)| (a - b).abs()).sum::<i64>() == 1)
            .map(|e| cell.qubit_at(SiteCoordinate::from(*e)).unwrap())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(ns.len(), 4);
        assert_eq!(ns, expected);
    }
    assert_eq!(cell.edges.len(), 24);
    assert_eq!(cell.diagram.validate(), Ok(()));
}

#[test]
fn tiling_shares_boundary_planes() {
    let single = tile_lattice(1, 1, 1).unwrap();
    assert!(isomorphic(&single.diagram, &build_unit_cell().diagram).is_some());
    let (faces, edges) = enumerate_cell();
    let shared = faces.iter().chain(&edges).filter(|s| s[0] == 2).count();
    assert_eq!(shared, 5);
    let double = tile_lattice(2, 1, 1).unwrap();
    assert_eq!(double.qubit_count(), 2 * 18 - shared);
    assert_eq!(double.qubit_count(), 31);
    // Every coordinate appears once.
    let distinct: BTreeSet<_> = double.coordinates.iter().collect();
    assert_eq!(distinct.len(), 31);
}

#[test]
fn tiling_errors() {
    assert_eq!(tile_lattice(0, 1, 1).unwrap_err(), LatticeError::ZeroCells([0, 1, 1]));
    assert!(matches!(tile_lattice_capped(3, 3, 3, 100), Err(LatticeError::CapExceeded { cap: 100, .. })));
}

#[test]
fn shifted_cell_is_dual_and_colour_reversed() {
    let cell = build_unit_cell();
    for &s in &cell.coordinates {
        let t = s.shifted(1, 1, 1);
        for conv in [Convention::RedCentre, Convention::GreenCentre] {
            let a = s.class(conv).unwrap();
            let b = t.class(conv).unwrap();
            assert_eq!(b.sublattice, a.sublattice.other());
            assert_eq!(b.colour, a.colour.flipped());
        }
    }
    // The dual cell centred on (2, 2, 2) opens and closes with green sites
    // under red-centre; the primal cell with red ones.
    let dual_face = SiteCoordinate::new(2, 2, 1);
    assert_eq!(dual_face.class(Convention::RedCentre).unwrap().colour, Colour::Green);
    let primal_face = SiteCoordinate::new(1, 1, 0);
    assert_eq!(primal_face.class(Convention::RedCentre).unwrap().colour, Colour::Red);
}

#[test]
fn colouring_swaps_between_conventions() {
    let cell = build_unit_cell();
    let red = two_colour(&cell, Convention::RedCentre).unwrap();
    let green = two_colour(&cell, Convention::GreenCentre).unwrap();
    // One Hadamard per red site: six faces versus twelve edges.
    assert_eq!(red.diagram.hadamard_count(), 6);
    assert_eq!(green.diagram.hadamard_count(), 12);
    for (q, s) in cell.coordinates.iter().enumerate() {
        let cr = red.diagram.kind(red.spiders[q]).and_then(VertexKind::colour).unwrap();
        let cg = green.diagram.kind(green.spiders[q]).and_then(VertexKind::colour).unwrap();
        assert_eq!(cr, cg.flipped());
        let red_site = s.kind() == Some(SiteKind::Face);
        assert_eq!(cr == Colour::Red, red_site);
        // Red sites carry a Hadamard on their time leg.
        let inner = red.diagram.neighbours(red.legs[q])[0];
        assert_eq!(red.diagram.kind(inner) == Some(VertexKind::H), red_site);
    }
}

/// X on a qubit: a red π on its time leg beyond any Hadamard.
fn with_x_on_red_sites(build: &ClusterBuild) -> ClusterBuild {
    let mut out = build.clone();
    for q in 0..build.qubit_count() {
        if build.diagram.kind(build.spiders[q]).and_then(VertexKind::colour) == Some(Colour::Red) {
            out = insert_on_leg(&out, q, VertexKind::X(Phase::PI));
        }
    }
    out
}

#[test]
fn x_on_every_red_site_stabilises_the_cell() {
    for conv in [Convention::RedCentre, Convention::GreenCentre] {
        let cell = two_colour(&build_unit_cell(), conv).unwrap();
        let flipped = with_x_on_red_sites(&cell);
        assert_ne!(canonical_hash(&flipped.diagram), canonical_hash(&cell.diagram));
        let (bare, _) = normalize(&cell.diagram, &Policy::default()).unwrap();
        let (nf, _) = normalize(&flipped.diagram, &Policy::default()).unwrap();
        assert_eq!(canonical_hash(&nf), canonical_hash(&bare), "{conv:?}");
    }
}

#[test]
fn x_on_one_red_site_is_not_a_stabiliser() {
    let cell = two_colour(&build_unit_cell(), Convention::RedCentre).unwrap();
    let q = cell.qubit_at(SiteCoordinate::new(1, 1, 0)).unwrap();
    let one = insert_on_leg(&cell, q, VertexKind::X(Phase::PI));
    let (bare, _) = normalize(&cell.diagram, &Policy::default()).unwrap();
    let (nf, _) = normalize(&one.diagram, &Policy::default()).unwrap();
    assert_ne!(canonical_hash(&nf), canonical_hash(&bare));
}

#[test]
fn stabiliser_holds_semantically_on_a_small_graph() {
    // X on the centre and Z on every arm stabilises the plus cluster.
    let build = two_colour(&build_graph_state(5, &plus_edges()).unwrap(), Convention::RedCentre).unwrap();
    let mut with = insert_on_leg(&build, 0, VertexKind::X(Phase::PI));
    for q in 1..5 {
        with = insert_on_leg(&with, q, VertexKind::Z(Phase::PI));
    }
    let a = evaluate(&build.diagram).unwrap();
    let b = evaluate(&with.diagram).unwrap();
    assert!(equiv_up_to_scalar(&a, &b, 1e-9).unwrap().equivalent);
    let (na, _) = normalize(&build.diagram, &Policy::default()).unwrap();
    let (nb, _) = normalize(&with.diagram, &Policy::default()).unwrap();
    assert_eq!(canonical_hash(&na), canonical_hash(&nb));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn colour_depends_only_on_parity(x in -6i64..6, y in -6i64..6, z in -6i64..6, dx in -2i64..3, dy in -2i64..3, dz in -2i64..3) {
        let s = SiteCoordinate::new(x, y, z);
        let t = s.shifted(2 * dx, 2 * dy, 2 * dz);
        for conv in [Convention::RedCentre, Convention::GreenCentre] {
            prop_assert_eq!(s.class(conv), t.class(conv));
        }
    }

    #[test]
    fn neighbours_are_sites_of_the_other_sublattice(x in -6i64..6, y in -6i64..6, z in -6i64..6) {
        let s = SiteCoordinate::new(x, y, z);
        if let Some(sub) = s.sublattice() {
            let ns = s.neighbours();
            prop_assert_eq!(ns.len(), 4);
            for n in ns {
                prop_assert_eq!(n.sublattice(), Some(sub.other()));
                prop_assert!(n.neighbours().contains(&s));
            }
        } else {
            prop_assert!(s.neighbours().is_empty());
        }
    }

    #[test]
    fn graph_states_match_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, edges) = random_graph(&mut rng, 6);
        let build = build_graph_state(n, &edges).unwrap();
        prop_assert!(proportional_to(&build.diagram, &graph_state_vector(n, &edges)));
    }
}
