mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use redgreen::canon::{canonical_form, canonical_hash, isomorphic};
use redgreen::diagram::{compose_parallel, compose_sequential, Diagram, DiagramBuilder, VertexId, VertexKind, Violation};
use redgreen::phase::Phase;
use redgreen::rewrite::{normalize, Policy};
use redgreen::semantics::evaluate;

#[test]
fn validate_examples() {
    assert_eq!(Diagram::empty().validate(), Ok(()));
    assert_eq!(wire().validate(), Ok(()));

    let mut b = DiagramBuilder::new();
    let h = b.h();
    let i = b.input();
    let o = b.output();
    let z = b.z(Phase::ZERO);
    b.edge(i, h).edge(h, o).edge(h, z);
    let err = b.build_unchecked().validate().unwrap_err();
    assert!(matches!(err, Violation::HadamardDegree { degree: 3, .. }));
    assert!(err.to_string().contains("Hadamard degree ≠ 2"));
}

#[test]
fn validation_reports_boundary_problems() {
    let mut b = DiagramBuilder::new();
    let z = b.z(Phase::ZERO);
    let loose = b.vertex(VertexKind::B);
    b.edge(z, loose);
    assert_eq!(b.build_unchecked().validate(), Err(Violation::UnlistedBoundary(loose)));

    let err = Diagram::from_parts(
        vec![(VertexId(0), VertexKind::Z(Phase::ZERO))],
        vec![],
        vec![VertexId(0)],
        vec![],
    )
    .unwrap_err();
    assert!(matches!(err, Violation::NotABoundary { .. }));

    let err = Diagram::from_parts(vec![(VertexId(0), VertexKind::B)], vec![(VertexId(0), VertexId(4))], vec![], vec![])
        .unwrap_err();
    assert!(matches!(err, Violation::DanglingEdge { .. }));
}

#[test]
fn wire_then_wire_is_wire() {
    let d = compose_sequential(&wire(), &wire()).unwrap();
    assert!(isomorphic(&d, &wire()).is_some());
}

#[test]
fn h_then_h_normalizes_to_wire() {
    let h = chain(&[VertexKind::H]);
    let d = compose_sequential(&h, &h).unwrap();
    let (nf, trace) = normalize(&d, &Policy::shrink()).unwrap();
    assert!(isomorphic(&nf, &wire()).is_some());
    assert_eq!(trace.len(), 1);
}

#[test]
fn split_then_merge_matches_single_spider() {
    // Z(0) 1→2 followed by Z(0) 2→1, against the 1→1 Z(0) spider.
    let mut b = DiagramBuilder::new();
    let i = b.input();
    let z = b.z(Phase::ZERO);
    let o1 = b.output();
    let o2 = b.output();
    b.edge(i, z).edge(z, o1).edge(z, o2);
    let split = b.build().unwrap();
    let mut b = DiagramBuilder::new();
    let i1 = b.input();
    let i2 = b.input();
    let z = b.z(Phase::ZERO);
    let o = b.output();
    b.edge(i1, z).edge(i2, z).edge(z, o);
    let merge = b.build().unwrap();
    let d = compose_sequential(&split, &merge).unwrap();
    assert!(proportional(&oracle(&d), &oracle(&chain(&[VertexKind::Z(Phase::ZERO)])), 1e-12));
    assert!(proportional(&Mat::from_tensor(&evaluate(&d).unwrap()), &Mat::identity(2), 1e-12));
}

#[test]
fn parallel_examples() {
    let two = compose_parallel(&wire(), &wire());
    assert_eq!(two.signature().n_inputs, 2);
    assert!(proportional(&oracle(&two), &Mat::identity(4), 1e-12));

    // |0⟩ (red state) ∥ |+⟩ (green state).
    let mut b = DiagramBuilder::new();
    let r = b.x(Phase::ZERO);
    let o = b.output();
    b.edge(r, o);
    let zero = b.build().unwrap();
    let mut b = DiagramBuilder::new();
    let g = b.z(Phase::ZERO);
    let o = b.output();
    b.edge(g, o);
    let plus = b.build().unwrap();
    let d = compose_parallel(&zero, &plus);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let expected = Mat::real(2, 1, &[1.0, 0.0]).kron(&Mat::real(2, 1, &[s, s]));
    assert!(proportional(&Mat::from_tensor(&evaluate(&d).unwrap()), &expected, 1e-12));

    let with_empty = compose_parallel(&Diagram::empty(), &cnot_diagram());
    assert!(isomorphic(&with_empty, &cnot_diagram()).is_some());
}

#[test]
fn hash_examples() {
    let cnot = cnot_diagram();
    for seed in 0..5 {
        assert_eq!(canonical_hash(&cnot).unwrap(), canonical_hash(&shuffled_ids(&cnot, seed)).unwrap());
    }
    assert_ne!(canonical_hash(&cnot).unwrap(), canonical_hash(&cz_diagram()).unwrap());
    assert!(!proportional(&oracle(&cnot), &oracle(&cz_diagram()), 1e-9));

    let mut b = DiagramBuilder::new();
    b.z(Phase::PI);
    let zp = b.build().unwrap();
    let mut b = DiagramBuilder::new();
    b.x(Phase::PI);
    let xp = b.build().unwrap();
    assert_ne!(canonical_hash(&zp).unwrap(), canonical_hash(&xp).unwrap());
}

#[test]
fn hash_rejects_invalid_diagram() {
    let mut b = DiagramBuilder::new();
    b.h();
    assert!(canonical_hash(&b.build_unchecked()).is_err());
}

#[test]
fn isomorphism_examples() {
    let cnot = cnot_diagram();
    let shuffled = shuffled_ids(&cnot, 3);
    let w = isomorphic(&cnot, &shuffled).expect("relabelled copy is isomorphic");
    for (a, b) in cnot.edges() {
        assert!(shuffled.multiplicity(w[&a], w[&b]) >= 1);
    }
    for (v, k) in cnot.vertices() {
        assert_eq!(shuffled.kind(w[&v]), Some(k));
    }
    assert!(isomorphic(&wire(), &chain(&[VertexKind::H])).is_none());
}

#[test]
fn boundary_order_matters() {
    // Swapping the two outputs of CNOT gives a different (non-isomorphic) diagram.
    let d = cnot_diagram();
    let outs = d.outputs().to_vec();
    let swapped = Diagram::from_parts(
        d.vertices().collect::<Vec<_>>(),
        d.edges(),
        d.inputs().to_vec(),
        vec![outs[1], outs[0]],
    )
    .unwrap();
    assert!(isomorphic(&d, &swapped).is_none());
}

/// Exhaustive check on small diagrams: equal hashes ⟺ isomorphic, where
/// isomorphism is decided by a brute-force certificate minimised over every
/// vertex permutation.  Covers every diagram of ≤ 4 spiders (kinds drawn from
/// green/red phase-free, plus green π for ≤ 3 spiders) with any simple edge
/// set including self-loops, with and without an output boundary on the
/// first spider (≤ 5 vertices in total).
#[test]
fn hash_equality_matches_brute_force_isomorphism() {
    use std::collections::{BTreeMap, BTreeSet};
    let mut diagrams = Vec::new();
    for n in 1..=4usize {
        let kinds: Vec<VertexKind> = if n <= 3 {
            vec![VertexKind::Z(Phase::ZERO), VertexKind::X(Phase::ZERO), VertexKind::Z(Phase::PI)]
        } else {
            vec![VertexKind::Z(Phase::ZERO), VertexKind::X(Phase::ZERO)]
        };
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        for kc in 0..kinds.len().pow(n as u32) {
            for mask in 0..1u32 << pairs.len() {
                for with_boundary in [false, true] {
                    let mut b = DiagramBuilder::new();
                    let vs: Vec<VertexId> =
                        (0..n).map(|i| b.vertex(kinds[(kc / kinds.len().pow(i as u32)) % kinds.len()])).collect();
                    for (bit, &(i, j)) in pairs.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            b.edge(vs[i], vs[j]);
                        }
                    }
                    if with_boundary {
                        let o = b.output();
                        b.edge(vs[0], o);
                    }
                    diagrams.push(b.build().unwrap());
                }
            }
        }
    }
    let mut by_hash: BTreeMap<String, BTreeSet<Vec<u64>>> = BTreeMap::new();
    let mut by_brute: BTreeMap<Vec<u64>, BTreeSet<String>> = BTreeMap::new();
    for d in &diagrams {
        let h = canonical_hash(d).unwrap();
        let cert = brute_force_certificate(d);
        by_hash.entry(h.clone()).or_default().insert(cert.clone());
        by_brute.entry(cert).or_default().insert(h);
    }
    assert!(diagrams.len() > 30_000);
    assert!(by_hash.values().all(|s| s.len() == 1), "one hash covers non-isomorphic diagrams");
    assert!(by_brute.values().all(|s| s.len() == 1), "isomorphic diagrams hash differently");
    assert_eq!(by_hash.len(), by_brute.len());
}

/// Minimum over all vertex orders of (kinds, boundary position, adjacency
/// multiplicities): equal exactly for isomorphic diagrams.
fn brute_force_certificate(d: &Diagram) -> Vec<u64> {
    let vs: Vec<VertexId> = d.vertex_ids().collect();
    let n = vs.len();
    let code = |k: VertexKind| -> u64 {
        match k {
            VertexKind::Z(p) => 10 + p.num() as u64,
            VertexKind::X(p) => 20 + p.num() as u64,
            VertexKind::H => 30,
            VertexKind::B => 40,
        }
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<u64>> = None;
    loop {
        let order: Vec<VertexId> = perm.iter().map(|&i| vs[i]).collect();
        let mut cert: Vec<u64> = order.iter().map(|&v| code(d.kind(v).unwrap())).collect();
        for &o in d.outputs() {
            cert.push(order.iter().position(|&v| v == o).unwrap() as u64);
        }
        for i in 0..n {
            for j in i..n {
                cert.push(d.multiplicity(order[i], order[j]) as u64);
            }
        }
        if best.as_ref().is_none_or(|b| cert < *b) {
            best = Some(cert);
        }
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    best.unwrap_or_default()
}

#[test]
fn canonical_form_is_stable_under_relabelling_for_random_diagrams() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..200 {
        let d = random_diagram(&mut rng, GenParams { max_vertices: 10, max_boundaries: 4, max_edges: 18 });
        let e = shuffled_ids(&d, seed);
        assert_eq!(canonical_form(&d).certificate(), canonical_form(&e).certificate());
    }
}

fn arb_diagram(n_in: usize, n_out: usize) -> impl Strategy<Value = Diagram> {
    (any::<u64>(), 1usize..5).prop_map(move |(seed, n_spiders)| {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = DiagramBuilder::new();
        let vs: Vec<VertexId> = (0..n_spiders)
            .map(|_| {
                let p = Phase::new(rng.gen_range(0..4), 2).unwrap();
                if rng.gen_bool(0.5) {
                    b.z(p)
                } else {
                    b.x(p)
                }
            })
            .collect();
        for i in 1..n_spiders {
            let j = rng.gen_range(0..i);
            if rng.gen_bool(0.3) {
                b.h_edge(vs[i], vs[j]);
            } else {
                b.edge(vs[i], vs[j]);
            }
        }
        for _ in 0..n_in {
            let i = b.input();
            b.edge(i, vs[rng.gen_range(0..n_spiders)]);
        }
        for _ in 0..n_out {
            let o = b.output();
            b.edge(o, vs[rng.gen_range(0..n_spiders)]);
        }
        b.build().unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sequential_composition_is_associative(a in arb_diagram(1, 2), b in arb_diagram(2, 2), c in arb_diagram(2, 1)) {
        let left = compose_sequential(&compose_sequential(&a, &b).unwrap(), &c).unwrap();
        let right = compose_sequential(&a, &compose_sequential(&b, &c).unwrap()).unwrap();
        prop_assert!(isomorphic(&left, &right).is_some());
        prop_assert_eq!(left.validate(), Ok(()));
    }

    #[test]
    fn parallel_composition_is_associative_and_unital(a in arb_diagram(1, 1), b in arb_diagram(0, 2), c in arb_diagram(2, 0)) {
        let left = compose_parallel(&compose_parallel(&a, &b), &c);
        let right = compose_parallel(&a, &compose_parallel(&b, &c));
        prop_assert!(isomorphic(&left, &right).is_some());
        prop_assert!(isomorphic(&compose_parallel(&Diagram::empty(), &a), &a).is_some());
        prop_assert!(isomorphic(&compose_parallel(&a, &Diagram::empty()), &a).is_some());
    }

    #[test]
    fn hash_is_invariant_under_relabelling(a in arb_diagram(2, 2), seed in any::<u64>()) {
        prop_assert_eq!(canonical_hash(&a).unwrap(), canonical_hash(&shuffled_ids(&a, seed)).unwrap());
    }

    #[test]
    fn phase_addition_is_a_group(a in -40i64..40, b in -40i64..40, c2 in -40i64..40, d1 in 1i64..9, d2 in 1i64..9, d3 in 1i64..9) {
        let (x, y, z) = (Phase::new(a, d1).unwrap(), Phase::new(b, d2).unwrap(), Phase::new(c2, d3).unwrap());
        prop_assert_eq!((x + y) + z, x + (y + z));
        prop_assert_eq!(x + y, y + x);
        prop_assert!((x + (-x)).is_zero());
        let r = (x + y).radians();
        prop_assert!((0.0..2.0 * std::f64::consts::PI).contains(&r));
    }
}
