//! Test support: an independent brute-force tensor oracle, small dense matrix
//! helpers, reference diagrams and a seeded random-diagram generator.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redgreen::diagram::{Diagram, DiagramBuilder, VertexId, VertexKind};
use redgreen::phase::Phase;
use redgreen::semantics::TensorMap;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<C>) -> Mat {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn real(rows: usize, cols: usize, data: &[f64]) -> Mat {
        Mat::new(rows, cols, data.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::new(n, n, vec![c(0.0, 0.0); n * n]);
        for i in 0..n {
            m.data[i * n + i] = c(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, r: usize, col: usize) -> C {
        self.data[r * self.cols + col]
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = vec![c(0.0, 0.0); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    out[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Mat::new(self.rows, other.cols, out)
    }

    pub fn kron(&self, other: &Mat) -> Mat {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = vec![c(0.0, 0.0); rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k) * cols + j * other.cols + l] = self.get(i, j) * other.get(k, l);
                    }
                }
            }
        }
        Mat::new(rows, cols, out)
    }

    pub fn to_tensor(&self) -> TensorMap {
        let n_out = self.rows.trailing_zeros() as usize;
        let n_in = self.cols.trailing_zeros() as usize;
        TensorMap::new(n_in, n_out, self.data.clone()).unwrap()
    }

    pub fn from_tensor(t: &TensorMap) -> Mat {
        Mat::new(t.rows(), t.cols(), t.entries().to_vec())
    }
}

/// Independent proportionality check: `a = s·b` for some non-zero `s`, with
/// entries compared relative to the largest magnitude in `a`.
pub fn proportional(a: &Mat, b: &Mat, tol: f64) -> bool {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    let amax = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bmax = b.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if amax < 1e-11 || bmax < 1e-11 {
        return amax < 1e-11 && bmax < 1e-11;
    }
    // Normalise both to unit max-norm and align phases at b's largest entry.
    let k = (0..b.data.len()).max_by(|&i, &j| b.data[i].norm().partial_cmp(&b.data[j].norm()).unwrap()).unwrap();
    if a.data[k].norm() < 1e-11 {
        return false;
    }
    let s = a.data[k] / b.data[k];
    a.data.iter().zip(&b.data).all(|(x, y)| (x - s * y).norm() <= tol * amax.max(1.0))
}

pub fn pauli_x() -> Mat {
    Mat::real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_z() -> Mat {
    Mat::real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn hadamard() -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Mat::real(2, 2, &[s, s, s, -s])
}

pub fn cnot() -> Mat {
    Mat::real(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.])
}

pub fn cz() -> Mat {
    Mat::real(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., -1.])
}

/// Amplitude of a generator given the bits on its legs.
fn generator_amplitude(kind: VertexKind, bits: &[u8]) -> C {
    match kind {
        VertexKind::Z(p) => {
            let e = C::from_polar(1.0, p.radians());
            let zeros = bits.iter().all(|&b| b == 0);
            let ones = bits.iter().all(|&b| b == 1);
            let mut a = c(0.0, 0.0);
            if zeros {
                a += c(1.0, 0.0);
            }
            if ones {
                a += e;
            }
            a
        }
        VertexKind::X(p) => {
            // ⟨b| (|+…+⟩ + e^{iα}|−…−⟩) with normalised |±⟩.
            let e = C::from_polar(1.0, p.radians());
            let s = std::f64::consts::FRAC_1_SQRT_2.powi(bits.len() as i32);
            let parity = bits.iter().filter(|&&b| b == 1).count() % 2;
            let sign = if parity == 0 { 1.0 } else { -1.0 };
            (c(1.0, 0.0) + e * sign) * s
        }
        VertexKind::H => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            if bits[0] == 1 && bits[1] == 1 {
                c(-s, 0.0)
            } else {
                c(s, 0.0)
            }
        }
        VertexKind::B => unreachable!(),
    }
}

/// Brute-force evaluation: sums the product of generator amplitudes over
/// every assignment of a bit to every edge.  Exponential in the edge count,
/// entirely independent of the library's pairwise contraction.
pub fn oracle(d: &Diagram) -> Mat {
    let edges = d.edges();
    let m = edges.len();
    assert!(m <= 20, "oracle limited to 20 edges");
    let n_in = d.inputs().len();
    let n_out = d.outputs().len();
    let rows = 1usize << n_out;
    let cols = 1usize << n_in;
    let mut out = vec![c(0.0, 0.0); rows * cols];
    // Edge indices incident to each vertex (self-loops twice).
    let legs = |v: VertexId| -> Vec<usize> {
        let mut ls = Vec::new();
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a == v {
                ls.push(i);
            }
            if b == v {
                ls.push(i);
            }
        }
        ls
    };
    let vertex_legs: Vec<(VertexKind, Vec<usize>)> =
        d.vertices().filter(|(_, k)| *k != VertexKind::B).map(|(v, k)| (k, legs(v))).collect();
    let boundary_edge = |b: VertexId| legs(b)[0];
    let out_edges: Vec<usize> = d.outputs().iter().map(|&b| boundary_edge(b)).collect();
    let in_edges: Vec<usize> = d.inputs().iter().map(|&b| boundary_edge(b)).collect();
    for assignment in 0..1u64 << m {
        let bit = |e: usize| ((assignment >> e) & 1) as u8;
        let mut amp = c(1.0, 0.0);
        for (k, ls) in &vertex_legs {
            let bits: Vec<u8> = ls.iter().map(|&e| bit(e)).collect();
            amp *= generator_amplitude(*k, &bits);
            if amp == c(0.0, 0.0) {
                break;
            }
        }
        if amp == c(0.0, 0.0) {
            continue;
        }
        let mut row = 0;
        for &e in &out_edges {
            row = (row << 1) | bit(e) as usize;
        }
        let mut col = 0;
        for &e in &in_edges {
            col = (col << 1) | bit(e) as usize;
        }
        out[row * cols + col] += amp;
    }
    Mat::new(rows, cols, out)
}

// ---------------------------------------------------------------------------
// Reference diagrams
// ---------------------------------------------------------------------------

pub fn wire() -> Diagram {
    let mut b = DiagramBuilder::new();
    let i = b.input();
    let o = b.output();
    b.edge(i, o);
    b.build().unwrap()
}

/// 1→1 chain through the given kinds.
pub fn chain(kinds: &[VertexKind]) -> Diagram {
    let mut b = DiagramBuilder::new();
    let i = b.input();
    let mut vs = vec![i];
    for &k in kinds {
        vs.push(b.vertex(k));
    }
    let o = b.output();
    vs.push(o);
    b.path(&vs);
    b.build().unwrap()
}

/// CNOT: green control spider joined to a red target spider.
/// Inputs (control, target), outputs (control, target).
pub fn cnot_diagram() -> Diagram {
    let mut b = DiagramBuilder::new();
    let ci = b.input();
    let ti = b.input();
    let g = b.z(Phase::ZERO);
    let r = b.x(Phase::ZERO);
    let co = b.output();
    let to = b.output();
    b.path(&[ci, g, co]).path(&[ti, r, to]).edge(g, r);
    b.build().unwrap()
}

/// CNOT with Hadamards on both legs of the target.
pub fn cz_before_colour_change() -> Diagram {
    let mut b = DiagramBuilder::new();
    let ci = b.input();
    let ti = b.input();
    let g = b.z(Phase::ZERO);
    let r = b.x(Phase::ZERO);
    let h1 = b.h();
    let h2 = b.h();
    let co = b.output();
    let to = b.output();
    b.path(&[ci, g, co]).path(&[ti, h1, r, h2, to]).edge(g, r);
    b.build().unwrap()
}

/// CZ normal form: two green spiders joined through one Hadamard.
pub fn cz_diagram() -> Diagram {
    let mut b = DiagramBuilder::new();
    let ci = b.input();
    let ti = b.input();
    let g1 = b.z(Phase::ZERO);
    let g2 = b.z(Phase::ZERO);
    let co = b.output();
    let to = b.output();
    b.path(&[ci, g1, co]).path(&[ti, g2, to]);
    b.h_edge(g1, g2);
    b.build().unwrap()
}

/// Random relabelling of a diagram's ids.
pub fn shuffled_ids(d: &Diagram, seed: u64) -> Diagram {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<VertexId> = d.vertex_ids().collect();
    let mut targets: Vec<usize> = (0..ids.len()).map(|i| i * 7 + 1000).collect();
    targets.shuffle(&mut rng);
    let mapping = ids.iter().zip(targets).map(|(&v, t)| (v, VertexId(t))).collect();
    d.relabelled(&mapping)
}

// ---------------------------------------------------------------------------
// Random diagrams
// ---------------------------------------------------------------------------

/// Parameters of the random generator.
#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub max_vertices: usize,
    pub max_boundaries: usize,
    pub max_edges: usize,
}

fn random_phase(rng: &mut ChaCha8Rng) -> Phase {
    match rng.gen_range(0..6) {
        0 | 1 => Phase::ZERO,
        2 | 3 => Phase::PI,
        4 => Phase::new(1, 2).unwrap(),
        _ => Phase::new(rng.gen_range(0..8), 4).unwrap(),
    }
}

/// A random valid diagram with at most `max_vertices` vertices (boundaries
/// and Hadamards included) and at most `max_boundaries` boundaries.  The
/// generator is biased towards the shapes the rules act on: one- and
/// two-legged 0/π spiders, Hadamard chains, parallel edges and self-loops.
pub fn random_diagram(rng: &mut ChaCha8Rng, p: GenParams) -> Diagram {
    loop {
        if let Some(d) = try_random_diagram(rng, p) {
            return d;
        }
    }
}

fn try_random_diagram(rng: &mut ChaCha8Rng, p: GenParams) -> Option<Diagram> {
    let n_boundary = rng.gen_range(0..=p.max_boundaries.min(p.max_vertices.saturating_sub(1)));
    let budget = p.max_vertices - n_boundary;
    let n_spiders = rng.gen_range(1..=budget.max(1));
    let n_h = rng.gen_range(0..=budget - n_spiders);
    let mut b = DiagramBuilder::new();
    let spiders: Vec<VertexId> = (0..n_spiders)
        .map(|_| {
            let ph = random_phase(rng);
            if rng.gen_bool(0.5) {
                b.z(ph)
            } else {
                b.x(ph)
            }
        })
        .collect();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    // A random spanning-ish structure among spiders.
    for i in 1..n_spiders {
        if rng.gen_bool(0.85) {
            let j = rng.gen_range(0..i);
            edges.push((spiders[i], spiders[j]));
        }
    }
    let extra = rng.gen_range(0..=3);
    for _ in 0..extra {
        let a = spiders[rng.gen_range(0..n_spiders)];
        let bb = spiders[rng.gen_range(0..n_spiders)];
        edges.push((a, bb));
    }
    // Boundaries attach to spiders, or occasionally pair up as a bare wire.
    let mut boundary_ids = Vec::new();
    let mut k = 0;
    while k < n_boundary {
        let is_input = rng.gen_bool(0.5);
        let v = if is_input { b.input() } else { b.output() };
        boundary_ids.push(v);
        if k + 1 < n_boundary && rng.gen_bool(0.1) {
            let w = if rng.gen_bool(0.5) { b.input() } else { b.output() };
            boundary_ids.push(w);
            edges.push((v, w));
            k += 2;
        } else {
            edges.push((v, spiders[rng.gen_range(0..n_spiders)]));
            k += 1;
        }
    }
    // Hadamards subdivide existing edges (possibly one already subdivided).
    let mut h_ids = Vec::new();
    for _ in 0..n_h {
        if edges.is_empty() {
            break;
        }
        let idx = rng.gen_range(0..edges.len());
        let (a, c2) = edges.swap_remove(idx);
        let h = b.h();
        h_ids.push(h);
        edges.push((a, h));
        edges.push((h, c2));
    }
    if edges.len() > p.max_edges {
        return None;
    }
    for (a, c2) in edges {
        b.edge(a, c2);
    }
    b.build().ok()
}

// ---------------------------------------------------------------------------
// Physical states
// ---------------------------------------------------------------------------

/// Brute-force graph state: start from |+…+⟩ and apply CZ on every edge.
/// Qubit 0 is the most significant bit.
pub fn graph_state_vector(n: usize, edges: &[(usize, usize)]) -> Mat {
    let dim = 1usize << n;
    let amp = 1.0 / (dim as f64).sqrt();
    let data = (0..dim)
        .map(|idx| {
            let bit = |q: usize| (idx >> (n - 1 - q)) & 1;
            let parity = edges.iter().filter(|&&(a, b)| bit(a) == 1 && bit(b) == 1).count();
            c(if parity % 2 == 0 { amp } else { -amp }, 0.0)
        })
        .collect();
    Mat::new(dim, 1, data)
}
