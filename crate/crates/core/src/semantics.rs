//! Dense tensor semantics of diagrams.
//!
//! Every diagram denotes a `2^n_outputs × 2^n_inputs` complex matrix.  Green
//! spiders are `|0…0⟩⟨0…0| + e^{iα}|1…1⟩⟨1…1|`, red spiders are the same map
//! conjugated by Hadamards on every leg, and the Hadamard box is the
//! normalised 2×2 Hadamard matrix.  Evaluation contracts the generator tensors
//! along the diagram's edges; it is the floating-point oracle against which
//! the exact rewrite engine is checked.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Diagram, VertexKind, Violation};

/// Default cap on the number of amplitudes of any intermediate tensor.
pub const DEFAULT_RANK_CAP: usize = 1 << 14;

/// Default tolerance for [`equiv_up_to_scalar`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Magnitude below which a tensor is treated as identically zero.
const ZERO_EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("Hadamard generator must be 1→1, requested {n_in}→{n_out}")]
    HadamardArity { n_in: usize, n_out: usize },
    #[error("boundary vertices have no generator tensor")]
    BoundaryGenerator,
    #[error("contraction needs a tensor with {needed} amplitudes (2^{rank}); cap is {cap}")]
    RankCapExceeded { rank: usize, needed: u128, cap: usize },
    #[error("signature mismatch: {a_in}→{a_out} vs {b_in}→{b_out}")]
    ShapeMismatch { a_in: usize, a_out: usize, b_in: usize, b_out: usize },
    #[error("invalid tensor: {0}")]
    Malformed(String),
    #[error(transparent)]
    Invalid(#[from] Violation),
}

/// A dense linear map with declared wire counts.  Entries are row-major; the
/// row index encodes output bits (first output most significant) and the
/// column index encodes input bits likewise.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorMap {
    n_inputs: usize,
    n_outputs: usize,
    data: Vec<Complex64>,
}

impl TensorMap {
    /// Builds a map from row-major entries.
    pub fn new(n_inputs: usize, n_outputs: usize, data: Vec<Complex64>) -> Result<TensorMap, SemanticsError> {
        let expected = 1usize << (n_inputs + n_outputs);
        if data.len() != expected {
            return Err(SemanticsError::Malformed(format!(
                "{n_inputs}→{n_outputs} map needs {expected} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SemanticsError::Malformed("non-finite entry".into()));
        }
        Ok(TensorMap { n_inputs, n_outputs, data })
    }

    /// Builds a map from real row-major entries.
    pub fn from_real(n_inputs: usize, n_outputs: usize, data: &[f64]) -> Result<TensorMap, SemanticsError> {
        TensorMap::new(n_inputs, n_outputs, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The identity on `n` wires.
    pub fn identity(n: usize) -> TensorMap {
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        TensorMap { n_inputs: n, n_outputs: n, data }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn rows(&self) -> usize {
        1 << self.n_outputs
    }

    pub fn cols(&self) -> usize {
        1 << self.n_inputs
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols() + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Multiplies every entry by `s`.
    pub fn scaled(&self, s: Complex64) -> TensorMap {
        TensorMap {
            n_inputs: self.n_inputs,
            n_outputs: self.n_outputs,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// Largest entrywise distance to `other` (same shape required).
    pub fn max_distance(&self, other: &TensorMap) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Serialisable form with separate real and imaginary parts.
    pub fn to_json(&self) -> TensorJson {
        let cols = self.cols();
        let re = self.data.chunks(cols).map(|r| r.iter().map(|z| z.re).collect()).collect();
        let im = self.data.chunks(cols).map(|r| r.iter().map(|z| z.im).collect()).collect();
        TensorJson { n_inputs: self.n_inputs, n_outputs: self.n_outputs, re, im }
    }

    pub fn from_json(json: &TensorJson) -> Result<TensorMap, SemanticsError> {
        let rows = 1usize << json.n_outputs;
        let cols = 1usize << json.n_inputs;
        if json.re.len() != rows || json.im.len() != rows {
            return Err(SemanticsError::Malformed(format!("expected {rows} rows")));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for (r, i) in json.re.iter().zip(&json.im) {
            if r.len() != cols || i.len() != cols {
                return Err(SemanticsError::Malformed(format!("expected {cols} columns")));
            }
            data.extend(r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)));
        }
        TensorMap::new(json.n_inputs, json.n_outputs, data)
    }
}

/// JSON form of a [`TensorMap`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub n_inputs: usize,
    pub n_outputs: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Outcome of [`equiv_up_to_scalar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarEquivalence {
    pub equivalent: bool,
    /// `a ≈ scalar · b`; `None` when exactly one side is zero.
    pub scalar: Option<Complex64>,
    pub max_residual: f64,
}

/// Decides whether `a = s·b` for some non-zero `s`.
///
/// The scalar is read off at `b`'s largest-magnitude entry.  The residual is
/// `‖a − s·b‖_max`, measured relative to `‖a‖_max` when that exceeds 1 so the
/// verdict does not depend on the unnormalised size of the tensors.  Two
/// all-zero maps are equivalent with scalar 1; a zero map is never
/// equivalent to a non-zero one.
pub fn equiv_up_to_scalar(a: &TensorMap, b: &TensorMap, tol: f64) -> Result<ScalarEquivalence, SemanticsError> {
    if a.n_inputs != b.n_inputs || a.n_outputs != b.n_outputs {
        return Err(SemanticsError::ShapeMismatch {
            a_in: a.n_inputs,
            a_out: a.n_outputs,
            b_in: b.n_inputs,
            b_out: b.n_outputs,
        });
    }
    let (amax, bmax) = (a.max_abs(), b.max_abs());
    match (amax <= ZERO_EPS, bmax <= ZERO_EPS) {
        (true, true) => {
            return Ok(ScalarEquivalence {
                equivalent: true,
                scalar: Some(Complex64::new(1.0, 0.0)),
                max_residual: amax.max(bmax),
            })
        }
        (true, false) | (false, true) => {
            return Ok(ScalarEquivalence { equivalent: false, scalar: None, max_residual: amax.max(bmax) })
        }
        _ => {}
    }
    let k = b
        .data
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best })
        .0;
    let scalar = a.data[k] / b.data[k];
    let residual = a.max_distance(&b.scaled(scalar)) / amax.max(1.0);
    Ok(ScalarEquivalence { equivalent: residual <= tol, scalar: Some(scalar), max_residual: residual })
}

/// The matrix of a single generator with the given arity.
pub fn generator_tensor(kind: VertexKind, n_in: usize, n_out: usize) -> Result<TensorMap, SemanticsError> {
    let data = match kind {
        VertexKind::H => {
            if (n_in, n_out) != (1, 1) {
                return Err(SemanticsError::HadamardArity { n_in, n_out });
            }
            hadamard_data()
        }
        VertexKind::B => return Err(SemanticsError::BoundaryGenerator),
        VertexKind::Z(_) | VertexKind::X(_) => spider_data(kind, n_in + n_out),
    };
    TensorMap::new(n_in, n_out, data)
}

fn hadamard_data() -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [s, s, s, -s].iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Amplitudes of a spider over its `k` legs, indexed by the leg bits.
fn spider_data(kind: VertexKind, k: usize) -> Vec<Complex64> {
    let n = 1usize << k;
    match kind {
        VertexKind::Z(p) => {
            let mut data = vec![Complex64::new(0.0, 0.0); n];
            let e = Complex64::from_polar(1.0, p.radians());
            data[0] += Complex64::new(1.0, 0.0);
            data[n - 1] += e;
            data
        }
        VertexKind::X(p) => {
            // H^⊗k applied to |0…0⟩ + e^{iα}|1…1⟩.
            let e = Complex64::from_polar(1.0, p.radians());
            let norm = std::f64::consts::FRAC_1_SQRT_2.powi(k as i32);
            (0..n)
                .map(|b| {
                    let sign = if b.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    (Complex64::new(1.0, 0.0) + e * sign) * norm
                })
                .collect()
        }
        _ => unreachable!("spider_data only handles spiders"),
    }
}

/// How the contraction sequence is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContractionOrder {
    /// Repeatedly contract the pair producing the smallest tensor.
    #[default]
    Greedy,
    /// Contract connected pairs in a seeded random order (for testing).
    Random(u64),
}

/// Options for [`evaluate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Largest number of amplitudes any intermediate tensor may hold.
    pub rank_cap: usize,
    pub order: ContractionOrder,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { rank_cap: DEFAULT_RANK_CAP, order: ContractionOrder::Greedy }
    }
}

/// Evaluates `d` with the default rank cap and greedy contraction.
pub fn evaluate(d: &Diagram) -> Result<TensorMap, SemanticsError> {
    evaluate_with(d, &EvalOptions::default())
}

/// A tensor over labelled legs; `legs[0]` is the most significant bit.
#[derive(Debug, Clone)]
struct Tensor {
    legs: Vec<usize>,
    data: Vec<Complex64>,
}

impl Tensor {
    fn scalar(z: Complex64) -> Tensor {
        Tensor { legs: Vec::new(), data: vec![z] }
    }

    /// Reorders legs to `new_legs` (a permutation of the current legs).
    fn permuted(&self, new_legs: &[usize]) -> Tensor {
        if new_legs == self.legs.as_slice() {
            return self.clone();
        }
        let k = self.legs.len();
        let src_pos: Vec<usize> = new_legs
            .iter()
            .map(|l| self.legs.iter().position(|x| x == l).expect("leg present"))
            .collect();
        let mut data = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for (new_idx, slot) in data.iter_mut().enumerate() {
            let mut old_idx = 0usize;
            for (i, &p) in src_pos.iter().enumerate() {
                let bit = (new_idx >> (k - 1 - i)) & 1;
                old_idx |= bit << (k - 1 - p);
            }
            *slot = self.data[old_idx];
        }
        Tensor { legs: new_legs.to_vec(), data }
    }

    /// Contracts pairs of legs carrying the same label (self-loops).
    fn traced(self) -> Tensor {
        let mut t = self;
        loop {
            let dup = t.legs.iter().enumerate().find_map(|(i, l)| {
                t.legs[i + 1..].iter().position(|x| x == l).map(|j| (i, i + 1 + j))
            });
            let Some((i, j)) = dup else { return t };
            let k = t.legs.len();
            let (bi, bj) = (k - 1 - i, k - 1 - j);
            let rest: Vec<usize> =
                t.legs.iter().enumerate().filter(|&(p, _)| p != i && p != j).map(|(_, &l)| l).collect();
            let data = (0..1usize << rest.len())
                .map(|r| {
                    // Spread the remaining bits around positions bi > bj.
                    let low = r & ((1 << bj) - 1);
                    let mid = (r >> bj) & ((1 << (bi - bj - 1)) - 1);
                    let high = r >> (bi - 1);
                    let base = low | (mid << (bj + 1)) | (high << (bi + 1));
                    t.data[base] + t.data[base | (1 << bi) | (1 << bj)]
                })
                .collect();
            t = Tensor { legs: rest, data };
        }
    }

    /// Contracts every shared leg of `a` and `b`.
    fn contract(a: &Tensor, b: &Tensor) -> Tensor {
        let shared: Vec<usize> = a.legs.iter().copied().filter(|l| b.legs.contains(l)).collect();
        let a_only: Vec<usize> = a.legs.iter().copied().filter(|l| !shared.contains(l)).collect();
        let b_only: Vec<usize> = b.legs.iter().copied().filter(|l| !shared.contains(l)).collect();
        let a_order: Vec<usize> = a_only.iter().chain(&shared).copied().collect();
        let b_order: Vec<usize> = shared.iter().chain(&b_only).copied().collect();
        let ap = a.permuted(&a_order);
        let bp = b.permuted(&b_order);
        let (m, s, n) = (1usize << a_only.len(), 1usize << shared.len(), 1usize << b_only.len());
        let mut data = vec![Complex64::new(0.0, 0.0); m * n];
        for i in 0..m {
            let arow = &ap.data[i * s..(i + 1) * s];
            let out = &mut data[i * n..(i + 1) * n];
            for (k, &av) in arow.iter().enumerate() {
                if av == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &bp.data[k * n..(k + 1) * n];
                for (o, &bv) in out.iter_mut().zip(brow) {
                    *o += av * bv;
                }
            }
        }
        Tensor { legs: a_only.into_iter().chain(b_only).collect(), data }
    }
}

fn check_rank(rank: usize, cap: usize) -> Result<(), SemanticsError> {
    let needed = 1u128 << rank.min(127);
    if needed > cap as u128 {
        return Err(SemanticsError::RankCapExceeded { rank, needed, cap });
    }
    Ok(())
}

/// Evaluates `d` to its matrix.
pub fn evaluate_with(d: &Diagram, opts: &EvalOptions) -> Result<TensorMap, SemanticsError> {
    d.validate()?;
    let n_open = d.inputs().len() + d.outputs().len();
    check_rank(n_open, opts.rank_cap)?;

    // Label every edge; a boundary's open label is the label of its edge.
    let mut next_label = 0usize;
    let mut ends: BTreeMap<crate::diagram::VertexId, Vec<usize>> = BTreeMap::new();
    let mut tensors: Vec<Tensor> = Vec::new();
    for (a, b) in d.edges() {
        let label = next_label;
        next_label += 1;
        let a_boundary = d.kind(a) == Some(VertexKind::B);
        let b_boundary = d.kind(b) == Some(VertexKind::B);
        if a_boundary && b_boundary {
            // A bare wire between two boundaries: an explicit identity.
            let other = next_label;
            next_label += 1;
            ends.entry(a).or_default().push(label);
            ends.entry(b).or_default().push(other);
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            tensors.push(Tensor { legs: vec![label, other], data: vec![one, zero, zero, one] });
        } else {
            ends.entry(a).or_default().push(label);
            ends.entry(b).or_default().push(label);
        }
    }
    for (v, kind) in d.vertices() {
        if kind == VertexKind::B {
            continue;
        }
        let legs = ends.get(&v).cloned().unwrap_or_default();
        check_rank(legs.len(), opts.rank_cap)?;
        let data = match kind {
            VertexKind::H => hadamard_data(),
            _ => spider_data(kind, legs.len()),
        };
        tensors.push(Tensor { legs, data }.traced());
    }

    let open: Vec<usize> = d
        .outputs()
        .iter()
        .chain(d.inputs())
        .map(|b| ends[b][0])
        .collect();

    let result = contract_network(tensors, opts)?;
    let result = result.permuted(&open);
    TensorMap::new(d.inputs().len(), d.outputs().len(), result.data)
}

fn contract_network(mut tensors: Vec<Tensor>, opts: &EvalOptions) -> Result<Tensor, SemanticsError> {
    let mut rng = match opts.order {
        ContractionOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        ContractionOrder::Greedy => None,
    };
    if tensors.is_empty() {
        return Ok(Tensor::scalar(Complex64::new(1.0, 0.0)));
    }
    while tensors.len() > 1 {
        let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
        for i in 0..tensors.len() {
            for j in i + 1..tensors.len() {
                let shared = tensors[i].legs.iter().filter(|l| tensors[j].legs.contains(l)).count();
                if shared > 0 {
                    let rank = tensors[i].legs.len() + tensors[j].legs.len() - 2 * shared;
                    candidates.push((rank, i, j));
                }
            }
        }
        if candidates.is_empty() {
            // Disconnected pieces: take outer products, smallest first.
            let mut idx: Vec<usize> = (0..tensors.len()).collect();
            idx.sort_by_key(|&i| tensors[i].legs.len());
            let (i, j) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
            candidates.push((tensors[i].legs.len() + tensors[j].legs.len(), i, j));
        }
        let (rank, i, j) = match rng.as_mut() {
            Some(r) => *candidates.choose(r).expect("non-empty"),
            None => *candidates.iter().min().expect("non-empty"),
        };
        check_rank(rank, opts.rank_cap)?;
        let b = tensors.swap_remove(j);
        let a = tensors.swap_remove(i);
        tensors.push(Tensor::contract(&a, &b));
    }
    Ok(tensors.pop().expect("one tensor remains"))
}
