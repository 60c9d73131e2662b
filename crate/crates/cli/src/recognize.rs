//! Recognising a normal form as a library gate.
//!
//! A diagram is matched against each entry in library order, first by
//! isomorphism and then, if none is isomorphic, by tensor comparison within
//! the rank cap.  The logical qubits of a compiled pattern come out in the
//! order of their lattice positions, which need not be the library's, so
//! both checks also try every consistent reordering of the qubits (the same
//! permutation on inputs and outputs), identity first.

use redgreen::canon::isomorphic;
use redgreen::semantics::{equiv_up_to_scalar, evaluate_with, EvalOptions, TensorMap};
use redgreen::{Diagram, VertexId};
use serde::{Deserialize, Serialize};

use crate::library::GateLibrary;

/// Qubit reorderings are only tried up to this many qubits.
pub const MAX_PERMUTED_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Isomorphism,
    Tensor,
}

/// A recognised gate.  `qubit_order[k]` is the diagram qubit that plays
/// the library gate's qubit `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recognition {
    pub gate: String,
    pub method: Method,
    pub qubit_order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecognizeOptions {
    pub rank_cap: usize,
    pub tol: f64,
}

/// All permutations of `0..n` in lexicographic order (identity first).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // Next lexicographic permutation.
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("a larger element exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

/// `d` with input and output `k` taken from position `order[k]`.
pub fn reorder_qubits(d: &Diagram, order: &[usize]) -> Diagram {
    let pick = |list: &[VertexId]| order.iter().map(|&k| list[k]).collect();
    Diagram::from_parts(d.vertices(), d.edges(), pick(d.inputs()), pick(d.outputs()))
        .expect("reordering boundaries keeps a valid diagram")
}

/// The tensor of [`reorder_qubits`]`(d, order)` given the tensor of `d`.
pub fn reorder_tensor(t: &TensorMap, order: &[usize]) -> TensorMap {
    let n_in = t.n_inputs();
    let n_out = t.n_outputs();
    let shuffle = |index: usize, n: usize| {
        order.iter().enumerate().fold(0, |acc, (k, &src)| {
            let bit = (index >> (n - 1 - src)) & 1;
            acc | (bit << (n - 1 - k))
        })
    };
    let mut data = vec![t.get(0, 0); t.rows() * t.cols()];
    for row in 0..t.rows() {
        for col in 0..t.cols() {
            data[shuffle(row, n_out) * t.cols() + shuffle(col, n_in)] = t.get(row, col);
        }
    }
    TensorMap::new(n_in, n_out, data).expect("same shape")
}

fn orders_for(d: &Diagram, qubits: Option<usize>) -> Vec<Vec<usize>> {
    match qubits {
        Some(n) if d.inputs().len() == n && d.outputs().len() == n && n <= MAX_PERMUTED_QUBITS => permutations(n),
        Some(n) if d.inputs().len() == n && d.outputs().len() == n => vec![(0..n).collect()],
        _ => vec![Vec::new()],
    }
}

fn signature_matches(d: &Diagram, e: &Diagram) -> bool {
    d.inputs().len() == e.inputs().len() && d.outputs().len() == e.outputs().len()
}

/// The first library gate `d` implements, or `None`.
pub fn recognize(d: &Diagram, library: &GateLibrary, options: &RecognizeOptions) -> Option<Recognition> {
    let candidates: Vec<_> = library.entries().iter().filter(|e| signature_matches(d, &e.diagram)).collect();
    for entry in &candidates {
        for order in orders_for(d, entry.qubits()) {
            let view = if order.is_empty() { d.clone() } else { reorder_qubits(d, &order) };
            if isomorphic(&view, &entry.diagram).is_some() {
                return Some(Recognition { gate: entry.name.clone(), method: Method::Isomorphism, qubit_order: order });
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let tensor = evaluate_with(d, &EvalOptions { rank_cap: options.rank_cap, ..EvalOptions::default() }).ok()?;
    for entry in &candidates {
        for order in orders_for(d, entry.qubits()) {
            let view = if order.is_empty() { tensor.clone() } else { reorder_tensor(&tensor, &order) };
            if equiv_up_to_scalar(&view, &entry.tensor, options.tol).is_ok_and(|r| r.equivalent) {
                return Some(Recognition { gate: entry.name.clone(), method: Method::Tensor, qubit_order: order });
            }
        }
    }
    None
}
