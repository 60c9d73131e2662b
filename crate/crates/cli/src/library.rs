//! The gate library: reference diagrams and tensors read from data files.
//!
//! Each file holds `{"name", "diagram", "tensor"}` with the diagram and
//! tensor in their usual JSON forms.  The built-in entries (identity, Z_L,
//! X_L, CZ, CNOT) are compiled in from `gates/`; more can be loaded from a
//! directory at run time.

use std::fs;
use std::path::Path;

use redgreen::canon::isomorphic;
use redgreen::io::DiagramJson;
use redgreen::rewrite::{normalize, Policy};
use redgreen::semantics::{equiv_up_to_scalar, evaluate, TensorJson, TensorMap, DEFAULT_TOLERANCE};
use redgreen::Diagram;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::CliError;

const BUILTIN: [(&str, &str); 5] = [
    ("identity.json", include_str!("../gates/identity.json")),
    ("z_l.json", include_str!("../gates/z_l.json")),
    ("x_l.json", include_str!("../gates/x_l.json")),
    ("cz.json", include_str!("../gates/cz.json")),
    ("cnot.json", include_str!("../gates/cnot.json")),
];

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("malformed gate file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("gate {name}: {message}")]
    Invalid { name: String, message: String },
    #[error("gate {name}: reference diagram is not in normal form")]
    NotNormal { name: String },
    #[error("gate {name}: reference tensor does not match the diagram")]
    TensorMismatch { name: String },
    #[error("gate {0} is defined twice")]
    DuplicateName(String),
    #[error("gates {0} and {1} have isomorphic diagrams")]
    Isomorphic(String, String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GateFile {
    name: String,
    diagram: DiagramJson,
    tensor: TensorJson,
}

/// One recognisable gate.
#[derive(Debug, Clone)]
pub struct GateLibraryEntry {
    pub name: String,
    /// Reference diagram, a fixed point of the default normaliser.
    pub diagram: Diagram,
    pub tensor: TensorMap,
}

impl GateLibraryEntry {
    /// Parses and checks one gate file.
    pub fn from_json(text: &str) -> Result<GateLibraryEntry, LibraryError> {
        let file: GateFile = serde_json::from_str(text)?;
        let name = file.name;
        let invalid = |message: String| LibraryError::Invalid { name: name.clone(), message };
        let diagram = Diagram::try_from(&file.diagram).map_err(|e| invalid(e.to_string()))?;
        let tensor = TensorMap::from_json(&file.tensor).map_err(|e| invalid(e.to_string()))?;
        let (normal, trace) = normalize(&diagram, &Policy::default()).map_err(|e| invalid(e.to_string()))?;
        if !trace.is_empty() || isomorphic(&normal, &diagram).is_none() {
            return Err(LibraryError::NotNormal { name });
        }
        let actual = evaluate(&diagram).map_err(|e| invalid(e.to_string()))?;
        let same = equiv_up_to_scalar(&actual, &tensor, DEFAULT_TOLERANCE).is_ok_and(|r| r.equivalent);
        if !same {
            return Err(LibraryError::TensorMismatch { name });
        }
        Ok(GateLibraryEntry { name, diagram, tensor })
    }

    /// Number of logical qubits, when the gate has as many inputs as outputs.
    pub fn qubits(&self) -> Option<usize> {
        let (i, o) = (self.diagram.inputs().len(), self.diagram.outputs().len());
        (i == o).then_some(i)
    }
}

/// An ordered list of pairwise non-isomorphic gates; earlier entries win.
#[derive(Debug, Clone, Default)]
pub struct GateLibrary {
    entries: Vec<GateLibraryEntry>,
}

impl GateLibrary {
    /// The shipped gates.
    pub fn builtin() -> GateLibrary {
        let mut lib = GateLibrary::default();
        for (file, text) in BUILTIN {
            let entry = GateLibraryEntry::from_json(text).unwrap_or_else(|e| panic!("built-in gate {file}: {e}"));
            lib.push(entry).unwrap_or_else(|e| panic!("built-in gate {file}: {e}"));
        }
        lib
    }

    /// Appends an entry, keeping names unique and diagrams non-isomorphic.
    pub fn push(&mut self, entry: GateLibraryEntry) -> Result<(), LibraryError> {
        for e in &self.entries {
            if e.name == entry.name {
                return Err(LibraryError::DuplicateName(entry.name));
            }
            if isomorphic(&e.diagram, &entry.diagram).is_some() {
                return Err(LibraryError::Isomorphic(e.name.clone(), entry.name));
            }
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Appends every `*.json` gate file in `dir`, in file-name order.
    pub fn extend_from_dir(&mut self, dir: &Path) -> Result<(), CliError> {
        let read_dir = fs::read_dir(dir).map_err(|source| CliError::Read { path: dir.to_path_buf(), source })?;
        let mut paths: Vec<_> = read_dir
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let text = fs::read_to_string(&path).map_err(|source| CliError::Read { path: path.clone(), source })?;
            let entry = GateLibraryEntry::from_json(&text).map_err(|e| CliError::parse(&path, e))?;
            self.push(entry).map_err(|e| CliError::parse(&path, e))?;
        }
        Ok(())
    }

    pub fn entries(&self) -> &[GateLibraryEntry] {
        &self.entries
    }

    /// Looks a gate up by name, ignoring ASCII case.
    pub fn get(&self, name: &str) -> Option<&GateLibraryEntry> {
        self.entries.iter().find(|e| e.name.eq_ignore_ascii_case(name))
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }
}
