//! JSON frame files.
//!
//! ```json
//! {"p": 3.0, "dim": 2, "N": 3, "field": "complex",
//!  "omega": [[[1.0, 0.0], [0.5, -0.5]], ...],
//!  "tau":   [[[0.0, 1.0], [2.0,  0.0]], ...]}
//! ```
//!
//! Real-field entries are plain numbers, complex-field entries are
//! `[re, im]` pairs. Doubles are written in shortest round-trip form, so
//! `load(save(F)) == F` bit for bit.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frames::Pasf;
use crate::sip::{Field, SipSpace, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn from_scalar(z: Complex64, field: Field) -> Self {
        match field {
            Field::Real => Entry::Real(z.re),
            Field::Complex => Entry::Complex([z.re, z.im]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub p: f64,
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub field: Field,
    pub omega: Vec<Vec<Entry>>,
    pub tau: Vec<Vec<Entry>>,
}

impl FrameFile {
    pub fn from_frame(f: &Pasf) -> Self {
        let field = f.space().field();
        let rows = |vs: &[Vector]| {
            vs.iter()
                .map(|v| {
                    v.coords()
                        .iter()
                        .map(|&z| Entry::from_scalar(z, field))
                        .collect()
                })
                .collect()
        };
        Self {
            p: f.space().p(),
            dim: f.space().dim(),
            n: f.len(),
            field,
            omega: rows(f.omega()),
            tau: rows(f.tau()),
        }
    }

    pub fn to_frame(&self) -> Result<Pasf> {
        let space = SipSpace::new(self.dim, self.p, self.field)?;
        let parse = |name: &str, rows: &[Vec<Entry>]| -> Result<Vec<Vector>> {
            if rows.len() != self.n {
                return Err(Error::Format(format!(
                    "{name} has {} vectors, N = {}",
                    rows.len(),
                    self.n
                )));
            }
            rows.iter()
                .enumerate()
                .map(|(i, row)| {
                    if row.len() != self.dim {
                        return Err(Error::Format(format!(
                            "{name}[{i}] has {} entries, dim = {}",
                            row.len(),
                            self.dim
                        )));
                    }
                    let coords = row
                        .iter()
                        .map(|e| match (e, self.field) {
                            (Entry::Real(x), _) => Ok(Complex64::new(*x, 0.0)),
                            (Entry::Complex([re, im]), Field::Complex) => {
                                Ok(Complex64::new(*re, *im))
                            }
                            (Entry::Complex(_), Field::Real) => Err(Error::Format(format!(
                                "{name}[{i}]: [re, im] entry in a real frame"
                            ))),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Vector::new(space, coords)
                })
                .collect()
        };
        Pasf::new(space, parse("omega", &self.omega)?, parse("tau", &self.tau)?)
    }
}

pub fn frame_to_json(f: &Pasf) -> String {
    serde_json::to_string_pretty(&FrameFile::from_frame(f)).expect("frame serializes")
}

pub fn frame_from_json(s: &str) -> Result<Pasf> {
    let file: FrameFile = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
    file.to_frame()
}

pub fn save_frame(f: &Pasf, path: &Path) -> Result<()> {
    let mut text = frame_to_json(f);
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn load_frame(path: &Path) -> Result<Pasf> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    frame_from_json(&text)
}

/// Vector as a list of entries in the frame-file convention.
pub fn vector_entries(v: &Vector) -> Vec<Entry> {
    let field = v.space().field();
    v.coords()
        .iter()
        .map(|&z| Entry::from_scalar(z, field))
        .collect()
}

pub fn serialize_vector<S: Serializer>(v: &Vector, s: S) -> std::result::Result<S::Ok, S::Error> {
    vector_entries(v).serialize(s)
}
