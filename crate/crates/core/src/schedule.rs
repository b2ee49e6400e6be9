//! Ordered lists of measured Pauli operators and their text format.
//!
//! ```text
//! # comment lines and blank lines are ignored
//! n=3
//! +XXI
//! +ZZX
//! -YZZ
//! ```
//!
//! The earliest measurement comes first. [`MeasurementSchedule::to_text`]
//! writes the canonical form (header, then one signed operator per line), and
//! parsing a canonical file then writing it back reproduces it byte for byte.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

#[derive(Clone, PartialEq, Eq)]
pub struct MeasurementSchedule {
    n: usize,
    ops: Vec<PauliString>,
}

impl MeasurementSchedule {
    pub fn new(n: usize, ops: Vec<PauliString>) -> Result<Self> {
        for op in &ops {
            Self::validate(n, op)?;
        }
        Ok(Self { n, ops })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, ops: Vec::new() }
    }

    /// Convenience constructor from strings such as `["+XXI", "ZZX"]`.
    pub fn from_strs(n: usize, ops: &[&str]) -> Result<Self> {
        let ops = ops
            .iter()
            .map(|s| s.parse::<PauliString>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, ops)
    }

    fn validate(n: usize, op: &PauliString) -> Result<()> {
        if op.n() != n {
            return Err(Error::Dimension {
                expected: n,
                found: op.n(),
            });
        }
        if !op.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        if op.is_identity() {
            return Err(Error::IdentityMeasurement);
        }
        Ok(())
    }

    pub fn push(&mut self, op: PauliString) -> Result<()> {
        Self::validate(self.n, &op)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[PauliString] {
        &self.ops
    }

    /// Number of measurements τ.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// The most recent `depth` measurements (all of them when `depth ≥ τ`).
    pub fn truncated(&self, depth: usize) -> MeasurementSchedule {
        let start = self.ops.len().saturating_sub(depth);
        MeasurementSchedule {
            n: self.n,
            ops: self.ops[start..].to_vec(),
        }
    }

    /// This schedule followed by `other`.
    pub fn concat(&self, other: &MeasurementSchedule) -> Result<MeasurementSchedule> {
        if other.n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        let mut ops = self.ops.clone();
        ops.extend(other.ops.iter().cloned());
        Ok(MeasurementSchedule { n: self.n, ops })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for op in &self.ops {
            out.push_str(&op.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut ops = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            match n {
                None => {
                    let value = line
                        .strip_prefix("n=")
                        .ok_or_else(|| err(format!("expected header `n=<int>`, found {line:?}")))?;
                    n = Some(
                        value
                            .trim()
                            .parse()
                            .map_err(|_| err(format!("invalid qubit count {value:?}")))?,
                    );
                }
                Some(n) => {
                    let op = PauliString::from_str(line).map_err(|e| match e {
                        Error::Parse { message, .. } => err(message),
                        other => other,
                    })?;
                    if op.n() != n {
                        return Err(err(format!(
                            "operator {line:?} has {} qubits, header says {n}",
                            op.n()
                        )));
                    }
                    if !op.is_hermitian() {
                        return Err(err(format!("operator {line:?} is not Hermitian")));
                    }
                    if op.is_identity() {
                        return Err(err("identity operators cannot be measured".into()));
                    }
                    ops.push(op);
                }
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "missing header `n=<int>`".into(),
        })?;
        Ok(Self { n, ops })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

impl fmt::Debug for MeasurementSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasurementSchedule")
            .field("n", &self.n)
            .field("ops", &self.ops)
            .finish()
    }
}

impl FromStr for MeasurementSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
