//! Lower-triangle JSON state files.
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "dimA": 2,
//!   "dimB": 2,
//!   "entries": [
//!     [0, 0, 0.5, 0.0],
//!     [3, 0, 0.5, 0.0],
//!     [3, 3, 0.5, 0.0]
//!   ]
//! }
//! ```
//!
//! Entries are `[row, col, re, im]` with `row ≥ col`. The canonical form lists
//! nonzero entries in row-major order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::linalg::{BipartiteState, ComplexMatrix, HermitianOperator};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq)]
pub enum StateFileError {
    /// Malformed JSON or wrong field types.
    Parse { line: usize, column: usize, message: String },
    /// Well-formed JSON that does not describe a valid operator.
    Shape(String),
}

impl std::fmt::Display for StateFileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateFileError::Parse { line, column, message } => write!(f, "line {line}, column {column}: {message}"),
            StateFileError::Shape(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for StateFileError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema_version: String,
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    entries: Vec<(usize, usize, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Sorted by `(row, col)`, zero entries removed.
    pub entries: Vec<(usize, usize, f64, f64)>,
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self, StateFileError> {
        let raw: RawFile = serde_json::from_str(text).map_err(|e| StateFileError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(StateFileError::Shape(format!("unsupported schema_version {:?}", raw.schema_version)));
        }
        if raw.dim_a == 0 || raw.dim_b == 0 {
            return Err(StateFileError::Shape("dimA and dimB must be positive".into()));
        }
        let n = raw.dim_a * raw.dim_b;
        let mut map = BTreeMap::new();
        for &(r, c, re, im) in &raw.entries {
            if r >= n || c > r {
                return Err(StateFileError::Shape(format!("entry ({r}, {c}) is outside the lower triangle of a {n}x{n} matrix")));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(StateFileError::Shape(format!("entry ({r}, {c}) is not finite")));
            }
            if r == c && im != 0.0 {
                return Err(StateFileError::Shape(format!("diagonal entry ({r}, {r}) has imaginary part {im}")));
            }
            if map.insert((r, c), (re, im)).is_some() {
                return Err(StateFileError::Shape(format!("duplicate entry ({r}, {c})")));
            }
        }
        let entries =
            map.into_iter().filter(|(_, (re, im))| *re != 0.0 || *im != 0.0).map(|((r, c), (re, im))| (r, c, re, im)).collect();
        Ok(Self { dim_a: raw.dim_a, dim_b: raw.dim_b, entries })
    }

    /// Lower triangle of `op`. Operators without bipartite structure are
    /// written as `dim ⊗ 1`.
    pub fn from_operator(op: &HermitianOperator) -> Self {
        let (dim_a, dim_b) = op.dims().unwrap_or((op.dim(), 1));
        let mut entries = Vec::new();
        for r in 0..op.dim() {
            for c in 0..=r {
                let z = op.get(r, c);
                let im = if r == c { 0.0 } else { z.im };
                if z.re != 0.0 || im != 0.0 {
                    entries.push((r, c, z.re + 0.0, im + 0.0));
                }
            }
        }
        Self { dim_a, dim_b, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn to_operator(&self) -> Result<HermitianOperator, StateFileError> {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for &(r, c, re, im) in &self.entries {
            m[(r, c)] = C64::new(re, im);
            m[(c, r)] = C64::new(re, -im);
        }
        HermitianOperator::bipartite(m, self.dim_a, self.dim_b).map_err(|e| StateFileError::Shape(e.to_string()))
    }

    /// As [`to_operator`](Self::to_operator), also requiring unit trace and PSD.
    pub fn to_state(&self) -> Result<BipartiteState, StateFileError> {
        BipartiteState::new(self.to_operator()?).map_err(|e| StateFileError::Shape(e.to_string()))
    }

    /// Canonical text: one entry per line, shortest round-trip floats.
    pub fn to_json(&self) -> String {
        let num = |x: f64| serde_json::to_string(&x).expect("finite float");
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"schema_version\": \"{SCHEMA_VERSION}\",");
        let _ = writeln!(out, "  \"dimA\": {},", self.dim_a);
        let _ = writeln!(out, "  \"dimB\": {},", self.dim_b);
        if self.entries.is_empty() {
            let _ = writeln!(out, "  \"entries\": []");
        } else {
            let _ = writeln!(out, "  \"entries\": [");
            for (i, &(r, c, re, im)) in self.entries.iter().enumerate() {
                let comma = if i + 1 < self.entries.len() { "," } else { "" };
                let _ = writeln!(out, "    [{r}, {c}, {}, {}]{comma}", num(re), num(im));
            }
            let _ = writeln!(out, "  ]");
        }
        let _ = writeln!(out, "}}");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{max_entangled, random_density};

    #[test]
    fn bell_file_is_canonical() {
        let f = StateFile::from_operator(&max_entangled(2).unwrap());
        let text = f.to_json();
        assert!(text.contains("    [3, 0, 0.5, 0.0],\n"));
        assert_eq!(f.entries.len(), 3);
        assert_eq!(StateFile::parse(&text).unwrap().to_json(), text);
    }

    #[test]
    fn round_trip_random_state() {
        let rho = random_density(2, 3, 3, 5).unwrap();
        let text = StateFile::from_operator(&rho).to_json();
        let back = StateFile::parse(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let op = back.to_state().unwrap();
        assert_eq!(op.dims(), Some((2, 3)));
        assert!(op.matrix().max_abs_diff(rho.matrix()) == 0.0);
    }

    #[test]
    fn parse_errors_carry_position() {
        match StateFile::parse("{\n  \"schema_version\": \"1\",\n  oops\n}") {
            Err(StateFileError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_errors() {
        let upper = r#"{"schema_version": "1", "dimA": 1, "dimB": 2, "entries": [[0, 1, 1.0, 0.0]]}"#;
        assert!(matches!(StateFile::parse(upper), Err(StateFileError::Shape(_))));
        let big = r#"{"schema_version": "1", "dimA": 1, "dimB": 2, "entries": [[2, 0, 1.0, 0.0]]}"#;
        assert!(matches!(StateFile::parse(big), Err(StateFileError::Shape(_))));
        let diag_im = r#"{"schema_version": "1", "dimA": 1, "dimB": 2, "entries": [[1, 1, 1.0, 0.5]]}"#;
        assert!(matches!(StateFile::parse(diag_im), Err(StateFileError::Shape(_))));
        let not_state = r#"{"schema_version": "1", "dimA": 1, "dimB": 2, "entries": [[1, 1, 2.0, 0.0]]}"#;
        let f = StateFile::parse(not_state).unwrap();
        assert!(f.to_operator().is_ok());
        assert!(f.to_state().is_err());
    }

    #[test]
    fn accepts_any_order_and_canonicalizes() {
        let text =
            r#"{"schema_version": "1", "dimA": 1, "dimB": 2, "entries": [[1, 1, 0.5, 0.0], [1, 0, 0.0, 0.0], [0, 0, 0.5, 0.0]]}"#;
        let f = StateFile::parse(text).unwrap();
        assert_eq!(f.entries, vec![(0, 0, 0.5, 0.0), (1, 1, 0.5, 0.0)]);
    }
}
