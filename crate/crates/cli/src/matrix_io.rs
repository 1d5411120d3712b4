//! Matrix file format: `{"rows": [[[re, im], ...], ...]}`, row-major.

use std::path::Path;

use num_complex::Complex64;
use psgate_core::linalg::ComplexMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    #[serde(deserialize_with = "rectangular_rows")]
    pub rows: Vec<Vec<[f64; 2]>>,
}

/// Validated inside the field so serde_json attaches a line/column.
fn rectangular_rows<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<[f64; 2]>>, D::Error> {
    let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
    let Some(first) = rows.first() else {
        return Err(D::Error::custom("matrix has no rows"));
    };
    let width = first.len();
    if width == 0 {
        return Err(D::Error::custom("matrix rows are empty"));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(D::Error::custom(format!(
            "ragged matrix: row {i} has {} entries, row 0 has {width}",
            r.len()
        )));
    }
    if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(D::Error::custom("matrix entries must be finite"));
    }
    Ok(rows)
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self { rows }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let (r, c) = (self.rows.len(), self.rows[0].len());
        ComplexMatrix::from_fn(r, c, |i, j| {
            let [re, im] = self.rows[i][j];
            Complex64::new(re, im)
        })
    }
}

/// Parses a matrix document. Errors carry serde_json's line/column
/// position.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, String> {
    serde_json::from_str::<MatrixJson>(text)
        .map(|m| m.to_matrix())
        .map_err(|e| format!("invalid matrix JSON: {e}"))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_matrix(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(m)).expect("matrix serializes")
}
