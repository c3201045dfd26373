//! JSON interchange for matrices, states and unitary families.
//!
//! A matrix is `{"rows": r, "cols": c, "re": [...], "im": [...]}` with the
//! entries in row-major order.

use serde::{Deserialize, Serialize};

use crate::error::{QcextError, Result};
use crate::linalg::{c, ComplexMatrix, DensityOperator, SubsystemShape};
use crate::mubs::UnitaryFamily;
use crate::perms::PermutationRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in 0..cols {
                re.push(m[(r, col)].re);
                im.push(m[(r, col)].im);
            }
        }
        MatrixJson { rows, cols, re, im }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.rows * self.cols;
        if self.rows == 0 || self.cols == 0 {
            return Err(QcextError::Format("rows and cols must be positive".into()));
        }
        if self.re.len() != n || self.im.len() != n {
            return Err(QcextError::Format(format!(
                "expected {n} entries in re and im, found {} and {}",
                self.re.len(),
                self.im.len()
            )));
        }
        if self.re.iter().chain(&self.im).any(|v| !v.is_finite()) {
            return Err(QcextError::Format("non-finite matrix entry".into()));
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |r, col| {
            let i = r * self.cols + col;
            c(self.re[i], self.im[i])
        }))
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let m: MatrixJson =
        serde_json::from_str(text).map_err(|e| QcextError::Format(e.to_string()))?;
    m.to_matrix()
}

/// Reads a density operator split as `dims` (e.g. [dA, dE]).
pub fn parse_state(text: &str, dims: Vec<usize>) -> Result<DensityOperator> {
    DensityOperator::new(parse_matrix(text)?, SubsystemShape::new(dims)?)
}

/// Family export: header plus the member matrices.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyExport {
    pub kind: String,
    pub dim: usize,
    pub count: usize,
    pub members: Vec<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutations: Option<Vec<PermutationRecord>>,
}

impl FamilyExport {
    pub fn new(fam: &UnitaryFamily) -> Self {
        FamilyExport {
            kind: fam.kind().to_string(),
            dim: fam.dim(),
            count: fam.len(),
            members: fam.members().iter().map(MatrixJson::from).collect(),
            permutations: None,
        }
    }
}
