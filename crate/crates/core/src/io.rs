//! JSON files: matrices as `[re, im]` pairs in row-major order, and problem
//! files bundling an operator with an optional fundamental symmetry and
//! tolerance overrides.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::densela::{CMatrix, Tolerance, C64};
use crate::error::{Error, Result};
use crate::krein::{KOperator, KreinSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let data = self.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        CMatrix::new(self.rows, self.cols, data)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(rename = "J")]
    pub j: MatrixFile,
}

impl SpaceFile {
    pub fn from_space(h: &KreinSpace) -> Self {
        Self { j: MatrixFile::from_matrix(h.j()) }
    }

    pub fn to_space(&self, tol: &Tolerance) -> Result<KreinSpace> {
        KreinSpace::new(self.j.to_matrix()?, tol)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
}

impl ToleranceOverrides {
    /// `base` with any present field replaced.
    pub fn apply(&self, base: Tolerance) -> Result<Tolerance> {
        Tolerance::new(
            self.rank_tol.unwrap_or(base.rank_tol),
            self.residual_tol.unwrap_or(base.residual_tol),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceFile>,
    pub operator: MatrixFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceOverrides>,
}

impl ProblemFile {
    pub fn new(c: &KOperator) -> Self {
        let space = (!c.domain().is_hilbert()).then(|| SpaceFile::from_space(c.domain()));
        Self { space, operator: MatrixFile::from_matrix(c.matrix()), tolerance: None }
    }

    /// The file's overrides applied on top of `base`.
    pub fn tolerance(&self, base: Tolerance) -> Result<Tolerance> {
        self.tolerance.unwrap_or_default().apply(base)
    }

    /// The operator on its space; `J = I` when the space is omitted.
    pub fn to_operator(&self, tol: &Tolerance) -> Result<KOperator> {
        let m = self.operator.to_matrix()?;
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, not square",
                m.rows(),
                m.cols()
            )));
        }
        let space = match &self.space {
            Some(s) => s.to_space(tol)?,
            None => KreinSpace::hilbert(m.rows()),
        };
        if space.dim() != m.rows() {
            return Err(Error::DimensionMismatch(format!(
                "J is {n}x{n} but the operator is {r}x{r}",
                n = space.dim(),
                r = m.rows()
            )));
        }
        KOperator::endo(space, m)
    }
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    from_json(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value) + "\n")
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}
