use std::path::Path;

use serde::{Deserialize, Serialize};

use super::hermitian::HermitianMatrix;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// JSON matrix literal: `{ "dim": n, "re": [[...]], "im": [[...]] }`.
///
/// `im` is optional and defaults to zero. Serialization omits it for real
/// matrices. Floats are written with round-trip precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixLiteral {
    pub dim: usize,
    /// Column count of a rectangular matrix; absent for square ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixLiteral {
    pub fn to_matrix(&self) -> Result<Matrix> {
        let m = Matrix::from_parts(&self.re, self.im.as_deref())?;
        if m.rows() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "matrix literal `dim`",
                expected: self.dim,
                found: m.rows(),
            });
        }
        let cols = self.cols.unwrap_or(self.dim);
        if m.cols() != cols {
            return Err(Error::DimensionMismatch {
                context: "matrix literal column count",
                expected: cols,
                found: m.cols(),
            });
        }
        Ok(m)
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_matrix()?)
    }
}

impl From<&Matrix> for MatrixLiteral {
    fn from(m: &Matrix) -> Self {
        Self {
            dim: m.rows(),
            cols: (m.cols() != m.rows()).then_some(m.cols()),
            re: m.re_rows(),
            im: if m.is_real() { None } else { Some(m.im_rows()) },
        }
    }
}

impl From<&HermitianMatrix> for MatrixLiteral {
    fn from(h: &HermitianMatrix) -> Self {
        h.as_matrix().into()
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixLiteral::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let lit = MatrixLiteral::deserialize(d)?;
        lit.to_hermitian().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixLiteral::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let lit = MatrixLiteral::deserialize(d)?;
        lit.to_matrix().map_err(serde::de::Error::custom)
    }
}

pub fn parse_matrix(json: &str) -> Result<Matrix> {
    serde_json::from_str::<MatrixLiteral>(json)?.to_matrix()
}

pub fn parse_hermitian(json: &str) -> Result<HermitianMatrix> {
    serde_json::from_str::<MatrixLiteral>(json)?.to_hermitian()
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn read_hermitian(path: impl AsRef<Path>) -> Result<HermitianMatrix> {
    parse_hermitian(&std::fs::read_to_string(path)?)
}
