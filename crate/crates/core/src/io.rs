//! JSON documents: matrices, algebras, maps, semidirect elements and
//! construction reports.
//!
//! Complex numbers are `[re, im]` pairs; matrix entries are row-major. Floats
//! are written in shortest round-trip form and parsed exactly, so
//! serialize → parse is bit-exact.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::StarAlgebra;
use crate::constructions::ConstructionReport;
use crate::error::{LabError, Result};
use crate::matrix::{Matrix, C64};
use crate::semidirect::SemidirectElement;
use crate::supermap::SuperMap;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SuperMapJson {
    pub algebra: AlgebraJson,
    pub images: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SemidirectElementJson {
    pub a: Vec<[f64; 2]>,
    pub x: MatrixJson,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        MatrixJson {
            n: m.dim(),
            entries: m.row_major().into_iter().map(pair).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for Matrix {
    type Error = LabError;
    fn try_from(j: &MatrixJson) -> Result<Matrix> {
        let entries: Vec<C64> = j.entries.iter().map(complex).collect();
        Matrix::new(j.n, &entries)
    }
}

impl From<&StarAlgebra> for AlgebraJson {
    fn from(a: &StarAlgebra) -> Self {
        AlgebraJson {
            blocks: a.blocks().to_vec(),
        }
    }
}

impl TryFrom<&AlgebraJson> for StarAlgebra {
    type Error = LabError;
    fn try_from(j: &AlgebraJson) -> Result<StarAlgebra> {
        StarAlgebra::new(&j.blocks)
    }
}

impl From<&SuperMap> for SuperMapJson {
    fn from(m: &SuperMap) -> Self {
        SuperMapJson {
            algebra: m.algebra().into(),
            images: m.images().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl TryFrom<&SuperMapJson> for SuperMap {
    type Error = LabError;
    fn try_from(j: &SuperMapJson) -> Result<SuperMap> {
        let alg = StarAlgebra::try_from(&j.algebra)?;
        let images = j.images.iter().map(Matrix::try_from).collect::<Result<Vec<_>>>()?;
        SuperMap::from_images(&alg, images)
    }
}

impl From<&SemidirectElement> for SemidirectElementJson {
    fn from(e: &SemidirectElement) -> Self {
        SemidirectElementJson {
            a: e.a.iter().copied().map(pair).collect(),
            x: (&e.x).into(),
        }
    }
}

impl TryFrom<&SemidirectElementJson> for SemidirectElement {
    type Error = LabError;
    fn try_from(j: &SemidirectElementJson) -> Result<SemidirectElement> {
        Ok(SemidirectElement {
            a: j.a.iter().map(complex).collect(),
            x: Matrix::try_from(&j.x)?,
        })
    }
}

fn parse_err(what: &str, e: serde_json::Error) -> LabError {
    // serde_json reports "at line L column C"
    LabError::Parse(format!("{what}: {e}"))
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let j: MatrixJson = serde_json::from_str(text).map_err(|e| parse_err("matrix", e))?;
    Matrix::try_from(&j)
}

pub fn parse_supermap(text: &str) -> Result<SuperMap> {
    let j: SuperMapJson = serde_json::from_str(text).map_err(|e| parse_err("supermap", e))?;
    SuperMap::try_from(&j)
}

pub fn parse_algebra(text: &str) -> Result<StarAlgebra> {
    let j: AlgebraJson = serde_json::from_str(text).map_err(|e| parse_err("algebra", e))?;
    StarAlgebra::try_from(&j)
}

pub fn matrix_to_string(m: &Matrix) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("serializable")
}

pub fn supermap_to_string(m: &SuperMap) -> String {
    serde_json::to_string(&SuperMapJson::from(m)).expect("serializable")
}

pub fn matrix_value(m: &Matrix) -> Value {
    serde_json::to_value(MatrixJson::from(m)).expect("serializable")
}

pub fn supermap_value(m: &SuperMap) -> Value {
    serde_json::to_value(SuperMapJson::from(m)).expect("serializable")
}

/// `{"P", "Sigma", "D", "residuals", "singular_values", "passed"}`.
pub fn construction_report_value(r: &ConstructionReport) -> Value {
    json!({
        "P": matrix_value(&r.p),
        "Sigma": supermap_value(&r.sigma),
        "D": r.dmap.as_ref().map(supermap_value),
        "residuals": r.residuals,
        "singular_values": r.singular_values,
        "passed": r.passed,
    })
}
