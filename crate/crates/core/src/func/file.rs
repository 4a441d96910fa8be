//! JSON function files:
//!
//! ```json
//! {"kind":"table","n":3,"hex":"aa"}
//! {"kind":"ltf","n":2,"weights":[1,"7/3"],"theta":0}
//! ```
//!
//! See [`BitTableFunction::to_hex`] for the digit layout. LTF weights are
//! integers, decimal numbers, or exact `"p/q"` strings.

use std::path::Path;

use serde_json::{json, Value};

use super::ltf::LtfSpec;
use super::table::BitTableFunction;
use crate::error::{LabError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionFile {
    Table(BitTableFunction),
    Ltf(LtfSpec),
}

impl FunctionFile {
    pub fn n(&self) -> usize {
        match self {
            FunctionFile::Table(t) => t.n(),
            FunctionFile::Ltf(l) => l.n(),
        }
    }

    /// Truth table of the function (LTFs are materialised).
    pub fn to_table(&self) -> Result<BitTableFunction> {
        match self {
            FunctionFile::Table(t) => Ok(t.clone()),
            FunctionFile::Ltf(l) => l.to_table(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            FunctionFile::Table(t) => json!({"kind": "table", "n": t.n(), "hex": t.to_hex()}),
            FunctionFile::Ltf(l) => json!({
                "kind": "ltf",
                "n": l.n(),
                "weights": l.weights().iter().map(LtfSpec::weight_to_json).collect::<Vec<_>>(),
                "theta": LtfSpec::weight_to_json(&l.theta()),
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| LabError::Format(format!("missing field {k:?}")))
        };
        let n = field("n")?
            .as_u64()
            .ok_or_else(|| LabError::Format("\"n\" must be a positive integer".into()))?
            as usize;
        match field("kind")?.as_str() {
            Some("table") => {
                let hex = field("hex")?
                    .as_str()
                    .ok_or_else(|| LabError::Format("\"hex\" must be a string".into()))?;
                Ok(FunctionFile::Table(BitTableFunction::from_hex(n, hex)?))
            }
            Some("ltf") => {
                let weights = field("weights")?
                    .as_array()
                    .ok_or_else(|| LabError::Format("\"weights\" must be an array".into()))?
                    .iter()
                    .map(LtfSpec::weight_from_json)
                    .collect::<Result<Vec<_>>>()?;
                if weights.len() != n {
                    return Err(LabError::Format(format!(
                        "n = {n} but {} weights given",
                        weights.len()
                    )));
                }
                let theta = match v.get("theta") {
                    Some(t) => LtfSpec::weight_from_json(t)?,
                    None => num_rational::Rational64::from_integer(0),
                };
                Ok(FunctionFile::Ltf(LtfSpec::new(weights, theta)?))
            }
            other => Err(LabError::Format(format!("unknown kind {other:?}"))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string(&self.to_json())? + "\n")?;
        Ok(())
    }
}
