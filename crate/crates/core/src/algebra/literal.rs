//! Text forms of elements.
//!
//! Atomic: `[1, 0.5, 2]`.
//! Dyadic: `{"pieces":[{"i":[0.0,0.5],"v":1.0},{"i":[0.5,1.0],"v":0.0}]}`;
//! each interval must have dyadic endpoints at depth `max_depth` or coarser.
//! In either model a bare number stands for that multiple of the unit.

use std::fmt;

use serde_json::{json, Value};

use super::dyadic::{decompose, endpoint_to_units};
use super::{Data, Element, ModelSpec, Piece};
use crate::error::{Error, Result};

fn number(v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::InvalidLiteral(format!("expected a number, got {v}")))
}

impl Element {
    pub fn to_json(&self) -> Value {
        match &self.data {
            Data::Atomic(v) => json!(v),
            Data::Dyadic(p) => json!({
                "pieces": p
                    .iter()
                    .map(|p| json!({"i": [p.cell.lo(), p.cell.hi()], "v": p.value}))
                    .collect::<Vec<_>>()
            }),
        }
    }

    pub fn from_json(model: ModelSpec, value: &Value) -> Result<Element> {
        match model {
            ModelSpec::Atomic { dim } => {
                if let Some(n) = value.as_f64() {
                    return Ok(Element::constant(model, n));
                }
                let arr = value.as_array().ok_or_else(|| {
                    Error::InvalidLiteral(format!("atomic literal must be an array, got {value}"))
                })?;
                if arr.len() != dim {
                    return Err(Error::ModelMismatch {
                        left: model,
                        right: ModelSpec::Atomic { dim: arr.len() },
                    });
                }
                Element::atomic(arr.iter().map(number).collect::<Result<_>>()?)
            }
            ModelSpec::Dyadic { max_depth } => {
                if let Some(n) = value.as_f64() {
                    return Ok(Element::constant(model, n));
                }
                let pieces = value
                    .get("pieces")
                    .and_then(Value::as_array)
                    .ok_or_else(|| {
                        Error::InvalidLiteral(format!(
                            "dyadic literal must be {{\"pieces\": [...]}}, got {value}"
                        ))
                    })?;
                let mut out = Vec::new();
                for p in pieces {
                    let interval = p.get("i").and_then(Value::as_array).ok_or_else(|| {
                        Error::InvalidLiteral(format!("piece without interval: {p}"))
                    })?;
                    if interval.len() != 2 {
                        return Err(Error::InvalidLiteral(format!("bad interval in {p}")));
                    }
                    let lo = endpoint_to_units(number(&interval[0])?, max_depth)?;
                    let hi = endpoint_to_units(number(&interval[1])?, max_depth)?;
                    if lo >= hi {
                        return Err(Error::InvalidLiteral(format!("empty interval in {p}")));
                    }
                    let v = number(p.get("v").unwrap_or(&Value::Null))?;
                    out.extend(
                        decompose(lo, hi, max_depth)
                            .into_iter()
                            .map(|c| Piece::new(c, v)),
                    );
                }
                Element::dyadic(max_depth, out)
            }
        }
    }

    /// Parses the text form for the given model.
    pub fn parse(model: ModelSpec, text: &str) -> Result<Element> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidLiteral(format!("`{text}`: {e}")))?;
        Element::from_json(model, &value)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.data {
            Data::Atomic(v) => {
                write!(f, "[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Data::Dyadic(_) => write!(f, "{}", self.to_json()),
        }
    }
}
