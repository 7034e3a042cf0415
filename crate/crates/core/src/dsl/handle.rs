use std::fmt;

use serde_json::{json, Value};

use super::ast::FuncExpr;
use super::builtins::Builtin;
use super::diff::differentiate;
use super::parser::parse_for;
use crate::algebra::{Element, ModelSpec};
use crate::calculus::estimate_derivative;
use crate::error::{Error, Result};

/// Anything that maps elements to elements of the same model.
pub trait LatticeMap {
    fn eval(&self, x: &Element) -> Result<Element>;

    /// `f′(x)`; the default is the numeric estimate.
    fn derivative(&self, x: &Element) -> Result<Element> {
        estimate_derivative(self, x)
    }

    /// True when the map acts atom-wise, so that local band preservation
    /// holds without sampling.
    fn lbp_by_construction(&self) -> bool {
        false
    }
}

impl<T: LatticeMap + ?Sized> LatticeMap for &T {
    fn eval(&self, x: &Element) -> Result<Element> {
        (**self).eval(x)
    }

    fn derivative(&self, x: &Element) -> Result<Element> {
        (**self).derivative(x)
    }

    fn lbp_by_construction(&self) -> bool {
        (**self).lbp_by_construction()
    }
}

/// Adapter turning a closure into a [`LatticeMap`] with a numeric derivative.
pub struct FnMap<F>(pub F);

impl<F: Fn(&Element) -> Result<Element>> LatticeMap for FnMap<F> {
    fn eval(&self, x: &Element) -> Result<Element> {
        (self.0)(x)
    }
}

/// A function the tools can evaluate: a DSL expression or a registered
/// builtin.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionHandle {
    Dsl {
        expr: FuncExpr,
        /// Symbolic derivative, absent for non-smooth expressions.
        derivative: Option<FuncExpr>,
    },
    Builtin(Builtin),
}

impl FunctionHandle {
    pub fn dsl(expr: FuncExpr) -> FunctionHandle {
        let derivative = differentiate(&expr).ok();
        FunctionHandle::Dsl { expr, derivative }
    }

    /// Parses `text` for `model`.
    pub fn parse(text: &str, model: ModelSpec) -> Result<FunctionHandle> {
        Ok(FunctionHandle::dsl(parse_for(text, model)?))
    }

    pub fn builtin(name: &str) -> Result<FunctionHandle> {
        Ok(FunctionHandle::Builtin(name.parse()?))
    }

    pub fn expr(&self) -> Option<&FuncExpr> {
        match self {
            FunctionHandle::Dsl { expr, .. } => Some(expr),
            FunctionHandle::Builtin(_) => None,
        }
    }

    pub fn symbolic_derivative(&self) -> Option<&FuncExpr> {
        match self {
            FunctionHandle::Dsl { derivative, .. } => derivative.as_ref(),
            FunctionHandle::Builtin(_) => None,
        }
    }

    pub fn evaluate(&self, x: &Element) -> Result<Element> {
        match self {
            FunctionHandle::Dsl { expr, .. } => expr.evaluate(x),
            FunctionHandle::Builtin(b) => b.eval(x),
        }
    }

    /// Declared domain box, `None` meaning the whole model.
    pub fn domain(&self, model: ModelSpec) -> Option<(Element, Element)> {
        match self {
            FunctionHandle::Dsl { .. } => None,
            FunctionHandle::Builtin(b) => b.domain(model),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            FunctionHandle::Dsl { expr, .. } => json!({ "dsl": expr.to_string() }),
            FunctionHandle::Builtin(b) => json!({ "builtin": b.name() }),
        }
    }

    pub fn from_json(model: ModelSpec, value: &Value) -> Result<FunctionHandle> {
        if let Some(text) = value.get("dsl").and_then(Value::as_str) {
            FunctionHandle::parse(text, model)
        } else if let Some(name) = value.get("builtin").and_then(Value::as_str) {
            FunctionHandle::builtin(name)
        } else {
            Err(Error::InvalidProblem(format!(
                "function must be {{\"dsl\": ...}} or {{\"builtin\": ...}}, got {value}"
            )))
        }
    }
}

impl LatticeMap for FunctionHandle {
    fn eval(&self, x: &Element) -> Result<Element> {
        self.evaluate(x)
    }

    fn derivative(&self, x: &Element) -> Result<Element> {
        match self.symbolic_derivative() {
            Some(d) => d.evaluate(x),
            None => estimate_derivative(self, x),
        }
    }

    fn lbp_by_construction(&self) -> bool {
        match self {
            FunctionHandle::Dsl { .. } => true,
            FunctionHandle::Builtin(b) => b.lbp_by_construction(),
        }
    }
}

impl fmt::Display for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionHandle::Dsl { expr, .. } => write!(f, "{expr}"),
            FunctionHandle::Builtin(b) => write!(f, "builtin {b}"),
        }
    }
}
