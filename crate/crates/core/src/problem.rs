//! Problem files and solver dispatch.
//!
//! ```json
//! {"model": {"kind": "atomic", "dim": 2},
//!  "function": {"dsl": "x*x"},
//!  "interval": {"a": [0, 0], "b": [2, 2]},
//!  "target": [2.25, 0.25], "tol": 1e-8, "seed": 42}
//! ```
//!
//! `function` may also be `{"builtin": name}` or, for the complex solver,
//! `{"cpoly": [c0, c1, ...]}` with complex literals `{"re": .., "im": ..}`.
//! Complex interval endpoints use the same literal form.

use std::fmt;
use std::str::FromStr;

use serde_json::Value;

use crate::algebra::{Element, ModelSpec};
use crate::calculus::OrderInterval;
use crate::complex::ComplexElement;
use crate::dsl::FunctionHandle;
use crate::error::{Error, Result};
use crate::solvers::{self, ComplexPoly, SolveReport, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Ivt,
    Evt,
    Rolle,
    Mvt,
    Cmvt,
    Bound,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        SolverKind::Ivt,
        SolverKind::Evt,
        SolverKind::Rolle,
        SolverKind::Mvt,
        SolverKind::Cmvt,
        SolverKind::Bound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Ivt => "ivt",
            SolverKind::Evt => "evt",
            SolverKind::Rolle => "rolle",
            SolverKind::Mvt => "mvt",
            SolverKind::Cmvt => "cmvt",
            SolverKind::Bound => "bound",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<SolverKind> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidProblem(format!("unknown solver `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Real(FunctionHandle),
    Complex(ComplexPoly),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub model: ModelSpec,
    pub function: FunctionSpec,
    a: Value,
    b: Value,
    target: Option<Value>,
    /// Optional inner segment `[c, d]` for the mean value solver.
    segment: Option<(Value, Value)>,
    pub tol: Option<f64>,
    pub seed: u64,
}

fn field<'a>(value: &'a Value, key: &str) -> Result<&'a Value> {
    value
        .get(key)
        .ok_or_else(|| Error::InvalidProblem(format!("missing field `{key}`")))
}

fn parse_model(value: &Value) -> Result<ModelSpec> {
    let model: ModelSpec = match value {
        Value::String(s) => s.parse()?,
        other => serde_json::from_value(other.clone())
            .map_err(|e| Error::InvalidProblem(format!("bad model {other}: {e}")))?,
    };
    model.validated()
}

impl Problem {
    pub fn from_json(value: &Value) -> Result<Problem> {
        let model = parse_model(field(value, "model")?)?;
        let function_value = field(value, "function")?;
        let function = match function_value.get("cpoly") {
            Some(coeffs) => FunctionSpec::Complex(ComplexPoly::from_json(model, coeffs)?),
            None => FunctionSpec::Real(FunctionHandle::from_json(model, function_value)?),
        };
        let interval = field(value, "interval")?;
        let tol = match value.get("tol") {
            None | Some(Value::Null) => None,
            Some(t) => Some(
                t.as_f64()
                    .filter(|t| t.is_finite() && *t > 0.0)
                    .ok_or_else(|| Error::InvalidProblem(format!("bad tol {t}")))?,
            ),
        };
        let seed = match value.get("seed") {
            None | Some(Value::Null) => 0,
            Some(s) => s
                .as_u64()
                .ok_or_else(|| Error::InvalidProblem(format!("bad seed {s}")))?,
        };
        let segment = match value.get("segment") {
            None | Some(Value::Null) => None,
            Some(s) => Some((field(s, "c")?.clone(), field(s, "d")?.clone())),
        };
        Ok(Problem {
            model,
            function,
            a: field(interval, "a")?.clone(),
            b: field(interval, "b")?.clone(),
            target: value.get("target").cloned(),
            segment,
            tol,
            seed,
        })
    }

    pub fn parse(text: &str) -> Result<Problem> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidProblem(format!("problem file is not JSON: {e}")))?;
        Problem::from_json(&value)
    }

    pub fn config(&self) -> SolverConfig {
        let cfg = SolverConfig::for_model(self.model).with_seed(self.seed);
        match self.tol {
            Some(t) => cfg.with_tol(t),
            None => cfg,
        }
    }

    pub fn handle(&self) -> Result<&FunctionHandle> {
        match &self.function {
            FunctionSpec::Real(h) => Ok(h),
            FunctionSpec::Complex(_) => Err(Error::InvalidProblem(
                "a complex polynomial only works with the cmvt solver".into(),
            )),
        }
    }

    pub fn interval(&self) -> Result<OrderInterval> {
        OrderInterval::new(
            Element::from_json(self.model, &self.a)?,
            Element::from_json(self.model, &self.b)?,
        )
    }

    pub fn target(&self) -> Result<Element> {
        let t = self
            .target
            .as_ref()
            .ok_or_else(|| Error::InvalidProblem("missing field `target`".into()))?;
        Element::from_json(self.model, t)
    }

    fn complex_poly(&self) -> Result<ComplexPoly> {
        match &self.function {
            FunctionSpec::Complex(p) => Ok(p.clone()),
            FunctionSpec::Real(FunctionHandle::Dsl { expr, .. }) => {
                ComplexPoly::from_expr(expr, self.model)
            }
            FunctionSpec::Real(h) => Err(Error::NonPolynomialComplexHandle(h.to_string())),
        }
    }

    pub fn solve(&self, kind: SolverKind) -> Result<SolveReport> {
        self.solve_with(kind, &self.config())
    }

    pub fn solve_with(&self, kind: SolverKind, cfg: &SolverConfig) -> Result<SolveReport> {
        if kind == SolverKind::Cmvt {
            let a = ComplexElement::from_json(self.model, &self.a)?;
            let b = ComplexElement::from_json(self.model, &self.b)?;
            return solvers::solve_complex_mvt(&self.complex_poly()?, &a, &b, cfg);
        }
        let f = self.handle()?;
        let interval = self.interval()?;
        match kind {
            SolverKind::Ivt => solvers::solve_ivt(f, &interval, &self.target()?, cfg),
            SolverKind::Evt => solvers::solve_evt(f, &interval, cfg),
            SolverKind::Rolle => solvers::solve_rolle(f, &interval, cfg),
            SolverKind::Mvt => match &self.segment {
                Some((c, d)) => solvers::solve_mvt_segment(
                    f,
                    &interval,
                    &Element::from_json(self.model, c)?,
                    &Element::from_json(self.model, d)?,
                    cfg,
                ),
                None => solvers::solve_mvt(f, &interval, cfg),
            },
            SolverKind::Bound => solvers::order_bound(f, &interval, cfg),
            SolverKind::Cmvt => unreachable!("handled above"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::Certificate;

    #[test]
    fn ivt_problem_file() {
        let p = Problem::parse(
            r#"{"model":{"kind":"atomic","dim":2},"function":{"dsl":"x*x"},
                "interval":{"a":[0,0],"b":[2,2]},"target":[2.25,0.25],"tol":1e-8,"seed":42}"#,
        )
        .unwrap();
        let r = p.solve(SolverKind::Ivt).unwrap();
        assert_eq!(r.certificate, Certificate::Feasible);
        assert_eq!(
            r.to_json().to_string(),
            p.solve(SolverKind::Ivt).unwrap().to_json().to_string()
        );
    }

    #[test]
    fn complex_problem_file() {
        let p = Problem::parse(
            r#"{"model":"atomic:1","function":{"cpoly":[0,0,1]},
                "interval":{"a":{"re":[0],"im":[0]},"b":{"re":[1],"im":[1]}}}"#,
        )
        .unwrap();
        assert_eq!(p.solve(SolverKind::Cmvt).unwrap().certificate, Certificate::Feasible);
        assert!(p.solve(SolverKind::Ivt).is_err());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(Problem::parse("{").is_err());
        assert!(Problem::parse(r#"{"model":"atomic:2"}"#).is_err());
        assert!(Problem::parse(
            r#"{"model":"atomic:2","function":{"dsl":"x"},"interval":{"a":[0,0],"b":[1,1]},"tol":-1}"#
        )
        .is_err());
    }
}
