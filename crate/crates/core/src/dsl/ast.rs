use std::fmt;

use crate::algebra::{Element, Scalar};
use crate::error::{Error, Result};

/// Real functions applied atom-wise by [`FuncExpr::Map`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarFn {
    Sin,
    Cos,
    Exp,
    Tanh,
    /// `t ↦ sqrt(t² + 1)`.
    SqrtShift,
    /// `t ↦ 1/t`; closes the derivative of `sqrtshift` under differentiation.
    Recip,
}

impl ScalarFn {
    pub const ALL: [ScalarFn; 6] = [
        ScalarFn::Sin,
        ScalarFn::Cos,
        ScalarFn::Exp,
        ScalarFn::Tanh,
        ScalarFn::SqrtShift,
        ScalarFn::Recip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScalarFn::Sin => "sin",
            ScalarFn::Cos => "cos",
            ScalarFn::Exp => "exp",
            ScalarFn::Tanh => "tanh",
            ScalarFn::SqrtShift => "sqrtshift",
            ScalarFn::Recip => "recip",
        }
    }

    pub fn from_name(name: &str) -> Option<ScalarFn> {
        ScalarFn::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn apply(self, t: f64) -> f64 {
        match self {
            ScalarFn::Sin => t.sin(),
            ScalarFn::Cos => t.cos(),
            ScalarFn::Exp => t.exp(),
            ScalarFn::Tanh => t.tanh(),
            ScalarFn::SqrtShift => t.hypot(1.0),
            ScalarFn::Recip => 1.0 / t,
        }
    }
}

/// Expression tree of a lattice-valued function of one lattice variable `x`.
///
/// Every node acts atom-wise, so each output atom depends only on the same
/// input atom.
#[derive(Clone, Debug, PartialEq)]
pub enum FuncExpr {
    Var,
    Unit,
    Scalar(Scalar),
    Const(Element),
    Add(Box<FuncExpr>, Box<FuncExpr>),
    Sub(Box<FuncExpr>, Box<FuncExpr>),
    Mul(Box<FuncExpr>, Box<FuncExpr>),
    Sup(Box<FuncExpr>, Box<FuncExpr>),
    Inf(Box<FuncExpr>, Box<FuncExpr>),
    Abs(Box<FuncExpr>),
    Pow(Box<FuncExpr>, u32),
    Map(ScalarFn, Box<FuncExpr>),
}

#[allow(clippy::should_implement_trait)]
impl FuncExpr {
    pub fn scalar(t: f64) -> FuncExpr {
        FuncExpr::Scalar(Scalar::new(t).expect("finite scalar literal"))
    }

    pub fn add(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn sup(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Sup(Box::new(a), Box::new(b))
    }

    pub fn inf(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Inf(Box::new(a), Box::new(b))
    }

    pub fn abs(a: FuncExpr) -> FuncExpr {
        FuncExpr::Abs(Box::new(a))
    }

    pub fn pow(a: FuncExpr, k: u32) -> FuncExpr {
        assert!(k >= 1, "power exponent must be positive");
        FuncExpr::Pow(Box::new(a), k)
    }

    pub fn map(f: ScalarFn, a: FuncExpr) -> FuncExpr {
        FuncExpr::Map(f, Box::new(a))
    }

    pub fn children(&self) -> Vec<&FuncExpr> {
        match self {
            FuncExpr::Var | FuncExpr::Unit | FuncExpr::Scalar(_) | FuncExpr::Const(_) => vec![],
            FuncExpr::Add(a, b)
            | FuncExpr::Sub(a, b)
            | FuncExpr::Mul(a, b)
            | FuncExpr::Sup(a, b)
            | FuncExpr::Inf(a, b) => vec![a, b],
            FuncExpr::Abs(a) | FuncExpr::Pow(a, _) | FuncExpr::Map(_, a) => vec![a],
        }
    }

    pub fn node_name(&self) -> &'static str {
        match self {
            FuncExpr::Var => "x",
            FuncExpr::Unit => "e",
            FuncExpr::Scalar(_) => "scalar",
            FuncExpr::Const(_) => "const",
            FuncExpr::Add(..) => "add",
            FuncExpr::Sub(..) => "sub",
            FuncExpr::Mul(..) => "mul",
            FuncExpr::Sup(..) => "sup",
            FuncExpr::Inf(..) => "inf",
            FuncExpr::Abs(_) => "abs",
            FuncExpr::Pow(..) => "pow",
            FuncExpr::Map(f, _) => f.name(),
        }
    }

    pub fn depends_on_var(&self) -> bool {
        matches!(self, FuncExpr::Var) || self.children().iter().any(|c| c.depends_on_var())
    }

    /// True for the canonical zero function produced by constant folding.
    pub fn is_zero(&self) -> bool {
        matches!(self, FuncExpr::Scalar(s) if s.value() == 0.0)
    }

    /// Evaluates at `x`; all nodes act atom-wise on the model of `x`.
    pub fn evaluate(&self, x: &Element) -> Result<Element> {
        let out = self.eval_node(x)?;
        out.check_finite()?;
        Ok(out)
    }

    fn eval_node(&self, x: &Element) -> Result<Element> {
        let model = x.model();
        Ok(match self {
            FuncExpr::Var => x.clone(),
            FuncExpr::Unit => Element::unit(model),
            FuncExpr::Scalar(t) => Element::constant(model, t.value()),
            FuncExpr::Const(c) => {
                model.ensure_same(&c.model())?;
                c.clone()
            }
            FuncExpr::Add(a, b) => a.eval_node(x)?.add(&b.eval_node(x)?)?,
            FuncExpr::Sub(a, b) => a.eval_node(x)?.sub(&b.eval_node(x)?)?,
            FuncExpr::Mul(a, b) => a.eval_node(x)?.mul(&b.eval_node(x)?)?,
            FuncExpr::Sup(a, b) => a.eval_node(x)?.sup(&b.eval_node(x)?)?,
            FuncExpr::Inf(a, b) => a.eval_node(x)?.inf(&b.eval_node(x)?)?,
            FuncExpr::Abs(a) => a.eval_node(x)?.modulus(),
            FuncExpr::Pow(a, k) => {
                let k = i32::try_from(*k).map_err(|_| Error::DomainViolation("exponent too large".into()))?;
                a.eval_node(x)?.map(|v| v.powi(k))
            }
            FuncExpr::Map(f, a) => a.eval_node(x)?.map(|v| f.apply(v)),
        })
    }

    /// Evaluates atom-wise on a single real value. Constant elements are only
    /// meaningful per atom, so they are rejected here.
    pub fn evaluate_scalar(&self, t: f64) -> Option<f64> {
        Some(match self {
            FuncExpr::Var => t,
            FuncExpr::Unit => 1.0,
            FuncExpr::Scalar(s) => s.value(),
            FuncExpr::Const(_) => return None,
            FuncExpr::Add(a, b) => a.evaluate_scalar(t)? + b.evaluate_scalar(t)?,
            FuncExpr::Sub(a, b) => a.evaluate_scalar(t)? - b.evaluate_scalar(t)?,
            FuncExpr::Mul(a, b) => a.evaluate_scalar(t)? * b.evaluate_scalar(t)?,
            FuncExpr::Sup(a, b) => a.evaluate_scalar(t)?.max(b.evaluate_scalar(t)?),
            FuncExpr::Inf(a, b) => a.evaluate_scalar(t)?.min(b.evaluate_scalar(t)?),
            FuncExpr::Abs(a) => a.evaluate_scalar(t)?.abs(),
            FuncExpr::Pow(a, k) => a.evaluate_scalar(t)?.powi(*k as i32),
            FuncExpr::Map(f, a) => f.apply(a.evaluate_scalar(t)?),
        })
    }
}

fn fmt_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 {
        write!(f, "({v:?})")
    } else {
        write!(f, "{v:?}")
    }
}

/// Pretty-printing: binary nodes are fully parenthesised so the output
/// reparses to the same tree.
impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncExpr::Var => write!(f, "x"),
            FuncExpr::Unit => write!(f, "e"),
            FuncExpr::Scalar(s) => fmt_number(f, s.value()),
            FuncExpr::Const(c) => match c.as_atomic() {
                Some(values) => {
                    write!(f, "[")?;
                    for (i, v) in values.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{v:?}")?;
                    }
                    write!(f, "]")
                }
                // Dyadic constants have no grammar form; they only arise
                // from programmatic construction.
                None => write!(f, "{c}"),
            },
            FuncExpr::Add(a, b) => write!(f, "({a} + {b})"),
            FuncExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            FuncExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            FuncExpr::Sup(a, b) => write!(f, "sup({a}, {b})"),
            FuncExpr::Inf(a, b) => write!(f, "inf({a}, {b})"),
            FuncExpr::Abs(a) => write!(f, "abs({a})"),
            FuncExpr::Pow(a, k) => write!(f, "({a})^{k}"),
            FuncExpr::Map(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
