//! Concrete Dedekind complete Φ-algebra models.
//!
//! Two models are provided:
//!
//! * `Atomic { dim }`: ℝ^dim with coordinatewise order and multiplication.
//! * `Dyadic { max_depth }`: finitely-valued step functions on `[0, 1)` whose
//!   breakpoints are dyadic rationals of depth at most `max_depth`.
//!
//! In both models the lattice operations and the multiplication act
//! pointwise, the unit `e` is the constant one function, and the weak order
//! units are exactly the strictly positive elements.

mod dyadic;
mod literal;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dyadic::{uniform_cells, DyadicCell, Piece, DEPTH_CAP};
pub(crate) use dyadic::{decompose, endpoint_to_units};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Atomic {
        dim: usize,
    },
    Dyadic {
        #[serde(alias = "depth")]
        max_depth: u8,
    },
}

impl ModelSpec {
    pub fn atomic(dim: usize) -> Result<Self> {
        ModelSpec::Atomic { dim }.validated()
    }

    pub fn dyadic(max_depth: u8) -> Result<Self> {
        ModelSpec::Dyadic { max_depth }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            ModelSpec::Atomic { dim: 0 } => {
                Err(Error::InvalidModel("atomic dimension must be positive".into()))
            }
            ModelSpec::Dyadic { max_depth } if max_depth > DEPTH_CAP => Err(Error::InvalidModel(
                format!("dyadic depth {max_depth} exceeds the cap {DEPTH_CAP}"),
            )),
            m => Ok(m),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, ModelSpec::Atomic { .. })
    }

    pub(crate) fn ensure_same(&self, other: &ModelSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ModelMismatch {
                left: *self,
                right: *other,
            })
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Atomic { dim } => write!(f, "atomic:{dim}"),
            ModelSpec::Dyadic { max_depth } => write!(f, "dyadic:{max_depth}"),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// Parses `atomic:N` or `dyadic:DEPTH`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, n) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidModel(format!("expected KIND:N, got `{s}`")))?;
        let bad = |_| Error::InvalidModel(format!("bad size in `{s}`"));
        match kind.trim() {
            "atomic" => ModelSpec::atomic(n.trim().parse().map_err(bad)?),
            "dyadic" => ModelSpec::dyadic(n.trim().parse().map_err(bad)?),
            other => Err(Error::InvalidModel(format!("unknown model kind `{other}`"))),
        }
    }
}

/// A finite real coefficient.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Scalar(f64);

impl Scalar {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Scalar(norm(value)))
        } else {
            Err(Error::NonFinite(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Scalar {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Scalar::new(value)
    }
}

impl From<Scalar> for f64 {
    fn from(s: Scalar) -> f64 {
        s.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CombineOp {
    Add,
    Sub,
    Mul,
    Sup,
    Inf,
}

impl CombineOp {
    pub fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            CombineOp::Add => x + y,
            CombineOp::Sub => x - y,
            CombineOp::Mul => x * y,
            CombineOp::Sup => x.max(y),
            CombineOp::Inf => x.min(y),
        }
    }
}

/// Folds `-0.0` into `+0.0` so that equal step functions share one canonical
/// form.
#[inline]
pub(crate) fn norm(v: f64) -> f64 {
    v + 0.0
}

#[derive(Clone, Debug, PartialEq)]
enum Data {
    Atomic(Vec<f64>),
    Dyadic(Vec<Piece>),
}

/// A member of one of the concrete models.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    model: ModelSpec,
    data: Data,
}

impl Element {
    pub fn atomic(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidModel(
                "atomic dimension must be positive".into(),
            ));
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Element {
            model: ModelSpec::Atomic { dim: values.len() },
            data: Data::Atomic(values.into_iter().map(norm).collect()),
        })
    }

    pub fn dyadic(max_depth: u8, pieces: Vec<Piece>) -> Result<Self> {
        let model = ModelSpec::dyadic(max_depth)?;
        dyadic::validate(&pieces, max_depth)?;
        let pieces = pieces
            .into_iter()
            .map(|p| Piece::new(p.cell, norm(p.value)))
            .collect();
        Ok(Element {
            model,
            data: Data::Dyadic(dyadic::coalesce(pieces)),
        })
    }

    /// Step function with the given values on the uniform partition at
    /// `depth`.
    pub fn dyadic_uniform(max_depth: u8, depth: u8, values: &[f64]) -> Result<Self> {
        if values.len() != 1usize << depth {
            return Err(Error::InvalidLiteral(format!(
                "expected {} values for depth {depth}",
                1usize << depth
            )));
        }
        let pieces = uniform_cells(depth)
            .zip(values)
            .map(|(c, &v)| Piece::new(c, v))
            .collect();
        Element::dyadic(max_depth, pieces)
    }

    pub fn constant(model: ModelSpec, value: f64) -> Self {
        let value = norm(value);
        let data = match model {
            ModelSpec::Atomic { dim } => Data::Atomic(vec![value; dim]),
            ModelSpec::Dyadic { .. } => Data::Dyadic(vec![Piece::new(DyadicCell::ROOT, value)]),
        };
        Element { model, data }
    }

    pub fn zero(model: ModelSpec) -> Self {
        Element::constant(model, 0.0)
    }

    /// The multiplicative unit `e`.
    pub fn unit(model: ModelSpec) -> Self {
        Element::constant(model, 1.0)
    }

    pub fn model(&self) -> ModelSpec {
        self.model
    }

    pub fn as_atomic(&self) -> Option<&[f64]> {
        match &self.data {
            Data::Atomic(v) => Some(v),
            Data::Dyadic(_) => None,
        }
    }

    pub fn pieces(&self) -> Option<&[Piece]> {
        match &self.data {
            Data::Dyadic(p) => Some(p),
            Data::Atomic(_) => None,
        }
    }

    /// Number of atoms (atomic) or canonical pieces (dyadic).
    pub fn len(&self) -> usize {
        match &self.data {
            Data::Atomic(v) => v.len(),
            Data::Dyadic(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values per atom (atomic) or per canonical piece (dyadic).
    pub fn values(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        match &self.data {
            Data::Atomic(v) => Box::new(v.iter().copied()),
            Data::Dyadic(p) => Box::new(p.iter().map(|p| p.value)),
        }
    }

    pub fn value_at_atom(&self, index: usize) -> Option<f64> {
        self.as_atomic().and_then(|v| v.get(index).copied())
    }

    /// Value of a dyadic element at a point `s` of `[0, 1)`.
    pub fn value_at_point(&self, s: f64) -> Option<f64> {
        let pieces = self.pieces()?;
        pieces
            .iter()
            .find(|p| p.cell.lo() <= s && s < p.cell.hi())
            .map(|p| p.value)
    }

    /// Applies `f` atom-wise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Element {
        let data = match &self.data {
            Data::Atomic(v) => Data::Atomic(v.iter().map(|&x| norm(f(x))).collect()),
            Data::Dyadic(p) => Data::Dyadic(dyadic::coalesce(
                p.iter()
                    .map(|p| Piece::new(p.cell, norm(f(p.value))))
                    .collect(),
            )),
        };
        Element {
            model: self.model,
            data,
        }
    }

    /// Applies `f` atom-wise on the common refinement of both elements.
    pub fn zip_with(&self, other: &Element, f: impl Fn(f64, f64) -> f64) -> Result<Element> {
        self.model.ensure_same(&other.model)?;
        let data = match (&self.data, &other.data) {
            (Data::Atomic(a), Data::Atomic(b)) => Data::Atomic(
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| norm(f(x, y)))
                    .collect(),
            ),
            (Data::Dyadic(a), Data::Dyadic(b)) => Data::Dyadic(dyadic::coalesce(
                dyadic::merge_with(a, b, |x, y| norm(f(x, y))),
            )),
            _ => unreachable!("equal models share a representation"),
        };
        Ok(Element {
            model: self.model,
            data,
        })
    }

    /// Atom-wise fold over the common refinement, without building an element.
    pub(crate) fn zip_all(&self, other: &Element, pred: impl Fn(f64, f64) -> bool) -> Result<bool> {
        self.model.ensure_same(&other.model)?;
        Ok(match (&self.data, &other.data) {
            (Data::Atomic(a), Data::Atomic(b)) => a.iter().zip(b).all(|(&x, &y)| pred(x, y)),
            (Data::Dyadic(a), Data::Dyadic(b)) => {
                let mut ok = true;
                dyadic::merge_with(a, b, |x, y| {
                    ok &= pred(x, y);
                    0.0
                });
                ok
            }
            _ => unreachable!("equal models share a representation"),
        })
    }

    pub fn combine(&self, other: &Element, op: CombineOp) -> Result<Element> {
        self.zip_with(other, |x, y| op.apply(x, y))
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.combine(other, CombineOp::Add)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.combine(other, CombineOp::Sub)
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.combine(other, CombineOp::Mul)
    }

    pub fn sup(&self, other: &Element) -> Result<Element> {
        self.combine(other, CombineOp::Sup)
    }

    pub fn inf(&self, other: &Element) -> Result<Element> {
        self.combine(other, CombineOp::Inf)
    }

    pub fn scale(&self, t: f64) -> Element {
        self.map(|x| t * x)
    }

    pub fn neg(&self) -> Element {
        self.map(|x| -x)
    }

    /// `|x| = x ∨ (−x)`.
    pub fn modulus(&self) -> Element {
        self.map(f64::abs)
    }

    /// `x⁺ = x ∨ 0`.
    pub fn pos_part(&self) -> Element {
        self.map(|x| x.max(0.0))
    }

    /// `x⁻ = (−x) ∨ 0`.
    pub fn neg_part(&self) -> Element {
        self.map(|x| (-x).max(0.0))
    }

    pub fn all(&self, pred: impl Fn(f64) -> bool) -> bool {
        self.values().all(pred)
    }

    pub fn any(&self, pred: impl Fn(f64) -> bool) -> bool {
        self.values().any(pred)
    }

    pub fn is_zero(&self) -> bool {
        self.all(|v| v == 0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.all(|v| v >= 0.0)
    }

    /// In these models a weak order unit is a strictly positive element.
    pub fn is_weak_order_unit(&self) -> bool {
        self.all(|v| v > 0.0)
    }

    /// `self ≪ other`: `other − self` is a weak order unit.
    pub fn strictly_less(&self, other: &Element) -> Result<bool> {
        self.zip_all(other, |x, y| y - x > 0.0)
    }

    /// Exact order `self ≤ other`.
    pub fn le(&self, other: &Element) -> Result<bool> {
        self.zip_all(other, |x, y| x <= y)
    }

    /// `self ≤ other + tol·e`.
    pub fn le_within(&self, other: &Element, tol: f64) -> Result<bool> {
        self.zip_all(other, |x, y| x <= y + tol)
    }

    /// `|self − other| ≤ tol·e`.
    pub fn approx_eq(&self, other: &Element, tol: f64) -> Result<bool> {
        self.zip_all(other, |x, y| (x - y).abs() <= tol)
    }

    /// Sup norm `max |x|` over atoms.
    pub fn max_abs(&self) -> f64 {
        self.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_value(&self) -> f64 {
        self.values().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }

    /// Atom (or canonical piece) carrying the largest `|x|`.
    pub fn argmax_abs(&self) -> usize {
        self.values()
            .enumerate()
            .fold((0, -1.0), |(bi, bv), (i, v)| {
                if v.abs() > bv {
                    (i, v.abs())
                } else {
                    (bi, bv)
                }
            })
            .0
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values().find(|v| !v.is_finite()) {
            Some(v) => Err(Error::NonFinite(v)),
            None => Ok(()),
        }
    }

    /// Atomic: the coordinate values. Dyadic: values on the uniform grid at
    /// `max_depth` (only sensible for small depths).
    pub fn sample_values(&self) -> Vec<f64> {
        match (&self.data, self.model) {
            (Data::Atomic(v), _) => v.clone(),
            (Data::Dyadic(p), ModelSpec::Dyadic { max_depth }) => p
                .iter()
                .flat_map(|p| {
                    let n = 1usize << (max_depth - p.cell.depth);
                    std::iter::repeat_n(p.value, n)
                })
                .collect(),
            _ => unreachable!(),
        }
    }
}
