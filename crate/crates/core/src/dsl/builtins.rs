//! Closed registry of built-in functions on atomic models.
//!
//! Unlike DSL expressions, builtins may mix coordinates, so several of them
//! are deliberately not locally band preserving.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{Element, ModelSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `(x₁, x₂, …) ↦ (x₁, 1 − x₁, x₃, …)` on `[0, e]`.
    SwizzleAffine,
    /// `(x₁, x₂, …) ↦ (x₁, x₁², x₃, …)` on `[0, e]`.
    FirstSquare,
    /// `(xₙ) ↦ (kₙ(xₙ))` with the ramps of [`kn`].
    KnThreshold,
    /// `(x₁, x₂) ↦ (√|x₁|·[x₂ = 0], 0)`.
    ThinSqrt,
    /// `(x₁, x₂, …) ↦ ([x₁ ≥ 0], x₂, …)`, an atom-wise step.
    Heaviside,
}

/// `kₙ(t) = 0` for `t ≤ 1/(2n)`, `1` for `t ≥ 1/n`, linear in between.
pub fn kn(n: usize, t: f64) -> f64 {
    let n = n as f64;
    let (lo, hi) = (0.5 / n, 1.0 / n);
    if t <= lo {
        0.0
    } else if t >= hi {
        1.0
    } else {
        (t - lo) / (hi - lo)
    }
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::SwizzleAffine,
        Builtin::FirstSquare,
        Builtin::KnThreshold,
        Builtin::ThinSqrt,
        Builtin::Heaviside,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::SwizzleAffine => "swizzle_affine",
            Builtin::FirstSquare => "first_square",
            Builtin::KnThreshold => "kn_threshold",
            Builtin::ThinSqrt => "thin_sqrt",
            Builtin::Heaviside => "heaviside",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Builtin::SwizzleAffine => "(x1, x2, ...) -> (x1, 1 - x1, ...) on [0, e]; not LBP",
            Builtin::FirstSquare => "(x1, x2, ...) -> (x1, x1^2, ...) on [0, e]; not LBP",
            Builtin::KnThreshold => "(x_n) -> (k_n(x_n)) with piecewise-linear ramps; LBP",
            Builtin::ThinSqrt => "(x1, x2) -> (sqrt|x1| * [x2 = 0], 0); not LBP",
            Builtin::Heaviside => "(x1, x2, ...) -> ([x1 >= 0], x2, ...); LBP, discontinuous",
        }
    }

    /// Whether the rule acts atom-wise, so that it is locally band preserving.
    pub fn lbp_by_construction(self) -> bool {
        matches!(self, Builtin::KnThreshold | Builtin::Heaviside)
    }

    /// Smallest admissible dimension.
    pub fn min_dim(self) -> usize {
        match self {
            Builtin::SwizzleAffine | Builtin::FirstSquare | Builtin::ThinSqrt => 2,
            Builtin::KnThreshold | Builtin::Heaviside => 1,
        }
    }

    /// Declared domain as a closed box `[lo, hi]`, or `None` for the whole
    /// model.
    pub fn domain(self, model: ModelSpec) -> Option<(Element, Element)> {
        match self {
            Builtin::SwizzleAffine | Builtin::FirstSquare => {
                Some((Element::zero(model), Element::unit(model)))
            }
            _ => None,
        }
    }

    fn check(self, x: &Element) -> Result<usize> {
        let model = x.model();
        let dim = match model {
            ModelSpec::Atomic { dim } => dim,
            ModelSpec::Dyadic { .. } => {
                return Err(Error::InvalidModel(format!(
                    "builtin {} is only defined on atomic models, got {model}",
                    self.name()
                )))
            }
        };
        if dim < self.min_dim() || (self == Builtin::ThinSqrt && dim != 2) {
            return Err(Error::InvalidModel(format!(
                "builtin {} is not defined in dimension {dim}",
                self.name()
            )));
        }
        if let Some((lo, hi)) = self.domain(model) {
            if !lo.le(x)? || !x.le(&hi)? {
                return Err(Error::DomainViolation(format!(
                    "{x} lies outside the domain [{lo}, {hi}] of {}",
                    self.name()
                )));
            }
        }
        Ok(dim)
    }

    pub fn eval(self, x: &Element) -> Result<Element> {
        self.check(x)?;
        let v = x.as_atomic().expect("checked atomic");
        let mut out = v.to_vec();
        match self {
            Builtin::SwizzleAffine => out[1] = 1.0 - v[0],
            Builtin::FirstSquare => out[1] = v[0] * v[0],
            Builtin::KnThreshold => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = kn(i + 1, v[i]);
                }
            }
            Builtin::ThinSqrt => {
                out[0] = if v[1] == 0.0 { v[0].abs().sqrt() } else { 0.0 };
                out[1] = 0.0;
            }
            Builtin::Heaviside => out[0] = if v[0] >= 0.0 { 1.0 } else { 0.0 },
        }
        Element::atomic(out)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Builtin> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownIdentifier {
                name: s.to_string(),
                offset: 0,
            })
    }
}
