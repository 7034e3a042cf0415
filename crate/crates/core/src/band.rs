//! Bands, band projections and inequality-induced band decompositions.
//!
//! A band is stored as the canonical indicator element of its support region
//! (values in `{0, 1}`), so band equality is indicator equality and every
//! band is a projection band.

use std::fmt;

use serde_json::{json, Value};

use crate::algebra::{decompose, endpoint_to_units, DyadicCell, Element, ModelSpec, Piece};
use crate::error::{Error, Result};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandOp {
    Join,
    Meet,
    /// Complement of the first operand; the second is ignored.
    Complement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    indicator: Element,
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

impl Band {
    pub fn whole(model: ModelSpec) -> Band {
        Band {
            indicator: Element::unit(model),
        }
    }

    pub fn empty(model: ModelSpec) -> Band {
        Band {
            indicator: Element::zero(model),
        }
    }

    pub fn from_atoms(dim: usize, atoms: &[usize]) -> Result<Band> {
        let mut ind = vec![0.0; dim];
        for &a in atoms {
            *ind.get_mut(a).ok_or_else(|| {
                Error::InvalidLiteral(format!("atom {a} out of range for dimension {dim}"))
            })? = 1.0;
        }
        Ok(Band {
            indicator: Element::atomic(ind)?,
        })
    }

    /// Union of `[lo, hi)` intervals with dyadic endpoints.
    pub fn from_intervals(max_depth: u8, intervals: &[(f64, f64)]) -> Result<Band> {
        let model = ModelSpec::dyadic(max_depth)?;
        let full = endpoint_to_units(1.0, max_depth)?;
        let mut band = Band::empty(model);
        for &(lo, hi) in intervals {
            let lo = endpoint_to_units(lo, max_depth)?;
            let hi = endpoint_to_units(hi, max_depth)?;
            if lo >= hi {
                return Err(Error::InvalidLiteral(format!(
                    "empty band interval [{lo}, {hi})"
                )));
            }
            let pieces = [(0, lo, 0.0), (lo, hi, 1.0), (hi, full, 0.0)]
                .into_iter()
                .flat_map(|(a, b, v)| {
                    decompose(a, b, max_depth)
                        .into_iter()
                        .map(move |c| Piece::new(c, v))
                })
                .collect();
            let indicator = Element::dyadic(max_depth, pieces)?;
            band = band.join(&Band { indicator })?;
        }
        Ok(band)
    }

    /// Region where `pred` holds atom-wise.
    pub fn where_value(x: &Element, pred: impl Fn(f64) -> bool) -> Band {
        Band {
            indicator: x.map(|v| flag(pred(v))),
        }
    }

    /// Region where `pred(x, y)` holds atom-wise on the common refinement.
    pub fn where_pair(x: &Element, y: &Element, pred: impl Fn(f64, f64) -> bool) -> Result<Band> {
        Ok(Band {
            indicator: x.zip_with(y, |a, b| flag(pred(a, b)))?,
        })
    }

    pub fn model(&self) -> ModelSpec {
        self.indicator.model()
    }

    /// `P(e)`.
    pub fn indicator(&self) -> &Element {
        &self.indicator
    }

    /// Atom indices of an atomic band.
    pub fn atoms(&self) -> Option<Vec<usize>> {
        self.indicator.as_atomic().map(|v| {
            v.iter()
                .enumerate()
                .filter(|(_, &m)| m != 0.0)
                .map(|(i, _)| i)
                .collect()
        })
    }

    /// Canonical dyadic cells of a dyadic band.
    pub fn cells(&self) -> Option<Vec<DyadicCell>> {
        self.indicator.pieces().map(|p| {
            p.iter()
                .filter(|p| p.value != 0.0)
                .map(|p| p.cell)
                .collect()
        })
    }

    /// Maximal intervals of a dyadic band (adjacent cells merged).
    pub fn intervals(&self) -> Option<Vec<(f64, f64)>> {
        let cells = self.cells()?;
        let mut runs: Vec<(f64, f64)> = Vec::new();
        for c in cells {
            match runs.last_mut() {
                Some(last) if last.1 == c.lo() => last.1 = c.hi(),
                _ => runs.push((c.lo(), c.hi())),
            }
        }
        Some(runs)
    }

    pub fn is_empty(&self) -> bool {
        self.indicator.is_zero()
    }

    pub fn is_whole(&self) -> bool {
        self.indicator.all(|m| m != 0.0)
    }

    pub fn op(&self, other: &Band, op: BandOp) -> Result<Band> {
        match op {
            BandOp::Join => self.join(other),
            BandOp::Meet => self.meet(other),
            BandOp::Complement => {
                self.model().ensure_same(&other.model())?;
                Ok(self.complement())
            }
        }
    }

    pub fn join(&self, other: &Band) -> Result<Band> {
        Ok(Band {
            indicator: self.indicator.sup(&other.indicator)?,
        })
    }

    pub fn meet(&self, other: &Band) -> Result<Band> {
        Ok(Band {
            indicator: self.indicator.inf(&other.indicator)?,
        })
    }

    /// The disjoint complement `B^d`.
    pub fn complement(&self) -> Band {
        Band {
            indicator: self.indicator.map(|m| 1.0 - m),
        }
    }

    /// `self ∧ other^d`.
    pub fn minus(&self, other: &Band) -> Result<Band> {
        self.meet(&other.complement())
    }

    pub fn is_subset(&self, other: &Band) -> Result<bool> {
        self.indicator.le(&other.indicator)
    }

    pub fn is_disjoint(&self, other: &Band) -> Result<bool> {
        Ok(self.meet(other)?.is_empty())
    }

    /// The band projection `P(x)`: `x` on the region, zero elsewhere.
    pub fn project(&self, x: &Element) -> Result<Element> {
        self.indicator
            .zip_with(x, |m, v| if m != 0.0 { v } else { 0.0 })
    }

    /// `P(inside) + P^d(outside)`.
    pub fn splice(&self, inside: &Element, outside: &Element) -> Result<Element> {
        let a = self.project(inside)?;
        let b = self.complement().project(outside)?;
        a.add(&b)
    }

    /// Smallest band containing `x`: the support of `|x|`.
    pub fn generated_by(x: &Element) -> Band {
        Band::where_value(x, |v| v != 0.0)
    }

    /// `B_{x<y}`, the band generated by `(y − x)⁺`. Differences within
    /// [`tolerance::EQ`] are treated as ties.
    pub fn lt(x: &Element, y: &Element) -> Result<Band> {
        Band::where_pair(x, y, |a, b| b - a > tolerance::EQ)
    }

    /// `B_{x≤y} = B_{y<x}^d`.
    pub fn le(x: &Element, y: &Element) -> Result<Band> {
        Ok(Band::lt(y, x)?.complement())
    }

    /// `B_{x=y} = B_{x≤y} ∩ B_{y≤x}`.
    pub fn eq(x: &Element, y: &Element) -> Result<Band> {
        Band::le(x, y)?.meet(&Band::le(y, x)?)
    }

    /// `B_{(1/m)e ≤ r}`.
    pub fn ladder(r: &Element, m: u32) -> Band {
        assert!(m > 0, "ladder index must be positive");
        let threshold = Element::unit(r.model()).scale(1.0 / f64::from(m));
        Band::le(&threshold, r).expect("threshold shares the model of r")
    }

    pub fn to_json(&self) -> Value {
        match self.model() {
            ModelSpec::Atomic { .. } => json!({ "atoms": self.atoms().unwrap() }),
            ModelSpec::Dyadic { .. } => json!({
                "intervals": self
                    .intervals()
                    .unwrap()
                    .into_iter()
                    .map(|(lo, hi)| json!([lo, hi]))
                    .collect::<Vec<_>>()
            }),
        }
    }

    pub fn from_json(model: ModelSpec, value: &Value) -> Result<Band> {
        let bad = || Error::InvalidLiteral(format!("bad band literal {value}"));
        match model {
            ModelSpec::Atomic { dim } => {
                let atoms = value
                    .get("atoms")
                    .and_then(Value::as_array)
                    .ok_or_else(bad)?
                    .iter()
                    .map(|a| a.as_u64().map(|a| a as usize).ok_or_else(bad))
                    .collect::<Result<Vec<_>>>()?;
                Band::from_atoms(dim, &atoms)
            }
            ModelSpec::Dyadic { max_depth } => {
                let intervals = value
                    .get("intervals")
                    .and_then(Value::as_array)
                    .ok_or_else(bad)?
                    .iter()
                    .map(|iv| {
                        let lo = iv.get(0).and_then(Value::as_f64).ok_or_else(bad)?;
                        let hi = iv.get(1).and_then(Value::as_f64).ok_or_else(bad)?;
                        if lo >= hi {
                            return Err(bad());
                        }
                        Ok((lo, hi))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Band::from_intervals(max_depth, &intervals)
            }
        }
    }

    /// Splits the band by the distinct values `x` takes on it. Parts are
    /// ordered by value.
    pub fn partition_by(&self, x: &Element) -> Result<Vec<(f64, Band)>> {
        let restricted = self.indicator.zip_with(x, |m, v| if m != 0.0 { v } else { f64::NAN })?;
        let mut values: Vec<f64> = restricted.values().filter(|v| !v.is_nan()).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(values
            .into_iter()
            .map(|v| {
                let part = Band::where_value(&restricted, |w| w == v);
                (v, part)
            })
            .collect())
    }

    /// First atom index (atomic) or left endpoint (dyadic), used to order
    /// bands deterministically.
    pub fn sort_key(&self) -> f64 {
        match self.model() {
            ModelSpec::Atomic { .. } => self
                .atoms()
                .unwrap()
                .first()
                .map(|&a| a as f64)
                .unwrap_or(f64::INFINITY),
            ModelSpec::Dyadic { .. } => self
                .cells()
                .unwrap()
                .first()
                .map(DyadicCell::lo)
                .unwrap_or(f64::INFINITY),
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl Element {
    /// Band-local inverse: `s` supported on `band` with `s · x = P(e)`.
    pub fn invert_on_band(&self, band: &Band) -> Result<Element> {
        let bad = band
            .indicator()
            .zip_with(self, |m, v| flag(m != 0.0 && v.abs() < tolerance::INV))?;
        if let Some(atom) = bad.values().position(|f| f != 0.0) {
            return Err(Error::NotInvertibleOnBand { atom });
        }
        band.indicator()
            .zip_with(self, |m, v| if m != 0.0 { 1.0 / v } else { 0.0 })
    }
}
