//! Complexification `E = F + iF`.
//!
//! The modulus is defined as `|x + iy| = sup_θ (cos θ)x + (sin θ)y`. Two
//! evaluations are provided: [`ComplexElement::modulus_grid`] takes the
//! supremum over a finite angle grid exactly as written, and
//! [`ComplexElement::modulus`] uses the atom-wise closed form `hypot(x, y)`,
//! where the supremum is attained at `θ = atan2(y, x)`.

use std::f64::consts::PI;

use serde_json::{json, Value};

use crate::algebra::{Element, ModelSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexElement {
    pub re: Element,
    pub im: Element,
}

impl ComplexElement {
    pub fn new(re: Element, im: Element) -> Result<Self> {
        re.model().ensure_same(&im.model())?;
        Ok(ComplexElement { re, im })
    }

    pub fn from_real(re: Element) -> Self {
        let im = Element::zero(re.model());
        ComplexElement { re, im }
    }

    pub fn zero(model: ModelSpec) -> Self {
        ComplexElement::from_real(Element::zero(model))
    }

    pub fn unit(model: ModelSpec) -> Self {
        ComplexElement::from_real(Element::unit(model))
    }

    pub fn i(model: ModelSpec) -> Self {
        ComplexElement {
            re: Element::zero(model),
            im: Element::unit(model),
        }
    }

    pub fn model(&self) -> ModelSpec {
        self.re.model()
    }

    pub fn add(&self, other: &ComplexElement) -> Result<ComplexElement> {
        Ok(ComplexElement {
            re: self.re.add(&other.re)?,
            im: self.im.add(&other.im)?,
        })
    }

    pub fn sub(&self, other: &ComplexElement) -> Result<ComplexElement> {
        Ok(ComplexElement {
            re: self.re.sub(&other.re)?,
            im: self.im.sub(&other.im)?,
        })
    }

    /// `(a + ib)(c + id) = (ac − bd) + i(ad + bc)`.
    pub fn mul(&self, other: &ComplexElement) -> Result<ComplexElement> {
        let (a, b, c, d) = (&self.re, &self.im, &other.re, &other.im);
        Ok(ComplexElement {
            re: a.mul(c)?.sub(&b.mul(d)?)?,
            im: a.mul(d)?.add(&b.mul(c)?)?,
        })
    }

    /// Multiplication by a real element.
    pub fn mul_real(&self, t: &Element) -> Result<ComplexElement> {
        Ok(ComplexElement {
            re: self.re.mul(t)?,
            im: self.im.mul(t)?,
        })
    }

    pub fn scale(&self, t: f64) -> ComplexElement {
        ComplexElement {
            re: self.re.scale(t),
            im: self.im.scale(t),
        }
    }

    /// Closed form `hypot(re, im)` atom-wise.
    pub fn modulus(&self) -> Element {
        self.re
            .zip_with(&self.im, f64::hypot)
            .expect("re and im share a model")
    }

    /// `sup_j (cos θ_j) re + (sin θ_j) im` over `θ_j = 2πj/k`, `j = 0..k`.
    pub fn modulus_grid(&self, k: usize) -> Element {
        assert!(k >= 4, "angle grid needs at least four points");
        let mut best: Option<Element> = None;
        for j in 0..k {
            let theta = 2.0 * PI * j as f64 / k as f64;
            let (s, c) = theta.sin_cos();
            let candidate = self
                .re
                .zip_with(&self.im, |x, y| c * x + s * y)
                .expect("re and im share a model");
            best = Some(match best {
                None => candidate,
                Some(b) => b.sup(&candidate).expect("same model"),
            });
        }
        best.expect("k >= 4")
    }

    pub fn to_json(&self) -> Value {
        json!({"re": self.re.to_json(), "im": self.im.to_json()})
    }

    /// `{"re": ..., "im": ...}`; a bare real literal is accepted as `x + 0i`.
    pub fn from_json(model: ModelSpec, value: &Value) -> Result<ComplexElement> {
        match (value.get("re"), value.get("im")) {
            (Some(re), Some(im)) => ComplexElement::new(
                Element::from_json(model, re)?,
                Element::from_json(model, im)?,
            ),
            (None, None) => Ok(ComplexElement::from_real(Element::from_json(model, value)?)),
            _ => Err(Error::InvalidLiteral(format!(
                "complex literal needs both re and im: {value}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Element {
        Element::atomic(xs.to_vec()).unwrap()
    }

    #[test]
    fn one_plus_i_squared() {
        let m = ModelSpec::Atomic { dim: 3 };
        let z = ComplexElement::unit(m).add(&ComplexElement::i(m)).unwrap();
        let sq = z.mul(&z).unwrap();
        assert_eq!(sq, ComplexElement::i(m).scale(2.0));
        assert_eq!(z.mul(&ComplexElement::unit(m)).unwrap(), z);
    }

    #[test]
    fn closed_form_modulus() {
        let z = ComplexElement::new(v(&[3.0, 1.0]), v(&[4.0, 0.0])).unwrap();
        assert_eq!(z.modulus(), v(&[5.0, 1.0]));
    }

    #[test]
    fn grid_modulus_of_real_element_is_exact() {
        let x = v(&[-1.5, 2.0, 0.0, 7.25]);
        let z = ComplexElement::from_real(x.clone());
        for k in [4, 8, 12, 4096] {
            assert_eq!(z.modulus_grid(k), x.modulus());
        }
        assert_eq!(z.modulus(), x.modulus());
    }

    #[test]
    fn literal() {
        let m = ModelSpec::Atomic { dim: 2 };
        let z = ComplexElement::from_json(m, &json!({"re": [1, 2], "im": [3, 4]})).unwrap();
        assert_eq!(z.im, v(&[3.0, 4.0]));
        assert_eq!(ComplexElement::from_json(m, &z.to_json()).unwrap(), z);
        assert!(ComplexElement::from_json(m, &json!({"re": [1, 2]})).is_err());
    }
}
