//! Mean value points for complex polynomials, one for the real part and one
//! for the imaginary part.

use serde_json::{json, Value};

use super::mvt::solve_mvt;
use super::{Certificate, SolveReport, SolverConfig, Witness};
use crate::algebra::{Element, ModelSpec};
use crate::calculus::OrderInterval;
use crate::complex::ComplexElement;
use crate::dsl::{FuncExpr, LatticeMap};
use crate::error::{Error, Result};

/// `f(z) = Σ c_k z^k` with complex element coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<ComplexElement>,
}

impl ComplexPoly {
    pub fn new(model: ModelSpec, mut coeffs: Vec<ComplexElement>) -> Result<ComplexPoly> {
        for c in &coeffs {
            model.ensure_same(&c.model())?;
        }
        if coeffs.is_empty() {
            coeffs.push(ComplexElement::zero(model));
        }
        Ok(ComplexPoly { coeffs })
    }

    pub fn model(&self) -> ModelSpec {
        self.coeffs[0].model()
    }

    pub fn coeffs(&self) -> &[ComplexElement] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Expands a polynomial DSL expression (no maps, `abs`, `sup` or `inf`)
    /// into real coefficients.
    pub fn from_expr(expr: &FuncExpr, model: ModelSpec) -> Result<ComplexPoly> {
        let real = expand(expr, model)?;
        ComplexPoly::new(model, real.into_iter().map(ComplexElement::from_real).collect())
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &ComplexElement) -> Result<ComplexElement> {
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(z)?.add(c)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> ComplexPoly {
        let model = self.model();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(k as f64))
            .collect();
        ComplexPoly::new(model, coeffs).expect("same model")
    }

    pub fn to_json(&self) -> Value {
        json!(self.coeffs.iter().map(ComplexElement::to_json).collect::<Vec<_>>())
    }

    pub fn from_json(model: ModelSpec, value: &Value) -> Result<ComplexPoly> {
        let items = value.as_array().ok_or_else(|| {
            Error::InvalidProblem(format!("cpoly must be an array of coefficients, got {value}"))
        })?;
        let coeffs = items
            .iter()
            .map(|c| ComplexElement::from_json(model, c))
            .collect::<Result<_>>()?;
        ComplexPoly::new(model, coeffs)
    }
}

fn poly_add(a: &[Element], b: &[Element], sign: f64) -> Result<Vec<Element>> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| match (a.get(k), b.get(k)) {
            (Some(x), Some(y)) => x.add(&y.scale(sign)),
            (Some(x), None) => Ok(x.clone()),
            (None, Some(y)) => Ok(y.scale(sign)),
            (None, None) => unreachable!(),
        })
        .collect()
}

fn poly_mul(a: &[Element], b: &[Element], model: ModelSpec) -> Result<Vec<Element>> {
    let mut out = vec![Element::zero(model); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y)?)?;
        }
    }
    Ok(out)
}

fn expand(expr: &FuncExpr, model: ModelSpec) -> Result<Vec<Element>> {
    Ok(match expr {
        FuncExpr::Var => vec![Element::zero(model), Element::unit(model)],
        FuncExpr::Unit => vec![Element::unit(model)],
        FuncExpr::Scalar(s) => vec![Element::constant(model, s.value())],
        FuncExpr::Const(c) => {
            model.ensure_same(&c.model())?;
            vec![c.clone()]
        }
        FuncExpr::Add(a, b) => poly_add(&expand(a, model)?, &expand(b, model)?, 1.0)?,
        FuncExpr::Sub(a, b) => poly_add(&expand(a, model)?, &expand(b, model)?, -1.0)?,
        FuncExpr::Mul(a, b) => poly_mul(&expand(a, model)?, &expand(b, model)?, model)?,
        FuncExpr::Pow(a, k) => {
            let base = expand(a, model)?;
            let mut acc = base.clone();
            for _ in 1..*k {
                acc = poly_mul(&acc, &base, model)?;
            }
            acc
        }
        other => {
            return Err(Error::NonPolynomialComplexHandle(format!(
                "`{other}` is not a polynomial"
            )))
        }
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Part {
    Re,
    Im,
}

/// `t ↦ Re f(a + t(b − a))` (or `Im`) with derivative
/// `Re((b − a) f′(a + t(b − a)))`.
struct ComplexSection<'a> {
    f: &'a ComplexPoly,
    df: ComplexPoly,
    a: &'a ComplexElement,
    dir: ComplexElement,
    part: Part,
}

impl ComplexSection<'_> {
    fn at(&self, t: &Element) -> Result<ComplexElement> {
        self.a.add(&self.dir.mul_real(t)?)
    }

    fn pick(&self, z: ComplexElement) -> Element {
        match self.part {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }
}

impl LatticeMap for ComplexSection<'_> {
    fn eval(&self, t: &Element) -> Result<Element> {
        Ok(self.pick(self.f.eval(&self.at(t)?)?))
    }

    fn derivative(&self, t: &Element) -> Result<Element> {
        Ok(self.pick(self.dir.mul(&self.df.eval(&self.at(t)?)?)?))
    }

    fn lbp_by_construction(&self) -> bool {
        // Polynomials with element coefficients act atom-wise.
        true
    }
}

/// Finds `u, v` on the segment from `a` to `b` with
/// `Re((b − a)f′(u)) = Re(f(b) − f(a))` and `Im((b − a)f′(v)) = Im(f(b) − f(a))`,
/// by the real mean value solver on the real and imaginary sections. The
/// residual is the atom-wise larger of the two residuals.
pub fn solve_complex_mvt(
    f: &ComplexPoly,
    a: &ComplexElement,
    b: &ComplexElement,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let model = f.model();
    model.ensure_same(&a.model())?;
    model.ensure_same(&b.model())?;
    let dir = b.sub(a)?;
    let unit = OrderInterval::new(Element::zero(model), Element::unit(model))?;
    let df = f.derivative();
    let mut parts = Vec::new();
    for part in [Part::Re, Part::Im] {
        let section = ComplexSection {
            f,
            df: df.clone(),
            a,
            dir: dir.clone(),
            part,
        };
        let report = solve_mvt(&section, &unit, cfg)?;
        let t = report
            .witness
            .point()
            .cloned()
            .unwrap_or_else(|| Element::constant(model, 0.5));
        parts.push((section.at(&t)?, report));
    }
    let (v, im) = parts.pop().expect("two parts");
    let (u, re) = parts.pop().expect("two parts");

    let mut report = SolveReport::new("cmvt");
    let residual = match (&re.residual, &im.residual) {
        (Some(r), Some(i)) => Some(r.sup(i)?),
        _ => None,
    };
    report.certificate = match (re.certificate, im.certificate) {
        (Certificate::Feasible, Certificate::Feasible) => Certificate::Feasible,
        (Certificate::Feasible, other) | (other, Certificate::Feasible) => other,
        (first, _) => first,
    };
    report.detail = re.detail.clone().or_else(|| im.detail.clone());
    report.residual = residual;
    report.evidence.insert(
        "re".into(),
        json!({
            "parameter": re.witness.to_json(),
            "residual": re.residual.as_ref().map(Element::to_json),
            "constantBand": re.evidence.get("constantBand"),
        }),
    );
    report.evidence.insert(
        "im".into(),
        json!({
            "parameter": im.witness.to_json(),
            "residual": im.residual.as_ref().map(Element::to_json),
            "constantBand": im.evidence.get("constantBand"),
        }),
    );
    report.stats = re.stats.clone();
    report.stats.absorb(&im.stats);
    report.trace = re.trace;
    report.trace.extend(im.trace);
    report.witness = Witness::ComplexPair { u, v };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn expansion_matches_evaluation() {
        let model = ModelSpec::Atomic { dim: 2 };
        let expr = parse("(x - e)^2 * (2*x + [1, 3]) - x").unwrap();
        let p = ComplexPoly::from_expr(&expr, model).unwrap();
        assert_eq!(p.degree(), 3);
        let x = Element::atomic(vec![0.7, -1.3]).unwrap();
        let got = p.eval(&ComplexElement::from_real(x.clone())).unwrap();
        let want = expr.evaluate(&x).unwrap();
        assert!(got.re.approx_eq(&want, 1e-12).unwrap());
        assert!(got.im.is_zero());
        assert!(matches!(
            ComplexPoly::from_expr(&parse("sin(x)").unwrap(), model),
            Err(Error::NonPolynomialComplexHandle(_))
        ));
    }

    #[test]
    fn square_on_the_diagonal() {
        let model = ModelSpec::Atomic { dim: 2 };
        let f = ComplexPoly::from_expr(&parse("x^2").unwrap(), model).unwrap();
        let a = ComplexElement::zero(model);
        let b = ComplexElement::unit(model).add(&ComplexElement::i(model)).unwrap();
        let r = solve_complex_mvt(&f, &a, &b, &SolverConfig::for_model(model)).unwrap();
        assert_eq!(r.certificate, Certificate::Feasible);
        let Witness::ComplexPair { v, .. } = &r.witness else {
            panic!()
        };
        let half = Element::constant(model, 0.5);
        assert!(v.re.approx_eq(&half, 1e-9).unwrap());
        assert!(v.im.approx_eq(&half, 1e-9).unwrap());
    }
}
