//! Numeric order differentiation: derivative estimates, remainder checks
//! for order and super order differentiability, and the classifier.

use std::fmt;

use rand::Rng;
use serde_json::{json, Value};

use crate::algebra::{Element, ModelSpec};
use crate::dsl::LatticeMap;
use crate::error::{Error, Result};
use crate::sample;
use crate::tolerance;

/// `[a, b]` (closed) or `(a, b) = {x : a ≪ x ≪ b}` (open).
#[derive(Clone, Debug, PartialEq)]
pub struct OrderInterval {
    pub a: Element,
    pub b: Element,
    pub closed: bool,
}

impl OrderInterval {
    /// Closed interval `[a, b]`; requires `a ≤ b`.
    pub fn new(a: Element, b: Element) -> Result<OrderInterval> {
        if !a.le(&b)? {
            return Err(Error::InvalidInterval(format!("{a} is not below {b}")));
        }
        Ok(OrderInterval { a, b, closed: true })
    }

    /// Open interval `(a, b)`; requires `a ≪ b` so that it is nonempty.
    pub fn open(a: Element, b: Element) -> Result<OrderInterval> {
        if !a.strictly_less(&b)? {
            return Err(Error::InvalidInterval(format!(
                "open interval needs {a} ≪ {b}"
            )));
        }
        Ok(OrderInterval { a, b, closed: false })
    }

    pub fn model(&self) -> ModelSpec {
        self.a.model()
    }

    /// `b − a`.
    pub fn width(&self) -> Element {
        self.b.sub(&self.a).expect("endpoints share a model")
    }

    pub fn is_proper(&self) -> bool {
        self.a.strictly_less(&self.b).unwrap_or(false)
    }

    /// `a + T(b − a)`.
    pub fn point(&self, t: &Element) -> Element {
        sample::segment_point(&self.a, &self.b, t)
    }

    /// `a + t(b − a)` for a real `t`.
    pub fn point_at(&self, t: f64) -> Element {
        self.a.add(&self.width().scale(t)).expect("same model")
    }

    pub fn contains(&self, x: &Element) -> Result<bool> {
        if self.closed {
            Ok(self.a.le(x)? && x.le(&self.b)?)
        } else {
            Ok(self.a.strictly_less(x)? && x.strictly_less(&self.b)?)
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "a": self.a.to_json(), "b": self.b.to_json() })
    }
}

impl fmt::Display for OrderInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = if self.closed { ("[", "]") } else { ("(", ")") };
        write!(f, "{l}{}, {}{r}", self.a, self.b)
    }
}

/// `N(c, r) = {z : |z − c| ≪ r}` or its closure `{z : |z − c| ≤ r}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighborhood {
    pub center: Element,
    pub radius: Element,
    pub closed: bool,
}

impl Neighborhood {
    pub fn new(center: Element, radius: Element, closed: bool) -> Result<Neighborhood> {
        center.model().ensure_same(&radius.model())?;
        if !radius.is_weak_order_unit() {
            return Err(Error::InvalidInterval(format!(
                "radius {radius} is not a weak order unit"
            )));
        }
        Ok(Neighborhood {
            center,
            radius,
            closed,
        })
    }

    pub fn contains(&self, z: &Element) -> Result<bool> {
        let d = z.sub(&self.center)?.modulus();
        if self.closed {
            d.le(&self.radius)
        } else {
            d.strictly_less(&self.radius)
        }
    }

    /// The order interval `[c − r, c + r]`.
    pub fn interval(&self) -> OrderInterval {
        let a = self.center.sub(&self.radius).expect("same model");
        let b = self.center.add(&self.radius).expect("same model");
        OrderInterval {
            a,
            b,
            closed: self.closed,
        }
    }
}

/// Central difference `(f(c + h·e) − f(c − h·e)) / 2h`.
pub fn central_difference(f: &(impl LatticeMap + ?Sized), c: &Element, h: f64) -> Result<Element> {
    let step = Element::constant(c.model(), h);
    let up = f.eval(&c.add(&step)?)?;
    let down = f.eval(&c.sub(&step)?)?;
    Ok(up.sub(&down)?.scale(0.5 / h))
}

/// Atom-wise derivative estimate by central differences with Richardson
/// extrapolation, halving `h` from [`tolerance::DERIVATIVE_H0`] until two
/// successive estimates agree within [`tolerance::DERIVATIVE_STABLE`].
pub fn estimate_derivative(f: &(impl LatticeMap + ?Sized), c: &Element) -> Result<Element> {
    let mut h = tolerance::DERIVATIVE_H0;
    let mut coarse = central_difference(f, c, h)?;
    let mut previous: Option<Element> = None;
    let mut last_gap = Element::zero(c.model());
    for _ in 0..=tolerance::DERIVATIVE_HALVINGS {
        h *= 0.5;
        let fine = central_difference(f, c, h)?;
        // (4 D(h/2) − D(h)) / 3 cancels the h² term.
        let extrapolated = fine.scale(4.0).sub(&coarse)?.scale(1.0 / 3.0);
        if let Some(prev) = &previous {
            let gap = extrapolated.sub(prev)?.modulus();
            if gap.all(|g| g <= tolerance::DERIVATIVE_STABLE) {
                return Ok(extrapolated);
            }
            last_gap = gap;
        }
        previous = Some(extrapolated);
        coarse = fine;
    }
    Err(Error::NoConvergence {
        atom: last_gap.argmax_abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffMode {
    /// Samples `z` with `|z − c|` a weak order unit.
    Order,
    /// Additionally samples thin `z` that agree with `c` on some atoms.
    Super,
}

impl DiffMode {
    pub fn name(self) -> &'static str {
        match self {
            DiffMode::Order => "order",
            DiffMode::Super => "super",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiffVerdict {
    Pass,
    Fail { witness: Element },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffReport {
    pub derivative: Element,
    pub mode: DiffMode,
    /// Largest scaled residual over the final scales.
    pub max_scaled_residual: f64,
    /// Largest scaled residual of thin samples over the final scales.
    pub thin_set_residual: f64,
    /// Largest scaled residual per scale `δ_j = 2^−j r`.
    pub scale_residuals: Vec<f64>,
    pub verdict: DiffVerdict,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.verdict == DiffVerdict::Pass
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "mode": self.mode.name(),
            "derivative": self.derivative.to_json(),
            "maxScaledResidual": self.max_scaled_residual,
            "thinSetResidual": self.thin_set_residual,
            "scaleResiduals": self.scale_residuals,
            "verdict": if self.passed() { "pass" } else { "fail" },
        });
        if let DiffVerdict::Fail { witness } = &self.verdict {
            out["witness"] = witness.to_json();
        }
        out
    }
}

/// Number of scales `δ_j = 2^−j r`, `j = 0..SCALES`.
pub const SCALES: usize = 21;
/// Scales at the fine end that must all pass.
pub const FINAL_SCALES: usize = 4;

/// Checks the remainder bound `|f(z) − f(c) − (z − c)d| ≤ |z − c|ε` on
/// samples at the scales `δ_j = 2^−j r`.
///
/// Passes iff the scaled residual `|f(z) − f(c) − (z − c)d| / max(|z − c|, τ)`
/// is at most [`tolerance::RESIDUAL_PASS`] on every sample of the final
/// [`FINAL_SCALES`] scales.
pub fn verify_differentiability(
    f: &(impl LatticeMap + ?Sized),
    c: &Element,
    d: &Element,
    mode: DiffMode,
    r: &Element,
    samples: usize,
    seed: u64,
) -> Result<DiffReport> {
    let model = c.model();
    model.ensure_same(&d.model())?;
    model.ensure_same(&r.model())?;
    if !r.is_weak_order_unit() {
        return Err(Error::InvalidInterval(format!(
            "radius {r} is not a weak order unit"
        )));
    }
    let mut rng = sample::rng(seed);
    let fc = f.eval(c)?;
    let scaled_residual = |z: &Element| -> Result<f64> {
        let dz = z.sub(c)?;
        let rem = f.eval(z)?.sub(&fc)?.sub(&dz.mul(d)?)?.modulus();
        let denom = dz.modulus().map(|v| v.max(tolerance::EQ));
        Ok(rem.zip_with(&denom, |n, m| n / m)?.max_abs())
    };

    let mut scale_residuals = Vec::with_capacity(SCALES);
    let mut worst = (0.0f64, None::<Element>);
    let mut thin_worst = 0.0f64;
    for j in 0..SCALES {
        let delta = r.scale(0.5f64.powi(j as i32));
        let final_scale = j + FINAL_SCALES >= SCALES;
        let mut level = 0.0f64;
        for _ in 0..samples {
            // All atoms displaced by u·δ with u ∈ [1/2, 1) and a random sign.
            let offset = sample::random_element_with(&mut rng, model, |r| {
                let u = r.random_range(0.5..1.0);
                if r.random_bool(0.5) {
                    u
                } else {
                    -u
                }
            });
            let z = c.add(&offset.mul(&delta)?)?;
            let s = scaled_residual(&z)?;
            level = level.max(s);
            if final_scale && s > worst.0 {
                worst = (s, Some(z.clone()));
            }
            if mode == DiffMode::Super {
                if let Some(band) = sample::random_proper_band(&mut rng, model) {
                    let thin = band.splice(c, &z)?;
                    let s = scaled_residual(&thin)?;
                    level = level.max(s);
                    if final_scale {
                        thin_worst = thin_worst.max(s);
                        if s > worst.0 {
                            worst = (s, Some(thin));
                        }
                    }
                }
            }
        }
        scale_residuals.push(level);
    }
    let verdict = if worst.0 <= tolerance::RESIDUAL_PASS {
        DiffVerdict::Pass
    } else {
        DiffVerdict::Fail {
            witness: worst.1.expect("a failing sample exists"),
        }
    };
    Ok(DiffReport {
        derivative: d.clone(),
        mode,
        max_scaled_residual: worst.0,
        thin_set_residual: thin_worst,
        scale_residuals,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    SuperDifferentiable,
    OrderOnly,
    NotDifferentiable,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::SuperDifferentiable => "superDifferentiable",
            Classification::OrderOnly => "orderOnly",
            Classification::NotDifferentiable => "notDifferentiable",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Samples per scale used by [`classify`].
pub const CLASSIFY_SAMPLES: usize = 16;

/// Three-way verdict from a derivative estimate and both remainder checks.
pub fn classify(
    f: &(impl LatticeMap + ?Sized),
    c: &Element,
    r: &Element,
    seed: u64,
) -> Result<Classification> {
    let d = match estimate_derivative(f, c) {
        Ok(d) => d,
        Err(Error::NoConvergence { .. }) => return Ok(Classification::NotDifferentiable),
        Err(e) => return Err(e),
    };
    if verify_differentiability(f, c, &d, DiffMode::Super, r, CLASSIFY_SAMPLES, seed)?.passed() {
        return Ok(Classification::SuperDifferentiable);
    }
    if verify_differentiability(f, c, &d, DiffMode::Order, r, CLASSIFY_SAMPLES, seed)?.passed() {
        return Ok(Classification::OrderOnly);
    }
    Ok(Classification::NotDifferentiable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{Builtin, FunctionHandle};

    fn at(v: &[f64]) -> Element {
        Element::atomic(v.to_vec()).unwrap()
    }

    fn dsl(text: &str, dim: usize) -> FunctionHandle {
        FunctionHandle::parse(text, ModelSpec::Atomic { dim }).unwrap()
    }

    #[test]
    fn square_derivative() {
        let d = estimate_derivative(&dsl("x*x", 2), &at(&[3.0, 1.0])).unwrap();
        assert!(d.approx_eq(&at(&[6.0, 2.0]), 1e-8).unwrap());
        let d = estimate_derivative(&dsl("x^3", 3), &at(&[1.0, 1.0, 1.0])).unwrap();
        assert!(d.approx_eq(&at(&[3.0, 3.0, 3.0]), 1e-8).unwrap());
    }

    #[test]
    fn step_has_no_derivative() {
        let f = FunctionHandle::Builtin(Builtin::Heaviside);
        assert!(matches!(
            estimate_derivative(&f, &at(&[0.0, 1.0])),
            Err(Error::NoConvergence { atom: 0 })
        ));
    }

    #[test]
    fn polynomial_is_super_differentiable() {
        let f = dsl("x*x", 2);
        let c = at(&[0.3, 0.3]);
        let report =
            verify_differentiability(&f, &c, &at(&[0.6, 0.6]), DiffMode::Super, &at(&[1.0, 1.0]), 8, 1)
                .unwrap();
        assert!(report.passed(), "{report:?}");
        let off = verify_differentiability(&f, &c, &at(&[0.7, 0.7]), DiffMode::Order, &at(&[1.0, 1.0]), 8, 1)
            .unwrap();
        assert!(!off.passed());
    }

    #[test]
    fn thin_sqrt_is_order_only() {
        let f = FunctionHandle::Builtin(Builtin::ThinSqrt);
        let c = at(&[0.0, 0.0]);
        let r = at(&[0.5, 0.5]);
        let zero = at(&[0.0, 0.0]);
        assert!(verify_differentiability(&f, &c, &zero, DiffMode::Order, &r, 8, 3).unwrap().passed());
        let sup = verify_differentiability(&f, &c, &zero, DiffMode::Super, &r, 8, 3).unwrap();
        match sup.verdict {
            DiffVerdict::Fail { witness } => {
                let w = witness.as_atomic().unwrap();
                assert_eq!(w[1], 0.0);
                assert_ne!(w[0], 0.0);
            }
            DiffVerdict::Pass => panic!("thin samples must fail"),
        }
        assert_eq!(classify(&f, &c, &r, 3).unwrap(), Classification::OrderOnly);
    }

    #[test]
    fn classify_verdicts() {
        let r = at(&[0.2, 0.2]);
        assert_eq!(
            classify(&dsl("x*x - x", 2), &at(&[0.4, 0.4]), &r, 0).unwrap(),
            Classification::SuperDifferentiable
        );
        assert_eq!(
            classify(&FunctionHandle::Builtin(Builtin::Heaviside), &at(&[0.0, 0.5]), &r, 0).unwrap(),
            Classification::NotDifferentiable
        );
    }

    #[test]
    fn intervals() {
        assert!(OrderInterval::new(at(&[1.0, 0.0]), at(&[0.0, 1.0])).is_err());
        assert!(OrderInterval::open(at(&[0.0, 0.0]), at(&[1.0, 0.0])).is_err());
        let i = OrderInterval::new(at(&[0.0, 0.0]), at(&[2.0, 4.0])).unwrap();
        assert_eq!(i.point_at(0.5), at(&[1.0, 2.0]));
        assert!(i.contains(&at(&[2.0, 0.0])).unwrap());
        let n = Neighborhood::new(at(&[0.0, 0.0]), at(&[1.0, 1.0]), false).unwrap();
        assert!(!n.contains(&at(&[1.0, 0.0])).unwrap());
        assert!(n.contains(&at(&[0.5, -0.5])).unwrap());
    }
}
