//! Rolle and mean value points.

use super::bisect::bisect;
use super::evt::maximize;
use super::{
    audit_into, lbp_precheck, not_lbp, Certificate, DerivativeOf, Hypothesis, Negated,
    SolveReport, SolverConfig, TraceEvent, Witness,
};
use crate::algebra::Element;
use crate::band::Band;
use crate::calculus::OrderInterval;
use crate::dsl::LatticeMap;
use crate::error::Result;
use crate::sample;
use crate::tolerance;

struct Rolle {
    x0: Element,
    /// Atoms where `f` is constant along the segment (the midpoint is used).
    constant: Band,
    capped: bool,
    bands: Vec<Band>,
}

/// Interior critical point of `f` on the segment, assuming `f(a) = f(b)`.
///
/// Per atom: an interior maximum above `f(a)`, else an interior minimum
/// below it, else the function is flat and the midpoint is returned. The
/// extremiser is polished by band-wise bisection on `f′` inside its grid
/// bracket.
fn rolle_core(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    cfg: &SolverConfig,
    report: &mut SolveReport,
) -> Result<Rolle> {
    let model = interval.model();
    let fa = f.eval(&interval.a)?;
    let max = maximize(f, interval, cfg, "max", &mut report.trace)?;
    let min = maximize(&Negated(f), interval, cfg, "min", &mut report.trace)?;
    report.stats.absorb(&max.stats);
    report.stats.absorb(&min.stats);
    let min_value = min.value.neg();

    let b1 = Band::lt(&fa, &max.value)?;
    let b2 = Band::lt(&min_value, &fa)?.minus(&b1)?;
    let interior = b1.join(&b2)?;
    let b0 = interior.complement();
    let half = Element::constant(model, 0.5);
    let t0 = b1.splice(&max.t, &b2.splice(&min.t, &half)?)?;
    report.trace.push(TraceEvent::Note(format!(
        "interior max on {b1}, interior min on {b2}, constant on {b0}"
    )));

    // Bracket of one grid step around the extremiser, kept strictly inside
    // (0, 1) so the polished point stays interior.
    let step = 1.0 / (cfg.evt_grid.max(3) - 1) as f64;
    let t_lo = t0.map(|t| if t - step > 0.0 { t - step } else { 0.5 * t });
    let t_hi = t0.map(|t| if t + step < 1.0 { t + step } else { 0.5 * (t + 1.0) });
    let lo = interval.point(&t_lo);
    let hi = interval.point(&t_hi);
    let derivative = DerivativeOf(f);
    let d_lo = derivative.eval(&lo)?;
    let d_hi = derivative.eval(&hi)?;
    let tol = cfg.tol;
    let sign_change = interior.meet(&Band::where_pair(&d_lo, &d_hi, |u, v| {
        u.min(v) <= tol && u.max(v) >= -tol
    })?)?;
    let zero = Element::zero(model);
    let polish = bisect(&derivative, &lo, &hi, &zero, &sign_change, cfg, "polish", &mut report.trace)?;
    report.stats.absorb(&polish.stats);
    let polished = sample::segment_point(&lo, &hi, &polish.t);
    let x0 = sign_change.splice(&polished, &interval.point(&t0))?;

    let mut bands = max.bands;
    bands.extend(min.bands);
    bands.extend(polish.bands);
    Ok(Rolle {
        x0,
        constant: b0,
        capped: max.capped || min.capped || polish.capped,
        bands,
    })
}

fn check_proper(report: SolveReport, interval: &OrderInterval) -> Option<SolveReport> {
    (!interval.is_proper()).then(|| {
        report.negative(
            Certificate::HypothesisViolated(Hypothesis::DegenerateInterval),
            "the interval needs a ≪ b",
        )
    })
}

/// Finds `x₀ ∈ (a, b)` with `f′(x₀) = 0` when `f(a) = f(b)`. The residual is
/// `|f′(x₀)|`.
pub fn solve_rolle(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let mut report = SolveReport::new("rolle");
    if let Some(r) = check_proper(report.clone(), interval) {
        return Ok(r);
    }
    let fa = f.eval(&interval.a)?;
    let fb = f.eval(&interval.b)?;
    let differ = Band::eq(&fa, &fb)?.complement();
    if !differ.is_empty() {
        report.evidence.insert("differBand".into(), differ.to_json());
        return Ok(report.negative(
            Certificate::HypothesisViolated(Hypothesis::EndpointsDiffer),
            "f(a) and f(b) differ on some atoms",
        ));
    }
    if let Some(lbp) = lbp_precheck(f, interval, cfg)? {
        return Ok(not_lbp(report, &lbp));
    }
    let rolle = rolle_core(f, interval, cfg, &mut report)?;
    report.residual = Some(f.derivative(&rolle.x0)?.modulus());
    report
        .evidence
        .insert("constantBand".into(), rolle.constant.to_json());
    report.witness = Witness::Point(rolle.x0);
    audit_into(&mut report, f, interval, &rolle.bands, cfg)?;
    report.settle(cfg.tol, rolle.capped);
    Ok(report)
}

/// The auxiliary `g(x) = (b − a)f(x) − (f(b) − f(a))x`.
struct Auxiliary<'a, F: ?Sized> {
    f: &'a F,
    width: Element,
    rise: Element,
}

impl<F: LatticeMap + ?Sized> LatticeMap for Auxiliary<'_, F> {
    fn eval(&self, x: &Element) -> Result<Element> {
        self.width.mul(&self.f.eval(x)?)?.sub(&self.rise.mul(x)?)
    }

    fn derivative(&self, x: &Element) -> Result<Element> {
        self.width.mul(&self.f.derivative(x)?)?.sub(&self.rise)
    }

    fn lbp_by_construction(&self) -> bool {
        self.f.lbp_by_construction()
    }
}

/// Finds `x₀ ∈ (a, b)` with `(b − a)f′(x₀) = f(b) − f(a)` by applying the
/// Rolle solver to the auxiliary `g(x) = (b − a)f(x) − (f(b) − f(a))x`. The
/// residual is `|(b − a)f′(x₀) − (f(b) − f(a))|`.
pub fn solve_mvt(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let mut report = SolveReport::new("mvt");
    if let Some(r) = check_proper(report.clone(), interval) {
        return Ok(r);
    }
    if let Some(lbp) = lbp_precheck(f, interval, cfg)? {
        return Ok(not_lbp(report, &lbp));
    }
    let fa = f.eval(&interval.a)?;
    let fb = f.eval(&interval.b)?;
    let g = Auxiliary {
        f,
        width: interval.width(),
        rise: fb.sub(&fa)?,
    };
    let gap = g.eval(&interval.b)?.sub(&g.eval(&interval.a)?)?.max_abs();
    if gap > tolerance::EQ {
        report.trace.push(TraceEvent::Note(format!(
            "auxiliary endpoint gap {gap:e} from rounding"
        )));
    }
    let rolle = rolle_core(&g, interval, cfg, &mut report)?;
    report.residual = Some(g.derivative(&rolle.x0)?.modulus());
    report
        .evidence
        .insert("constantBand".into(), rolle.constant.to_json());
    report
        .evidence
        .insert("endpointsEqualBand".into(), Band::eq(&fa, &fb)?.to_json());
    report.witness = Witness::Point(rolle.x0);
    audit_into(&mut report, f, interval, &rolle.bands, cfg)?;
    report.settle(cfg.tol, rolle.capped);
    Ok(report)
}

/// `t ↦ f(start + t·dir)` on `[0, e]`, with derivative `dir·f′(start + t·dir)`.
pub(crate) struct Section<'a, F: ?Sized> {
    pub f: &'a F,
    pub start: Element,
    pub dir: Element,
}

impl<F: ?Sized> Section<'_, F> {
    fn at(&self, t: &Element) -> Result<Element> {
        self.start.add(&t.mul(&self.dir)?)
    }
}

impl<F: LatticeMap + ?Sized> LatticeMap for Section<'_, F> {
    fn eval(&self, t: &Element) -> Result<Element> {
        self.f.eval(&self.at(t)?)
    }

    fn derivative(&self, t: &Element) -> Result<Element> {
        self.dir.mul(&self.f.derivative(&self.at(t)?)?)
    }

    fn lbp_by_construction(&self) -> bool {
        self.f.lbp_by_construction()
    }
}

/// Mean value point on the segment from `c` to `d` inside `[a, b]`:
/// `(d − c)f′(x₀) = f(d) − f(c)` with `x₀ = c + t₀(d − c)`, found by applying
/// [`solve_mvt`] to `t ↦ f(c + t(d − c))` on `[0, e]`.
pub fn solve_mvt_segment(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    c: &Element,
    d: &Element,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let model = interval.model();
    if !interval.contains(c)? || !interval.contains(d)? {
        return Err(crate::error::Error::InvalidInterval(format!(
            "segment endpoints {c} and {d} must lie in {interval}"
        )));
    }
    let section = Section {
        f,
        start: c.clone(),
        dir: d.sub(c)?,
    };
    let unit = OrderInterval::new(Element::zero(model), Element::unit(model))?;
    let mut report = solve_mvt(&section, &unit, cfg)?;
    report.solver = "mvt-segment";
    if let Witness::Point(t0) = &report.witness {
        report
            .evidence
            .insert("parameter".into(), t0.to_json());
        report.witness = Witness::Point(section.at(t0)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ModelSpec;
    use crate::dsl::FunctionHandle;

    fn unit_interval(model: ModelSpec) -> OrderInterval {
        OrderInterval::new(Element::zero(model), Element::unit(model)).unwrap()
    }

    #[test]
    fn rolle_vertex() {
        let model = ModelSpec::Atomic { dim: 2 };
        let f = FunctionHandle::parse("x*x - x", model).unwrap();
        let r = solve_rolle(&f, &unit_interval(model), &SolverConfig::for_model(model)).unwrap();
        assert_eq!(r.certificate, Certificate::Feasible);
        assert!(r
            .witness
            .point()
            .unwrap()
            .approx_eq(&Element::constant(model, 0.5), 1e-9)
            .unwrap());
    }

    #[test]
    fn rolle_constant_and_differing_endpoints() {
        let model = ModelSpec::Atomic { dim: 2 };
        let cfg = SolverConfig::for_model(model);
        let f = FunctionHandle::parse("[3, -1]", model).unwrap();
        let r = solve_rolle(&f, &unit_interval(model), &cfg).unwrap();
        assert_eq!(r.witness.point().unwrap(), &Element::constant(model, 0.5));
        assert!(r.residual.unwrap().is_zero());
        let g = FunctionHandle::parse("x", model).unwrap();
        let r = solve_rolle(&g, &unit_interval(model), &cfg).unwrap();
        assert_eq!(r.certificate.to_string(), "hypothesisViolated(endpointsDiffer)");
    }

    #[test]
    fn mvt_cubic() {
        let model = ModelSpec::Atomic { dim: 3 };
        let f = FunctionHandle::parse("x^3", model).unwrap();
        let r = solve_mvt(&f, &unit_interval(model), &SolverConfig::for_model(model)).unwrap();
        assert_eq!(r.certificate, Certificate::Feasible);
        let want = Element::constant(model, 1.0 / 3f64.sqrt());
        assert!(r.witness.point().unwrap().approx_eq(&want, 1e-6).unwrap());
    }

    #[test]
    fn mvt_on_a_segment() {
        let model = ModelSpec::Atomic { dim: 2 };
        let f = FunctionHandle::parse("x*x*x", model).unwrap();
        let i = OrderInterval::new(Element::zero(model), Element::constant(model, 2.0)).unwrap();
        let c = Element::atomic(vec![0.5, 0.25]).unwrap();
        let d = Element::atomic(vec![1.5, 1.75]).unwrap();
        let r = solve_mvt_segment(&f, &i, &c, &d, &SolverConfig::for_model(model)).unwrap();
        assert_eq!(r.certificate, Certificate::Feasible);
        // 3x₀² (d − c) = d³ − c³ per atom.
        let x0 = r.witness.point().unwrap().as_atomic().unwrap().to_vec();
        for (i, (c, d)) in [(0.5f64, 1.5f64), (0.25, 1.75)].into_iter().enumerate() {
            let want = ((d.powi(3) - c.powi(3)) / (3.0 * (d - c))).sqrt();
            assert!((x0[i] - want).abs() < 1e-8);
        }
    }
}
