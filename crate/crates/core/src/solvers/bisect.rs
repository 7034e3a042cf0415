//! Band-wise bisection and the intermediate value solver.

use serde_json::json;

use super::{
    audit_into, lbp_precheck, not_lbp, splice_params, Certificate, SolveReport, SolveStats,
    SolverConfig, TraceEvent, Witness,
};
use crate::algebra::Element;
use crate::band::Band;
use crate::calculus::OrderInterval;
use crate::dsl::{continuity_probe, ContinuityVerdict, LatticeMap};
use crate::error::Result;
use crate::sample;

struct Cell {
    band: Band,
    lo: f64,
    hi: f64,
    /// `f − y` increases along the segment on this band.
    increasing: bool,
    iterations: u32,
}

pub(crate) struct Bisection {
    /// Segment parameter on the solved band, zero elsewhere.
    pub t: Element,
    pub capped: bool,
    pub stats: SolveStats,
    pub bands: Vec<Band>,
}

/// Finds `t` with `|f(a + t(b − a)) − y| ≤ tol` on every atom of `band`,
/// assuming `y` lies between `f(a)` and `f(b)` there.
#[allow(clippy::too_many_arguments)]
pub(crate) fn bisect(
    f: &(impl LatticeMap + ?Sized),
    a: &Element,
    b: &Element,
    y: &Element,
    band: &Band,
    cfg: &SolverConfig,
    stage: &'static str,
    trace: &mut Vec<TraceEvent>,
) -> Result<Bisection> {
    let model = a.model();
    let tol = cfg.tol;
    let point = |t: &Element| sample::segment_point(a, b, t);
    let fa = f.eval(a)?.sub(y)?;
    let fb = f.eval(b)?.sub(y)?;

    let hit_a = band.meet(&Band::where_value(&fa, |v| v.abs() <= tol))?;
    let hit_b = band
        .meet(&Band::where_value(&fb, |v| v.abs() <= tol))?
        .minus(&hit_a)?;
    let rest = band.minus(&hit_a)?.minus(&hit_b)?;
    let increasing = rest.meet(&Band::le(&fa, &fb)?)?;
    let decreasing = rest.minus(&increasing)?;

    let mut stats = SolveStats::default();
    let mut bands = Vec::new();
    let mut done: Vec<(Band, f64)> = Vec::new();
    for (hit, t) in [(hit_a, 0.0), (hit_b, 1.0)] {
        if !hit.is_empty() {
            trace.push(TraceEvent::Converged {
                stage,
                band: hit.clone(),
                t,
                iterations: 0,
            });
            bands.push(hit.clone());
            done.push((hit, t));
        }
    }
    let mut active: Vec<Cell> = [(increasing, true), (decreasing, false)]
        .into_iter()
        .filter(|(b, _)| !b.is_empty())
        .map(|(band, increasing)| Cell {
            band,
            lo: 0.0,
            hi: 1.0,
            increasing,
            iterations: 0,
        })
        .collect();
    stats.cells = active.len();

    let mut capped = false;
    let mut iteration = 0u32;
    while !active.is_empty() {
        iteration += 1;
        let mids: Vec<(Band, f64)> = active
            .iter()
            .map(|c| (c.band.clone(), 0.5 * (c.lo + c.hi)))
            .collect();
        let t = splice_params(&splice_params(&Element::zero(model), &done)?, &mids)?;
        let residual = f.eval(&point(&t))?.sub(y)?;

        let mut next = Vec::new();
        for cell in active {
            let mid = 0.5 * (cell.lo + cell.hi);
            let settled = cell
                .band
                .meet(&Band::where_value(&residual, |v| v.abs() <= tol))?;
            let sign = if cell.increasing { 1.0 } else { -1.0 };
            // Root lies to the right where the oriented residual is negative.
            let right = cell
                .band
                .meet(&Band::where_value(&residual, |v| sign * v < -tol))?;
            let left = cell.band.minus(&settled)?.minus(&right)?;
            let parts: Vec<&Band> = [&settled, &right, &left]
                .into_iter()
                .filter(|b| !b.is_empty())
                .collect();
            if parts.len() > 1 {
                stats.splits += parts.len() - 1;
                stats.cells += parts.len() - 1;
                trace.push(TraceEvent::Split {
                    stage,
                    iteration,
                    band: cell.band.clone(),
                    parts: parts.iter().map(|b| (*b).clone()).collect(),
                });
            }
            let iterations = cell.iterations + 1;
            stats.max_cell_iterations = stats.max_cell_iterations.max(iterations);
            let mut finish = |band: Band, trace: &mut Vec<TraceEvent>| {
                trace.push(TraceEvent::Converged {
                    stage,
                    band: band.clone(),
                    t: mid,
                    iterations,
                });
                bands.push(band.clone());
                done.push((band, mid));
            };
            if !settled.is_empty() {
                finish(settled, trace);
            }
            for (part, lo, hi) in [(right, mid, cell.hi), (left, cell.lo, mid)] {
                if part.is_empty() {
                    continue;
                }
                let new_mid = 0.5 * (lo + hi);
                let collapsed = new_mid == lo || new_mid == hi;
                if iterations >= cfg.max_bisections || collapsed {
                    capped |= iterations >= cfg.max_bisections;
                    finish(part, trace);
                } else {
                    next.push(Cell {
                        band: part,
                        lo,
                        hi,
                        increasing: cell.increasing,
                        iterations,
                    });
                }
            }
        }
        active = next;
        if stats.splits > cfg.max_splits {
            capped = true;
            trace.push(TraceEvent::Note(format!(
                "split cap {} exceeded; remaining cells stop at their midpoints",
                cfg.max_splits
            )));
            for cell in active.drain(..) {
                let mid = 0.5 * (cell.lo + cell.hi);
                bands.push(cell.band.clone());
                done.push((cell.band, mid));
            }
        }
    }
    let t = splice_params(&Element::zero(model), &done)?;
    Ok(Bisection {
        t,
        capped,
        stats,
        bands,
    })
}

/// Finds `c ∈ [a, b]` with `f(c) = y` within `cfg.tol` on every atom.
pub fn solve_ivt(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    y: &Element,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let mut report = SolveReport::new("ivt");
    let model = interval.model();
    model.ensure_same(&y.model())?;
    if let Some(lbp) = lbp_precheck(f, interval, cfg)? {
        return Ok(not_lbp(report, &lbp));
    }
    let fa = f.eval(&interval.a)?;
    let fb = f.eval(&interval.b)?;
    let lo = fa.inf(&fb)?.map(|v| v - crate::tolerance::EQ);
    let hi = fa.sup(&fb)?.map(|v| v + crate::tolerance::EQ);
    let outside = Band::lt(y, &lo)?.join(&Band::lt(&hi, y)?)?;
    if !outside.is_empty() {
        report.evidence.insert("infeasibleBand".into(), outside.to_json());
        report
            .evidence
            .insert("range".into(), json!({ "lo": fa.inf(&fb)?.to_json(), "hi": fa.sup(&fb)?.to_json() }));
        return Ok(report.negative(
            Certificate::Infeasible,
            "target lies outside [f(a) ∧ f(b), f(a) ∨ f(b)] on some atoms",
        ));
    }

    let probe = continuity_probe(f, interval, cfg.probe_grid, cfg.stage_seed(3))?;
    let suspect = probe.verdict == ContinuityVerdict::SuspectDiscontinuity;

    let run = bisect(
        f,
        &interval.a,
        &interval.b,
        y,
        &Band::whole(model),
        cfg,
        "bisect",
        &mut report.trace,
    )?;
    let c = interval.point(&run.t);
    report.residual = Some(f.eval(&c)?.sub(y)?.modulus());
    report.witness = Witness::Point(c);
    report.stats = run.stats;
    if suspect {
        report.evidence.insert("continuity".into(), probe.to_json());
        report.certificate = Certificate::IterationCapReached;
        report.detail = Some(format!(
            "suspect discontinuity on {}; certificate downgraded",
            probe.suspect
        ));
    }
    audit_into(&mut report, f, interval, &run.bands, cfg)?;
    report.settle(cfg.tol, run.capped);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ModelSpec;
    use crate::dsl::{Builtin, FunctionHandle};

    fn at(v: &[f64]) -> Element {
        Element::atomic(v.to_vec()).unwrap()
    }

    #[test]
    fn square_root_per_atom() {
        let model = ModelSpec::Atomic { dim: 2 };
        let f = FunctionHandle::parse("x*x", model).unwrap();
        let i = OrderInterval::new(at(&[0.0, 0.0]), at(&[2.0, 2.0])).unwrap();
        let cfg = SolverConfig::for_model(model);
        let r = solve_ivt(&f, &i, &at(&[2.25, 0.25]), &cfg).unwrap();
        assert_eq!(r.certificate, Certificate::Feasible, "{:?}", r.detail);
        let c = r.witness.point().unwrap();
        assert!(c.approx_eq(&at(&[1.5, 0.5]), 1e-8).unwrap());
        assert!(r.residual.unwrap().all(|v| v <= 1e-8));
    }

    #[test]
    fn endpoint_hit_returns_a() {
        let model = ModelSpec::Atomic { dim: 3 };
        let f = FunctionHandle::parse("x*x*x - x", model).unwrap();
        let a = at(&[0.2, -1.0, 0.5]);
        let i = OrderInterval::new(a.clone(), at(&[1.0, 1.0, 2.0])).unwrap();
        let y = f.evaluate(&a).unwrap();
        let r = solve_ivt(&f, &i, &y, &SolverConfig::for_model(model)).unwrap();
        assert_eq!(r.witness.point().unwrap(), &a);
        assert!(r.residual.unwrap().is_zero());
    }

    #[test]
    fn infeasible_and_not_lbp() {
        let model = ModelSpec::Atomic { dim: 2 };
        let f = FunctionHandle::parse("x", model).unwrap();
        let i = OrderInterval::new(at(&[0.0, 0.0]), at(&[1.0, 1.0])).unwrap();
        let cfg = SolverConfig::for_model(model);
        let r = solve_ivt(&f, &i, &at(&[0.5, 2.0]), &cfg).unwrap();
        assert_eq!(r.certificate, Certificate::Infeasible);
        let g = FunctionHandle::Builtin(Builtin::FirstSquare);
        let r = solve_ivt(&g, &i, &at(&[0.5, 0.5]), &cfg).unwrap();
        assert_eq!(r.certificate.to_string(), "hypothesisViolated(notLbp)");
    }

    #[test]
    fn dyadic_root() {
        let model = ModelSpec::Dyadic { max_depth: 4 };
        let f = FunctionHandle::parse("x*x + x", model).unwrap();
        let a = Element::zero(model);
        let b = Element::constant(model, 2.0);
        let y = Element::dyadic_uniform(4, 2, &[0.5, 1.0, 2.0, 6.0]).unwrap();
        let i = OrderInterval::new(a, b).unwrap();
        let r = solve_ivt(&f, &i, &y, &SolverConfig::for_model(model)).unwrap();
        assert_eq!(r.certificate, Certificate::Feasible, "{:?}", r.detail);
        assert!(r.residual.unwrap().all(|v| v <= 1e-6));
        assert!(r.stats.splits <= 64);
    }
}
