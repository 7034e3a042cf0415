//! Band-wise solvers for locally band preserving functions.
//!
//! Every solver works on a segment `a + t(b − a)` and keeps a set of cells,
//! each a band together with a scalar parameter bracket. All active cells are
//! advanced in lockstep: their parameters are spliced into one global point,
//! `f` is evaluated once, and each cell reads its own band of the image.
//! Local band preservation is what makes this sound: editing the point off a
//! band never changes the image on that band.
//!
//! Negative outcomes (hypothesis violations, infeasible targets, caps) are
//! reported as certificates rather than errors.

mod bisect;
mod complex;
mod evt;
mod mvt;

use std::fmt;

use serde_json::{json, Map, Value};

use crate::algebra::{Element, ModelSpec};
use crate::band::Band;
use crate::calculus::OrderInterval;
use crate::complex::ComplexElement;
use crate::dsl::{check_lbp, LatticeMap, LbpReport};
use crate::error::Result;
use crate::sample;
use crate::tolerance;

pub use bisect::solve_ivt;
pub use complex::{solve_complex_mvt, ComplexPoly};
pub use evt::{order_bound, solve_evt};
pub use mvt::{solve_mvt, solve_mvt_segment, solve_rolle};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    NotLbp,
    EndpointsDiffer,
    /// `a ≪ b` fails.
    DegenerateInterval,
}

impl Hypothesis {
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::NotLbp => "notLbp",
            Hypothesis::EndpointsDiffer => "endpointsDiffer",
            Hypothesis::DegenerateInterval => "degenerateInterval",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    Feasible,
    Infeasible,
    HypothesisViolated(Hypothesis),
    IterationCapReached,
}

impl Certificate {
    pub fn is_feasible(self) -> bool {
        self == Certificate::Feasible
    }

    /// Expected negative outcomes, as opposed to caps.
    pub fn is_negative(self) -> bool {
        matches!(
            self,
            Certificate::Infeasible | Certificate::HypothesisViolated(_)
        )
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Feasible => f.write_str("feasible"),
            Certificate::Infeasible => f.write_str("infeasible"),
            Certificate::HypothesisViolated(h) => write!(f, "hypothesisViolated({})", h.name()),
            Certificate::IterationCapReached => f.write_str("iterationCapReached"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    None,
    Point(Element),
    /// Minimiser `c` and maximiser `d`.
    Pair { c: Element, d: Element },
    /// Real-part point `u` and imaginary-part point `v`.
    ComplexPair { u: ComplexElement, v: ComplexElement },
}

impl Witness {
    pub fn to_json(&self) -> Value {
        match self {
            Witness::None => Value::Null,
            Witness::Point(x) => x.to_json(),
            Witness::Pair { c, d } => json!({ "c": c.to_json(), "d": d.to_json() }),
            Witness::ComplexPair { u, v } => json!({ "u": u.to_json(), "v": v.to_json() }),
        }
    }

    pub fn point(&self) -> Option<&Element> {
        match self {
            Witness::Point(x) => Some(x),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent {
    /// A cell's band split into parts on mixed outcomes.
    Split {
        stage: &'static str,
        iteration: u32,
        band: Band,
        parts: Vec<Band>,
    },
    /// A cell finished at parameter `t`.
    Converged {
        stage: &'static str,
        band: Band,
        t: f64,
        iterations: u32,
    },
    Note(String),
}

impl TraceEvent {
    pub fn to_json(&self) -> Value {
        match self {
            TraceEvent::Split {
                stage,
                iteration,
                band,
                parts,
            } => json!({
                "event": "split",
                "stage": stage,
                "iteration": iteration,
                "band": band.to_json(),
                "parts": parts.iter().map(Band::to_json).collect::<Vec<_>>(),
            }),
            TraceEvent::Converged {
                stage,
                band,
                t,
                iterations,
            } => json!({
                "event": "converged",
                "stage": stage,
                "band": band.to_json(),
                "t": t,
                "iterations": iterations,
            }),
            TraceEvent::Note(text) => json!({ "event": "note", "text": text }),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Largest number of bisection or golden-section steps spent by one cell.
    pub max_cell_iterations: u32,
    pub splits: usize,
    pub cells: usize,
}

impl SolveStats {
    fn absorb(&mut self, other: &SolveStats) {
        self.max_cell_iterations = self.max_cell_iterations.max(other.max_cell_iterations);
        self.splits += other.splits;
        self.cells += other.cells;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solver: &'static str,
    pub certificate: Certificate,
    pub detail: Option<String>,
    pub witness: Witness,
    pub residual: Option<Element>,
    pub stats: SolveStats,
    /// Extra structured information, such as a violation witness.
    pub evidence: Map<String, Value>,
    pub trace: Vec<TraceEvent>,
}

impl SolveReport {
    fn new(solver: &'static str) -> SolveReport {
        SolveReport {
            solver,
            certificate: Certificate::Feasible,
            detail: None,
            witness: Witness::None,
            residual: None,
            stats: SolveStats::default(),
            evidence: Map::new(),
            trace: Vec::new(),
        }
    }

    fn negative(mut self, certificate: Certificate, detail: impl Into<String>) -> SolveReport {
        self.certificate = certificate;
        self.detail = Some(detail.into());
        self
    }

    /// Sets the final certificate from the residual, unless a cap or an
    /// earlier downgrade already decided it.
    fn settle(&mut self, tol: f64, capped: bool) {
        if self.certificate != Certificate::Feasible {
            return;
        }
        let within = self
            .residual
            .as_ref()
            .is_none_or(|r| r.all(|v| v.abs() <= tol));
        if capped {
            self.certificate = Certificate::IterationCapReached;
            self.detail.get_or_insert_with(|| "iteration or split cap reached".into());
        } else if !within {
            self.certificate = Certificate::IterationCapReached;
            self.detail
                .get_or_insert_with(|| format!("residual above tolerance {tol:e}"));
        }
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "solver": self.solver,
            "certificate": self.certificate.to_string(),
            "witness": self.witness.to_json(),
            "residual": self.residual.as_ref().map_or(Value::Null, Element::to_json),
            "stats": {
                "maxCellIterations": self.stats.max_cell_iterations,
                "splits": self.stats.splits,
                "cells": self.stats.cells,
            },
            "trace": self.trace.iter().map(TraceEvent::to_json).collect::<Vec<_>>(),
        });
        if let Some(d) = &self.detail {
            out["detail"] = json!(d);
        }
        if !self.evidence.is_empty() {
            out["evidence"] = Value::Object(self.evidence.clone());
        }
        out
    }
}

/// Knobs shared by all solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub seed: u64,
    pub lbp_trials: usize,
    pub audit_samples: usize,
    pub evt_grid: usize,
    pub max_bisections: u32,
    pub max_splits: usize,
    pub probe_grid: usize,
    /// Random splice checks per run; on by default in debug builds.
    pub splice_audit: usize,
}

impl SolverConfig {
    pub fn for_model(model: ModelSpec) -> SolverConfig {
        SolverConfig {
            tol: if model.is_atomic() {
                tolerance::SOLVER_TOL_ATOMIC
            } else {
                tolerance::SOLVER_TOL_DYADIC
            },
            seed: 0,
            lbp_trials: 1000,
            audit_samples: 10_000,
            evt_grid: 65,
            max_bisections: 200,
            max_splits: 64,
            probe_grid: 8,
            splice_audit: if cfg!(debug_assertions) { 1000 } else { 0 },
        }
    }

    pub fn with_tol(mut self, tol: f64) -> SolverConfig {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> SolverConfig {
        self.seed = seed;
        self
    }

    /// Seed for one stage, so stages draw independent streams.
    fn stage_seed(&self, stage: u64) -> u64 {
        self.seed ^ stage.wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

/// `−f`.
pub(crate) struct Negated<'a, F: ?Sized>(pub &'a F);

impl<F: LatticeMap + ?Sized> LatticeMap for Negated<'_, F> {
    fn eval(&self, x: &Element) -> Result<Element> {
        Ok(self.0.eval(x)?.neg())
    }

    fn derivative(&self, x: &Element) -> Result<Element> {
        Ok(self.0.derivative(x)?.neg())
    }

    fn lbp_by_construction(&self) -> bool {
        self.0.lbp_by_construction()
    }
}

/// `x ↦ f′(x)`.
pub(crate) struct DerivativeOf<'a, F: ?Sized>(pub &'a F);

impl<F: LatticeMap + ?Sized> LatticeMap for DerivativeOf<'_, F> {
    fn eval(&self, x: &Element) -> Result<Element> {
        self.0.derivative(x)
    }

    fn lbp_by_construction(&self) -> bool {
        self.0.lbp_by_construction()
    }
}

/// Splices `value` on each band over `base`.
pub(crate) fn splice_params(base: &Element, parts: &[(Band, f64)]) -> Result<Element> {
    let model = base.model();
    parts.iter().try_fold(base.clone(), |acc, (band, t)| {
        band.splice(&Element::constant(model, *t), &acc)
    })
}

/// Runs the sampled LBP check unless `f` is LBP by construction. Returns the
/// failing report, if any.
pub(crate) fn lbp_precheck(
    f: &(impl LatticeMap + ?Sized),
    region: &OrderInterval,
    cfg: &SolverConfig,
) -> Result<Option<LbpReport>> {
    if f.lbp_by_construction() {
        return Ok(None);
    }
    let report = check_lbp(f, region, cfg.lbp_trials, cfg.stage_seed(1))?;
    Ok((!report.passed()).then_some(report))
}

pub(crate) fn not_lbp(mut report: SolveReport, lbp: &LbpReport) -> SolveReport {
    report.evidence.insert("lbp".into(), lbp.to_json());
    report.negative(
        Certificate::HypothesisViolated(Hypothesis::NotLbp),
        "function is not locally band preserving on the interval",
    )
}

/// Checks `P f(P x + P^d w) = P f(x)` exactly on random splices, drawing `P`
/// from `bands` (or at random when empty). Returns a description of the
/// first failure.
pub(crate) fn splice_audit(
    f: &(impl LatticeMap + ?Sized),
    region: &OrderInterval,
    bands: &[Band],
    cfg: &SolverConfig,
) -> Result<Option<String>> {
    let mut rng = sample::rng(cfg.stage_seed(2));
    let model = region.model();
    for i in 0..cfg.splice_audit {
        let x = sample::random_in_interval(&mut rng, &region.a, &region.b);
        let w = sample::random_in_interval(&mut rng, &region.a, &region.b);
        let band = if bands.is_empty() {
            sample::random_band(&mut rng, model)
        } else {
            bands[i % bands.len()].clone()
        };
        let y = band.splice(&x, &w)?;
        let gap = band.project(&f.eval(&x)?.sub(&f.eval(&y)?)?)?;
        if !gap.is_zero() {
            return Ok(Some(format!(
                "splice audit failed on band {band}: x = {x}, y = {y}"
            )));
        }
    }
    Ok(None)
}

/// Runs the splice audit and downgrades the report on failure.
pub(crate) fn audit_into(
    report: &mut SolveReport,
    f: &(impl LatticeMap + ?Sized),
    region: &OrderInterval,
    bands: &[Band],
    cfg: &SolverConfig,
) -> Result<()> {
    if let Some(msg) = splice_audit(f, region, bands, cfg)? {
        report.certificate = Certificate::HypothesisViolated(Hypothesis::NotLbp);
        report.detail = Some(msg);
    }
    Ok(())
}
