//! Extreme values on a segment: grid search, band-wise golden section, and
//! the order bound built from it.

use serde_json::json;

use super::{
    audit_into, lbp_precheck, not_lbp, splice_params, Negated, SolveReport, SolveStats,
    SolverConfig, TraceEvent, Witness,
};
use crate::algebra::Element;
use crate::band::Band;
use crate::calculus::OrderInterval;
use crate::dsl::LatticeMap;
use crate::error::Result;
use crate::sample;

/// Golden-section brackets narrower than this are done.
const GOLDEN_WIDTH: f64 = 1e-12;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

pub(crate) struct Extremum {
    /// Segment parameter of the maximiser.
    pub t: Element,
    pub value: Element,
    pub capped: bool,
    pub stats: SolveStats,
    pub bands: Vec<Band>,
}

struct Cell {
    band: Band,
    lo: f64,
    hi: f64,
    iterations: u32,
}

/// Band-wise golden section on the brackets of `cells`. Returns the final
/// parameter on the union of the cell bands (zero elsewhere).
fn golden(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    mut active: Vec<Cell>,
    cfg: &SolverConfig,
    stage: &'static str,
    stats: &mut SolveStats,
    trace: &mut Vec<TraceEvent>,
) -> Result<(Element, bool)> {
    let model = interval.model();
    let zero = Element::zero(model);
    let mut done: Vec<(Band, f64)> = Vec::new();
    let mut capped = false;
    let mut splits = 0usize;
    let mut iteration = 0u32;
    stats.cells += active.len();
    while !active.is_empty() {
        iteration += 1;
        let probes = |frac: f64| -> Vec<(Band, f64)> {
            active
                .iter()
                .map(|c| (c.band.clone(), c.lo + frac * (c.hi - c.lo)))
                .collect()
        };
        let t1 = splice_params(&zero, &probes(1.0 - INV_PHI))?;
        let t2 = splice_params(&zero, &probes(INV_PHI))?;
        let f1 = f.eval(&interval.point(&t1))?;
        let f2 = f.eval(&interval.point(&t2))?;
        // Ties keep the left bracket so smaller parameters win.
        let left_wins = Band::where_pair(&f1, &f2, |u, v| u >= v)?;
        let mut next = Vec::new();
        for cell in active {
            let x1 = cell.lo + (1.0 - INV_PHI) * (cell.hi - cell.lo);
            let x2 = cell.lo + INV_PHI * (cell.hi - cell.lo);
            let left = cell.band.meet(&left_wins)?;
            let right = cell.band.minus(&left)?;
            if !left.is_empty() && !right.is_empty() {
                splits += 1;
                trace.push(TraceEvent::Split {
                    stage,
                    iteration,
                    band: cell.band.clone(),
                    parts: vec![left.clone(), right.clone()],
                });
            }
            let iterations = cell.iterations + 1;
            stats.max_cell_iterations = stats.max_cell_iterations.max(iterations);
            for (band, lo, hi) in [(left, cell.lo, x2), (right, x1, cell.hi)] {
                if band.is_empty() {
                    continue;
                }
                if hi - lo <= GOLDEN_WIDTH || iterations >= cfg.max_bisections {
                    capped |= hi - lo > GOLDEN_WIDTH;
                    let t = 0.5 * (lo + hi);
                    trace.push(TraceEvent::Converged {
                        stage,
                        band: band.clone(),
                        t,
                        iterations,
                    });
                    done.push((band, t));
                } else {
                    next.push(Cell {
                        band,
                        lo,
                        hi,
                        iterations,
                    });
                }
            }
        }
        active = next;
        if splits > cfg.max_splits {
            capped = true;
            for cell in active.drain(..) {
                done.push((cell.band, 0.5 * (cell.lo + cell.hi)));
            }
        }
    }
    stats.splits += splits;
    Ok((splice_params(&zero, &done)?, capped))
}

/// Maximises `f` on the segment of `interval`, atom by atom.
///
/// A grid of `cfg.evt_grid` points locates every grid-local maximum; each is
/// refined by golden section inside its neighbouring grid brackets, and a
/// refined candidate replaces the incumbent only when strictly larger. Ties
/// therefore go to the smallest parameter.
pub(crate) fn maximize(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    cfg: &SolverConfig,
    stage: &'static str,
    trace: &mut Vec<TraceEvent>,
) -> Result<Extremum> {
    let model = interval.model();
    let n = cfg.evt_grid.max(3);
    let spacing = 1.0 / (n - 1) as f64;
    let grid: Vec<Element> = (0..n)
        .map(|k| f.eval(&interval.point_at(k as f64 * spacing)))
        .collect::<Result<_>>()?;

    // Grid argmax with strict comparison, so the smallest index wins.
    let mut best_v = grid[0].clone();
    let mut best_k = Element::zero(model);
    for (k, v) in grid.iter().enumerate().skip(1) {
        let better = Band::where_pair(v, &best_v, |new, old| new > old)?;
        best_k = better.splice(&Element::constant(model, k as f64), &best_k)?;
        best_v = best_v.sup(v)?;
    }

    // Layers of grid-local maxima: layer j holds, per atom, the index of its
    // j-th local maximum (−1 when there is none).
    let mut layers: Vec<Element> = Vec::new();
    let mut count = Element::zero(model);
    for k in 0..n {
        let rising = if k == 0 {
            Band::whole(model)
        } else {
            Band::where_pair(&grid[k], &grid[k - 1], |u, v| u > v)?
        };
        let falling = if k + 1 == n {
            Band::whole(model)
        } else {
            Band::where_pair(&grid[k], &grid[k + 1], |u, v| u >= v)?
        };
        let peak = rising.meet(&falling)?;
        if peak.is_empty() {
            continue;
        }
        let max_count = count.max_value() as usize;
        if layers.len() <= max_count {
            layers.resize(max_count + 1, Element::constant(model, -1.0));
        }
        for (j, layer) in layers.iter_mut().enumerate() {
            let here = peak.meet(&Band::where_value(&count, |c| c == j as f64))?;
            if !here.is_empty() {
                *layer = here.splice(&Element::constant(model, k as f64), layer)?;
            }
        }
        count = peak.splice(&count.map(|c| c + 1.0), &count)?;
    }

    let mut stats = SolveStats::default();
    let mut capped = false;
    let mut best_t = best_k.scale(spacing);
    let mut bands = Vec::new();
    for layer in &layers {
        let band = Band::where_value(layer, |k| k >= 0.0);
        let cells: Vec<Cell> = band
            .partition_by(layer)?
            .into_iter()
            .map(|(k, part)| {
                bands.push(part.clone());
                Cell {
                    band: part,
                    lo: ((k - 1.0) * spacing).max(0.0),
                    hi: ((k + 1.0) * spacing).min(1.0),
                    iterations: 0,
                }
            })
            .collect();
        let (t, cap) = golden(f, interval, cells, cfg, stage, &mut stats, trace)?;
        capped |= cap;
        let v = f.eval(&interval.point(&t))?;
        // Refined candidates must beat the incumbent strictly. Layers come in
        // increasing parameter order, so ties stay with the smaller t.
        let better = band.meet(&Band::where_pair(&v, &best_v, |new, old| new > old)?)?;
        best_t = better.splice(&t, &best_t)?;
        best_v = better.splice(&v, &best_v)?;
    }
    Ok(Extremum {
        t: best_t,
        value: best_v,
        capped,
        stats,
        bands,
    })
}

/// Largest amount by which the audit sample escapes `[f(c), f(d)]`.
fn audit(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    low: &Element,
    high: &Element,
    cfg: &SolverConfig,
) -> Result<Element> {
    let mut rng = sample::rng(cfg.stage_seed(4));
    let mut worst = Element::zero(interval.model());
    for _ in 0..cfg.audit_samples {
        let x = sample::random_in_interval(&mut rng, &interval.a, &interval.b);
        let fx = f.eval(&x)?;
        let above = fx.sub(high)?.pos_part();
        let below = low.sub(&fx)?.pos_part();
        worst = worst.sup(&above.sup(&below)?)?;
    }
    Ok(worst)
}

/// Finds `c, d ∈ [a, b]` with `f(c) ≤ f(x) ≤ f(d)`; the residual is the
/// largest violation on the audit sample.
pub fn solve_evt(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let mut report = SolveReport::new("evt");
    if let Some(lbp) = lbp_precheck(f, interval, cfg)? {
        report.evidence.insert(
            "note".into(),
            json!("without local band preservation the supremum of f need not be attained"),
        );
        return Ok(not_lbp(report, &lbp));
    }
    let max = maximize(f, interval, cfg, "max", &mut report.trace)?;
    let min = maximize(&Negated(f), interval, cfg, "min", &mut report.trace)?;
    let d = interval.point(&max.t);
    let c = interval.point(&min.t);
    let high = f.eval(&d)?;
    let low = f.eval(&c)?;
    report.residual = Some(audit(f, interval, &low, &high, cfg)?);
    report.evidence.insert("max".into(), high.to_json());
    report.evidence.insert("min".into(), low.to_json());
    report.witness = Witness::Pair { c, d };
    report.stats = max.stats;
    report.stats.absorb(&min.stats);
    let mut bands = max.bands;
    bands.extend(min.bands);
    audit_into(&mut report, f, interval, &bands, cfg)?;
    report.settle(cfg.tol, max.capped || min.capped);
    Ok(report)
}

/// Number of tiles the interval is cut into for [`order_bound`].
pub const BOUND_TILES: usize = 4;

/// Order bound `M` with `|f(x)| ≤ M` on `[a, b]`, merged over tiles by the
/// lattice supremum. The witness is `M`; the residual is the largest audit
/// excess `(|f(x)| − M)⁺`.
pub fn order_bound(
    f: &(impl LatticeMap + ?Sized),
    interval: &OrderInterval,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let mut report = SolveReport::new("bound");
    if let Some(lbp) = lbp_precheck(f, interval, cfg)? {
        return Ok(not_lbp(report, &lbp));
    }
    let model = interval.model();
    let mut bound = Element::zero(model);
    let mut capped = false;
    let mut bands = Vec::new();
    for j in 0..BOUND_TILES {
        let lo = j as f64 / BOUND_TILES as f64;
        let hi = (j + 1) as f64 / BOUND_TILES as f64;
        let tile = OrderInterval::new(interval.point_at(lo), interval.point_at(hi))?;
        let max = maximize(f, &tile, cfg, "bound-max", &mut report.trace)?;
        let min = maximize(&Negated(f), &tile, cfg, "bound-min", &mut report.trace)?;
        capped |= max.capped || min.capped;
        let tile_bound = max.value.modulus().sup(&min.value.modulus())?;
        // Where the new tile bound is larger it takes over: the splice
        // P_{M<M_j}(M_j) + P_{M_j≤M}(M) is the lattice supremum.
        bound = bound.sup(&tile_bound)?;
        report.stats.absorb(&max.stats);
        report.stats.absorb(&min.stats);
        bands.extend(max.bands);
        bands.extend(min.bands);
    }
    let mut rng = sample::rng(cfg.stage_seed(5));
    let mut excess = Element::zero(model);
    for _ in 0..cfg.audit_samples {
        let x = sample::random_in_interval(&mut rng, &interval.a, &interval.b);
        excess = excess.sup(&f.eval(&x)?.modulus().sub(&bound)?.pos_part())?;
    }
    report.residual = Some(excess);
    report.witness = Witness::Point(bound);
    audit_into(&mut report, f, interval, &bands, cfg)?;
    report.settle(cfg.tol, capped);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ModelSpec;
    use crate::dsl::{Builtin, FunctionHandle};
    use crate::solvers::Certificate;

    fn at(v: &[f64]) -> Element {
        Element::atomic(v.to_vec()).unwrap()
    }

    fn cfg(model: ModelSpec) -> SolverConfig {
        let mut c = SolverConfig::for_model(model);
        c.audit_samples = 500;
        c
    }

    #[test]
    fn parabola_extrema() {
        let model = ModelSpec::Atomic { dim: 3 };
        let f = FunctionHandle::parse("x*x - x", model).unwrap();
        let i = OrderInterval::new(Element::zero(model), Element::unit(model)).unwrap();
        let r = solve_evt(&f, &i, &cfg(model)).unwrap();
        assert_eq!(r.certificate, Certificate::Feasible);
        match r.witness {
            Witness::Pair { c, d } => {
                assert_eq!(c, Element::constant(model, 0.5));
                assert_eq!(d, Element::zero(model));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn constant_function_returns_a() {
        let model = ModelSpec::Atomic { dim: 2 };
        let f = FunctionHandle::parse("[1, 2]", model).unwrap();
        let a = at(&[0.25, -1.0]);
        let i = OrderInterval::new(a.clone(), at(&[1.0, 1.0])).unwrap();
        let r = solve_evt(&f, &i, &cfg(model)).unwrap();
        assert_eq!(r.witness, Witness::Pair { c: a.clone(), d: a });
        assert!(r.residual.unwrap().is_zero());
    }

    #[test]
    fn off_grid_maximum_is_refined() {
        let model = ModelSpec::Atomic { dim: 2 };
        let f = FunctionHandle::parse("sin(3*x) * x", model).unwrap();
        let i = OrderInterval::new(at(&[0.0, -1.0]), at(&[2.0, 1.5])).unwrap();
        let r = solve_evt(&f, &i, &cfg(model)).unwrap();
        assert_eq!(r.certificate, Certificate::Feasible, "{:?}", r.residual);
    }

    #[test]
    fn bounds() {
        let model = ModelSpec::Atomic { dim: 2 };
        let f = FunctionHandle::parse("x*x", model).unwrap();
        let i = OrderInterval::new(Element::zero(model), Element::constant(model, 2.0)).unwrap();
        let r = order_bound(&f, &i, &cfg(model)).unwrap();
        assert_eq!(r.witness.point().unwrap(), &Element::constant(model, 4.0));
        let g = FunctionHandle::parse("x*x - x", model).unwrap();
        let i = OrderInterval::new(Element::zero(model), Element::unit(model)).unwrap();
        let r = order_bound(&g, &i, &cfg(model)).unwrap();
        assert_eq!(r.witness.point().unwrap(), &Element::constant(model, 0.25));
        let s = FunctionHandle::Builtin(Builtin::SwizzleAffine);
        let r = order_bound(&s, &i, &cfg(model)).unwrap();
        assert_eq!(r.certificate.to_string(), "hypothesisViolated(notLbp)");
    }
}
