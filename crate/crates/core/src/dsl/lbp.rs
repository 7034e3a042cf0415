//! Dynamic checks on functions: local band preservation and a sampled
//! continuity probe.

use rand::Rng;
use serde_json::{json, Value};

use super::handle::LatticeMap;
use crate::algebra::Element;
use crate::band::Band;
use crate::calculus::OrderInterval;
use crate::error::Result;
use crate::sample::{self, SampleRng};
use crate::tolerance;

/// A pair `x, y` with `P(x) = P(y)` but `P(f(x)) ≠ P(f(y))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LbpWitness {
    pub band: Band,
    pub x: Element,
    pub y: Element,
    pub fx: Element,
    pub fy: Element,
    /// `max |P(f(x)) − P(f(y))|`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LbpReport {
    pub trials: usize,
    pub violations: usize,
    pub witness: Option<LbpWitness>,
}

impl LbpReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "pass": self.passed(),
            "trials": self.trials,
            "violations": self.violations,
        });
        if let Some(w) = &self.witness {
            out["witness"] = json!({
                "band": w.band.to_json(),
                "x": w.x.to_json(),
                "y": w.y.to_json(),
                "fx": w.fx.to_json(),
                "fy": w.fy.to_json(),
                "gap": w.gap,
            });
        }
        out
    }
}

/// Point of `[a, b]` whose parameter favours the endpoints and the midpoint,
/// where coordinate-mixing maps tend to reveal themselves.
fn biased_point(rng: &mut SampleRng, region: &OrderInterval) -> Element {
    let t = sample::random_element_with(rng, region.a.model(), |r| match r.random_range(0..8) {
        0 => 0.0,
        1 => 1.0,
        2 => 0.5,
        _ => r.random_range(0.0..=1.0),
    });
    region.point(&t)
}

/// Samples splices `y = P(x) + P^d(w)` in `region` and compares `P(f(x))`
/// with `P(f(y))`.
pub fn check_lbp(
    f: &(impl LatticeMap + ?Sized),
    region: &OrderInterval,
    trials: usize,
    seed: u64,
) -> Result<LbpReport> {
    let mut rng = sample::rng(seed);
    let model = region.a.model();
    let mut violations = 0;
    let mut witness = None;
    for _ in 0..trials {
        let x = biased_point(&mut rng, region);
        let w = biased_point(&mut rng, region);
        let band = sample::random_proper_band(&mut rng, model)
            .unwrap_or_else(|| sample::random_band(&mut rng, model));
        let y = band.splice(&x, &w)?;
        let fx = f.eval(&x)?;
        let fy = f.eval(&y)?;
        let gap = band.project(&fx.sub(&fy)?)?.max_abs();
        if gap > tolerance::EQ {
            violations += 1;
            if witness.is_none() {
                witness = Some(LbpWitness {
                    band,
                    x,
                    y,
                    fx,
                    fy,
                    gap,
                });
            }
        }
    }
    Ok(LbpReport {
        trials,
        violations,
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContinuityVerdict {
    Continuous,
    SuspectDiscontinuity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport {
    pub verdict: ContinuityVerdict,
    /// Largest oscillation (sup over atoms) per halving level.
    pub oscillation: Vec<f64>,
    /// Ratios between successive levels.
    pub ratios: Vec<f64>,
    /// Atom-wise oscillation at the finest level.
    pub final_oscillation: Element,
    /// Atoms whose oscillation did not decay.
    pub suspect: Band,
}

impl ContinuityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": match self.verdict {
                ContinuityVerdict::Continuous => "continuous",
                ContinuityVerdict::SuspectDiscontinuity => "suspectDiscontinuity",
            },
            "oscillation": self.oscillation,
            "ratios": self.ratios,
            "finalOscillation": self.final_oscillation.to_json(),
            "suspect": self.suspect.to_json(),
            "note": "sampled probe, not a proof",
        })
    }
}

/// Number of halving levels of the probe.
pub const PROBE_LEVELS: usize = 16;
/// Oscillation below which an atom counts as settled.
pub const PROBE_TOL: f64 = 1e-3;
const PROBE_RANDOM_SAMPLES: usize = 4;

/// Atom-wise oscillation of `f` over the sub-box of `region` between the
/// diagonal parameters `t0 < t1`.
fn cell_oscillation(
    f: &(impl LatticeMap + ?Sized),
    region: &OrderInterval,
    t0: f64,
    t1: f64,
    rng: &mut SampleRng,
) -> Result<Element> {
    let model = region.a.model();
    let lo = region.point_at(t0);
    let hi = region.point_at(t1);
    let mut points = vec![lo.clone(), hi.clone(), region.point_at(0.5 * (t0 + t1))];
    for _ in 0..PROBE_RANDOM_SAMPLES {
        let t = sample::random_parameter(rng, model);
        points.push(sample::segment_point(&lo, &hi, &t));
    }
    let mut max: Option<Element> = None;
    let mut min: Option<Element> = None;
    for p in &points {
        let v = f.eval(p)?;
        max = Some(match max {
            Some(m) => m.sup(&v)?,
            None => v.clone(),
        });
        min = Some(match min {
            Some(m) => m.inf(&v)?,
            None => v,
        });
    }
    max.expect("nonempty sample").sub(&min.expect("nonempty sample"))
}

/// Estimates an atom-wise modulus of continuity on shrinking boxes along the
/// diagonal of `region` and flags atoms whose oscillation does not decay.
///
/// At each level the `grid` cells with the largest oscillation are halved.
/// This is a heuristic probe, not a proof of continuity.
pub fn continuity_probe(
    f: &(impl LatticeMap + ?Sized),
    region: &OrderInterval,
    grid: usize,
    seed: u64,
) -> Result<ContinuityReport> {
    let grid = grid.max(1);
    let mut rng = sample::rng(seed);
    let mut cells: Vec<(f64, f64)> = (0..grid)
        .map(|i| (i as f64 / grid as f64, (i + 1) as f64 / grid as f64))
        .collect();
    let mut oscillation = Vec::new();
    let mut previous_atomwise: Option<Element> = None;
    let mut final_atomwise = Element::zero(region.a.model());
    for _ in 0..PROBE_LEVELS {
        let mut scored = Vec::with_capacity(cells.len());
        let mut level = Element::zero(region.a.model());
        for &(t0, t1) in &cells {
            let osc = cell_oscillation(f, region, t0, t1, &mut rng)?;
            level = level.sup(&osc)?;
            scored.push((osc.max_abs(), t0, t1));
        }
        oscillation.push(level.max_abs());
        previous_atomwise = Some(std::mem::replace(&mut final_atomwise, level));
        // Keep the worst cells; ties go to the smaller parameter.
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
        scored.truncate(grid);
        cells = scored
            .iter()
            .flat_map(|&(_, t0, t1)| {
                let mid = 0.5 * (t0 + t1);
                [(t0, mid), (mid, t1)]
            })
            .collect();
    }
    let ratios = oscillation
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let previous = previous_atomwise.expect("at least one level");
    // An atom is suspect when its oscillation is still large and has not
    // shrunk over the last halving.
    let suspect = Band::where_pair(&final_atomwise, &previous, |now, before| {
        now > PROBE_TOL && now > 0.75 * before
    })?;
    let verdict = if suspect.is_empty() {
        ContinuityVerdict::Continuous
    } else {
        ContinuityVerdict::SuspectDiscontinuity
    };
    Ok(ContinuityReport {
        verdict,
        oscillation,
        ratios,
        final_oscillation: final_atomwise,
        suspect,
    })
}
