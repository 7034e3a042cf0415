//! Demo gallery: worked examples and counterexamples, each paired with an
//! expected report fragment so the gallery checks itself.

use latcalc_core::calculus::{self, DiffMode, OrderInterval};
use latcalc_core::dsl::{check_lbp, Builtin};
use latcalc_core::solvers::{self, ComplexPoly, SolveReport, SolverConfig};
use latcalc_core::{Band, ComplexElement, Element, FunctionHandle, LatticeMap, ModelSpec, Result};
use serde_json::{json, Value};

/// Absolute tolerance for numbers when matching a fragment.
pub const FRAGMENT_TOL: f64 = 1e-6;

/// Seed used by every demo, so that reruns are byte-identical.
pub const DEMO_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    /// A counterexample that behaved as expected.
    Negative,
}

#[derive(Clone, Debug)]
pub struct DemoRun {
    pub report: Value,
    pub outcome: Outcome,
}

pub struct DemoEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Expected fragment of the report, as JSON text.
    pub expected: &'static str,
    pub executable: bool,
    run: fn() -> Result<DemoRun>,
}

impl DemoEntry {
    pub fn expected_fragment(&self) -> Value {
        serde_json::from_str(self.expected).expect("gallery fragments are valid JSON")
    }

    pub fn run(&self) -> Result<DemoRun> {
        (self.run)()
    }
}

/// All entries in listing order.
pub fn registry() -> &'static [DemoEntry] {
    &REGISTRY
}

pub fn find(name: &str) -> Option<&'static DemoEntry> {
    REGISTRY.iter().find(|d| d.name == name)
}

static REGISTRY: [DemoEntry; 12] = [
    DemoEntry {
        name: "ivt-fail",
        description: "(x, y) -> (x, x^2) misses (1/2, 1/2): the intermediate value theorem needs LBP",
        expected: r#"{"certificate": "hypothesisViolated(notLbp)",
                      "gridAudit": {"grid": 100, "certified": true}}"#,
        executable: true,
        run: ivt_fail,
    },
    DemoEntry {
        name: "evt-fail",
        description: "(x, y) -> (x, 1 - x) has the unattained supremum (1, 1) on [0, e]",
        expected: r#"{"certificate": "hypothesisViolated(notLbp)",
                      "unattainedSupremum": {"supremum": [1, 1], "attained": false}}"#,
        executable: true,
        run: evt_fail,
    },
    DemoEntry {
        name: "kn-threshold",
        description: "coordinate ramps k_n on R^8: LBP, k(1/n) = e, and k(c) = e/2 at c_n = 3/(4n)",
        expected: r#"{"lbp": {"pass": true, "violations": 0},
                      "valueAtInverse": [1, 1, 1, 1, 1, 1, 1, 1],
                      "certificate": "feasible",
                      "witness": [0.75, 0.375, 0.25, 0.1875, 0.15, 0.125, 0.10714285714285714, 0.09375]}"#,
        executable: true,
        run: kn_threshold,
    },
    DemoEntry {
        name: "thin-sqrt-classify",
        description: "thin_sqrt at (0, 0) is order differentiable but not super differentiable",
        expected: r#"{"classification": "orderOnly",
                      "order": {"verdict": "pass"}, "super": {"verdict": "fail"},
                      "lbp": {"pass": false}}"#,
        executable: true,
        run: thin_sqrt_classify,
    },
    DemoEntry {
        name: "ivt-square",
        description: "x*x on [0, 2e] in R^2 hits (2.25, 0.25) at (1.5, 0.5)",
        expected: r#"{"certificate": "feasible", "witness": [1.5, 0.5], "residual": [0, 0]}"#,
        executable: true,
        run: ivt_square,
    },
    DemoEntry {
        name: "evt-parabola",
        description: "x*x - x on [0, e] in R^3: minimum -e/4 at e/2, maximum 0 at 0",
        expected: r#"{"certificate": "feasible",
                      "witness": {"c": [0.5, 0.5, 0.5], "d": [0, 0, 0]},
                      "evidence": {"min": [-0.25, -0.25, -0.25], "max": [0, 0, 0]}}"#,
        executable: true,
        run: evt_parabola,
    },
    DemoEntry {
        name: "rolle-parabola",
        description: "x*x - x on [0, e] in R^2 has a critical point at e/2",
        expected: r#"{"certificate": "feasible", "witness": [0.5, 0.5], "residual": [0, 0]}"#,
        executable: true,
        run: rolle_parabola,
    },
    DemoEntry {
        name: "mvt-cubic",
        description: "x^3 on [0, e] in R^2: mean value point e/sqrt(3)",
        expected: r#"{"certificate": "feasible",
                      "witness": [0.5773502691896258, 0.5773502691896258]}"#,
        executable: true,
        run: mvt_cubic,
    },
    DemoEntry {
        name: "cmvt-square",
        description: "z^2 from 0 to (1 + i)e: imaginary-part point v = (1 + i)e/2",
        expected: r#"{"certificate": "feasible",
                      "witness": {"v": {"re": [0.5, 0.5], "im": [0.5, 0.5]}}}"#,
        executable: true,
        run: cmvt_square,
    },
    DemoEntry {
        name: "band-decomposition",
        description: "P_{x<y} + P_{y<x} + P_{x=y} is the identity, and P_{x<y}(y - x) = (y - x)+",
        expected: r#"{"lt": {"atoms": [0, 3]}, "gt": {"atoms": [2]}, "eq": {"atoms": [1]},
                      "identity": true, "positivePart": true}"#,
        executable: true,
        run: band_decomposition,
    },
    DemoEntry {
        name: "l0-unbounded",
        description: "narrative: an order continuous function on L0[0, 1] that is not order bounded",
        expected: r#"{"executable": false}"#,
        executable: false,
        run: l0_unbounded,
    },
    DemoEntry {
        name: "order-diff-not-lbp",
        description: "narrative: an order differentiable map on R^N that is not LBP",
        expected: r#"{"executable": false}"#,
        executable: false,
        run: order_diff_not_lbp,
    },
];

/// Checks that every key of `expected` occurs in `actual` with a matching
/// value. Numbers match within [`FRAGMENT_TOL`]; arrays must have equal length.
pub fn match_fragment(actual: &Value, expected: &Value) -> std::result::Result<(), String> {
    match_at(actual, expected, "$")
}

fn match_at(actual: &Value, expected: &Value, path: &str) -> std::result::Result<(), String> {
    match (expected, actual) {
        (Value::Object(want), Value::Object(got)) => {
            for (k, v) in want {
                let sub = format!("{path}.{k}");
                let a = got.get(k).ok_or_else(|| format!("{sub}: missing"))?;
                match_at(a, v, &sub)?;
            }
            Ok(())
        }
        (Value::Array(want), Value::Array(got)) => {
            if want.len() != got.len() {
                return Err(format!("{path}: length {} != {}", got.len(), want.len()));
            }
            for (i, (a, w)) in got.iter().zip(want).enumerate() {
                match_at(a, w, &format!("{path}[{i}]"))?;
            }
            Ok(())
        }
        (Value::Number(w), Value::Number(a)) => {
            let (w, a) = (w.as_f64().unwrap_or(f64::NAN), a.as_f64().unwrap_or(f64::NAN));
            if (w - a).abs() <= FRAGMENT_TOL {
                Ok(())
            } else {
                Err(format!("{path}: {a} != {w}"))
            }
        }
        (w, a) if w == a => Ok(()),
        (w, a) => Err(format!("{path}: {a} != {w}")),
    }
}

fn atomic(values: &[f64]) -> Element {
    Element::atomic(values.to_vec()).expect("finite literal")
}

fn unit_box(dim: usize) -> OrderInterval {
    let model = ModelSpec::Atomic { dim };
    OrderInterval::new(Element::zero(model), Element::unit(model)).expect("0 <= e")
}

fn cfg(model: ModelSpec) -> SolverConfig {
    SolverConfig::for_model(model).with_seed(DEMO_SEED)
}

fn solver_run(report: SolveReport) -> DemoRun {
    let outcome = if report.certificate.is_negative() {
        Outcome::Negative
    } else {
        Outcome::Positive
    };
    DemoRun {
        report: report.to_json(),
        outcome,
    }
}

fn with_extra(mut run: DemoRun, key: &str, value: Value) -> DemoRun {
    run.report[key] = value;
    run
}

fn narrative(lines: &[&str]) -> Value {
    json!(lines)
}

fn ivt_fail() -> Result<DemoRun> {
    let f = FunctionHandle::Builtin(Builtin::FirstSquare);
    let i = unit_box(2);
    let y = atomic(&[0.5, 0.5]);
    let report = solvers::solve_ivt(&f, &i, &y, &cfg(i.model()))?;

    // Sup-order distance max(|x - 1/2|, |x^2 - 1/2|) over a 100 x 100 grid of
    // [0, 1]^2. It depends on x only and is 2-Lipschitz there, so between grid
    // nodes it can drop by at most one grid step.
    let n = 100usize;
    let step = 1.0 / (n - 1) as f64;
    let mut min = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (x0, x1) = (i as f64 * step, j as f64 * step);
            let fx = f.eval(&atomic(&[x0, x1]))?;
            let v = fx.as_atomic().expect("atomic");
            let d = (v[0] - 0.5).abs().max((v[1] - 0.5).abs());
            if d < min {
                min = d;
                argmin = (x0, x1);
            }
        }
    }
    let slack = 2.0 * step / 2.0;
    let bound = min - slack;
    let audit = json!({
        "grid": n,
        "minDistance": min,
        "argmin": [argmin.0, argmin.1],
        "lipschitzSlack": slack,
        "certifiedLowerBound": bound,
        "threshold": 0.05,
        "certified": bound >= 0.05,
    });
    let run = with_extra(solver_run(report), "gridAudit", audit);
    Ok(with_extra(
        run,
        "narrative",
        narrative(&[
            "f(x, y) = (x, x^2) maps [0, e] onto the curve {(s, s^2)}.",
            "f(0) = 0 and f(e) = e, yet (1/2, 1/2) is never attained: s = 1/2 forces s^2 = 1/4.",
            "f mixes coordinates, so it is not locally band preserving and the solver refuses.",
        ]),
    ))
}

fn evt_fail() -> Result<DemoRun> {
    let g = FunctionHandle::Builtin(Builtin::SwizzleAffine);
    let i = unit_box(2);
    let report = solvers::solve_evt(&g, &i, &cfg(i.model()))?;

    // Every value is (s, 1 - s). The coordinatewise supremum of the range is
    // (1, 1); it would need s = 1 and s = 0 at once.
    let n = 100usize;
    let mut sup = [f64::NEG_INFINITY; 2];
    let mut closest = f64::INFINITY;
    for k in 0..n {
        let s = k as f64 / (n - 1) as f64;
        let v = g.eval(&atomic(&[s, s]))?;
        let v = v.as_atomic().expect("atomic");
        sup[0] = sup[0].max(v[0]);
        sup[1] = sup[1].max(v[1]);
        closest = closest.min((1.0 - v[0]).max(1.0 - v[1]));
    }
    let evidence = json!({
        "supremum": sup,
        "closestApproach": closest,
        "attained": closest <= latcalc_core::tolerance::EQ,
    });
    let run = with_extra(solver_run(report), "unattainedSupremum", evidence);
    Ok(with_extra(
        run,
        "narrative",
        narrative(&[
            "g(x, y) = (x, 1 - x) is continuous on the order interval [0, e].",
            "Its range {(s, 1 - s)} has supremum (1, 1), which no point attains.",
            "g is not locally band preserving, so no maximiser is promised.",
        ]),
    ))
}

fn kn_threshold() -> Result<DemoRun> {
    let dim = 8;
    let model = ModelSpec::Atomic { dim };
    let f = FunctionHandle::Builtin(Builtin::KnThreshold);
    let i = unit_box(dim);
    let lbp = check_lbp(&f, &i, 1000, DEMO_SEED)?;
    let inverse: Vec<f64> = (1..=dim).map(|n| 1.0 / n as f64).collect();
    let at_inverse = f.eval(&atomic(&inverse))?;
    let report = solvers::solve_ivt(&f, &i, &Element::constant(model, 0.5), &cfg(model))?;
    let mut run = solver_run(report);
    run.report["lbp"] = lbp.to_json();
    run.report["valueAtInverse"] = at_inverse.to_json();
    run.report["narrative"] = narrative(&[
        "k_n(t) = 0 for t <= 1/(2n), 1 for t >= 1/n, linear in between.",
        "The map acts one coordinate at a time, so it is locally band preserving.",
        "At x_n = 1/n every coordinate reaches 1, so f(x) = e.",
        "Solving f(c) = e/2 gives c_n = 3/(4n), found band-wise by bisection.",
        "On C(bN) the same ramps do not act pointwise; only this truncation runs.",
    ]);
    Ok(run)
}

fn thin_sqrt_classify() -> Result<DemoRun> {
    let model = ModelSpec::Atomic { dim: 2 };
    let f = FunctionHandle::Builtin(Builtin::ThinSqrt);
    let c = Element::zero(model);
    let r = Element::unit(model);
    let class = calculus::classify(&f, &c, &r, DEMO_SEED)?;
    let d = calculus::estimate_derivative(&f, &c)?;
    let samples = calculus::CLASSIFY_SAMPLES;
    let order = calculus::verify_differentiability(&f, &c, &d, DiffMode::Order, &r, samples, DEMO_SEED)?;
    let sup = calculus::verify_differentiability(&f, &c, &d, DiffMode::Super, &r, samples, DEMO_SEED)?;
    let region = OrderInterval::new(r.neg(), r.clone())?;
    let lbp = check_lbp(&f, &region, 1000, DEMO_SEED)?;
    Ok(DemoRun {
        report: json!({
            "classification": class.name(),
            "derivative": d.to_json(),
            "order": order.to_json(),
            "super": sup.to_json(),
            "lbp": lbp.to_json(),
            "narrative": [
                "thin_sqrt(x1, x2) = (sqrt|x1| [x2 = 0], 0).",
                "Moving every atom off 0 kills the first coordinate, so the order remainder vanishes.",
                "Along the thin set x2 = 0 the remainder is sqrt(t), far above t * eps.",
                "Hence orderOnly: order differentiable at 0 but not super differentiable.",
            ],
        }),
        outcome: Outcome::Positive,
    })
}

fn ivt_square() -> Result<DemoRun> {
    let model = ModelSpec::Atomic { dim: 2 };
    let f = FunctionHandle::parse("x*x", model)?;
    let i = OrderInterval::new(Element::zero(model), Element::constant(model, 2.0))?;
    let y = atomic(&[2.25, 0.25]);
    Ok(solver_run(solvers::solve_ivt(&f, &i, &y, &cfg(model))?))
}

fn evt_parabola() -> Result<DemoRun> {
    let model = ModelSpec::Atomic { dim: 3 };
    let f = FunctionHandle::parse("x*x - x", model)?;
    let i = unit_box(3);
    Ok(solver_run(solvers::solve_evt(&f, &i, &cfg(model))?))
}

fn rolle_parabola() -> Result<DemoRun> {
    let model = ModelSpec::Atomic { dim: 2 };
    let f = FunctionHandle::parse("x*x - x", model)?;
    Ok(solver_run(solvers::solve_rolle(&f, &unit_box(2), &cfg(model))?))
}

fn mvt_cubic() -> Result<DemoRun> {
    let model = ModelSpec::Atomic { dim: 2 };
    let f = FunctionHandle::parse("x^3", model)?;
    Ok(solver_run(solvers::solve_mvt(&f, &unit_box(2), &cfg(model))?))
}

fn cmvt_square() -> Result<DemoRun> {
    let model = ModelSpec::Atomic { dim: 2 };
    let f = ComplexPoly::from_expr(&latcalc_core::dsl::parse("x^2")?, model)?;
    let a = ComplexElement::zero(model);
    let b = ComplexElement::unit(model).add(&ComplexElement::i(model))?;
    Ok(solver_run(solvers::solve_complex_mvt(&f, &a, &b, &cfg(model))?))
}

fn band_decomposition() -> Result<DemoRun> {
    let x = atomic(&[1.0, 2.0, 3.0, 4.0]);
    let y = atomic(&[2.0, 2.0, 1.0, 5.0]);
    let lt = Band::lt(&x, &y)?;
    let gt = Band::lt(&y, &x)?;
    let eq = Band::eq(&x, &y)?;
    let u = atomic(&[0.3, -1.0, 7.0, 2.5]);
    let sum = lt.project(&u)?.add(&gt.project(&u)?)?.add(&eq.project(&u)?)?;
    let diff = y.sub(&x)?;
    Ok(DemoRun {
        report: json!({
            "x": x.to_json(),
            "y": y.to_json(),
            "lt": lt.to_json(),
            "gt": gt.to_json(),
            "eq": eq.to_json(),
            "identity": sum == u,
            "positivePart": lt.project(&diff)? == diff.pos_part(),
        }),
        outcome: Outcome::Positive,
    })
}

fn l0_unbounded() -> Result<DemoRun> {
    Ok(DemoRun {
        report: json!({
            "executable": false,
            "narrative": [
                "On L0[0, 1] an order continuous function can fail to be order bounded on [0, e].",
                "The construction extends a function from a dense set (Tietze), which is not constructive.",
                "Locally band preserving maps are order bounded on order intervals; see `latcalc bound`.",
            ],
        }),
        outcome: Outcome::Positive,
    })
}

fn order_diff_not_lbp() -> Result<DemoRun> {
    Ok(DemoRun {
        report: json!({
            "executable": false,
            "narrative": [
                "On R^N, f(x) = 0 when x_n -> 1/2 and e otherwise is order differentiable but not LBP.",
                "The behaviour needs infinitely many coordinates and has no finite truncation.",
                "thin-sqrt-classify shows the order versus super gap in R^2 instead.",
            ],
        }),
        outcome: Outcome::Positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_listed() {
        let names: Vec<_> = registry().iter().map(|d| d.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        for required in ["ivt-fail", "evt-fail", "kn-threshold", "thin-sqrt-classify"] {
            assert!(names.contains(&required));
        }
    }

    #[test]
    fn fragment_matching() {
        let actual = json!({"a": [1.0, 2.0000001], "b": {"c": "x", "d": 3}});
        assert!(match_fragment(&actual, &json!({"a": [1, 2]})).is_ok());
        assert!(match_fragment(&actual, &json!({"b": {"c": "x"}})).is_ok());
        assert!(match_fragment(&actual, &json!({"b": {"c": "y"}})).is_err());
        assert!(match_fragment(&actual, &json!({"a": [1]})).is_err());
        assert!(match_fragment(&actual, &json!({"z": 1})).is_err());
    }

    #[test]
    fn every_demo_matches_its_fragment() {
        for demo in registry() {
            let run = demo.run().unwrap();
            if let Err(e) = match_fragment(&run.report, &demo.expected_fragment()) {
                panic!("{}: {e}\n{}", demo.name, run.report);
            }
        }
    }
}
