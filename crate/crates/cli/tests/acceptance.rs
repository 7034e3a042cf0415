//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Oracles are computed here with plain `f64` arithmetic (per-atom Horner
//! evaluation, exhaustive grids, `hypot`) rather than through the library.

use std::process::Command;
use std::time::Instant;

use latcalc_core::calculus::{self, central_difference, Classification, OrderInterval};
use latcalc_core::dsl::{check_lbp, differentiate, Builtin, ScalarFn};
use latcalc_core::problem::{Problem, SolverKind};
use latcalc_core::solvers::{Certificate, Witness};
use latcalc_core::{Band, ComplexElement, Element, FuncExpr, FunctionHandle, ModelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn atomic(v: Vec<f64>) -> Element {
    Element::atomic(v).expect("finite")
}

fn values(x: &Element) -> Vec<f64> {
    x.as_atomic().expect("atomic element").to_vec()
}

/// Values of a dyadic element on the `2^depth` finest cells.
fn fine_values(x: &Element, depth: u8) -> Vec<f64> {
    let n = 1usize << depth;
    (0..n)
        .map(|k| x.value_at_point((k as f64 + 0.5) / n as f64).expect("dyadic element"))
        .collect()
}

fn latcalc(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_latcalc"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

// Per-atom polynomial oracle: coefficient `k` of atom `i` is `coeffs[k][i]`.
struct Poly {
    coeffs: Vec<Vec<f64>>,
}

impl Poly {
    fn random(r: &mut ChaCha8Rng, dim: usize) -> Poly {
        let degree = r.random_range(1..=3usize);
        let coeffs = (0..=degree)
            .map(|_| (0..dim).map(|_| r.random_range(-2.0..2.0)).collect())
            .collect();
        Poly { coeffs }
    }

    fn dsl(&self) -> String {
        let lit = |c: &[f64]| {
            let parts: Vec<String> = c.iter().map(|v| format!("{v:?}")).collect();
            format!("[{}]", parts.join(", "))
        };
        let mut text = lit(&self.coeffs[0]);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            text.push_str(&format!(" + {} * x^{k}", lit(c)));
        }
        text
    }

    fn eval(&self, i: usize, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c[i])
    }

    fn deriv(&self, i: usize, t: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * t + k as f64 * c[i])
    }
}

/// `[a, b]` with `b − a ≥ 0.2` on every atom.
fn random_box(r: &mut ChaCha8Rng, dim: usize) -> (Vec<f64>, Vec<f64>) {
    let a: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..0.5)).collect();
    let b = a.iter().map(|v| v + r.random_range(0.2..1.5)).collect();
    (a, b)
}

fn problem_json(model: &str, dsl: &str, a: Value, b: Value, target: Option<Value>, seed: u64) -> Value {
    let mut p = json!({
        "model": model,
        "function": {"dsl": dsl},
        "interval": {"a": a, "b": b},
        "seed": seed,
    });
    if let Some(t) = target {
        p["target"] = t;
    }
    p
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let tau = latcalc_core::tolerance::EQ;
    let mut r = rng(1);
    let mut checked = 0;
    let mut cases: Vec<(Element, Element, Element, ModelSpec)> = Vec::new();
    for k in 0..1000 {
        let draw = |r: &mut ChaCha8Rng| -> f64 {
            if k % 2 == 0 {
                f64::from(r.random_range(-3i32..=3)) / 2.0
            } else {
                r.random_range(-3.0..3.0)
            }
        };
        let x = atomic((0..8).map(|_| draw(&mut r)).collect());
        let y = atomic((0..8).map(|_| draw(&mut r)).collect());
        let u = atomic((0..8).map(|_| r.random_range(-5.0..5.0)).collect());
        cases.push((x, y, u, ModelSpec::Atomic { dim: 8 }));
    }
    for k in 0..200 {
        let depth = (k % 6) as u8;
        let n = 1usize << depth;
        let mk = |r: &mut ChaCha8Rng| {
            let v: Vec<f64> = (0..n).map(|_| f64::from(r.random_range(-2i32..=2))).collect();
            Element::dyadic_uniform(5, depth, &v).expect("valid")
        };
        let x = mk(&mut r);
        let y = mk(&mut r);
        let u = Element::dyadic_uniform(5, 5, &(0..32).map(|_| r.random_range(-5.0..5.0)).collect::<Vec<_>>())
            .expect("valid");
        cases.push((x, y, u, ModelSpec::Dyadic { max_depth: 5 }));
    }

    for (x, y, u, model) in &cases {
        let lt = Band::lt(x, y).map_err(err)?;
        let gt = Band::lt(y, x).map_err(err)?;
        let eq = Band::eq(x, y).map_err(err)?;
        let sum = lt
            .project(u)
            .and_then(|p| p.add(&gt.project(u)?))
            .and_then(|p| p.add(&eq.project(u)?))
            .map_err(err)?;
        ensure!(&sum == u, "decomposition is not the identity for x={x}, y={y}");
        let d = y.sub(x).map_err(err)?;
        ensure!(lt.project(&d).map_err(err)? == d.pos_part(), "P_(x<y)(y-x) != (y-x)+ for x={x}, y={y}");

        // Largest-band inclusions, atom by atom against the oracle.
        let (xs, ys, ls, gs, es) = match model {
            ModelSpec::Atomic { .. } => (
                values(x),
                values(y),
                values(lt.indicator()),
                values(gt.indicator()),
                values(eq.indicator()),
            ),
            ModelSpec::Dyadic { .. } => (
                fine_values(x, 5),
                fine_values(y, 5),
                fine_values(lt.indicator(), 5),
                fine_values(gt.indicator(), 5),
                fine_values(eq.indicator(), 5),
            ),
        };
        for i in 0..xs.len() {
            let want_lt = ys[i] - xs[i] > tau;
            let want_gt = xs[i] - ys[i] > tau;
            let want_eq = !want_lt && !want_gt;
            ensure!(
                (ls[i] != 0.0) == want_lt && (gs[i] != 0.0) == want_gt && (es[i] != 0.0) == want_eq,
                "band membership wrong at atom {i} for x={x}, y={y}"
            );
        }
        checked += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 5.0, "took {elapsed:.2}s");
    Ok(format!("{checked} pairs (1000 atomic, 200 dyadic) in {elapsed:.2}s"))
}

fn criterion_2() -> Check {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 100 {
        let model = if n % 2 == 0 {
            ModelSpec::Atomic { dim: 8 }
        } else {
            ModelSpec::Dyadic { max_depth: 5 }
        };
        let (re, im) = match model {
            ModelSpec::Atomic { dim } => (
                atomic((0..dim).map(|_| r.random_range(-3.0..3.0)).collect()),
                atomic((0..dim).map(|_| r.random_range(-3.0..3.0)).collect()),
            ),
            ModelSpec::Dyadic { .. } => {
                let mut draw = || (0..8).map(|_| r.random_range(-3.0..3.0)).collect::<Vec<_>>();
                (
                    Element::dyadic_uniform(5, 3, &draw()).map_err(err)?,
                    Element::dyadic_uniform(5, 3, &draw()).map_err(err)?,
                )
            }
        };
        let oracle = re.zip_with(&im, f64::hypot).map_err(err)?;
        if !oracle.all(|v| v >= 1e-3) {
            continue;
        }
        let z = ComplexElement::new(re, im).map_err(err)?;
        let exact = z.modulus();
        ensure!(exact.approx_eq(&oracle, 1e-12).map_err(err)?, "closed form {exact} != hypot {oracle}");
        let g1 = z.modulus_grid(1024);
        let g2 = z.modulus_grid(2048);
        let g4 = z.modulus_grid(4096);
        ensure!(
            g1.le(&g2).map_err(err)? && g2.le(&g4).map_err(err)?,
            "grid values not monotone for {z:?}"
        );
        let rel = g4
            .zip_with(&oracle, |g, o| (o - g).abs() / o)
            .map_err(err)?
            .max_value();
        ensure!(rel <= 1e-6, "relative gap {rel:e} at 4096 angles");
        worst = worst.max(rel);
        n += 1;
    }
    Ok(format!("100 elements, worst relative gap {worst:.2e}"))
}

fn first_square(s: f64, _t: f64) -> (f64, f64) {
    (s, s * s)
}

fn criterion_3() -> Check {
    let (code, stdout) = latcalc(&["demo", "ivt-fail", "--json"]);
    let v: Value = serde_json::from_slice(&stdout).map_err(err)?;
    ensure!(code == Some(2), "exit code {code:?}");
    ensure!(
        v["certificate"] == "hypothesisViolated(notLbp)",
        "certificate {}",
        v["certificate"]
    );
    // f(s, t) = (s, s^2); distance to (1/2, 1/2) in the sup norm on R^2.
    let n = 100;
    let mut min = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let (s, t) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            let (f0, f1) = first_square(s, t);
            min = min.min((f0 - 0.5).abs().max((f1 - 0.5).abs()));
        }
    }
    // 2-Lipschitz in s, so off-grid values are at most one step lower.
    let certified = min - 1.0 / (n - 1) as f64;
    ensure!(certified >= 0.05, "certified distance {certified}");
    let reported = v["gridAudit"]["minDistance"].as_f64().unwrap_or(f64::NAN);
    ensure!((reported - min).abs() <= 1e-12, "demo reports {reported}, oracle {min}");
    Ok(format!(
        "notLbp; grid distance {min:.4}, certified lower bound {certified:.4}"
    ))
}

fn criterion_4() -> Check {
    let mut r = rng(4);
    let dim = 8;
    let mut worst: f64 = 0.0;
    let mut max_iter = 0;
    for k in 0..200 {
        let poly = Poly::random(&mut r, dim);
        let (a, b) = random_box(&mut r, dim);
        let target: Vec<f64> = (0..dim)
            .map(|i| {
                let (fa, fb) = (poly.eval(i, a[i]), poly.eval(i, b[i]));
                fa + r.random_range(0.0..=1.0) * (fb - fa)
            })
            .collect();
        let p = problem_json("atomic:8", &poly.dsl(), json!(a), json!(b), Some(json!(target)), k);
        let rep = Problem::from_json(&p).and_then(|p| p.solve(SolverKind::Ivt)).map_err(err)?;
        ensure!(
            rep.certificate == Certificate::Feasible,
            "problem {k}: {} ({:?})",
            rep.certificate,
            rep.detail
        );
        let c = values(rep.witness.point().ok_or("no witness")?);
        for i in 0..dim {
            ensure!(a[i] <= c[i] && c[i] <= b[i], "problem {k}: witness outside [a, b]");
            let res = (poly.eval(i, c[i]) - target[i]).abs();
            ensure!(res <= 1e-8, "problem {k} atom {i}: residual {res:e}");
            worst = worst.max(res);
        }
        ensure!(rep.stats.max_cell_iterations <= 200, "problem {k}: {} bisections", rep.stats.max_cell_iterations);
        max_iter = max_iter.max(rep.stats.max_cell_iterations);
    }

    let mut worst_d: f64 = 0.0;
    let mut max_splits = 0;
    for k in 0..50 {
        let poly = Poly::random(&mut r, 1);
        let depth = r.random_range(0..=5u8);
        let cells = 1usize << depth;
        let a: Vec<f64> = (0..cells).map(|_| r.random_range(-1.0..0.5)).collect();
        let b: Vec<f64> = a.iter().map(|v| v + r.random_range(0.2..1.5)).collect();
        let y: Vec<f64> = (0..cells)
            .map(|i| {
                let (fa, fb) = (poly.eval(0, a[i]), poly.eval(0, b[i]));
                fa + r.random_range(0.0..=1.0) * (fb - fa)
            })
            .collect();
        let el = |v: &[f64]| Element::dyadic_uniform(5, depth, v).map(|e| e.to_json());
        let dsl = poly.dsl().replace(['[', ']'], "");
        let p = problem_json(
            "dyadic:5",
            &dsl,
            el(&a).map_err(err)?,
            el(&b).map_err(err)?,
            Some(el(&y).map_err(err)?),
            1000 + k,
        );
        let rep = Problem::from_json(&p).and_then(|p| p.solve(SolverKind::Ivt)).map_err(err)?;
        ensure!(
            rep.certificate == Certificate::Feasible,
            "dyadic problem {k}: {} ({:?})",
            rep.certificate,
            rep.detail
        );
        ensure!(rep.stats.splits <= 64, "dyadic problem {k}: {} splits", rep.stats.splits);
        max_splits = max_splits.max(rep.stats.splits);
        let c = fine_values(rep.witness.point().ok_or("no witness")?, 5);
        let yf = fine_values(&Element::dyadic_uniform(5, depth, &y).map_err(err)?, 5);
        for (s, (ci, yi)) in c.iter().zip(&yf).enumerate() {
            let res = (poly.eval(0, *ci) - yi).abs();
            ensure!(res <= 1e-6, "dyadic problem {k} cell {s}: residual {res:e}");
            worst_d = worst_d.max(res);
        }
    }
    Ok(format!(
        "200 atomic (worst residual {worst:.1e}, max {max_iter} bisections/cell), \
         50 dyadic (worst residual {worst_d:.1e}, max {max_splits} splits)"
    ))
}

fn criterion_5() -> Check {
    let (code, stdout) = latcalc(&["demo", "evt-fail", "--json"]);
    let v: Value = serde_json::from_slice(&stdout).map_err(err)?;
    ensure!(code == Some(2), "evt-fail exit code {code:?}");
    ensure!(
        v["certificate"].as_str().is_some_and(|c| c.starts_with("hypothesisViolated")),
        "evt-fail certificate {}",
        v["certificate"]
    );

    let mut r = rng(5);
    let dim = 8;
    let mut worst: f64 = f64::NEG_INFINITY;
    for k in 0..100 {
        let poly = Poly::random(&mut r, dim);
        let (a, b) = random_box(&mut r, dim);
        let p = problem_json("atomic:8", &poly.dsl(), json!(a), json!(b), None, k);
        let rep = Problem::from_json(&p).and_then(|p| p.solve(SolverKind::Evt)).map_err(err)?;
        ensure!(rep.certificate == Certificate::Feasible, "problem {k}: {} ({:?})", rep.certificate, rep.detail);
        let Witness::Pair { c, d } = &rep.witness else {
            return Err(format!("problem {k}: no pair witness"));
        };
        let (c, d) = (values(c), values(d));
        for i in 0..dim {
            let (fc, fd) = (poly.eval(i, c[i]), poly.eval(i, d[i]));
            for _ in 0..10_000 {
                let t = r.random_range(a[i]..=b[i]);
                let fx = poly.eval(i, t);
                worst = worst.max(fx - fd).max(fc - fx);
                ensure!(fx <= fd + 1e-6, "problem {k} atom {i}: f({t}) = {fx} > f(d) = {fd}");
                ensure!(fc <= fx + 1e-6, "problem {k} atom {i}: f({t}) = {fx} < f(c) = {fc}");
            }
        }
    }
    Ok(format!(
        "evt-fail refused; 100 problems x 10^4 audit points, worst excess {:.1e}",
        worst.max(0.0)
    ))
}

fn criterion_6() -> Check {
    let unit = |dsl: &str, kind: SolverKind| {
        let p = problem_json("atomic:3", dsl, json!(0), json!(1), None, 0);
        Problem::from_json(&p).and_then(|p| p.solve(kind)).map_err(err)
    };
    let rolle = unit("x*x - x", SolverKind::Rolle)?;
    ensure!(rolle.certificate == Certificate::Feasible, "rolle: {}", rolle.certificate);
    let x0 = values(rolle.witness.point().ok_or("no rolle witness")?);
    for t in &x0 {
        ensure!((t - 0.5).abs() <= 1e-6, "rolle point {t}");
        ensure!((2.0 * t - 1.0).abs() <= 1e-6, "|f'(x0)| = {}", (2.0 * t - 1.0).abs());
    }
    let mvt = unit("x^3", SolverKind::Mvt)?;
    ensure!(mvt.certificate == Certificate::Feasible, "mvt: {}", mvt.certificate);
    let root = 1.0 / 3f64.sqrt();
    for t in values(mvt.witness.point().ok_or("no mvt witness")?) {
        ensure!((t - root).abs() <= 1e-6, "mvt point {t}, want {root}");
    }

    let mut r = rng(6);
    let dim = 8;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let poly = Poly::random(&mut r, dim);
        let (a, b) = random_box(&mut r, dim);
        let p = problem_json("atomic:8", &poly.dsl(), json!(a), json!(b), None, k);
        let rep = Problem::from_json(&p).and_then(|p| p.solve(SolverKind::Mvt)).map_err(err)?;
        ensure!(rep.certificate == Certificate::Feasible, "problem {k}: {} ({:?})", rep.certificate, rep.detail);
        let x0 = values(rep.witness.point().ok_or("no witness")?);
        for i in 0..dim {
            ensure!(a[i] < x0[i] && x0[i] < b[i], "problem {k}: x0 not interior on atom {i}");
            let res = ((b[i] - a[i]) * poly.deriv(i, x0[i]) - (poly.eval(i, b[i]) - poly.eval(i, a[i]))).abs();
            ensure!(res <= 1e-8, "problem {k} atom {i}: residual {res:e}");
            worst = worst.max(res);
        }
    }
    Ok(format!("rolle x0 = e/2, mvt x0 = e/sqrt(3); 100 random problems, worst residual {worst:.1e}"))
}

/// Random smooth expression tree for the derivative checks.
fn smooth_expr(r: &mut ChaCha8Rng, depth: u32) -> FuncExpr {
    if depth == 0 || r.random_bool(0.25) {
        return match r.random_range(0..3) {
            0 => FuncExpr::scalar(f64::from(r.random_range(-8i32..=8)) / 4.0),
            _ => FuncExpr::Var,
        };
    }
    let a = smooth_expr(r, depth - 1);
    match r.random_range(0..6) {
        0 => FuncExpr::add(a, smooth_expr(r, depth - 1)),
        1 => FuncExpr::sub(a, smooth_expr(r, depth - 1)),
        2 => FuncExpr::mul(a, smooth_expr(r, depth - 1)),
        3 => FuncExpr::pow(a, r.random_range(2..=3)),
        _ => {
            let f = [ScalarFn::Sin, ScalarFn::Cos, ScalarFn::Exp, ScalarFn::Tanh, ScalarFn::SqrtShift];
            FuncExpr::map(f[r.random_range(0..f.len())], a)
        }
    }
}

fn criterion_7() -> Check {
    let mut r = rng(7);
    let dim = 2;
    let (mut lo, mut hi): (f64, f64) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 100 {
        attempts += 1;
        ensure!(attempts < 100_000, "could not draw 100 functions with |f'''| >= 0.1");
        let e = smooth_expr(&mut r, 4);
        if !e.depends_on_var() {
            continue;
        }
        let c = atomic((0..dim).map(|_| r.random_range(-1.0..1.0)).collect());
        let Ok(d1) = differentiate(&e) else { continue };
        let d3 = differentiate(&d1).and_then(|d| differentiate(&d)).map_err(err)?;
        let (Ok(f0), Ok(exact), Ok(third)) = (e.evaluate(&c), d1.evaluate(&c), d3.evaluate(&c)) else {
            continue;
        };
        // The h² error term is f'''h²/6; keep it well above rounding.
        if !third.all(|v| v.abs() >= 0.1) || f0.max_abs() > 10.0 || third.max_abs() > 1e3 {
            continue;
        }
        let f = FunctionHandle::dsl(e.clone());
        let e1 = central_difference(&f, &c, 1e-3).and_then(|d| d.sub(&exact)).map_err(err)?;
        let e2 = central_difference(&f, &c, 5e-4).and_then(|d| d.sub(&exact)).map_err(err)?;
        let ratio = e1.zip_with(&e2, |p, q| p / q).map_err(err)?;
        for v in ratio.values() {
            ensure!((3.5..=4.5).contains(&v), "{e} at {c}: error ratio {v}");
            lo = lo.min(v);
            hi = hi.max(v);
        }
        accepted += 1;
    }

    // Sum and product rules against numerically estimated derivatives.
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    while pairs < 100 {
        let (a, b) = (smooth_expr(&mut r, 3), smooth_expr(&mut r, 3));
        let c = atomic((0..dim).map(|_| r.random_range(-1.0..1.0)).collect());
        let fa = FunctionHandle::dsl(a.clone());
        let fb = FunctionHandle::dsl(b.clone());
        let (Ok(va), Ok(vb)) = (a.evaluate(&c), b.evaluate(&c)) else { continue };
        if va.max_abs() > 10.0 || vb.max_abs() > 10.0 {
            continue;
        }
        let (Ok(na), Ok(nb)) = (calculus::estimate_derivative(&fa, &c), calculus::estimate_derivative(&fb, &c)) else {
            continue;
        };
        let sum = differentiate(&FuncExpr::add(a.clone(), b.clone()))
            .and_then(|d| d.evaluate(&c))
            .map_err(err)?;
        let prod = differentiate(&FuncExpr::mul(a, b))
            .and_then(|d| d.evaluate(&c))
            .map_err(err)?;
        let want_sum = na.add(&nb).map_err(err)?;
        let want_prod = na.mul(&vb).and_then(|x| x.add(&va.mul(&nb)?)).map_err(err)?;
        let gap_sum = sum.sub(&want_sum).map_err(err)?.max_abs();
        let gap_prod = prod.sub(&want_prod).map_err(err)?.max_abs();
        ensure!(gap_sum <= 1e-6, "sum rule gap {gap_sum:e}");
        ensure!(gap_prod <= 1e-6, "product rule gap {gap_prod:e}");
        worst = worst.max(gap_sum).max(gap_prod);
        pairs += 1;
    }
    Ok(format!(
        "100 functions, error ratios in [{lo:.3}, {hi:.3}]; 100 pairs, worst rule gap {worst:.1e}"
    ))
}

fn criterion_8() -> Check {
    let mut r = rng(8);
    let model = ModelSpec::Atomic { dim: 2 };
    let mut handles: Vec<(FunctionHandle, Element, Element)> = Vec::new();
    for _ in 0..20 {
        let e = smooth_expr(&mut r, 3);
        let c = atomic(vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]);
        handles.push((FunctionHandle::dsl(e), c, Element::constant(model, 0.25)));
    }
    let quarter = Element::constant(model, 0.25);
    let half = Element::constant(model, 0.5);
    for b in Builtin::ALL {
        handles.push((FunctionHandle::Builtin(b), half.clone(), quarter.clone()));
    }
    handles.push((FunctionHandle::Builtin(Builtin::Heaviside), Element::unit(model), half.clone()));
    handles.push((FunctionHandle::Builtin(Builtin::Heaviside), Element::zero(model), half.clone()));

    let mut supers = 0;
    for (k, (f, c, radius)) in handles.iter().enumerate() {
        let class = match calculus::classify(f, c, radius, k as u64) {
            Ok(class) => class,
            Err(e) => return Err(format!("{f} at {c}: {e}")),
        };
        if class != Classification::SuperDifferentiable {
            continue;
        }
        supers += 1;
        let region = OrderInterval::new(c.sub(radius).map_err(err)?, c.add(radius).map_err(err)?).map_err(err)?;
        let rep = check_lbp(f, &region, 1000, k as u64).map_err(err)?;
        ensure!(rep.violations == 0, "{f} is superDifferentiable at {c} but has {} LBP violations", rep.violations);
    }
    ensure!(supers >= 20, "only {supers} handles classified superDifferentiable");
    let thin = FunctionHandle::Builtin(Builtin::ThinSqrt);
    let class = calculus::classify(&thin, &Element::zero(model), &Element::unit(model), 0).map_err(err)?;
    ensure!(class == Classification::OrderOnly, "thin_sqrt at 0 is {}", class.name());
    Ok(format!(
        "{supers} of {} handles superDifferentiable, all LBP over 1000 splices; thin_sqrt orderOnly",
        handles.len()
    ))
}

fn criterion_9() -> Check {
    let mut r = rng(9);
    let tau = latcalc_core::tolerance::EQ;
    let mut largest = 0;
    for k in 0..100 {
        let rv: Vec<f64> = (0..8).map(|_| r.random_range(0.01..2.0)).collect();
        let uv: Vec<f64> = (0..8).map(|_| r.random_range(-3.0..3.0)).collect();
        let (re, u) = (atomic(rv.clone()), atomic(uv.clone()));
        let min = rv.iter().copied().fold(f64::INFINITY, f64::min);
        let m_star = (1.0 / min).ceil() as u32;
        largest = largest.max(m_star);
        let mut prev = Band::empty(re.model());
        let mut prev_abs = vec![0.0; 8];
        for m in 1..=m_star {
            let band = Band::ladder(&re, m);
            ensure!(prev.is_subset(&band).map_err(err)?, "case {k}: ladder shrinks at m = {m}");
            let atoms = band.atoms().expect("atomic band");
            let want: Vec<usize> = (0..8).filter(|&i| rv[i] >= 1.0 / f64::from(m) - tau).collect();
            ensure!(atoms == want, "case {k}, m = {m}: atoms {atoms:?}, oracle {want:?}");
            // P_m(|u|) increases with m.
            let p = values(&band.project(&u.modulus()).map_err(err)?);
            ensure!(p.iter().zip(&prev_abs).all(|(x, y)| x >= y), "case {k}: projections decrease at m = {m}");
            prev_abs = p;
            prev = band;
        }
        ensure!(prev.is_whole(), "case {k}: ladder at m* = {m_star} is not the whole model");
        ensure!(prev.project(&u).map_err(err)? == u, "case {k}: P_(m*)(u) != u");
    }
    Ok(format!("100 cases, m* up to {largest}"))
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let files = [
        (
            "square.json",
            r#"{"model":{"kind":"atomic","dim":2},"function":{"dsl":"x*x"},
                "interval":{"a":[0,0],"b":[2,2]},"target":[2.25,0.25],"tol":1e-8,"seed":42}"#,
        ),
        (
            "parabola.json",
            r#"{"model":"atomic:4","function":{"dsl":"x*x - x + [0, 1, 2, 3]"},
                "interval":{"a":0,"b":1},"target":[0,1,2,3],"seed":3}"#,
        ),
        (
            "dyadic.json",
            r#"{"model":"dyadic:4","function":{"dsl":"sin(x) + x^3"},
                "interval":{"a":{"pieces":[{"i":[0,0.5],"v":-1},{"i":[0.5,1],"v":0}]},"b":1.5},
                "target":0.5,"seed":11}"#,
        ),
        (
            "complex.json",
            r#"{"model":"atomic:2","function":{"cpoly":[0, {"re":[1,0],"im":[0,1]}, 1]},
                "interval":{"a":0,"b":{"re":[1,2],"im":[1,-1]}},"seed":5}"#,
        ),
    ];
    let mut runs = 0;
    for (name, text) in files {
        let path = dir.path().join(name);
        std::fs::write(&path, text).map_err(err)?;
        let path = path.to_str().ok_or("non-UTF-8 temp path")?.to_string();
        for cmd in [
            vec!["solve", "ivt"],
            vec!["solve", "evt"],
            vec!["solve", "rolle"],
            vec!["solve", "mvt"],
            vec!["solve", "cmvt"],
            vec!["bound"],
        ] {
            let mut args = cmd.clone();
            args.extend(["--problem", &path, "--json"]);
            let one = latcalc(&args);
            let two = latcalc(&args);
            ensure!(one == two, "{name} {cmd:?}: reports differ");
            if matches!(one.0, Some(0) | Some(2)) {
                ensure!(serde_json::from_slice::<Value>(&one.1).is_ok(), "{name} {cmd:?}: not JSON");
            }
            runs += 1;
        }
    }
    let (_, a) = latcalc(&["demo", "kn-threshold", "--json"]);
    let (_, b) = latcalc(&["demo", "kn-threshold", "--json"]);
    ensure!(a == b, "kn-threshold demo differs between runs");
    Ok(format!("{runs} solver invocations byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("band algebra suite", criterion_1),
        ("complex modulus grid", criterion_2),
        ("IVT counterexample fixture", criterion_3),
        ("IVT solver", criterion_4),
        ("EVT fixture and solver", criterion_5),
        ("Rolle and mean value solvers", criterion_6),
        ("differentiation engine", criterion_7),
        ("super differentiable implies LBP", criterion_8),
        ("ladder bands", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
