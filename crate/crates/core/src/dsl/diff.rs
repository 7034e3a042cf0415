//! Symbolic differentiation with constant folding.

use super::ast::{FuncExpr, ScalarFn};
use crate::error::{Error, Result};

/// Derivative of `f` with respect to `x`.
///
/// `x′ = e`, constants differentiate to zero, and sums, products, powers and
/// atom-wise maps follow the sum, product and chain rules. `abs`, `sup` and
/// `inf` are rejected with the path of the offending node.
pub fn differentiate(f: &FuncExpr) -> Result<FuncExpr> {
    let mut path = Vec::new();
    go(f, &mut path)
}

fn non_smooth(node: &FuncExpr, path: &[usize]) -> Error {
    let path = if path.is_empty() {
        "root".to_string()
    } else {
        path.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(".")
    };
    Error::NonSmoothNode {
        node: node.to_string(),
        path,
    }
}

fn child(f: &FuncExpr, path: &mut Vec<usize>, index: usize) -> Result<FuncExpr> {
    path.push(index);
    let out = go(f, path);
    path.pop();
    out
}

fn go(f: &FuncExpr, path: &mut Vec<usize>) -> Result<FuncExpr> {
    Ok(match f {
        FuncExpr::Var => FuncExpr::Unit,
        FuncExpr::Unit | FuncExpr::Scalar(_) | FuncExpr::Const(_) => FuncExpr::scalar(0.0),
        FuncExpr::Add(a, b) => add(child(a, path, 0)?, child(b, path, 1)?),
        FuncExpr::Sub(a, b) => sub(child(a, path, 0)?, child(b, path, 1)?),
        FuncExpr::Mul(a, b) => {
            let da = child(a, path, 0)?;
            let db = child(b, path, 1)?;
            add(mul(da, (**b).clone()), mul((**a).clone(), db))
        }
        FuncExpr::Pow(a, k) => {
            let da = child(a, path, 0)?;
            let outer = match k {
                1 => FuncExpr::Unit,
                2 => mul(FuncExpr::scalar(2.0), (**a).clone()),
                _ => mul(FuncExpr::scalar(f64::from(*k)), FuncExpr::pow((**a).clone(), k - 1)),
            };
            mul(outer, da)
        }
        FuncExpr::Map(func, a) => {
            let da = child(a, path, 0)?;
            let inner = (**a).clone();
            let outer = match func {
                ScalarFn::Sin => FuncExpr::map(ScalarFn::Cos, inner),
                ScalarFn::Cos => neg(FuncExpr::map(ScalarFn::Sin, inner)),
                ScalarFn::Exp => FuncExpr::map(ScalarFn::Exp, inner),
                // 1 − tanh²
                ScalarFn::Tanh => sub(
                    FuncExpr::Unit,
                    FuncExpr::pow(FuncExpr::map(ScalarFn::Tanh, inner), 2),
                ),
                // t / sqrt(t² + 1)
                ScalarFn::SqrtShift => mul(
                    inner.clone(),
                    FuncExpr::map(ScalarFn::Recip, FuncExpr::map(ScalarFn::SqrtShift, inner)),
                ),
                // −1/t²
                ScalarFn::Recip => neg(FuncExpr::pow(FuncExpr::map(ScalarFn::Recip, inner), 2)),
            };
            mul(outer, da)
        }
        FuncExpr::Abs(_) | FuncExpr::Sup(..) | FuncExpr::Inf(..) => {
            return Err(non_smooth(f, path))
        }
    })
}

fn scalar_value(f: &FuncExpr) -> Option<f64> {
    match f {
        FuncExpr::Scalar(s) => Some(s.value()),
        FuncExpr::Unit => Some(1.0),
        _ => None,
    }
}

fn neg(a: FuncExpr) -> FuncExpr {
    mul(FuncExpr::scalar(-1.0), a)
}

fn add(a: FuncExpr, b: FuncExpr) -> FuncExpr {
    match (scalar_value(&a), scalar_value(&b)) {
        (Some(x), Some(y)) => FuncExpr::scalar(x + y),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => FuncExpr::add(a, b),
    }
}

fn sub(a: FuncExpr, b: FuncExpr) -> FuncExpr {
    match (scalar_value(&a), scalar_value(&b)) {
        (Some(x), Some(y)) => FuncExpr::scalar(x - y),
        (_, Some(0.0)) => a,
        (Some(0.0), _) => neg(b),
        _ => FuncExpr::sub(a, b),
    }
}

fn mul(a: FuncExpr, b: FuncExpr) -> FuncExpr {
    match (scalar_value(&a), scalar_value(&b)) {
        (Some(x), Some(y)) => FuncExpr::scalar(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => FuncExpr::scalar(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        // Collect scalar coefficients on the left: c·(d·g) = (cd)·g.
        (Some(x), None) => match b {
            FuncExpr::Mul(ref l, ref r) if scalar_value(l).is_some() => {
                mul(FuncExpr::scalar(x * scalar_value(l).unwrap()), (**r).clone())
            }
            _ => FuncExpr::mul(a, b),
        },
        _ => FuncExpr::mul(a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Element;
    use crate::dsl::parse;

    fn d(text: &str) -> FuncExpr {
        differentiate(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn basic_rules() {
        assert_eq!(d("x"), FuncExpr::Unit);
        assert!(d("e").is_zero());
        assert!(d("[1, 2] * e + 3").is_zero());
        assert_eq!(d("x*x").to_string(), "(x + x)");
        assert_eq!(d("x^3").to_string(), "(3.0 * (x)^2)");
        assert_eq!(d("sin(x)").to_string(), "cos(x)");
    }

    #[test]
    fn cube_matches_three_x_squared() {
        let f = d("x*x*x");
        for t in [-2.0, -0.5, 0.0, 0.3, 1.7] {
            let x = Element::atomic(vec![t, 2.0 * t]).unwrap();
            let got = f.evaluate(&x).unwrap();
            let want = x.mul(&x).unwrap().scale(3.0);
            assert!(got.approx_eq(&want, 1e-12).unwrap());
        }
    }

    #[test]
    fn non_smooth_nodes_report_their_path() {
        let err = differentiate(&parse("x*x + sin(abs(x))").unwrap()).unwrap_err();
        assert_eq!(
            err,
            Error::NonSmoothNode {
                node: "abs(x)".into(),
                path: "1.0".into()
            }
        );
        assert!(matches!(
            differentiate(&parse("sup(x, e)").unwrap()),
            Err(Error::NonSmoothNode { ref path, .. }) if path == "root"
        ));
    }

    #[test]
    fn sqrtshift_derivative() {
        let f = d("sqrtshift(x)");
        let x = Element::atomic(vec![0.0, 0.75, -2.0]).unwrap();
        let got = f.evaluate(&x).unwrap();
        let want = x.map(|t| t / (t * t + 1.0).sqrt());
        assert!(got.approx_eq(&want, 1e-15).unwrap());
    }
}
