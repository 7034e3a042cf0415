//! Command-line front end for `latcalc-core`.
//!
//! [`run`] parses an argument vector, executes one command and returns the
//! exit code together with what should go to standard output and standard
//! error. The binary is a thin wrapper, which keeps everything testable
//! in-process.

pub mod gallery;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use latcalc_core::calculus::{self, DiffMode, OrderInterval};
use latcalc_core::dsl::{check_lbp, Builtin, continuity_probe, differentiate, ContinuityVerdict};
use latcalc_core::problem::{Problem, SolverKind};
use latcalc_core::solvers::SolveReport;
use latcalc_core::{Element, Error, FunctionHandle, LatticeMap, ModelSpec};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
/// Hypothesis violations, infeasible targets, failed checks and capped runs.
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "latcalc", version, about = "Order calculus on finite Phi-algebra models")]
struct Cli {
    /// Problem file (JSON).
    #[arg(long, global = true)]
    problem: Option<PathBuf>,
    /// `atomic:N` or `dyadic:DEPTH`.
    #[arg(long, global = true)]
    model: Option<ModelSpec>,
    /// DSL expression in the variable `x`.
    #[arg(long, global = true, conflicts_with = "builtin")]
    expr: Option<String>,
    /// Registered builtin function.
    #[arg(long, global = true)]
    builtin: Option<String>,
    /// Element literal, such as `[3, 1]`.
    #[arg(long, global = true)]
    at: Option<String>,
    /// Left end of the order interval.
    #[arg(long = "a", global = true)]
    lo: Option<String>,
    /// Right end of the order interval.
    #[arg(long = "b", global = true)]
    hi: Option<String>,
    /// Target value for `solve ivt`.
    #[arg(long, global = true)]
    target: Option<String>,
    /// Neighbourhood radius for `check diff` (an element literal).
    #[arg(long, global = true)]
    radius: Option<String>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials for `check lbp`.
    #[arg(long, global = true, default_value_t = 1000)]
    trials: usize,
    /// Cells refined per level by `check continuity`.
    #[arg(long, global = true, default_value_t = 8)]
    grid: usize,
    /// Print the full report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a band-wise solver.
    Solve {
        #[arg(value_enum)]
        solver: SolveCmd,
    },
    /// Order bound M with |f(x)| <= M on the interval.
    Bound,
    /// Sampled hypothesis checks.
    Check {
        #[arg(value_enum)]
        kind: CheckCmd,
    },
    /// Symbolic derivative, optionally evaluated at --at.
    Diff,
    /// Evaluate the function at --at.
    Eval,
    /// Run a gallery demo and check it against its expected fragment.
    Demo { name: String },
    /// List the gallery.
    Demos,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolveCmd {
    Ivt,
    Evt,
    Rolle,
    Mvt,
    Cmvt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckCmd {
    Lbp,
    Continuity,
    Diff,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(i32, Value), Failure>;

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.to_string();
            return if e.use_stderr() {
                Output {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                // --help and --version
                Output {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let json_mode = cli.json;
    match execute(&cli) {
        Ok((code, report)) => Output {
            code,
            stdout: render(&report, json_mode),
            stderr: String::new(),
        },
        Err(Failure::Usage(msg)) => Output {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("usage error: {msg}\n"),
        },
        Err(Failure::Core(e)) => Output {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Err(Failure::Io(msg)) => Output {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn render(report: &Value, json_mode: bool) -> String {
    if json_mode {
        let mut s = serde_json::to_string_pretty(report).expect("serializable");
        s.push('\n');
        return s;
    }
    match report {
        Value::Object(map) => {
            let mut out = String::new();
            for (k, v) in map {
                if k == "trace" {
                    continue;
                }
                match (k.as_str(), v) {
                    ("narrative", Value::Array(lines)) => {
                        for line in lines {
                            out.push_str(&format!("  {}\n", line.as_str().unwrap_or_default()));
                        }
                    }
                    (_, Value::String(s)) => out.push_str(&format!("{k}: {s}\n")),
                    _ => out.push_str(&format!("{k}: {v}\n")),
                }
            }
            out
        }
        Value::String(s) => format!("{s}\n"),
        other => format!("{other}\n"),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn literal(text: &str) -> std::result::Result<Value, Failure> {
    serde_json::from_str(text)
        .map_err(|e| Failure::Core(Error::InvalidLiteral(format!("`{text}` is not a literal: {e}"))))
}

fn certificate_code(report: &SolveReport) -> i32 {
    if report.certificate.is_feasible() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

impl Cli {
    /// Model from --model, else from the length of the first array literal,
    /// else the smallest dimension of the builtin.
    fn model(&self) -> std::result::Result<ModelSpec, Failure> {
        if let Some(m) = self.model {
            return Ok(m.validated()?);
        }
        for text in [&self.at, &self.lo, &self.hi, &self.target].into_iter().flatten() {
            if let Ok(Value::Array(items)) = serde_json::from_str::<Value>(text) {
                return Ok(ModelSpec::atomic(items.len())?);
            }
        }
        if let Some(b) = &self.builtin {
            let b: Builtin = b.parse()?;
            return Ok(ModelSpec::atomic(b.min_dim())?);
        }
        Err(usage("--model is required (atomic:N or dyadic:DEPTH)"))
    }

    fn element(&self, model: ModelSpec, text: &str) -> std::result::Result<Element, Failure> {
        Ok(Element::from_json(model, &literal(text)?)?)
    }

    fn at(&self, model: ModelSpec) -> std::result::Result<Element, Failure> {
        let text = self.at.as_deref().ok_or_else(|| usage("--at is required"))?;
        self.element(model, text)
    }

    fn handle(&self, model: ModelSpec) -> std::result::Result<FunctionHandle, Failure> {
        match (&self.expr, &self.builtin) {
            (Some(e), _) => Ok(FunctionHandle::parse(e, model)?),
            (None, Some(b)) => Ok(FunctionHandle::builtin(b)?),
            (None, None) => Err(usage("one of --expr, --builtin or --problem is required")),
        }
    }

    fn load_problem(&self) -> std::result::Result<Option<Problem>, Failure> {
        let Some(path) = &self.problem else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
        let mut p = Problem::parse(&text)?;
        if let Some(m) = self.model {
            if m != p.model {
                return Err(usage(format!(
                    "--model {m} disagrees with the problem file model {}",
                    p.model
                )));
            }
        }
        if let Some(t) = self.tol {
            p.tol = Some(t);
        }
        if let Some(s) = self.seed {
            p.seed = s;
        }
        Ok(Some(p))
    }

    /// Problem from --problem, else assembled from the ad-hoc flags.
    fn problem(&self) -> std::result::Result<Problem, Failure> {
        if let Some(p) = self.load_problem()? {
            return Ok(p);
        }
        let model = self.model()?;
        let function = match (&self.expr, &self.builtin) {
            (Some(e), _) => json!({ "dsl": e }),
            (None, Some(b)) => json!({ "builtin": b }),
            (None, None) => return Err(usage("one of --expr, --builtin or --problem is required")),
        };
        let (a, b) = match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => (literal(a)?, literal(b)?),
            _ => return Err(usage("--a and --b are required without --problem")),
        };
        let mut value = json!({
            "model": model.to_string(),
            "function": function,
            "interval": { "a": a, "b": b },
            "seed": self.seed.unwrap_or(0),
        });
        if let Some(t) = &self.target {
            value["target"] = literal(t)?;
        }
        if let Some(t) = self.tol {
            value["tol"] = json!(t);
        }
        Ok(Problem::from_json(&value)?)
    }

    /// Interval and function for the checks: --problem, then --a/--b, then
    /// the builtin's domain, then `[−e, e]`.
    fn region(&self) -> std::result::Result<(FunctionHandle, OrderInterval), Failure> {
        if let Some(p) = self.load_problem()? {
            return Ok((p.handle()?.clone(), p.interval()?));
        }
        let model = self.model()?;
        let f = self.handle(model)?;
        let interval = match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => OrderInterval::new(self.element(model, a)?, self.element(model, b)?)?,
            (None, None) => match f.domain(model) {
                Some((lo, hi)) => OrderInterval::new(lo, hi)?,
                None => OrderInterval::new(Element::constant(model, -1.0), Element::unit(model))?,
            },
            _ => return Err(usage("--a and --b go together")),
        };
        Ok((f, interval))
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Solve { solver } => {
            let kind = match solver {
                SolveCmd::Ivt => SolverKind::Ivt,
                SolveCmd::Evt => SolverKind::Evt,
                SolveCmd::Rolle => SolverKind::Rolle,
                SolveCmd::Mvt => SolverKind::Mvt,
                SolveCmd::Cmvt => SolverKind::Cmvt,
            };
            let report = cli.problem()?.solve(kind)?;
            Ok((certificate_code(&report), report.to_json()))
        }
        Command::Bound => {
            let report = cli.problem()?.solve(SolverKind::Bound)?;
            Ok((certificate_code(&report), report.to_json()))
        }
        Command::Check { kind } => check(cli, *kind),
        Command::Diff => diff(cli),
        Command::Eval => {
            let model = cli.model()?;
            let f = cli.handle(model)?;
            let x = cli.at(model)?;
            let y = f.eval(&x)?;
            Ok((EXIT_OK, json!({ "function": f.to_string(), "at": x.to_json(), "value": y.to_json() })))
        }
        Command::Demo { name } => demo(name),
        Command::Demos => Ok((
            EXIT_OK,
            Value::String(
                gallery::registry()
                    .iter()
                    .map(|d| format!("{:<20} {}", d.name, d.description))
                    .collect::<Vec<_>>()
                    .join("\n"),
            ),
        )),
    }
}

fn check(cli: &Cli, kind: CheckCmd) -> Outcome {
    match kind {
        CheckCmd::Lbp => {
            let (f, region) = cli.region()?;
            let report = check_lbp(&f, &region, cli.trials, cli.seed())?;
            let code = if report.passed() { EXIT_OK } else { EXIT_NEGATIVE };
            let mut out = report.to_json();
            out["function"] = json!(f.to_string());
            out["region"] = region.to_json();
            Ok((code, out))
        }
        CheckCmd::Continuity => {
            let (f, region) = cli.region()?;
            let report = continuity_probe(&f, &region, cli.grid, cli.seed())?;
            let code = match report.verdict {
                ContinuityVerdict::Continuous => EXIT_OK,
                ContinuityVerdict::SuspectDiscontinuity => EXIT_NEGATIVE,
            };
            let mut out = report.to_json();
            out["function"] = json!(f.to_string());
            Ok((code, out))
        }
        CheckCmd::Diff => {
            let model = cli.model()?;
            let f = cli.handle(model)?;
            let c = cli.at(model)?;
            let r = match &cli.radius {
                Some(text) => cli.element(model, text)?,
                None => Element::unit(model),
            };
            let class = calculus::classify(&f, &c, &r, cli.seed())?;
            let mut out = json!({
                "function": f.to_string(),
                "at": c.to_json(),
                "classification": class.name(),
            });
            if let Ok(d) = calculus::estimate_derivative(&f, &c) {
                let n = calculus::CLASSIFY_SAMPLES;
                for mode in [DiffMode::Order, DiffMode::Super] {
                    let rep = calculus::verify_differentiability(&f, &c, &d, mode, &r, n, cli.seed())?;
                    out[mode.name()] = rep.to_json();
                }
                out["derivative"] = d.to_json();
            }
            let code = match class {
                calculus::Classification::NotDifferentiable => EXIT_NEGATIVE,
                _ => EXIT_OK,
            };
            Ok((code, out))
        }
    }
}

fn diff(cli: &Cli) -> Outcome {
    let model = cli.model()?;
    let f = cli.handle(model)?;
    let mut out = json!({ "function": f.to_string() });
    let symbolic = match f.expr() {
        Some(e) => Some(differentiate(e)?),
        None => None,
    };
    if let Some(d) = &symbolic {
        out["derivative"] = json!(d.to_string());
    }
    if cli.at.is_some() {
        let x = cli.at(model)?;
        let value = match &symbolic {
            Some(d) => d.evaluate(&x)?,
            None => calculus::estimate_derivative(&f, &x)?,
        };
        out["at"] = x.to_json();
        out["value"] = value.to_json();
        out["method"] = json!(if symbolic.is_some() { "symbolic" } else { "richardson" });
    } else if symbolic.is_none() {
        return Err(usage("builtins have no symbolic derivative; pass --at"));
    }
    Ok((EXIT_OK, out))
}

fn demo(name: &str) -> Outcome {
    let entry = gallery::find(name).ok_or_else(|| {
        let names: Vec<_> = gallery::registry().iter().map(|d| d.name).collect();
        usage(format!("unknown demo `{name}`; available: {}", names.join(", ")))
    })?;
    let run = entry.run()?;
    if let Err(msg) = gallery::match_fragment(&run.report, &entry.expected_fragment()) {
        return Err(Failure::Io(format!(
            "demo {name} diverged from its expected fragment at {msg}"
        )));
    }
    let mut report = json!({ "demo": name, "description": entry.description });
    if let Value::Object(map) = run.report {
        for (k, v) in map {
            report[k] = v;
        }
    }
    let code = match run.outcome {
        gallery::Outcome::Positive => EXIT_OK,
        gallery::Outcome::Negative => EXIT_NEGATIVE,
    };
    Ok((code, report))
}
