//! Expression language for lattice-valued functions of one variable.
//!
//! Every DSL node acts atom-wise, so DSL functions are locally band
//! preserving by construction. Maps that mix coordinates exist only as
//! registered [`Builtin`]s.

mod ast;
mod builtins;
mod diff;
mod handle;
mod lbp;
mod parser;

pub use ast::{FuncExpr, ScalarFn};
pub use builtins::{kn, Builtin};
pub use diff::differentiate;
pub use handle::{FnMap, FunctionHandle, LatticeMap};
pub use lbp::{
    check_lbp, continuity_probe, ContinuityReport, ContinuityVerdict, LbpReport, LbpWitness,
    PROBE_LEVELS, PROBE_TOL,
};
pub use parser::{parse, parse_for};
