//! Dyadic partitions of `[0, 1)`.
//!
//! A step function is stored as a sorted list of [`Piece`]s whose cells
//! partition `[0, 1)`. Every output is kept in canonical form: sibling cells
//! carrying bitwise-identical values are merged into their parent until no
//! such pair remains. Two step functions are equal iff their canonical piece
//! lists are equal.

use crate::error::{Error, Result};

/// Hard upper bound on `max_depth` for dyadic models.
pub const DEPTH_CAP: u8 = 24;

/// Fixed-point resolution used for cell endpoints.
const RES: u32 = 32;

/// The dyadic interval `[index / 2^depth, (index + 1) / 2^depth)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicCell {
    pub depth: u8,
    pub index: u32,
}

impl DyadicCell {
    pub const ROOT: DyadicCell = DyadicCell { depth: 0, index: 0 };

    pub fn new(depth: u8, index: u32) -> Self {
        assert!(u32::from(depth) < RES, "dyadic depth {depth} out of range");
        assert!(
            u64::from(index) < (1u64 << depth),
            "index {index} out of range at depth {depth}"
        );
        DyadicCell { depth, index }
    }

    fn shift(&self) -> u32 {
        RES - u32::from(self.depth)
    }

    /// Start in units of `2^-32`.
    pub(crate) fn start(&self) -> u64 {
        u64::from(self.index) << self.shift()
    }

    /// End in units of `2^-32`.
    pub(crate) fn end(&self) -> u64 {
        (u64::from(self.index) + 1) << self.shift()
    }

    pub fn lo(&self) -> f64 {
        f64::from(self.index) / (1u64 << self.depth) as f64
    }

    pub fn hi(&self) -> f64 {
        (f64::from(self.index) + 1.0) / (1u64 << self.depth) as f64
    }

    pub fn width(&self) -> f64 {
        1.0 / (1u64 << self.depth) as f64
    }

    pub fn children(&self) -> [DyadicCell; 2] {
        let depth = self.depth + 1;
        [
            DyadicCell::new(depth, self.index * 2),
            DyadicCell::new(depth, self.index * 2 + 1),
        ]
    }

    pub fn parent(&self) -> Option<DyadicCell> {
        (self.depth > 0).then(|| DyadicCell::new(self.depth - 1, self.index / 2))
    }

    pub fn contains(&self, other: &DyadicCell) -> bool {
        self.start() <= other.start() && other.end() <= self.end()
    }

    fn is_left_sibling_of(&self, other: &DyadicCell) -> bool {
        self.depth == other.depth
            && self.depth > 0
            && self.index.is_multiple_of(2)
            && other.index == self.index + 1
    }
}

/// One constant piece of a step function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub cell: DyadicCell,
    pub value: f64,
}

impl Piece {
    pub fn new(cell: DyadicCell, value: f64) -> Self {
        Piece { cell, value }
    }
}

/// Combine two partitions on their common refinement. The output is not
/// coalesced.
pub(crate) fn merge_with(a: &[Piece], b: &[Piece], mut f: impl FnMut(f64, f64) -> f64) -> Vec<Piece> {
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    let (mut i, mut j) = (0, 0);
    // Overlapping dyadic cells are nested, so the deeper of the two current
    // cells is contained in the other.
    while i < a.len() && j < b.len() {
        let (p, q) = (a[i], b[j]);
        let value = f(p.value, q.value);
        if p.cell.depth >= q.cell.depth {
            out.push(Piece::new(p.cell, value));
            i += 1;
            if p.cell.end() == q.cell.end() {
                j += 1;
            }
        } else {
            out.push(Piece::new(q.cell, value));
            j += 1;
            if q.cell.end() == p.cell.end() {
                i += 1;
            }
        }
    }
    debug_assert!(i == a.len() && j == b.len());
    out
}

/// Merge bitwise-equal siblings bottom-up until a fixpoint is reached.
pub(crate) fn coalesce(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut stack: Vec<Piece> = Vec::with_capacity(pieces.len());
    for piece in pieces {
        stack.push(piece);
        while stack.len() >= 2 {
            let right = stack[stack.len() - 1];
            let left = stack[stack.len() - 2];
            if left.cell.is_left_sibling_of(&right.cell)
                && left.value.to_bits() == right.value.to_bits()
            {
                stack.truncate(stack.len() - 2);
                let parent = left.cell.parent().expect("sibling has a parent");
                stack.push(Piece::new(parent, left.value));
            } else {
                break;
            }
        }
    }
    stack
}

/// Checks that pieces are sorted, disjoint, cover `[0, 1)` and respect the
/// depth cap.
pub(crate) fn validate(pieces: &[Piece], max_depth: u8) -> Result<()> {
    let mut cursor = 0u64;
    for p in pieces {
        if p.cell.depth > max_depth {
            return Err(Error::DepthExceeded {
                depth: p.cell.depth,
                max_depth,
            });
        }
        if p.cell.start() != cursor {
            return Err(Error::InvalidLiteral(format!(
                "pieces must be sorted and gap-free; cell [{}, {}) does not start at {}",
                p.cell.lo(),
                p.cell.hi(),
                cursor as f64 / (1u64 << RES) as f64
            )));
        }
        if !p.value.is_finite() {
            return Err(Error::NonFinite(p.value));
        }
        cursor = p.cell.end();
    }
    if cursor != DyadicCell::ROOT.end() {
        return Err(Error::InvalidLiteral(
            "pieces do not cover [0, 1)".to_string(),
        ));
    }
    Ok(())
}

/// Converts a real endpoint into an integer position at `depth`, requiring it
/// to be an exact dyadic rational in `[0, 1]`.
pub(crate) fn endpoint_to_units(x: f64, depth: u8) -> Result<u64> {
    let scaled = x * (1u64 << depth) as f64;
    if !(0.0..=1.0).contains(&x) || scaled.fract() != 0.0 {
        return Err(Error::InvalidLiteral(format!(
            "endpoint {x} is not a dyadic rational in [0, 1] at depth {depth}"
        )));
    }
    Ok(scaled as u64)
}

/// Splits `[lo, hi)` (units of `2^-depth`) into maximal aligned dyadic cells.
pub(crate) fn decompose(mut lo: u64, hi: u64, depth: u8) -> Vec<DyadicCell> {
    let mut cells = Vec::new();
    while lo < hi {
        // Largest aligned block starting at `lo` that fits in `[lo, hi)`.
        let mut size_log = if lo == 0 {
            u32::from(depth)
        } else {
            lo.trailing_zeros().min(u32::from(depth))
        };
        while (1u64 << size_log) > hi - lo {
            size_log -= 1;
        }
        let cell_depth = depth - size_log as u8;
        cells.push(DyadicCell::new(cell_depth, (lo >> size_log) as u32));
        lo += 1u64 << size_log;
    }
    cells
}

/// Uniform partition into `2^depth` cells.
pub fn uniform_cells(depth: u8) -> impl Iterator<Item = DyadicCell> {
    (0..(1u32 << depth)).map(move |i| DyadicCell::new(depth, i))
}
