//! Seeded random generation of elements, bands and interval points.
//!
//! Everything here is deterministic given the seed; the randomized checkers
//! and the solver audits draw from these helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{DyadicCell, Element, ModelSpec, Piece};
use crate::band::Band;

pub type SampleRng = ChaCha8Rng;

/// Deepest level used when drawing random dyadic partitions.
pub const SAMPLE_DEPTH: u8 = 6;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random dyadic partition of `[0, 1)`: every cell splits with probability
/// `1/2` until `depth` is reached.
pub fn random_partition(rng: &mut SampleRng, depth: u8) -> Vec<DyadicCell> {
    fn go(rng: &mut SampleRng, cell: DyadicCell, depth: u8, out: &mut Vec<DyadicCell>) {
        if cell.depth < depth && rng.random_bool(0.5) {
            for child in cell.children() {
                go(rng, child, depth, out);
            }
        } else {
            out.push(cell);
        }
    }
    let mut out = Vec::new();
    go(rng, DyadicCell::ROOT, depth, &mut out);
    out
}

fn sample_depth(max_depth: u8) -> u8 {
    max_depth.min(SAMPLE_DEPTH)
}

/// Element with independent atom values drawn by `draw`.
pub fn random_element_with(
    rng: &mut SampleRng,
    model: ModelSpec,
    mut draw: impl FnMut(&mut SampleRng) -> f64,
) -> Element {
    match model {
        ModelSpec::Atomic { dim } => {
            let values = (0..dim).map(|_| draw(rng)).collect();
            Element::atomic(values).expect("finite draws")
        }
        ModelSpec::Dyadic { max_depth } => {
            let cells = random_partition(rng, sample_depth(max_depth));
            let pieces = cells.into_iter().map(|c| Piece::new(c, draw(rng))).collect();
            Element::dyadic(max_depth, pieces).expect("valid partition")
        }
    }
}

/// Element with atom values uniform in `[lo, hi)`.
pub fn random_element(rng: &mut SampleRng, model: ModelSpec, lo: f64, hi: f64) -> Element {
    random_element_with(rng, model, |r| r.random_range(lo..hi))
}

/// Random band; each atom (or cell of a random partition) is included with
/// probability `1/2`.
pub fn random_band(rng: &mut SampleRng, model: ModelSpec) -> Band {
    let flags = random_element_with(rng, model, |r| if r.random_bool(0.5) { 1.0 } else { 0.0 });
    Band::where_value(&flags, |v| v != 0.0)
}

/// Random band that is neither empty nor the whole model, if one exists.
pub fn random_proper_band(rng: &mut SampleRng, model: ModelSpec) -> Option<Band> {
    if model == (ModelSpec::Atomic { dim: 1 }) {
        return None;
    }
    for _ in 0..64 {
        let b = random_band(rng, model);
        if !b.is_empty() && !b.is_whole() {
            return Some(b);
        }
    }
    None
}

/// Random parameter element with values in `[0, 1]`.
pub fn random_parameter(rng: &mut SampleRng, model: ModelSpec) -> Element {
    random_element_with(rng, model, |r| r.random_range(0.0..=1.0))
}

/// `a + T(b − a)` for a random parameter `T`, a point of `[a, b]`.
pub fn random_in_interval(rng: &mut SampleRng, a: &Element, b: &Element) -> Element {
    let t = random_parameter(rng, a.model());
    segment_point(a, b, &t)
}

/// `a + T(b − a)`.
pub fn segment_point(a: &Element, b: &Element, t: &Element) -> Element {
    let dir = b.sub(a).expect("interval endpoints share a model");
    a.add(&t.mul(&dir).expect("parameter shares the model"))
        .expect("same model")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_deterministic() {
        let m = ModelSpec::Dyadic { max_depth: 5 };
        let a = random_element(&mut rng(7), m, -1.0, 1.0);
        let b = random_element(&mut rng(7), m, -1.0, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn interval_points_stay_inside() {
        let mut r = rng(3);
        let m = ModelSpec::Atomic { dim: 5 };
        for _ in 0..100 {
            let a = random_element(&mut r, m, -2.0, 0.0);
            let b = a.add(&random_element(&mut r, m, 0.0, 2.0)).unwrap();
            let x = random_in_interval(&mut r, &a, &b);
            assert!(a.le(&x).unwrap() && x.le(&b).unwrap());
        }
    }

    #[test]
    fn proper_bands() {
        let mut r = rng(1);
        assert!(random_proper_band(&mut r, ModelSpec::Atomic { dim: 1 }).is_none());
        let b = random_proper_band(&mut r, ModelSpec::Dyadic { max_depth: 3 }).unwrap();
        assert!(!b.is_empty() && !b.is_whole());
    }
}
