//! Complex modulus `|x + iy| = sup_θ (cos θ)x + (sin θ)y` and its grid form.

use latcalc_core::sample;
use latcalc_core::{ComplexElement, Element, ModelSpec};
use proptest::prelude::*;

fn complex(m: ModelSpec, seed: u64) -> ComplexElement {
    let mut r = sample::rng(seed);
    ComplexElement::new(
        sample::random_element(&mut r, m, -4.0, 4.0),
        sample::random_element(&mut r, m, -4.0, 4.0),
    )
    .unwrap()
}

fn model() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (1usize..=8).prop_map(|dim| ModelSpec::Atomic { dim }),
        (0u8..=5).prop_map(|max_depth| ModelSpec::Dyadic { max_depth }),
    ]
}

fn hypot_oracle(z: &ComplexElement) -> Element {
    z.re.zip_with(&z.im, f64::hypot).unwrap()
}

proptest! {
    #[test]
    fn closed_form_is_hypot(m in model(), seed in any::<u64>()) {
        let z = complex(m, seed);
        prop_assert!(z.modulus().approx_eq(&hypot_oracle(&z), 1e-12)?);
    }

    #[test]
    fn modulus_dominates_parts_and_is_multiplicative(m in model(), seed in any::<u64>()) {
        let z = complex(m, seed);
        let w = complex(m, seed.wrapping_add(1));
        let mz = z.modulus();
        prop_assert!(z.re.modulus().le_within(&mz, 1e-12)?);
        prop_assert!(z.im.modulus().le_within(&mz, 1e-12)?);
        let prod = z.mul(&w)?.modulus();
        prop_assert!(prod.approx_eq(&mz.mul(&w.modulus())?, 1e-9)?);
        let sum = z.add(&w)?.modulus();
        prop_assert!(sum.le_within(&mz.add(&w.modulus())?, 1e-12)?);
        prop_assert!(z.scale(-3.0).modulus().approx_eq(&mz.scale(3.0), 1e-12)?);
    }

    #[test]
    fn grid_approaches_from_below(m in model(), seed in any::<u64>()) {
        let z = complex(m, seed);
        let exact = z.modulus();
        let mut prev = z.modulus_grid(4);
        for k in [16, 64, 256, 1024, 4096] {
            let g = z.modulus_grid(k);
            prop_assert!(g.le_within(&exact, 1e-12)?);
            prop_assert!(prev.le_within(&g, 1e-12)?);
            prev = g;
        }
        let gap = exact.sub(&prev)?;
        prop_assert!(gap.all(|v| v <= 1e-6 * 8.0));
    }
}

#[test]
fn unit_and_i_have_modulus_one() {
    let m = ModelSpec::Atomic { dim: 3 };
    assert_eq!(ComplexElement::unit(m).modulus(), Element::unit(m));
    assert_eq!(ComplexElement::i(m).modulus(), Element::unit(m));
    assert_eq!(ComplexElement::i(m).modulus_grid(4096), Element::unit(m));
}
