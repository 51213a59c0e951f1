//! Properties of straightening, normalization and the adapted-coordinate pipeline.

mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use superfrob::distribution::{membership, normalize_generators, rank_of};
use superfrob::frobenius::{adapted_coordinates, straighten_deg0, straighten_nonzero, verify_adapted};
use superfrob::series::Reduction;
use superfrob::{Chart, Distribution, GradedSeries, VectorField, Window};

fn chart() -> Arc<Chart> {
    rich_chart(trunc(3, 4))
}

fn instance(seed: u64) -> VectorField {
    let c = chart();
    let mut rng = rng(seed);
    match rng.gen_range(0..3) {
        0 => d(&c, "x").try_add(&random_field(&mut rng, &c, c.zero_degree(), 2, 3)).unwrap(),
        1 => d(&c, "e").try_add(&random_field(&mut rng, &c, dv(&[1, 1]), 2, 3)).unwrap(),
        _ => random_change(&mut rng, &c, 2, 3).pushforward(&d(&c, "t2")).unwrap(),
    }
}

fn straighten(x: &VectorField) -> superfrob::Result<superfrob::frobenius::Straightened> {
    if x.degree().is_zero() {
        straighten_deg0(x)
    } else {
        straighten_nonzero(x)
    }
}

fn window_for(x: &VectorField) -> Window {
    if x.degree().is_zero() {
        Window::DEGREE_ZERO_STEP
    } else {
        Window::NONZERO_STEP
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn straightening_is_sound(seed in any::<u64>()) {
        let x = instance(seed);
        let Ok(s) = straighten(&x) else { return Ok(()) };
        let target = VectorField::coordinate(x.chart(), s.pivot);
        prop_assert_eq!(x.chart().degree(s.pivot), x.degree());
        let pushed = s.change.pushforward(&x).unwrap();
        prop_assert!(pushed.agrees_within(&target, window_for(&x)));
        for img in s.change.images() {
            prop_assert_eq!(img.at_point(), superfrob::series::rational(0, 1));
        }
    }

    #[test]
    fn straightening_is_idempotent(seed in any::<u64>()) {
        let x = instance(seed);
        let Ok(s) = straighten(&x) else { return Ok(()) };
        let again = straighten(&VectorField::coordinate(x.chart(), s.pivot)).unwrap();
        prop_assert!(again.change.is_identity());
    }

    #[test]
    fn normalization_preserves_span(seed in any::<u64>()) {
        let c = chart();
        let mut rng = rng(seed);
        let change = random_change(&mut rng, &c, 2, 3);
        let gens: Vec<VectorField> = (0..c.len())
            .filter(|_| rng.gen_bool(0.5))
            .map(|s| change.pushforward(&VectorField::coordinate(&c, s)).unwrap())
            .collect();
        prop_assume!(!gens.is_empty());
        let dist = Distribution::new(&c, gens).unwrap();
        let normalized = normalize_generators(&dist).unwrap();
        prop_assert_eq!(rank_of(&normalized.distribution).unwrap(), rank_of(&dist).unwrap());
        for g in dist.generators() {
            prop_assert!(membership(g, &normalized.distribution).unwrap().is_member());
        }
        for g in normalized.distribution.generators() {
            prop_assert!(membership(g, &dist).unwrap().is_member());
        }
    }

    #[test]
    fn pipeline_recovers_pushed_coordinate_spans(seed in any::<u64>()) {
        let c = chart();
        let mut rng = rng(seed);
        let change = random_change(&mut rng, &c, 2, 3);
        let gens: Vec<VectorField> = (0..c.len())
            .filter(|_| rng.gen_bool(0.4))
            .map(|s| change.pushforward(&VectorField::coordinate(&c, s)).unwrap())
            .collect();
        let dist = Distribution::new(&c, gens).unwrap();
        let cert = adapted_coordinates(&dist).unwrap();
        prop_assert_eq!(cert.adapted.len(), dist.len());
        prop_assert!(verify_adapted(&dist, &cert).unwrap().holds());
    }
}

#[test]
fn degree_zero_corrections_raise_j_degree() {
    // Every correction step in the degree-zero loop only touches J-degree ≥ 2.
    let c = chart();
    let mut rng = rng(11);
    for _ in 0..10 {
        let x = d(&c, "x").try_add(&random_field(&mut rng, &c, c.zero_degree(), 2, 3)).unwrap();
        let Ok(s) = straighten_deg0(&x) else { continue };
        let coefficients = (0..c.len())
            .map(|u| {
                if c.is_base(u) {
                    x.coefficient(u).reduce(Reduction::ModJ)
                } else {
                    GradedSeries::zero(&c)
                }
            })
            .collect();
        let reduced = VectorField::new(&c, c.zero_degree(), coefficients).unwrap();
        let base_only = straighten_deg0(&reduced).unwrap();
        for (u, img) in s.change.images().iter().enumerate() {
            if c.is_base(u) {
                let diff = img - base_only.change.image(u);
                assert!(diff.min_j_degree().is_none_or(|j| j >= 2), "{diff}");
            }
        }
    }
}
