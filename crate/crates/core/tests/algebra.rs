//! Ring laws of truncated graded series, checked on seeded random inputs.

mod common;

use proptest::prelude::*;

use common::*;
use superfrob::series::{rational, Reduction};
use superfrob::{GradedSeries, Window};

/// Differentiating truncated data loses the top base order and the top J order.
const DERIVATIVE: Window = Window { weight_loss: 2, j_loss: 1 };

fn sample(seed: u64, count: usize, max_order: u32) -> Vec<GradedSeries> {
    let chart = rich_chart(trunc(4, 5));
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let deg = random_degree(&mut rng, &chart);
            random_series(&mut rng, &chart, deg, 4, max_order)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn supercommutative(seed in any::<u64>()) {
        let s = sample(seed, 2, 4);
        let (f, g) = (&s[0], &s[1]);
        let (df, dg) = (f.degree().unwrap_or(f.chart().zero_degree()), g.degree().unwrap_or(g.chart().zero_degree()));
        let twisted = &koszul(f.chart(), df, dg) * &(g * f);
        prop_assert_eq!(f * g, twisted);
    }

    #[test]
    fn associative_and_distributive(seed in any::<u64>()) {
        let s = sample(seed, 3, 4);
        let (f, g, h) = (&s[0], &s[1], &s[2]);
        prop_assert_eq!(&(f * g) * h, f * &(g * h));
        prop_assert_eq!(f * &(g + h), &(f * g) + &(f * h));
        prop_assert_eq!(&(f + g) * h, &(f * h) + &(g * h));
    }

    #[test]
    fn derivation_obeys_graded_leibniz(seed in any::<u64>(), u in 0usize..5) {
        let s = sample(seed, 2, 4);
        let (f, g) = (&s[0], &s[1]);
        let chart = f.chart();
        let df = f.degree().unwrap_or(chart.zero_degree());
        let lhs = (f * g).derive(u);
        let rhs = &(&f.derive(u) * g) + &(&koszul(chart, chart.degree(u), df) * &(f * &g.derive(u)));
        prop_assert!(lhs.agrees_within(&rhs, DERIVATIVE));
    }

    #[test]
    fn reductions_are_ring_morphisms(seed in any::<u64>()) {
        let s = sample(seed, 2, 4);
        let (f, g) = (&s[0], &s[1]);
        for mode in [Reduction::ModJ, Reduction::AtPoint] {
            prop_assert_eq!((f * g).reduce(mode), &f.reduce(mode) * &g.reduce(mode));
            prop_assert_eq!((f + g).reduce(mode), &f.reduce(mode) + &g.reduce(mode));
        }
        prop_assert_eq!((f * g).at_point(), f.at_point() * g.at_point());
    }

    #[test]
    fn antiderivative_inverts_derivative(seed in any::<u64>(), u in 0usize..5) {
        let chart = rich_chart(trunc(4, 5));
        prop_assume!(!chart.is_odd(u));
        let f = &sample(seed, 1, 3)[0];
        let f = f.retruncate(&chart).unwrap();
        let a = f.antiderivative(u).unwrap();
        if !a.loss.any() {
            prop_assert_eq!(a.series.derive(u), f.clone());
        }
        prop_assert!(a.series.set_zero(u).is_zero());
    }

    #[test]
    fn multiplication_matches_sign_oracle(seed in any::<u64>()) {
        let chart = full_chart(3, trunc(32, 32));
        let mut rng = rng(seed);
        use rand::Rng;
        let mut draw = || -> Vec<u8> {
            (0..chart.len()).map(|i| rng.gen_range(0..=if chart.is_odd(i) { 1 } else { 2 })).collect()
        };
        let (a, b) = (draw(), draw());
        let one = rational(1, 1);
        let p = &GradedSeries::monomial(&chart, &a, one.clone()) * &GradedSeries::monomial(&chart, &b, one);
        match oracle_product(&chart, &a, &b) {
            None => prop_assert!(p.is_zero()),
            Some((negative, exps)) => {
                prop_assert_eq!(p.len(), 1);
                prop_assert_eq!(p.coefficient_of(&exps), rational(if negative { -1 } else { 1 }, 1));
            }
        }
    }

    #[test]
    fn substitution_is_a_ring_morphism(seed in any::<u64>()) {
        let chart = rich_chart(trunc(4, 5));
        let mut rng = rng(seed);
        let change = random_change(&mut rng, &chart, 2, 3);
        let s = sample(seed ^ 0x5eed, 2, 3);
        let (f, g) = (&s[0], &s[1]);
        let lhs = change.substitute(&(f * g)).unwrap();
        let rhs = &change.substitute(f).unwrap() * &change.substitute(g).unwrap();
        prop_assert!(lhs.agrees_within(&rhs, Window::EXACT));
    }
}

#[test]
fn odd_squares_vanish_and_even_nonzero_degree_do_not() {
    let c = standard_chart(trunc(4, 6));
    assert!(var(&c, "t1").pow(2).is_zero());
    assert!(!var(&c, "e").pow(2).is_zero());
    assert!(var(&c, "e").pow(5).is_zero(), "J-order 4 truncates e^5");
}
