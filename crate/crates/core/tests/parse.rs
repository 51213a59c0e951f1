//! Canonical printing is a fixpoint of parsing.

mod common;

use proptest::prelude::*;

use common::*;
use superfrob::io::parse_expression;

fn expression() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        prop::sample::select(vec!["x", "y", "t1", "t2", "e"]).prop_map(str::to_string),
        (0u32..20).prop_map(|k| k.to_string()),
        (0u32..20, 1u32..9).prop_map(|(p, q)| format!("{p}/{q}")),
    ];
    atom.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            inner.prop_map(|a| format!(" ( {a} ) ")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_fixpoint(src in expression()) {
        let chart = rich_chart(trunc(4, 6));
        let f = parse_expression(&chart, &src).unwrap();
        let printed = f.to_string();
        let g = parse_expression(&chart, &printed).unwrap();
        prop_assert_eq!(&g, &f);
        prop_assert_eq!(g.to_string(), printed);
    }

    #[test]
    fn random_series_round_trip(seed in any::<u64>()) {
        let chart = rich_chart(trunc(4, 6));
        let mut rng = rng(seed);
        let deg = random_degree(&mut rng, &chart);
        let f = random_series(&mut rng, &chart, deg, 6, 5);
        prop_assert_eq!(parse_expression(&chart, &f.to_string()).unwrap(), f);
    }
}

#[test]
fn spec_examples() {
    let chart = standard_chart(trunc(4, 6));
    assert_eq!(parse_expression(&chart, "2*x + x^2").unwrap().to_string(), "2*x + x^2");
    assert!(parse_expression(&chart, "t1*t1").unwrap().is_zero());
    assert_eq!(parse_expression(&chart, "x^").unwrap_err().offset, 2);
}
