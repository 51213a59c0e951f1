use super::*;

fn dv(e: &[u8]) -> DegreeVector {
    DegreeVector::from_slice(e).unwrap()
}

/// x(0,0), t1(0,1), t2(1,0), e(1,1)
fn chart(j_order: u32, base_order: u32) -> Arc<Chart> {
    Chart::new(
        2,
        vec![
            Coordinate { name: "x".into(), degree: dv(&[0, 0]) },
            Coordinate { name: "t1".into(), degree: dv(&[0, 1]) },
            Coordinate { name: "t2".into(), degree: dv(&[1, 0]) },
            Coordinate { name: "e".into(), degree: dv(&[1, 1]) },
        ],
        Truncation { j_order, base_order },
    )
    .unwrap()
}

fn var(c: &Arc<Chart>, name: &str) -> GradedSeries {
    GradedSeries::variable_named(c, name).unwrap()
}

fn int(c: &Arc<Chart>, k: i64) -> GradedSeries {
    GradedSeries::constant(c, rational(k, 1))
}

#[test]
fn odd_generator_squares_to_zero() {
    let c = chart(3, 4);
    let t1 = var(&c, "t1");
    assert!((&t1 * &t1).is_zero());
}

#[test]
fn distinct_odd_generators_commute_in_z2_squared() {
    let c = chart(3, 4);
    let (t1, t2) = (var(&c, "t1"), var(&c, "t2"));
    assert_eq!(&t2 * &t1, &t1 * &t2);
    assert_eq!((&t1 * &t2).to_string(), "t1*t2");
}

#[test]
fn sign_when_pairing_is_one() {
    let c = chart(3, 4);
    let (t1, e) = (var(&c, "t1"), var(&c, "e"));
    assert_eq!(&e * &t1, -(&t1 * &e));
    assert_eq!((&e * &t1).to_string(), "-1*t1*e");
}

#[test]
fn geometric_series_product_is_one() {
    let c = chart(3, 4);
    let e = var(&c, "e");
    let one = int(&c, 1);
    let inv = &(&(&one - &e) + &e.pow(2)) - &e.pow(3);
    assert_eq!(&(&one + &e) * &inv, one);
}

#[test]
fn derive_examples() {
    let c = chart(3, 4);
    let (x, t1, t2, e) = (var(&c, "x"), var(&c, "t1"), var(&c, "t2"), var(&c, "e"));
    let t1t2 = &t1 * &t2;
    assert_eq!(t1t2.derive_by_name("t1").unwrap(), t2);
    assert_eq!(t1t2.derive_by_name("t2").unwrap(), t1);
    let f = &x * &e.pow(2);
    assert_eq!(f.derive_by_name("e").unwrap(), &int(&c, 2) * &(&x * &e));
    assert!(matches!(f.derive_by_name("w"), Err(Error::UnknownCoordinate(_))));
}

#[test]
fn derive_picks_up_koszul_sign() {
    let c = chart(3, 4);
    let (t1, e) = (var(&c, "t1"), var(&c, "e"));
    // ∂_e(t1·e) = (-1)^{⟨e,t1⟩} t1 = -t1
    assert_eq!((&t1 * &e).derive_by_name("e").unwrap(), -&t1);
}

#[test]
fn antiderivative_examples() {
    let c = chart(3, 4);
    let (x, e) = (var(&c, "x"), var(&c, "e"));
    let a = (&int(&c, 2) * &x).antiderivative_by_name("x").unwrap();
    assert_eq!(a.series, x.pow(2));
    assert!(!a.loss.any());
    let a = e.antiderivative_by_name("e").unwrap();
    assert_eq!(a.series, e.pow(2).scale(&rational(1, 2)));
    assert!(matches!(
        var(&c, "t1").antiderivative_by_name("t1"),
        Err(Error::OddIntegration(_))
    ));
}

#[test]
fn antiderivative_inverts_derivative_with_signs() {
    let c = chart(3, 4);
    let (t1, e, x) = (var(&c, "t1"), var(&c, "e"), var(&c, "x"));
    let f = &(&t1 * &e) + &(&x * &e);
    let a = f.antiderivative_by_name("e").unwrap();
    assert_eq!(a.series.derive_by_name("e").unwrap(), f);
    assert!(a.series.set_zero(3).is_zero());
}

#[test]
fn antiderivative_flags_truncation_loss() {
    let c = chart(3, 2);
    let x = var(&c, "x");
    let a = x.pow(2).antiderivative_by_name("x").unwrap();
    assert!(a.series.is_zero());
    assert!(a.loss.base && !a.loss.j);
    let e = var(&c, "e");
    let a = e.pow(3).antiderivative_by_name("e").unwrap();
    assert!(a.loss.j);
}

#[test]
fn reduce_examples() {
    let c = chart(3, 4);
    let (x, t1, t2, e) = (var(&c, "x"), var(&c, "t1"), var(&c, "t2"), var(&c, "e"));
    let f = &(&int(&c, 3) + &(&int(&c, 2) * &x)) + &(&t1 * &t2);
    assert_eq!(f.reduce(Reduction::ModJ), &int(&c, 3) + &(&int(&c, 2) * &x));
    assert_eq!(f.reduce(Reduction::AtPoint), int(&c, 3));
    assert_eq!(f.at_point(), rational(3, 1));
    assert!(e.reduce(Reduction::ModJ).is_zero());
}

#[test]
fn substitution_examples() {
    let c = chart(3, 4);
    let (x, t1, t2, e) = (var(&c, "x"), var(&c, "t1"), var(&c, "t2"), var(&c, "e"));
    let one = int(&c, 1);
    let images = vec![x.clone(), t1.clone(), t2.clone(), &(&one - &x) * &e];
    let f = e.pow(2);
    let expected = &(&(&one - &(&int(&c, 2) * &x)) + &x.pow(2)) * &e.pow(2);
    assert_eq!(f.compose(&images), expected);
    let id = vec![x.clone(), t1.clone(), t2.clone(), e.clone()];
    let g = &(&t1 * &e) + &(&x * &t2);
    assert_eq!(g.compose(&id), g);
}

#[test]
fn substitution_is_a_ring_morphism() {
    let c = chart(3, 4);
    let (x, t1, t2, e) = (var(&c, "x"), var(&c, "t1"), var(&c, "t2"), var(&c, "e"));
    let images = vec![
        &x + &(&t1 * &t2),
        &t1 + &(&x * &t1),
        &t2 - &(&t1 * &e),
        &e + &(&x * &e),
    ];
    let f = &(&t1 * &e) + &x.pow(2);
    let g = &(&t2 * &e) - &x;
    let lhs = (&f * &g).compose(&images);
    let rhs = &f.compose(&images) * &g.compose(&images);
    assert_eq!(lhs, rhs);
}

#[test]
fn homogeneity_inference() {
    let c = chart(3, 4);
    let (x, t1, e) = (var(&c, "x"), var(&c, "t1"), var(&c, "e"));
    assert_eq!((&x * &e).degree(), Some(dv(&[1, 1])));
    assert_eq!((&x + &t1).degree(), None);
    assert!(GradedSeries::zero(&c).is_homogeneous());
}

#[test]
fn chart_mismatch_is_reported() {
    let a = chart(3, 4);
    let b = chart(2, 4);
    assert!(matches!(
        var(&a, "x").multiply(&var(&b, "x")),
        Err(Error::ChartMismatch)
    ));
}

#[test]
fn retruncate_drops_high_orders() {
    let big = chart(5, 4);
    let small = chart(3, 4);
    let e = var(&big, "e");
    let f = &e.pow(2) + &e.pow(4);
    assert_eq!(f.retruncate(&small).unwrap(), var(&small, "e").pow(2));
}

#[test]
fn display_leading_negative_keeps_coefficient() {
    let c = chart(3, 4);
    let x = var(&c, "x");
    assert_eq!((-&x.pow(2)).to_string(), "-1*x^2");
    let f = &(&x - &x.pow(2)) + &GradedSeries::constant(&c, rational(-1, 2));
    assert_eq!(f.to_string(), "-1/2 + x - x^2");
}
