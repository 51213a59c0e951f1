//! Seeded generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use superfrob::series::rational;
use superfrob::{Chart, Coordinate, CoordinateChange, DegreeVector, GradedSeries, Truncation, VectorField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dv(e: &[u8]) -> DegreeVector {
    DegreeVector::from_slice(e).unwrap()
}

pub fn trunc(j_order: u32, base_order: u32) -> Truncation {
    Truncation { j_order, base_order }
}

fn coord(name: &str, degree: &[u8]) -> Coordinate {
    Coordinate { name: name.into(), degree: dv(degree) }
}

/// x(0,0), t1(0,1), t2(1,0), e(1,1)
pub fn standard_chart(t: Truncation) -> Arc<Chart> {
    Chart::new(
        2,
        vec![coord("x", &[0, 0]), coord("t1", &[0, 1]), coord("t2", &[1, 0]), coord("e", &[1, 1])],
        t,
    )
    .unwrap()
}

/// Two base coordinates and one coordinate of each nonzero degree in Z₂².
pub fn rich_chart(t: Truncation) -> Arc<Chart> {
    Chart::new(
        2,
        vec![
            coord("x", &[0, 0]),
            coord("y", &[0, 0]),
            coord("t1", &[0, 1]),
            coord("t2", &[1, 0]),
            coord("e", &[1, 1]),
        ],
        t,
    )
    .unwrap()
}

/// One base coordinate plus one coordinate per nonzero degree of Z₂ⁿ.
pub fn full_chart(n: usize, t: Truncation) -> Arc<Chart> {
    let mut coords = vec![Coordinate { name: "x".into(), degree: DegreeVector::zero(n) }];
    for bits in 1..(1u32 << n) {
        coords.push(Coordinate {
            name: format!("c{bits}"),
            degree: DegreeVector::from_bits(n, bits),
        });
    }
    Chart::new(n, coords, t).unwrap()
}

pub fn var(c: &Arc<Chart>, name: &str) -> GradedSeries {
    GradedSeries::variable_named(c, name).unwrap()
}

pub fn d(c: &Arc<Chart>, name: &str) -> VectorField {
    VectorField::coordinate(c, c.index_of(name).unwrap())
}

pub fn small_rational(rng: &mut impl Rng) -> BigRational {
    let num = loop {
        let k = rng.gen_range(-3i64..=3);
        if k != 0 {
            break k;
        }
    };
    rational(num, rng.gen_range(1i64..=3))
}

/// Degree of the monomial with the given exponents.
pub fn exps_degree(chart: &Chart, exps: &[u8]) -> DegreeVector {
    let bits = exps
        .iter()
        .enumerate()
        .filter(|(_, &a)| a % 2 == 1)
        .fold(0u32, |acc, (i, _)| acc ^ chart.degree(i).bits());
    DegreeVector::from_bits(chart.rank(), bits)
}

/// Random exponent vector of the given degree and total order at most `max_order`.
pub fn random_exps(rng: &mut impl Rng, chart: &Chart, degree: DegreeVector, max_order: u32) -> Option<Vec<u8>> {
    for _ in 0..64 {
        let exps: Vec<u8> = (0..chart.len())
            .map(|i| {
                let top = if chart.is_odd(i) { 1 } else { 2 };
                if rng.gen_bool(0.5) {
                    0
                } else {
                    rng.gen_range(0..=top)
                }
            })
            .collect();
        let order: u32 = exps.iter().map(|&a| u32::from(a)).sum();
        if order <= max_order && exps_degree(chart, &exps) == degree {
            return Some(exps);
        }
    }
    None
}

pub fn random_series(
    rng: &mut impl Rng,
    chart: &Arc<Chart>,
    degree: DegreeVector,
    terms: usize,
    max_order: u32,
) -> GradedSeries {
    let mut s = GradedSeries::zero(chart);
    for _ in 0..terms {
        if let Some(exps) = random_exps(rng, chart, degree, max_order) {
            s = &s + &GradedSeries::monomial(chart, &exps, small_rational(rng));
        }
    }
    s
}

pub fn random_field(
    rng: &mut impl Rng,
    chart: &Arc<Chart>,
    degree: DegreeVector,
    terms: usize,
    max_order: u32,
) -> VectorField {
    let coefficients = (0..chart.len())
        .map(|u| random_series(rng, chart, degree + chart.degree(u), terms, max_order))
        .collect();
    VectorField::new(chart, degree, coefficients).unwrap()
}

/// Zero or the degree of a random coordinate.
pub fn random_degree(rng: &mut impl Rng, chart: &Chart) -> DegreeVector {
    if rng.gen_bool(0.3) {
        chart.zero_degree()
    } else {
        chart.degree(rng.gen_range(0..chart.len()))
    }
}

/// Centered, degree-preserving change with a random invertible linear part
/// and random nonlinear terms of order 2..=max_order.
pub fn random_change(rng: &mut impl Rng, chart: &Arc<Chart>, terms: usize, max_order: u32) -> CoordinateChange {
    let n = chart.len();
    let images = (0..n)
        .map(|u| {
            let mut img = GradedSeries::variable(chart, u).scale(&rational(rng.gen_range(1..=2), 1));
            for v in 0..u {
                if chart.degree(v) == chart.degree(u) && rng.gen_bool(0.5) {
                    img = &img + &GradedSeries::variable(chart, v).scale(&small_rational(rng));
                }
            }
            let tail = random_series(rng, chart, chart.degree(u), terms, max_order).filter(|m| m.order() >= 2);
            &img + &tail
        })
        .collect();
    CoordinateChange::new(chart, images).unwrap()
}

/// Product of two monomials by sorting the concatenated factor word with
/// adjacent transpositions, each contributing (−1)^⟨deg a, deg b⟩.
/// `None` when an odd generator repeats.
pub fn oracle_product(chart: &Chart, a: &[u8], b: &[u8]) -> Option<(bool, Vec<u8>)> {
    let mut word: Vec<usize> = Vec::new();
    for exps in [a, b] {
        for (i, &k) in exps.iter().enumerate() {
            word.extend(std::iter::repeat_n(i, k as usize));
        }
    }
    let mut negative = false;
    for pass in 0..word.len() {
        for j in 0..word.len().saturating_sub(1 + pass) {
            if word[j] > word[j + 1] {
                let (p, q) = (chart.degree(word[j]), chart.degree(word[j + 1]));
                if p.scalar_product(&q).unwrap() {
                    negative = !negative;
                }
                word.swap(j, j + 1);
            }
        }
    }
    let mut out = vec![0u8; chart.len()];
    for &i in &word {
        out[i] += 1;
        if chart.is_odd(i) && out[i] > 1 {
            return None;
        }
    }
    Some((negative, out))
}

/// `(−1)^⟨a,b⟩` as a series constant.
pub fn koszul(chart: &Arc<Chart>, a: DegreeVector, b: DegreeVector) -> GradedSeries {
    let one = BigRational::one();
    let c = if a.scalar_product(&b).unwrap() { -one } else { one };
    GradedSeries::constant(chart, c)
}

