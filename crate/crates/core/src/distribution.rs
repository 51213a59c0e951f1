//! Distributions given by generator lists: rank, normal form, membership,
//! involutivity.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::grading::DegreeVector;
use crate::linalg::{Echelon, GradedMatrix};
use crate::series::{same_chart, Chart, GradedSeries, Window};

#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    chart: Arc<Chart>,
    generators: Vec<VectorField>,
}

impl Distribution {
    pub fn new(chart: &Arc<Chart>, generators: Vec<VectorField>) -> Result<Self> {
        if generators.iter().any(|g| !same_chart(g.chart(), chart)) {
            return Err(Error::ChartMismatch);
        }
        Ok(Distribution {
            chart: chart.clone(),
            generators,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Number of generators per degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rank {
    pub counts: BTreeMap<DegreeVector, usize>,
}

impl Rank {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn get(&self, degree: DegreeVector) -> usize {
        self.counts.get(&degree).copied().unwrap_or(0)
    }
}

/// Errors with `DependentAtPoint` unless the generators' values at the base
/// point are independent in every degree.
pub fn rank_of(d: &Distribution) -> Result<Rank> {
    let mut blocks: BTreeMap<DegreeVector, Echelon> = BTreeMap::new();
    let mut rank = Rank::default();
    for g in d.generators() {
        let value = dense_at_point(g);
        if blocks.entry(g.degree()).or_default().insert(&value).is_none() {
            return Err(Error::DependentAtPoint);
        }
        *rank.counts.entry(g.degree()).or_default() += 1;
    }
    Ok(rank)
}

fn dense_at_point(g: &VectorField) -> Vec<BigRational> {
    g.coefficients().iter().map(|a| a.at_point()).collect()
}

/// Generators in normal form: generator `t` has coefficient 1 along
/// `pivots[t]` and 0 along every other pivot.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub distribution: Distribution,
    pub pivots: Vec<usize>,
    /// Row `t` holds the multipliers of the original generators in generator `t`.
    pub transform: GradedMatrix,
}

pub fn normalize_generators(d: &Distribution) -> Result<Normalized> {
    let chart = d.chart();
    let mut blocks: BTreeMap<DegreeVector, Echelon> = BTreeMap::new();
    let mut pivots = Vec::with_capacity(d.len());
    for g in d.generators() {
        // Columns outside the generator's degree class are zero by homogeneity.
        let value = dense_at_point(g);
        let pivot = blocks
            .entry(g.degree())
            .or_default()
            .insert(&value)
            .ok_or(Error::DependentAtPoint)?;
        pivots.push(pivot);
    }
    let degrees: Vec<DegreeVector> = d.generators().iter().map(|g| g.degree()).collect();
    let entries = d
        .generators()
        .iter()
        .map(|g| pivots.iter().map(|&p| g.coefficient(p).clone()).collect())
        .collect();
    let block = GradedMatrix::new(chart, degrees.clone(), degrees, entries)?;
    let transform = block.invert_mod_j()?;
    let generators = (0..d.len())
        .map(|t| combine(chart, &transform, t, d.generators()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Normalized {
        distribution: Distribution::new(chart, generators)?,
        pivots,
        transform,
    })
}

/// Σ_i m[t][i] · gens[i].
fn combine(chart: &Arc<Chart>, m: &GradedMatrix, t: usize, gens: &[VectorField]) -> Result<VectorField> {
    let mut acc = VectorField::zero(chart, gens[t].degree());
    for (i, g) in gens.iter().enumerate() {
        let f = m.entry(t, i);
        if f.is_zero() {
            continue;
        }
        acc = acc.try_add(&g.left_multiply(f)?)?;
    }
    Ok(acc)
}

/// Leftover component of a failed membership test.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub coordinate: usize,
    pub residual: GradedSeries,
    /// Lowest filtration order (base + J degree) present in `residual`.
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// `X = Σ coefficients[i] · generators[i]`.
    Member { coefficients: Vec<GradedSeries> },
    NotMember(Obstruction),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Exact membership test in the truncated ring.
pub fn membership(x: &VectorField, d: &Distribution) -> Result<Membership> {
    membership_within(x, d, Window::EXACT)
}

/// Membership up to terms outside `window`.
pub fn membership_within(x: &VectorField, d: &Distribution, window: Window) -> Result<Membership> {
    let normalized = normalize_generators(d)?;
    membership_normalized(x, &normalized, window)
}

pub(crate) fn membership_normalized(x: &VectorField, n: &Normalized, window: Window) -> Result<Membership> {
    let chart = n.distribution.chart();
    if !same_chart(x.chart(), chart) {
        return Err(Error::ChartMismatch);
    }
    let gens = n.distribution.generators();
    let mut residual = x.clone();
    let mut local = Vec::with_capacity(gens.len());
    for (t, y) in gens.iter().enumerate() {
        let f = x.coefficient(n.pivots[t]).clone();
        if !f.is_zero() {
            // Only same-degree generators can contribute; others have f = 0.
            residual = residual.try_sub(&y.left_multiply(&f)?)?;
        }
        local.push(f);
    }
    let obstruction = residual
        .coefficients()
        .iter()
        .enumerate()
        .filter_map(|(u, a)| {
            let r = a.restrict(window);
            r.min_order().map(|order| Obstruction {
                coordinate: u,
                residual: r,
                order,
            })
        })
        .min_by_key(|o| (o.order, o.coordinate));
    if let Some(o) = obstruction {
        return Ok(Membership::NotMember(o));
    }
    // Back to the original generators: X = Σ_t f_t Y_t = Σ_i (Σ_t f_t S_ti) X_i.
    let coefficients = (0..gens.len())
        .map(|i| {
            local
                .iter()
                .enumerate()
                .fold(GradedSeries::zero(chart), |acc, (t, f)| &acc + &(f * n.transform.entry(t, i)))
        })
        .collect();
    Ok(Membership::Member { coefficients })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvolutivityWitness {
    pub left: usize,
    pub right: usize,
    pub bracket: VectorField,
    pub obstruction: Obstruction,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Involutivity {
    Involutive,
    NotInvolutive(Box<InvolutivityWitness>),
}

impl Involutivity {
    pub fn holds(&self) -> bool {
        matches!(self, Involutivity::Involutive)
    }
}

/// Tests every bracket of generators, comparing within [`Window::CHECK`]
/// since brackets differentiate truncated data.
pub fn is_involutive(d: &Distribution) -> Result<Involutivity> {
    let normalized = normalize_generators(d)?;
    let gens = d.generators();
    for i in 0..gens.len() {
        for j in i..gens.len() {
            let bracket = gens[i].bracket(&gens[j])?;
            if let Membership::NotMember(obstruction) = membership_normalized(&bracket, &normalized, Window::CHECK)? {
                return Ok(Involutivity::NotInvolutive(Box::new(InvolutivityWitness {
                    left: i,
                    right: j,
                    bracket,
                    obstruction,
                })));
            }
        }
    }
    Ok(Involutivity::Involutive)
}
